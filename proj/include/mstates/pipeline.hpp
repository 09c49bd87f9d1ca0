#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mstates {

// Everything `run` needs. Numeric defaults are the pipeline's standard
// operating point; jobs and out never influence produced bytes.
struct PipelineConfig {
    std::string input;  // panel CSV path
    std::string out = "out";
    int epoch_length = 20;   // T
    int top_k = 40;          // K
    int norm_window = 13;    // n
    double power_q = 1.5;    // q
    double alpha = 0.01;
    int wl_iterations = 3;   // h
    int k_override = 0;      // 0 selects k via the eigengap
    int k_max = 10;
    std::uint64_t seed = 42;
    int restarts = 50;
    int jobs = 1;
    std::string labels = "coin";  // node labels: "coin" or "uniform"
    std::string date_from;        // optional ISO bounds on the panel
    std::string date_to;
};

// Plain key=value file, '#' comments, keys named after the CLI flags.
// Unknown keys are an error so typos fail loudly.
PipelineConfig load_config_file(const std::filesystem::path& path);

// Throws on any parameter outside the operations' preconditions; warns
// on stderr when power_q exceeds 1.5 (large exponents can empty the
// significance graphs).
void validate_config(const PipelineConfig& config);

struct StateSize {
    int state = 0;
    int size = 0;
    int medoid = 0;
};

struct RunSummary {
    int epochs = 0;
    int chosen_k = 0;
    std::string k_source;  // "eigengap" or "override"
    std::vector<StateSize> states;
    std::vector<int> assignment;  // per-epoch state
};

// Executes ingest -> returns -> correlate -> network -> kernel ->
// cluster -> report. Each stage reads its predecessors' files and is
// skipped when its recorded fingerprint and output hashes still match,
// so partial deletions resume bit-identically. Errors carry the stage
// name.
RunSummary run_pipeline(const PipelineConfig& config);

// Rebuilds report/summary.json from existing stage outputs and returns
// the summary (the `report` subcommand).
RunSummary write_report(const PipelineConfig& config);

}  // namespace mstates
