#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace mstates {

// Per-stage provenance: the fingerprint of everything the stage read
// (parameters and upstream fingerprints) plus content hashes of every
// file it wrote. A stage re-runs unless both sides still match.
struct StageRecord {
    std::string fingerprint;
    std::map<std::string, std::string> outputs;  // out-relative path -> content hash
};

struct Manifest {
    std::map<std::string, std::string> parameters;  // stable echo of the run config
    std::string input_fingerprint;
    std::map<std::string, StageRecord> stages;
};

std::string manifest_to_json(const Manifest& manifest);
Manifest manifest_from_json(const std::string& text);
Manifest load_manifest(const std::filesystem::path& path);  // missing file -> empty manifest
void save_manifest(const std::filesystem::path& path, const Manifest& manifest);

}  // namespace mstates
