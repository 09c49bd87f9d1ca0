#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mstates/calendar.hpp"
#include "mstates/fetch.hpp"
#include "mstates/io_util.hpp"
#include "mstates/panel.hpp"
#include "mstates/pipeline.hpp"
#include "mstates/synth.hpp"

namespace {

// Option holders for `run` and `report`. Values only matter when the
// matching flag was actually passed; merge() checks counts.
struct PipelineFlags {
    std::string config_path;
    mstates::PipelineConfig v;
};

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& f) {
    cmd->add_option("--config", f.config_path, "key=value configuration file");
    cmd->add_option("--input", f.v.input, "input panel CSV");
    cmd->add_option("--out", f.v.out, "output directory (default out)");
    cmd->add_option("--epoch-length", f.v.epoch_length, "return days per epoch (default 20)");
    cmd->add_option("--top-k", f.v.top_k, "portfolio size per epoch (default 40)");
    cmd->add_option("--norm-window", f.v.norm_window, "local normalization window (default 13)");
    cmd->add_option("--power-q", f.v.power_q, "power-map exponent (default 1.5)");
    cmd->add_option("--alpha", f.v.alpha, "family-wise significance level (default 0.01)");
    cmd->add_option("--wl-iterations", f.v.wl_iterations, "refinement depth h (default 3)");
    cmd->add_option("--k", f.v.k_override, "fixed state count; 0 selects k via the eigengap");
    cmd->add_option("--k-max", f.v.k_max, "largest k the eigengap may choose (default 10)");
    cmd->add_option("--seed", f.v.seed, "root random seed (default 42)");
    cmd->add_option("--restarts", f.v.restarts, "k-means restarts (default 50)");
    cmd->add_option("--jobs", f.v.jobs, "worker threads; never changes results (default 1)");
    cmd->add_option("--labels", f.v.labels, "node labels: coin or uniform (default coin)");
    cmd->add_option("--date-from", f.v.date_from, "restrict the panel from this ISO date");
    cmd->add_option("--date-to", f.v.date_to, "restrict the panel up to this ISO date");
}

mstates::PipelineConfig merge_flags(const CLI::App* cmd, const PipelineFlags& f) {
    mstates::PipelineConfig cfg;
    if (cmd->count("--config") > 0) cfg = mstates::load_config_file(f.config_path);
    if (cmd->count("--input") > 0) cfg.input = f.v.input;
    if (cmd->count("--out") > 0) cfg.out = f.v.out;
    if (cmd->count("--epoch-length") > 0) cfg.epoch_length = f.v.epoch_length;
    if (cmd->count("--top-k") > 0) cfg.top_k = f.v.top_k;
    if (cmd->count("--norm-window") > 0) cfg.norm_window = f.v.norm_window;
    if (cmd->count("--power-q") > 0) cfg.power_q = f.v.power_q;
    if (cmd->count("--alpha") > 0) cfg.alpha = f.v.alpha;
    if (cmd->count("--wl-iterations") > 0) cfg.wl_iterations = f.v.wl_iterations;
    if (cmd->count("--k") > 0) cfg.k_override = f.v.k_override;
    if (cmd->count("--k-max") > 0) cfg.k_max = f.v.k_max;
    if (cmd->count("--seed") > 0) cfg.seed = f.v.seed;
    if (cmd->count("--restarts") > 0) cfg.restarts = f.v.restarts;
    if (cmd->count("--jobs") > 0) cfg.jobs = f.v.jobs;
    if (cmd->count("--labels") > 0) cfg.labels = f.v.labels;
    if (cmd->count("--date-from") > 0) cfg.date_from = f.v.date_from;
    if (cmd->count("--date-to") > 0) cfg.date_to = f.v.date_to;
    return cfg;
}

void print_summary(const mstates::RunSummary& summary) {
    std::cout << "epochs: " << summary.epochs << "\n";
    std::cout << "chosen k: " << summary.chosen_k << " (" << summary.k_source << ")\n";
    for (const mstates::StateSize& s : summary.states) {
        std::cout << "state " << s.state << ": " << s.size << " epoch(s), medoid epoch "
                  << s.medoid << "\n";
    }
}

int run_fetch(const std::string& base_url, const std::vector<std::string>& coins,
              const std::string& from, const std::string& to, const std::string& cache_dir,
              const std::string& out_path, mstates::FetchConfig fc) {
    fc.base_url = base_url;
    auto client = mstates::make_http_client(base_url);
    const mstates::PricePanel panel =
        mstates::fetch_remote(*client, fc, coins, mstates::parse_iso_date(from),
                              mstates::parse_iso_date(to), cache_dir);
    mstates::write_text_file(out_path, mstates::panel_to_csv(panel));
    std::cout << "wrote " << panel.n_coins() << " coin(s) x " << panel.n_dates() << " day(s) to "
              << out_path << "\n";
    return 0;
}

struct SynthFlags {
    int coins = 40;
    int epoch_length = 20;
    int epochs = 103;
    int burn_in = 4;
    double vol = 0.02;
    std::uint64_t seed = 42;
    std::string start_date = "2017-01-01";
    bool student_t = false;
    double t_dof = 5.0;
    int regimes = 4;
    double rho_in = 0.7;
    double rho_out = 0.1;
    std::string out = "synth.csv";
};

int run_synth(const SynthFlags& f) {
    mstates::SynthConfig sc;
    sc.K = f.coins;
    sc.T = f.epoch_length;
    sc.epochs = f.epochs;
    sc.burn_in = f.burn_in;
    sc.vol = f.vol;
    sc.seed = f.seed;
    sc.start_date = mstates::parse_iso_date(f.start_date);
    sc.student_t = f.student_t;
    sc.t_dof = f.t_dof;
    sc.regimes = mstates::default_regimes(f.coins, f.regimes, f.rho_in, f.rho_out);
    sc.schedule = mstates::cyclic_schedule(f.regimes, f.epochs);

    const mstates::PricePanel panel = mstates::generate_panel(sc);
    mstates::write_text_file(f.out, mstates::panel_to_csv(panel));

    const std::vector<int> labels = mstates::planted_labels(sc);
    std::string labels_csv = "epoch_index,regime\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        labels_csv += std::to_string(i) + "," + std::to_string(labels[i]) + "\n";
    }
    std::filesystem::path labels_path = f.out;
    labels_path.replace_extension();
    labels_path += "_labels.csv";
    mstates::write_text_file(labels_path, labels_csv);

    std::cout << "wrote " << panel.n_coins() << " coin(s) x " << panel.n_dates()
              << " day(s) to " << f.out << " (planted labels: " << labels_path.string() << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"market state detection from asset correlation graphs"};
    app.require_subcommand(1);

    // fetch
    auto* fetch_cmd = app.add_subcommand("fetch", "download per-coin history into a panel CSV");
    std::string base_url;
    std::vector<std::string> coins;
    std::string from;
    std::string to;
    std::string cache_dir;
    std::string fetch_out = "panel.csv";
    mstates::FetchConfig fc;
    fetch_cmd->add_option("--base-url", base_url, "aggregator base URL")->required();
    fetch_cmd->add_option("--coins", coins, "coin ids (comma separated)")
        ->required()
        ->delimiter(',');
    fetch_cmd->add_option("--from", from, "first date (ISO)")->required();
    fetch_cmd->add_option("--to", to, "last date (ISO)")->required();
    fetch_cmd->add_option("--cache", cache_dir, "per-coin response cache directory")->required();
    fetch_cmd->add_option("--out", fetch_out, "panel CSV to write (default panel.csv)");
    fetch_cmd->add_option("--path-template", fc.path_template,
                          "request path, {coin} substituted (default /history/{coin})");
    fetch_cmd->add_option("--query-template", fc.query_template,
                          "query string, {from}/{to} substituted (default from={from}&to={to})");
    fetch_cmd->add_option("--rate-limit", fc.rate_limit_rpm,
                          "max requests per minute, 0 disables (default 120)");
    fetch_cmd->add_option("--retries", fc.max_retries, "attempts per coin (default 3)");

    // run
    auto* run_cmd = app.add_subcommand("run", "execute the full pipeline into --out");
    PipelineFlags run_flags;
    add_pipeline_flags(run_cmd, run_flags);

    // report
    auto* report_cmd =
        app.add_subcommand("report", "rebuild report/summary.json from existing stage outputs");
    PipelineFlags report_flags;
    add_pipeline_flags(report_cmd, report_flags);

    // synth
    auto* synth_cmd =
        app.add_subcommand("synth", "generate a panel with planted correlation regimes");
    SynthFlags sf;
    synth_cmd->add_option("--coins", sf.coins, "number of coins (default 40)");
    synth_cmd->add_option("--epoch-length", sf.epoch_length, "return days per epoch (default 20)");
    synth_cmd->add_option("--epochs", sf.epochs, "number of epochs (default 103)");
    synth_cmd->add_option("--burn-in", sf.burn_in,
                          "extra leading return days under the first regime (default 4)");
    synth_cmd->add_option("--vol", sf.vol, "daily return scale (default 0.02)");
    synth_cmd->add_option("--seed", sf.seed, "generator seed (default 42)");
    synth_cmd->add_option("--start-date", sf.start_date, "first price date (default 2017-01-01)");
    synth_cmd->add_flag("--student-t", sf.student_t, "draw fat-tailed returns instead of Gaussian");
    synth_cmd->add_option("--t-dof", sf.t_dof, "Student-t degrees of freedom (default 5)");
    synth_cmd->add_option("--regimes", sf.regimes, "number of planted regimes (default 4)");
    synth_cmd->add_option("--rho-in", sf.rho_in, "within-block correlation (default 0.7)");
    synth_cmd->add_option("--rho-out", sf.rho_out, "across-block correlation (default 0.1)");
    synth_cmd->add_option("--out", sf.out, "panel CSV to write (default synth.csv)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (fetch_cmd->parsed()) {
            return run_fetch(base_url, coins, from, to, cache_dir, fetch_out, fc);
        }
        if (run_cmd->parsed()) {
            print_summary(mstates::run_pipeline(merge_flags(run_cmd, run_flags)));
            return 0;
        }
        if (report_cmd->parsed()) {
            print_summary(mstates::write_report(merge_flags(report_cmd, report_flags)));
            return 0;
        }
        if (synth_cmd->parsed()) {
            return run_synth(sf);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
