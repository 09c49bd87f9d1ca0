#include "mstates/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "mstates/calendar.hpp"
#include "mstates/clustering.hpp"
#include "mstates/correlation.hpp"
#include "mstates/csv.hpp"
#include "mstates/ingest.hpp"
#include "mstates/io_util.hpp"
#include "mstates/manifest.hpp"
#include "mstates/network.hpp"
#include "mstates/panel.hpp"
#include "mstates/parallel.hpp"
#include "mstates/rng.hpp"
#include "mstates/timeseries.hpp"
#include "mstates/wl.hpp"

namespace mstates {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string hash_of(std::string_view content) { return to_hex(fnv1a64(content)); }

// Fingerprint of a stage: its name, the parameters it reads, and the
// fingerprints of the stages it reads from, joined unambiguously.
std::string chain_fp(const std::vector<std::string>& parts) {
    std::string all;
    for (const std::string& p : parts) {
        all += p;
        all += '\x1f';
    }
    return hash_of(all);
}

std::string int_str(long long v) { return std::to_string(v); }

// ---------------------------------------------------------------------
// Stage file codecs. Every number is written with format_double, which
// round-trips doubles exactly, so re-reading a stage's files recovers
// the values bit for bit.

std::string series_to_csv(const std::vector<ReturnSeries>& series) {
    std::string out = "date,coin_id,value\n";
    for (const ReturnSeries& s : series) {
        for (std::size_t i = 0; i < s.dates.size(); ++i) {
            out += format_iso_date(s.dates[i]);
            out += ',';
            out += csv_escape(s.coin_id);
            out += ',';
            out += format_double(s.values(static_cast<Index>(i)));
            out += '\n';
        }
    }
    return out;
}

std::vector<ReturnSeries> series_from_csv(const std::string& text) {
    const auto rows = parse_csv_text(text);
    if (rows.empty() || rows.front() != std::vector<std::string>{"date", "coin_id", "value"}) {
        throw std::runtime_error("series csv: expected header date,coin_id,value");
    }
    std::vector<std::string> order;
    std::map<std::string, std::pair<std::vector<Day>, std::vector<double>>> by_coin;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() == 1 && row[0].empty()) continue;
        if (row.size() != 3) throw std::runtime_error("series csv: row needs 3 fields");
        auto [it, inserted] = by_coin.try_emplace(row[1]);
        if (inserted) order.push_back(row[1]);
        it->second.first.push_back(parse_iso_date(row[0]));
        it->second.second.push_back(parse_double(row[2]));
    }
    std::vector<ReturnSeries> out;
    out.reserve(order.size());
    for (const std::string& coin : order) {
        auto& [dates, values] = by_coin[coin];
        ReturnSeries s;
        s.coin_id = coin;
        s.dates = std::move(dates);
        s.values = Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
        out.push_back(std::move(s));
    }
    return out;
}

std::string epochs_to_csv(const std::vector<Epoch>& epochs) {
    std::string out = "index,start,end\n";
    for (const Epoch& e : epochs) {
        out += int_str(e.index);
        out += ',';
        out += format_iso_date(e.start_date);
        out += ',';
        out += format_iso_date(e.end_date);
        out += '\n';
    }
    return out;
}

std::vector<Epoch> epochs_from_csv(const std::string& text, int T) {
    const auto rows = parse_csv_text(text);
    if (rows.empty() || rows.front() != std::vector<std::string>{"index", "start", "end"}) {
        throw std::runtime_error("epochs csv: expected header index,start,end");
    }
    std::vector<Epoch> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() == 1 && row[0].empty()) continue;
        if (row.size() != 3) throw std::runtime_error("epochs csv: row needs 3 fields");
        Epoch e;
        e.index = std::stoi(row[0]);
        e.start_date = parse_iso_date(row[1]);
        e.end_date = parse_iso_date(row[2]);
        e.length = T;
        out.push_back(e);
    }
    return out;
}

// Square matrix with a one-line identifier header (coin ids for
// correlation matrices, epoch indices for kernel matrices).
std::string matrix_to_csv(const std::vector<std::string>& names, const Matrix& M) {
    std::vector<std::string> header;
    header.reserve(names.size());
    for (const std::string& n : names) header.push_back(csv_escape(n));
    std::string out = join_csv_row(header);
    out += '\n';
    for (Index i = 0; i < M.rows(); ++i) {
        for (Index j = 0; j < M.cols(); ++j) {
            if (j > 0) out += ',';
            out += format_double(M(i, j));
        }
        out += '\n';
    }
    return out;
}

std::pair<std::vector<std::string>, Matrix> matrix_from_csv(const std::string& text) {
    const auto rows = parse_csv_text(text);
    if (rows.empty()) throw std::runtime_error("matrix csv: empty file");
    const std::vector<std::string>& names = rows.front();
    const Index n = static_cast<Index>(names.size());
    Matrix M(n, n);
    Index filled = 0;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() == 1 && row[0].empty()) continue;
        if (static_cast<Index>(row.size()) != n) throw std::runtime_error("matrix csv: ragged row");
        if (filled >= n) throw std::runtime_error("matrix csv: too many rows");
        for (Index j = 0; j < n; ++j) M(filled, j) = parse_double(row[static_cast<std::size_t>(j)]);
        ++filled;
    }
    if (filled != n) throw std::runtime_error("matrix csv: expected square matrix");
    return {names, std::move(M)};
}

std::string corr_path(int epoch_index) {
    return "correlations/epoch_" + int_str(epoch_index) + ".csv";
}

CorrelationMatrix read_corr_csv(const fs::path& out_root, const Epoch& epoch) {
    auto [names, M] = matrix_from_csv(read_text_file(out_root / corr_path(epoch.index)));
    CorrelationMatrix cm;
    cm.epoch = epoch;
    cm.coin_ids = std::move(names);
    cm.values = std::move(M);
    cm.q_applied = 1.0;
    return cm;
}

std::string stats_to_csv(const std::vector<EpochStats>& stats) {
    std::string out = "epoch_index,mean_return,mean_correlation\n";
    for (const EpochStats& s : stats) {
        out += int_str(s.epoch_index);
        out += ',';
        out += format_double(s.mean_return);
        out += ',';
        out += format_double(s.mean_correlation);
        out += '\n';
    }
    return out;
}

std::vector<EpochStats> stats_from_csv(const std::string& text) {
    const auto rows = parse_csv_text(text);
    if (rows.empty() ||
        rows.front() != std::vector<std::string>{"epoch_index", "mean_return", "mean_correlation"}) {
        throw std::runtime_error("stats csv: unexpected header");
    }
    std::vector<EpochStats> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() == 1 && row[0].empty()) continue;
        if (row.size() != 3) throw std::runtime_error("stats csv: row needs 3 fields");
        EpochStats s;
        s.epoch_index = std::stoi(row[0]);
        s.mean_return = parse_double(row[1]);
        s.mean_correlation = parse_double(row[2]);
        out.push_back(s);
    }
    return out;
}

std::string assignments_to_csv(const std::vector<Epoch>& epochs, const std::vector<int>& state) {
    std::string out = "epoch_index,start_date,end_date,state\n";
    for (std::size_t i = 0; i < epochs.size(); ++i) {
        out += int_str(epochs[i].index);
        out += ',';
        out += format_iso_date(epochs[i].start_date);
        out += ',';
        out += format_iso_date(epochs[i].end_date);
        out += ',';
        out += int_str(state[i]);
        out += '\n';
    }
    return out;
}

std::pair<std::vector<int>, std::vector<int>> assignments_from_csv(const std::string& text) {
    const auto rows = parse_csv_text(text);
    if (rows.empty() || rows.front() != std::vector<std::string>{"epoch_index", "start_date",
                                                                 "end_date", "state"}) {
        throw std::runtime_error("assignments csv: unexpected header");
    }
    std::vector<int> epoch_ids;
    std::vector<int> state;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() == 1 && row[0].empty()) continue;
        if (row.size() != 4) throw std::runtime_error("assignments csv: row needs 4 fields");
        epoch_ids.push_back(std::stoi(row[0]));
        state.push_back(std::stoi(row[3]));
    }
    return {std::move(epoch_ids), std::move(state)};
}

std::string eigenvalues_to_csv(const Vector& ev) {
    std::string out = "index,eigenvalue\n";
    for (Index i = 0; i < ev.size(); ++i) {
        out += int_str(i);
        out += ',';
        out += format_double(ev(i));
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------
// Stage runner: wipes a stage's owned paths, collects the files it
// produces, writes them, and records fingerprint plus content hashes.
// A stage is skipped when its fingerprint matches the manifest and
// every recorded output is still on disk with the recorded hash.

using FileList = std::vector<std::pair<std::string, std::string>>;  // out-relative -> content

class StageRunner {
public:
    StageRunner(const fs::path& out_root, Manifest& manifest, const fs::path& manifest_path)
        : out_root_(out_root), manifest_(manifest), manifest_path_(manifest_path) {}

    bool run(const std::string& name, const std::string& fp, const std::vector<std::string>& owned,
             const std::function<FileList()>& produce) {
        if (current(name, fp)) {
            std::cout << "[" << name << "] up to date\n";
            return false;
        }
        FileList files;
        try {
            files = produce();
        } catch (const std::exception& e) {
            throw std::runtime_error("stage " + name + ": " + e.what());
        }
        for (const std::string& rel : owned) {
            std::error_code ec;
            fs::remove_all(out_root_ / rel, ec);
        }
        StageRecord record;
        record.fingerprint = fp;
        for (const auto& [rel, content] : files) {
            write_text_file(out_root_ / rel, content);
            record.outputs[rel] = hash_of(content);
        }
        manifest_.stages[name] = std::move(record);
        save_manifest(manifest_path_, manifest_);
        std::cout << "[" << name << "] wrote " << files.size() << " file(s)\n";
        return true;
    }

private:
    bool current(const std::string& name, const std::string& fp) const {
        const auto it = manifest_.stages.find(name);
        if (it == manifest_.stages.end() || it->second.fingerprint != fp) return false;
        if (it->second.outputs.empty()) return false;
        for (const auto& [rel, recorded] : it->second.outputs) {
            const fs::path p = out_root_ / rel;
            std::error_code ec;
            if (!fs::is_regular_file(p, ec)) return false;
            if (to_hex(fnv1a64_file(p)) != recorded) return false;
        }
        return true;
    }

    fs::path out_root_;
    Manifest& manifest_;
    fs::path manifest_path_;
};

// Stable echo of every parameter that influences produced bytes. jobs
// and out are deliberately absent: neither may change results.
std::map<std::string, std::string> parameter_echo(const PipelineConfig& c) {
    return {
        {"alpha", format_double(c.alpha)},
        {"date_from", c.date_from},
        {"date_to", c.date_to},
        {"epoch_length", int_str(c.epoch_length)},
        {"k", int_str(c.k_override)},
        {"k_max", int_str(c.k_max)},
        {"labels", c.labels},
        {"norm_window", int_str(c.norm_window)},
        {"power_q", format_double(c.power_q)},
        {"restarts", int_str(c.restarts)},
        {"seed", int_str(static_cast<long long>(c.seed))},
        {"top_k", int_str(c.top_k)},
        {"wl_iterations", int_str(c.wl_iterations)},
    };
}

PricePanel load_input_panel(const PipelineConfig& config, const std::string& input_text) {
    PricePanel panel = parse_panel_csv_text(input_text);
    if (!config.date_from.empty() || !config.date_to.empty()) {
        if (panel.n_dates() == 0) return panel;
        const Day first =
            config.date_from.empty() ? panel.dates.front() : parse_iso_date(config.date_from);
        const Day last =
            config.date_to.empty() ? panel.dates.back() : parse_iso_date(config.date_to);
        panel = slice_panel(panel, first, last);
    }
    return panel;
}

struct StageFingerprints {
    std::string returns;
    std::string correlate;
    std::string network;
    std::string kernel;
    std::string cluster;
    std::string report;
};

StageFingerprints make_fingerprints(const PipelineConfig& c, const std::string& input_fp) {
    StageFingerprints fp;
    fp.returns = chain_fp({"returns", input_fp, int_str(c.norm_window), int_str(c.epoch_length),
                           c.date_from, c.date_to});
    fp.correlate = chain_fp({"correlate", fp.returns, int_str(c.top_k), format_double(c.power_q)});
    fp.network = chain_fp({"network", fp.correlate, format_double(c.alpha), c.labels});
    fp.kernel = chain_fp({"kernel", fp.network, int_str(c.wl_iterations)});
    fp.cluster = chain_fp({"cluster", fp.kernel, fp.correlate, int_str(c.k_override),
                           int_str(c.k_max), int_str(static_cast<long long>(c.seed)),
                           int_str(c.restarts)});
    fp.report = chain_fp({"report", fp.cluster, fp.correlate, fp.kernel});
    return fp;
}

// ---------------------------------------------------------------------
// Stage bodies. Each reads only the input file or files written by
// earlier stages, never in-memory state from them, so a resumed run
// and a fresh run see identical bytes.

FileList stage_returns(const PipelineConfig& config, const std::string& input_text) {
    const PricePanel panel = load_input_panel(config, input_text);
    const ValidationReport report = validate_panel(panel);
    if (report.empty) throw std::runtime_error("input panel has no data");
    std::cerr << "panel: " << panel.n_coins() << " coins, " << panel.n_dates() << " days ("
              << format_iso_date(report.first_date) << " to " << format_iso_date(report.last_date)
              << "), " << report.total_missing << " missing cells\n";

    const std::vector<ReturnSeries> raw = log_returns(panel);
    std::vector<ReturnSeries> normalized;
    normalized.reserve(raw.size());
    for (const ReturnSeries& s : raw) normalized.push_back(local_normalize(s, config.norm_window));

    // Epochs tile the normalized date axis: every panel date from the
    // earliest one a full-history coin gets a normalized value on.
    std::vector<Day> axis;
    const int skip = warmup_floor(config.norm_window);
    for (Index t = skip; t < panel.n_dates(); ++t) axis.push_back(panel.dates[t]);
    const std::vector<Epoch> epochs = slice_epochs(axis, config.epoch_length);
    if (epochs.empty()) {
        throw std::runtime_error("no complete epochs: " + int_str(axis.size()) +
                                 " usable days < epoch length " + int_str(config.epoch_length));
    }

    FileList files;
    files.emplace_back("returns/raw.csv", series_to_csv(raw));
    files.emplace_back("returns/normalized.csv", series_to_csv(normalized));
    files.emplace_back("epochs.csv", epochs_to_csv(epochs));
    return files;
}

FileList stage_correlate(const PipelineConfig& config, const fs::path& out_root,
                         const std::string& input_text) {
    const PricePanel panel = load_input_panel(config, input_text);
    const std::vector<ReturnSeries> raw = series_from_csv(read_text_file(out_root / "returns/raw.csv"));
    const std::vector<ReturnSeries> normalized =
        series_from_csv(read_text_file(out_root / "returns/normalized.csv"));
    const std::vector<Epoch> epochs =
        epochs_from_csv(read_text_file(out_root / "epochs.csv"), config.epoch_length);

    const std::size_t n = epochs.size();
    std::vector<std::string> corr_csv(n);
    std::vector<std::string> power_csv(n);
    std::vector<EpochStats> stats(n);
    const bool emit_power = config.power_q != 1.0;

    parallel_for(n, config.jobs, [&](std::size_t i) {
        const Portfolio portfolio = select_top_k(panel, epochs[i], normalized, config.top_k);
        const CorrelationMatrix cm = pearson_matrix(portfolio, normalized);
        corr_csv[i] = matrix_to_csv(cm.coin_ids, cm.values);
        if (emit_power) {
            const CorrelationMatrix powered = power_map(cm, config.power_q);
            power_csv[i] = matrix_to_csv(powered.coin_ids, powered.values);
        }
        stats[i] = epoch_stats(portfolio, raw, cm);
    });

    FileList files;
    for (std::size_t i = 0; i < n; ++i) {
        files.emplace_back(corr_path(epochs[i].index), std::move(corr_csv[i]));
        if (emit_power) {
            files.emplace_back("correlations/epoch_" + int_str(epochs[i].index) + ".power.csv",
                               std::move(power_csv[i]));
        }
    }
    files.emplace_back("correlations/stats.csv", stats_to_csv(stats));
    return files;
}

FileList stage_network(const PipelineConfig& config, const fs::path& out_root) {
    const std::vector<Epoch> epochs =
        epochs_from_csv(read_text_file(out_root / "epochs.csv"), config.epoch_length);
    const std::size_t n = epochs.size();
    std::vector<std::string> json_text(n);
    std::vector<std::string> dot_text(n);
    const std::string uniform_label = "asset";
    const std::string* override_ptr = config.labels == "uniform" ? &uniform_label : nullptr;

    parallel_for(n, config.jobs, [&](std::size_t i) {
        const CorrelationMatrix cm = read_corr_csv(out_root, epochs[i]);
        const MarketGraph graph = build_graph(cm, config.alpha, config.epoch_length, override_ptr);
        json_text[i] = graph_to_json(graph);
        dot_text[i] = graph_to_dot(graph);
    });

    FileList files;
    for (std::size_t i = 0; i < n; ++i) {
        const std::string stem = "graphs/epoch_" + int_str(epochs[i].index);
        files.emplace_back(stem + ".json", std::move(json_text[i]));
        files.emplace_back(stem + ".dot", std::move(dot_text[i]));
    }
    return files;
}

FileList stage_kernel(const PipelineConfig& config, const fs::path& out_root) {
    const std::vector<Epoch> epochs =
        epochs_from_csv(read_text_file(out_root / "epochs.csv"), config.epoch_length);
    std::vector<LabeledGraph> graphs;
    std::vector<int> epoch_ids;
    std::vector<std::string> names;
    graphs.reserve(epochs.size());
    for (const Epoch& e : epochs) {
        const MarketGraph g = graph_from_json(
            read_text_file(out_root / ("graphs/epoch_" + int_str(e.index) + ".json")));
        LabeledGraph lg;
        lg.labels.reserve(g.nodes.size());
        for (const GraphNode& node : g.nodes) lg.labels.push_back(node.label);
        lg.adjacency.assign(g.nodes.size(), {});
        for (const auto& [a, b] : g.edges) {
            lg.adjacency[static_cast<std::size_t>(a)].push_back(b);
            lg.adjacency[static_cast<std::size_t>(b)].push_back(a);
        }
        for (auto& neighbors : lg.adjacency) std::sort(neighbors.begin(), neighbors.end());
        graphs.push_back(std::move(lg));
        epoch_ids.push_back(e.index);
        names.push_back(int_str(e.index));
    }

    const KernelMatrix K =
        kernel_matrix(graphs, config.wl_iterations, true, config.jobs, &epoch_ids);
    const DistanceMatrix D = kernel_distance(K);

    FileList files;
    files.emplace_back("kernel/kernel_matrix.csv", matrix_to_csv(names, K.values));
    files.emplace_back("kernel/distance_matrix.csv", matrix_to_csv(names, D.values));
    return files;
}

FileList stage_cluster(const PipelineConfig& config, const fs::path& out_root) {
    const std::vector<Epoch> epochs =
        epochs_from_csv(read_text_file(out_root / "epochs.csv"), config.epoch_length);
    auto [kernel_names, kernel_values] =
        matrix_from_csv(read_text_file(out_root / "kernel/kernel_matrix.csv"));
    auto [dist_names, dist_values] =
        matrix_from_csv(read_text_file(out_root / "kernel/distance_matrix.csv"));

    KernelMatrix K;
    K.values = std::move(kernel_values);
    K.h = config.wl_iterations;
    K.normalized = true;
    for (const std::string& name : kernel_names) K.epoch_ids.push_back(std::stoi(name));
    DistanceMatrix D;
    D.values = std::move(dist_values);
    for (const std::string& name : dist_names) D.epoch_ids.push_back(std::stoi(name));

    const Index m = K.values.rows();
    if (static_cast<std::size_t>(m) != epochs.size()) {
        throw std::runtime_error("kernel matrix size does not match epoch count");
    }

    // Full Laplacian spectrum, written regardless of how k is chosen.
    Matrix affinity = K.values;
    affinity.diagonal().setZero();
    const Eigen::SelfAdjointEigenSolver<Matrix> solver(normalized_laplacian<double>(affinity),
                                                       Eigen::EigenvaluesOnly);
    const Vector eigenvalues = solver.eigenvalues();

    int k = config.k_override;
    if (k == 0) {
        if (m <= config.k_max) {
            throw std::runtime_error("eigengap selection needs more epochs than k_max (" +
                                     int_str(m) + " <= " + int_str(config.k_max) +
                                     "); pass an explicit k");
        }
        k = eigengap_k(K, config.k_max);
    }
    if (k > m) throw std::runtime_error("k exceeds the number of epochs");

    StateAssignment assignment;
    if (k == 1) {
        assignment.epoch_ids = K.epoch_ids;
        assignment.state.assign(static_cast<std::size_t>(m), 0);
        assignment.k = 1;
        assignment.inertia = 0.0;
    } else {
        const SpectralEmbedding embedding = spectral_embed(K, k);
        // Stage-named substream: adding stages never perturbs this one.
        assignment = kmeans(embedding.coordinates, k, derive_seed(config.seed, "cluster"),
                            config.restarts, config.jobs, &embedding.epoch_ids);
    }

    std::vector<CorrelationMatrix> matrices;
    matrices.reserve(epochs.size());
    for (const Epoch& e : epochs) matrices.push_back(read_corr_csv(out_root, e));
    const StateReport report = summarize_states(assignment, D, matrices);

    FileList files;
    files.emplace_back("states/assignments.csv", assignments_to_csv(epochs, assignment.state));
    files.emplace_back("states/eigenvalues.csv", eigenvalues_to_csv(eigenvalues));
    for (const StateSummary& s : report.states) {
        const CorrelationMatrix& medoid = matrices[static_cast<std::size_t>(
            std::find_if(epochs.begin(), epochs.end(),
                         [&](const Epoch& e) { return e.index == s.medoid; }) -
            epochs.begin())];
        files.emplace_back("states/state_" + int_str(s.state) + "_medoid_matrix.csv",
                           matrix_to_csv(medoid.coin_ids, medoid.values));
    }
    return files;
}

FileList stage_report(const PipelineConfig& config, const fs::path& out_root) {
    const std::vector<Epoch> epochs =
        epochs_from_csv(read_text_file(out_root / "epochs.csv"), config.epoch_length);
    const std::vector<EpochStats> stats =
        stats_from_csv(read_text_file(out_root / "correlations/stats.csv"));
    auto [epoch_ids, state] =
        assignments_from_csv(read_text_file(out_root / "states/assignments.csv"));
    auto [dist_names, dist_values] =
        matrix_from_csv(read_text_file(out_root / "kernel/distance_matrix.csv"));
    if (epoch_ids.size() != epochs.size() || stats.size() != epochs.size()) {
        throw std::runtime_error("stage outputs disagree on the epoch count");
    }

    StateAssignment assignment;
    assignment.epoch_ids = epoch_ids;
    assignment.state = state;
    assignment.k = state.empty() ? 0 : *std::max_element(state.begin(), state.end()) + 1;
    DistanceMatrix D;
    D.values = std::move(dist_values);
    for (const std::string& name : dist_names) D.epoch_ids.push_back(std::stoi(name));
    std::vector<CorrelationMatrix> matrices;
    matrices.reserve(epochs.size());
    for (const Epoch& e : epochs) matrices.push_back(read_corr_csv(out_root, e));
    const StateReport report = summarize_states(assignment, D, matrices);

    std::map<int, const EpochStats*> stats_by_epoch;
    for (const EpochStats& s : stats) stats_by_epoch[s.epoch_index] = &s;

    ordered_json summary;
    summary["parameters"] = parameter_echo(config);
    summary["epochs"] = epochs.size();
    summary["chosen_k"] = assignment.k;
    summary["k_source"] = config.k_override > 0 ? "override" : "eigengap";
    summary["states"] = ordered_json::array();
    for (const StateSummary& s : report.states) {
        ordered_json js;
        js["state"] = s.state;
        js["size"] = s.members.size();
        js["medoid"] = s.medoid;
        js["mean_correlation"] = s.mean_correlation;
        summary["states"].push_back(std::move(js));
    }
    summary["epoch_stats"] = ordered_json::array();
    for (std::size_t i = 0; i < epochs.size(); ++i) {
        const EpochStats* es = stats_by_epoch.at(epochs[i].index);
        ordered_json je;
        je["epoch"] = epochs[i].index;
        je["start"] = format_iso_date(epochs[i].start_date);
        je["end"] = format_iso_date(epochs[i].end_date);
        je["mean_return"] = es->mean_return;
        je["mean_correlation"] = es->mean_correlation;
        je["state"] = state[i];
        summary["epoch_stats"].push_back(std::move(je));
    }

    FileList files;
    files.emplace_back("report/summary.json", summary.dump(2) + "\n");
    return files;
}

RunSummary summary_from_json(const fs::path& out_root) {
    const ordered_json j = ordered_json::parse(read_text_file(out_root / "report/summary.json"));
    RunSummary out;
    out.epochs = j.at("epochs").get<int>();
    out.chosen_k = j.at("chosen_k").get<int>();
    out.k_source = j.at("k_source").get<std::string>();
    for (const auto& js : j.at("states")) {
        StateSize s;
        s.state = js.at("state").get<int>();
        s.size = js.at("size").get<int>();
        s.medoid = js.at("medoid").get<int>();
        out.states.push_back(s);
    }
    for (const auto& je : j.at("epoch_stats")) out.assignment.push_back(je.at("state").get<int>());
    return out;
}

}  // namespace

PipelineConfig load_config_file(const std::filesystem::path& path) {
    PipelineConfig config;
    const std::string text = read_text_file(path);
    std::size_t pos = 0;
    int line_no = 0;
    auto fail = [&](const std::string& what) {
        throw std::runtime_error(path.string() + ": line " + int_str(line_no) + ": " + what);
    };
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    auto to_int = [&](const std::string& v) {
        std::size_t used = 0;
        int out = 0;
        try {
            out = std::stoi(v, &used);
        } catch (const std::exception&) {
            fail("not an integer: '" + v + "'");
        }
        if (used != v.size()) fail("not an integer: '" + v + "'");
        return out;
    };

    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
        pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail("expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "input") config.input = value;
        else if (key == "out") config.out = value;
        else if (key == "epoch_length") config.epoch_length = to_int(value);
        else if (key == "top_k") config.top_k = to_int(value);
        else if (key == "norm_window") config.norm_window = to_int(value);
        else if (key == "power_q") config.power_q = parse_double(value);
        else if (key == "alpha") config.alpha = parse_double(value);
        else if (key == "wl_iterations") config.wl_iterations = to_int(value);
        else if (key == "k") config.k_override = to_int(value);
        else if (key == "k_max") config.k_max = to_int(value);
        else if (key == "seed") config.seed = std::stoull(value);
        else if (key == "restarts") config.restarts = to_int(value);
        else if (key == "jobs") config.jobs = to_int(value);
        else if (key == "labels") config.labels = value;
        else if (key == "date_from") config.date_from = value;
        else if (key == "date_to") config.date_to = value;
        else fail("unknown config key '" + key + "'");
    }
    return config;
}

void validate_config(const PipelineConfig& config) {
    auto fail = [](const std::string& what) { throw std::invalid_argument("config: " + what); };
    if (config.input.empty()) fail("input panel path is required");
    if (config.out.empty()) fail("out directory is required");
    if (config.epoch_length < 4) fail("epoch_length must be >= 4 (the null needs T - 2 > 1)");
    if (config.top_k < 2) fail("top_k must be >= 2");
    if (config.norm_window < 2) fail("norm_window must be >= 2");
    if (!(config.power_q > 0.0)) fail("power_q must be > 0");
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) fail("alpha must lie in (0, 1)");
    if (config.wl_iterations < 0) fail("wl_iterations must be >= 0");
    if (config.k_override < 0) fail("k must be >= 0 (0 selects k via the eigengap)");
    if (config.k_override == 0 && config.k_max < 2) fail("k_max must be >= 2");
    if (config.restarts < 1) fail("restarts must be >= 1");
    if (config.jobs < 1) fail("jobs must be >= 1");
    if (config.labels != "coin" && config.labels != "uniform") {
        fail("labels must be 'coin' or 'uniform'");
    }
    Day from = 0;
    Day to = 0;
    if (!config.date_from.empty()) from = parse_iso_date(config.date_from);
    if (!config.date_to.empty()) to = parse_iso_date(config.date_to);
    if (!config.date_from.empty() && !config.date_to.empty() && from > to) {
        fail("date_from is after date_to");
    }
    if (config.power_q > 1.5) {
        std::cerr << "warning: power_q = " << format_double(config.power_q)
                  << " is above 1.5; large exponents can empty the significance graphs\n";
    }
}

RunSummary run_pipeline(const PipelineConfig& config) {
    validate_config(config);
    const fs::path out_root = config.out;
    ensure_directory(out_root);
    const fs::path manifest_path = out_root / "manifest.json";

    const std::string input_text = read_text_file(config.input);
    const std::string input_fp = hash_of(input_text);
    const StageFingerprints fp = make_fingerprints(config, input_fp);

    Manifest manifest = load_manifest(manifest_path);
    manifest.parameters = parameter_echo(config);
    manifest.input_fingerprint = input_fp;

    StageRunner runner(out_root, manifest, manifest_path);
    runner.run("returns", fp.returns, {"returns", "epochs.csv"},
               [&] { return stage_returns(config, input_text); });
    runner.run("correlate", fp.correlate, {"correlations"},
               [&] { return stage_correlate(config, out_root, input_text); });
    runner.run("network", fp.network, {"graphs"}, [&] { return stage_network(config, out_root); });
    runner.run("kernel", fp.kernel, {"kernel"}, [&] { return stage_kernel(config, out_root); });
    runner.run("cluster", fp.cluster, {"states"},
               [&] { return stage_cluster(config, out_root); });
    runner.run("report", fp.report, {"report"}, [&] { return stage_report(config, out_root); });

    return summary_from_json(out_root);
}

RunSummary write_report(const PipelineConfig& config) {
    validate_config(config);
    const fs::path out_root = config.out;
    const fs::path manifest_path = out_root / "manifest.json";
    Manifest manifest = load_manifest(manifest_path);
    if (manifest.stages.find("cluster") == manifest.stages.end()) {
        throw std::runtime_error("no completed run in '" + out_root.string() +
                                 "'; run the pipeline first");
    }

    FileList files;
    try {
        files = stage_report(config, out_root);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("stage report: ") + e.what());
    }
    StageRecord record;
    record.fingerprint = chain_fp({"report", manifest.stages.at("cluster").fingerprint,
                                   manifest.stages.count("correlate")
                                       ? manifest.stages.at("correlate").fingerprint
                                       : std::string(),
                                   manifest.stages.count("kernel")
                                       ? manifest.stages.at("kernel").fingerprint
                                       : std::string()});
    for (const auto& [rel, content] : files) {
        write_text_file(out_root / rel, content);
        record.outputs[rel] = hash_of(content);
    }
    manifest.stages["report"] = std::move(record);
    save_manifest(manifest_path, manifest);
    return summary_from_json(out_root);
}

}  // namespace mstates
