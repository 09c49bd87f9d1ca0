#pragma once

#include <cstdint>
#include <vector>

#include "mstates/panel.hpp"

namespace mstates {

// One planted correlation regime: coins partitioned into blocks, with
// rho_in inside a block and rho_out across blocks. The implied K x K
// matrix must be PSD; construction checks it.
struct RegimeSpec {
    int id = 0;
    std::vector<int> block_of;  // per-coin block index, size K
    double rho_in = 0.0;
    double rho_out = 0.0;
};

struct SynthConfig {
    int K = 40;
    int T = 20;          // epoch length in return days
    int epochs = 103;
    int burn_in = 4;     // leading return days governed by schedule[0]
    double vol = 0.02;   // daily return scale
    std::uint64_t seed = 42;
    Day start_date = 0;  // first price date; returns begin the next day
    bool student_t = false;  // fat-tailed variant, unit variance kept
    double t_dof = 5.0;
    std::vector<RegimeSpec> regimes;
    std::vector<int> schedule;  // per-epoch regime index, size `epochs`
};

// The regime's implied correlation matrix. Throws if it is not PSD
// within 1e-10 or the partition is malformed.
Matrix regime_correlation(const RegimeSpec& regime, int K);

// Four structurally distinct equal-size partitions of K coins, used as
// the default planted regimes (contiguous quarters, residue classes,
// halves, contiguous eighths).
std::vector<RegimeSpec> default_regimes(int K, int n_regimes, double rho_in, double rho_out);

std::vector<int> cyclic_schedule(int n_regimes, int epochs);

// Per-epoch regime ids; validates the schedule covers every epoch and
// references only defined regimes.
std::vector<int> planted_labels(const SynthConfig& config);

// Gaussian (or scaled Student-t) returns drawn per epoch from the
// governing regime's matrix via its symmetric square root, accumulated
// into positive prices. Market caps are constant per coin, strictly
// descending in coin order, so top-K selection keeps every coin.
// Bit-identical panels for identical configs.
PricePanel generate_panel(const SynthConfig& config);

}  // namespace mstates
