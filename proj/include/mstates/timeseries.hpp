#pragma once

#include <string>
#include <vector>

#include "mstates/panel.hpp"

namespace mstates {

// Per-coin series on a sparse date axis: only dates where the value is
// defined appear, in ascending order, aligned index-for-index with
// `values`. Raw and locally normalized returns share this shape.
struct ReturnSeries {
    std::string coin_id;
    std::vector<Day> dates;
    Vector values;

    // Position of a date in `dates`, or -1 when the value is undefined.
    Index find_date(Day d) const;
};

// A disjoint window of `length` consecutive return dates.
struct Epoch {
    int index = 0;
    Day start_date = 0;
    Day end_date = 0;
    int length = 0;
};

// Top-K membership for one epoch, in descending rank order.
struct Portfolio {
    Epoch epoch;
    std::vector<std::string> coin_ids;
    Vector ranking_stat;  // per-coin mean market cap over the epoch
};

// r(t) = ln S(t) - ln S(t-1), defined where both closes are present.
// One series per panel coin, in panel coin order.
std::vector<ReturnSeries> log_returns(const PricePanel& panel);

// Windows shorter than this never produce a normalized value. The floor
// is 5 except when the window length itself is smaller.
int warmup_floor(int n);

// Locally normalized returns: value at t is (r(t) - mean) / sd over the
// trailing window of the most recent min(n, available) returns ending at
// t, population moments. Dates whose window is shorter than
// warmup_floor(n) are omitted from the output.
// Throws on zero window variance, naming the coin and date: a constant
// stretch must be excluded upstream.
ReturnSeries local_normalize(const ReturnSeries& series, int n = 13);

// floor(D/T) epochs tiling `dates` from the front; the remainder is
// dropped. D < T yields an empty list. Requires T >= 2.
std::vector<Epoch> slice_epochs(const std::vector<Day>& dates, int T = 20);

// Coins ranked by mean market cap over the epoch's days (descending,
// ties by ascending coin_id); coins with any missing normalized return
// inside the epoch are skipped and the next rank substitutes. Throws
// when fewer than K coins are eligible, naming the epoch.
Portfolio select_top_k(const PricePanel& panel, const Epoch& epoch,
                       const std::vector<ReturnSeries>& normalized, int K = 40);

}  // namespace mstates
