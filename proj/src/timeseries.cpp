#include "mstates/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mstates {

Index ReturnSeries::find_date(Day d) const {
    const auto it = std::lower_bound(dates.begin(), dates.end(), d);
    if (it == dates.end() || *it != d) return -1;
    return static_cast<Index>(it - dates.begin());
}

std::vector<ReturnSeries> log_returns(const PricePanel& panel) {
    std::vector<ReturnSeries> out;
    out.reserve(static_cast<std::size_t>(panel.n_coins()));
    for (Index i = 0; i < panel.n_coins(); ++i) {
        ReturnSeries series;
        series.coin_id = panel.coins[static_cast<std::size_t>(i)];
        std::vector<double> values;
        for (Index j = 1; j < panel.n_dates(); ++j) {
            if (is_missing(panel.close(i, j)) || is_missing(panel.close(i, j - 1))) continue;
            series.dates.push_back(panel.dates[static_cast<std::size_t>(j)]);
            values.push_back(std::log(panel.close(i, j)) - std::log(panel.close(i, j - 1)));
        }
        series.values = Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
        out.push_back(std::move(series));
    }
    return out;
}

int warmup_floor(int n) { return std::min(n, 5); }

ReturnSeries local_normalize(const ReturnSeries& series, int n) {
    if (n < 2) throw std::invalid_argument("local_normalize: window length must be >= 2");
    const int floor_len = warmup_floor(n);

    ReturnSeries out;
    out.coin_id = series.coin_id;
    std::vector<double> values;
    const Index len = series.values.size();
    for (Index t = 0; t < len; ++t) {
        const Index available = t + 1;
        const Index w = std::min<Index>(n, available);
        if (w < floor_len) continue;

        // Two-pass centered moments: algebraically <r^2> - <r>^2, but
        // immune to the catastrophic cancellation the raw form invites.
        const auto window = series.values.segment(t - w + 1, w);
        const double mu = window.mean();
        const double var = (window.array() - mu).square().mean();
        if (var <= 0.0) {
            throw std::runtime_error("local_normalize: zero window variance for coin '" +
                                     series.coin_id + "' at " +
                                     format_iso_date(series.dates[static_cast<std::size_t>(t)]));
        }
        out.dates.push_back(series.dates[static_cast<std::size_t>(t)]);
        values.push_back((series.values(t) - mu) / std::sqrt(var));
    }
    out.values = Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
    return out;
}

std::vector<Epoch> slice_epochs(const std::vector<Day>& dates, int T) {
    if (T < 2) throw std::invalid_argument("slice_epochs: epoch length must be >= 2");
    std::vector<Epoch> epochs;
    const std::size_t count = dates.size() / static_cast<std::size_t>(T);
    epochs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Epoch e;
        e.index = static_cast<int>(i);
        e.start_date = dates[i * static_cast<std::size_t>(T)];
        e.end_date = dates[(i + 1) * static_cast<std::size_t>(T) - 1];
        e.length = T;
        epochs.push_back(e);
    }
    return epochs;
}

Portfolio select_top_k(const PricePanel& panel, const Epoch& epoch,
                       const std::vector<ReturnSeries>& normalized, int K) {
    if (K < 1) throw std::invalid_argument("select_top_k: K must be >= 1");

    struct Candidate {
        double stat;
        std::string coin_id;
        Index series_idx;
    };
    std::vector<Candidate> candidates;

    for (std::size_t s = 0; s < normalized.size(); ++s) {
        const ReturnSeries& series = normalized[s];
        // Eligibility: a normalized value on every date of the epoch.
        // Series dates are ascending, so presence of both endpoints with
        // the right index distance implies the full contiguous run only
        // if the series has no gaps inside; verify each date.
        bool complete = true;
        Index pos = series.find_date(epoch.start_date);
        if (pos < 0) complete = false;
        for (Day d = epoch.start_date; complete && d <= epoch.end_date; ++d, ++pos) {
            if (pos >= static_cast<Index>(series.dates.size()) ||
                series.dates[static_cast<std::size_t>(pos)] != d) {
                complete = false;
            }
        }
        if (!complete) continue;

        const Index coin_row = panel.coin_index(series.coin_id);
        if (coin_row < 0) continue;

        // Ranking statistic: mean market cap over the epoch's days,
        // missing cap cells excluded from the average.
        double sum = 0.0;
        Index present = 0;
        for (Day d = epoch.start_date; d <= epoch.end_date; ++d) {
            const Index col = panel.date_index(d);
            if (col < 0) continue;
            const double cap = panel.market_cap(coin_row, col);
            if (is_missing(cap)) continue;
            sum += cap;
            ++present;
        }
        Candidate c;
        c.stat = present > 0 ? sum / static_cast<double>(present) : 0.0;
        c.coin_id = series.coin_id;
        c.series_idx = static_cast<Index>(s);
        candidates.push_back(std::move(c));
    }

    if (static_cast<int>(candidates.size()) < K) {
        throw std::runtime_error("select_top_k: epoch " + std::to_string(epoch.index) + " (" +
                                 format_iso_date(epoch.start_date) + ".." +
                                 format_iso_date(epoch.end_date) + ") has only " +
                                 std::to_string(candidates.size()) + " eligible coins, need " +
                                 std::to_string(K));
    }

    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.stat != b.stat) return a.stat > b.stat;
        return a.coin_id < b.coin_id;
    });

    Portfolio p;
    p.epoch = epoch;
    p.ranking_stat.resize(K);
    for (int i = 0; i < K; ++i) {
        p.coin_ids.push_back(candidates[static_cast<std::size_t>(i)].coin_id);
        p.ranking_stat(i) = candidates[static_cast<std::size_t>(i)].stat;
    }
    return p;
}

}  // namespace mstates
