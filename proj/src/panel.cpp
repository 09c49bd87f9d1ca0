#include "mstates/panel.hpp"

#include <algorithm>
#include <stdexcept>

#include "mstates/csv.hpp"
#include "mstates/io_util.hpp"

namespace mstates {

Index PricePanel::coin_index(const std::string& coin_id) const {
    const auto it = std::find(coins.begin(), coins.end(), coin_id);
    if (it == coins.end()) return -1;
    return static_cast<Index>(it - coins.begin());
}

Index PricePanel::date_index(Day d) const {
    if (dates.empty() || d < dates.front() || d > dates.back()) return -1;
    return static_cast<Index>(d - dates.front());
}

ValidationReport validate_panel(const PricePanel& panel) {
    ValidationReport report;
    if (panel.n_coins() == 0 || panel.n_dates() == 0) return report;

    report.empty = false;
    report.first_date = panel.dates.front();
    report.last_date = panel.dates.back();
    for (Index i = 0; i < panel.n_coins(); ++i) {
        CoinCoverage cc;
        cc.coin_id = panel.coins[static_cast<std::size_t>(i)];
        Index present = 0;
        for (Index j = 0; j < panel.n_dates(); ++j) {
            if (!is_missing(panel.close(i, j))) ++present;
        }
        cc.missing_cells = panel.n_dates() - present;
        cc.coverage = static_cast<double>(present) / static_cast<double>(panel.n_dates());
        report.total_missing += cc.missing_cells;
        report.coins.push_back(std::move(cc));
    }
    return report;
}

std::string panel_to_csv(const PricePanel& panel) {
    std::string out = "date,coin_id,close,market_cap\n";
    for (Index j = 0; j < panel.n_dates(); ++j) {
        const std::string date = format_iso_date(panel.dates[static_cast<std::size_t>(j)]);
        for (Index i = 0; i < panel.n_coins(); ++i) {
            if (is_missing(panel.close(i, j))) continue;
            out += join_csv_row({date, panel.coins[static_cast<std::size_t>(i)],
                                 format_double(panel.close(i, j)),
                                 format_double(panel.market_cap(i, j))});
            out += '\n';
        }
    }
    return out;
}

PricePanel slice_panel(const PricePanel& panel, Day first, Day last) {
    if (first > last) throw std::invalid_argument("slice_panel: first > last");
    PricePanel out;
    out.coins = panel.coins;

    const Day lo = std::max(first, panel.dates.empty() ? first : panel.dates.front());
    const Day hi = std::min(last, panel.dates.empty() ? last : panel.dates.back());
    if (panel.dates.empty() || lo > hi) {
        out.close.resize(panel.n_coins(), 0);
        out.market_cap.resize(panel.n_coins(), 0);
        return out;
    }

    const Index j0 = panel.date_index(lo);
    const Index cols = static_cast<Index>(hi - lo) + 1;
    out.dates.resize(static_cast<std::size_t>(cols));
    for (Index j = 0; j < cols; ++j) out.dates[static_cast<std::size_t>(j)] = lo + static_cast<Day>(j);
    out.close = panel.close.middleCols(j0, cols);
    out.market_cap = panel.market_cap.middleCols(j0, cols);
    return out;
}

}  // namespace mstates
