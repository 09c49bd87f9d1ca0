#pragma once

#include <string>
#include <vector>

#include "mstates/calendar.hpp"
#include "mstates/core.hpp"

namespace mstates {

// Aligned per-coin daily close and market-cap series. The date axis is
// contiguous: calendar gaps appear as missing cells, never dropped days.
// Rows follow `coins` order, columns follow `dates` order.
struct PricePanel {
    std::vector<std::string> coins;
    std::vector<Day> dates;
    Matrix close;       // coins x dates, NaN marks a missing cell
    Matrix market_cap;  // coins x dates, NaN marks a missing cell

    Index n_coins() const { return static_cast<Index>(coins.size()); }
    Index n_dates() const { return static_cast<Index>(dates.size()); }

    // Index of a coin id, or -1 when absent.
    Index coin_index(const std::string& coin_id) const;
    // Index of a date on the contiguous axis, or -1 when out of range.
    Index date_index(Day d) const;
};

struct CoinCoverage {
    std::string coin_id;
    double coverage = 0.0;  // fraction of dates with a present close
    Index missing_cells = 0;
};

struct ValidationReport {
    std::vector<CoinCoverage> coins;
    Index total_missing = 0;
    Day first_date = 0;
    Day last_date = 0;
    bool empty = true;
};

// Report-only pass over the panel; never mutates it.
ValidationReport validate_panel(const PricePanel& panel);

// Serializes to the canonical `date,coin_id,close,market_cap` CSV, one
// row per present cell, dates ascending then coins in panel order.
// parse_csv of the result reproduces the panel bit-exactly.
std::string panel_to_csv(const PricePanel& panel);

// Restricts the panel to [first, last] inclusive on the date axis.
PricePanel slice_panel(const PricePanel& panel, Day first, Day last);

}  // namespace mstates
