#pragma once

#include <filesystem>
#include <string>

#include "mstates/panel.hpp"

namespace mstates {

// Parses the canonical market-data CSV into an aligned panel.
//
// Expected header: date,coin_id,close,market_cap (RFC-4180, ISO dates).
// The panel spans [min date, max date] of the file; cells never seen in
// the file are missing. Errors name the offending line:
//   malformed row, unparseable date, non-positive close, negative
//   market cap, duplicate (coin, date).
PricePanel parse_panel_csv_text(const std::string& text);
PricePanel parse_csv(const std::filesystem::path& path);

}  // namespace mstates
