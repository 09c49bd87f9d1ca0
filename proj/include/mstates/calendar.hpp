#pragma once

#include <cstdint>
#include <string>

namespace mstates {

// Calendar days are stored as a count of days since 1970-01-01 (UTC).
// All panel date axes are contiguous runs of Day values.
using Day = std::int32_t;

// Proleptic Gregorian civil date <-> day count. Valid over the whole
// int32 day range, which covers every date a market feed can produce.
Day days_from_civil(int year, unsigned month, unsigned day);
void civil_from_days(Day z, int& year, unsigned& month, unsigned& day);

// Strict ISO-8601 calendar date, exactly "YYYY-MM-DD".
// Throws std::runtime_error on any malformed or impossible date.
Day parse_iso_date(const std::string& text);
std::string format_iso_date(Day d);

// Number of days in [first, last] inclusive; requires first <= last.
std::int64_t span_days(Day first, Day last);

}  // namespace mstates
