#pragma once

#include <string>
#include <vector>

namespace mstates {

// RFC-4180 row parsing: quoted fields may contain commas, doubled quotes,
// and newlines. parse_csv_text handles the multi-line case; callers that
// know their rows are single-line can use parse_csv_line.
std::vector<std::string> parse_csv_line(const std::string& line);
std::vector<std::vector<std::string>> parse_csv_text(const std::string& text);

// Quotes a field only when it needs quoting, so round-trips are stable.
std::string csv_escape(const std::string& field);
std::string join_csv_row(const std::vector<std::string>& fields);

}  // namespace mstates
