#include "mstates/ingest.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

#include "mstates/csv.hpp"
#include "mstates/io_util.hpp"

namespace mstates {

namespace {

struct RawRecord {
    Day date;
    std::string coin_id;
    double close;
    double market_cap;
    std::size_t line_no;
};

[[noreturn]] void fail_line(std::size_t line_no, const std::string& what) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

PricePanel parse_panel_csv_text(const std::string& text) {
    const auto rows = parse_csv_text(text);
    if (rows.empty()) throw std::runtime_error("empty market-data file, header required");

    const std::vector<std::string> expected = {"date", "coin_id", "close", "market_cap"};
    if (rows.front() != expected) {
        throw std::runtime_error("line 1: header must be 'date,coin_id,close,market_cap'");
    }

    std::vector<RawRecord> records;
    records.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const std::size_t line_no = r + 1;
        if (row.size() == 1 && row[0].empty()) continue;  // trailing blank line
        if (row.size() != 4) fail_line(line_no, "expected 4 fields, got " + std::to_string(row.size()));

        RawRecord rec;
        rec.line_no = line_no;
        try {
            rec.date = parse_iso_date(row[0]);
        } catch (const std::exception& e) {
            fail_line(line_no, e.what());
        }
        rec.coin_id = row[1];
        if (rec.coin_id.empty()) fail_line(line_no, "empty coin_id");
        try {
            rec.close = parse_double(row[2]);
            rec.market_cap = parse_double(row[3]);
        } catch (const std::exception& e) {
            fail_line(line_no, e.what());
        }
        if (!(rec.close > 0.0)) fail_line(line_no, "close must be strictly positive");
        if (rec.market_cap < 0.0) fail_line(line_no, "market_cap must be non-negative");
        records.push_back(std::move(rec));
    }

    PricePanel panel;
    if (records.empty()) {
        panel.close.resize(0, 0);
        panel.market_cap.resize(0, 0);
        return panel;
    }

    Day min_date = records.front().date;
    Day max_date = records.front().date;
    std::map<std::string, Index> coin_order;  // first-appearance order assigned below
    for (const auto& rec : records) {
        min_date = std::min(min_date, rec.date);
        max_date = std::max(max_date, rec.date);
        coin_order.emplace(rec.coin_id, 0);
    }
    // Coins are ordered lexicographically so panel layout is independent
    // of row order in the file.
    Index next = 0;
    for (auto& [coin, idx] : coin_order) idx = next++;

    const Index n_coins = next;
    const Index n_dates = static_cast<Index>(max_date - min_date) + 1;
    panel.coins.resize(static_cast<std::size_t>(n_coins));
    for (const auto& [coin, idx] : coin_order) panel.coins[static_cast<std::size_t>(idx)] = coin;
    panel.dates.resize(static_cast<std::size_t>(n_dates));
    for (Index j = 0; j < n_dates; ++j) panel.dates[static_cast<std::size_t>(j)] = min_date + static_cast<Day>(j);

    panel.close = Matrix::Constant(n_coins, n_dates, kMissing);
    panel.market_cap = Matrix::Constant(n_coins, n_dates, kMissing);

    for (const auto& rec : records) {
        const Index i = coin_order.at(rec.coin_id);
        const Index j = static_cast<Index>(rec.date - min_date);
        if (!is_missing(panel.close(i, j))) {
            fail_line(rec.line_no, "duplicate (coin, date): " + rec.coin_id + ", " +
                                       format_iso_date(rec.date));
        }
        panel.close(i, j) = rec.close;
        panel.market_cap(i, j) = rec.market_cap;
    }
    return panel;
}

PricePanel parse_csv(const std::filesystem::path& path) {
    return parse_panel_csv_text(read_text_file(path));
}

}  // namespace mstates
