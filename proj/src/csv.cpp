#include "mstates/csv.hpp"

#include <stdexcept>

namespace mstates {

namespace {

// One pass over the text with an explicit in-quotes flag. Carriage
// returns before a line feed are treated as part of the row terminator.
std::vector<std::vector<std::string>> parse_rows(const std::string& text, bool single_line) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    bool quote_closed = false;

    auto end_field = [&] {
        row.push_back(field);
        field.clear();
        field_started = false;
        quote_closed = false;
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                    quote_closed = true;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (quote_closed || (field_started && !field.empty())) {
                    throw std::runtime_error("CSV: quote inside unquoted field");
                }
                in_quotes = true;
                field_started = true;
                break;
            case ',':
                end_field();
                break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') break;
                end_row();
                break;
            case '\n':
                end_row();
                break;
            default:
                if (quote_closed) {
                    throw std::runtime_error("CSV: text after a closing quote");
                }
                field.push_back(c);
                field_started = true;
                break;
        }
    }
    if (in_quotes) throw std::runtime_error("CSV: unterminated quoted field");
    if (field_started || !row.empty()) end_row();

    if (single_line && rows.size() > 1) {
        throw std::runtime_error("CSV: embedded newline in single-line context");
    }
    return rows;
}

}  // namespace

std::vector<std::string> parse_csv_line(const std::string& line) {
    auto rows = parse_rows(line, true);
    if (rows.empty()) return {""};
    return rows.front();
}

std::vector<std::vector<std::string>> parse_csv_text(const std::string& text) {
    return parse_rows(text, false);
}

std::string csv_escape(const std::string& field) {
    const bool needs_quotes =
        field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

std::string join_csv_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += csv_escape(fields[i]);
    }
    return out;
}

}  // namespace mstates
