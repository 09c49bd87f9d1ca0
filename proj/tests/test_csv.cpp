#include <doctest.h>

#include <stdexcept>
#include <string>
#include <vector>

#include "mstates/csv.hpp"
#include "mstates/io_util.hpp"

using namespace mstates;

TEST_CASE("plain rows split on commas") {
    CHECK(parse_csv_line("a,b,c") == std::vector<std::string>{"a", "b", "c"});
    CHECK(parse_csv_line("") == std::vector<std::string>{""});
    CHECK(parse_csv_line("a,,c") == std::vector<std::string>{"a", "", "c"});
    CHECK(parse_csv_line(",") == std::vector<std::string>{"", ""});
}

TEST_CASE("quoted fields carry commas, quotes, and newlines") {
    CHECK(parse_csv_line("\"a,b\",c") == std::vector<std::string>{"a,b", "c"});
    CHECK(parse_csv_line("\"he said \"\"hi\"\"\"") == std::vector<std::string>{"he said \"hi\""});
    const auto rows = parse_csv_text("a,\"line\nbreak\"\r\nnext,row\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"a", "line\nbreak"});
    CHECK(rows[1] == std::vector<std::string>{"next", "row"});
}

TEST_CASE("malformed quoting is rejected") {
    CHECK_THROWS_AS(parse_csv_line("a\"b"), std::runtime_error);
    CHECK_THROWS_AS(parse_csv_line("\"unterminated"), std::runtime_error);
    CHECK_THROWS_AS(parse_csv_line("\"a\"b"), std::runtime_error);
}

TEST_CASE("escape quotes only when needed and round-trip") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("with,comma") == "\"with,comma\"");
    CHECK(csv_escape("with\"quote") == "\"with\"\"quote\"");
    CHECK(csv_escape("with\nnewline") == "\"with\nnewline\"");

    const std::vector<std::string> fields = {"a", "b,c", "d\"e", "f\ng", ""};
    CHECK(parse_csv_line(join_csv_row(fields)) == fields);
}

TEST_CASE("doubles survive a format/parse round trip bit-exactly") {
    const double samples[] = {0.0,
                              -0.0,
                              1.0,
                              -1.0,
                              0.1,
                              -0.353553390593273762,
                              0.81361708284964512,
                              1e-300,
                              -1e300,
                              3.141592653589793,
                              0.09531017980432486};
    for (double x : samples) {
        const double back = parse_double(format_double(x));
        CHECK(back == x);
    }
}

TEST_CASE("parse_double rejects trailing garbage") {
    CHECK_THROWS_AS(parse_double("1.5x"), std::runtime_error);
    CHECK_THROWS_AS(parse_double(""), std::runtime_error);
    CHECK_THROWS_AS(parse_double("abc"), std::runtime_error);
    CHECK(parse_double("-2.5e-3") == -0.0025);
}
