#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

#include "mstates/calendar.hpp"
#include "mstates/ingest.hpp"
#include "mstates/synth.hpp"

using namespace mstates;

namespace {

SynthConfig small_config() {
    SynthConfig config;
    config.K = 6;
    config.T = 5;
    config.epochs = 3;
    config.burn_in = 2;
    config.seed = 7;
    config.start_date = parse_iso_date("2020-01-01");
    config.regimes = default_regimes(config.K, 2, 0.6, 0.1);
    config.schedule = cyclic_schedule(2, config.epochs);
    return config;
}

}  // namespace

TEST_CASE("regime correlation encodes the partition") {
    RegimeSpec regime;
    regime.block_of = {0, 0, 1, 1};
    regime.rho_in = 0.7;
    regime.rho_out = 0.1;
    const Matrix sigma = regime_correlation(regime, 4);
    CHECK(sigma(0, 0) == 1.0);
    CHECK(sigma(0, 1) == 0.7);
    CHECK(sigma(2, 3) == 0.7);
    CHECK(sigma(0, 2) == 0.1);
    CHECK(sigma(1, 3) == 0.1);
    CHECK((sigma - sigma.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sigma, Eigen::EigenvaluesOnly);
    CHECK(solver.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("regime correlation rejects invalid regimes") {
    RegimeSpec regime;
    regime.block_of = {0, 0, 1};
    regime.rho_in = 0.5;
    regime.rho_out = 0.1;
    CHECK_THROWS_AS(regime_correlation(regime, 4), std::invalid_argument);
    regime.block_of = {0, 0, 1, 1};
    regime.rho_in = 1.0;
    CHECK_THROWS_AS(regime_correlation(regime, 4), std::invalid_argument);
    regime.rho_in = 0.3;
    regime.rho_out = 0.5;
    CHECK_THROWS_AS(regime_correlation(regime, 4), std::invalid_argument);
    regime.rho_out = -0.1;
    CHECK_THROWS_AS(regime_correlation(regime, 4), std::invalid_argument);
}

TEST_CASE("default regimes are distinct partitions of the right sizes") {
    const std::vector<RegimeSpec> regimes = default_regimes(40, 4, 0.7, 0.1);
    REQUIRE(regimes.size() == 4);
    std::set<std::vector<int>> partitions;
    for (const RegimeSpec& r : regimes) {
        CHECK(r.block_of.size() == 40);
        CHECK(r.rho_in == 0.7);
        CHECK(r.rho_out == 0.1);
        partitions.insert(r.block_of);
        // Every regime matrix is a valid correlation matrix.
        const Matrix sigma = regime_correlation(r, 40);
        Eigen::SelfAdjointEigenSolver<Matrix> solver(sigma, Eigen::EigenvaluesOnly);
        CHECK(solver.eigenvalues().minCoeff() >= -1e-10);
    }
    CHECK(partitions.size() == 4);

    auto n_blocks = [](const RegimeSpec& r) {
        return std::set<int>(r.block_of.begin(), r.block_of.end()).size();
    };
    CHECK(n_blocks(regimes[0]) == 4);
    CHECK(n_blocks(regimes[1]) == 4);
    CHECK(n_blocks(regimes[2]) == 2);
    CHECK(n_blocks(regimes[3]) == 8);
    CHECK(regimes[0].id == 0);
    CHECK(regimes[3].id == 3);

    CHECK_THROWS_AS(default_regimes(40, 0, 0.7, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(default_regimes(40, 5, 0.7, 0.1), std::invalid_argument);
}

TEST_CASE("cyclic schedule repeats regimes in order") {
    CHECK(cyclic_schedule(4, 10) == std::vector<int>{0, 1, 2, 3, 0, 1, 2, 3, 0, 1});
    CHECK(cyclic_schedule(1, 3) == std::vector<int>{0, 0, 0});
    CHECK_THROWS_AS(cyclic_schedule(0, 3), std::invalid_argument);
}

TEST_CASE("planted labels validate the schedule") {
    SynthConfig config = small_config();
    CHECK(planted_labels(config) == config.schedule);
    config.schedule.pop_back();
    CHECK_THROWS_AS(planted_labels(config), std::invalid_argument);
    config = small_config();
    config.schedule[1] = 2;  // only regimes 0 and 1 exist
    CHECK_THROWS_AS(planted_labels(config), std::invalid_argument);
}

TEST_CASE("generated panels have the documented shape") {
    const SynthConfig config = small_config();
    const PricePanel panel = generate_panel(config);

    const Index price_days = config.burn_in + config.epochs * config.T + 1;
    REQUIRE(panel.n_coins() == 6);
    REQUIRE(panel.n_dates() == price_days);
    CHECK(panel.coins == std::vector<std::string>{"syn0", "syn1", "syn2", "syn3", "syn4", "syn5"});
    for (Index d = 0; d < price_days; ++d) {
        CHECK(panel.dates[static_cast<std::size_t>(d)] == config.start_date + d);
    }
    for (Index i = 0; i < 6; ++i) {
        CHECK(panel.close(i, 0) == 100.0);
        for (Index d = 0; d < price_days; ++d) {
            CHECK(std::isfinite(panel.close(i, d)));
            CHECK(panel.close(i, d) > 0.0);
            CHECK(panel.market_cap(i, d) == panel.market_cap(i, 0));
        }
        if (i > 0) CHECK(panel.market_cap(i, 0) < panel.market_cap(i - 1, 0));
    }
}

TEST_CASE("coin names pad to a sortable width") {
    SynthConfig config = small_config();
    config.K = 12;
    config.regimes = default_regimes(config.K, 2, 0.6, 0.1);
    const PricePanel panel = generate_panel(config);
    CHECK(panel.coins.front() == "syn00");
    CHECK(panel.coins.back() == "syn11");
    CHECK(std::is_sorted(panel.coins.begin(), panel.coins.end()));
}

TEST_CASE("panel generation is bit-reproducible") {
    const SynthConfig config = small_config();
    const PricePanel a = generate_panel(config);
    const PricePanel b = generate_panel(config);
    CHECK((a.close - b.close).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.market_cap - b.market_cap).cwiseAbs().maxCoeff() == 0.0);

    SynthConfig other = config;
    other.seed = 8;
    const PricePanel c = generate_panel(other);
    CHECK((a.close - c.close).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("generated panels round-trip through the ingest format") {
    const PricePanel a = generate_panel(small_config());
    const PricePanel b = parse_panel_csv_text(panel_to_csv(a));
    REQUIRE(b.coins == a.coins);
    REQUIRE(b.dates == a.dates);
    CHECK((a.close - b.close).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.market_cap - b.market_cap).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("student-t variant keeps shape and needs heavy-tail dof") {
    SynthConfig config = small_config();
    config.student_t = true;
    config.t_dof = 5.0;
    const PricePanel panel = generate_panel(config);
    CHECK(panel.n_coins() == 6);
    CHECK(panel.close.allFinite());

    config.t_dof = 2.0;
    CHECK_THROWS_AS(generate_panel(config), std::invalid_argument);
}

TEST_CASE("generate_panel validates the config") {
    SynthConfig config = small_config();
    config.K = 0;
    CHECK_THROWS_AS(generate_panel(config), std::invalid_argument);
    config = small_config();
    config.T = 1;
    CHECK_THROWS_AS(generate_panel(config), std::invalid_argument);
    config = small_config();
    config.regimes.clear();
    CHECK_THROWS_AS(generate_panel(config), std::invalid_argument);
    config = small_config();
    config.schedule.clear();
    CHECK_THROWS_AS(generate_panel(config), std::invalid_argument);
    config = small_config();
    config.burn_in = -1;
    CHECK_THROWS_AS(generate_panel(config), std::invalid_argument);
}
