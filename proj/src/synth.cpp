#include "mstates/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "mstates/rng.hpp"

namespace mstates {

Matrix regime_correlation(const RegimeSpec& regime, int K) {
    if (static_cast<int>(regime.block_of.size()) != K) {
        throw std::invalid_argument("regime_correlation: partition must cover all K coins");
    }
    if (!(regime.rho_in >= 0.0 && regime.rho_in < 1.0)) {
        throw std::invalid_argument("regime_correlation: rho_in must lie in [0, 1)");
    }
    if (!(regime.rho_out >= 0.0 && regime.rho_out <= regime.rho_in)) {
        throw std::invalid_argument("regime_correlation: need 0 <= rho_out <= rho_in");
    }

    Matrix sigma(K, K);
    for (int j = 0; j < K; ++j) {
        for (int i = 0; i < K; ++i) {
            if (i == j) {
                sigma(i, j) = 1.0;
            } else {
                sigma(i, j) = regime.block_of[static_cast<std::size_t>(i)] ==
                                      regime.block_of[static_cast<std::size_t>(j)]
                                  ? regime.rho_in
                                  : regime.rho_out;
            }
        }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sigma, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -1e-10) {
        throw std::runtime_error("regime_correlation: implied matrix is not PSD");
    }
    return sigma;
}

std::vector<RegimeSpec> default_regimes(int K, int n_regimes, double rho_in, double rho_out) {
    if (n_regimes < 1 || n_regimes > 4) {
        throw std::invalid_argument("default_regimes: between 1 and 4 regimes are built in");
    }
    std::vector<RegimeSpec> regimes;
    for (int r = 0; r < n_regimes; ++r) {
        RegimeSpec spec;
        spec.id = r;
        spec.rho_in = rho_in;
        spec.rho_out = rho_out;
        spec.block_of.resize(static_cast<std::size_t>(K));
        for (int i = 0; i < K; ++i) {
            int block = 0;
            switch (r) {
                case 0: block = i * 4 / K; break;          // contiguous quarters
                case 1: block = i % 4; break;              // residue classes
                case 2: block = i * 2 / K; break;          // halves
                case 3: block = i * 8 / K; break;          // contiguous eighths
            }
            spec.block_of[static_cast<std::size_t>(i)] = block;
        }
        regimes.push_back(std::move(spec));
    }
    return regimes;
}

std::vector<int> cyclic_schedule(int n_regimes, int epochs) {
    if (n_regimes < 1) throw std::invalid_argument("cyclic_schedule: need at least one regime");
    std::vector<int> schedule(static_cast<std::size_t>(epochs));
    for (int e = 0; e < epochs; ++e) schedule[static_cast<std::size_t>(e)] = e % n_regimes;
    return schedule;
}

std::vector<int> planted_labels(const SynthConfig& config) {
    if (static_cast<int>(config.schedule.size()) != config.epochs) {
        throw std::invalid_argument("planted_labels: schedule must cover every epoch");
    }
    for (int r : config.schedule) {
        if (r < 0 || r >= static_cast<int>(config.regimes.size())) {
            throw std::invalid_argument("planted_labels: schedule references undefined regime " +
                                        std::to_string(r));
        }
    }
    return config.schedule;
}

PricePanel generate_panel(const SynthConfig& config) {
    if (config.K < 1) throw std::invalid_argument("generate_panel: K must be >= 1");
    if (config.T < 2) throw std::invalid_argument("generate_panel: T must be >= 2");
    if (config.epochs < 1) throw std::invalid_argument("generate_panel: need at least one epoch");
    if (config.burn_in < 0) throw std::invalid_argument("generate_panel: burn_in must be >= 0");
    if (config.regimes.empty()) throw std::invalid_argument("generate_panel: no regimes");
    const std::vector<int> schedule = planted_labels(config);

    const int K = config.K;
    // Symmetric square roots of every regime matrix, built once.
    std::vector<Matrix> roots;
    roots.reserve(config.regimes.size());
    for (const RegimeSpec& regime : config.regimes) {
        const Matrix sigma = regime_correlation(regime, K);
        Eigen::SelfAdjointEigenSolver<Matrix> solver(sigma);
        const Vector clamped = solver.eigenvalues().cwiseMax(0.0);
        roots.push_back(solver.eigenvectors() * clamped.cwiseSqrt().asDiagonal() *
                        solver.eigenvectors().transpose());
    }

    const int return_days = config.burn_in + config.epochs * config.T;
    const int price_days = return_days + 1;

    PricePanel panel;
    panel.coins.reserve(static_cast<std::size_t>(K));
    int width = 1;
    for (int k = K - 1; k >= 10; k /= 10) ++width;
    for (int i = 0; i < K; ++i) {
        std::string name = std::to_string(i);
        while (static_cast<int>(name.size()) < width) name.insert(name.begin(), '0');
        panel.coins.push_back("syn" + name);
    }
    panel.dates.resize(static_cast<std::size_t>(price_days));
    for (int d = 0; d < price_days; ++d) {
        panel.dates[static_cast<std::size_t>(d)] = config.start_date + d;
    }

    panel.close.resize(K, price_days);
    panel.market_cap.resize(K, price_days);
    for (int i = 0; i < K; ++i) {
        panel.close(i, 0) = 100.0;
        // Strictly descending caps: rank order equals coin order, so the
        // top-K portfolio is the full universe in every epoch.
        const double cap = 1e9 * static_cast<double>(K - i);
        for (int d = 0; d < price_days; ++d) panel.market_cap(i, d) = cap;
    }

    // Sequential draws, one stream, fixed (day, coin) order: the bytes
    // of the panel are a pure function of the config.
    std::mt19937_64 rng = make_rng(config.seed, "synth/returns");
    NormalSampler normal;
    Vector z(K);
    const double t_scale =
        config.student_t ? std::sqrt((config.t_dof - 2.0) / config.t_dof) : 1.0;
    if (config.student_t && !(config.t_dof > 2.0)) {
        throw std::invalid_argument("generate_panel: student_t needs t_dof > 2 for finite variance");
    }

    for (int day = 0; day < return_days; ++day) {
        const int epoch = day < config.burn_in
                              ? 0
                              : (day - config.burn_in) / config.T;
        const int regime_idx = day < config.burn_in
                                   ? schedule.front()
                                   : schedule[static_cast<std::size_t>(epoch)];
        const Matrix& root = roots[static_cast<std::size_t>(regime_idx)];

        for (int i = 0; i < K; ++i) {
            double draw = normal(rng);
            if (config.student_t) {
                // Chi-square mixing for a t draw, rescaled to unit variance.
                double chi2 = 0.0;
                for (int d = 0; d < static_cast<int>(config.t_dof); ++d) {
                    const double g = normal(rng);
                    chi2 += g * g;
                }
                draw = draw / std::sqrt(chi2 / config.t_dof) * t_scale;
            }
            z(i) = draw;
        }
        const Vector r = config.vol * (root * z);
        for (int i = 0; i < K; ++i) {
            panel.close(i, day + 1) = panel.close(i, day) * std::exp(r(i));
        }
    }
    return panel;
}

}  // namespace mstates
