#pragma once

#include <string>
#include <vector>

#include "mstates/timeseries.hpp"

namespace mstates {

// Per-epoch Pearson matrix with coin identities attached. q_applied
// tracks the power-map exponent (1 means raw coefficients).
struct CorrelationMatrix {
    Epoch epoch;
    std::vector<std::string> coin_ids;
    Matrix values;
    double q_applied = 1.0;
};

struct EpochStats {
    int epoch_index = 0;
    double mean_return = 0.0;
    double mean_correlation = 0.0;
};

// Population-moment Pearson coefficients between the rows of X (series
// in rows, observations in columns). The result is exactly symmetric,
// has exact unit diagonal, and is clamped to [-1, 1]. Throws when a row
// has zero variance; `names` supplies the coin id for the message.
template <typename Scalar>
Mat<Scalar> pearson(const Mat<Scalar>& X, const std::vector<std::string>* names = nullptr);

// Element-wise signed power sign(M) .* |M|.^q as an Eigen expression.
template <typename Derived>
auto signed_power(const Eigen::ArrayBase<Derived>& M, typename Derived::Scalar q) {
    return M.sign() * M.abs().pow(q);
}

// Pearson matrix of a portfolio's normalized returns over its epoch.
// All K series must cover every epoch date (select_top_k guarantees it).
CorrelationMatrix pearson_matrix(const Portfolio& portfolio,
                                 const std::vector<ReturnSeries>& normalized);

// Signed element-wise power distortion. Requires q > 0; the diagonal
// stays exactly 1 and symmetry is preserved. q_applied multiplies, so
// applying a then b equals applying a*b in one step.
CorrelationMatrix power_map(const CorrelationMatrix& matrix, double q = 1.5);

// Mean raw log-return over all K coins and T days, and mean of the
// K(K-1)/2 upper-triangle raw coefficients. The matrix must be raw
// (q_applied == 1).
EpochStats epoch_stats(const Portfolio& portfolio, const std::vector<ReturnSeries>& raw_returns,
                       const CorrelationMatrix& matrix);

}  // namespace mstates
