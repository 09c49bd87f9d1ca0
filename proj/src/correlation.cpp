#include "mstates/correlation.hpp"

#include <cmath>
#include <stdexcept>

namespace mstates {

template <typename Scalar>
Mat<Scalar> pearson(const Mat<Scalar>& X, const std::vector<std::string>* names) {
    const Index K = X.rows();
    const Index T = X.cols();
    if (T < 2) throw std::invalid_argument("pearson: need at least 2 observations");

    Mat<Scalar> centered = X.colwise() - X.rowwise().mean();
    Vec<Scalar> sd = (centered.array().square().rowwise().mean()).sqrt();
    for (Index i = 0; i < K; ++i) {
        if (!(sd(i) > Scalar(0))) {
            const std::string who = names != nullptr && i < static_cast<Index>(names->size())
                                        ? (*names)[static_cast<std::size_t>(i)]
                                        : ("row " + std::to_string(i));
            throw std::runtime_error("pearson: zero variance for coin '" + who + "'");
        }
    }

    // Rank update fills one triangle, so the mirrored matrix is exactly
    // symmetric; a plain GEMM can differ by an ulp across the diagonal.
    Mat<Scalar> cov = Mat<Scalar>::Zero(K, K);
    cov.template selfadjointView<Eigen::Lower>().rankUpdate(centered, Scalar(1) / Scalar(T));
    Mat<Scalar> corr(K, K);
    for (Index j = 0; j < K; ++j) {
        corr(j, j) = Scalar(1);
        for (Index i = j + 1; i < K; ++i) {
            Scalar c = cov(i, j) / (sd(i) * sd(j));
            c = std::max(Scalar(-1), std::min(Scalar(1), c));
            corr(i, j) = c;
            corr(j, i) = c;
        }
    }
    return corr;
}

template Mat<double> pearson<double>(const Mat<double>&, const std::vector<std::string>*);
template Mat<float> pearson<float>(const Mat<float>&, const std::vector<std::string>*);

CorrelationMatrix pearson_matrix(const Portfolio& portfolio,
                                 const std::vector<ReturnSeries>& normalized) {
    const Epoch& epoch = portfolio.epoch;
    const Index K = static_cast<Index>(portfolio.coin_ids.size());
    const Index T = epoch.length;

    Matrix X(K, T);
    for (Index i = 0; i < K; ++i) {
        const std::string& coin = portfolio.coin_ids[static_cast<std::size_t>(i)];
        const ReturnSeries* series = nullptr;
        for (const auto& s : normalized) {
            if (s.coin_id == coin) {
                series = &s;
                break;
            }
        }
        if (series == nullptr) {
            throw std::invalid_argument("pearson_matrix: no normalized series for coin '" + coin + "'");
        }
        const Index start = series->find_date(epoch.start_date);
        // The window must be T contiguous dates ending on the epoch end;
        // a mid-epoch gap would otherwise read out-of-epoch values.
        if (start < 0 || start + T > static_cast<Index>(series->dates.size()) ||
            series->dates[static_cast<std::size_t>(start + T - 1)] != epoch.end_date) {
            throw std::invalid_argument("pearson_matrix: coin '" + coin +
                                        "' does not cover epoch " + std::to_string(epoch.index));
        }
        X.row(i) = series->values.segment(start, T).transpose();
    }

    CorrelationMatrix out;
    out.epoch = epoch;
    out.coin_ids = portfolio.coin_ids;
    out.values = pearson<double>(X, &portfolio.coin_ids);
    out.q_applied = 1.0;
    return out;
}

CorrelationMatrix power_map(const CorrelationMatrix& matrix, double q) {
    if (!(q > 0.0)) throw std::invalid_argument("power_map: q must be positive");
    CorrelationMatrix out;
    out.epoch = matrix.epoch;
    out.coin_ids = matrix.coin_ids;
    out.values = signed_power(matrix.values.array(), q).matrix();
    out.q_applied = matrix.q_applied * q;
    return out;
}

EpochStats epoch_stats(const Portfolio& portfolio, const std::vector<ReturnSeries>& raw_returns,
                       const CorrelationMatrix& matrix) {
    if (matrix.q_applied != 1.0) {
        throw std::invalid_argument("epoch_stats: expects the raw matrix (q_applied == 1)");
    }
    const Epoch& epoch = portfolio.epoch;

    double sum = 0.0;
    Index count = 0;
    for (const std::string& coin : portfolio.coin_ids) {
        const ReturnSeries* series = nullptr;
        for (const auto& s : raw_returns) {
            if (s.coin_id == coin) {
                series = &s;
                break;
            }
        }
        if (series == nullptr) {
            throw std::invalid_argument("epoch_stats: no raw returns for coin '" + coin + "'");
        }
        for (Day d = epoch.start_date; d <= epoch.end_date; ++d) {
            const Index pos = series->find_date(d);
            if (pos < 0) {
                throw std::invalid_argument("epoch_stats: coin '" + coin + "' lacks a return on " +
                                            format_iso_date(d));
            }
            sum += series->values(pos);
            ++count;
        }
    }

    const Index K = matrix.values.rows();
    double corr_sum = 0.0;
    for (Index j = 0; j < K; ++j) {
        for (Index i = 0; i < j; ++i) corr_sum += matrix.values(i, j);
    }
    const double pairs = static_cast<double>(K) * static_cast<double>(K - 1) / 2.0;

    EpochStats stats;
    stats.epoch_index = epoch.index;
    stats.mean_return = count > 0 ? sum / static_cast<double>(count) : 0.0;
    stats.mean_correlation = pairs > 0 ? corr_sum / pairs : 0.0;
    return stats;
}

}  // namespace mstates
