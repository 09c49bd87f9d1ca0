#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace oracle {

namespace {

double null_density(double r, int T) {
    return std::pow(1.0 - r * r, 0.5 * static_cast<double>(T - 4));
}

double simpson(double f_a, double f_m, double f_b, double a, double b) {
    return (b - a) / 6.0 * (f_a + 4.0 * f_m + f_b);
}

double adaptive_simpson(double a, double b, double f_a, double f_m, double f_b, double whole,
                        double tol, int depth, int T) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double f_lm = null_density(lm, T);
    const double f_rm = null_density(rm, T);
    const double left = simpson(f_a, f_lm, f_m, a, m);
    const double right = simpson(f_m, f_rm, f_b, m, b);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson(a, m, f_a, f_lm, f_m, left, 0.5 * tol, depth - 1, T) +
           adaptive_simpson(m, b, f_m, f_rm, f_b, right, 0.5 * tol, depth - 1, T);
}

double integrate_density(double a, double b, int T) {
    if (b <= a) return 0.0;
    const double f_a = null_density(a, T);
    const double f_b = null_density(b, T);
    const double f_m = null_density(0.5 * (a + b), T);
    const double whole = simpson(f_a, f_m, f_b, a, b);
    return adaptive_simpson(a, b, f_a, f_m, f_b, whole, 1e-15, 60, T);
}

}  // namespace

double null_pvalue(double c, int T) {
    if (T < 4) throw std::invalid_argument("null_pvalue: T must be >= 4");
    if (c <= 0.0) return 1.0;
    if (c >= 1.0) return 0.0;
    return integrate_density(c, 1.0, T) / integrate_density(0.0, 1.0, T);
}

double critical_value(double target, int T) {
    if (!(target > 0.0 && target < 1.0)) {
        throw std::invalid_argument("critical_value: target must lie in (0, 1)");
    }
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (null_pvalue(mid, T) > target) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-16) break;
    }
    return 0.5 * (lo + hi);
}

mstates::Matrix pearson_rows(const mstates::Matrix& X) {
    const mstates::Index K = X.rows();
    const mstates::Index T = X.cols();
    std::vector<double> mean(static_cast<std::size_t>(K), 0.0);
    std::vector<double> sd(static_cast<std::size_t>(K), 0.0);
    for (mstates::Index i = 0; i < K; ++i) {
        double s = 0.0;
        for (mstates::Index t = 0; t < T; ++t) s += X(i, t);
        mean[static_cast<std::size_t>(i)] = s / static_cast<double>(T);
        double v = 0.0;
        for (mstates::Index t = 0; t < T; ++t) {
            const double d = X(i, t) - mean[static_cast<std::size_t>(i)];
            v += d * d;
        }
        sd[static_cast<std::size_t>(i)] = std::sqrt(v / static_cast<double>(T));
    }
    mstates::Matrix C(K, K);
    for (mstates::Index i = 0; i < K; ++i) {
        for (mstates::Index j = 0; j < K; ++j) {
            if (i == j) {
                C(i, j) = 1.0;
                continue;
            }
            double cov = 0.0;
            for (mstates::Index t = 0; t < T; ++t) {
                cov += (X(i, t) - mean[static_cast<std::size_t>(i)]) *
                       (X(j, t) - mean[static_cast<std::size_t>(j)]);
            }
            cov /= static_cast<double>(T);
            C(i, j) = cov / (sd[static_cast<std::size_t>(i)] * sd[static_cast<std::size_t>(j)]);
        }
    }
    return C;
}

namespace {

std::vector<std::string> refine_strings(const mstates::LabeledGraph& g,
                                        const std::vector<std::string>& labels) {
    std::vector<std::string> next(labels.size());
    for (std::size_t v = 0; v < labels.size(); ++v) {
        std::vector<std::string> neighborhood;
        for (int u : g.adjacency[v]) neighborhood.push_back(labels[static_cast<std::size_t>(u)]);
        std::sort(neighborhood.begin(), neighborhood.end());
        std::string s = labels[v];
        s += '(';
        for (std::size_t i = 0; i < neighborhood.size(); ++i) {
            if (i > 0) s += ',';
            s += neighborhood[i];
        }
        s += ')';
        next[v] = std::move(s);
    }
    return next;
}

std::map<std::string, long long> histogram(const std::vector<std::string>& labels) {
    std::map<std::string, long long> h;
    for (const std::string& s : labels) ++h[s];
    return h;
}

}  // namespace

double wl_kernel_strings(const mstates::LabeledGraph& a, const mstates::LabeledGraph& b, int h) {
    std::vector<std::string> la = a.labels;
    std::vector<std::string> lb = b.labels;
    long long total = 0;
    for (int iter = 0; iter <= h; ++iter) {
        if (iter > 0) {
            la = refine_strings(a, la);
            lb = refine_strings(b, lb);
        }
        const auto ha = histogram(la);
        const auto hb = histogram(lb);
        for (const auto& [label, count] : ha) {
            const auto it = hb.find(label);
            if (it != hb.end()) total += count * it->second;
        }
    }
    return static_cast<double>(total);
}

mstates::LabeledGraph permute_graph(const mstates::LabeledGraph& g, const std::vector<int>& perm) {
    const std::size_t n = g.labels.size();
    if (perm.size() != n) throw std::invalid_argument("permute_graph: size mismatch");
    mstates::LabeledGraph out;
    out.labels.resize(n);
    out.adjacency.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ni = static_cast<std::size_t>(perm[i]);
        out.labels[ni] = g.labels[i];
        for (int u : g.adjacency[i]) {
            out.adjacency[ni].push_back(perm[static_cast<std::size_t>(u)]);
        }
    }
    for (auto& neighbors : out.adjacency) std::sort(neighbors.begin(), neighbors.end());
    return out;
}

}  // namespace oracle
