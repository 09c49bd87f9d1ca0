#include "mstates/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace mstates {

namespace {

// Modified Lentz evaluation of the incomplete-beta continued fraction.
// Converges fast when x < (a+1)/(a+b+2); the caller flips to the
// complementary call otherwise.
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw std::runtime_error("betainc_reg: continued fraction did not converge");
}

}  // namespace

double betainc_reg(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw std::invalid_argument("betainc_reg: a and b must be positive");
    }
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::invalid_argument("betainc_reg: x must lie in [0, 1]");
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;

    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * betacf(a, b, x) / a;
    }
    return 1.0 - std::exp(std::lgamma(a + b) - std::lgamma(b) - std::lgamma(a) +
                          b * std::log1p(-x) + a * std::log(x)) *
                     betacf(b, a, 1.0 - x) / b;
}

double correlation_null_pvalue(double c, int T) {
    if (T < 4) throw std::invalid_argument("correlation_null_pvalue: need T >= 4");
    const double mag = std::fmin(std::fabs(c), 1.0);
    if (mag >= 1.0) return 0.0;
    const double nu = static_cast<double>(T - 2);
    // 1 - c^2 via the difference of squares keeps precision for mag near 1.
    const double x = (1.0 - mag) * (1.0 + mag);
    return betainc_reg(nu / 2.0, 0.5, x);
}

double critical_abs_correlation(double target, int T) {
    if (!(target > 0.0 && target < 1.0)) {
        throw std::invalid_argument("critical_abs_correlation: target must be in (0, 1)");
    }
    if (T < 4) throw std::invalid_argument("critical_abs_correlation: need T >= 4");

    // p(c) decreases strictly from 1 at c=0 to 0 at c=1.
    double lo = 0.0, hi = 1.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (correlation_null_pvalue(mid, T) > target) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-16) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace mstates
