#pragma once

namespace mstates {

// Regularized incomplete beta function I_x(a, b) for a, b > 0, x in [0,1].
// Continued-fraction evaluation, accurate to ~1e-14 relative error over
// the ranges used here (far tails included).
double betainc_reg(double a, double b, double x);

// Exact two-sided p-value of a Pearson coefficient under the white-noise
// null: for T iid Gaussian samples, r^2 ~ Beta(1/2, (T-2)/2), so
// P(|r| >= c) = I_{1-c^2}((T-2)/2, 1/2). Requires T >= 4 so the null has
// nondegenerate tails; c is clamped to [0, 1].
double correlation_null_pvalue(double c, int T);

// Smallest magnitude whose null p-value falls to `target`: the edge
// threshold. Monotone bisection, deterministic to double precision.
double critical_abs_correlation(double target, int T);

}  // namespace mstates
