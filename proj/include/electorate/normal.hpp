#pragma once
// Standard normal CDF and quantile function.
//
// norm_cdf uses rational Chebyshev approximations of erf/erfc (Cody's
// coefficients), absolute error below 1e-15 over the real line. The z-test
// p-values and the probit simulator both inherit this accuracy.
// norm_cdf_inv is Acklam's rational approximation polished with one Halley
// step against norm_cdf, good to ~1e-15 relative on (0,1).

namespace electorate {

// P(Z <= x) for Z ~ Normal(0,1). Monotone nondecreasing as implemented.
double norm_cdf(double x) noexcept;

// Inverse of norm_cdf on (0,1). Returns -inf/+inf at p = 0/1.
double norm_cdf_inv(double p) noexcept;

}  // namespace electorate
