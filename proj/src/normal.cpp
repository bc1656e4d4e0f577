#include "electorate/normal.hpp"

#include <cmath>
#include <limits>

namespace electorate {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrtPi = 0.56418958354775628695;

// erf(x) for |x| <= 0.46875.
double erf_small(double x) {
    static const double a[5] = {3.16112374387056560e00, 1.13864154151050156e02,
                                3.77485237685302021e02, 3.20937758913846947e03,
                                1.85777706184603153e-1};
    static const double b[4] = {2.36012909523441209e01, 2.44024637934444173e02,
                                1.28261652607737228e03, 2.84423683343917062e03};
    const double y = x * x;
    double num = a[4] * y;
    double den = y;
    for (int i = 0; i < 3; ++i) {
        num = (num + a[i]) * y;
        den = (den + b[i]) * y;
    }
    return x * (num + a[3]) / (den + b[3]);
}

// exp(-x*x) with the argument split so the large-x tail keeps full accuracy.
double exp_neg_sq(double x) {
    const double xt = std::trunc(x * 16.0) / 16.0;
    const double del = (x - xt) * (x + xt);
    return std::exp(-xt * xt) * std::exp(-del);
}

// erfc(x) for 0.46875 < x <= 4.
double erfc_mid(double x) {
    static const double c[9] = {5.64188496988670089e-1, 8.88314979438837594e00,
                                6.61191906371416295e01, 2.98635138197400131e02,
                                8.81952221241769090e02, 1.71204761263407058e03,
                                2.05107837782607147e03, 1.23033935479799725e03,
                                2.15311535474403846e-8};
    static const double d[8] = {1.57449261107098347e01, 1.17693950891312499e02,
                                5.37181101862009858e02, 1.62138957456669019e03,
                                3.29079923573345963e03, 4.36261909014324716e03,
                                3.43936767414372164e03, 1.23033935480374942e03};
    double num = c[8] * x;
    double den = x;
    for (int i = 0; i < 7; ++i) {
        num = (num + c[i]) * x;
        den = (den + d[i]) * x;
    }
    return exp_neg_sq(x) * (num + c[7]) / (den + d[7]);
}

// erfc(x) for x > 4; underflows to 0 past ~26.5.
double erfc_large(double x) {
    static const double p[6] = {3.05326634961232344e-1, 3.60344899949804439e-1,
                                1.25781726111229246e-1, 1.60837851487422766e-2,
                                6.58749161529837803e-4, 1.63153871373020978e-2};
    static const double q[5] = {2.56852019228982242e00, 1.87295284992346047e00,
                                5.27905102951428412e-1, 6.05183413124413191e-2,
                                2.33520497626869185e-3};
    if (x > 26.543) return 0.0;
    const double y = 1.0 / (x * x);
    double num = p[5] * y;
    double den = y;
    for (int i = 0; i < 4; ++i) {
        num = (num + p[i]) * y;
        den = (den + q[i]) * y;
    }
    double r = y * (num + p[4]) / (den + q[4]);
    r = (kInvSqrtPi - r) / x;
    return exp_neg_sq(x) * r;
}

// erfc(x) for x >= 0.
double erfc_pos(double x) {
    if (x <= 0.46875) return 1.0 - erf_small(x);
    if (x <= 4.0) return erfc_mid(x);
    return erfc_large(x);
}

}  // namespace

double norm_cdf(double x) noexcept {
    const double z = x * kInvSqrt2;
    if (std::abs(z) <= 0.46875) return 0.5 + 0.5 * erf_small(z);
    if (x < 0.0) return 0.5 * erfc_pos(-z);
    return 1.0 - 0.5 * erfc_pos(z);
}

double norm_cdf_inv(double p) noexcept {
    if (!(p > 0.0)) return -std::numeric_limits<double>::infinity();
    if (!(p < 1.0)) return std::numeric_limits<double>::infinity();

    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};

    const double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // One Halley refinement against norm_cdf.
    const double e = norm_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

}  // namespace electorate
