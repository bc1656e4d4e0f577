#pragma once
// Independent oracles used only by tests. Each one recomputes a result by a
// different route than the library (series/continued fraction instead of
// rational approximation, nested scans instead of merges, naive loops instead
// of the blocked kernels) so agreement is meaningful.

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracles {

// Standard normal CDF in long double: Taylor series of erf below z = 3,
// Lentz-evaluated continued fraction for erfc above. Good to ~1e-18 absolute.
inline long double erf_series(long double z) {
    const long double two_over_sqrt_pi = 1.12837916709551257389615890312154517L;
    long double term = z;
    long double sum = 0.0L;
    const long double z2 = z * z;
    for (int n = 0; n < 200; ++n) {
        const long double contrib = term / (2 * n + 1);
        sum += (n % 2 == 0) ? contrib : -contrib;
        term *= z2 / (n + 1);
        if (contrib < 1e-25L && n > 4) break;
    }
    return two_over_sqrt_pi * sum;
}

inline long double erfc_cf(long double z) {
    // erfc(z) = exp(-z^2)/sqrt(pi) * 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
    const long double tiny = 1e-30L;
    long double f = tiny, c = f, d = 0.0L;
    for (int n = 1; n <= 300; ++n) {
        const long double a = (n == 1) ? 1.0L : (n - 1) / 2.0L;
        d = z + a * d;
        if (d == 0.0L) d = tiny;
        c = z + a / c;
        if (c == 0.0L) c = tiny;
        d = 1.0L / d;
        const long double delta = c * d;
        f *= delta;
        if (std::fabs(delta - 1.0L) < 1e-22L) break;
    }
    const long double sqrt_pi = 1.77245385090551602729816748334114518L;
    return std::exp(-z * z) / sqrt_pi * f;
}

inline long double phi(long double x) {
    const long double z = std::fabs(x) / 1.41421356237309504880168872420969808L;
    if (z < 3.0L) {
        const long double e = erf_series(z);
        return x < 0 ? 0.5L * (1.0L - e) : 0.5L * (1.0L + e);
    }
    const long double tail = 0.5L * erfc_cf(z);
    return x < 0 ? tail : 1.0L - tail;
}

// Linear membership scan; b sorted, early exit allowed.
inline bool contains_scan(const std::vector<std::uint64_t>& b, std::uint64_t x) {
    for (std::uint64_t v : b) {
        if (v == x) return true;
        if (v > x) return false;
    }
    return false;
}

// a \ b by per-element scan.
inline std::vector<std::uint64_t> difference_scan(const std::vector<std::uint64_t>& a,
                                                  const std::vector<std::uint64_t>& b) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t x : a)
        if (!contains_scan(b, x)) out.push_back(x);
    return out;
}

inline std::vector<std::uint64_t> intersection_scan(const std::vector<std::uint64_t>& a,
                                                    const std::vector<std::uint64_t>& b) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t x : a)
        if (contains_scan(b, x)) out.push_back(x);
    return out;
}

// Direct six-loop convolution with explicit zero padding, kernel 5, pad 2.
inline void conv_naive(const std::vector<double>& in, int cin, const std::vector<double>& w,
                       const std::vector<double>& b, int cout, int side, std::vector<double>& out) {
    out.assign(static_cast<std::size_t>(cout) * side * side, 0.0);
    for (int oc = 0; oc < cout; ++oc) {
        for (int y = 0; y < side; ++y) {
            for (int x = 0; x < side; ++x) {
                double acc = b[oc];
                for (int ic = 0; ic < cin; ++ic) {
                    for (int ky = 0; ky < 5; ++ky) {
                        for (int kx = 0; kx < 5; ++kx) {
                            const int iy = y + ky - 2;
                            const int ix = x + kx - 2;
                            if (iy < 0 || iy >= side || ix < 0 || ix >= side) continue;
                            acc += in[(ic * side + iy) * side + ix] *
                                   w[((oc * cin + ic) * 5 + ky) * 5 + kx];
                        }
                    }
                }
                out[(oc * side + y) * side + x] = acc;
            }
        }
    }
}

// Brute-force 2x2/2 max pool, first-wins ties.
inline void pool_naive(const std::vector<double>& in, int channels, int side,
                       std::vector<double>& out) {
    const int half = side / 2;
    out.assign(static_cast<std::size_t>(channels) * half * half, 0.0);
    for (int c = 0; c < channels; ++c)
        for (int py = 0; py < half; ++py)
            for (int px = 0; px < half; ++px) {
                double best = in[(c * side + 2 * py) * side + 2 * px];
                for (int dy = 0; dy < 2; ++dy)
                    for (int dx = 0; dx < 2; ++dx)
                        best = std::max(best, in[(c * side + 2 * py + dy) * side + 2 * px + dx]);
                out[(c * half + py) * half + px] = best;
            }
}

}  // namespace oracles
