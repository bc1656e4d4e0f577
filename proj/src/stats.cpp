#include "electorate/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "electorate/normal.hpp"

namespace electorate::stats {
namespace {

std::uint64_t class_count(const GenderComposition& c, Gender g) noexcept {
    return g == Gender::male ? c.male_count : c.female_count;
}

}  // namespace

ZTestResult two_sample_z(const GenderComposition& before, const GenderComposition& after,
                         Gender tested_class) {
    const std::uint64_t n1 = before.total();
    const std::uint64_t n2 = after.total();
    if (n1 == 0 || n2 == 0)
        throw std::invalid_argument("two_sample_z: empty cohort ('" +
                                    (n1 == 0 ? before.cohort : after.cohort) + "')");

    const std::uint64_t x1 = class_count(before, tested_class);
    const std::uint64_t x2 = class_count(after, tested_class);

    ZTestResult r;
    r.tested_class = tested_class;
    r.n1 = n1;
    r.n2 = n2;
    r.p1 = static_cast<double>(x1) / static_cast<double>(n1);
    r.p2 = static_cast<double>(x2) / static_cast<double>(n2);
    r.pooled_p = static_cast<double>(x1 + x2) / static_cast<double>(n1 + n2);

    const std::uint64_t pooled_num = x1 + x2;
    const std::uint64_t total = n1 + n2;
    if (pooled_num == 0 || pooled_num == total) {
        r.degenerate = true;
        r.z = std::numeric_limits<double>::quiet_NaN();
        r.p_value = std::numeric_limits<double>::quiet_NaN();
        return r;
    }

    // p2 - p1 = (x2*n1 - x1*n2) / (n1*n2) and pooled*(1-pooled) =
    // s*(N-s) / N^2 with s = x1+x2, N = n1+n2. Integer cross products keep
    // the swap and complement symmetries exact; unsigned 128-bit math cannot
    // overflow for 64-bit counts.
    const unsigned __int128 lhs = static_cast<unsigned __int128>(x2) * n1;
    const unsigned __int128 rhs = static_cast<unsigned __int128>(x1) * n2;
    const double cross = lhs >= rhs ? static_cast<double>(lhs - rhs)
                                    : -static_cast<double>(rhs - lhs);
    const double delta = cross / (static_cast<double>(n1) * static_cast<double>(n2));
    const double pooled_var =
        static_cast<double>(static_cast<unsigned __int128>(pooled_num) * (total - pooled_num)) /
        (static_cast<double>(total) * static_cast<double>(total));
    const double inv_sizes = 1.0 / static_cast<double>(n2) + 1.0 / static_cast<double>(n1);

    r.z = delta / std::sqrt(pooled_var * inv_sizes);
    r.p_value = 2.0 * norm_cdf(-std::abs(r.z));
    return r;
}

std::vector<double> invert_pooled_variance(double delta_p, double z, std::uint64_t n1,
                                           std::uint64_t n2) {
    if (z == 0.0 || !std::isfinite(z))
        throw std::invalid_argument("invert_pooled_variance: z must be finite and nonzero");
    if (n1 == 0 || n2 == 0)
        throw std::invalid_argument("invert_pooled_variance: sample sizes must be positive");

    const double inv_sizes = 1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2);
    const double ratio = delta_p / z;
    const double k = ratio * ratio / inv_sizes;  // pooled * (1 - pooled)

    std::vector<double> roots;
    if (k <= 0.0) return roots;
    const double disc = 1.0 - 4.0 * k;
    if (disc < 0.0) return roots;  // infeasible published numbers
    const double s = std::sqrt(disc);
    const double lo = (1.0 - s) / 2.0;
    const double hi = (1.0 + s) / 2.0;
    if (lo > 0.0 && lo < 1.0) roots.push_back(lo);
    if (hi > lo && hi > 0.0 && hi < 1.0) roots.push_back(hi);
    return roots;
}

}  // namespace electorate::stats
