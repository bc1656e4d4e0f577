#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "electorate/affinity.hpp"
#include "electorate/normal.hpp"
#include "electorate/rng.hpp"
#include "electorate/stats.hpp"

using namespace electorate::stats;
using electorate::Gender;

namespace {

GenderComposition comp(std::uint64_t male, std::uint64_t female, const char* name = "c") {
    return GenderComposition{male, female, name};
}

}  // namespace

TEST_CASE("a large-cohort gender split reproduces the reference z of 39.10") {
    // Shares 49.92% of 40,088 vs 64.11% of 34,921.
    const auto r = two_sample_z(comp(20'012, 20'076, "all"), comp(22'388, 12'533, "subgroup"));
    CHECK(r.n1 == 40'088);
    CHECK(r.n2 == 34'921);
    CHECK(std::fabs(r.z - 39.10) <= 0.10);
    CHECK(r.p_value < 1e-10);
    CHECK_FALSE(r.degenerate);
}

TEST_CASE("identical compositions give z = 0 and p = 1") {
    const auto r = two_sample_z(comp(30, 70), comp(30, 70));
    CHECK(r.z == 0.0);
    CHECK(r.p_value == 1.0);
}

TEST_CASE("hand-evaluated example: 30/100 vs 50/100") {
    const auto r = two_sample_z(comp(30, 70), comp(50, 50));
    CHECK(r.pooled_p == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(r.z == doctest::Approx(2.8867513459481288).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(0.003892417123).epsilon(1e-8));
}

TEST_CASE("z agrees with the directly-evaluated textbook formula") {
    std::mt19937_64 gen(15);
    for (int trial = 0; trial < 200; ++trial) {
        const std::uint64_t m1 = gen() % 500, f1 = 1 + gen() % 500;
        const std::uint64_t m2 = gen() % 500, f2 = 1 + gen() % 500;
        const auto r = two_sample_z(comp(m1, f1), comp(m2, f2));
        if (r.degenerate) continue;

        const double n1 = static_cast<double>(m1 + f1), n2 = static_cast<double>(m2 + f2);
        const double p1 = m1 / n1, p2 = m2 / n2;
        const double pooled = (m1 + m2) / (n1 + n2);
        const double direct =
            (p2 - p1) / std::sqrt(pooled * (1 - pooled) * (1 / n2 + 1 / n1));
        CHECK(r.z == doctest::Approx(direct).epsilon(1e-12));
        CHECK(r.pooled_p == doctest::Approx((n1 * p1 + n2 * p2) / (n1 + n2)).epsilon(1e-12));
        // Two-sided p-value identity.
        CHECK(r.p_value == 2.0 * electorate::norm_cdf(-std::fabs(r.z)));
    }
}

TEST_CASE("swapping the samples negates z exactly and keeps the p-value") {
    std::mt19937_64 gen(16);
    for (int trial = 0; trial < 100; ++trial) {
        const auto a = comp(1 + gen() % 400, 1 + gen() % 400);
        const auto b = comp(1 + gen() % 400, 1 + gen() % 400);
        const auto fwd = two_sample_z(a, b);
        const auto rev = two_sample_z(b, a);
        CHECK(rev.z == -fwd.z);
        CHECK(rev.p_value == fwd.p_value);
    }
}

TEST_CASE("testing the complement class negates z exactly") {
    std::mt19937_64 gen(17);
    for (int trial = 0; trial < 100; ++trial) {
        const auto a = comp(1 + gen() % 400, 1 + gen() % 400);
        const auto b = comp(1 + gen() % 400, 1 + gen() % 400);
        const auto male = two_sample_z(a, b, Gender::male);
        const auto female = two_sample_z(a, b, Gender::female);
        CHECK(female.z == -male.z);
        CHECK(female.p_value == male.p_value);
    }
}

TEST_CASE("p-value strictly decreases as |z| grows") {
    double prev_p = 1.0;
    for (std::uint64_t extra = 5; extra <= 50; extra += 5) {
        const auto r = two_sample_z(comp(100, 100), comp(100 + extra, 100 - extra));
        CHECK(r.p_value < prev_p);
        prev_p = r.p_value;
    }
}

TEST_CASE("degenerate and error cases") {
    const auto all_male = two_sample_z(comp(10, 0), comp(20, 0));
    CHECK(all_male.degenerate);
    CHECK(std::isnan(all_male.z));

    const auto all_female = two_sample_z(comp(0, 10), comp(0, 20));
    CHECK(all_female.degenerate);

    CHECK_THROWS_AS(two_sample_z(comp(0, 0), comp(1, 1)), std::invalid_argument);
    CHECK_THROWS_AS(two_sample_z(comp(1, 1), comp(0, 0)), std::invalid_argument);
}

TEST_CASE("type-I rate under null simulations sits near alpha") {
    // Sparse-follow regime: the prospective pools dwarf the follower counts,
    // which is where the pooled z-test's binomial sampling model applies.
    electorate::affinity::AffinityParams params;
    params.baseline_m = params.baseline_w = -2.0;
    params.n_prime_m = params.n_prime_w = 20'000;
    params.n_dprime_m = params.n_dprime_w = 20'000;

    int rejects = 0;
    const int trials = 300;
    for (int t = 0; t < trials; ++t) {
        const auto before =
            electorate::affinity::simulate(params, false, electorate::derive_seed(5'000, 2 * t));
        const auto after =
            electorate::affinity::simulate(params, true, electorate::derive_seed(5'000, 2 * t + 1));
        const auto r = two_sample_z(comp(before.followed_m, before.followed_w, "before"),
                                    comp(after.followed_m, after.followed_w, "after"));
        if (!r.degenerate && r.p_value < 0.05) ++rejects;
    }
    const double rate = static_cast<double>(rejects) / trials;
    CHECK(rate >= 0.01);
    CHECK(rate <= 0.10);
}

TEST_CASE("invert_pooled_variance solves the large-cohort consistency check") {
    // delta 0.016 at z 2.597 with sizes 14,504 and 11,147; the quadratic has
    // roots at 0.39628 and its complement (verified by plugging back below).
    const auto roots = invert_pooled_variance(0.016, 2.597, 14'504, 11'147);
    REQUIRE(roots.size() == 2);
    CHECK(roots[0] == doctest::Approx(0.39627957483733113).epsilon(1e-10));
    CHECK(roots[1] == doctest::Approx(0.60372042516266887).epsilon(1e-10));
    for (double p : roots) {
        const double se = std::sqrt(p * (1 - p) * (1.0 / 14'504 + 1.0 / 11'147));
        CHECK(0.016 / se == doctest::Approx(2.597).epsilon(1e-9));
    }
}

TEST_CASE("invert_pooled_variance roundtrips a known pooled proportion") {
    std::mt19937_64 gen(18);
    for (int trial = 0; trial < 100; ++trial) {
        const double pooled = 0.05 + 0.4 * (gen() % 1000) / 1000.0;  // stay below 0.45
        const std::uint64_t n1 = 500 + gen() % 20'000, n2 = 500 + gen() % 20'000;
        const double z = 0.5 + 4.0 * (gen() % 1000) / 1000.0;
        const double delta =
            z * std::sqrt(pooled * (1 - pooled) * (1.0 / n1 + 1.0 / n2));
        const auto roots = invert_pooled_variance(delta, z, n1, n2);
        REQUIRE_FALSE(roots.empty());
        const bool hit = std::fabs(roots.front() - pooled) < 1e-9 ||
                         std::fabs(roots.back() - pooled) < 1e-9;
        CHECK(hit);
    }
}

TEST_CASE("infeasible published numbers yield no roots") {
    // The implied variance p(1-p) = (delta/z)^2 / (1/n1 + 1/n2) caps at 1/4;
    // a delta too large for the reported z pushes past it and the
    // discriminant goes negative.
    CHECK(invert_pooled_variance(0.5, 1.0, 100, 100).empty());
    CHECK(invert_pooled_variance(0.9, 2.0, 50, 50).empty());
    // The opposite direction (huge z, tiny delta) implies a near-degenerate
    // pooled proportion: feasible, with roots pushed toward 0 and 1.
    const auto extreme = invert_pooled_variance(0.001, 50.0, 100, 100);
    REQUIRE(extreme.size() == 2);
    CHECK(extreme[0] < 1e-6);
    CHECK(extreme[1] > 1.0 - 1e-6);
    CHECK_THROWS_AS(invert_pooled_variance(0.01, 0.0, 100, 100), std::invalid_argument);
    CHECK_THROWS_AS(invert_pooled_variance(0.01, 1.0, 0, 100), std::invalid_argument);
}

TEST_CASE("roots straddle one half just below the variance maximum and vanish above it") {
    const std::uint64_t n1 = 1000, n2 = 1000;
    const double z = 2.0;
    const double s = 1.0 / n1 + 1.0 / n2;
    // Slightly inside the feasible region: two roots hugging 0.5.
    const auto inside = invert_pooled_variance(z * std::sqrt(0.2499 * s), z, n1, n2);
    REQUIRE(inside.size() == 2);
    CHECK(inside[0] == doctest::Approx(0.49).epsilon(1e-3));
    CHECK(inside[1] == doctest::Approx(0.51).epsilon(1e-3));
    // Slightly outside: infeasible.
    CHECK(invert_pooled_variance(z * std::sqrt(0.2501 * s), z, n1, n2).empty());
}
