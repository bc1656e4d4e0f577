#pragma once
// Pooled two-sample z-test over observed gender compositions, with two-sided
// p-values, plus the inverse problem of recovering a feasible pooled
// proportion from a published (delta, z) pair.

#include <cstdint>
#include <string>
#include <vector>

#include "electorate/gender.hpp"

namespace electorate::stats {

struct GenderComposition {
    std::uint64_t male_count = 0;
    std::uint64_t female_count = 0;
    std::string cohort;

    std::uint64_t total() const noexcept { return male_count + female_count; }
};

struct ZTestResult {
    double z = 0.0;
    double p_value = 1.0;    // two-sided, 2 * Phi(-|z|)
    double p1 = 0.0;         // tested-class share, first sample
    double p2 = 0.0;         // tested-class share, second sample
    double pooled_p = 0.0;
    std::uint64_t n1 = 0;
    std::uint64_t n2 = 0;
    Gender tested_class = Gender::male;
    // All observations in one class: the pooled variance is zero and z is
    // undefined. Reported, never thrown.
    bool degenerate = false;
};

// z = (p2 - p1) / sqrt(pooled * (1 - pooled) * (1/n2 + 1/n1)) where p are the
// tested-class shares and pooled is the combined share. The difference and
// variance terms are formed from integer cross products, so swapping the
// samples or testing the complement class negates z exactly.
// Throws std::invalid_argument when either cohort is empty.
ZTestResult two_sample_z(const GenderComposition& before, const GenderComposition& after,
                         Gender tested_class = Gender::male);

// Solves pooled * (1 - pooled) = (delta_p / z)^2 / (1/n1 + 1/n2) for the
// pooled proportion; returns the 0, 1 or 2 roots in (0,1), ascending. An
// empty result signals that the published numbers are infeasible.
// Throws std::invalid_argument when z == 0 or a size is zero.
std::vector<double> invert_pooled_variance(double delta_p, double z, std::uint64_t n1,
                                           std::uint64_t n2);

}  // namespace electorate::stats
