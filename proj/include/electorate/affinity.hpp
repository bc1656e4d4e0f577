#pragma once
// Probit gender-affinity model: per-gender follow probabilities, the
// before/after gender-ratio expressions, the event disturbance D, and a
// seeded population simulator drawing from the same model.
//
// Covariates are collapsed to a per-gender scalar baseline: the model is
// identified only through the composite index, which is all the downstream
// test consumes. The latent noise is standard normal.

#include <cstdint>
#include <filesystem>

#include "electorate/gender.hpp"
#include "electorate/normal.hpp"

namespace electorate::affinity {

struct AffinityParams {
    double baseline_m = 0.0;  // composite index for men, no event
    double baseline_w = 0.0;
    double lambda_m = 0.0;    // additive event effect on men
    double lambda_w = 0.0;
    std::uint64_t n_prime_m = 1;   // prospective pool sizes before the event
    std::uint64_t n_prime_w = 1;
    std::uint64_t n_dprime_m = 1;  // and after
    std::uint64_t n_dprime_w = 1;
};

// Throws std::invalid_argument on non-finite reals or zero pool sizes.
void validate(const AffinityParams& params);

// Standard normal CDF; see normal.hpp for accuracy notes.
inline double phi(double x) noexcept { return norm_cdf(x); }

// Phi(baseline_g + lambda_g * [event]) for the given gender.
double follow_probability(const AffinityParams& params, Gender gender, bool event);

// Expected male/female ratio of new followers for the period:
//   before: N'_m Phi(b_m) / (N'_w Phi(b_w))
//   after:  N''_m Phi(b_m + l_m) / (N''_w Phi(b_w + l_w))
// A denominator that underflows to 0 reports as +infinity (divergent ratio).
double gender_ratio(const AffinityParams& params, bool event);

// D = gender_ratio(after) - gender_ratio(before).
double disturbance(const AffinityParams& params);

struct SimOutcome {
    std::uint64_t followed_m = 0;
    std::uint64_t followed_w = 0;
    std::uint64_t draws_m = 0;
    std::uint64_t draws_w = 0;
};

// Draws one standard-normal epsilon per individual (inverse CDF of a seeded
// 64-bit generator) and counts follows where the utility index + epsilon is
// positive. The population is split into fixed-size partitions with seeds
// derived from (seed, gender, partition), so the counts are identical for
// any worker count. Pool sizes come from the event period (N' or N'').
SimOutcome simulate(const AffinityParams& params, bool event, std::uint64_t seed, int jobs = 1);

// Flat key-value text config (key = value, '#' comments) for the CLI.
AffinityParams load_params(const std::filesystem::path& path);
void save_params(const AffinityParams& params, const std::filesystem::path& path);

}  // namespace electorate::affinity
