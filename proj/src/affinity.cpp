#include "electorate/affinity.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "electorate/parallel.hpp"
#include "electorate/rng.hpp"

namespace electorate::affinity {
namespace {

// Individuals per simulation partition; fixed so results are independent of
// the worker count.
constexpr std::uint64_t kPartition = 65'536;

double index_for(const AffinityParams& p, Gender g, bool event) {
    const double base = g == Gender::male ? p.baseline_m : p.baseline_w;
    const double lambda = g == Gender::male ? p.lambda_m : p.lambda_w;
    return base + (event ? lambda : 0.0);
}

std::uint64_t pool_for(const AffinityParams& p, Gender g, bool event) {
    if (g == Gender::male) return event ? p.n_dprime_m : p.n_prime_m;
    return event ? p.n_dprime_w : p.n_prime_w;
}

// Counts positive-utility individuals in one gender's pool.
std::uint64_t simulate_gender(double utility_index, std::uint64_t pool, std::uint64_t seed,
                              std::uint64_t gender_tag, int jobs) {
    const std::uint64_t n_parts = (pool + kPartition - 1) / kPartition;
    std::vector<std::uint64_t> counts(n_parts, 0);
    parallel_for_chunks(n_parts, jobs, [&](std::size_t part) {
        const std::uint64_t lo = part * kPartition;
        const std::uint64_t hi = std::min(pool, lo + kPartition);
        std::mt19937_64 gen(derive_seed(seed, gender_tag * 0x10000 + part));
        std::uint64_t c = 0;
        for (std::uint64_t i = lo; i < hi; ++i) {
            const double eps = norm_cdf_inv(uniform01(gen));
            if (utility_index + eps > 0.0) ++c;
        }
        counts[part] = c;
    });
    std::uint64_t total = 0;
    for (std::uint64_t c : counts) total += c;
    return total;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

void validate(const AffinityParams& p) {
    for (double v : {p.baseline_m, p.baseline_w, p.lambda_m, p.lambda_w})
        if (!std::isfinite(v)) throw std::invalid_argument("affinity params: non-finite value");
    for (std::uint64_t n : {p.n_prime_m, p.n_prime_w, p.n_dprime_m, p.n_dprime_w})
        if (n < 1) throw std::invalid_argument("affinity params: population counts must be >= 1");
}

double follow_probability(const AffinityParams& params, Gender gender, bool event) {
    validate(params);
    return phi(index_for(params, gender, event));
}

double gender_ratio(const AffinityParams& params, bool event) {
    validate(params);
    const double num =
        static_cast<double>(pool_for(params, Gender::male, event)) *
        phi(index_for(params, Gender::male, event));
    const double den =
        static_cast<double>(pool_for(params, Gender::female, event)) *
        phi(index_for(params, Gender::female, event));
    if (den == 0.0) return std::numeric_limits<double>::infinity();
    return num / den;
}

double disturbance(const AffinityParams& params) {
    return gender_ratio(params, true) - gender_ratio(params, false);
}

SimOutcome simulate(const AffinityParams& params, bool event, std::uint64_t seed, int jobs) {
    validate(params);
    SimOutcome out;
    out.draws_m = pool_for(params, Gender::male, event);
    out.draws_w = pool_for(params, Gender::female, event);
    out.followed_m =
        simulate_gender(index_for(params, Gender::male, event), out.draws_m, seed, 0, jobs);
    out.followed_w =
        simulate_gender(index_for(params, Gender::female, event), out.draws_w, seed, 1, jobs);
    return out;
}

AffinityParams load_params(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("affinity params: cannot open " + path.string());

    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("affinity params: bad line " + std::to_string(line_no) +
                                     " in " + path.string());
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    AffinityParams p;
    auto take_real = [&kv, &path](const char* key, double& out) {
        auto it = kv.find(key);
        if (it == kv.end())
            throw std::runtime_error("affinity params: missing key '" + std::string(key) + "' in " +
                                     path.string());
        out = std::stod(it->second);
        kv.erase(it);
    };
    auto take_count = [&kv, &path](const char* key, std::uint64_t& out) {
        auto it = kv.find(key);
        if (it == kv.end())
            throw std::runtime_error("affinity params: missing key '" + std::string(key) + "' in " +
                                     path.string());
        const std::string& s = it->second;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        if (ec != std::errc() || ptr != s.data() + s.size())
            throw std::runtime_error("affinity params: bad count for '" + std::string(key) + "'");
        kv.erase(it);
    };

    take_real("baseline_m", p.baseline_m);
    take_real("baseline_w", p.baseline_w);
    take_real("lambda_m", p.lambda_m);
    take_real("lambda_w", p.lambda_w);
    take_count("n_prime_m", p.n_prime_m);
    take_count("n_prime_w", p.n_prime_w);
    take_count("n_dprime_m", p.n_dprime_m);
    take_count("n_dprime_w", p.n_dprime_w);
    if (!kv.empty())
        throw std::runtime_error("affinity params: unknown key '" + kv.begin()->first + "' in " +
                                 path.string());
    validate(p);
    return p;
}

void save_params(const AffinityParams& params, const std::filesystem::path& path) {
    validate(params);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("affinity params: cannot open " + path.string());
    out.precision(17);
    out << "baseline_m = " << params.baseline_m << "\n"
        << "baseline_w = " << params.baseline_w << "\n"
        << "lambda_m = " << params.lambda_m << "\n"
        << "lambda_w = " << params.lambda_w << "\n"
        << "n_prime_m = " << params.n_prime_m << "\n"
        << "n_prime_w = " << params.n_prime_w << "\n"
        << "n_dprime_m = " << params.n_dprime_m << "\n"
        << "n_dprime_w = " << params.n_dprime_w << "\n";
    if (!out) throw std::runtime_error("affinity params: write failed for " + path.string());
}

}  // namespace electorate::affinity
