#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "dcorr/core_stats.hpp"
#include "dcorr/rng.hpp"
#include "dcorr/sample.hpp"

namespace dcorr {

/// Permutation test outcome. p_value = (1 + exceed_count) / (1 + replicates),
/// where exceed_count counts permuted statistics >= the observed one.
struct TestResult {
    double statistic = 0.0;
    std::size_t replicates = 0;
    std::size_t exceed_count = 0;
    double p_value = 1.0;
    std::uint64_t seed = 0;
};

/// Independence test on dcov_sq. Replicate b permutes the rows of y with a
/// Fisher-Yates shuffle drawn from CounterRng(seed, b), so the result is a
/// pure function of (x, y, replicates, seed).
TestResult permutation_test(const Sample& x, const Sample& y, std::size_t replicates,
                            std::uint64_t seed, const ComputeOptions& opts = {});

/// Same construction with |pearson| as the statistic (scalar samples).
TestResult pearson_permutation_test(const Sample& x, const Sample& y, std::size_t replicates,
                                    std::uint64_t seed);

/// Row permutation used by replicate b of a test seeded with `seed`.
std::vector<std::size_t> replicate_permutation(std::size_t n, std::uint64_t seed, std::uint64_t b);

enum class Scenario {
    independent, // x, y i.i.d. N(0, 1)
    linear,      // x ~ N(0, 1), y = 0.3 x + N(0, 1)
    quadratic,   // x ~ U(-1, 1), y = x^2
};

Scenario parse_scenario(std::string_view name);
std::string_view to_string(Scenario s) noexcept;

std::pair<Sample, Sample> generate_scenario(Scenario s, std::size_t n, CounterRng& rng);

struct PowerReport {
    Scenario scenario = Scenario::independent;
    std::size_t n = 0;
    std::size_t trials = 0;
    double alpha = 0.05;
    std::size_t replicates = 0;
    double rejection_rate_dcov = 0.0;
    double rejection_rate_pearson = 0.0;
    std::uint64_t seed = 0;
};

/// Rejection rates at level alpha of the dCov and |Pearson| permutation
/// tests over `trials` synthetic data sets.
PowerReport power_simulation(Scenario scenario, std::size_t n, std::size_t trials, double alpha,
                             std::size_t replicates, std::uint64_t seed,
                             const ComputeOptions& opts = {});

} // namespace dcorr
