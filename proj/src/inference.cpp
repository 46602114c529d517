#include "dcorr/inference.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "dcorr/error.hpp"
#include "dcorr/parallel.hpp"

namespace dcorr {

namespace {

constexpr std::uint64_t kDataStream = 0xda7a;
constexpr std::uint64_t kTestStream = 0x7e57;
constexpr std::size_t kReplicateBlock = 16;

void check_test_inputs(const Sample& x, const Sample& y, std::size_t replicates)
{
    if (x.n() != y.n())
        throw DimensionError("sample sizes differ: " + std::to_string(x.n()) + " vs " +
                             std::to_string(y.n()));
    if (x.n() < 2)
        throw DimensionError("permutation test needs at least 2 observations");
    if (replicates < 1)
        throw DomainError("permutation test needs at least 1 replicate");
}

TestResult finish(double observed, const std::vector<double>& permuted, std::uint64_t seed)
{
    TestResult r;
    r.statistic = observed;
    r.replicates = permuted.size();
    r.seed = seed;
    for (double v : permuted)
        if (v >= observed)
            ++r.exceed_count;
    r.p_value = static_cast<double>(1 + r.exceed_count) / static_cast<double>(1 + r.replicates);
    return r;
}

} // namespace

std::vector<std::size_t> replicate_permutation(std::size_t n, std::uint64_t seed, std::uint64_t b)
{
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    CounterRng rng(seed, b);
    rng.shuffle(std::span<std::size_t>(perm));
    return perm;
}

TestResult permutation_test(const Sample& x, const Sample& y, std::size_t replicates,
                            std::uint64_t seed, const ComputeOptions& opts)
{
    check_test_inputs(x, y, replicates);
    const std::size_t n = x.n();
    const std::size_t blocks = (replicates + kReplicateBlock - 1) / kReplicateBlock;
    std::vector<double> stats(replicates);

    if (resolve_strategy(n, opts) == Strategy::materialized) {
        const CenteredMatrix a = double_center(pairwise_distances(x));
        const CenteredMatrix b = double_center(pairwise_distances(y));
        const double observed = dcov_sq_centered(a, b);
        for_each_block(blocks, opts.threads, [&](std::size_t blk) {
            const std::size_t end = std::min(replicates, (blk + 1) * kReplicateBlock);
            for (std::size_t r = blk * kReplicateBlock; r < end; ++r)
                stats[r] = dcov_sq_centered(a, b, replicate_permutation(n, seed, r + 1));
        });
        return finish(observed, stats, seed);
    }

    // Too large to hold the centred matrices: recompute each replicate in
    // O(N) memory. Replicates run sequentially since the kernel is parallel.
    const double observed = dcov_sq_streaming(x, y, opts);
    for (std::size_t r = 0; r < replicates; ++r)
        stats[r] = dcov_sq_streaming(x, y.permuted(replicate_permutation(n, seed, r + 1)), opts);
    return finish(observed, stats, seed);
}

TestResult pearson_permutation_test(const Sample& x, const Sample& y, std::size_t replicates,
                                    std::uint64_t seed)
{
    check_test_inputs(x, y, replicates);
    if (x.dim() != 1 || y.dim() != 1)
        throw DimensionError("pearson permutation test needs scalar samples");
    const std::size_t n = x.n();
    const auto yv = y.data();
    const double observed = std::abs(pearson(x.data(), yv));
    std::vector<double> stats(replicates);
    std::vector<double> shuffled(n);
    for (std::size_t r = 0; r < replicates; ++r) {
        const auto perm = replicate_permutation(n, seed, r + 1);
        for (std::size_t k = 0; k < n; ++k)
            shuffled[k] = yv[perm[k]];
        stats[r] = std::abs(pearson(x.data(), shuffled));
    }
    return finish(observed, stats, seed);
}

Scenario parse_scenario(std::string_view name)
{
    if (name == "independent")
        return Scenario::independent;
    if (name == "linear")
        return Scenario::linear;
    if (name == "quadratic")
        return Scenario::quadratic;
    throw DomainError("unknown scenario '" + std::string(name) +
                      "' (known: independent, linear, quadratic)");
}

std::string_view to_string(Scenario s) noexcept
{
    switch (s) {
    case Scenario::independent:
        return "independent";
    case Scenario::linear:
        return "linear";
    case Scenario::quadratic:
        return "quadratic";
    }
    return "unknown";
}

std::pair<Sample, Sample> generate_scenario(Scenario s, std::size_t n, CounterRng& rng)
{
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        switch (s) {
        case Scenario::independent:
            x[i] = rng.normal();
            y[i] = rng.normal();
            break;
        case Scenario::linear:
            x[i] = rng.normal();
            y[i] = 0.3 * x[i] + rng.normal();
            break;
        case Scenario::quadratic:
            x[i] = rng.uniform(-1.0, 1.0);
            y[i] = x[i] * x[i];
            break;
        }
    }
    return {Sample(n, 1, std::move(x)), Sample(n, 1, std::move(y))};
}

PowerReport power_simulation(Scenario scenario, std::size_t n, std::size_t trials, double alpha,
                             std::size_t replicates, std::uint64_t seed, const ComputeOptions& opts)
{
    if (trials < 1 || n < 2 || replicates < 1)
        throw DomainError("power simulation needs trials >= 1, n >= 2 and replicates >= 1");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("alpha must lie in (0, 1)");

    std::size_t rejected_dcov = 0;
    std::size_t rejected_pearson = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        CounterRng data_rng(derive_seed(seed, kDataStream), t);
        const auto [x, y] = generate_scenario(scenario, n, data_rng);
        const std::uint64_t test_seed = derive_seed(derive_seed(seed, kTestStream), t);
        if (permutation_test(x, y, replicates, test_seed, opts).p_value <= alpha)
            ++rejected_dcov;
        if (pearson_permutation_test(x, y, replicates, test_seed).p_value <= alpha)
            ++rejected_pearson;
    }

    PowerReport rep;
    rep.scenario = scenario;
    rep.n = n;
    rep.trials = trials;
    rep.alpha = alpha;
    rep.replicates = replicates;
    rep.seed = seed;
    rep.rejection_rate_dcov = static_cast<double>(rejected_dcov) / static_cast<double>(trials);
    rep.rejection_rate_pearson = static_cast<double>(rejected_pearson) / static_cast<double>(trials);
    return rep;
}

} // namespace dcorr
