#include "dcorr/core_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcorr/error.hpp"
#include "dcorr/parallel.hpp"
#include "dcorr/summation.hpp"

namespace dcorr {

namespace {

inline double euclidean(std::span<const double> u, std::span<const double> v) noexcept
{
    if (u.size() == 1)
        return std::abs(u[0] - v[0]);
    double acc = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double d = u[j] - v[j];
        acc += d * d;
    }
    return std::sqrt(acc);
}

void require_same_n(const Sample& x, const Sample& y)
{
    if (x.n() != y.n())
        throw DimensionError("sample sizes differ: " + std::to_string(x.n()) + " vs " +
                             std::to_string(y.n()));
}

// The V-statistic is a non-negative quadratic form; anything below
// -1e-12 * scale means the accumulation is broken, not rounded.
double clamp_nonnegative(double value, double scale)
{
    if (value < -1e-12 * scale)
        throw std::logic_error("dcov_sq accumulated to " + std::to_string(value) +
                               ", below the round-off floor for scale " +
                               std::to_string(scale));
    return std::max(value, 0.0);
}

// Mean distance from each row to all rows.
std::vector<double> streaming_row_means(const Sample& x, const ComputeOptions& opts)
{
    const std::size_t n = x.n();
    const std::size_t block = std::max<std::size_t>(1, opts.block_rows);
    const std::size_t blocks = (n + block - 1) / block;
    std::vector<double> means(n);
    for_each_block(blocks, opts.threads, [&](std::size_t b) {
        const std::size_t end = std::min(n, (b + 1) * block);
        for (std::size_t k = b * block; k < end; ++k) {
            CompensatedSum s;
            const auto xk = x.row(k);
            for (std::size_t l = 0; l < n; ++l)
                s += euclidean(xk, x.row(l));
            means[k] = s.value() / static_cast<double>(n);
        }
    });
    return means;
}

double grand_mean(const std::vector<double>& row_means)
{
    CompensatedSum s;
    for (double m : row_means)
        s += m;
    return s.value() / static_cast<double>(row_means.size());
}

} // namespace

DistanceMatrix pairwise_distances(const Sample& x)
{
    const std::size_t n = x.n();
    std::vector<double> d(n * n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const auto xk = x.row(k);
        for (std::size_t l = k + 1; l < n; ++l) {
            const double v = euclidean(xk, x.row(l));
            d[k * n + l] = v;
            d[l * n + k] = v;
        }
    }
    return DistanceMatrix(n, std::move(d));
}

CenteredMatrix double_center(const DistanceMatrix& d)
{
    const std::size_t n = d.n();
    const double inv_n = 1.0 / static_cast<double>(n);
    CenteredMatrix c;
    c.n = n;
    c.row_mean.resize(n);
    c.col_mean.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        CompensatedSum s;
        for (std::size_t l = 0; l < n; ++l)
            s += d(k, l);
        c.row_mean[k] = s.value() * inv_n;
    }
    for (std::size_t l = 0; l < n; ++l) {
        CompensatedSum s;
        for (std::size_t k = 0; k < n; ++k)
            s += d(k, l);
        c.col_mean[l] = s.value() * inv_n;
    }
    CompensatedSum g;
    for (double v : d.entries())
        g += v;
    c.grand_mean = g.value() * inv_n * inv_n;

    c.entries.resize(n * n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
            c.entries[k * n + l] = d(k, l) - c.row_mean[k] - c.col_mean[l] + c.grand_mean;
    return c;
}

double dcov_sq_centered(const CenteredMatrix& a, const CenteredMatrix& b,
                        std::span<const std::size_t> perm)
{
    const std::size_t n = a.n;
    CompensatedSum sum;
    CompensatedSum scale;
    for (std::size_t k = 0; k < n; ++k) {
        const double* arow = a.entries.data() + k * n;
        const double* brow = b.entries.data() + perm[k] * n;
        for (std::size_t l = 0; l < n; ++l) {
            const double prod = arow[l] * brow[perm[l]];
            sum += prod;
            scale += std::abs(prod);
        }
    }
    const double nn = static_cast<double>(n) * static_cast<double>(n);
    return clamp_nonnegative(sum.value() / nn, scale.value() / nn);
}

double dcov_sq_centered(const CenteredMatrix& a, const CenteredMatrix& b)
{
    if (a.n != b.n)
        throw DimensionError("centred matrices differ in size");
    std::vector<std::size_t> identity(a.n);
    std::iota(identity.begin(), identity.end(), std::size_t{0});
    return dcov_sq_centered(a, b, identity);
}

double dcov_sq(const Sample& x, const Sample& y)
{
    require_same_n(x, y);
    const CenteredMatrix a = double_center(pairwise_distances(x));
    const CenteredMatrix b = double_center(pairwise_distances(y));
    return dcov_sq_centered(a, b);
}

double dcov_sq_streaming(const Sample& x, const Sample& y, const ComputeOptions& opts)
{
    require_same_n(x, y);
    const std::size_t n = x.n();
    const std::vector<double> ra = streaming_row_means(x, opts);
    const std::vector<double> rb = streaming_row_means(y, opts);
    const double ga = grand_mean(ra);
    const double gb = grand_mean(rb);

    const std::size_t block = std::max<std::size_t>(1, opts.block_rows);
    const std::size_t blocks = (n + block - 1) / block;
    std::vector<CompensatedSum> partial(blocks);
    std::vector<CompensatedSum> partial_scale(blocks);
    for_each_block(blocks, opts.threads, [&](std::size_t b) {
        const std::size_t end = std::min(n, (b + 1) * block);
        CompensatedSum s;
        CompensatedSum sc;
        for (std::size_t k = b * block; k < end; ++k) {
            const auto xk = x.row(k);
            const auto yk = y.row(k);
            const double ca = ga - ra[k];
            const double cb = gb - rb[k];
            for (std::size_t l = 0; l < n; ++l) {
                const double akl = euclidean(xk, x.row(l)) - ra[l] + ca;
                const double bkl = euclidean(yk, y.row(l)) - rb[l] + cb;
                const double prod = akl * bkl;
                s += prod;
                sc += std::abs(prod);
            }
        }
        partial[b] = s;
        partial_scale[b] = sc;
    });

    CompensatedSum sum;
    CompensatedSum scale;
    for (std::size_t b = 0; b < blocks; ++b) {
        sum.add(partial[b]);
        scale.add(partial_scale[b]);
    }
    const double nn = static_cast<double>(n) * static_cast<double>(n);
    return clamp_nonnegative(sum.value() / nn, scale.value() / nn);
}

std::size_t materialized_bytes(std::size_t n) noexcept
{
    return 2 * sizeof(double) * n * n;
}

Strategy resolve_strategy(std::size_t n, const ComputeOptions& opts) noexcept
{
    if (opts.strategy != Strategy::automatic)
        return opts.strategy;
    return materialized_bytes(n) <= opts.memory_budget_bytes ? Strategy::materialized
                                                             : Strategy::streaming;
}

double dcov_sq(const Sample& x, const Sample& y, const ComputeOptions& opts)
{
    require_same_n(x, y);
    if (resolve_strategy(x.n(), opts) == Strategy::materialized)
        return dcov_sq(x, y);
    return dcov_sq_streaming(x, y, opts);
}

PairStats dcor(const Sample& x, const Sample& y, const ComputeOptions& opts)
{
    require_same_n(x, y);
    PairStats st;
    st.n = x.n();
    st.dcov_sq = dcov_sq(x, y, opts);
    st.dvar_x = std::sqrt(dcov_sq(x, x, opts));
    st.dvar_y = std::sqrt(dcov_sq(y, y, opts));
    if (st.dvar_x > 0.0 && st.dvar_y > 0.0)
        st.dcor = std::sqrt(st.dcov_sq) / std::sqrt(st.dvar_x * st.dvar_y);
    if (x.dim() == 1 && y.dim() == 1 && x.n() >= 2) {
        try {
            st.pearson = pearson(x.data(), y.data());
        } catch (const DegenerateVarianceError&) {
            st.pearson.reset();
        }
    }
    return st;
}

double pearson(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size())
        throw DimensionError("pearson: sample sizes differ");
    if (x.size() < 2)
        throw DimensionError("pearson: needs at least 2 observations");
    const auto constant = [](std::span<const double> v) {
        return std::all_of(v.begin(), v.end(), [&](double e) { return e == v[0]; });
    };
    if (constant(x) || constant(y))
        throw DegenerateVarianceError("pearson: constant input has zero variance");

    const double n = static_cast<double>(x.size());
    CompensatedSum sx, sy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx.value() / n;
    const double my = sy.value() / n;
    CompensatedSum sxy, sxx, syy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    const double r = sxy.value() / (std::sqrt(sxx.value()) * std::sqrt(syy.value()));
    return std::clamp(r, -1.0, 1.0);
}

double pearson(const Sample& x, const Sample& y)
{
    if (x.dim() != 1 || y.dim() != 1)
        throw DimensionError("pearson: both samples must be scalar");
    return pearson(x.data(), y.data());
}

} // namespace dcorr
