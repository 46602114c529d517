#include "dcorr/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dcorr/error.hpp"
#include "dcorr/parallel.hpp"
#include "dcorr/singular.hpp"

namespace dcorr {

namespace {

using cplx = std::complex<double>;

constexpr std::size_t kPanelBlocks = 64;

double dot(std::span<const double> a, std::span<const double> b) noexcept
{
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += a[i] * b[i];
    return acc;
}

template <class Phase>
cplx ecf_sum(std::size_t n, Phase&& phase)
{
    double re = 0.0;
    double im = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double p = phase(j);
        re += std::cos(p);
        im += std::sin(p);
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    return {re * inv_n, im * inv_n};
}

void require_scalar_pair(const Sample& x, const Sample& y)
{
    if (x.n() != y.n())
        throw DimensionError("sample sizes differ: " + std::to_string(x.n()) + " vs " +
                             std::to_string(y.n()));
    if (x.dim() != 1 || y.dim() != 1)
        throw DimensionError("characteristic-function quadrature supports scalar samples only");
}

// u_j = e^{i s x_j} - phi_X(s) = (1/N) sum_k 2i sin(s (x_j - x_k) / 2) e^{i s (x_j + x_k) / 2}.
// Every term is O(s), so nothing cancels near s = 0.
void centred_phases(std::span<const double> x, double s, std::span<cplx> out)
{
    const std::size_t n = x.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
        double re = 0.0;
        double im = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double amp = 2.0 * std::sin(0.5 * s * (x[j] - x[k]));
            const double mid = 0.5 * s * (x[j] + x[k]);
            // 2i sin(.) * (cos(mid) + i sin(mid))
            re -= amp * std::sin(mid);
            im += amp * std::cos(mid);
        }
        out[j] = {re * inv_n, im * inv_n};
    }
}

// Hermitian N x N moments  M_jk = int u_j(s) conj(u_k(s)) / s^2 ds  over [-T, T],
// under both members of the Gauss-Kronrod pair.
struct AxisMoments {
    std::vector<cplx> kronrod;
    std::vector<cplx> gauss;
};

AxisMoments axis_moments(std::span<const double> x, double big_t, std::size_t panels_per_side)
{
    const std::size_t n = x.size();
    const std::size_t total_panels = 2 * panels_per_side;
    const double width = big_t / static_cast<double>(panels_per_side);
    const std::size_t blocks = std::min(kPanelBlocks, total_panels);
    const std::size_t per_block = (total_panels + blocks - 1) / blocks;

    std::vector<AxisMoments> partial(blocks);
    for_each_block(blocks, 0, [&](std::size_t b) {
        AxisMoments& acc = partial[b];
        acc.kronrod.assign(n * n, cplx{});
        acc.gauss.assign(n * n, cplx{});
        std::vector<cplx> u(n);
        const std::size_t first = b * per_block;
        const std::size_t last = std::min(total_panels, first + per_block);
        for (std::size_t p = first; p < last; ++p) {
            // Panels [-T, 0] then [0, T]; s = 0 is only ever an endpoint.
            const double a = -big_t + width * static_cast<double>(p);
            const double half = 0.5 * width;
            const double mid = a + half;
            for (const auto& node : gauss_kronrod_15()) {
                const double s = mid + half * node.abscissa;
                centred_phases(x, s, u);
                const double scale = half / (s * s);
                const double wk = node.kronrod_weight * scale;
                const double wg = node.gauss_weight * scale;
                for (std::size_t j = 0; j < n; ++j)
                    for (std::size_t k = 0; k < n; ++k) {
                        const cplx v = u[j] * std::conj(u[k]);
                        acc.kronrod[j * n + k] += wk * v;
                        if (wg != 0.0)
                            acc.gauss[j * n + k] += wg * v;
                    }
            }
        }
    });

    AxisMoments out{std::vector<cplx>(n * n), std::vector<cplx>(n * n)};
    for (const auto& pb : partial)
        for (std::size_t i = 0; i < n * n; ++i) {
            out.kronrod[i] += pb.kronrod[i];
            out.gauss[i] += pb.gauss[i];
        }
    return out;
}

double contract(const std::vector<cplx>& f, const std::vector<cplx>& g, std::size_t n)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        acc += (f[i] * g[i]).real();
    return acc / (static_cast<double>(n) * static_cast<double>(n));
}

double mean_abs_difference(std::span<const double> x)
{
    double acc = 0.0;
    for (double a : x)
        for (double b : x)
            acc += std::abs(a - b);
    return acc / (static_cast<double>(x.size()) * static_cast<double>(x.size()));
}

} // namespace

std::complex<double> ecf_joint(const Sample& x, const Sample& y, const FrequencyPoint& f)
{
    if (x.n() != y.n())
        throw DimensionError("ecf_joint: sample sizes differ");
    if (f.s.size() != x.dim() || f.t.size() != y.dim())
        throw DimensionError("ecf_joint: frequency dimensions do not match the samples");
    return ecf_sum(x.n(), [&](std::size_t j) { return dot(f.s, x.row(j)) + dot(f.t, y.row(j)); });
}

std::complex<double> ecf_marginal(const Sample& x, std::span<const double> s)
{
    if (s.size() != x.dim())
        throw DimensionError("ecf_marginal: frequency dimension does not match the sample");
    return ecf_sum(x.n(), [&](std::size_t j) { return dot(s, x.row(j)); });
}

double dcov_integrand(const Sample& x, const Sample& y, double s, double t)
{
    require_scalar_pair(x, y);
    const std::size_t n = x.n();
    std::vector<cplx> u(n), v(n);
    centred_phases(x.data(), s, u);
    centred_phases(y.data(), t, v);
    cplx acc{};
    for (std::size_t j = 0; j < n; ++j)
        acc += u[j] * v[j];
    acc /= static_cast<double>(n);
    const double c1 = c_p(1);
    return std::norm(acc) / (c1 * c1 * s * s * t * t);
}

IntegralEstimate dcov_sq_via_integral(const Sample& x, const Sample& y, const QuadratureSpec& spec)
{
    require_scalar_pair(x, y);
    spec.validate();
    const std::size_t n = x.n();
    const double c1 = c_p(1);
    const double norm = c1 * c1;
    const double big_t = spec.truncation_radius;

    // Mass outside [-T, T]^2 lies in the strips |s| > T or |t| > T. On the
    // s-strip the integrand is at most (1 - |phi_X|^2)/s^2 * (1 - |phi_Y|^2)/t^2;
    // the s-factor integrates to <= min(2/T, pi m_x), the t-factor to pi m_y,
    // where m is the mean absolute pairwise difference.
    const double mx = mean_abs_difference(x.data());
    const double my = mean_abs_difference(y.data());
    const double pi = std::numbers::pi;
    const double tail = (std::min(2.0 / big_t, pi * mx) * pi * my +
                         std::min(2.0 / big_t, pi * my) * pi * mx) /
                        norm;

    std::size_t panels = spec.panel_count;
    IntegralEstimate best;
    for (;;) {
        const std::size_t per_side = (panels + 1) / 2;
        const AxisMoments fs = axis_moments(x.data(), big_t, per_side);
        const AxisMoments ft = axis_moments(y.data(), big_t, per_side);
        const double vk = contract(fs.kronrod, ft.kronrod, n) / norm;
        const double vg = contract(fs.gauss, ft.gauss, n) / norm;

        best.value = vk;
        best.discretization_error = std::abs(vk - vg);
        best.tail_bound = tail;
        best.error_estimate = best.discretization_error + tail;
        best.panels = 2 * per_side;
        const double budget = spec.tolerance * std::abs(vk);
        best.converged = best.error_estimate <= budget;
        if (best.converged || tail >= budget || 2 * panels > spec.max_panels)
            break;
        panels *= 2;
    }
    if (!best.converged)
        throw ConvergenceError("characteristic-function quadrature: error estimate " +
                                   std::to_string(best.error_estimate) + " misses tolerance " +
                                   std::to_string(spec.tolerance) + " (tail bound " +
                                   std::to_string(best.tail_bound) + ", " +
                                   std::to_string(best.panels) + " panels)",
                               best);
    return best;
}

double dcov_sq_oracle_sums(const Sample& x, const Sample& y)
{
    if (x.n() != y.n())
        throw DimensionError("sample sizes differ: " + std::to_string(x.n()) + " vs " +
                             std::to_string(y.n()));
    const std::size_t n = x.n();
    const auto dist = [](const Sample& s, std::size_t k, std::size_t l) {
        long double acc = 0.0L;
        for (std::size_t j = 0; j < s.dim(); ++j) {
            const long double d = static_cast<long double>(s(k, j)) - s(l, j);
            acc += d * d;
        }
        return std::sqrt(acc);
    };
    std::vector<long double> a(n * n), b(n * n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
            a[k * n + l] = dist(x, k, l);
            b[k * n + l] = dist(y, k, l);
        }

    long double s1 = 0.0L, sa = 0.0L, sb = 0.0L, s3 = 0.0L;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
            s1 += a[k * n + l] * b[k * n + l];
            sa += a[k * n + l];
            sb += b[k * n + l];
        }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
            for (std::size_t m = 0; m < n; ++m)
                s3 += a[k * n + l] * b[k * n + m];

    const long double nn = static_cast<long double>(n) * n;
    const long double result = s1 / nn + (sa / nn) * (sb / nn) - 2.0L * s3 / (nn * n);
    return static_cast<double>(result);
}

} // namespace dcorr
