#include "dcorr/singular.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "dcorr/error.hpp"

namespace dcorr {

namespace {

constexpr int kCachedDims = 64;

// Geometric levels between the origin cutoff and the first uniform panel.
constexpr int kGradedLevels = 60;

double c_p_uncached(int p)
{
    const double half = 0.5 * (p + 1);
    const auto lg = log_gamma_signed(half);
    return lg.sign * std::exp(half * std::log(std::numbers::pi) - lg.log_abs);
}

} // namespace

SignedLogGamma log_gamma_signed(double x)
{
    if (!std::isfinite(x))
        throw DomainError("log-gamma of a non-finite argument");
    if (x <= 0.0 && x == std::floor(x))
        throw DomainError("Gamma has a pole at " + std::to_string(x));
    int sign = 1;
#if defined(__GLIBC__)
    const double value = ::lgamma_r(x, &sign);
#else
    const double value = std::lgamma(x);
    if (x < 0.0)
        sign = (static_cast<long long>(std::floor(x)) % 2 == 0) ? 1 : -1;
#endif
    return {value, sign};
}

double c_p(int p)
{
    if (p <= 0)
        throw DomainError("c_p requires p >= 1, got " + std::to_string(p));
    static const std::array<double, kCachedDims + 1> cache = [] {
        std::array<double, kCachedDims + 1> c{};
        for (int q = 1; q <= kCachedDims; ++q)
            c[q] = c_p_uncached(q);
        return c;
    }();
    return p <= kCachedDims ? cache[p] : c_p_uncached(p);
}

double singular_constant(int p, double alpha)
{
    if (p <= 0)
        throw DomainError("singular constant requires p >= 1, got " + std::to_string(p));
    if (!(alpha > 0.0 && alpha < 2.0))
        throw DomainError("alpha must lie strictly inside (0, 2), got " + std::to_string(alpha) +
                          ": the integral diverges at infinity for alpha <= 0 and at the "
                          "origin for alpha >= 2, where Gamma(1 - alpha/2) has its pole");
    const auto num = log_gamma_signed(1.0 - 0.5 * alpha);
    const auto den = log_gamma_signed(0.5 * (p + alpha));
    const double log_c = std::log(2.0) + 0.5 * p * std::log(std::numbers::pi) + num.log_abs -
                         std::log(alpha) - alpha * std::log(2.0) - den.log_abs;
    return num.sign * den.sign * std::exp(log_c);
}

double singular_integrand(double s, double x, double alpha) noexcept
{
    const double h = std::sin(0.5 * s * x);
    return 2.0 * h * h / std::pow(std::abs(s), 1.0 + alpha);
}

QuadratureSpec singular_quadrature_defaults()
{
    QuadratureSpec spec;
    spec.truncation_radius = 1e4;
    spec.panel_count = 8192;
    spec.tolerance = 1e-6;
    return spec;
}

SingularVerification verify_singular_integral(const SingularParams& params,
                                              const QuadratureSpec& spec)
{
    spec.validate();
    if (params.p != 1)
        throw DomainError("singular-integral quadrature is implemented for p = 1 only");
    if (params.x.size() != 1)
        throw DimensionError("x must have exactly p = 1 coordinate");
    if (!std::isfinite(params.x[0]))
        throw DomainError("x must be finite");
    const double alpha = params.alpha;
    SingularVerification out;
    out.closed_form = singular_constant(1, alpha) * std::pow(std::abs(params.x[0]), alpha);

    const double r = std::abs(params.x[0]);
    if (r == 0.0) {
        out.converged = true;
        return out;
    }

    const double big_t = spec.truncation_radius;
    const auto f = [&](double s) { return singular_integrand(s, r, alpha); };

    // Below h the integrand behaves like r^2 s^{1-alpha} / 2; above it oscillates.
    const double h = std::min(1.0 / r, big_t);
    const double eps = std::ldexp(h, -kGradedLevels);

    // [0, eps]: leading term of 2 sin^2(s r / 2) = r^2 s^2 / 2 - r^4 s^4 / 24 + ...
    // The series alternates, so the next term bounds the remainder.
    const double origin = r * r * std::pow(eps, 2.0 - alpha) / (2.0 * (2.0 - alpha));
    const double origin_err = std::pow(r, 4) * std::pow(eps, 4.0 - alpha) / (24.0 * (4.0 - alpha));

    double graded = 0.0;
    double graded_err = 0.0;
    for (int k = 0; k < kGradedLevels; ++k) {
        const double hi = std::ldexp(h, -k);
        const auto pr = integrate_panel(f, 0.5 * hi, hi);
        graded += pr.kronrod;
        graded_err += std::abs(pr.kronrod - pr.gauss);
    }

    // Beyond T: int_T^inf s^{-1-alpha} ds is exact; the cosine part is
    // integrated by parts once, leaving a remainder bounded by
    // 2 (1 + alpha) / (r^2 T^{2+alpha}).
    double tail = 0.0;
    double tail_err = 0.0;
    if (h < big_t) {
        const double beta = 1.0 + alpha;
        tail = std::pow(big_t, -alpha) / alpha + std::sin(big_t * r) / (r * std::pow(big_t, beta));
        tail_err = 2.0 * beta / (r * r * std::pow(big_t, beta + 1.0));
    }

    std::size_t panels = spec.panel_count;
    IntegralEstimate best;
    for (;;) {
        double uniform = 0.0;
        double uniform_err = 0.0;
        if (h < big_t) {
            const double width = (big_t - h) / static_cast<double>(panels);
            for (std::size_t i = 0; i < panels; ++i) {
                const double a = h + width * static_cast<double>(i);
                const auto pr = integrate_panel(f, a, a + width);
                uniform += pr.kronrod;
                uniform_err += std::abs(pr.kronrod - pr.gauss);
            }
        }
        // The integrand is even: the full line is twice the half line.
        best.value = 2.0 * (origin + graded + uniform + tail);
        best.discretization_error = 2.0 * (graded_err + uniform_err);
        best.tail_bound = 2.0 * (tail_err + origin_err);
        best.error_estimate = best.discretization_error + best.tail_bound;
        best.panels = panels;
        const double budget = spec.tolerance * std::abs(best.value);
        best.converged = best.error_estimate <= budget;
        if (best.converged || best.tail_bound >= budget || 2 * panels > spec.max_panels)
            break;
        panels *= 2;
    }

    out.numeric = best.value;
    out.error_estimate = best.error_estimate;
    out.panels = best.panels;
    out.converged = best.converged;
    if (!best.converged)
        throw ConvergenceError("singular integral: error estimate " +
                                   std::to_string(best.error_estimate) + " misses tolerance " +
                                   std::to_string(spec.tolerance) + " within " +
                                   std::to_string(spec.max_panels) + " panels",
                               best);
    return out;
}

} // namespace dcorr
