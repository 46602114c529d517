#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

#include "dcorr/error.hpp"

namespace dcorr {

enum class QuadratureRule {
    gauss_kronrod_15, // 15-point Kronrod extension of 7-point Gauss, per panel
};

QuadratureRule parse_quadrature_rule(std::string_view name);
std::string_view to_string(QuadratureRule rule) noexcept;

/// Truncated-domain quadrature settings. The integration domain is
/// |s| <= truncation_radius on each axis, split into panel_count panels
/// per axis; panels are doubled until the error estimate meets
/// tolerance * |value| or max_panels would be exceeded.
struct QuadratureSpec {
    double truncation_radius = 2000.0;
    std::size_t panel_count = 4096;
    QuadratureRule rule = QuadratureRule::gauss_kronrod_15;
    double tolerance = 1e-2;
    std::size_t max_panels = std::size_t{1} << 18;

    /// Throws DomainError when an invariant is violated.
    void validate() const;
};

struct IntegralEstimate {
    double value = 0.0;
    /// discretization_error + tail_bound (+ any analytic remainder bound).
    double error_estimate = 0.0;
    double discretization_error = 0.0;
    double tail_bound = 0.0;
    std::size_t panels = 0;
    bool converged = false;
};

/// Raised when the requested tolerance cannot be met within the panel
/// budget. Carries the best estimate obtained.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, IntegralEstimate best)
        : Error(what), best_(best)
    {
    }
    const IntegralEstimate& best() const noexcept { return best_; }

private:
    IntegralEstimate best_;
};

/// Nodes and weights of the 15-point Gauss-Kronrod rule on [-1, 1].
/// gauss_weight is zero at the Kronrod-only nodes.
struct KronrodNode {
    double abscissa;
    double kronrod_weight;
    double gauss_weight;
};
const std::array<KronrodNode, 15>& gauss_kronrod_15() noexcept;

struct PanelResult {
    double kronrod = 0.0;
    double gauss = 0.0;
};

/// Applies the Gauss-Kronrod pair to f on [a, b]. No node touches an endpoint.
template <class F>
PanelResult integrate_panel(F&& f, double a, double b)
{
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    PanelResult r;
    for (const auto& node : gauss_kronrod_15()) {
        const double v = f(mid + half * node.abscissa);
        r.kronrod += node.kronrod_weight * v;
        r.gauss += node.gauss_weight * v;
    }
    r.kronrod *= half;
    r.gauss *= half;
    return r;
}

} // namespace dcorr
