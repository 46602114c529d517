#pragma once

#include <cstddef>
#include <vector>

#include "dcorr/quadrature.hpp"

namespace dcorr {

struct SignedLogGamma {
    double log_abs; // log |Gamma(x)|
    int sign;       // sign of Gamma(x)
};

/// Thread-safe log-gamma with sign; throws DomainError at the poles.
SignedLogGamma log_gamma_signed(double x);

/// Normalizing constant pi^{(p+1)/2} / Gamma((p+1)/2) of the distance
/// covariance weight |s|^{-(p+1)}. Cached for p <= 64.
double c_p(int p);

/// C(p, alpha) in  int_{R^p} (1 - e^{i<s,x>}) / |s|^{p+alpha} ds = C(p, alpha) |x|^alpha,
/// valid for 0 < alpha < 2. C(p, 1) == c_p(p).
double singular_constant(int p, double alpha);

struct SingularParams {
    int p = 1;
    double alpha = 1.0;
    std::vector<double> x;
};

struct SingularVerification {
    double numeric = 0.0;
    double closed_form = 0.0;
    double error_estimate = 0.0;
    std::size_t panels = 0;
    bool converged = false;
};

/// (1 - cos(s x)) / |s|^{1+alpha}, evaluated as 2 sin^2(s x / 2) / |s|^{1+alpha}.
double singular_integrand(double s, double x, double alpha) noexcept;

/// Default settings for verify_singular_integral: the integrand decays
/// fast enough that a 1e-6 target is cheap.
QuadratureSpec singular_quadrature_defaults();

/// Integrates (1 - cos(s x)) / |s|^{1+alpha} over the real line (p = 1 only)
/// and compares it with singular_constant(1, alpha) |x|^alpha.
/// Throws ConvergenceError when the error estimate misses the tolerance.
SingularVerification verify_singular_integral(const SingularParams& params,
                                              const QuadratureSpec& spec = singular_quadrature_defaults());

} // namespace dcorr
