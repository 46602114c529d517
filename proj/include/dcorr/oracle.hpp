#pragma once

#include <complex>
#include <span>
#include <vector>

#include "dcorr/quadrature.hpp"
#include "dcorr/sample.hpp"

namespace dcorr {

// Reference computations of the squared distance covariance that share
// no distance or centring code with core_stats.

struct FrequencyPoint {
    std::vector<double> s; // dimension of x
    std::vector<double> t; // dimension of y
};

/// Joint empirical characteristic function (1/N) sum_j exp(i<s,X_j> + i<t,Y_j>).
std::complex<double> ecf_joint(const Sample& x, const Sample& y, const FrequencyPoint& f);

/// Marginal (1/N) sum_j exp(i<s,X_j>); equal to ecf_joint with t = 0.
std::complex<double> ecf_marginal(const Sample& x, std::span<const double> s);

/// Weighted integrand |phi_XY(s,t) - phi_X(s) phi_Y(t)|^2 / (c_1^2 s^2 t^2) for
/// scalar samples. Evaluated through centred phases e^{isx_j} - phi_X(s), each
/// built from 2i sin(s(x_j - x_k)/2) terms, so the value keeps full relative
/// precision as s, t -> 0.
double dcov_integrand(const Sample& x, const Sample& y, double s, double t);

/// Tensor-product Gauss-Kronrod quadrature of the integrand above over
/// [-T, T]^2. Uses Cauchy-Schwarz,
///   |phi_XY - phi_X phi_Y|^2 <= (1 - |phi_X|^2)(1 - |phi_Y|^2),
/// together with int_R (1 - cos(t d)) / t^2 dt = pi |d| to bound the mass
/// outside the square. Scalar samples only.
/// Throws ConvergenceError if the tolerance is not met within max_panels.
IntegralEstimate dcov_sq_via_integral(const Sample& x, const Sample& y,
                                      const QuadratureSpec& spec = {});

/// S1 + S2 - 2 S3 with
///   S1 = (1/N^2) sum_kl a_kl b_kl,  S2 = a.. b..,  S3 = (1/N^3) sum_klm a_kl b_km,
/// by direct triple loops in extended precision.
double dcov_sq_oracle_sums(const Sample& x, const Sample& y);

} // namespace dcorr
