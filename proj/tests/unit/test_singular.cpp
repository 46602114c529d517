#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dcorr/error.hpp"
#include "dcorr/singular.hpp"
#include "fixtures.hpp"

using namespace dcorr;
using fixtures::rel_diff;

TEST_SUITE("singular") {

TEST_CASE("c_p anchor values")
{
    constexpr double pi = std::numbers::pi;
    CHECK(rel_diff(c_p(1), pi) <= 1e-15);
    CHECK(rel_diff(c_p(2), 2.0 * pi) <= 1e-15);
    CHECK(rel_diff(c_p(3), pi * pi) <= 1e-15);
    CHECK(rel_diff(c_p(5), pi * pi * pi / 2.0) <= 1e-15);
    CHECK_THROWS_AS(c_p(0), DomainError);
    CHECK_THROWS_AS(c_p(-3), DomainError);
    CHECK(std::isfinite(c_p(200)));
}

TEST_CASE("c_p matches the gamma-function definition")
{
    for (int p = 1; p <= 10; ++p) {
        const double direct = std::pow(std::numbers::pi, (p + 1) / 2.0) / std::tgamma((p + 1) / 2.0);
        CHECK(rel_diff(c_p(p), direct) <= 1e-14);
    }
}

TEST_CASE("singular constant at alpha = 1 equals c_p")
{
    for (int p = 1; p <= 10; ++p)
        CHECK(rel_diff(singular_constant(p, 1.0), c_p(p)) <= 1e-12);
}

TEST_CASE("singular constant domain")
{
    CHECK_THROWS_AS(singular_constant(1, 0.0), DomainError);
    CHECK_THROWS_AS(singular_constant(1, 2.0), DomainError);
    CHECK_THROWS_AS(singular_constant(1, -0.5), DomainError);
    CHECK_THROWS_AS(singular_constant(0, 1.0), DomainError);
    CHECK_THROWS_AS(singular_constant(1, std::nan("")), DomainError);
    CHECK(singular_constant(1, 1e-3) > 0.0);
    CHECK(singular_constant(1, 1.999) > 0.0);
}

TEST_CASE("log_gamma_signed")
{
    CHECK(log_gamma_signed(5.0).log_abs == doctest::Approx(std::log(24.0)));
    CHECK(log_gamma_signed(5.0).sign == 1);
    CHECK(log_gamma_signed(-0.5).sign == -1);
    CHECK(log_gamma_signed(-0.5).log_abs == doctest::Approx(std::log(2.0 * std::sqrt(std::numbers::pi))));
    CHECK_THROWS_AS(log_gamma_signed(0.0), DomainError);
    CHECK_THROWS_AS(log_gamma_signed(-2.0), DomainError);
}

TEST_CASE("integrand is even, non-negative and vanishes at x = 0")
{
    CounterRng rng(31, 0);
    for (int i = 0; i < 200; ++i) {
        const double s = 5.0 * rng.normal();
        const double x = 3.0 * rng.normal();
        const double a = rng.uniform(0.05, 1.95);
        const double v = singular_integrand(s, x, a);
        CHECK(v >= 0.0);
        CHECK(v == singular_integrand(-s, x, a));
        CHECK(v == singular_integrand(s, -x, a));
        CHECK(singular_integrand(s, 0.0, a) == 0.0);
    }
}

TEST_CASE("numeric integral matches the closed form")
{
    for (double alpha : {0.5, 1.0, 1.5})
        for (double x : {0.5, 1.0, 2.0}) {
            CAPTURE(alpha);
            CAPTURE(x);
            const auto r = verify_singular_integral({1, alpha, {x}});
            CHECK(r.converged);
            CHECK(rel_diff(r.numeric, r.closed_form) <= 1e-6);
            CHECK(std::abs(r.numeric - r.closed_form) <= std::max(3.0 * r.error_estimate, 1e-12));
        }
}

TEST_CASE("numeric integral at x = 0 is exactly zero")
{
    const auto r = verify_singular_integral({1, 0.7, {0.0}});
    CHECK(r.numeric == 0.0);
    CHECK(r.closed_form == 0.0);
    CHECK(r.converged);
}

TEST_CASE("homogeneity, evenness and monotonicity in |x|")
{
    const double alpha = 0.8;
    const double base = verify_singular_integral({1, alpha, {1.0}}).numeric;
    const double scaled = verify_singular_integral({1, alpha, {3.0}}).numeric;
    CHECK(rel_diff(scaled, std::pow(3.0, alpha) * base) <= 1e-6);
    CHECK(rel_diff(verify_singular_integral({1, alpha, {-3.0}}).numeric, scaled) <= 1e-12);

    double prev = 0.0;
    for (double x : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        const double v = verify_singular_integral({1, alpha, {x}}).numeric;
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("input validation")
{
    CHECK_THROWS_AS(verify_singular_integral({2, 1.0, {1.0, 0.0}}), DomainError);
    CHECK_THROWS_AS(verify_singular_integral({1, 1.0, {1.0, 2.0}}), DimensionError);
    CHECK_THROWS_AS(verify_singular_integral({1, 2.5, {1.0}}), DomainError);
    CHECK_THROWS_AS(verify_singular_integral({1, 1.0, {INFINITY}}), DomainError);
}

TEST_CASE("tight budgets report non-convergence")
{
    QuadratureSpec spec = singular_quadrature_defaults();
    spec.truncation_radius = 10.0;
    spec.panel_count = 4;
    spec.max_panels = 8;
    spec.tolerance = 1e-12;
    CHECK_THROWS_AS(verify_singular_integral({1, 1.0, {1.0}}, spec), ConvergenceError);
}

} // TEST_SUITE
