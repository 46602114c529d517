#include "dcorr/quadrature.hpp"

#include <cmath>

namespace dcorr {

namespace {

// QUADPACK qk15 abscissae and weights.
constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
};
constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
// Gauss weights for xgk[1], xgk[3], xgk[5], xgk[7].
constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
};

std::array<KronrodNode, 15> build_nodes()
{
    std::array<KronrodNode, 15> nodes{};
    std::size_t i = 0;
    for (int j = 0; j < 7; ++j) {
        const double g = (j % 2 == 1) ? wg[j / 2] : 0.0;
        nodes[i++] = {-xgk[j], wgk[j], g};
        nodes[i++] = {xgk[j], wgk[j], g};
    }
    nodes[i] = {0.0, wgk[7], wg[3]};
    return nodes;
}

} // namespace

const std::array<KronrodNode, 15>& gauss_kronrod_15() noexcept
{
    static const std::array<KronrodNode, 15> nodes = build_nodes();
    return nodes;
}

QuadratureRule parse_quadrature_rule(std::string_view name)
{
    if (name == "gk15")
        return QuadratureRule::gauss_kronrod_15;
    throw DomainError("unknown quadrature rule '" + std::string(name) + "' (known: gk15)");
}

std::string_view to_string(QuadratureRule rule) noexcept
{
    switch (rule) {
    case QuadratureRule::gauss_kronrod_15:
        return "gk15";
    }
    return "unknown";
}

void QuadratureSpec::validate() const
{
    if (!(truncation_radius > 0.0) || !std::isfinite(truncation_radius))
        throw DomainError("quadrature truncation radius must be positive and finite");
    if (panel_count < 2)
        throw DomainError("quadrature needs at least 2 panels per axis");
    if (!(tolerance > 0.0))
        throw DomainError("quadrature tolerance must be positive");
    if (max_panels < panel_count)
        throw DomainError("quadrature panel budget is smaller than the initial panel count");
}

} // namespace dcorr
