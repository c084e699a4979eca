// SPDX-License-Identifier: Apache-2.0
#include "opgen/eigenbasis.hpp"

#include <cmath>
#include <string>

namespace opgen {

std::string_view to_string(BoundaryCondition bc) {
    return bc == BoundaryCondition::Dirichlet ? "dirichlet" : "neumann";
}

BoundaryCondition parse_boundary_condition(std::string_view name) {
    if (name == "dirichlet") return BoundaryCondition::Dirichlet;
    if (name == "neumann") return BoundaryCondition::Neumann;
    throw std::invalid_argument("unknown boundary condition '" + std::string(name) + "'");
}

double eigenvalue(ModeIndex idx) {
    const double pi_i = idx.i() * kPi;
    const double pi_j = idx.j() * kPi;
    return pi_i * pi_i + pi_j * pi_j;
}

double sin_pi(int n, double t) {
    if (t == 0.0 || t == 1.0) return 0.0;
    return std::sin(n * kPi * t);
}

double cos_pi(int n, double t) {
    if (t == 0.0) return 1.0;
    if (t == 1.0) return (n % 2 == 0) ? 1.0 : -1.0;
    return std::cos(n * kPi * t);
}

AxisFactor axis_factor(BoundaryCondition bc, int n, double t) {
    const double k = n * kPi;
    const double s = sin_pi(n, t);
    const double c = cos_pi(n, t);
    if (bc == BoundaryCondition::Dirichlet) {
        return {s, k * c, -k * k * s};
    }
    return {c, -k * s, -k * k * c};
}

BasisValue eval_basis(ModeIndex idx, BoundaryCondition bc, double x, double y) {
    const AxisFactor fx = axis_factor(bc, idx.i(), x);
    const AxisFactor fy = axis_factor(bc, idx.j(), y);
    const double norm = 1.0 / std::sqrt(eigenvalue(idx));
    return {
        norm * fx.value * fy.value,
        norm * fx.d1 * fy.value,
        norm * fx.value * fy.d1,
        norm * fx.d2 * fy.value,
        norm * fx.value * fy.d2,
        norm * fx.d1 * fy.d1,
    };
}

}  // namespace opgen
