// SPDX-License-Identifier: Apache-2.0
#include "opgen/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace opgen {

Grid::Grid(std::size_t resolution, bool includes_boundary) : s_(resolution), boundary_(includes_boundary) {
    if (resolution < 3) throw std::invalid_argument("grid resolution must be >= 3");
}

double Grid::coord(std::size_t k) const {
    if (k >= points()) throw std::out_of_range("grid coordinate index out of range");
    if (boundary_) {
        if (k == s_ - 1) return 1.0;
        return double(k) / double(s_ - 1);
    }
    return double(k + 1) / double(s_);
}

std::vector<double> Grid::coords() const {
    std::vector<double> out(points());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = coord(k);
    return out;
}

Grid Grid::refined() const {
    if (!boundary_) return Grid(2 * s_, false);
    return Grid(2 * s_ - 1, true);
}

std::string_view to_string(OodRhs name) {
    return name == OodRhs::LinearDiff ? "linear_diff" : "corner_abs";
}

OodRhs parse_ood_rhs(std::string_view name) {
    if (name == "linear_diff") return OodRhs::LinearDiff;
    if (name == "corner_abs") return OodRhs::CornerAbs;
    throw std::invalid_argument("unknown out-of-distribution rhs '" + std::string(name) + "'");
}

double eval_ood_rhs(OodRhs name, double x, double y) {
    switch (name) {
        case OodRhs::LinearDiff:
            return x - y;
        case OodRhs::CornerAbs:
            return std::abs(x - 0.5) * std::abs(y - 0.5);
    }
    throw std::logic_error("unreachable ood rhs");
}

std::vector<double> ood_rhs(OodRhs name, const Grid& grid) {
    const auto xs = grid.coords();
    std::vector<double> f(xs.size() * xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = 0; j < xs.size(); ++j) f[i * xs.size() + j] = eval_ood_rhs(name, xs[i], xs[j]);
    }
    return f;
}

}  // namespace opgen
