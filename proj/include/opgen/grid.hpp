// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace opgen {

/// Uniform tensor grid on [0,1]^2.
///
/// With boundary points the axis holds S nodes x_k = k/(S-1), k = 0..S-1.
/// Without them it holds the S-1 interior nodes x_k = k/S, k = 1..S-1 (the
/// node set of the discrete sine transform).
class Grid {
public:
    explicit Grid(std::size_t resolution, bool includes_boundary = true);

    std::size_t resolution() const { return s_; }
    bool includes_boundary() const { return boundary_; }

    /// Nodes per axis.
    std::size_t points() const { return boundary_ ? s_ : s_ - 1; }
    double spacing() const { return boundary_ ? 1.0 / double(s_ - 1) : 1.0 / double(s_); }
    double coord(std::size_t k) const;
    std::vector<double> coords() const;

    /// The grid with 2S-1 nodes whose even-indexed nodes coincide with this one.
    Grid refined() const;

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t s_;
    bool boundary_;
};

/// Closed-form right-hand sides outside the trigonometric training family.
enum class OodRhs {
    LinearDiff,  ///< f = x - y
    CornerAbs,   ///< f = |x - 0.5| |y - 0.5|
};

std::string_view to_string(OodRhs name);
OodRhs parse_ood_rhs(std::string_view name);

double eval_ood_rhs(OodRhs name, double x, double y);

/// Row-major, x index slowest.
std::vector<double> ood_rhs(OodRhs name, const Grid& grid);

}  // namespace opgen
