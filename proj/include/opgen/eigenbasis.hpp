// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string_view>

namespace opgen {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Homogeneous boundary condition on the unit square. Dirichlet selects the
/// sine eigenfunctions, Neumann the cosine eigenfunctions.
enum class BoundaryCondition { Dirichlet, Neumann };

std::string_view to_string(BoundaryCondition bc);
BoundaryCondition parse_boundary_condition(std::string_view name);

/// Laplacian eigenmode (i, j) on (0,1)^2. Zero modes are not representable.
class ModeIndex {
public:
    ModeIndex(int i, int j) : i_(i), j_(j) {
        if (i < 1 || j < 1) {
            throw std::invalid_argument("mode indices must be >= 1");
        }
    }

    int i() const { return i_; }
    int j() const { return j_; }

    friend bool operator==(const ModeIndex&, const ModeIndex&) = default;

private:
    int i_;
    int j_;
};

/// Function value and partial derivatives up to second order at one point.
struct BasisValue {
    double u = 0.0;
    double ux = 0.0;
    double uy = 0.0;
    double uxx = 0.0;
    double uyy = 0.0;
    double uxy = 0.0;

    BasisValue& operator+=(const BasisValue& o) {
        u += o.u;
        ux += o.ux;
        uy += o.uy;
        uxx += o.uxx;
        uyy += o.uyy;
        uxy += o.uxy;
        return *this;
    }

    BasisValue scaled(double s) const { return {s * u, s * ux, s * uy, s * uxx, s * uyy, s * uxy}; }
};

/// lambda_ij = (i pi)^2 + (j pi)^2, shared by the Dirichlet and Neumann families.
double eigenvalue(ModeIndex idx);

/// sin(n pi t), exactly zero at t = 0 and t = 1.
double sin_pi(int n, double t);
/// cos(n pi t), exactly 1 at t = 0 and exactly (-1)^n at t = 1.
double cos_pi(int n, double t);

/// One-dimensional factor of a separable eigenfunction together with its
/// first two derivatives: sin(n pi t) for Dirichlet, cos(n pi t) for Neumann.
struct AxisFactor {
    double value;
    double d1;
    double d2;
};

AxisFactor axis_factor(BoundaryCondition bc, int n, double t);

/// Normalized basis function sin(i pi x) sin(j pi y) / sqrt(lambda_ij)
/// (Dirichlet) or cos(i pi x) cos(j pi y) / sqrt(lambda_ij) (Neumann), with
/// all partials up to second order. These functions are orthonormal in the
/// gradient inner product on H^1_0 (resp. the mean-zero subspace of H^1).
///
/// Dirichlet values are exactly zero on the boundary of the square.
BasisValue eval_basis(ModeIndex idx, BoundaryCondition bc, double x, double y);

}  // namespace opgen
