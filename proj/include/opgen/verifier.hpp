// SPDX-License-Identifier: Apache-2.0
#pragma once

// Independent checks of generated data. Nothing here calls the analytic
// differentiation in pde_operators: residuals come from finite differences
// of u, and the Poisson inverse is a discrete sine transform.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "opgen/dataset.hpp"
#include "opgen/field_sampler.hpp"
#include "opgen/grid.hpp"
#include "opgen/pde_operators.hpp"

namespace opgen::verify {

/// Second-order finite-difference application of `op` to u sampled on a
/// boundary-inclusive uniform grid with `n` nodes per side (x_k = k h).
/// Returns (n-2)^2 interior values, row-major with the x index slowest.
///
/// 5-point Laplacian, centered first differences, 4-corner cross stencil for
/// u_xy; A is evaluated in closed form at the nodes. Throws if n < 3.
std::vector<double> fd_apply(std::span<const double> u_grid, std::size_t n, double h, const Operator& op);

/// Residual bound constants C in max|f - f_fd| <= C (M pi)^4 h^2 sum|a_ij|,
/// calibrated on single-mode M = 1 fields (DiagonalLinear at m_k = 5) with a
/// safety factor of 2.
double residual_constant(OperatorFamily family);

struct ResolutionResidual {
    std::size_t resolution = 0;
    double h = 0.0;
    double max_residual = 0.0;  ///< over the common (coarse) interior nodes
    double bound = 0.0;
};

struct ResidualReport {
    std::uint64_t index = 0;
    int truncation = 0;
    ResolutionResidual coarse;
    std::optional<ResolutionResidual> fine;
    std::optional<double> order;        ///< log2(coarse / fine); unset when coarse residual is 0
    double data_max_abs_error = 0.0;     ///< stored grids vs 64-bit regeneration
    double data_tolerance = 0.0;
    std::optional<double> dst_max_rel_error;  ///< Dirichlet Poisson only
    bool data_ok = true;
    bool metadata_ok = true;
    bool order_ok = true;
    bool bound_ok = true;
    bool dst_ok = true;
    bool passed = true;
    std::string failure;
};

inline constexpr double kOrderMin = 1.6;
inline constexpr double kOrderMax = 2.4;

/// Convergence check of the analytic f for `field` under `op`: residuals at
/// the grid and at its 2S-1 refinement, both measured on the coarse interior
/// nodes, and the observed order.
ResidualReport convergence_check(const RandomField& field, const Operator& op, OperatorFamily family,
                                 const Grid& grid, bool refine = true);

/// Full check of one stored record: metadata agreement, stored grids against
/// 64-bit regeneration from (seed, index), residuals with optional refinement,
/// and for Dirichlet Poisson a DST round trip of the stored data.
ResidualReport residual_check(const SampleRecord& record, const DatasetManifest& manifest, bool refine = true);

/// Exact inverse of the discrete sine spectrum: f sampled at the S-1 interior
/// nodes k/S per axis (n = S-1 values per side), divided mode-wise by the
/// continuous eigenvalue (i pi)^2 + (j pi)^2. Direct O(S^3) summation.
/// Throws for Neumann data.
std::vector<double> dst_poisson_inverse(std::span<const double> f_interior, std::size_t n,
                                        BoundaryCondition bc = BoundaryCondition::Dirichlet);

/// Interior block of a boundary-inclusive n x n grid.
std::vector<double> interior_of(std::span<const double> grid, std::size_t n);

/// Composite-trapezoid quadrature of grad(a) . grad(b) over a boundary-inclusive grid.
double h1_inner_product(const RandomField& a, const RandomField& b, const Grid& grid);

/// Gram matrix of the first k*k normalized basis functions (modes 1..k per
/// axis, row-major in (i, j)) under h1_inner_product.
std::vector<double> h1_gram_matrix(BoundaryCondition bc, int k, const Grid& grid);

struct VerifySummary {
    std::vector<ResidualReport> reports;
    std::size_t passed = 0;
    std::size_t failed = 0;
    std::optional<double> median_order;
    std::optional<double> min_order;
    std::optional<double> max_order;
};

/// Verifies every record in a dataset; reports are ordered by sample index.
VerifySummary verify_dataset(const DatasetReader& reader, bool refine, unsigned workers = 0);

/// JSON text for the verify CLI.
std::string summary_to_json(const VerifySummary& summary, const DatasetManifest& manifest, bool refine);

}  // namespace opgen::verify
