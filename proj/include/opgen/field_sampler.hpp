// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "opgen/eigenbasis.hpp"

namespace opgen {

/// Per-dataset sampling policy: truncation order M is drawn uniformly from
/// {m_min, ..., m_max} for every sample.
struct FieldSpec {
    BoundaryCondition bc = BoundaryCondition::Dirichlet;
    int m_min = 1;
    int m_max = 20;
    std::uint64_t master_seed = 0;

    void validate() const;
};

struct Point {
    double x;
    double y;
};

/// Truncated expansion u = sum_{i,j=1..M} a_ij * basis_ij over the
/// normalized eigenfunctions of `bc`.
class RandomField {
public:
    RandomField(BoundaryCondition bc, int truncation, std::uint64_t sample_index = 0);
    RandomField(BoundaryCondition bc, int truncation, std::vector<double> coeffs,
                std::uint64_t sample_index = 0);

    BoundaryCondition bc() const { return bc_; }
    int truncation() const { return m_; }
    std::uint64_t sample_index() const { return sample_index_; }

    /// a_ij with 1-based indices.
    double coeff(int i, int j) const { return coeffs_[index(i, j)]; }
    void set_coeff(int i, int j, double value) { coeffs_[index(i, j)] = value; }

    /// Row-major M x M storage, entry (i-1)*M + (j-1) holds a_ij.
    std::span<const double> coeffs() const { return coeffs_; }

    /// c1 * a + c2 * b, coefficient-wise. Both fields must share bc and M.
    static RandomField combine(double c1, const RandomField& a, double c2, const RandomField& b);

private:
    std::size_t index(int i, int j) const;

    BoundaryCondition bc_;
    int m_;
    std::uint64_t sample_index_;
    std::vector<double> coeffs_;
};

/// Draws the field for `sample_index`: M uniform on [m_min, m_max], then
/// a_ij ~ N(0, 1/(i+j)) (variance 1/(i+j)) in row-major order. The result
/// depends only on (spec, sample_index).
RandomField sample_field(const FieldSpec& spec, std::uint64_t sample_index);

/// Point evaluation by direct summation over eval_basis.
BasisValue eval_field(const RandomField& field, Point p);
std::vector<BasisValue> eval_field(const RandomField& field, std::span<const Point> points);

/// Which derivative grids a TensorEvaluator should fill.
struct DerivativeSet {
    bool u = true;
    bool ux = false;
    bool uy = false;
    bool uxx = false;
    bool uyy = false;
    bool uxy = false;

    static DerivativeSet all() { return {true, true, true, true, true, true}; }
    static DerivativeSet laplacian() { return {true, false, false, true, true, false}; }
};

/// Field and derivative values on a tensor grid, each stored row-major with
/// the x index slowest: element k * ny + l belongs to (xs[k], ys[l]).
struct FieldGrids {
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::vector<double> u, ux, uy, uxx, uyy, uxy;
};

/// Evaluates fields on a fixed tensor grid by exploiting separability:
/// each derivative grid is X * C * Y^T with per-axis factor tables X, Y and
/// C_ij = a_ij / sqrt(lambda_ij). Tables are built once for modes up to
/// m_max and shared by every field evaluated through this object.
class TensorEvaluator {
public:
    TensorEvaluator(BoundaryCondition bc, int m_max, std::span<const double> xs,
                    std::span<const double> ys);

    BoundaryCondition bc() const { return bc_; }
    int max_truncation() const { return m_max_; }
    std::size_t nx() const { return xs_.size(); }
    std::size_t ny() const { return ys_.size(); }
    std::span<const double> xs() const { return xs_; }
    std::span<const double> ys() const { return ys_; }

    FieldGrids evaluate(const RandomField& field, DerivativeSet which) const;

private:
    struct AxisTable {
        // [point][mode-1], modes 1..m_max
        std::vector<double> value, d1, d2;
    };

    static AxisTable build_table(BoundaryCondition bc, int m_max, std::span<const double> ts);
    void contract(const std::vector<double>& scaled, int m, const std::vector<double>& xtab,
                  const std::vector<double>& ytab, std::vector<double>& out) const;

    BoundaryCondition bc_;
    int m_max_;
    std::vector<double> xs_, ys_;
    AxisTable xtab_, ytab_;
};

}  // namespace opgen
