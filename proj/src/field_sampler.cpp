// SPDX-License-Identifier: Apache-2.0
#include "opgen/field_sampler.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "opgen/rng.hpp"

namespace opgen {

void FieldSpec::validate() const {
    if (m_min < 1 || m_max < m_min) {
        throw std::invalid_argument("field spec requires 1 <= m_min <= m_max (got " +
                                    std::to_string(m_min) + ", " + std::to_string(m_max) + ")");
    }
}

RandomField::RandomField(BoundaryCondition bc, int truncation, std::uint64_t sample_index)
    : RandomField(bc, truncation,
                  std::vector<double>(truncation > 0 ? std::size_t(truncation) * truncation : 0, 0.0),
                  sample_index) {}

RandomField::RandomField(BoundaryCondition bc, int truncation, std::vector<double> coeffs,
                         std::uint64_t sample_index)
    : bc_(bc), m_(truncation), sample_index_(sample_index), coeffs_(std::move(coeffs)) {
    if (m_ < 1) throw std::invalid_argument("truncation order must be >= 1");
    if (coeffs_.size() != std::size_t(m_) * m_) {
        throw std::invalid_argument("coefficient matrix must hold M*M entries");
    }
}

std::size_t RandomField::index(int i, int j) const {
    if (i < 1 || j < 1 || i > m_ || j > m_) {
        throw std::out_of_range("coefficient index out of range");
    }
    return std::size_t(i - 1) * m_ + (j - 1);
}

RandomField RandomField::combine(double c1, const RandomField& a, double c2, const RandomField& b) {
    if (a.bc_ != b.bc_ || a.m_ != b.m_) {
        throw std::invalid_argument("combine: fields must share boundary condition and truncation");
    }
    std::vector<double> out(a.coeffs_.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = c1 * a.coeffs_[k] + c2 * b.coeffs_[k];
    return RandomField(a.bc_, a.m_, std::move(out), a.sample_index_);
}

RandomField sample_field(const FieldSpec& spec, std::uint64_t sample_index) {
    spec.validate();
    CounterRng rng(derive_stream_key(spec.master_seed, sample_index, StreamPurpose::FieldCoefficients));
    const auto span = static_cast<std::uint64_t>(spec.m_max - spec.m_min + 1);
    const int m = spec.m_min + static_cast<int>(rng.uniform_below(span));

    std::vector<double> coeffs(std::size_t(m) * m);
    for (int i = 1; i <= m; ++i) {
        for (int j = 1; j <= m; ++j) {
            coeffs[std::size_t(i - 1) * m + (j - 1)] = rng.standard_normal() / std::sqrt(double(i + j));
        }
    }
    return RandomField(spec.bc, m, std::move(coeffs), sample_index);
}

BasisValue eval_field(const RandomField& field, Point p) {
    BasisValue acc;
    const int m = field.truncation();
    for (int i = 1; i <= m; ++i) {
        for (int j = 1; j <= m; ++j) {
            const double a = field.coeff(i, j);
            if (a == 0.0) continue;
            acc += eval_basis(ModeIndex(i, j), field.bc(), p.x, p.y).scaled(a);
        }
    }
    return acc;
}

std::vector<BasisValue> eval_field(const RandomField& field, std::span<const Point> points) {
    std::vector<BasisValue> out;
    out.reserve(points.size());
    for (const Point& p : points) out.push_back(eval_field(field, p));
    return out;
}

TensorEvaluator::TensorEvaluator(BoundaryCondition bc, int m_max, std::span<const double> xs,
                                 std::span<const double> ys)
    : bc_(bc), m_max_(m_max), xs_(xs.begin(), xs.end()), ys_(ys.begin(), ys.end()) {
    if (m_max < 1) throw std::invalid_argument("TensorEvaluator: m_max must be >= 1");
    xtab_ = build_table(bc, m_max, xs_);
    ytab_ = build_table(bc, m_max, ys_);
}

TensorEvaluator::AxisTable TensorEvaluator::build_table(BoundaryCondition bc, int m_max,
                                                        std::span<const double> ts) {
    AxisTable t;
    const std::size_t n = ts.size() * std::size_t(m_max);
    t.value.resize(n);
    t.d1.resize(n);
    t.d2.resize(n);
    for (std::size_t k = 0; k < ts.size(); ++k) {
        for (int mode = 1; mode <= m_max; ++mode) {
            const AxisFactor f = axis_factor(bc, mode, ts[k]);
            const std::size_t at = k * m_max + (mode - 1);
            t.value[at] = f.value;
            t.d1[at] = f.d1;
            t.d2[at] = f.d2;
        }
    }
    return t;
}

void TensorEvaluator::contract(const std::vector<double>& scaled, int m,
                               const std::vector<double>& xtab, const std::vector<double>& ytab,
                               std::vector<double>& out) const {
    const std::size_t nx = xs_.size();
    const std::size_t ny = ys_.size();
    const std::size_t stride = std::size_t(m_max_);

    // partial[i][l] = sum_j C_ij * Y[l][j]
    std::vector<double> partial(std::size_t(m) * ny, 0.0);
    for (int i = 0; i < m; ++i) {
        const double* crow = &scaled[std::size_t(i) * m];
        double* prow = &partial[std::size_t(i) * ny];
        for (std::size_t l = 0; l < ny; ++l) {
            const double* yrow = &ytab[l * stride];
            double acc = 0.0;
            for (int j = 0; j < m; ++j) acc += crow[j] * yrow[j];
            prow[l] = acc;
        }
    }

    out.assign(nx * ny, 0.0);
    for (std::size_t k = 0; k < nx; ++k) {
        double* orow = &out[k * ny];
        const double* xrow = &xtab[k * stride];
        for (int i = 0; i < m; ++i) {
            const double xv = xrow[i];
            const double* prow = &partial[std::size_t(i) * ny];
            for (std::size_t l = 0; l < ny; ++l) orow[l] += xv * prow[l];
        }
    }
}

FieldGrids TensorEvaluator::evaluate(const RandomField& field, DerivativeSet which) const {
    if (field.bc() != bc_) throw std::invalid_argument("TensorEvaluator: boundary condition mismatch");
    const int m = field.truncation();
    if (m > m_max_) throw std::invalid_argument("TensorEvaluator: field truncation exceeds table size");

    std::vector<double> scaled(std::size_t(m) * m);
    for (int i = 1; i <= m; ++i) {
        for (int j = 1; j <= m; ++j) {
            scaled[std::size_t(i - 1) * m + (j - 1)] = field.coeff(i, j) / std::sqrt(eigenvalue(ModeIndex(i, j)));
        }
    }

    FieldGrids g;
    g.nx = nx();
    g.ny = ny();
    if (which.u) contract(scaled, m, xtab_.value, ytab_.value, g.u);
    if (which.ux) contract(scaled, m, xtab_.d1, ytab_.value, g.ux);
    if (which.uy) contract(scaled, m, xtab_.value, ytab_.d1, g.uy);
    if (which.uxx) contract(scaled, m, xtab_.d2, ytab_.value, g.uxx);
    if (which.uyy) contract(scaled, m, xtab_.value, ytab_.d2, g.uyy);
    if (which.uxy) contract(scaled, m, xtab_.d1, ytab_.d1, g.uxy);
    return g;
}

}  // namespace opgen
