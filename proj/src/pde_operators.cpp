// SPDX-License-Identifier: Apache-2.0
#include "opgen/pde_operators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace opgen {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

CoefficientMatrix CoefficientMatrix::diagonal_linear(std::array<double, 4> m) {
    for (double v : m) {
        if (!(v >= kParamMin && v <= kParamMax)) {
            throw std::invalid_argument("diagonal-linear parameter " + std::to_string(v) +
                                        " outside [0.1, 5]");
        }
    }
    return CoefficientMatrix(Family::DiagonalLinear, m);
}

MatrixEntries CoefficientMatrix::entries(double x, double y) const {
    switch (family_) {
        case Family::Identity:
            return {1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0};
        case Family::Fixed:
            return {x * x, std::sin(x * y), x + y, y, 2.0 * x, y * std::cos(x * y), 1.0, 1.0};
        case Family::DiagonalLinear: {
            const auto& m = params_;
            return {m[0] * x + m[1] * y, 0.0, 0.0, m[2] * x + m[3] * y, m[0], 0.0, 0.0, m[3]};
        }
    }
    throw std::logic_error("unreachable coefficient family");
}

CoefficientMatrix sample_coefficient_matrix(CounterRng& rng) {
    std::array<double, 4> m{};
    for (double& v : m) v = rng.uniform(CoefficientMatrix::kParamMin, CoefficientMatrix::kParamMax);
    return CoefficientMatrix::diagonal_linear(m);
}

double eval_nonlinearity(Nonlinearity c, double u) {
    switch (c) {
        case Nonlinearity::Exp2u:
            return std::exp(2.0 * u);
    }
    throw std::logic_error("unreachable nonlinearity");
}

std::string_view to_string(OperatorFamily family) {
    switch (family) {
        case OperatorFamily::Poisson: return "poisson";
        case OperatorFamily::DivergenceFixed: return "divform-fixed";
        case OperatorFamily::DivergenceParametric: return "divform-param";
        case OperatorFamily::Semilinear: return "semilinear";
    }
    throw std::logic_error("unreachable operator family");
}

OperatorFamily parse_operator_family(std::string_view name) {
    for (auto f : {OperatorFamily::Poisson, OperatorFamily::DivergenceFixed,
                   OperatorFamily::DivergenceParametric, OperatorFamily::Semilinear}) {
        if (to_string(f) == name) return f;
    }
    throw std::invalid_argument("unknown operator '" + std::string(name) + "'");
}

Operator operator_for_sample(OperatorFamily family, std::uint64_t master_seed,
                             std::uint64_t sample_index) {
    switch (family) {
        case OperatorFamily::Poisson:
            return PoissonOperator{};
        case OperatorFamily::DivergenceFixed:
            return DivergenceFormOperator{CoefficientMatrix::fixed()};
        case OperatorFamily::DivergenceParametric: {
            CounterRng rng(derive_stream_key(master_seed, sample_index, StreamPurpose::CoefficientMatrix));
            return DivergenceFormOperator{sample_coefficient_matrix(rng)};
        }
        case OperatorFamily::Semilinear:
            return SemilinearOperator{};
    }
    throw std::logic_error("unreachable operator family");
}

double poisson_rhs(const BasisValue& v) { return -(v.uxx + v.uyy); }

double divergence_rhs(const BasisValue& v, const MatrixEntries& a) {
    // d/dx(a11 ux + a12 uy) + d/dy(a21 ux + a22 uy), product rule expanded
    const double div = a.a11 * v.uxx + a.a12 * v.uxy + a.a21 * v.uxy + a.a22 * v.uyy +
                       a.a11_x * v.ux + a.a12_x * v.uy + a.a21_y * v.ux + a.a22_y * v.uy;
    return -div;
}

double semilinear_rhs(const BasisValue& v, Nonlinearity c) {
    return poisson_rhs(v) + eval_nonlinearity(c, v.u);
}

double rhs_at(const Operator& op, const BasisValue& v, Point p) {
    return std::visit(overloaded{
                          [&](const PoissonOperator&) { return poisson_rhs(v); },
                          [&](const DivergenceFormOperator& d) {
                              return divergence_rhs(v, d.A.entries(p.x, p.y));
                          },
                          [&](const SemilinearOperator& s) { return semilinear_rhs(v, s.c); },
                      },
                      op);
}

std::vector<double> apply_operator(const RandomField& field, const Operator& op,
                                   std::span<const Point> points) {
    std::vector<double> f;
    f.reserve(points.size());
    for (const Point& p : points) f.push_back(rhs_at(op, eval_field(field, p), p));
    return f;
}

std::vector<double> apply_poisson(const RandomField& field, std::span<const Point> points) {
    return apply_operator(field, PoissonOperator{}, points);
}

std::vector<double> apply_divergence_form(const RandomField& field, const CoefficientMatrix& A,
                                          std::span<const Point> points) {
    return apply_operator(field, DivergenceFormOperator{A}, points);
}

std::vector<double> apply_semilinear(const RandomField& field, std::span<const Point> points) {
    return apply_operator(field, SemilinearOperator{}, points);
}

DerivativeSet required_derivatives(const Operator& op) {
    return std::visit(overloaded{
                          [](const PoissonOperator&) { return DerivativeSet::laplacian(); },
                          [](const DivergenceFormOperator&) { return DerivativeSet::all(); },
                          [](const SemilinearOperator&) { return DerivativeSet::laplacian(); },
                      },
                      op);
}

std::vector<double> apply_on_grid(const Operator& op, const FieldGrids& g,
                                  std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != g.nx || ys.size() != g.ny) {
        throw std::invalid_argument("apply_on_grid: coordinate/grid size mismatch");
    }
    const std::size_t n = g.nx * g.ny;
    std::vector<double> f(n);
    std::visit(overloaded{
                   [&](const PoissonOperator&) {
                       for (std::size_t k = 0; k < n; ++k) f[k] = -(g.uxx[k] + g.uyy[k]);
                   },
                   [&](const SemilinearOperator& s) {
                       for (std::size_t k = 0; k < n; ++k) {
                           f[k] = -(g.uxx[k] + g.uyy[k]) + eval_nonlinearity(s.c, g.u[k]);
                       }
                   },
                   [&](const DivergenceFormOperator& d) {
                       for (std::size_t kx = 0; kx < g.nx; ++kx) {
                           for (std::size_t ky = 0; ky < g.ny; ++ky) {
                               const std::size_t k = kx * g.ny + ky;
                               const BasisValue v{g.u[k], g.ux[k], g.uy[k], g.uxx[k], g.uyy[k], g.uxy[k]};
                               f[k] = divergence_rhs(v, d.A.entries(xs[kx], ys[ky]));
                           }
                       }
                   },
               },
               op);
    return f;
}

}  // namespace opgen
