// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "opgen/field_sampler.hpp"
#include "opgen/rng.hpp"

namespace opgen {

/// Entries of a 2x2 coefficient matrix at one point, plus the first partials
/// that enter the expanded divergence -div(A grad u).
struct MatrixEntries {
    double a11, a12, a21, a22;
    double a11_x, a12_x, a21_y, a22_y;
};

/// Closed-form coefficient matrix families.
///
///   Identity        A = I
///   Fixed      A = [[x^2, sin(xy)], [x + y, y]]  (not symmetric; used verbatim)
///   DiagonalLinear  A = diag(m1 x + m2 y, m3 x + m4 y), m_k in [0.1, 5]
class CoefficientMatrix {
public:
    enum class Family { Identity, Fixed, DiagonalLinear };

    static constexpr double kParamMin = 0.1;
    static constexpr double kParamMax = 5.0;

    static CoefficientMatrix identity() { return CoefficientMatrix(Family::Identity, {}); }
    static CoefficientMatrix fixed() { return CoefficientMatrix(Family::Fixed, {}); }
    /// Throws std::invalid_argument if any parameter lies outside [0.1, 5].
    static CoefficientMatrix diagonal_linear(std::array<double, 4> m);

    Family family() const { return family_; }
    /// (m1, m2, m3, m4) for DiagonalLinear, zeros otherwise.
    const std::array<double, 4>& params() const { return params_; }

    MatrixEntries entries(double x, double y) const;

    /// alpha(x, y) = A_11 and delta(x, y) = A_22.
    double alpha(double x, double y) const { return entries(x, y).a11; }
    double delta(double x, double y) const { return entries(x, y).a22; }

    friend bool operator==(const CoefficientMatrix&, const CoefficientMatrix&) = default;

private:
    CoefficientMatrix(Family f, std::array<double, 4> p) : family_(f), params_(p) {}

    Family family_;
    std::array<double, 4> params_;
};

/// Draws DiagonalLinear with m1..m4 i.i.d. uniform on [0.1, 5].
CoefficientMatrix sample_coefficient_matrix(CounterRng& rng);

/// Zeroth-order nonlinearity c(u) of the semilinear problem. Only e^{2u} ships.
enum class Nonlinearity { Exp2u };
double eval_nonlinearity(Nonlinearity c, double u);

struct PoissonOperator {};
struct DivergenceFormOperator {
    CoefficientMatrix A;
};
/// -Laplace(u) + c(u) with A = I.
struct SemilinearOperator {
    Nonlinearity c = Nonlinearity::Exp2u;
};

using Operator = std::variant<PoissonOperator, DivergenceFormOperator, SemilinearOperator>;

/// Dataset-level operator choice; DivergenceParametric draws a fresh
/// DiagonalLinear matrix per sample.
enum class OperatorFamily { Poisson, DivergenceFixed, DivergenceParametric, Semilinear };

std::string_view to_string(OperatorFamily family);
OperatorFamily parse_operator_family(std::string_view name);

/// Concrete operator for one sample. Only DivergenceParametric consumes
/// randomness, from its own per-sample stream.
Operator operator_for_sample(OperatorFamily family, std::uint64_t master_seed,
                             std::uint64_t sample_index);

// Pointwise right-hand sides from field values and derivatives.
double poisson_rhs(const BasisValue& v);
double divergence_rhs(const BasisValue& v, const MatrixEntries& a);
double semilinear_rhs(const BasisValue& v, Nonlinearity c = Nonlinearity::Exp2u);
double rhs_at(const Operator& op, const BasisValue& v, Point p);

/// f = -(u_xx + u_yy).
std::vector<double> apply_poisson(const RandomField& field, std::span<const Point> points);
/// f = -div(A grad u), expanded with the closed-form partials of A.
std::vector<double> apply_divergence_form(const RandomField& field, const CoefficientMatrix& A,
                                          std::span<const Point> points);
/// f = -(u_xx + u_yy) + exp(2u).
std::vector<double> apply_semilinear(const RandomField& field, std::span<const Point> points);
std::vector<double> apply_operator(const RandomField& field, const Operator& op,
                                   std::span<const Point> points);

/// Derivatives a given operator needs from a TensorEvaluator.
DerivativeSet required_derivatives(const Operator& op);

/// Right-hand side on the evaluator's tensor grid, same layout as FieldGrids.
std::vector<double> apply_on_grid(const Operator& op, const FieldGrids& g,
                                  std::span<const double> xs, std::span<const double> ys);

}  // namespace opgen
