// SPDX-License-Identifier: Apache-2.0
#include "opgen/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "parallel.hpp"

namespace opgen::verify {

namespace {

// Worst single-mode ratios: Poisson 0.0375 (= sqrt(2) / (12 pi), the
// 5-point truncation term), Fixed 0.212, DiagonalLinear 0.372.
constexpr double kCalibratedPoisson = 0.075;
constexpr double kCalibratedFixed = 0.43;
constexpr double kCalibratedParametric = 0.75;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double coefficient_l1(const RandomField& field) {
    double s = 0.0;
    for (double a : field.coeffs()) s += std::abs(a);
    return s;
}

/// Analytic u and f on a boundary-inclusive grid.
struct AnalyticGrids {
    std::vector<double> u, f;
};

AnalyticGrids analytic_on(const RandomField& field, const Operator& op, const Grid& grid) {
    const auto xs = grid.coords();
    const TensorEvaluator ev(field.bc(), field.truncation(), xs, xs);
    const FieldGrids g = ev.evaluate(field, required_derivatives(op));
    return {g.u, apply_on_grid(op, g, xs, xs)};
}

/// Max |f_analytic - f_fd| over the coarse interior nodes. `stride` maps a
/// coarse node index to the grid at hand (1 = coarse, 2 = refined).
double residual_on_common_nodes(const AnalyticGrids& a, std::size_t n, double h, const Operator& op,
                                std::size_t coarse_n, std::size_t stride) {
    const std::vector<double> fd = fd_apply(a.u, n, h, op);
    const std::size_t inner = n - 2;
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < coarse_n; ++k) {
        for (std::size_t l = 1; l + 1 < coarse_n; ++l) {
            const std::size_t gk = k * stride;
            const std::size_t gl = l * stride;
            const double diff = a.f[gk * n + gl] - fd[(gk - 1) * inner + (gl - 1)];
            worst = std::max(worst, std::abs(diff));
        }
    }
    return worst;
}

double residual_bound(OperatorFamily family, const RandomField& field, double h) {
    const double mpi = field.truncation() * kPi;
    return residual_constant(family) * mpi * mpi * mpi * mpi * h * h * coefficient_l1(field);
}

/// Sine table s[k * n + p] = sin(pi (p+1)(k+1) / S), n = S - 1. Symmetric.
std::vector<double> sine_table(std::size_t n) {
    const std::size_t s = n + 1;
    std::vector<double> t(n * n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t p = 0; p < n; ++p) {
            // reduce the integer phase modulo 2S before scaling by pi / S
            const std::size_t phase = ((k + 1) * (p + 1)) % (2 * s);
            t[k * n + p] = std::sin(kPi * double(phase) / double(s));
        }
    }
    return t;
}

/// out = T * in * T for n x n row-major matrices, T symmetric.
std::vector<double> two_sided(const std::vector<double>& t, const std::vector<double>& in, std::size_t n) {
    std::vector<double> tmp(n * n, 0.0), out(n * n, 0.0);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t k = 0; k < n; ++k) {
            const double w = t[p * n + k];
            const double* row = &in[k * n];
            double* dst = &tmp[p * n];
            for (std::size_t l = 0; l < n; ++l) dst[l] += w * row[l];
        }
    }
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            double acc = 0.0;
            for (std::size_t l = 0; l < n; ++l) acc += tmp[p * n + l] * t[l * n + q];
            out[p * n + q] = acc;
        }
    }
    return out;
}

std::vector<double> trapezoid_weights(const Grid& grid) {
    std::vector<double> w(grid.points(), grid.spacing());
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

}  // namespace

std::vector<double> fd_apply(std::span<const double> u, std::size_t n, double h, const Operator& op) {
    if (n < 3) throw std::invalid_argument("fd_apply: grid must have at least 3 nodes per side");
    if (u.size() != n * n) throw std::invalid_argument("fd_apply: u grid size does not match n*n");

    const std::size_t inner = n - 2;
    const double inv_h2 = 1.0 / (h * h);
    const double inv_2h = 0.5 / h;
    const double inv_4h2 = 0.25 * inv_h2;
    std::vector<double> f(inner * inner);

    for (std::size_t k = 1; k + 1 < n; ++k) {
        for (std::size_t l = 1; l + 1 < n; ++l) {
            const auto at = [&](std::size_t a, std::size_t b) { return u[a * n + b]; };
            const double c = at(k, l);
            const double uxx = (at(k + 1, l) - 2.0 * c + at(k - 1, l)) * inv_h2;
            const double uyy = (at(k, l + 1) - 2.0 * c + at(k, l - 1)) * inv_h2;
            const double lap = uxx + uyy;

            const double value = std::visit(
                overloaded{
                    [&](const PoissonOperator&) { return -lap; },
                    [&](const SemilinearOperator& s) { return -lap + eval_nonlinearity(s.c, c); },
                    [&](const DivergenceFormOperator& d) {
                        const double ux = (at(k + 1, l) - at(k - 1, l)) * inv_2h;
                        const double uy = (at(k, l + 1) - at(k, l - 1)) * inv_2h;
                        const double uxy = (at(k + 1, l + 1) - at(k + 1, l - 1) - at(k - 1, l + 1) +
                                            at(k - 1, l - 1)) *
                                           inv_4h2;
                        const MatrixEntries e = d.A.entries(double(k) * h, double(l) * h);
                        const double flux_div = e.a11 * uxx + (e.a12 + e.a21) * uxy + e.a22 * uyy +
                                                (e.a11_x + e.a21_y) * ux + (e.a12_x + e.a22_y) * uy;
                        return -flux_div;
                    },
                },
                op);
            f[(k - 1) * inner + (l - 1)] = value;
        }
    }
    return f;
}

double residual_constant(OperatorFamily family) {
    // max residual / ((M pi)^4 h^2 sum|a|) over M = 1 unit-coefficient fields,
    // both boundary conditions, S in {16, ..., 257}, doubled. Rechecked by
    // ResidualConstants.CoverSingleModeCalibration.
    switch (family) {
        case OperatorFamily::Poisson: return kCalibratedPoisson;
        case OperatorFamily::Semilinear: return kCalibratedPoisson;
        case OperatorFamily::DivergenceFixed: return kCalibratedFixed;
        case OperatorFamily::DivergenceParametric: return kCalibratedParametric;
    }
    throw std::logic_error("unreachable operator family");
}

ResidualReport convergence_check(const RandomField& field, const Operator& op, OperatorFamily family,
                                 const Grid& grid, bool refine) {
    if (!grid.includes_boundary()) throw std::invalid_argument("convergence_check needs a boundary-inclusive grid");
    ResidualReport r;
    r.index = field.sample_index();
    r.truncation = field.truncation();

    const std::size_t n = grid.points();
    const AnalyticGrids coarse = analytic_on(field, op, grid);
    r.coarse = {grid.resolution(), grid.spacing(),
                residual_on_common_nodes(coarse, n, grid.spacing(), op, n, 1),
                residual_bound(family, field, grid.spacing())};
    r.bound_ok = r.coarse.max_residual <= r.coarse.bound;

    if (refine) {
        const Grid fine_grid = grid.refined();
        const AnalyticGrids fine = analytic_on(field, op, fine_grid);
        ResolutionResidual fr{fine_grid.resolution(), fine_grid.spacing(),
                              residual_on_common_nodes(fine, fine_grid.points(), fine_grid.spacing(), op, n, 2),
                              residual_bound(family, field, fine_grid.spacing())};
        r.bound_ok = r.bound_ok && fr.max_residual <= fr.bound;
        if (r.coarse.max_residual > 0.0) {
            if (fr.max_residual > 0.0) {
                r.order = std::log2(r.coarse.max_residual / fr.max_residual);
                r.order_ok = *r.order >= kOrderMin && *r.order <= kOrderMax;
            } else {
                r.order_ok = false;
            }
        }
        r.fine = fr;
    }

    if (!r.bound_ok) r.failure = "residual exceeds bound";
    if (!r.order_ok) r.failure = "convergence order outside [1.6, 2.4]";
    r.passed = r.bound_ok && r.order_ok;
    return r;
}

ResidualReport residual_check(const SampleRecord& record, const DatasetManifest& manifest, bool refine) {
    const Grid grid = manifest.grid();
    const std::size_t n = grid.points();
    const RandomField field = sample_field(manifest.field_spec(), record.index);
    const Operator op = operator_for_sample(manifest.family, manifest.master_seed, record.index);

    ResidualReport r = convergence_check(field, op, manifest.family, grid, refine);

    r.metadata_ok = record.truncation == field.truncation() && record.f.size() == n * n &&
                    record.u.size() == n * n;
    if (const auto* d = std::get_if<DivergenceFormOperator>(&op);
        d && manifest.family == OperatorFamily::DivergenceParametric) {
        r.metadata_ok = r.metadata_ok && record.matrix_params == d->A.params() && record.alpha && record.delta;
    }
    if (!r.metadata_ok) {
        r.passed = false;
        r.data_ok = false;
        r.failure = "record metadata disagrees with regeneration";
        return r;
    }

    // stored data vs 64-bit regeneration
    const AnalyticGrids ref = analytic_on(field, op, grid);
    const double rel = manifest.precision == Precision::F32 ? 0x1.0p-22 : 1e-12;
    double err = 0.0;
    double tol = 0.0;
    const auto compare = [&](std::span<const double> stored, std::span<const double> truth) {
        const double scale = std::max(1.0, max_abs(truth));
        tol = std::max(tol, rel * scale);
        double e = 0.0;
        for (std::size_t k = 0; k < truth.size(); ++k) e = std::max(e, std::abs(stored[k] - truth[k]));
        err = std::max(err, e);
        return e <= rel * scale;
    };
    bool ok = compare(record.u, ref.u);
    ok = compare(record.f, ref.f) && ok;
    if (record.alpha && record.delta) {
        const auto& A = std::get<DivergenceFormOperator>(op).A;
        const auto xs = grid.coords();
        std::vector<double> alpha(n * n), delta(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                alpha[i * n + j] = A.alpha(xs[i], xs[j]);
                delta[i * n + j] = A.delta(xs[i], xs[j]);
            }
        }
        ok = compare(*record.alpha, alpha) && ok;
        ok = compare(*record.delta, delta) && ok;
    }
    r.data_max_abs_error = err;
    r.data_tolerance = tol;
    r.data_ok = ok;

    if (manifest.bc == BoundaryCondition::Dirichlet && manifest.family == OperatorFamily::Poisson &&
        std::size_t(record.truncation) + 2 <= n) {
        const auto u_dst = dst_poisson_inverse(interior_of(record.f, n), n - 2);
        const auto u_in = interior_of(record.u, n);
        double diff = 0.0;
        for (std::size_t k = 0; k < u_in.size(); ++k) diff = std::max(diff, std::abs(u_dst[k] - u_in[k]));
        const double scale = max_abs(u_in);
        r.dst_max_rel_error = scale > 0.0 ? diff / scale : diff;
        const double dst_tol = manifest.precision == Precision::F32 ? 1e-5 : 1e-10;
        r.dst_ok = *r.dst_max_rel_error <= dst_tol;
    }

    if (!r.dst_ok) r.failure = "DST round trip mismatch";
    if (!r.data_ok) r.failure = "stored data differs from regeneration";
    r.passed = r.passed && r.data_ok && r.dst_ok;
    return r;
}

std::vector<double> interior_of(std::span<const double> grid, std::size_t n) {
    if (n < 3 || grid.size() != n * n) throw std::invalid_argument("interior_of: bad grid size");
    std::vector<double> out;
    out.reserve((n - 2) * (n - 2));
    for (std::size_t k = 1; k + 1 < n; ++k) {
        for (std::size_t l = 1; l + 1 < n; ++l) out.push_back(grid[k * n + l]);
    }
    return out;
}

std::vector<double> dst_poisson_inverse(std::span<const double> f_interior, std::size_t n, BoundaryCondition bc) {
    if (bc != BoundaryCondition::Dirichlet) {
        throw std::invalid_argument("dst_poisson_inverse: the sine-transform oracle is Dirichlet-only");
    }
    if (n < 1 || f_interior.size() != n * n) throw std::invalid_argument("dst_poisson_inverse: bad input size");

    const std::size_t s = n + 1;
    const std::vector<double> table = sine_table(n);
    std::vector<double> spectrum = two_sided(table, std::vector<double>(f_interior.begin(), f_interior.end()), n);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            spectrum[p * n + q] /= eigenvalue(ModeIndex(int(p + 1), int(q + 1)));
        }
    }
    std::vector<double> u = two_sided(table, spectrum, n);
    const double norm = (2.0 / double(s)) * (2.0 / double(s));
    for (double& v : u) v *= norm;
    return u;
}

double h1_inner_product(const RandomField& a, const RandomField& b, const Grid& grid) {
    if (a.bc() != b.bc()) throw std::invalid_argument("h1_inner_product: fields must share a boundary condition");
    if (!grid.includes_boundary()) throw std::invalid_argument("h1_inner_product: needs a boundary-inclusive grid");

    const auto xs = grid.coords();
    const DerivativeSet grads{false, true, true, false, false, false};
    const TensorEvaluator ea(a.bc(), a.truncation(), xs, xs);
    const TensorEvaluator eb(b.bc(), b.truncation(), xs, xs);
    const FieldGrids ga = ea.evaluate(a, grads);
    const FieldGrids gb = eb.evaluate(b, grads);
    const auto w = trapezoid_weights(grid);

    const std::size_t n = xs.size();
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double row = 0.0;
        for (std::size_t l = 0; l < n; ++l) {
            const std::size_t at = k * n + l;
            row += w[l] * (ga.ux[at] * gb.ux[at] + ga.uy[at] * gb.uy[at]);
        }
        total += w[k] * row;
    }
    return total;
}

std::vector<double> h1_gram_matrix(BoundaryCondition bc, int k, const Grid& grid) {
    if (k < 1) throw std::invalid_argument("h1_gram_matrix: k must be >= 1");
    const auto xs = grid.coords();
    const std::size_t n = xs.size();
    const TensorEvaluator ev(bc, k, xs, xs);
    const DerivativeSet grads{false, true, true, false, false, false};
    const auto w = trapezoid_weights(grid);

    std::vector<FieldGrids> g;
    for (int i = 1; i <= k; ++i) {
        for (int j = 1; j <= k; ++j) {
            RandomField f(bc, k);
            f.set_coeff(i, j, 1.0);
            g.push_back(ev.evaluate(f, grads));
        }
    }
    const std::size_t m = g.size();
    std::vector<double> gram(m * m);
    for (std::size_t p = 0; p < m; ++p) {
        for (std::size_t q = p; q < m; ++q) {
            double total = 0.0;
            for (std::size_t a = 0; a < n; ++a) {
                double row = 0.0;
                for (std::size_t b = 0; b < n; ++b) {
                    const std::size_t at = a * n + b;
                    row += w[b] * (g[p].ux[at] * g[q].ux[at] + g[p].uy[at] * g[q].uy[at]);
                }
                total += w[a] * row;
            }
            gram[p * m + q] = gram[q * m + p] = total;
        }
    }
    return gram;
}

VerifySummary verify_dataset(const DatasetReader& reader, bool refine, unsigned workers) {
    VerifySummary s;
    s.reports.resize(reader.size());
    detail::parallel_for(reader.size(), detail::resolve_workers(workers), [&](std::size_t k) {
        s.reports[k] = residual_check(reader.read(k), reader.manifest(), refine);
    });
    std::vector<double> orders;
    for (const auto& r : s.reports) {
        (r.passed ? s.passed : s.failed) += 1;
        if (r.order) orders.push_back(*r.order);
    }
    if (!orders.empty()) {
        std::sort(orders.begin(), orders.end());
        const std::size_t mid = orders.size() / 2;
        s.median_order = orders.size() % 2 ? orders[mid] : 0.5 * (orders[mid - 1] + orders[mid]);
        s.min_order = orders.front();
        s.max_order = orders.back();
    }
    return s;
}

std::string summary_to_json(const VerifySummary& summary, const DatasetManifest& manifest, bool refine) {
    using nlohmann::json;
    const auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };

    json records = json::array();
    for (const auto& r : summary.reports) {
        json j{
            {"index", r.index},
            {"truncation", r.truncation},
            {"passed", r.passed},
            {"coarse", {{"resolution", r.coarse.resolution}, {"max_residual", r.coarse.max_residual},
                        {"bound", r.coarse.bound}}},
            {"order", opt(r.order)},
            {"data_max_abs_error", r.data_max_abs_error},
            {"data_tolerance", r.data_tolerance},
            {"dst_max_rel_error", opt(r.dst_max_rel_error)},
        };
        if (r.fine) {
            j["fine"] = {{"resolution", r.fine->resolution}, {"max_residual", r.fine->max_residual},
                         {"bound", r.fine->bound}};
        }
        if (!r.passed) j["failure"] = r.failure;
        records.push_back(std::move(j));
    }
    json out{
        {"operator", std::string(to_string(manifest.family))},
        {"bc", std::string(to_string(manifest.bc))},
        {"resolution", manifest.resolution},
        {"n_samples", manifest.n_samples},
        {"refine", refine},
        {"residual_bound", {{"form", "C * (M*pi)^4 * h^2 * sum|a_ij|"},
                            {"C", residual_constant(manifest.family)}}},
        {"order_window", {kOrderMin, kOrderMax}},
        {"summary", {{"passed", summary.passed}, {"failed", summary.failed},
                     {"median_order", opt(summary.median_order)}, {"min_order", opt(summary.min_order)},
                     {"max_order", opt(summary.max_order)}, {"all_passed", summary.failed == 0}}},
        {"records", records},
    };
    return out.dump(2) + "\n";
}

}  // namespace opgen::verify
