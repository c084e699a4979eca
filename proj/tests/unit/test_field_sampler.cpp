// SPDX-License-Identifier: Apache-2.0
#include "opgen/field_sampler.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <random>
#include <thread>

#include "opgen/grid.hpp"
#include "opgen/rng.hpp"
#include "stats.hpp"

namespace opgen {
namespace {

const FieldSpec kDirichlet20{BoundaryCondition::Dirichlet, 1, 20, 12345};

bool bit_identical(const RandomField& a, const RandomField& b) {
    return a.truncation() == b.truncation() && a.coeffs().size() == b.coeffs().size() &&
           std::memcmp(a.coeffs().data(), b.coeffs().data(), a.coeffs().size_bytes()) == 0;
}

TEST(CounterRng, SeekReplaysStream) {
    CounterRng a(42);
    std::vector<std::uint64_t> first;
    for (int k = 0; k < 16; ++k) first.push_back(a.next_u64());
    a.seek(0);
    for (int k = 0; k < 16; ++k) EXPECT_EQ(a.next_u64(), first[k]);
}

TEST(CounterRng, UniformBelowStaysInRange) {
    CounterRng rng(9);
    std::vector<int> hits(7, 0);
    for (int k = 0; k < 7000; ++k) ++hits[rng.uniform_below(7)];
    for (int h : hits) EXPECT_GT(h, 800);
    EXPECT_THROW(rng.uniform_below(0), std::invalid_argument);
}

TEST(StreamKeys, DistinctAcrossIndicesAndPurposes) {
    EXPECT_NE(derive_stream_key(1, 0, StreamPurpose::FieldCoefficients),
              derive_stream_key(1, 1, StreamPurpose::FieldCoefficients));
    EXPECT_NE(derive_stream_key(1, 0, StreamPurpose::FieldCoefficients),
              derive_stream_key(1, 0, StreamPurpose::CoefficientMatrix));
    EXPECT_NE(derive_stream_key(1, 0, StreamPurpose::FieldCoefficients),
              derive_stream_key(2, 0, StreamPurpose::FieldCoefficients));
}

TEST(FieldSpecTest, RejectsBadRanges) {
    EXPECT_THROW((FieldSpec{BoundaryCondition::Dirichlet, 0, 3, 0}.validate()), std::invalid_argument);
    EXPECT_THROW((FieldSpec{BoundaryCondition::Dirichlet, 5, 3, 0}.validate()), std::invalid_argument);
    EXPECT_NO_THROW((FieldSpec{BoundaryCondition::Dirichlet, 3, 3, 0}.validate()));
}

TEST(SampleField, DeterministicPerIndex) {
    for (std::uint64_t idx : {0ULL, 1ULL, 999ULL, 1ULL << 40}) {
        EXPECT_TRUE(bit_identical(sample_field(kDirichlet20, idx), sample_field(kDirichlet20, idx)));
    }
    EXPECT_FALSE(bit_identical(sample_field(kDirichlet20, 3), sample_field(kDirichlet20, 4)));
}

TEST(SampleField, DegenerateRangeGivesSingleCoefficient) {
    const RandomField f = sample_field({BoundaryCondition::Neumann, 1, 1, 5}, 17);
    EXPECT_EQ(f.truncation(), 1);
    EXPECT_EQ(f.coeffs().size(), 1u);
    EXPECT_EQ(f.bc(), BoundaryCondition::Neumann);
}

TEST(SampleField, TruncationCoversRangeUniformly) {
    std::vector<int> hits(21, 0);
    for (std::uint64_t idx = 0; idx < 20000; ++idx) ++hits[sample_field(kDirichlet20, idx).truncation()];
    EXPECT_EQ(hits[0], 0);
    for (int m = 1; m <= 20; ++m) {
        // expected 1000, sd ~31
        EXPECT_NEAR(hits[m], 1000, 130) << "M = " << m;
    }
}

TEST(SampleField, OrderAndThreadIndependent) {
    constexpr std::uint64_t n = 64;
    std::vector<RandomField> serial;
    for (std::uint64_t k = 0; k < n; ++k) serial.push_back(sample_field(kDirichlet20, k));

    std::vector<std::optional<RandomField>> threaded(n);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < 4; ++w) {
            pool.emplace_back([&, w] {
                // each worker walks its indices backwards
                for (std::uint64_t k = n; k-- > 0;) {
                    if (k % 4 == w) threaded[k] = sample_field(kDirichlet20, k);
                }
            });
        }
    }
    for (std::uint64_t k = 0; k < n; ++k) EXPECT_TRUE(bit_identical(serial[k], *threaded[k]));
}

TEST(SampleField, CoefficientVarianceMatchesLaw) {
    // 20,000 draws here; the 200,000-draw version runs in the acceptance suite.
    constexpr int m = 6;
    constexpr std::size_t draws = 20000;
    const FieldSpec spec{BoundaryCondition::Dirichlet, m, m, 99};
    std::vector<testing::Moments> mom(m * m);
    for (std::size_t k = 0; k < draws; ++k) {
        const RandomField f = sample_field(spec, k);
        for (std::size_t c = 0; c < mom.size(); ++c) mom[c].add(f.coeffs()[c]);
    }
    for (int i = 1; i <= m; ++i) {
        for (int j = 1; j <= m; ++j) {
            const auto& s = mom[std::size_t(i - 1) * m + (j - 1)];
            const double target = 1.0 / (i + j);
            // 4 SE here to keep 36 simultaneous checks from flaking on the seed
            EXPECT_NEAR(s.variance(), target, 4 * testing::variance_standard_error(target, draws));
            EXPECT_NEAR(s.mean, 0.0, 4 * std::sqrt(target / draws));
        }
    }
}

TEST(SampleField, GaussianPassesChiSquareLikeReferenceSampler) {
    constexpr std::size_t n = 200000;
    testing::NormalChiSquare ours(20), reference(20);
    CounterRng rng(derive_stream_key(7, 0, StreamPurpose::FieldCoefficients));
    std::mt19937_64 gen(7);
    std::normal_distribution<double> nd;
    for (std::size_t k = 0; k < n; ++k) {
        ours.add(rng.standard_normal());
        reference.add(nd(gen));
    }
    EXPECT_LT(ours.statistic(), ours.critical(1e-3));
    EXPECT_LT(reference.statistic(), reference.critical(1e-3));
}

TEST(EvalField, ZeroFieldIsIdenticallyZero) {
    const RandomField zero(BoundaryCondition::Dirichlet, 7);
    for (Point p : {Point{0.2, 0.3}, Point{0.9, 0.1}}) {
        const BasisValue v = eval_field(zero, p);
        EXPECT_EQ(v.u, 0.0);
        EXPECT_EQ(v.ux, 0.0);
        EXPECT_EQ(v.uy, 0.0);
        EXPECT_EQ(v.uxx, 0.0);
        EXPECT_EQ(v.uyy, 0.0);
        EXPECT_EQ(v.uxy, 0.0);
    }
}

TEST(EvalField, SingleModeCenterValue) {
    RandomField f(BoundaryCondition::Dirichlet, 1);
    f.set_coeff(1, 1, 1.0);
    EXPECT_NEAR(eval_field(f, Point{0.5, 0.5}).u, 0.225079079039276517, 1e-15);
}

TEST(EvalField, DirichletBoundaryIsExactlyZero) {
    const RandomField f = sample_field(kDirichlet20, 8);
    for (double t : {0.0, 0.3, 0.77, 1.0}) {
        EXPECT_EQ(eval_field(f, Point{0.0, t}).u, 0.0);
        EXPECT_EQ(eval_field(f, Point{1.0, t}).u, 0.0);
        EXPECT_EQ(eval_field(f, Point{t, 0.0}).u, 0.0);
        EXPECT_EQ(eval_field(f, Point{t, 1.0}).u, 0.0);
    }
}

TEST(EvalField, Linearity) {
    const FieldSpec spec{BoundaryCondition::Neumann, 9, 9, 3};
    const RandomField a = sample_field(spec, 0);
    const RandomField b = sample_field(spec, 1);
    const RandomField sum = RandomField::combine(1.0, a, 1.0, b);
    for (Point p : {Point{0.11, 0.52}, Point{0.5, 0.5}, Point{0.93, 0.07}}) {
        const BasisValue va = eval_field(a, p), vb = eval_field(b, p), vs = eval_field(sum, p);
        const double scale = std::max({std::abs(va.uxx), std::abs(vb.uxx), 1.0});
        EXPECT_NEAR(vs.u, va.u + vb.u, 1e-12 * std::max({std::abs(va.u), std::abs(vb.u), 1.0}));
        EXPECT_NEAR(vs.uxx, va.uxx + vb.uxx, 1e-12 * scale);
    }
}

TEST(TensorEvaluator, AgreesWithPointwiseSummation) {
    for (auto bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann}) {
        const RandomField f = sample_field({bc, 13, 13, 21}, 2);
        const Grid grid(17);
        const auto xs = grid.coords();
        const TensorEvaluator ev(bc, 20, xs, xs);
        const FieldGrids g = ev.evaluate(f, DerivativeSet::all());
        for (std::size_t k = 0; k < xs.size(); ++k) {
            for (std::size_t l = 0; l < xs.size(); ++l) {
                const BasisValue v = eval_field(f, Point{xs[k], xs[l]});
                const std::size_t at = k * xs.size() + l;
                const double tol = 1e-11 * 13 * 13 * kPi * kPi;
                EXPECT_NEAR(g.u[at], v.u, 1e-13);
                EXPECT_NEAR(g.ux[at], v.ux, tol);
                EXPECT_NEAR(g.uy[at], v.uy, tol);
                EXPECT_NEAR(g.uxx[at], v.uxx, tol);
                EXPECT_NEAR(g.uyy[at], v.uyy, tol);
                EXPECT_NEAR(g.uxy[at], v.uxy, tol);
            }
        }
    }
}

TEST(TensorEvaluator, DirichletGridBoundaryExactlyZero) {
    const Grid grid(64);
    const auto xs = grid.coords();
    const TensorEvaluator ev(BoundaryCondition::Dirichlet, 20, xs, xs);
    for (std::uint64_t idx = 0; idx < 10; ++idx) {
        const FieldGrids g = ev.evaluate(sample_field(kDirichlet20, idx), DerivativeSet{});
        const std::size_t n = xs.size();
        for (std::size_t k = 0; k < n; ++k) {
            EXPECT_EQ(g.u[k], 0.0);
            EXPECT_EQ(g.u[(n - 1) * n + k], 0.0);
            EXPECT_EQ(g.u[k * n], 0.0);
            EXPECT_EQ(g.u[k * n + n - 1], 0.0);
        }
    }
}

TEST(TensorEvaluator, RejectsMismatchedInputs) {
    const std::vector<double> xs{0.0, 0.5, 1.0};
    const TensorEvaluator ev(BoundaryCondition::Dirichlet, 3, xs, xs);
    EXPECT_THROW(ev.evaluate(RandomField(BoundaryCondition::Neumann, 2), {}), std::invalid_argument);
    EXPECT_THROW(ev.evaluate(RandomField(BoundaryCondition::Dirichlet, 4), {}), std::invalid_argument);
}

double trapezoid_mean(const RandomField& f, std::size_t s) {
    const Grid grid(s);
    const auto xs = grid.coords();
    const TensorEvaluator ev(f.bc(), f.truncation(), xs, xs);
    const FieldGrids g = ev.evaluate(f, DerivativeSet{});
    const double h = grid.spacing();
    double total = 0.0;
    for (std::size_t k = 0; k < s; ++k) {
        for (std::size_t l = 0; l < s; ++l) {
            const double wk = (k == 0 || k == s - 1) ? 0.5 : 1.0;
            const double wl = (l == 0 || l == s - 1) ? 0.5 : 1.0;
            total += wk * wl * g.u[k * s + l];
        }
    }
    return total * h * h;
}

TEST(NeumannField, IntegratesToZero) {
    // The trapezoid rule integrates cos(k pi x) exactly on these grids, so the
    // discrete mean is zero to rounding rather than merely O(h^2).
    for (std::uint64_t idx = 0; idx < 10; ++idx) {
        const RandomField f = sample_field({BoundaryCondition::Neumann, 1, 20, 4}, idx);
        for (std::size_t s : {33, 65, 129}) EXPECT_LE(std::abs(trapezoid_mean(f, s)), 1e-13);
    }
}

int midline_sign_changes(const RandomField& f) {
    constexpr int samples = 401;
    int changes = 0;
    double prev = 0.0;
    for (int k = 1; k < samples - 1; ++k) {
        const double v = eval_field(f, Point{double(k) / (samples - 1), 0.5}).u;
        if (prev != 0.0 && v != 0.0 && (v > 0) != (prev > 0)) ++changes;
        if (v != 0.0) prev = v;
    }
    return changes;
}

TEST(SampleField, HigherTruncationOscillatesMore) {
    double low = 0.0, high = 0.0;
    for (std::uint64_t idx = 0; idx < 100; ++idx) {
        low += midline_sign_changes(sample_field({BoundaryCondition::Dirichlet, 5, 5, 31}, idx));
        high += midline_sign_changes(sample_field({BoundaryCondition::Dirichlet, 20, 20, 31}, idx));
    }
    EXPECT_GT(high / 100, low / 100);
}

}  // namespace
}  // namespace opgen
