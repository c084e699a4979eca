// SPDX-License-Identifier: Apache-2.0
#include "opgen/verifier.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include <nlohmann/json.hpp>

namespace opgen::verify {
namespace {

namespace fs = std::filesystem;

RandomField single_mode(BoundaryCondition bc, int i, int j, int truncation = 0) {
    RandomField f(bc, truncation > 0 ? truncation : std::max(i, j));
    f.set_coeff(i, j, 1.0);
    return f;
}

std::vector<double> sample_u(const RandomField& field, const Grid& grid) {
    const auto xs = grid.coords();
    const TensorEvaluator ev(field.bc(), field.truncation(), xs, xs);
    return ev.evaluate(field, DerivativeSet{true, false, false, false, false, false}).u;
}

TEST(FdApply, LaplacianOfSineProductConvergesAtSecondOrder) {
    const auto bc = BoundaryCondition::Dirichlet;
    const RandomField field = single_mode(bc, 1, 1);
    std::vector<double> errors;
    for (std::size_t n : {33, 65}) {
        const Grid g(n);
        const auto u = sample_u(field, g);
        const auto lap = fd_apply(u, n, g.spacing(), PoissonOperator{});
        const auto interior = interior_of(u, n);
        double err = 0.0;
        for (std::size_t k = 0; k < lap.size(); ++k) {
            // -Laplace(u) = 2 pi^2 u for the (1,1) mode
            err = std::max(err, std::abs(lap[k] - 2 * kPi * kPi * interior[k]));
        }
        errors.push_back(err);
    }
    EXPECT_LT(errors[0], 5e-3);
    EXPECT_NEAR(std::log2(errors[0] / errors[1]), 2.0, 0.1);
}

TEST(FdApply, ZeroFieldValues) {
    const std::size_t n = 9;
    const std::vector<double> u(n * n, 0.0);
    for (double v : fd_apply(u, n, 0.125, PoissonOperator{})) EXPECT_EQ(v, 0.0);
    for (double v : fd_apply(u, n, 0.125, SemilinearOperator{})) EXPECT_EQ(v, 1.0);
    for (double v : fd_apply(u, n, 0.125, DivergenceFormOperator{CoefficientMatrix::fixed()})) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(fd_apply(u, n, 0.125, PoissonOperator{}).size(), 49u);
}

TEST(FdApply, RejectsTinyGrids) {
    const std::vector<double> u(4, 0.0);
    EXPECT_THROW(fd_apply(u, 2, 1.0, PoissonOperator{}), std::invalid_argument);
}

TEST(ConvergenceCheck, SingleModeOrderIsNearTwo) {
    for (auto bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann}) {
        const RandomField field = single_mode(bc, 2, 3);
        for (auto family : {OperatorFamily::Poisson, OperatorFamily::DivergenceFixed, OperatorFamily::Semilinear}) {
            const ResidualReport r = convergence_check(field, operator_for_sample(family, 0, 0), family, Grid(64));
            ASSERT_TRUE(r.order.has_value());
            EXPECT_GE(*r.order, kOrderMin);
            EXPECT_LE(*r.order, kOrderMax);
            EXPECT_TRUE(r.passed) << r.failure;
            ASSERT_TRUE(r.fine.has_value());
            EXPECT_EQ(r.fine->resolution, 127u);
        }
    }
}

TEST(ConvergenceCheck, ZeroFieldHasNoResidual) {
    const RandomField field(BoundaryCondition::Dirichlet, 4);
    const ResidualReport r = convergence_check(field, PoissonOperator{}, OperatorFamily::Poisson, Grid(32));
    EXPECT_EQ(r.coarse.max_residual, 0.0);
    EXPECT_FALSE(r.order.has_value());
    EXPECT_TRUE(r.passed);
}

TEST(ResidualConstant, CoversSingleModeCalibration) {
    // The fundamental mode sits at the calibration point: bound = 2x measured.
    const Grid g(64);
    for (auto family : {OperatorFamily::Poisson, OperatorFamily::DivergenceFixed}) {
        const auto op = operator_for_sample(family, 0, 0);
        const ResidualReport r = convergence_check(single_mode(BoundaryCondition::Dirichlet, 1, 1), op, family, g);
        EXPECT_LE(r.coarse.max_residual, r.coarse.bound);
        EXPECT_GE(r.coarse.max_residual, 0.3 * r.coarse.bound);
    }
    const auto stiff = DivergenceFormOperator{CoefficientMatrix::diagonal_linear({5, 5, 5, 5})};
    const ResidualReport r = convergence_check(single_mode(BoundaryCondition::Dirichlet, 1, 1), stiff,
                                               OperatorFamily::DivergenceParametric, g);
    EXPECT_LE(r.coarse.max_residual, r.coarse.bound);
}

TEST(DstPoissonInverse, RecoversSingleMode) {
    const std::size_t s = 32;
    const RandomField field = single_mode(BoundaryCondition::Dirichlet, 3, 5);
    const Grid interior(s, false);
    const auto xs = interior.coords();
    const TensorEvaluator ev(field.bc(), field.truncation(), xs, xs);
    const FieldGrids grids = ev.evaluate(field, DerivativeSet::laplacian());
    std::vector<double> f(grids.u.size());
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = -(grids.uxx[k] + grids.uyy[k]);
    const auto u = dst_poisson_inverse(f, s - 1);
    ASSERT_EQ(u.size(), grids.u.size());
    double scale = 0.0;
    for (double v : grids.u) scale = std::max(scale, std::abs(v));
    for (std::size_t k = 0; k < u.size(); ++k) EXPECT_NEAR(u[k], grids.u[k], 1e-10 * scale);
}

TEST(DstPoissonInverse, RecoversRandomFieldUpToTruncation20) {
    const FieldSpec spec{BoundaryCondition::Dirichlet, 20, 20, 99};
    const RandomField field = sample_field(spec, 3);
    const Grid interior(64, false);
    const auto xs = interior.coords();
    const TensorEvaluator ev(field.bc(), 20, xs, xs);
    const FieldGrids grids = ev.evaluate(field, DerivativeSet::laplacian());
    std::vector<double> f(grids.u.size());
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = -(grids.uxx[k] + grids.uyy[k]);
    const auto u = dst_poisson_inverse(f, 63);
    double scale = 0.0, err = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        scale = std::max(scale, std::abs(grids.u[k]));
        err = std::max(err, std::abs(u[k] - grids.u[k]));
    }
    EXPECT_LE(err, 1e-10 * scale);
}

TEST(DstPoissonInverse, ZeroAndNeumann) {
    const std::vector<double> zero(49, 0.0);
    for (double v : dst_poisson_inverse(zero, 7)) EXPECT_EQ(v, 0.0);
    EXPECT_THROW(dst_poisson_inverse(zero, 7, BoundaryCondition::Neumann), std::invalid_argument);
}

TEST(H1InnerProduct, BasisGramValues) {
    const Grid g(129);
    const auto bc = BoundaryCondition::Dirichlet;
    const RandomField u11 = single_mode(bc, 1, 1, 2);
    const RandomField u12 = single_mode(bc, 1, 2, 2);
    // |grad phi_ij|^2 integrates to lambda/4, and phi_ij carries 1/sqrt(lambda).
    EXPECT_NEAR(h1_inner_product(u11, u11, g), 0.25, 1e-12);
    EXPECT_NEAR(h1_inner_product(u11, u12, g), 0.0, 1e-12);
    EXPECT_EQ(h1_inner_product(RandomField(bc, 2), u11, g), 0.0);
}

TEST(H1InnerProduct, SymmetricAndBilinear) {
    const FieldSpec spec{BoundaryCondition::Neumann, 6, 6, 5};
    const RandomField a = sample_field(spec, 0);
    const RandomField b = sample_field(spec, 1);
    const Grid g(33);
    EXPECT_NEAR(h1_inner_product(a, b, g), h1_inner_product(b, a, g), 1e-13);
    const RandomField c = RandomField::combine(2.0, a, -3.0, b);
    EXPECT_NEAR(h1_inner_product(c, a, g), 2 * h1_inner_product(a, a, g) - 3 * h1_inner_product(b, a, g), 1e-12);
}

TEST(H1GramMatrix, IsQuarterIdentityForBothConditions) {
    for (auto bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann}) {
        const auto gram = h1_gram_matrix(bc, 4, Grid(65));
        ASSERT_EQ(gram.size(), 256u);
        for (std::size_t r = 0; r < 16; ++r) {
            for (std::size_t c = 0; c < 16; ++c) EXPECT_NEAR(gram[r * 16 + c], r == c ? 0.25 : 0.0, 1e-12);
        }
    }
}

class StoredDataset : public ::testing::Test {
protected:
    void SetUp() override {
        std::random_device rd;
        dir_ = fs::temp_directory_path() / ("opgen_verify_" + std::to_string(rd()));
    }
    void TearDown() override {
        std::error_code ec;
        fs::remove_all(dir_, ec);
    }
    DatasetReader make(OperatorFamily family, BoundaryCondition bc, Precision precision) {
        fs::remove_all(dir_);
        GenerateOptions o;
        o.spec = {bc, 1, 10, 17};
        o.family = family;
        o.grid = Grid(33);
        o.n_samples = 6;
        o.precision = precision;
        o.out_dir = dir_;
        o.workers = 1;
        generate_dataset(o);
        return DatasetReader(dir_ / "manifest.json");
    }
    fs::path dir_;
};

TEST_F(StoredDataset, EveryFamilyPassesVerification) {
    for (auto family : {OperatorFamily::Poisson, OperatorFamily::DivergenceFixed,
                        OperatorFamily::DivergenceParametric, OperatorFamily::Semilinear}) {
        for (auto bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann}) {
            const DatasetReader reader = make(family, bc, Precision::F32);
            const VerifySummary s = verify_dataset(reader, true, 2);
            EXPECT_EQ(s.failed, 0u) << to_string(family) << " " << to_string(bc);
            EXPECT_EQ(s.reports.size(), 6u);
            for (std::size_t k = 0; k < s.reports.size(); ++k) EXPECT_EQ(s.reports[k].index, k);
        }
    }
}

TEST_F(StoredDataset, DstCheckRunsForDirichletPoisson) {
    const DatasetReader reader = make(OperatorFamily::Poisson, BoundaryCondition::Dirichlet, Precision::F64);
    const ResidualReport r = residual_check(reader.read(2), reader.manifest(), false);
    ASSERT_TRUE(r.dst_max_rel_error.has_value());
    EXPECT_LE(*r.dst_max_rel_error, 1e-10);
    EXPECT_FALSE(r.fine.has_value());
    EXPECT_TRUE(r.passed) << r.failure;
}

TEST_F(StoredDataset, CorruptedRhsFails) {
    const DatasetReader reader = make(OperatorFamily::DivergenceFixed, BoundaryCondition::Neumann, Precision::F32);
    SampleRecord rec = reader.read(1);
    rec.f[5 * 33 + 7] += 1.0;
    const ResidualReport r = residual_check(rec, reader.manifest(), true);
    EXPECT_FALSE(r.data_ok);
    EXPECT_FALSE(r.passed);
    EXPECT_FALSE(r.failure.empty());
}

TEST_F(StoredDataset, MetadataMismatchFails) {
    const DatasetReader reader = make(OperatorFamily::Poisson, BoundaryCondition::Dirichlet, Precision::F32);
    SampleRecord rec = reader.read(0);
    rec.truncation += 1;
    const ResidualReport r = residual_check(rec, reader.manifest(), false);
    EXPECT_FALSE(r.metadata_ok);
    EXPECT_FALSE(r.passed);
}

TEST_F(StoredDataset, SummaryJsonReportsCounts) {
    const DatasetReader reader = make(OperatorFamily::Semilinear, BoundaryCondition::Dirichlet, Precision::F32);
    const VerifySummary s = verify_dataset(reader, true, 1);
    const auto j = nlohmann::json::parse(summary_to_json(s, reader.manifest(), true));
    EXPECT_EQ(j["summary"]["passed"], 6);
    EXPECT_EQ(j["summary"]["failed"], 0);
    EXPECT_TRUE(j["refine"].get<bool>());
    ASSERT_TRUE(s.median_order.has_value());
    EXPECT_NEAR(*s.median_order, 2.0, 0.1);
}

}  // namespace
}  // namespace opgen::verify
