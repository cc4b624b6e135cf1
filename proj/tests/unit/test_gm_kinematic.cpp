#include "fluctrack/errors.hpp"
#include "fluctrack/gm_kinematic.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>

using namespace fluctrack;

namespace {

LinearGaussianModel unit_model() {
    auto m = LinearGaussianModel::constant_velocity(1.0, 0.0, 1.0);
    return m;
}

GaussianComponent component(double w, double x, double y, double var = 1.0) {
    GaussianComponent c;
    c.weight = w;
    c.mean << x, 0, y, 0;
    c.covariance = Matrix4::Identity() * var;
    return c;
}

bool symmetric_pd(const Matrix4& p) {
    if (!p.isApprox(p.transpose(), 1e-12)) {
        return false;
    }
    Eigen::SelfAdjointEigenSolver<Matrix4> es(p);
    return es.eigenvalues().minCoeff() > 0.0;
}

}  // namespace

TEST(UpdateKinematic, ScalarKalmanAnalogue) {
    // Each position axis is the scalar problem H = 1, R = 1, N(0, 1), z = 1 (x) or 0 (y).
    GaussianMixture gm;
    gm.components = {component(1.0, 0.0, 0.0)};
    const auto out = update_kinematic(gm, Vector2(1.0, 0.0), unit_model());
    const auto& c = out.posterior.components[0];
    EXPECT_NEAR(c.mean(0), 0.5, 1e-12);
    EXPECT_NEAR(c.covariance(0, 0), 0.5, 1e-12);
    EXPECT_NEAR(c.mean(2), 0.0, 1e-12);
    EXPECT_NEAR(c.covariance(2, 2), 0.5, 1e-12);
    // Velocities are uncorrelated with position here, so they are untouched.
    EXPECT_NEAR(c.covariance(1, 1), 1.0, 1e-12);
    const double n1 = std::exp(-0.25) / std::sqrt(2.0 * std::numbers::pi * 2.0);
    const double n0 = 1.0 / std::sqrt(2.0 * std::numbers::pi * 2.0);
    ASSERT_EQ(out.likelihoods.size(), 1u);
    EXPECT_NEAR(out.likelihoods[0], n1 * n0, 1e-14);
}

TEST(UpdateKinematic, MeasurementAtMeanShrinksCovariance) {
    GaussianMixture gm;
    gm.components = {component(1.0, 3.0, -2.0, 9.0)};
    const auto out = update_kinematic(gm, Vector2(3.0, -2.0), unit_model());
    const auto& c = out.posterior.components[0];
    EXPECT_TRUE(c.mean.isApprox(gm.components[0].mean));
    EXPECT_LT(c.covariance(0, 0), 9.0);
    EXPECT_LT(c.covariance(2, 2), 9.0);
}

TEST(UpdateKinematic, LikelihoodDominance) {
    GaussianMixture gm;
    gm.components = {component(0.5, 0.0, 0.0), component(0.5, 5.0, 0.0)};
    const auto out = update_kinematic(gm, Vector2(0.0, 0.0), unit_model());
    EXPECT_GT(out.posterior.components[0].weight, 0.5);
    EXPECT_NEAR(out.posterior.total_weight(), 1.0, 1e-12);
    EXPECT_GT(out.likelihoods[0], out.likelihoods[1]);
}

TEST(UpdateKinematic, PrecomputedInnovationsGiveSameResult) {
    const auto model = LinearGaussianModel::constant_velocity(1.0, 10.0, 20.0);
    GaussianMixture gm;
    gm.components = {component(0.3, 100.0, 50.0, 400.0), component(0.7, 130.0, 40.0, 900.0)};
    const Vector2 z(110.0, 45.0);
    const auto direct = update_kinematic(gm, z, model);
    const auto cached = update_kinematic(gm, precompute_innovations(gm, model), z);
    for (std::size_t i = 0; i < gm.size(); ++i) {
        EXPECT_NEAR(direct.likelihoods[i], cached.likelihoods[i], 1e-18);
        EXPECT_TRUE(direct.posterior.components[i].mean.isApprox(cached.posterior.components[i].mean));
    }
}

TEST(UpdateKinematic, SingularInnovationThrows) {
    LinearGaussianModel m;
    m.observation << 1, 0, 0, 0, 0, 0, 1, 0;
    m.observation_noise = Matrix2::Zero();
    GaussianMixture gm;
    GaussianComponent c = component(1.0, 0.0, 0.0);
    c.covariance = Matrix4::Zero();
    gm.components = {c};
    EXPECT_THROW(update_kinematic(gm, Vector2(0.0, 0.0), m), NumericalError);
}

TEST(UpdateKinematic, RandomUpdatesStaySymmetricPd) {
    const auto model = LinearGaussianModel::constant_velocity(1.0, 10.0, 20.0);
    std::mt19937_64 rng(12);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::Matrix4d a;
        for (int i = 0; i < 16; ++i) {
            a(i / 4, i % 4) = n(rng);
        }
        GaussianMixture gm;
        GaussianComponent c;
        c.weight = 1.0;
        c.covariance = a * a.transpose() * 100.0 + Matrix4::Identity();
        gm.components = {c};
        const auto out = update_kinematic(gm, Vector2(n(rng) * 50.0, n(rng) * 50.0), model);
        EXPECT_TRUE(symmetric_pd(out.posterior.components[0].covariance));
        EXPECT_NEAR(out.posterior.total_weight(), 1.0, 1e-9);
    }
}

TEST(TruncateMixture, FarApartIsIdentity) {
    GaussianMixture gm;
    gm.components = {component(0.6, 0.0, 0.0), component(0.4, 100.0, 0.0)};
    const auto out = truncate_mixture(gm, 1e-5, 4.0, 100);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_DOUBLE_EQ(out.components[0].weight, 0.6);
    EXPECT_TRUE(out.components[1].mean.isApprox(gm.components[1].mean));
}

TEST(TruncateMixture, IdenticalComponentsMerge) {
    GaussianMixture gm;
    gm.components = {component(0.25, 1.0, 2.0), component(0.25, 1.0, 2.0)};
    const auto out = truncate_mixture(gm, 0.0, 4.0, 100);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_DOUBLE_EQ(out.components[0].weight, 1.0);
    EXPECT_TRUE(out.components[0].mean.isApprox(gm.components[0].mean));
    EXPECT_TRUE(out.components[0].covariance.isApprox(gm.components[0].covariance));
}

TEST(TruncateMixture, MergeIsMomentPreserving) {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        GaussianMixture gm;
        for (int i = 0; i < 6; ++i) {
            auto c = component(0.1 + std::abs(n(rng)), 0.3 * n(rng), 0.3 * n(rng), 2.0);
            c.mean(1) = 0.3 * n(rng);
            gm.components.push_back(c);
        }
        gm.normalize();
        // Huge merge radius collapses everything into one component.
        const auto out = truncate_mixture(gm, 0.0, 1e9, 100);
        ASSERT_EQ(out.size(), 1u);
        EXPECT_TRUE(out.mean().isApprox(gm.mean(), 1e-9));
        EXPECT_LT((out.covariance() - gm.covariance()).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(TruncateMixture, PruneAndCap) {
    GaussianMixture gm;
    gm.components = {component(0.5, 0, 0), component(1e-7, 50, 0), component(0.3, 100, 0), component(0.2, 200, 0)};
    auto out = truncate_mixture(gm, 1e-5, 4.0, 100);
    EXPECT_EQ(out.size(), 3u);
    out = truncate_mixture(gm, 1e-5, 4.0, 2);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_NEAR(out.components[0].weight, 0.5 / 0.8, 1e-12);
    EXPECT_NEAR(out.total_weight(), 1.0, 1e-12);
}

TEST(TruncateMixture, NullThresholdsLeaveUpdateUntouched) {
    const auto model = LinearGaussianModel::constant_velocity(1.0, 10.0, 20.0);
    GaussianMixture gm;
    gm.components = {component(0.4, 0.0, 0.0, 400.0), component(0.6, 300.0, 0.0, 400.0)};
    const auto updated = update_kinematic(gm, Vector2(10.0, 5.0), model).posterior;
    const auto out = truncate_mixture(updated, 0.0, 0.0, 100);
    ASSERT_EQ(out.size(), updated.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        EXPECT_NEAR(out.components[i].weight, updated.components[i].weight, 1e-15);
        EXPECT_EQ(out.components[i].mean, updated.components[i].mean);
        EXPECT_EQ(out.components[i].covariance, updated.components[i].covariance);
    }
}
