#include "oracles.hpp"

#include "fluctrack/amplitude.hpp"
#include "fluctrack/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace fluctrack;

namespace {

const SwerlingModel kS1{SwerlingKind::One, 2.0};
const SwerlingModel kS3{SwerlingKind::Three, 2.0};
const double kD15 = std::pow(10.0, 1.5) - 1.0;

}  // namespace

TEST(SnrConversion, OnePlusDConvention) {
    EXPECT_NEAR(db_to_snr(15.0), 30.6227766, 1e-7);
    EXPECT_NEAR(snr_to_db(kD15), 15.0, 1e-12);
    EXPECT_DOUBLE_EQ(snr_to_db(0.0), 0.0);
}

TEST(DetectionProbability, ClosedFormValues) {
    for (const auto kind : {SwerlingKind::One, SwerlingKind::Three}) {
        for (const double d : {0.0, 3.0, 300.0}) {
            EXPECT_DOUBLE_EQ(detection_probability(d, SwerlingModel{kind, 0.0}), 1.0);
        }
    }
    EXPECT_NEAR(detection_probability(0.0, kS1), std::exp(-2.0), 1e-15);
    EXPECT_NEAR(detection_probability(0.0, kS1), 0.13534, 1e-5);
    // exp(-4 / 63.2456) evaluated independently in double precision.
    EXPECT_NEAR(detection_probability(kD15, kS1), 0.9387129414, 1e-10);
}

TEST(DetectionProbability, MonotoneInSnrAndThreshold) {
    for (const auto kind : {SwerlingKind::One, SwerlingKind::Three}) {
        double previous = 0.0;
        for (double d = 0.0; d < 200.0; d += 0.5) {
            const double pd = detection_probability(d, SwerlingModel{kind, 2.0});
            EXPECT_GE(pd, previous);
            previous = pd;
        }
        previous = 1.0;
        for (double tau = 0.0; tau < 10.0; tau += 0.1) {
            const double pd = detection_probability(5.0, SwerlingModel{kind, tau});
            EXPECT_LE(pd, previous);
            previous = pd;
        }
    }
}

class AmplitudeGrid : public ::testing::TestWithParam<std::tuple<SwerlingKind, double, double>> {};

TEST_P(AmplitudeGrid, DetectionProbabilityIsTailOfRawDensity) {
    const auto [kind, d, tau] = GetParam();
    const SwerlingModel model{kind, tau};
    const double tail = oracle::integrate([&](double a) { return raw_amplitude_pdf(a, d, model); }, tau, oracle::kInf);
    EXPECT_NEAR(detection_probability(d, model), tail, 1e-8);
}

TEST_P(AmplitudeGrid, LikelihoodIntegratesToOne) {
    const auto [kind, d, tau] = GetParam();
    const SwerlingModel model{kind, tau};
    const double mass = oracle::integrate(
        [&](double a) { return a > tau ? amplitude_likelihood(a, d, model) : 0.0; }, tau, oracle::kInf);
    EXPECT_NEAR(mass, 1.0, 1e-8);
}

INSTANTIATE_TEST_SUITE_P(Grid, AmplitudeGrid,
                         ::testing::Combine(::testing::Values(SwerlingKind::One, SwerlingKind::Three),
                                            ::testing::Values(0.0, 5.0, 30.0), ::testing::Values(0.5, 2.0)));

TEST(AmplitudeLikelihood, BoundaryAndClutter) {
    EXPECT_NEAR(amplitude_likelihood(2.0 + 1e-12, 0.0, kS1), 2.0, 1e-9);
    for (const auto& model : {kS1, kS3, SwerlingModel{SwerlingKind::One, 0.5}, SwerlingModel{SwerlingKind::Three, 0.5}}) {
        for (const double a : {2.1, 3.0, 7.5}) {
            EXPECT_EQ(amplitude_likelihood(a, 0.0, model), clutter_amplitude_pdf(a, model));
        }
    }
    EXPECT_THROW(amplitude_likelihood(2.0, 1.0, kS1), DomainError);
    EXPECT_THROW(amplitude_likelihood(1.0, 1.0, kS3), DomainError);
}

TEST(AmplitudeLikelihood, LogFormMatchesRatio) {
    for (const auto& model : {kS1, kS3}) {
        for (const double d : {0.0, 4.0, 120.0}) {
            const double a = 5.3;
            const double expected = raw_amplitude_pdf(a, d, model) / detection_probability(d, model);
            EXPECT_NEAR(amplitude_likelihood(a, d, model), expected, 1e-12 * expected);
        }
    }
}

TEST(SampleAmplitude, Swerling1MatchesLikelihoodByKs) {
    Rng rng(21);
    std::vector<double> xs(100000);
    for (auto& x : xs) {
        x = sample_amplitude(kD15, kS1, rng);
        ASSERT_GT(x, 2.0);
    }
    const double s = 1.0 + kD15;
    const auto cdf = [&](double a) { return 1.0 - std::exp((4.0 - a * a) / (2.0 * s)); };
    EXPECT_GT(oracle::ks_p_value(oracle::ks_statistic(xs, cdf)), 0.01);
}

TEST(SampleAmplitude, Swerling3MeanMatchesQuadrature) {
    Rng rng(22);
    const int n = 100000;
    double sum = 0.0;
    double sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double a = sample_amplitude(kD15, kS3, rng);
        ASSERT_GT(a, 2.0);
        sum += a;
        sum2 += a * a;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sum2 / n - mean * mean);
    const double expected =
        oracle::integrate([&](double a) { return a > 2.0 ? a * amplitude_likelihood(a, kD15, kS3) : 0.0; }, 2.0,
                          oracle::kInf);
    EXPECT_NEAR(mean, expected, 3.0 * sd / std::sqrt(static_cast<double>(n)));
}

TEST(SampleAmplitude, Swerling3MoreConcentratedThanSwerling1) {
    Rng rng(23);
    const auto variance = [&](const SwerlingModel& model) {
        double sum = 0.0;
        double sum2 = 0.0;
        const int n = 50000;
        for (int i = 0; i < n; ++i) {
            const double a = sample_amplitude(kD15, model, rng);
            sum += a;
            sum2 += a * a;
        }
        return sum2 / n - (sum / n) * (sum / n);
    };
    EXPECT_LT(variance(kS3), variance(kS1));
}

TEST(SampleAmplitude, ThresholdEndpoint) {
    // Inverse CDF at u -> 1 returns tau.
    const double s = 1.0 + kD15;
    const double u = 1.0 - 1e-15;
    EXPECT_NEAR(std::sqrt(4.0 - 2.0 * s * std::log(u)), 2.0, 1e-6);
}

TEST(MarginalizedRatio, DegenerateIntervalIsPointRatio) {
    for (const auto& model : {kS1, kS3}) {
        const double a = 4.2;
        const double expected = amplitude_likelihood(a, db_to_snr(15.0), model) / clutter_amplitude_pdf(a, model);
        EXPECT_NEAR(marginalized_amplitude_likelihood_ratio(a, model, {15.0, 15.0}), expected, 1e-12 * expected);
    }
}

TEST(MarginalizedRatio, BrightAmplitudesDominateClutter) {
    EXPECT_LT(marginalized_amplitude_likelihood_ratio(2.0 + 1e-6, kS1, {10.0, 40.0}),
              marginalized_amplitude_likelihood_ratio(8.0, kS1, {10.0, 40.0}));
}

TEST(MarginalizedRatio, RefinementOracle) {
    const double coarse = marginalized_amplitude_likelihood_ratio(6.9, kS1, {10.0, 40.0}, 0.1);
    const double fine = marginalized_amplitude_likelihood_ratio(6.9, kS1, {10.0, 40.0}, 0.01);
    const double exact =
        oracle::integrate([](double db) { return amplitude_likelihood(6.9, db_to_snr(db), kS1); }, 10.0, 40.0) /
        30.0 / clutter_amplitude_pdf(6.9, kS1);
    // Trapezoid error is O(h^2): 0.1 dB sits near 1e-5 relative, 0.01 dB a hundred times closer.
    EXPECT_NEAR(coarse, exact, 1e-4 * exact);
    EXPECT_NEAR(fine, exact, 1e-6 * exact);
    EXPECT_LT(std::abs(fine - exact), std::abs(coarse - exact));
}

TEST(MarginalizedRatio, LogFormSurvivesClutterUnderflow) {
    // exp(-(a^2 - tau^2)/2) underflows at a = 40, the log form does not.
    const double log_ratio = log_marginalized_amplitude_likelihood_ratio(40.0, kS1, {10.0, 40.0});
    EXPECT_TRUE(std::isfinite(log_ratio));
    EXPECT_GT(log_ratio, 700.0);
    EXPECT_NEAR(log_marginalized_amplitude_likelihood_ratio(6.9, kS3, {10.0, 40.0}),
                std::log(marginalized_amplitude_likelihood_ratio(6.9, kS3, {10.0, 40.0})), 1e-12);
}
