#include "fluctrack/errors.hpp"
#include "fluctrack/rfs_core.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace fluctrack;

namespace {

LmbDensity make_density(const std::vector<double>& existence) {
    LmbDensity d;
    for (std::size_t i = 0; i < existence.size(); ++i) {
        LabeledTrack t;
        t.label = Label{1, static_cast<std::int32_t>(i)};
        t.existence = existence[i];
        d.tracks.push_back(t);
    }
    return d;
}

}  // namespace

TEST(Label, RoundTripsThroughText) {
    const Label l{12, 3};
    EXPECT_EQ(to_string(l), "t12.3");
    EXPECT_EQ(parse_label("t12.3"), l);
    EXPECT_EQ(parse_label(to_string(Label{-1, 7})), (Label{-1, 7}));
    EXPECT_THROW(parse_label("12.3"), DomainError);
    EXPECT_THROW(parse_label("t12"), DomainError);
    EXPECT_THROW(parse_label("t1.2x"), DomainError);
}

TEST(LmbSubsetWeight, SingleTrack) {
    const auto d = make_density({0.5});
    EXPECT_DOUBLE_EQ(lmb_subset_weight(d, {}), 0.5);
    EXPECT_DOUBLE_EQ(lmb_subset_weight(d, {Label{1, 0}}), 0.5);
}

TEST(LmbSubsetWeight, TwoTracksDirectProduct) {
    const auto d = make_density({0.2, 0.9});
    EXPECT_NEAR(lmb_subset_weight(d, {Label{1, 1}}), 0.72, 1e-15);
}

TEST(LmbSubsetWeight, UnknownLabelThrows) {
    const auto d = make_density({0.2});
    EXPECT_THROW(lmb_subset_weight(d, {Label{9, 9}}), DomainError);
}

TEST(LmbSubsetWeight, SumsToOneOverAllSubsets) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int n = 0; n <= 10; ++n) {
        std::vector<double> r(n);
        for (auto& x : r) {
            x = u(rng);
        }
        const auto d = make_density(r);
        double total = 0.0;
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            std::set<Label> subset;
            for (int i = 0; i < n; ++i) {
                if (mask & (1u << i)) {
                    subset.insert(Label{1, i});
                }
            }
            total += lmb_subset_weight(d, subset);
        }
        EXPECT_NEAR(total, 1.0, 1e-9) << "n = " << n;
    }
}

TEST(LmbSubsetWeight, InvariantUnderTrackReordering) {
    auto d = make_density({0.1, 0.5, 0.8, 0.3});
    const std::set<Label> subset{Label{1, 0}, Label{1, 2}};
    const double before = lmb_subset_weight(d, subset);
    std::reverse(d.tracks.begin(), d.tracks.end());
    EXPECT_DOUBLE_EQ(lmb_subset_weight(d, subset), before);
}

TEST(MapCardinality, Examples) {
    auto est = map_estimate_cardinality(make_density({0.9, 0.2}));
    EXPECT_EQ(est.count, 1u);
    ASSERT_EQ(est.labels.size(), 1u);
    EXPECT_EQ(est.labels[0], (Label{1, 0}));

    EXPECT_EQ(map_estimate_cardinality(LmbDensity{}).count, 0u);

    est = map_estimate_cardinality(make_density({0.5 + 1e-12, 0.5 - 1e-12}));
    EXPECT_EQ(est.count, 1u);
    EXPECT_EQ(est.labels[0], (Label{1, 0}));
}

TEST(MapCardinality, LabelsSortedByExistence) {
    const auto est = map_estimate_cardinality(make_density({0.6, 0.95, 0.7}));
    ASSERT_EQ(est.count, 3u);
    EXPECT_EQ(est.labels[0], (Label{1, 1}));
    EXPECT_EQ(est.labels[1], (Label{1, 2}));
    EXPECT_EQ(est.labels[2], (Label{1, 0}));
}

TEST(GaussianMixture, MomentsAndNormalization) {
    GaussianMixture gm;
    GaussianComponent a;
    a.weight = 1.0;
    a.mean << 0, 0, 0, 0;
    GaussianComponent b;
    b.weight = 3.0;
    b.mean << 4, 0, 0, 0;
    gm.components = {a, b};
    gm.normalize();
    EXPECT_DOUBLE_EQ(gm.total_weight(), 1.0);
    EXPECT_DOUBLE_EQ(gm.mean()(0), 3.0);
    // Within-component variance 1 plus spread 0.25*9 + 0.75*1 = 3.
    EXPECT_NEAR(gm.covariance()(0, 0), 4.0, 1e-12);
    EXPECT_DOUBLE_EQ(gm.dominant().mean(0), 4.0);
    EXPECT_THROW(static_cast<void>(GaussianMixture{}.dominant()), DomainError);

    GaussianMixture zero;
    zero.components = {GaussianComponent{}};
    zero.normalize();
    EXPECT_EQ(zero.components[0].weight, 0.0);
}

TEST(GammaDensity, PdfMatchesClosedForm) {
    const GammaDensity g{3.0, 2.0};
    // 2^3 x^2 e^{-2x} / Gamma(3) at x = 1.5
    EXPECT_NEAR(g.pdf(1.5), 8.0 * 2.25 * std::exp(-3.0) / 2.0, 1e-14);
    EXPECT_EQ(g.pdf(-1.0), 0.0);
    EXPECT_DOUBLE_EQ(g.mean(), 1.5);
    EXPECT_DOUBLE_EQ(g.variance(), 0.75);
}

TEST(SnrParticleSet, Normalize) {
    SnrParticleSet ps;
    ps.particles = {{1.0, 2.0}, {2.0, 6.0}};
    ps.normalize();
    EXPECT_DOUBLE_EQ(ps.particles[0].weight, 0.25);
    EXPECT_DOUBLE_EQ(ps.total_weight(), 1.0);
}
