#include "oracles.hpp"

#include "fluctrack/errors.hpp"
#include "fluctrack/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace fluctrack;

namespace {

LabeledPoint point(int birth, int idx, double x, double y) { return LabeledPoint{Label{birth, idx}, Vector2(x, y)}; }

std::vector<LabeledPoint> random_set(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> u(0.0, 80.0);
    std::uniform_int_distribution<int> lab(0, 4);
    std::vector<LabeledPoint> out;
    for (int i = 0; i < n; ++i) {
        out.push_back(point(1, lab(rng), u(rng), u(rng)));
    }
    return out;
}

// Direct evaluation over every injection of the smaller set, p = 1.
double brute_ospa(std::vector<LabeledPoint> x, std::vector<LabeledPoint> y, const OspaParams& p) {
    if (x.size() < y.size()) {
        std::swap(x, y);
    }
    const std::size_t n = x.size();
    const std::size_t m = y.size();
    if (n == 0) {
        return 0.0;
    }
    // pi* minimizes the cut-off distance sum; labeling is evaluated under that pi.
    Eigen::MatrixXd d(m, n);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            d(j, i) = std::min(p.cutoff, (x[i].position - y[j].position).norm());
        }
    }
    const double loc = oracle::brute_force_min_cost(d);
    return (loc + p.cutoff * static_cast<double>(n - m)) / static_cast<double>(n);
}

StateRecord record(int k, Label l, double x, double y, double snr_db = std::nan("")) {
    StateRecord r;
    r.k = k;
    r.label = l;
    r.state << x, 0.0, y, 0.0;
    r.snr_db = snr_db;
    return r;
}

}  // namespace

TEST(Ospa, IdenticalSetsAreZero) {
    const std::vector<LabeledPoint> x{point(1, 0, 0, 0), point(1, 1, 100, 5)};
    const auto r = ospa_labeled(x, x);
    EXPECT_EQ(r.total, 0.0);
    EXPECT_EQ(r.localization, 0.0);
    EXPECT_EQ(r.labeling, 0.0);
    EXPECT_EQ(r.cardinality, 0.0);
}

TEST(Ospa, MissingTargetIsPureCardinality) {
    const auto r = ospa_labeled({point(1, 0, 0, 0)}, {});
    EXPECT_DOUBLE_EQ(r.total, 30.0);
    EXPECT_DOUBLE_EQ(r.cardinality, 30.0);
    EXPECT_EQ(r.localization, 0.0);
    EXPECT_EQ(r.labeling, 0.0);
    EXPECT_EQ(ospa_labeled({}, {}).total, 0.0);
}

TEST(Ospa, WrongLabelIsPureLabeling) {
    const auto r = ospa_labeled({point(1, 0, 5, 5)}, {point(1, 1, 5, 5)});
    EXPECT_DOUBLE_EQ(r.total, 30.0);
    EXPECT_DOUBLE_EQ(r.labeling, 30.0);
    EXPECT_EQ(r.localization, 0.0);
    EXPECT_EQ(r.cardinality, 0.0);
}

TEST(Ospa, HandEvaluatedMixedCase) {
    // n = 2, m = 1: matched at distance 10 with correct label, one missed target.
    const auto r = ospa_labeled({point(1, 0, 0, 0), point(1, 1, 500, 0)}, {point(1, 0, 6, 8)});
    EXPECT_NEAR(r.localization, 5.0, 1e-12);
    EXPECT_NEAR(r.cardinality, 15.0, 1e-12);
    EXPECT_NEAR(r.total, 20.0, 1e-12);
}

TEST(Ospa, OrderTwo) {
    OspaParams p;
    p.order = 2.0;
    const auto r = ospa_labeled({point(1, 0, 0, 0), point(1, 1, 500, 0)}, {point(1, 0, 6, 8)}, p);
    EXPECT_NEAR(r.total, std::sqrt((100.0 + 900.0) / 2.0), 1e-12);
}

TEST(Ospa, PropertiesOnRandomSets) {
    std::mt19937_64 rng(9);
    const OspaParams p;
    for (int trial = 0; trial < 300; ++trial) {
        const auto x = random_set(rng, trial % 5);
        const auto y = random_set(rng, (trial / 5) % 5);
        const auto a = ospa_labeled(x, y, p);
        const auto b = ospa_labeled(y, x, p);
        EXPECT_EQ(a.total, b.total);
        EXPECT_NEAR(a.total, a.localization + a.labeling + a.cardinality, 1e-9);
        for (const double v : {a.localization, a.labeling, a.cardinality}) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, a.total + 1e-12);
        }
        EXPECT_LE(a.total, p.cutoff + p.label_penalty + 1e-9);
        EXPECT_NEAR(a.localization + a.cardinality, brute_ospa(x, y, p), 1e-9);

        // A common relabeling leaves the distance unchanged.
        auto xr = x;
        auto yr = y;
        for (auto& q : xr) {
            q.label = Label{7, 10 - q.label.birth_index};
        }
        for (auto& q : yr) {
            q.label = Label{7, 10 - q.label.birth_index};
        }
        EXPECT_NEAR(ospa_labeled(xr, yr, p).total, a.total, 1e-12);
    }
}

TEST(SnrRmse, Examples) {
    const std::vector<double> t{10.0, 12.0, 15.0};
    EXPECT_EQ(snr_rmse(t, t), 0.0);
    const std::vector<double> biased{12.0, 14.0, 17.0};
    EXPECT_NEAR(snr_rmse(t, biased), 2.0, 1e-12);
    const std::vector<double> a{0.0, 0.0};
    const std::vector<double> b{1.0, -1.0};
    EXPECT_NEAR(snr_rmse(a, b), 1.0, 1e-12);
    EXPECT_THROW(snr_rmse(std::vector<double>{}, std::vector<double>{}), DomainError);
    EXPECT_THROW(snr_rmse(a, t), DomainError);
}

TEST(LabelMapping, FollowsTrajectoriesNotNames) {
    std::vector<StateRecord> truth;
    std::vector<StateRecord> est;
    for (int k = 1; k <= 10; ++k) {
        truth.push_back(record(k, Label{1, 0}, 10.0 * k, 0.0));
        truth.push_back(record(k, Label{1, 1}, 10.0 * k, 1000.0));
        est.push_back(record(k, Label{2, 5}, 10.0 * k + 3.0, 1000.0));
        est.push_back(record(k, Label{2, 6}, 10.0 * k, 2.0));
        if (k > 5) {
            est.push_back(record(k, Label{6, 0}, 5000.0, 5000.0));
        }
    }
    const auto m = map_track_labels(truth, est);
    EXPECT_EQ(m.at(Label{2, 5}), (Label{1, 1}));
    EXPECT_EQ(m.at(Label{2, 6}), (Label{1, 0}));
    EXPECT_LT(m.at(Label{6, 0}).birth_time, 0);

    const auto eval = evaluate_run(truth, est, 1, 10);
    ASSERT_EQ(eval.rows.size(), 10u);
    EXPECT_EQ(eval.rows[0].labeling, 0.0);
    EXPECT_NEAR(eval.rows[0].localization, 2.5, 1e-12);
    EXPECT_NEAR(eval.rows[9].cardinality, 10.0, 1e-12);
    EXPECT_TRUE(std::isnan(eval.snr_rmse));
}

TEST(EvaluateRun, TracksEqualTruthGiveZeroRows) {
    std::vector<StateRecord> truth;
    for (int k = 1; k <= 5; ++k) {
        truth.push_back(record(k, Label{1, 0}, k, 2.0 * k, 12.0));
    }
    const auto eval = evaluate_run(truth, truth, 1, 5);
    for (const auto& row : eval.rows) {
        EXPECT_EQ(row.ospa, 0.0);
        EXPECT_EQ(row.snr_rmse, 0.0);
    }
    const auto empty = evaluate_run(truth, {}, 1, 5);
    for (const auto& row : empty.rows) {
        EXPECT_DOUBLE_EQ(row.ospa, 30.0);
    }
}

TEST(AverageOverRuns, MeansAndShapes) {
    std::vector<MetricRow> a(3);
    std::vector<MetricRow> b(3);
    for (int k = 0; k < 3; ++k) {
        a[k].k = b[k].k = k + 1;
        a[k].ospa = 2.0;
        b[k].ospa = 4.0;
        a[k].snr_rmse = 1.0;
        b[k].snr_rmse = std::nan("");
    }
    const auto single = average_over_runs({a});
    EXPECT_EQ(single.per_time[1].ospa, 2.0);
    const auto avg = average_over_runs({a, b});
    EXPECT_DOUBLE_EQ(avg.per_time[2].ospa, 3.0);
    EXPECT_DOUBLE_EQ(avg.per_time[2].snr_rmse, 1.0);
    EXPECT_DOUBLE_EQ(avg.time_average.ospa, 3.0);
    EXPECT_DOUBLE_EQ(time_average_after(avg.per_time, &MetricRow::ospa, 1), 3.0);

    auto ragged = b;
    ragged.pop_back();
    EXPECT_THROW(average_over_runs({a, ragged}), DomainError);
    auto shifted = b;
    shifted[0].k = 7;
    EXPECT_THROW(average_over_runs({a, shifted}), DomainError);
}
