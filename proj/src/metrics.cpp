#include "fluctrack/metrics.hpp"

#include "fluctrack/assignment.hpp"
#include "fluctrack/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace fluctrack {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Breaks ties between equally distant arrangements in favour of matching labels.
constexpr double kLabelTieBreak = 1e-9;

using Trajectory = std::map<int, Vector2>;

std::map<Label, Trajectory> trajectories(const std::vector<StateRecord>& records) {
    std::map<Label, Trajectory> out;
    for (const auto& r : records) {
        out[r.label][r.k] = Vector2(r.state(0), r.state(2));
    }
    return out;
}

struct NanMean {
    double sum = 0.0;
    int count = 0;

    void add(double x) {
        if (!std::isnan(x)) {
            sum += x;
            ++count;
        }
    }
    [[nodiscard]] double value() const { return count > 0 ? sum / count : kNaN; }
};

}  // namespace

OspaResult ospa_labeled(const std::vector<LabeledPoint>& truth, const std::vector<LabeledPoint>& estimate,
                        const OspaParams& params) {
    if (!(params.cutoff > 0.0) || !(params.label_penalty > 0.0) || !(params.order >= 1.0)) {
        throw DomainError("OSPA needs c > 0, phi > 0 and p >= 1");
    }
    const auto& x = truth.size() >= estimate.size() ? truth : estimate;
    const auto& y = truth.size() >= estimate.size() ? estimate : truth;
    const auto n = x.size();
    const auto m = y.size();
    if (n == 0) {
        return {};
    }
    const double p = params.order;
    const double c_p = std::pow(params.cutoff, p);

    double loc_sum = 0.0;
    double lab_sum = 0.0;
    if (m > 0) {
        Eigen::MatrixXd cost(m, n);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double d = std::min(params.cutoff, (y[i].position - x[j].position).norm());
                cost(i, j) = std::pow(d, p) + (y[i].label == x[j].label ? 0.0 : kLabelTieBreak * c_p);
            }
        }
        const auto columns = optimal_assignment(cost);
        // Summed in sorted order so that swapping the arguments gives the same bits.
        std::vector<double> terms;
        terms.reserve(m);
        for (std::size_t i = 0; i < m; ++i) {
            const auto& xj = x[columns[i]];
            terms.push_back(std::pow(std::min(params.cutoff, (y[i].position - xj.position).norm()), p));
            if (!(y[i].label == xj.label)) {
                lab_sum += std::pow(params.label_penalty, p);
            }
        }
        std::sort(terms.begin(), terms.end());
        for (const double t : terms) {
            loc_sum += t;
        }
    }
    const double card_sum = c_p * static_cast<double>(n - m);
    const double inv_n = 1.0 / static_cast<double>(n);
    OspaResult out;
    out.total = std::pow(inv_n * (loc_sum + lab_sum + card_sum), 1.0 / p);
    out.localization = std::pow(inv_n * loc_sum, 1.0 / p);
    out.labeling = std::pow(inv_n * lab_sum, 1.0 / p);
    out.cardinality = std::pow(inv_n * card_sum, 1.0 / p);
    return out;
}

std::map<Label, Label> map_track_labels(const std::vector<StateRecord>& truth,
                                        const std::vector<StateRecord>& estimates, const OspaParams& params) {
    const auto truth_tracks = trajectories(truth);
    const auto estimate_tracks = trajectories(estimates);
    std::vector<Label> truth_labels;
    for (const auto& [label, _] : truth_tracks) {
        truth_labels.push_back(label);
    }
    std::vector<Label> estimate_labels;
    for (const auto& [label, _] : estimate_tracks) {
        estimate_labels.push_back(label);
    }

    const auto ne = static_cast<Eigen::Index>(estimate_labels.size());
    const auto nt = static_cast<Eigen::Index>(truth_labels.size());
    const double c_p = std::pow(params.cutoff, params.order);
    // Cost relative to leaving both tracks unpaired; only overlapping scans change it.
    Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(ne, nt + ne);
    for (Eigen::Index e = 0; e < ne; ++e) {
        const auto& est = estimate_tracks.at(estimate_labels[e]);
        for (Eigen::Index t = 0; t < nt; ++t) {
            const auto& tru = truth_tracks.at(truth_labels[t]);
            double delta = 0.0;
            for (const auto& [k, pos] : est) {
                const auto it = tru.find(k);
                if (it != tru.end()) {
                    delta += std::pow(std::min(params.cutoff, (pos - it->second).norm()), params.order) - 2.0 * c_p;
                }
            }
            cost(e, t) = delta;
        }
    }

    std::map<Label, Label> mapping;
    const auto columns = ne > 0 ? optimal_assignment(cost) : std::vector<int>{};
    std::int32_t fresh = 0;
    for (Eigen::Index e = 0; e < ne; ++e) {
        const int col = columns[e];
        if (col < nt && cost(e, col) < 0.0) {
            mapping[estimate_labels[e]] = truth_labels[col];
        } else {
            mapping[estimate_labels[e]] = Label{-1, fresh++};
        }
    }
    return mapping;
}

double snr_rmse(std::span<const double> truth_db, std::span<const double> estimate_db) {
    if (truth_db.empty() || truth_db.size() != estimate_db.size()) {
        throw DomainError("SNR RMSE needs a nonempty set of matched pairs");
    }
    double ss = 0.0;
    for (std::size_t i = 0; i < truth_db.size(); ++i) {
        const double e = estimate_db[i] - truth_db[i];
        ss += e * e;
    }
    return std::sqrt(ss / static_cast<double>(truth_db.size()));
}

RunEvaluation evaluate_run(const std::vector<StateRecord>& truth, const std::vector<StateRecord>& estimates,
                           int first_k, int last_k, const OspaParams& params) {
    const auto mapping = map_track_labels(truth, estimates, params);
    std::map<int, std::vector<const StateRecord*>> truth_by_k;
    std::map<int, std::vector<const StateRecord*>> est_by_k;
    for (const auto& r : truth) {
        truth_by_k[r.k].push_back(&r);
    }
    for (const auto& r : estimates) {
        est_by_k[r.k].push_back(&r);
    }

    RunEvaluation out;
    std::vector<double> all_truth;
    std::vector<double> all_est;
    for (int k = first_k; k <= last_k; ++k) {
        std::vector<LabeledPoint> xs;
        std::vector<LabeledPoint> ys;
        std::vector<double> snr_truth;
        std::vector<double> snr_est;
        const auto& tk = truth_by_k[k];
        for (const auto* r : tk) {
            xs.push_back({r->label, Vector2(r->state(0), r->state(2))});
        }
        for (const auto* r : est_by_k[k]) {
            const Label mapped = mapping.at(r->label);
            ys.push_back({mapped, Vector2(r->state(0), r->state(2))});
            if (std::isnan(r->snr_db)) {
                continue;
            }
            for (const auto* t : tk) {
                if (t->label == mapped && !std::isnan(t->snr_db)) {
                    snr_truth.push_back(t->snr_db);
                    snr_est.push_back(r->snr_db);
                }
            }
        }
        const auto o = ospa_labeled(xs, ys, params);
        MetricRow row{k, o.total, o.localization, o.labeling, o.cardinality, kNaN};
        if (!snr_truth.empty()) {
            row.snr_rmse = snr_rmse(snr_truth, snr_est);
            all_truth.insert(all_truth.end(), snr_truth.begin(), snr_truth.end());
            all_est.insert(all_est.end(), snr_est.begin(), snr_est.end());
        }
        out.rows.push_back(row);
    }
    out.snr_rmse = all_truth.empty() ? kNaN : snr_rmse(all_truth, all_est);
    return out;
}

RunAverage average_over_runs(const std::vector<std::vector<MetricRow>>& runs) {
    RunAverage out;
    if (runs.empty()) {
        return out;
    }
    const auto length = runs.front().size();
    for (const auto& run : runs) {
        if (run.size() != length) {
            throw DomainError("metric tables have different lengths");
        }
        for (std::size_t i = 0; i < length; ++i) {
            if (run[i].k != runs.front()[i].k) {
                throw DomainError("metric tables have different scan numbering");
            }
        }
    }
    constexpr std::array<double MetricRow::*, 5> fields{&MetricRow::ospa, &MetricRow::localization,
                                                         &MetricRow::labeling, &MetricRow::cardinality,
                                                         &MetricRow::snr_rmse};
    out.per_time.resize(length);
    for (std::size_t i = 0; i < length; ++i) {
        out.per_time[i].k = runs.front()[i].k;
        for (const auto field : fields) {
            NanMean mean;
            for (const auto& run : runs) {
                mean.add(run[i].*field);
            }
            out.per_time[i].*field = mean.value();
        }
    }
    out.time_average.k = 0;
    for (const auto field : fields) {
        NanMean mean;
        for (const auto& row : out.per_time) {
            mean.add(row.*field);
        }
        out.time_average.*field = mean.value();
    }
    return out;
}

double time_average_after(const std::vector<MetricRow>& rows, double MetricRow::*field, int after_k) {
    NanMean mean;
    for (const auto& row : rows) {
        if (row.k > after_k) {
            mean.add(row.*field);
        }
    }
    return mean.value();
}

}  // namespace fluctrack
