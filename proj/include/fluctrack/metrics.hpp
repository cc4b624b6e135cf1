#pragma once

#include "fluctrack/rfs_core.hpp"

#include <map>
#include <span>
#include <vector>

namespace fluctrack {

struct LabeledPoint {
    Label label;
    Vector2 position = Vector2::Zero();
};

struct OspaParams {
    double cutoff = 30.0;         ///< c
    double label_penalty = 30.0;  ///< phi
    double order = 1.0;           ///< p
};

struct OspaResult {
    double total = 0.0;
    double localization = 0.0;
    double labeling = 0.0;
    double cardinality = 0.0;
};

/// OSPA with a labeling term. For |Y| = m <= n = |X|:
///   [ (1/n) ( sum d_c(x_i, y_pi(i))^p + sum (phi [l_i != l_pi(i)])^p + c^p (n - m) ) ]^(1/p)
/// where pi minimizes the cut-off distance sum. The sets are swapped when m > n. Each
/// component is the corresponding summand put through the same normalization and root.
/// A mismatched label is penalized; a matching label costs nothing.
OspaResult ospa_labeled(const std::vector<LabeledPoint>& truth, const std::vector<LabeledPoint>& estimate,
                        const OspaParams& params = {});

/// Time-stamped labeled state used for both truth and estimates.
struct StateRecord {
    int k = 0;
    Label label;
    Vector4 state = Vector4::Zero();
    double snr_db = 0.0;  ///< NaN when not available
};

/// Global track-to-truth label association over the whole run. The cost of pairing estimate
/// track e with truth t sums min(c, ||x - y||)^p over scans where both exist and c^p over scans
/// where only one exists; unpaired tracks cost c^p per scan. Paired estimate labels map to
/// their truth label, the rest to fresh labels {-1, i} that match no truth label.
std::map<Label, Label> map_track_labels(const std::vector<StateRecord>& truth,
                                        const std::vector<StateRecord>& estimates, const OspaParams& params = {});

/// RMSE of paired values in dB. Throws DomainError if the inputs are empty or differ in length.
double snr_rmse(std::span<const double> truth_db, std::span<const double> estimate_db);

struct MetricRow {
    int k = 0;
    double ospa = 0.0;
    double localization = 0.0;
    double labeling = 0.0;
    double cardinality = 0.0;
    double snr_rmse = 0.0;  ///< NaN when no pair at this scan carries an SNR estimate
};

struct RunEvaluation {
    std::vector<MetricRow> rows;
    double snr_rmse = 0.0;  ///< over every matched pair of the run, NaN if none
};

/// Per-scan metrics for scans first_k..last_k after global label mapping; SNR errors use
/// estimates whose mapped label equals a truth label at the same scan.
RunEvaluation evaluate_run(const std::vector<StateRecord>& truth, const std::vector<StateRecord>& estimates,
                           int first_k, int last_k, const OspaParams& params = {});

struct RunAverage {
    std::vector<MetricRow> per_time;  ///< mean over runs at each scan (NaN entries skipped)
    MetricRow time_average;           ///< mean of per_time over scans, k = 0
};

/// Throws DomainError if the tables differ in length or scan numbering.
RunAverage average_over_runs(const std::vector<std::vector<MetricRow>>& runs);

/// Mean of a column of per_time rows restricted to k > after_k (NaN skipped).
double time_average_after(const std::vector<MetricRow>& rows, double MetricRow::*field, int after_k);

}  // namespace fluctrack
