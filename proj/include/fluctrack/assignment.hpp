#pragma once

#include "fluctrack/rfs_core.hpp"

#include <Eigen/Dense>

#include <vector>

namespace fluctrack {

inline constexpr int kMiss = -1;
inline constexpr int kDeath = -2;

/// Negative log association costs for n predicted tracks and m measurements.
/// Every entry is finite or +inf. The extended layout is [m detections | n misses | n deaths],
/// where track i may only use its own miss column m+i and death column m+n+i.
struct CostMatrix {
    Eigen::MatrixXd detection;  ///< n x m
    Eigen::VectorXd miss;       ///< n
    Eigen::VectorXd death;      ///< n
    std::vector<Label> labels;  ///< row labels, may be empty

    CostMatrix() = default;
    CostMatrix(Eigen::MatrixXd detection_costs, Eigen::VectorXd miss_costs, Eigen::VectorXd death_costs);

    [[nodiscard]] int tracks() const { return static_cast<int>(detection.rows()); }
    [[nodiscard]] int measurements() const { return static_cast<int>(detection.cols()); }
    /// n x (m + 2n) with +inf on foreign miss and death columns.
    [[nodiscard]] Eigen::MatrixXd extended() const;
};

/// One association hypothesis: mapping[i] is a measurement index, kMiss, or kDeath for row i.
struct Assignment {
    std::vector<int> mapping;
    double total_cost = 0.0;

    bool operator==(const Assignment&) const = default;
};

/// Up to k lowest-cost assignments, nondecreasing in cost, without duplicates
/// (Murty's partitioning over a warm-started shortest augmenting path solver).
/// An empty matrix yields a single empty assignment. Throws DomainError on NaN or -inf entries.
std::vector<Assignment> k_best_assignments(const CostMatrix& costs, int k);

/// Minimum-cost assignment of every row of a rectangular matrix (rows <= cols) to distinct
/// columns. Returns the column of each row, or an empty vector if no finite assignment exists.
std::vector<int> optimal_assignment(const Eigen::MatrixXd& costs);

}  // namespace fluctrack
