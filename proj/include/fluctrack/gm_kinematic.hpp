#pragma once

#include "fluctrack/models.hpp"
#include "fluctrack/rfs_core.hpp"

#include <vector>

namespace fluctrack {

/// Innovation statistics of one predicted component, reusable across measurements.
struct ComponentInnovation {
    Vector2 predicted_measurement = Vector2::Zero();
    Matrix2 innovation_covariance_inverse = Matrix2::Identity();
    double log_normalizer = 0.0;  ///< -log(2 pi sqrt(det S))
    Eigen::Matrix<double, 4, 2> gain = Eigen::Matrix<double, 4, 2>::Zero();
    Matrix4 updated_covariance = Matrix4::Identity();
};

/// Precomputes H m, S^-1, K and the updated covariance for every component.
/// Throws NumericalError if any innovation covariance is not positive definite.
std::vector<ComponentInnovation> precompute_innovations(const GaussianMixture& gm, const LinearGaussianModel& model);

/// log N(z; Hm, S) for one component.
double log_measurement_likelihood(const ComponentInnovation& innovation, const Vector2& z);

/// Squared Mahalanobis distance of z to the predicted measurement.
double squared_mahalanobis(const ComponentInnovation& innovation, const Vector2& z);

struct KinematicUpdate {
    GaussianMixture posterior;            ///< normalized
    std::vector<double> likelihoods;      ///< xi_i = N(z; H m_i, S_i), raw
};

/// Kalman update of every component with position measurement z; weights become
/// w_i xi_i / sum_j w_j xi_j. If every xi underflows, the prior weights are kept.
KinematicUpdate update_kinematic(const GaussianMixture& gm, const Vector2& z, const LinearGaussianModel& model);

/// Same update reusing precomputed innovations.
KinematicUpdate update_kinematic(const GaussianMixture& gm, const std::vector<ComponentInnovation>& innovations,
                                 const Vector2& z);

struct TruncationConfig {
    double prune_threshold = 1e-5;
    double merge_threshold = 4.0;  ///< squared Mahalanobis
    std::size_t max_components = 100;
};

/// Prune, greedy moment-preserving merge around the heaviest remaining component, cap, renormalize.
GaussianMixture truncate_mixture(const GaussianMixture& gm, double prune_threshold, double merge_threshold,
                                 std::size_t max_components);

inline GaussianMixture truncate_mixture(const GaussianMixture& gm, const TruncationConfig& config) {
    return truncate_mixture(gm, config.prune_threshold, config.merge_threshold, config.max_components);
}

}  // namespace fluctrack
