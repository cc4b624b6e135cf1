#include "fluctrack/gm_kinematic.hpp"

#include "fluctrack/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace fluctrack {

std::vector<ComponentInnovation> precompute_innovations(const GaussianMixture& gm, const LinearGaussianModel& model) {
    const auto& h = model.observation;
    std::vector<ComponentInnovation> out;
    out.reserve(gm.size());
    for (const auto& c : gm.components) {
        ComponentInnovation inn;
        inn.predicted_measurement = h * c.mean;
        const Eigen::Matrix<double, 4, 2> pht = c.covariance * h.transpose();
        Matrix2 s = h * pht + model.observation_noise;
        s = 0.5 * (s + s.transpose());
        const double det = s.determinant();
        if (!(det > 0.0) || !std::isfinite(det) || !(s(0, 0) > 0.0)) {
            throw NumericalError("innovation covariance is not positive definite");
        }
        inn.innovation_covariance_inverse = s.inverse();
        inn.log_normalizer = -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(det);
        inn.gain = pht * inn.innovation_covariance_inverse;
        Matrix4 p = (Matrix4::Identity() - inn.gain * h) * c.covariance;
        inn.updated_covariance = 0.5 * (p + p.transpose());
        out.push_back(inn);
    }
    return out;
}

double squared_mahalanobis(const ComponentInnovation& innovation, const Vector2& z) {
    const Vector2 nu = z - innovation.predicted_measurement;
    return nu.dot(innovation.innovation_covariance_inverse * nu);
}

double log_measurement_likelihood(const ComponentInnovation& innovation, const Vector2& z) {
    return innovation.log_normalizer - 0.5 * squared_mahalanobis(innovation, z);
}

KinematicUpdate update_kinematic(const GaussianMixture& gm, const std::vector<ComponentInnovation>& innovations,
                                 const Vector2& z) {
    KinematicUpdate out;
    out.posterior.components.reserve(gm.size());
    out.likelihoods.reserve(gm.size());
    std::vector<double> log_w(gm.size());
    double max_log = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < gm.size(); ++i) {
        const auto& c = gm.components[i];
        const auto& inn = innovations[i];
        const double log_xi = log_measurement_likelihood(inn, z);
        out.likelihoods.push_back(std::exp(log_xi));
        log_w[i] = c.weight > 0.0 ? std::log(c.weight) + log_xi : -std::numeric_limits<double>::infinity();
        max_log = std::max(max_log, log_w[i]);

        GaussianComponent post;
        post.mean = c.mean + inn.gain * (z - inn.predicted_measurement);
        post.covariance = inn.updated_covariance;
        out.posterior.components.push_back(post);
    }
    for (std::size_t i = 0; i < gm.size(); ++i) {
        out.posterior.components[i].weight =
            std::isfinite(max_log) ? std::exp(log_w[i] - max_log) : gm.components[i].weight;
    }
    out.posterior.normalize();
    return out;
}

KinematicUpdate update_kinematic(const GaussianMixture& gm, const Vector2& z, const LinearGaussianModel& model) {
    return update_kinematic(gm, precompute_innovations(gm, model), z);
}

GaussianMixture truncate_mixture(const GaussianMixture& gm, double prune_threshold, double merge_threshold,
                                 std::size_t max_components) {
    std::vector<GaussianComponent> kept;
    kept.reserve(gm.size());
    for (const auto& c : gm.components) {
        if (c.weight >= prune_threshold && c.weight > 0.0) {
            kept.push_back(c);
        }
    }

    GaussianMixture out;
    if (merge_threshold > 0.0 && kept.size() > 1) {
        std::vector<bool> used(kept.size(), false);
        std::vector<std::size_t> order(kept.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return kept[a].weight > kept[b].weight; });
        for (const std::size_t lead : order) {
            if (used[lead]) {
                continue;
            }
            const Eigen::LDLT<Matrix4> lead_cov(kept[lead].covariance);
            std::vector<std::size_t> group;
            for (const std::size_t j : order) {
                if (used[j]) {
                    continue;
                }
                const Vector4 diff = kept[j].mean - kept[lead].mean;
                if (j == lead || diff.dot(lead_cov.solve(diff)) < merge_threshold) {
                    group.push_back(j);
                    used[j] = true;
                }
            }
            if (group.size() == 1) {
                out.components.push_back(kept[lead]);
                continue;
            }
            GaussianComponent merged;
            merged.weight = 0.0;
            merged.mean.setZero();
            for (const std::size_t j : group) {
                merged.weight += kept[j].weight;
                merged.mean += kept[j].weight * kept[j].mean;
            }
            merged.mean /= merged.weight;
            merged.covariance.setZero();
            for (const std::size_t j : group) {
                const Vector4 diff = kept[j].mean - merged.mean;
                merged.covariance += kept[j].weight * (kept[j].covariance + diff * diff.transpose());
            }
            merged.covariance /= merged.weight;
            merged.covariance = 0.5 * (merged.covariance + merged.covariance.transpose());
            out.components.push_back(merged);
        }
    } else {
        out.components = std::move(kept);
    }

    if (out.components.size() > max_components) {
        std::stable_sort(out.components.begin(), out.components.end(),
                         [](const GaussianComponent& a, const GaussianComponent& b) { return a.weight > b.weight; });
        out.components.resize(max_components);
    }
    out.normalize();
    return out;
}

}  // namespace fluctrack
