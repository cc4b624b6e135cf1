#pragma once

#include "fluctrack/rfs_core.hpp"

#include <random>

namespace fluctrack {

using Rng = std::mt19937_64;

/// Nearly-constant-velocity motion in two axes with position-only observations.
struct LinearGaussianModel {
    Matrix4 transition = Matrix4::Identity();
    Matrix4 process_noise = Matrix4::Zero();
    Eigen::Matrix<double, 2, 4> observation = Eigen::Matrix<double, 2, 4>::Zero();
    Matrix2 observation_noise = Matrix2::Identity();
    double dt = 1.0;
    double sigma_v = 0.0;
    double sigma_eps = 1.0;

    /// F = I2 (x) [[1, dt], [0, 1]], Q = I2 (x) [[dt^4/4, dt^3/2], [dt^3/2, dt^2]] sigma_v^2,
    /// H selects both positions, R = sigma_eps^2 I2.
    static LinearGaussianModel constant_velocity(double dt, double sigma_v, double sigma_eps);
};

/// Parameters of the noncentred-Gamma transition / autoregressive Gamma process.
struct ArgParams {
    double delta = 1.0;  ///< degrees of freedom
    double rho = 0.999;  ///< autoregressive coefficient
    double c = 0.01;     ///< scale

    /// Throws DomainError unless delta > 0, c > 0, 0 <= rho <= 1.
    void validate() const;
};

/// Propagates every component through F and Q; weights are untouched.
GaussianMixture predict_kinematic(const GaussianMixture& gm, const LinearGaussianModel& model);

/// Noncentred-Gamma transition density f(d | d_prev): a Poisson(rho d_prev / c) mixture of
/// Gamma(delta + i, scale c) densities. Returns 0 for d <= 0.
double ncg_transition_pdf(double d, double d_prev, const ArgParams& params);

/// One ARG step: N ~ Poisson(rho d_prev / c), d ~ Gamma(delta + N, scale c).
/// Always returns a strictly positive value.
double sample_arg_step(double d_prev, const ArgParams& params, Rng& rng);

}  // namespace fluctrack
