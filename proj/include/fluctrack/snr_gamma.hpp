#pragma once

#include "fluctrack/amplitude.hpp"
#include "fluctrack/models.hpp"
#include "fluctrack/rfs_core.hpp"

#include <functional>
#include <span>
#include <vector>

namespace fluctrack {

/// Gamma approximation of the one-step ARG prediction of a Gamma prior.
///
/// The Laplace transform of the predicted density is
///   K(s) = (s c + 1)^(alpha - delta) / (s (rho / beta + c) + 1)^alpha,
/// whose first two derivatives at s = 0 give
///   M1 = -(delta c + rho alpha / beta),
///   M2 = delta c^2 (delta + 1) + rho^2 alpha (alpha + 1) / beta^2 + 2 rho c alpha (delta + 1) / beta.
/// The returned Gamma matches mean -M1 and variance M2 - M1^2.
GammaDensity predict_gamma(const GammaDensity& prior, const ArgParams& params);

/// Numerically inverts K(s) on `grid` with the fixed Talbot contour (Abate-Valko).
/// Test/validation oracle for predict_gamma. Throws NumericalError if two contour
/// resolutions disagree.
std::vector<double> inverse_laplace_predict_oracle(const GammaDensity& prior, const ArgParams& params,
                                                   std::span<const double> grid);

/// KL(true prediction || Gamma approximation) by quadrature over the oracle density.
double kld_gamma_approx(const GammaDensity& prior, const ArgParams& params);

struct MhConfig {
    std::size_t samples = 1000;
    double proposal_std = 4.0;
    double burn_in_fraction = 0.1;
};

/// Metropolis acceptance probability for a symmetric proposal, from log target values.
double mh_acceptance_probability(double log_target_current, double log_target_proposed);

/// Random-walk Metropolis-Hastings chain targeting likelihood(d) * Gamma(d; predicted).
/// The first sample is drawn from `predicted`; proposals <= 0 are rejected; the first
/// burn_in_fraction of the chain is dropped from the returned samples.
std::vector<double> mh_sample_snr_posterior(const GammaDensity& predicted,
                                            const std::function<double(double)>& log_likelihood,
                                            const MhConfig& config, Rng& rng);

/// Same chain with the thresholded amplitude likelihood of measurement amplitude `a`.
std::vector<double> mh_sample_snr_posterior(const GammaDensity& predicted, double a, const SwerlingModel& model,
                                            const MhConfig& config, Rng& rng);

/// Moment fit: alpha = mean^2 / S^2, beta = mean / S^2 with the unbiased sample variance.
/// Throws NumericalError on fewer than two samples or zero variance.
GammaDensity fit_gamma_to_samples(std::span<const double> samples);

/// Moment fit to a weighted particle set (weighted mean and variance).
GammaDensity fit_gamma_to_particles(const SnrParticleSet& particles);

/// Posterior mean alpha / beta.
double mmse_snr(const GammaDensity& density);

}  // namespace fluctrack
