#pragma once

#include "fluctrack/amplitude.hpp"
#include "fluctrack/models.hpp"
#include "fluctrack/rfs_core.hpp"

#include <vector>

namespace fluctrack {

/// Bootstrap prediction: every particle is moved by one ARG step, weights are kept.
SnrParticleSet predict_particles(const SnrParticleSet& particles, const ArgParams& params, Rng& rng);

/// Multiplies weights by the thresholded amplitude likelihood of `a` and renormalizes.
/// Throws NumericalError if every likelihood vanishes.
SnrParticleSet update_particles(const SnrParticleSet& particles, double a, const SwerlingModel& model);

/// Effective sample size 1 / sum(w^2) of normalized weights.
double effective_sample_size(const SnrParticleSet& particles);

/// Systematic resampling indices (ancestor of each output slot) for normalized weights.
std::vector<std::size_t> systematic_resample_indices(const SnrParticleSet& particles, Rng& rng);

/// Resamples systematically when ESS < fraction * N; output weights are uniform.
/// When `ancestors` is non-null it receives the ancestor index of every output particle
/// (identity when no resampling happened).
SnrParticleSet resample_if_needed(const SnrParticleSet& particles, double ess_threshold_fraction, Rng& rng,
                                  std::vector<std::size_t>* ancestors = nullptr);

/// Weighted mean SNR.
double mmse_snr_particles(const SnrParticleSet& particles);

/// Uniform grid over [low_db, high_db] at `step_db`, converted to linear SNR, equal weights.
SnrParticleSet snr_grid_particles(double low_db, double high_db, double step_db);

}  // namespace fluctrack
