#include "fluctrack/snr_smc.hpp"

#include "fluctrack/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fluctrack {

SnrParticleSet predict_particles(const SnrParticleSet& particles, const ArgParams& params, Rng& rng) {
    SnrParticleSet out = particles;
    for (auto& p : out.particles) {
        p.snr = sample_arg_step(p.snr, params, rng);
    }
    return out;
}

SnrParticleSet update_particles(const SnrParticleSet& particles, double a, const SwerlingModel& model) {
    if (particles.particles.empty()) {
        throw NumericalError("update of an empty particle set");
    }
    std::vector<double> log_w(particles.size());
    double max_log = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < particles.size(); ++i) {
        const auto& p = particles.particles[i];
        log_w[i] = p.weight > 0.0 ? std::log(p.weight) + log_amplitude_likelihood(a, p.snr, model)
                                  : -std::numeric_limits<double>::infinity();
        max_log = std::max(max_log, log_w[i]);
    }
    if (!std::isfinite(max_log)) {
        throw NumericalError("all particle likelihoods vanish");
    }
    SnrParticleSet out = particles;
    for (std::size_t i = 0; i < particles.size(); ++i) {
        out.particles[i].weight = std::exp(log_w[i] - max_log);
    }
    out.normalize();
    return out;
}

double effective_sample_size(const SnrParticleSet& particles) {
    const double total = particles.total_weight();
    double sum_sq = 0.0;
    for (const auto& p : particles.particles) {
        const double w = p.weight / total;
        sum_sq += w * w;
    }
    return sum_sq > 0.0 ? 1.0 / sum_sq : 0.0;
}

std::vector<std::size_t> systematic_resample_indices(const SnrParticleSet& particles, Rng& rng) {
    const std::size_t n = particles.size();
    const double total = particles.total_weight();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double offset = unit(rng);
    std::vector<std::size_t> indices(n);
    double cumulative = particles.particles.empty() ? 0.0 : particles.particles[0].weight / total;
    std::size_t source = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double point = (static_cast<double>(i) + offset) / static_cast<double>(n);
        while (point > cumulative && source + 1 < n) {
            ++source;
            cumulative += particles.particles[source].weight / total;
        }
        indices[i] = source;
    }
    return indices;
}

SnrParticleSet resample_if_needed(const SnrParticleSet& particles, double ess_threshold_fraction, Rng& rng,
                                  std::vector<std::size_t>* ancestors) {
    const std::size_t n = particles.size();
    if (effective_sample_size(particles) >= ess_threshold_fraction * static_cast<double>(n) || n == 0) {
        if (ancestors != nullptr) {
            ancestors->resize(n);
            std::iota(ancestors->begin(), ancestors->end(), std::size_t{0});
        }
        return particles;
    }
    const auto indices = systematic_resample_indices(particles, rng);
    SnrParticleSet out;
    out.particles.reserve(n);
    for (const auto i : indices) {
        out.particles.push_back({particles.particles[i].snr, 1.0 / static_cast<double>(n)});
    }
    if (ancestors != nullptr) {
        *ancestors = indices;
    }
    return out;
}

double mmse_snr_particles(const SnrParticleSet& particles) {
    const double total = particles.total_weight();
    double mean = 0.0;
    for (const auto& p : particles.particles) {
        mean += p.weight * p.snr;
    }
    return mean / total;
}

SnrParticleSet snr_grid_particles(double low_db, double high_db, double step_db) {
    const int count = static_cast<int>(std::floor((high_db - low_db) / step_db + 1e-9)) + 1;
    SnrParticleSet out;
    out.particles.reserve(count);
    for (int i = 0; i < count; ++i) {
        out.particles.push_back({db_to_snr(low_db + i * step_db), 1.0 / count});
    }
    return out;
}

}  // namespace fluctrack
