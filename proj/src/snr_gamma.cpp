#include "fluctrack/snr_gamma.hpp"

#include "fluctrack/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace fluctrack {

GammaDensity predict_gamma(const GammaDensity& prior, const ArgParams& params) {
    const double alpha = prior.shape;
    const double beta = prior.rate;
    const double delta = params.delta;
    const double rho = params.rho;
    const double c = params.c;

    const double m1 = -(delta * c + rho * alpha / beta);
    const double m2 = delta * c * c * (delta + 1.0) + rho * rho * alpha * (alpha + 1.0) / (beta * beta) +
                      2.0 * rho * c * alpha * (delta + 1.0) / beta;
    const double variance = m2 - m1 * m1;
    if (!(variance > 0.0)) {
        throw NumericalError("predicted SNR variance is not positive");
    }
    return GammaDensity{m1 * m1 / variance, -m1 / variance};
}

namespace {

std::complex<double> log_laplace_prediction(std::complex<double> s, const GammaDensity& prior,
                                            const ArgParams& params) {
    const double b = params.rho / prior.rate + params.c;
    return (prior.shape - params.delta) * std::log(s * params.c + 1.0) - prior.shape * std::log(s * b + 1.0);
}

// Fixed Talbot inversion with `terms` contour nodes.
double talbot_invert(double t, int terms, const GammaDensity& prior, const ArgParams& params) {
    const double r = 2.0 * terms / (5.0 * t);
    double sum = 0.5 * std::exp(r * t + log_laplace_prediction({r, 0.0}, prior, params).real());
    for (int k = 1; k < terms; ++k) {
        const double theta = k * std::numbers::pi / terms;
        const double cot = 1.0 / std::tan(theta);
        const std::complex<double> s(r * theta * cot, r * theta);
        const double sigma = theta + (theta * cot - 1.0) * cot;
        const std::complex<double> value = std::exp(t * s + log_laplace_prediction(s, prior, params));
        sum += (value * std::complex<double>(1.0, sigma)).real();
    }
    return r / terms * sum;
}

}  // namespace

std::vector<double> inverse_laplace_predict_oracle(const GammaDensity& prior, const ArgParams& params,
                                                   std::span<const double> grid) {
    constexpr int kFine = 32;
    constexpr int kCoarse = 24;
    constexpr double kAgreement = 1e-6;
    std::vector<double> density;
    density.reserve(grid.size());
    double previous = 0.0;
    for (const double d : grid) {
        if (!(d > previous)) {
            throw DomainError("inversion grid must be positive and strictly increasing");
        }
        previous = d;
        const double fine = talbot_invert(d, kFine, prior, params);
        const double coarse = talbot_invert(d, kCoarse, prior, params);
        if (!std::isfinite(fine) || std::abs(fine - coarse) > kAgreement * (1.0 + std::abs(fine))) {
            throw NumericalError("inverse Laplace transform did not converge at d = " + std::to_string(d));
        }
        density.push_back(std::max(fine, 0.0));
    }
    return density;
}

double kld_gamma_approx(const GammaDensity& prior, const ArgParams& params) {
    const GammaDensity approx = predict_gamma(prior, params);
    const double mean = approx.mean();
    const double sd = std::sqrt(approx.variance());

    // Simpson's rule in u = log d: the integrand p log(p/q) d vanishes at both ends.
    constexpr int kIntervals = 4000;
    const double u_low = std::log(1e-9 * mean);
    const double u_high = std::log(mean + 40.0 * sd);
    const double h = (u_high - u_low) / kIntervals;
    std::vector<double> grid(kIntervals + 1);
    for (int i = 0; i <= kIntervals; ++i) {
        grid[i] = std::exp(u_low + i * h);
    }
    const std::vector<double> truth = inverse_laplace_predict_oracle(prior, params, grid);

    double sum = 0.0;
    for (int i = 0; i <= kIntervals; ++i) {
        const double p = truth[i];
        double f = 0.0;
        if (p > 0.0) {
            f = p * (std::log(p) - approx.log_pdf(grid[i])) * grid[i];
        }
        const double w = (i == 0 || i == kIntervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        sum += w * f;
    }
    return std::max(0.0, sum * h / 3.0);
}

double mh_acceptance_probability(double log_target_current, double log_target_proposed) {
    const double diff = log_target_proposed - log_target_current;
    return diff >= 0.0 ? 1.0 : std::exp(diff);
}

std::vector<double> mh_sample_snr_posterior(const GammaDensity& predicted,
                                            const std::function<double(double)>& log_likelihood,
                                            const MhConfig& config, Rng& rng) {
    const auto log_target = [&](double d) {
        return log_likelihood(d) + (predicted.shape - 1.0) * std::log(d) - predicted.rate * d;
    };
    std::gamma_distribution<double> initial(predicted.shape, 1.0 / predicted.rate);
    std::normal_distribution<double> step(0.0, config.proposal_std);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    double current = initial(rng);
    while (!(current > 0.0)) {
        current = initial(rng);
    }
    double current_log = log_target(current);

    const std::size_t burn_in = static_cast<std::size_t>(config.burn_in_fraction * config.samples);
    std::vector<double> chain;
    chain.reserve(config.samples - std::min(burn_in, config.samples));
    for (std::size_t i = 0; i < config.samples; ++i) {
        if (i > 0) {
            const double proposal = current + step(rng);
            if (proposal > 0.0) {
                const double proposal_log = log_target(proposal);
                if (unit(rng) < mh_acceptance_probability(current_log, proposal_log)) {
                    current = proposal;
                    current_log = proposal_log;
                }
            }
        }
        if (i >= burn_in) {
            chain.push_back(current);
        }
    }
    return chain;
}

std::vector<double> mh_sample_snr_posterior(const GammaDensity& predicted, double a, const SwerlingModel& model,
                                            const MhConfig& config, Rng& rng) {
    if (!(a > model.threshold)) {
        throw DomainError("amplitude is not above the detection threshold");
    }
    return mh_sample_snr_posterior(
        predicted, [&](double d) { return log_amplitude_likelihood(a, d, model); }, config, rng);
}

GammaDensity fit_gamma_to_samples(std::span<const double> samples) {
    if (samples.size() < 2) {
        throw NumericalError("Gamma fit needs at least two samples");
    }
    double mean = 0.0;
    for (const double d : samples) {
        mean += d;
    }
    mean /= static_cast<double>(samples.size());
    double ss = 0.0;
    for (const double d : samples) {
        ss += (d - mean) * (d - mean);
    }
    const double variance = ss / static_cast<double>(samples.size() - 1);
    if (!(variance > 0.0) || !(mean > 0.0)) {
        throw NumericalError("Gamma fit on degenerate samples");
    }
    return GammaDensity{mean * mean / variance, mean / variance};
}

GammaDensity fit_gamma_to_particles(const SnrParticleSet& particles) {
    const double total = particles.total_weight();
    if (particles.size() < 2 || !(total > 0.0)) {
        throw NumericalError("Gamma fit needs at least two weighted particles");
    }
    double mean = 0.0;
    for (const auto& p : particles.particles) {
        mean += p.weight * p.snr;
    }
    mean /= total;
    double variance = 0.0;
    for (const auto& p : particles.particles) {
        variance += p.weight * (p.snr - mean) * (p.snr - mean);
    }
    variance /= total;
    if (!(variance > 0.0) || !(mean > 0.0)) {
        throw NumericalError("Gamma fit on degenerate particles");
    }
    return GammaDensity{mean * mean / variance, mean / variance};
}

double mmse_snr(const GammaDensity& density) { return density.shape / density.rate; }

}  // namespace fluctrack
