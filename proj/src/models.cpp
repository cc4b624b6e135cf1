#include "fluctrack/models.hpp"

#include "fluctrack/errors.hpp"

#include <cmath>
#include <limits>

namespace fluctrack {

LinearGaussianModel LinearGaussianModel::constant_velocity(double dt, double sigma_v, double sigma_eps) {
    LinearGaussianModel model;
    model.dt = dt;
    model.sigma_v = sigma_v;
    model.sigma_eps = sigma_eps;

    Eigen::Matrix2d f_block;
    f_block << 1.0, dt, 0.0, 1.0;
    Eigen::Matrix2d q_block;
    q_block << std::pow(dt, 4) / 4.0, std::pow(dt, 3) / 2.0, std::pow(dt, 3) / 2.0, dt * dt;
    q_block *= sigma_v * sigma_v;

    model.transition.setZero();
    model.process_noise.setZero();
    model.transition.block<2, 2>(0, 0) = f_block;
    model.transition.block<2, 2>(2, 2) = f_block;
    model.process_noise.block<2, 2>(0, 0) = q_block;
    model.process_noise.block<2, 2>(2, 2) = q_block;

    model.observation.setZero();
    model.observation(0, 0) = 1.0;
    model.observation(1, 2) = 1.0;
    model.observation_noise = sigma_eps * sigma_eps * Matrix2::Identity();
    return model;
}

void ArgParams::validate() const {
    if (!(delta > 0.0) || !(c > 0.0) || !(rho >= 0.0 && rho <= 1.0)) {
        throw DomainError("ARG parameters require delta > 0, c > 0 and 0 <= rho <= 1");
    }
}

GaussianMixture predict_kinematic(const GaussianMixture& gm, const LinearGaussianModel& model) {
    GaussianMixture out;
    out.components.reserve(gm.size());
    for (const auto& c : gm.components) {
        GaussianComponent p;
        p.weight = c.weight;
        p.mean = model.transition * c.mean;
        p.covariance = model.transition * c.covariance * model.transition.transpose() + model.process_noise;
        p.covariance = 0.5 * (p.covariance + p.covariance.transpose());
        out.components.push_back(std::move(p));
    }
    return out;
}

namespace {

// log of the i-th Poisson-mixture term.
double ncg_log_term(int i, double log_d, double d, const ArgParams& params, double lambda) {
    const double shape = params.delta + i;
    const double log_poisson = i == 0 ? -lambda : -lambda + i * std::log(lambda) - std::lgamma(i + 1.0);
    const double log_gamma = (shape - 1.0) * log_d - d / params.c - shape * std::log(params.c) - std::lgamma(shape);
    return log_poisson + log_gamma;
}

}  // namespace

double ncg_transition_pdf(double d, double d_prev, const ArgParams& params) {
    if (d <= 0.0) {
        return 0.0;
    }
    const double lambda = params.rho * std::max(d_prev, 0.0) / params.c;
    const double log_d = std::log(d);
    if (lambda == 0.0) {
        return std::exp(ncg_log_term(0, log_d, d, params, lambda));
    }

    // Terms are log-concave in i; start at the largest one and walk outward.
    const double z = lambda * d / params.c;
    const double b = params.delta + 1.0;
    const double root = 0.5 * (-b + std::sqrt(b * b - 4.0 * (params.delta - z)));
    const int mode = std::max(0, static_cast<int>(std::floor(root)));

    constexpr double kRelTol = 1e-16;
    const double log_peak = ncg_log_term(mode, log_d, d, params, lambda);
    double scaled_sum = 1.0;
    for (int i = mode + 1;; ++i) {
        const double t = std::exp(ncg_log_term(i, log_d, d, params, lambda) - log_peak);
        scaled_sum += t;
        if (t < kRelTol * scaled_sum) {
            break;
        }
    }
    for (int i = mode - 1; i >= 0; --i) {
        const double t = std::exp(ncg_log_term(i, log_d, d, params, lambda) - log_peak);
        scaled_sum += t;
        if (t < kRelTol * scaled_sum) {
            break;
        }
    }
    return std::exp(log_peak) * scaled_sum;
}

double sample_arg_step(double d_prev, const ArgParams& params, Rng& rng) {
    const double lambda = params.rho * std::max(d_prev, 0.0) / params.c;
    long long count = 0;
    if (lambda > 0.0) {
        std::poisson_distribution<long long> poisson(lambda);
        count = poisson(rng);
    }
    // The sum of `count` Gamma(1, c) draws plus a Gamma(delta, c) residual is Gamma(delta + count, c).
    std::gamma_distribution<double> gamma(params.delta + static_cast<double>(count), params.c);
    double d = gamma(rng);
    while (!(d > 0.0)) {
        d = gamma(rng);
    }
    return d;
}

}  // namespace fluctrack
