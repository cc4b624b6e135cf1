#include "fluctrack/amplitude.hpp"

#include "fluctrack/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace fluctrack {

namespace {

void require_above_threshold(double a, const SwerlingModel& model) {
    if (!(a > model.threshold)) {
        throw DomainError("amplitude " + std::to_string(a) + " is not above the detection threshold " +
                          std::to_string(model.threshold));
    }
}

double uniform_open(Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double x = u(rng);
    while (x <= 0.0) {
        x = u(rng);
    }
    return x;
}

}  // namespace

double snr_to_db(double snr_linear) { return 10.0 * std::log10(1.0 + snr_linear); }

double db_to_snr(double snr_db) { return std::pow(10.0, snr_db / 10.0) - 1.0; }

double detection_probability(double d, const SwerlingModel& model) {
    const double s = 1.0 + d;
    const double tau2 = model.threshold * model.threshold;
    if (model.kind == SwerlingKind::One) {
        return std::exp(-tau2 / (2.0 * s));
    }
    const double x = 3.0 * tau2 / (2.0 * s);
    return (1.0 + x) * std::exp(-x);
}

double raw_amplitude_pdf(double a, double d, const SwerlingModel& model) {
    if (a <= 0.0) {
        return 0.0;
    }
    // Log form: a^3 overflows before the exponential underflows for very large a.
    const double s = 1.0 + d;
    if (model.kind == SwerlingKind::One) {
        return std::exp(std::log(a / s) - a * a / (2.0 * s));
    }
    return std::exp(std::log(4.5) + 3.0 * std::log(a) - 2.0 * std::log(s) - 3.0 * a * a / (2.0 * s));
}

double log_amplitude_likelihood(double a, double d, const SwerlingModel& model) {
    require_above_threshold(a, model);
    const double s = 1.0 + d;
    const double tau2 = model.threshold * model.threshold;
    if (model.kind == SwerlingKind::One) {
        return std::log(a / s) + (tau2 - a * a) / (2.0 * s);
    }
    return std::log(9.0) + 3.0 * std::log(a) - std::log(3.0 * tau2 * s + 2.0 * s * s) + 3.0 * (tau2 - a * a) / (2.0 * s);
}

double amplitude_likelihood(double a, double d, const SwerlingModel& model) {
    return std::exp(log_amplitude_likelihood(a, d, model));
}

double clutter_amplitude_pdf(double a, const SwerlingModel& model) {
    return amplitude_likelihood(a, 0.0, model);
}

double sample_amplitude(double d, const SwerlingModel& model, Rng& rng) {
    const double s = 1.0 + d;
    const double tau2 = model.threshold * model.threshold;
    if (model.kind == SwerlingKind::One) {
        // Rounding can land exactly on tau when u is within an ulp of 1; redraw.
        for (;;) {
            const double a = std::sqrt(tau2 - 2.0 * s * std::log(uniform_open(rng)));
            if (a > model.threshold) {
                return a;
            }
        }
    }
    // Envelope: thresholded Swerling 1 with 1 + d' = 2(1+d)/3, which has the same raw mean square.
    // The density ratio is 6 a^2 / (3 tau^2 + 2 s) * exp(-3 (a^2 - tau^2) / (4 s)), maximal at
    // a^2 = max(tau^2, 4 s / 3).
    const double s_env = 2.0 * s / 3.0;
    const auto log_ratio = [&](double a2) {
        return std::log(6.0 * a2 / (3.0 * tau2 + 2.0 * s)) - 3.0 * (a2 - tau2) / (4.0 * s);
    };
    const double log_bound = log_ratio(std::max(tau2, 4.0 * s / 3.0));
    for (;;) {
        const double a2 = tau2 - 2.0 * s_env * std::log(uniform_open(rng));
        const double a = std::sqrt(a2);
        if (a <= model.threshold) {
            continue;
        }
        if (std::log(uniform_open(rng)) <= log_ratio(a2) - log_bound) {
            return a;
        }
    }
}

double sample_raw_amplitude(double d, const SwerlingModel& model, Rng& rng) {
    const double s = 1.0 + d;
    if (model.kind == SwerlingKind::One) {
        return std::sqrt(-2.0 * s * std::log(uniform_open(rng)));
    }
    // a^2 ~ Gamma(2, scale 2(1+d)/3)
    std::gamma_distribution<double> gamma(2.0, 2.0 * s / 3.0);
    return std::sqrt(gamma(rng));
}

double log_marginalized_amplitude_likelihood_ratio(double a, const SwerlingModel& model,
                                                   std::pair<double, double> snr_interval_db, double step_db) {
    require_above_threshold(a, model);
    const auto [low, high] = snr_interval_db;
    const double log_clutter = log_amplitude_likelihood(a, 0.0, model);
    const auto term = [&](double db) { return log_amplitude_likelihood(a, db_to_snr(db), model) - log_clutter; };
    if (!(high > low)) {
        return term(low);
    }
    const int intervals = std::max(1, static_cast<int>(std::ceil((high - low) / step_db - 1e-9)));
    const double h = (high - low) / intervals;
    std::vector<double> logs(intervals + 1);
    for (int i = 0; i <= intervals; ++i) {
        logs[i] = term(low + i * h) + (i == 0 || i == intervals ? std::log(0.5) : 0.0);
    }
    const double top = *std::max_element(logs.begin(), logs.end());
    double sum = 0.0;
    for (const double l : logs) {
        sum += std::exp(l - top);
    }
    return top + std::log(sum * h / (high - low));
}

double marginalized_amplitude_likelihood_ratio(double a, const SwerlingModel& model,
                                               std::pair<double, double> snr_interval_db, double step_db) {
    return std::exp(log_marginalized_amplitude_likelihood_ratio(a, model, snr_interval_db, step_db));
}

}  // namespace fluctrack
