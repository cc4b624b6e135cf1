#include "fluctrack/scenario.hpp"

#include "fluctrack/errors.hpp"

#include <algorithm>

namespace fluctrack {

ScenarioConfig ScenarioConfig::crossing_default() {
    ScenarioConfig config;
    const auto target = [](double x, double vx, double y, double vy, double snr_db) {
        TargetSpec t;
        t.birth_time = 1;
        t.death_time = 100;
        t.initial_state << x, vx, y, vy;
        t.initial_snr_db = snr_db;
        return t;
    };
    config.targets = {target(2000.0, 40.0, 1000.0, 100.0, 12.0), target(4000.0, 0.0, 1000.0, 100.0, 25.0),
                      target(6000.0, -40.0, 1000.0, 100.0, 17.0)};
    config.targets[0].schedule.push_back({51, 0.0, std::nullopt});
    config.targets[1].schedule.push_back({51, 40.0, std::nullopt});
    return config;
}

void ScenarioConfig::validate() const {
    if (duration < 1 || !(dt > 0.0)) {
        throw DomainError("scenario needs duration >= 1 and dt > 0");
    }
    if (!(region.area() > 0.0) || clutter_mean < 0.0 || !(sigma_eps > 0.0)) {
        throw DomainError("scenario region, clutter or noise is invalid");
    }
    truth_snr.validate();
    for (const auto& t : targets) {
        const double x = t.initial_state(0);
        const double y = t.initial_state(2);
        if (x < region.x_min || x > region.x_max || y < region.y_min || y > region.y_max) {
            throw DomainError("target born outside the region");
        }
        if (t.birth_time < 1 || t.death_time < t.birth_time) {
            throw DomainError("target lifetime is invalid");
        }
    }
}

std::vector<TruthState> generate_truth(const ScenarioConfig& config, Rng& rng) {
    config.validate();
    const auto model = LinearGaussianModel::constant_velocity(config.dt, config.sigma_v, config.sigma_eps);
    std::vector<TruthState> out;
    const int n = static_cast<int>(config.targets.size());
    std::vector<Vector4> state(n);
    std::vector<double> snr(n);
    for (int k = 1; k <= config.duration; ++k) {
        for (int i = 0; i < n; ++i) {
            const auto& spec = config.targets[i];
            if (k < spec.birth_time || k > spec.death_time) {
                continue;
            }
            if (k == spec.birth_time) {
                state[i] = spec.initial_state;
                snr[i] = db_to_snr(spec.initial_snr_db);
            } else {
                state[i] = model.transition * state[i];
                snr[i] = sample_arg_step(snr[i], config.truth_snr, rng);
            }
            for (const auto& change : spec.schedule) {
                if (change.k == k) {
                    if (change.vx) {
                        state[i](1) = *change.vx;
                    }
                    if (change.vy) {
                        state[i](3) = *change.vy;
                    }
                }
            }
            TruthState s;
            s.k = k;
            s.target = i;
            s.label = Label{spec.birth_time, i};
            s.state = state[i];
            s.snr = snr[i];
            s.snr_db = snr_to_db(snr[i]);
            out.push_back(s);
        }
    }
    return out;
}

std::vector<MeasurementFrame> generate_measurements(const std::vector<TruthState>& truth,
                                                    const ScenarioConfig& config, Rng& rng) {
    std::vector<MeasurementFrame> frames(config.duration);
    for (int k = 1; k <= config.duration; ++k) {
        frames[k - 1].k = k;
    }
    std::normal_distribution<double> noise(0.0, config.sigma_eps);
    std::uniform_real_distribution<double> ux(config.region.x_min, config.region.x_max);
    std::uniform_real_distribution<double> uy(config.region.y_min, config.region.y_max);

    auto it = truth.begin();
    for (int k = 1; k <= config.duration; ++k) {
        auto& frame = frames[k - 1];
        for (; it != truth.end() && it->k == k; ++it) {
            const double a = sample_raw_amplitude(it->snr, config.swerling, rng);
            if (!(a > config.swerling.threshold)) {
                continue;
            }
            Measurement z;
            z.position = Vector2(it->state(0) + noise(rng), it->state(2) + noise(rng));
            z.amplitude = a;
            frame.measurements.push_back(z);
        }
        int clutter = 0;
        if (config.clutter_mean > 0.0) {
            std::poisson_distribution<int> count(config.clutter_mean);
            clutter = count(rng);
        }
        for (int c = 0; c < clutter; ++c) {
            Measurement z;
            z.position = Vector2(ux(rng), uy(rng));
            z.amplitude = sample_amplitude(0.0, config.swerling, rng);
            frame.measurements.push_back(z);
        }
        std::shuffle(frame.measurements.begin(), frame.measurements.end(), rng);
    }
    return frames;
}

KnownSnrTruth known_snr_from_truth(const std::vector<TruthState>& truth) {
    KnownSnrTruth out;
    for (const auto& s : truth) {
        out.add(s.k, s.target, Vector2(s.state(0), s.state(2)), s.snr);
    }
    return out;
}

}  // namespace fluctrack
