#pragma once

#include "fluctrack/amplitude.hpp"
#include "fluctrack/hlmb_filter.hpp"
#include "fluctrack/models.hpp"
#include "fluctrack/rfs_core.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace fluctrack {

/// Velocity override applied to the state at scan k, after propagation to k.
struct VelocityChange {
    int k = 0;
    std::optional<double> vx;
    std::optional<double> vy;
};

struct TargetSpec {
    int birth_time = 1;
    int death_time = 100;  ///< last scan the target exists
    Vector4 initial_state = Vector4::Zero();
    double initial_snr_db = 15.0;
    std::vector<VelocityChange> schedule;
};

struct ScenarioConfig {
    Region region;
    int duration = 100;
    double dt = 1.0;
    std::vector<TargetSpec> targets;
    ArgParams truth_snr;
    SwerlingModel swerling;
    double clutter_mean = 20.0;
    double sigma_v = 10.0;
    double sigma_eps = 20.0;
    double survival_probability = 0.98;
    std::uint64_t seed = 1;

    /// Three targets crossing at (4000, 6000) on scan 51 in a 12 km square.
    static ScenarioConfig crossing_default();
    /// Throws DomainError on an empty duration, a target born outside the region, or bad lifetimes.
    void validate() const;
};

struct TruthState {
    int k = 0;
    int target = 0;
    Label label;
    Vector4 state = Vector4::Zero();
    double snr = 0.0;
    double snr_db = 0.0;
};

/// Noise-free piecewise constant velocity kinematics and ARG SNR trajectories, sorted by
/// scan then target. Target i carries label {birth_time, i}.
std::vector<TruthState> generate_truth(const ScenarioConfig& config, Rng& rng);

/// One frame per scan 1..duration. A target is detected when its raw amplitude exceeds the
/// threshold; positions get N(0, sigma_eps^2 I) noise. Poisson clutter is uniform over the
/// region with clutter amplitudes. Each frame is shuffled.
std::vector<MeasurementFrame> generate_measurements(const std::vector<TruthState>& truth,
                                                    const ScenarioConfig& config, Rng& rng);

/// Known-SNR lookup built from the truth, for the known-SNR filter.
KnownSnrTruth known_snr_from_truth(const std::vector<TruthState>& truth);

}  // namespace fluctrack
