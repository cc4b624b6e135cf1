#pragma once

#include "fluctrack/amplitude.hpp"
#include "fluctrack/assignment.hpp"
#include "fluctrack/gm_kinematic.hpp"
#include "fluctrack/models.hpp"
#include "fluctrack/rfs_core.hpp"
#include "fluctrack/snr_gamma.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fluctrack {

enum class FilterKind { GmLmb, GmLmbK, GmLmbM, GmSmcHlmb, GmGHlmb };

/// "gm-lmb", "gm-lmb-k", "gm-lmb-m", "gm-smc-hlmb", "gm-g-hlmb"
std::string_view to_string(FilterKind kind);
/// Throws DomainError on an unknown name.
FilterKind parse_filter_kind(std::string_view name);

struct Region {
    double x_min = 0.0;
    double x_max = 12000.0;
    double y_min = 0.0;
    double y_max = 12000.0;

    [[nodiscard]] double area() const { return (x_max - x_min) * (y_max - y_min); }
};

/// Poisson clutter with uniform positions: intensity phi = mean_count / area.
struct ClutterModel {
    double mean_count = 20.0;
    Region region;

    [[nodiscard]] double intensity() const { return mean_count / region.area(); }
    /// Throws DomainError unless mean_count > 0 and the region has positive area.
    void validate() const;
};

/// True SNR trajectories for the known-SNR filter. A birth is bound to the nearest true
/// target within `bind_radius` of its measurement; later it reads that target's SNR.
class KnownSnrTruth {
public:
    void add(int k, int target, const Vector2& position, double snr);
    /// Nearest target alive at scan k within `radius`, or -1.
    [[nodiscard]] int nearest_target(int k, const Vector2& position, double radius) const;
    /// True linear SNR of `target` at scan k, if alive.
    [[nodiscard]] std::optional<double> snr(int target, int k) const;

private:
    struct Entry {
        int target;
        Vector2 position;
        double snr;
    };
    std::map<int, std::vector<Entry>> by_scan_;
};

struct BirthConfig {
    double max_existence = 0.04;
    double expected_births = 1.0;     ///< total birth existence to distribute per scan
    double position_std = 40.0;
    double velocity_std = 30.0;
    double velocity_offset = 30.0;    ///< speed of the four jittered velocity means
    double snr_low_db = 10.0;
    double snr_high_db = 40.0;
    double snr_step_db = 1.0;
};

struct FilterConfig {
    FilterKind kind = FilterKind::GmGHlmb;
    bool use_amplitude = true;  ///< false reduces every variant to GM-LMB
    LinearGaussianModel motion = LinearGaussianModel::constant_velocity(1.0, 10.0, 20.0);
    SwerlingModel swerling;
    ArgParams snr_dynamics;  ///< the filter's ARG model
    double survival_probability = 0.98;
    double fixed_detection_probability = 0.95;
    std::pair<double, double> snr_interval_db{10.0, 40.0};
    double snr_interval_step_db = 0.1;
    ClutterModel clutter;
    int k_best = 100;
    bool gating = true;
    double gate_threshold = 25.0;  ///< squared Mahalanobis
    TruncationConfig truncation;
    double existence_prune = 1e-3;
    double extraction_threshold = 0.5;
    BirthConfig birth;
    MhConfig mh;
    double ess_threshold_fraction = 0.5;
    std::shared_ptr<const KnownSnrTruth> known_snr;
    double known_snr_bind_radius = 100.0;

    /// The variant actually run: GM-LMB when amplitude is disabled.
    [[nodiscard]] FilterKind effective_kind() const { return use_amplitude ? kind : FilterKind::GmLmb; }
};

/// A Bernoulli track plus per-variant bookkeeping. For the particle variant,
/// particle_kinematics[i] is the kinematic mixture attached to SNR particle i and
/// track.kinematic is their weighted marginal.
struct FilterTrack {
    LabeledTrack track;
    std::vector<GaussianMixture> particle_kinematics;
    int known_target = -1;
};

struct TrackEstimate {
    Label label;
    Vector4 state = Vector4::Zero();
    double snr_db = 0.0;  ///< NaN when the variant carries no SNR estimate
    double existence = 0.0;
};

struct FilterState {
    int k = 0;
    std::vector<FilterTrack> tracks;
    std::vector<FilterTrack> births;  ///< born from the previous frame, not yet predicted
};

/// Survivors: r * p_S, kinematics through F and Q, SNR through the ARG model.
/// Births: same propagation without the survival factor. Throws DomainError on a label collision.
std::vector<FilterTrack> predict(const std::vector<FilterTrack>& tracks, const std::vector<FilterTrack>& births,
                                 const FilterConfig& config, int k, Rng& rng);

/// Per-track association likelihoods (log eta) and cached innovations.
struct TrackTerms {
    double log_eta_miss = 0.0;
    std::vector<double> log_eta_detect;  ///< per measurement, -inf when gated out
    std::vector<ComponentInnovation> innovations;
    std::vector<std::vector<ComponentInnovation>> particle_innovations;
    /// Particle variant: log of P_D p_tau sum_j w_ij xi_ij for particle i and measurement z.
    std::vector<std::vector<double>> particle_log_detect;
};

std::vector<TrackTerms> compute_track_terms(const std::vector<FilterTrack>& predicted, const MeasurementFrame& frame,
                                            const FilterConfig& config);

/// Cost entries: death -ln(1 - r), miss -ln(r eta_miss), detection -ln(r eta_z).
/// Every detection eta already carries the division by the clutter intensity (and by the
/// clutter amplitude density where amplitude is used).
CostMatrix build_cost_matrix(const std::vector<FilterTrack>& predicted, const std::vector<TrackTerms>& terms);

CostMatrix build_cost_matrix(const std::vector<FilterTrack>& predicted, const MeasurementFrame& frame,
                             const FilterConfig& config);

struct UpdateResult {
    std::vector<FilterTrack> tracks;
    std::vector<Assignment> hypotheses;
    std::vector<double> hypothesis_weights;  ///< normalized
    std::vector<double> measurement_mass;    ///< association probability of each measurement
};

/// LMB approximation of the posterior from the k-best hypotheses. Kinematic mixtures are
/// truncated; tracks are not pruned here.
UpdateResult update(const std::vector<FilterTrack>& predicted, const MeasurementFrame& frame,
                    const FilterConfig& config, Rng& rng);

/// One birth per measurement, existence min(r_max, lambda_B (1 - mass) / sum(1 - mass)),
/// labelled (frame.k + 1, index).
std::vector<FilterTrack> adaptive_birth(const MeasurementFrame& frame, const std::vector<double>& measurement_mass,
                                        const FilterConfig& config);

/// Tracks with existence above the extraction threshold, state from the heaviest component.
std::vector<TrackEstimate> extract_estimates(const std::vector<FilterTrack>& tracks, const FilterConfig& config);

/// predict, update, truncate and prune, extract, then births for the next cycle.
std::vector<TrackEstimate> step_filter(FilterState& state, const MeasurementFrame& frame, const FilterConfig& config,
                                       Rng& rng);

LmbDensity to_lmb(const std::vector<FilterTrack>& tracks);

}  // namespace fluctrack
