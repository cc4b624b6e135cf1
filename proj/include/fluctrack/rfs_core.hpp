#pragma once

#include <Eigen/Dense>

#include <compare>
#include <cstdint>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace fluctrack {

using Vector4 = Eigen::Matrix<double, 4, 1>;
using Matrix4 = Eigen::Matrix<double, 4, 4>;
using Vector2 = Eigen::Vector2d;
using Matrix2 = Eigen::Matrix2d;

/// Unique, invariant track label: the scan a track was born at and its ordinal within that scan.
struct Label {
    std::int32_t birth_time = 0;
    std::int32_t birth_index = 0;

    auto operator<=>(const Label&) const = default;
};

/// "t<birth_time>.<birth_index>"
std::string to_string(const Label& label);
/// Inverse of to_string; throws DomainError on malformed input.
Label parse_label(const std::string& text);

/// One weighted Gaussian over the kinematic state [x, vx, y, vy].
struct GaussianComponent {
    double weight = 0.0;
    Vector4 mean = Vector4::Zero();
    Matrix4 covariance = Matrix4::Identity();
};

struct GaussianMixture {
    std::vector<GaussianComponent> components;

    [[nodiscard]] bool empty() const { return components.empty(); }
    [[nodiscard]] std::size_t size() const { return components.size(); }
    [[nodiscard]] double total_weight() const;
    /// Scales weights so they sum to one. No-op on an empty or zero-weight mixture.
    void normalize();
    [[nodiscard]] Vector4 mean() const;
    [[nodiscard]] Matrix4 covariance() const;
    /// The component with the largest weight; the mixture must be nonempty.
    [[nodiscard]] const GaussianComponent& dominant() const;
};

/// Gamma(shape, rate). Mean shape/rate, variance shape/rate^2.
struct GammaDensity {
    double shape = 1.0;
    double rate = 1.0;

    [[nodiscard]] double mean() const { return shape / rate; }
    [[nodiscard]] double variance() const { return shape / (rate * rate); }
    [[nodiscard]] double pdf(double d) const;
    [[nodiscard]] double log_pdf(double d) const;
};

struct SnrParticle {
    double snr = 0.0;
    double weight = 0.0;
};

struct SnrParticleSet {
    std::vector<SnrParticle> particles;

    [[nodiscard]] std::size_t size() const { return particles.size(); }
    [[nodiscard]] double total_weight() const;
    void normalize();
};

struct KnownSnr {
    double snr = 0.0;
};

/// SNR marginal of one track: Gamma, particles, a known constant, or absent
/// (filters that do not use amplitude).
using SnrDensity = std::variant<std::monostate, GammaDensity, SnrParticleSet, KnownSnr>;

/// Bernoulli track: existence probability, kinematic density conditioned on SNR, SNR density.
struct LabeledTrack {
    Label label;
    double existence = 0.0;
    GaussianMixture kinematic;
    SnrDensity snr;
};

struct LmbDensity {
    std::vector<LabeledTrack> tracks;
};

/// Position measurement with its envelope amplitude.
struct Measurement {
    Vector2 position = Vector2::Zero();
    double amplitude = 0.0;
};

struct MeasurementFrame {
    int k = 0;
    std::vector<Measurement> measurements;
};

/// Probability that exactly the labels in `subset` exist:
///   prod_{i not in subset} (1 - r_i) * prod_{l in subset} r_l.
/// Existence probabilities are clamped to [1e-9, 1 - 1e-9]. Unknown labels throw DomainError.
double lmb_subset_weight(const LmbDensity& density, const std::set<Label>& subset);

struct CardinalityEstimate {
    std::size_t count = 0;
    std::vector<Label> labels;  ///< sorted by existence, descending
};

/// Tracks whose existence strictly exceeds `threshold`.
CardinalityEstimate map_estimate_cardinality(const LmbDensity& density, double threshold = 0.5);

}  // namespace fluctrack
