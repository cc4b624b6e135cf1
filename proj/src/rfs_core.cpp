#include "fluctrack/rfs_core.hpp"

#include "fluctrack/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

namespace fluctrack {

std::string to_string(const Label& label) {
    return "t" + std::to_string(label.birth_time) + "." + std::to_string(label.birth_index);
}

Label parse_label(const std::string& text) {
    const auto dot = text.find('.');
    if (text.size() < 4 || text.front() != 't' || dot == std::string::npos) {
        throw DomainError("malformed label '" + text + "'");
    }
    Label label;
    const char* first = text.data() + 1;
    const char* mid = text.data() + dot;
    const char* last = text.data() + text.size();
    auto r1 = std::from_chars(first, mid, label.birth_time);
    auto r2 = std::from_chars(mid + 1, last, label.birth_index);
    if (r1.ec != std::errc{} || r1.ptr != mid || r2.ec != std::errc{} || r2.ptr != last) {
        throw DomainError("malformed label '" + text + "'");
    }
    return label;
}

double GaussianMixture::total_weight() const {
    return std::accumulate(components.begin(), components.end(), 0.0,
                           [](double acc, const GaussianComponent& c) { return acc + c.weight; });
}

void GaussianMixture::normalize() {
    const double total = total_weight();
    if (total <= 0.0) {
        return;
    }
    for (auto& c : components) {
        c.weight /= total;
    }
}

Vector4 GaussianMixture::mean() const {
    Vector4 m = Vector4::Zero();
    const double total = total_weight();
    for (const auto& c : components) {
        m += c.weight * c.mean;
    }
    return total > 0.0 ? Vector4(m / total) : m;
}

Matrix4 GaussianMixture::covariance() const {
    const Vector4 m = mean();
    const double total = total_weight();
    Matrix4 cov = Matrix4::Zero();
    for (const auto& c : components) {
        const Vector4 diff = c.mean - m;
        cov += c.weight * (c.covariance + diff * diff.transpose());
    }
    return total > 0.0 ? Matrix4(cov / total) : cov;
}

const GaussianComponent& GaussianMixture::dominant() const {
    if (components.empty()) {
        throw DomainError("dominant() on an empty mixture");
    }
    return *std::max_element(components.begin(), components.end(),
                             [](const auto& a, const auto& b) { return a.weight < b.weight; });
}

double GammaDensity::log_pdf(double d) const {
    if (d <= 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(d) - rate * d;
}

double GammaDensity::pdf(double d) const {
    return d <= 0.0 ? 0.0 : std::exp(log_pdf(d));
}

double SnrParticleSet::total_weight() const {
    return std::accumulate(particles.begin(), particles.end(), 0.0,
                           [](double acc, const SnrParticle& p) { return acc + p.weight; });
}

void SnrParticleSet::normalize() {
    const double total = total_weight();
    if (total <= 0.0) {
        return;
    }
    for (auto& p : particles) {
        p.weight /= total;
    }
}

double lmb_subset_weight(const LmbDensity& density, const std::set<Label>& subset) {
    constexpr double kClamp = 1e-9;
    std::size_t matched = 0;
    double weight = 1.0;
    for (const auto& track : density.tracks) {
        const double r = std::clamp(track.existence, kClamp, 1.0 - kClamp);
        if (subset.contains(track.label)) {
            weight *= r;
            ++matched;
        } else {
            weight *= 1.0 - r;
        }
    }
    if (matched != subset.size()) {
        throw DomainError("subset contains a label that is not in the density");
    }
    return weight;
}

CardinalityEstimate map_estimate_cardinality(const LmbDensity& density, double threshold) {
    std::vector<const LabeledTrack*> selected;
    for (const auto& track : density.tracks) {
        if (track.existence > threshold) {
            selected.push_back(&track);
        }
    }
    std::stable_sort(selected.begin(), selected.end(),
                     [](const auto* a, const auto* b) { return a->existence > b->existence; });
    CardinalityEstimate estimate;
    estimate.count = selected.size();
    for (const auto* track : selected) {
        estimate.labels.push_back(track->label);
    }
    return estimate;
}

}  // namespace fluctrack
