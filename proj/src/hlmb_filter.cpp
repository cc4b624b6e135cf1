#include "fluctrack/hlmb_filter.hpp"

#include "fluctrack/errors.hpp"
#include "fluctrack/snr_smc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>

namespace fluctrack {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kExistenceClamp = 1e-9;

double log_add(double a, double b) {
    if (a == kNegInf) {
        return b;
    }
    if (b == kNegInf) {
        return a;
    }
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

// log sum_c w_c N(z; H m_c, S_c), plus whether any component lies inside the gate.
std::pair<double, bool> log_kinematic_likelihood(const GaussianMixture& gm,
                                                 const std::vector<ComponentInnovation>& innovations,
                                                 const Vector2& z, const FilterConfig& config) {
    double total = kNegInf;
    bool gated_in = !config.gating;
    for (std::size_t c = 0; c < gm.size(); ++c) {
        const double d2 = squared_mahalanobis(innovations[c], z);
        if (d2 <= config.gate_threshold) {
            gated_in = true;
        }
        total = log_add(total, safe_log(gm.components[c].weight) + innovations[c].log_normalizer - 0.5 * d2);
    }
    return {total, gated_in};
}

void propagate(FilterTrack& ft, const FilterConfig& config, int k, Rng& rng) {
    ft.track.kinematic = predict_kinematic(ft.track.kinematic, config.motion);
    for (auto& gm : ft.particle_kinematics) {
        gm = predict_kinematic(gm, config.motion);
    }
    if (auto* gamma = std::get_if<GammaDensity>(&ft.track.snr)) {
        *gamma = predict_gamma(*gamma, config.snr_dynamics);
    } else if (auto* particles = std::get_if<SnrParticleSet>(&ft.track.snr)) {
        *particles = predict_particles(*particles, config.snr_dynamics, rng);
    } else if (auto* known = std::get_if<KnownSnr>(&ft.track.snr)) {
        known->snr = 0.0;
        if (config.known_snr && ft.known_target >= 0) {
            known->snr = config.known_snr->snr(ft.known_target, k).value_or(0.0);
        }
    }
}

// Plug-in SNR of the non-particle variants; NaN means the fixed detection probability applies.
double plug_in_snr(const FilterTrack& ft, FilterKind kind) {
    if (kind == FilterKind::GmLmbK) {
        const auto* known = std::get_if<KnownSnr>(&ft.track.snr);
        return known != nullptr ? known->snr : 0.0;
    }
    if (kind == FilterKind::GmGHlmb) {
        const auto* gamma = std::get_if<GammaDensity>(&ft.track.snr);
        if (gamma == nullptr) {
            throw DomainError("Gamma variant track carries no Gamma SNR density");
        }
        return gamma->mean();
    }
    return std::numeric_limits<double>::quiet_NaN();
}

GaussianMixture birth_mixture(const Vector2& z, const BirthConfig& birth) {
    GaussianMixture gm;
    const double v = birth.velocity_offset;
    const std::array<Vector2, 5> velocities{Vector2(0.0, 0.0), Vector2(v, 0.0), Vector2(-v, 0.0), Vector2(0.0, v),
                                            Vector2(0.0, -v)};
    Matrix4 cov = Matrix4::Zero();
    cov.diagonal() << birth.position_std * birth.position_std, birth.velocity_std * birth.velocity_std,
        birth.position_std * birth.position_std, birth.velocity_std * birth.velocity_std;
    for (const auto& vel : velocities) {
        GaussianComponent c;
        c.weight = 1.0 / static_cast<double>(velocities.size());
        c.mean << z.x(), vel.x(), z.y(), vel.y();
        c.covariance = cov;
        gm.components.push_back(c);
    }
    return gm;
}

void add_scaled(GaussianMixture& target, const GaussianMixture& source, double scale) {
    if (!(scale > 0.0)) {
        return;
    }
    for (const auto& c : source.components) {
        GaussianComponent s = c;
        s.weight *= scale;
        target.components.push_back(s);
    }
}

}  // namespace

std::string_view to_string(FilterKind kind) {
    switch (kind) {
        case FilterKind::GmLmb:
            return "gm-lmb";
        case FilterKind::GmLmbK:
            return "gm-lmb-k";
        case FilterKind::GmLmbM:
            return "gm-lmb-m";
        case FilterKind::GmSmcHlmb:
            return "gm-smc-hlmb";
        case FilterKind::GmGHlmb:
            return "gm-g-hlmb";
    }
    return "unknown";
}

FilterKind parse_filter_kind(std::string_view name) {
    for (const auto kind : {FilterKind::GmLmb, FilterKind::GmLmbK, FilterKind::GmLmbM, FilterKind::GmSmcHlmb,
                            FilterKind::GmGHlmb}) {
        if (to_string(kind) == name) {
            return kind;
        }
    }
    throw DomainError("unknown filter '" + std::string(name) + "'");
}

void ClutterModel::validate() const {
    if (!(mean_count > 0.0) || !(region.area() > 0.0) || region.x_max <= region.x_min) {
        throw DomainError("clutter needs a positive mean count and a nondegenerate region");
    }
}

void KnownSnrTruth::add(int k, int target, const Vector2& position, double snr) {
    by_scan_[k].push_back({target, position, snr});
}

int KnownSnrTruth::nearest_target(int k, const Vector2& position, double radius) const {
    const auto it = by_scan_.find(k);
    if (it == by_scan_.end()) {
        return -1;
    }
    int best = -1;
    double best_dist = radius;
    for (const auto& e : it->second) {
        const double dist = (e.position - position).norm();
        if (dist <= best_dist) {
            best_dist = dist;
            best = e.target;
        }
    }
    return best;
}

std::optional<double> KnownSnrTruth::snr(int target, int k) const {
    const auto it = by_scan_.find(k);
    if (it == by_scan_.end()) {
        return std::nullopt;
    }
    for (const auto& e : it->second) {
        if (e.target == target) {
            return e.snr;
        }
    }
    return std::nullopt;
}

std::vector<FilterTrack> predict(const std::vector<FilterTrack>& tracks, const std::vector<FilterTrack>& births,
                                 const FilterConfig& config, int k, Rng& rng) {
    std::vector<FilterTrack> out;
    out.reserve(tracks.size() + births.size());
    std::set<Label> labels;
    for (const auto& t : tracks) {
        FilterTrack p = t;
        p.track.existence *= config.survival_probability;
        propagate(p, config, k, rng);
        labels.insert(p.track.label);
        out.push_back(std::move(p));
    }
    for (const auto& b : births) {
        if (!labels.insert(b.track.label).second) {
            throw DomainError("birth label " + to_string(b.track.label) + " collides with an existing track");
        }
        FilterTrack p = b;
        propagate(p, config, k, rng);
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<TrackTerms> compute_track_terms(const std::vector<FilterTrack>& predicted, const MeasurementFrame& frame,
                                            const FilterConfig& config) {
    const FilterKind kind = config.effective_kind();
    const bool amplitude = kind != FilterKind::GmLmb;
    const auto& zs = frame.measurements;
    const std::size_t m = zs.size();
    const double log_phi = std::log(config.clutter.intensity());

    // Amplitude factors shared by all tracks.
    std::vector<double> log_clutter_amp(m, 0.0);
    std::vector<double> log_marginal_ratio(m, 0.0);
    if (amplitude) {
        for (std::size_t j = 0; j < m; ++j) {
            log_clutter_amp[j] = log_amplitude_likelihood(zs[j].amplitude, 0.0, config.swerling);
            if (kind == FilterKind::GmLmbM) {
                log_marginal_ratio[j] = log_marginalized_amplitude_likelihood_ratio(
                    zs[j].amplitude, config.swerling, config.snr_interval_db, config.snr_interval_step_db);
            }
        }
    }

    std::vector<TrackTerms> out(predicted.size());
    for (std::size_t t = 0; t < predicted.size(); ++t) {
        const auto& ft = predicted[t];
        auto& terms = out[t];
        terms.log_eta_detect.assign(m, kNegInf);

        if (kind != FilterKind::GmSmcHlmb) {
            terms.innovations = precompute_innovations(ft.track.kinematic, config.motion);
            const double d = plug_in_snr(ft, kind);
            const double pd = std::isnan(d) ? config.fixed_detection_probability
                                            : detection_probability(d, config.swerling);
            terms.log_eta_miss = safe_log(1.0 - pd);
            const double log_pd = safe_log(pd);
            for (std::size_t j = 0; j < m; ++j) {
                const auto [log_kin, gated_in] =
                    log_kinematic_likelihood(ft.track.kinematic, terms.innovations, zs[j].position, config);
                if (!gated_in) {
                    continue;
                }
                double log_amp = 0.0;
                if (kind == FilterKind::GmLmbM) {
                    log_amp = log_marginal_ratio[j];
                } else if (amplitude) {
                    log_amp = log_amplitude_likelihood(zs[j].amplitude, d, config.swerling) - log_clutter_amp[j];
                }
                terms.log_eta_detect[j] = log_pd + log_amp + log_kin - log_phi;
            }
            continue;
        }

        const auto* particles = std::get_if<SnrParticleSet>(&ft.track.snr);
        if (particles == nullptr || particles->size() != ft.particle_kinematics.size()) {
            throw DomainError("particle variant track is missing its particles or their mixtures");
        }
        const std::size_t n = particles->size();
        terms.particle_innovations.resize(n);
        terms.particle_log_detect.assign(n, std::vector<double>(m, kNegInf));
        std::vector<double> log_w(n);
        std::vector<double> log_pd(n);
        terms.log_eta_miss = kNegInf;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& p = particles->particles[i];
            terms.particle_innovations[i] = precompute_innovations(ft.particle_kinematics[i], config.motion);
            log_w[i] = safe_log(p.weight);
            const double pd = detection_probability(p.snr, config.swerling);
            log_pd[i] = safe_log(pd);
            terms.log_eta_miss = log_add(terms.log_eta_miss, log_w[i] + safe_log(1.0 - pd));
        }
        for (std::size_t j = 0; j < m; ++j) {
            bool gated_in = false;
            double log_sum = kNegInf;
            for (std::size_t i = 0; i < n; ++i) {
                const auto [log_kin, inside] = log_kinematic_likelihood(
                    ft.particle_kinematics[i], terms.particle_innovations[i], zs[j].position, config);
                gated_in = gated_in || inside;
                const double value = log_pd[i] +
                                     log_amplitude_likelihood(zs[j].amplitude, particles->particles[i].snr,
                                                              config.swerling) +
                                     log_kin;
                terms.particle_log_detect[i][j] = value;
                log_sum = log_add(log_sum, log_w[i] + value);
            }
            if (gated_in) {
                terms.log_eta_detect[j] = log_sum - log_phi - log_clutter_amp[j];
            }
        }
    }
    return out;
}

CostMatrix build_cost_matrix(const std::vector<FilterTrack>& predicted, const std::vector<TrackTerms>& terms) {
    const auto n = static_cast<Eigen::Index>(predicted.size());
    const auto m = n > 0 ? static_cast<Eigen::Index>(terms.front().log_eta_detect.size()) : Eigen::Index{0};
    Eigen::MatrixXd detection(n, m);
    Eigen::VectorXd miss(n);
    Eigen::VectorXd death(n);
    std::vector<Label> labels;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double r = std::clamp(predicted[i].track.existence, kExistenceClamp, 1.0 - kExistenceClamp);
        const double log_r = std::log(r);
        death(i) = -std::log1p(-r);
        miss(i) = -(log_r + terms[i].log_eta_miss);
        for (Eigen::Index j = 0; j < m; ++j) {
            detection(i, j) = -(log_r + terms[i].log_eta_detect[j]);
        }
        labels.push_back(predicted[i].track.label);
    }
    CostMatrix costs(std::move(detection), std::move(miss), std::move(death));
    costs.labels = std::move(labels);
    return costs;
}

CostMatrix build_cost_matrix(const std::vector<FilterTrack>& predicted, const MeasurementFrame& frame,
                             const FilterConfig& config) {
    return build_cost_matrix(predicted, compute_track_terms(predicted, frame, config));
}

UpdateResult update(const std::vector<FilterTrack>& predicted, const MeasurementFrame& frame,
                    const FilterConfig& config, Rng& rng) {
    const FilterKind kind = config.effective_kind();
    const auto& zs = frame.measurements;
    const std::size_t m = zs.size();
    const std::size_t n = predicted.size();

    UpdateResult result;
    result.measurement_mass.assign(m, 0.0);
    if (n == 0) {
        return result;
    }

    const auto terms = compute_track_terms(predicted, frame, config);
    const CostMatrix costs = build_cost_matrix(predicted, terms);
    result.hypotheses = k_best_assignments(costs, config.k_best);

    std::vector<double> w_death(n, 0.0);
    std::vector<double> w_miss(n, 0.0);
    std::vector<std::vector<double>> w_detect(n, std::vector<double>(m, 0.0));
    if (!result.hypotheses.empty()) {
        const double best = result.hypotheses.front().total_cost;
        double total = 0.0;
        for (const auto& h : result.hypotheses) {
            const double w = std::exp(best - h.total_cost);
            result.hypothesis_weights.push_back(w);
            total += w;
        }
        for (std::size_t h = 0; h < result.hypotheses.size(); ++h) {
            const double w = result.hypothesis_weights[h] /= total;
            const auto& mapping = result.hypotheses[h].mapping;
            for (std::size_t i = 0; i < n; ++i) {
                if (mapping[i] == kDeath) {
                    w_death[i] += w;
                } else if (mapping[i] == kMiss) {
                    w_miss[i] += w;
                } else {
                    w_detect[i][mapping[i]] += w;
                    result.measurement_mass[mapping[i]] += w;
                }
            }
        }
    }

    result.tracks.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        FilterTrack ft = predicted[i];
        double r = w_miss[i];
        for (const double w : w_detect[i]) {
            r += w;
        }
        r = std::clamp(r, 0.0, 1.0);
        ft.track.existence = r;
        if (!(r > 0.0)) {
            result.tracks.push_back(std::move(ft));
            continue;
        }

        // Measurement of the heaviest hypothesis in which the track exists (-1 for a miss).
        int best_option = kMiss;
        bool found = false;
        for (const auto& h : result.hypotheses) {
            if (h.mapping[i] != kDeath) {
                best_option = h.mapping[i];
                found = true;
                break;
            }
        }

        if (kind != FilterKind::GmSmcHlmb) {
            const GaussianMixture& prior = predicted[i].track.kinematic;
            GaussianMixture posterior;
            add_scaled(posterior, prior, w_miss[i] / r);
            for (std::size_t j = 0; j < m; ++j) {
                if (w_detect[i][j] > 0.0) {
                    add_scaled(posterior, update_kinematic(prior, terms[i].innovations, zs[j].position).posterior,
                               w_detect[i][j] / r);
                }
            }
            ft.track.kinematic = truncate_mixture(posterior, config.truncation);

            if (kind == FilterKind::GmGHlmb && found && best_option >= 0) {
                const auto& prior_snr = std::get<GammaDensity>(predicted[i].track.snr);
                try {
                    const auto samples =
                        mh_sample_snr_posterior(prior_snr, zs[best_option].amplitude, config.swerling, config.mh, rng);
                    ft.track.snr = fit_gamma_to_samples(samples);
                } catch (const NumericalError&) {
                    ft.track.snr = prior_snr;
                }
            }
            result.tracks.push_back(std::move(ft));
            continue;
        }

        // Particle variant: each particle's mixture is the option mixture weighted by
        // P(option | particle), which involves that particle's detection and amplitude terms.
        const auto& prior_particles = std::get<SnrParticleSet>(predicted[i].track.snr);
        const std::size_t np = prior_particles.size();
        const auto& t = terms[i];
        std::vector<double> log_norm_detect(m, kNegInf);
        for (std::size_t j = 0; j < m; ++j) {
            if (w_detect[i][j] > 0.0) {
                for (std::size_t p = 0; p < np; ++p) {
                    log_norm_detect[j] =
                        log_add(log_norm_detect[j], safe_log(prior_particles.particles[p].weight) +
                                                        t.particle_log_detect[p][j]);
                }
            }
        }
        std::vector<GaussianMixture> mixtures(np);
        std::vector<double> log_q;
        for (std::size_t p = 0; p < np; ++p) {
            const auto& prior_gm = predicted[i].particle_kinematics[p];
            const double pd = detection_probability(prior_particles.particles[p].snr, config.swerling);
            log_q.assign(m + 1, kNegInf);
            log_q[m] = safe_log(w_miss[i]) + safe_log(1.0 - pd) - t.log_eta_miss;
            double log_total = log_q[m];
            for (std::size_t j = 0; j < m; ++j) {
                if (w_detect[i][j] > 0.0) {
                    log_q[j] = std::log(w_detect[i][j]) + t.particle_log_detect[p][j] - log_norm_detect[j];
                    log_total = log_add(log_total, log_q[j]);
                }
            }
            GaussianMixture posterior;
            if (log_total == kNegInf) {
                posterior = prior_gm;
            } else {
                add_scaled(posterior, prior_gm, std::exp(log_q[m] - log_total));
                for (std::size_t j = 0; j < m; ++j) {
                    const double q = log_q[j] == kNegInf ? 0.0 : std::exp(log_q[j] - log_total);
                    if (q > 1e-12) {
                        add_scaled(posterior,
                                   update_kinematic(prior_gm, t.particle_innovations[p], zs[j].position).posterior, q);
                    }
                }
            }
            mixtures[p] = truncate_mixture(posterior, config.truncation);
        }

        SnrParticleSet particles = prior_particles;
        if (found && best_option >= 0) {
            try {
                particles = update_particles(prior_particles, zs[best_option].amplitude, config.swerling);
            } catch (const NumericalError&) {
                particles = prior_particles;
            }
        }
        std::vector<std::size_t> ancestors;
        particles = resample_if_needed(particles, config.ess_threshold_fraction, rng, &ancestors);
        ft.particle_kinematics.clear();
        ft.particle_kinematics.reserve(np);
        for (const auto a : ancestors) {
            ft.particle_kinematics.push_back(mixtures[a]);
        }
        GaussianMixture marginal;
        for (std::size_t p = 0; p < np; ++p) {
            add_scaled(marginal, ft.particle_kinematics[p], particles.particles[p].weight);
        }
        ft.track.kinematic = truncate_mixture(marginal, config.truncation);
        ft.track.snr = std::move(particles);
        result.tracks.push_back(std::move(ft));
    }
    return result;
}

std::vector<FilterTrack> adaptive_birth(const MeasurementFrame& frame, const std::vector<double>& measurement_mass,
                                        const FilterConfig& config) {
    const FilterKind kind = config.effective_kind();
    const auto& zs = frame.measurements;
    if (measurement_mass.size() != zs.size()) {
        throw DomainError("measurement mass does not match the frame");
    }
    double unclaimed = 0.0;
    for (const double mass : measurement_mass) {
        unclaimed += std::clamp(1.0 - mass, 0.0, 1.0);
    }

    std::vector<FilterTrack> births;
    births.reserve(zs.size());
    SnrParticleSet grid;
    if (kind == FilterKind::GmSmcHlmb || kind == FilterKind::GmGHlmb) {
        grid = snr_grid_particles(config.birth.snr_low_db, config.birth.snr_high_db, config.birth.snr_step_db);
    }
    for (std::size_t j = 0; j < zs.size(); ++j) {
        FilterTrack ft;
        ft.track.label = Label{frame.k + 1, static_cast<std::int32_t>(j)};
        const double free_mass = std::clamp(1.0 - measurement_mass[j], 0.0, 1.0);
        ft.track.existence =
            unclaimed > 0.0 ? std::min(config.birth.max_existence, config.birth.expected_births * free_mass / unclaimed)
                            : 0.0;
        ft.track.kinematic = birth_mixture(zs[j].position, config.birth);

        switch (kind) {
            case FilterKind::GmLmb:
            case FilterKind::GmLmbM:
                break;
            case FilterKind::GmLmbK: {
                double snr = 0.0;
                if (config.known_snr) {
                    ft.known_target =
                        config.known_snr->nearest_target(frame.k, zs[j].position, config.known_snr_bind_radius);
                    if (ft.known_target >= 0) {
                        snr = config.known_snr->snr(ft.known_target, frame.k).value_or(0.0);
                    }
                }
                ft.track.snr = KnownSnr{snr};
                break;
            }
            case FilterKind::GmSmcHlmb: {
                ft.track.snr = update_particles(grid, zs[j].amplitude, config.swerling);
                ft.particle_kinematics.assign(grid.size(), ft.track.kinematic);
                break;
            }
            case FilterKind::GmGHlmb: {
                try {
                    ft.track.snr = fit_gamma_to_particles(update_particles(grid, zs[j].amplitude, config.swerling));
                } catch (const NumericalError&) {
                    ft.track.snr = fit_gamma_to_particles(grid);
                }
                break;
            }
        }
        births.push_back(std::move(ft));
    }
    return births;
}

std::vector<TrackEstimate> extract_estimates(const std::vector<FilterTrack>& tracks, const FilterConfig& config) {
    std::vector<TrackEstimate> out;
    for (const auto& ft : tracks) {
        const auto& t = ft.track;
        if (!(t.existence > config.extraction_threshold) || t.kinematic.empty()) {
            continue;
        }
        TrackEstimate e;
        e.label = t.label;
        e.existence = t.existence;
        e.state = t.kinematic.dominant().mean;
        e.snr_db = std::numeric_limits<double>::quiet_NaN();
        if (const auto* gamma = std::get_if<GammaDensity>(&t.snr)) {
            e.snr_db = snr_to_db(mmse_snr(*gamma));
        } else if (const auto* particles = std::get_if<SnrParticleSet>(&t.snr)) {
            e.snr_db = snr_to_db(mmse_snr_particles(*particles));
        } else if (const auto* known = std::get_if<KnownSnr>(&t.snr)) {
            e.snr_db = snr_to_db(known->snr);
        }
        out.push_back(e);
    }
    return out;
}

std::vector<TrackEstimate> step_filter(FilterState& state, const MeasurementFrame& frame, const FilterConfig& config,
                                       Rng& rng) {
    auto predicted = predict(state.tracks, state.births, config, frame.k, rng);
    auto result = update(predicted, frame, config, rng);

    std::vector<FilterTrack> survivors;
    survivors.reserve(result.tracks.size());
    for (auto& ft : result.tracks) {
        if (ft.track.existence >= config.existence_prune && !ft.track.kinematic.empty()) {
            survivors.push_back(std::move(ft));
        }
    }
    auto estimates = extract_estimates(survivors, config);

    auto births = adaptive_birth(frame, result.measurement_mass, config);
    std::erase_if(births, [&](const FilterTrack& b) { return b.track.existence < config.existence_prune; });

    state.k = frame.k;
    state.tracks = std::move(survivors);
    state.births = std::move(births);
    return estimates;
}

LmbDensity to_lmb(const std::vector<FilterTrack>& tracks) {
    LmbDensity out;
    out.tracks.reserve(tracks.size());
    for (const auto& ft : tracks) {
        out.tracks.push_back(ft.track);
    }
    return out;
}

}  // namespace fluctrack
