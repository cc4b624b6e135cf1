#include "fluctrack/harness/config.hpp"

#include "fluctrack/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

namespace fluctrack::harness {

namespace {

const std::string kDefaultYaml = R"(# fluctrack default configuration
scenario:
  region: {x_min: 0, x_max: 12000, y_min: 0, y_max: 12000}
  duration: 100
  dt: 1.0
  sigma_v: 10.0
  sigma_eps: 20.0
  survival_probability: 0.98
  clutter_mean: 20.0
  swerling: 1
  threshold: 2.0
  snr_dynamics: {delta: 1.0, rho: 0.999, c: 0.01}
  targets:
    - {birth_time: 1, death_time: 100, state: [2000, 40, 1000, 100], snr_db: 12,
       velocity_changes: [{k: 51, vx: 0}]}
    - {birth_time: 1, death_time: 100, state: [4000, 0, 1000, 100], snr_db: 25,
       velocity_changes: [{k: 51, vx: 40}]}
    - {birth_time: 1, death_time: 100, state: [6000, -40, 1000, 100], snr_db: 17}
filter:
  kind: gm-g-hlmb
  use_amplitude: true
  survival_probability: 0.98
  fixed_detection_probability: 0.95
  snr_interval_db: [10.0, 40.0]
  snr_interval_step_db: 0.1
  delta_swerling1: 1.0
  delta_swerling3: 2.0
  rho: 0.999
  c: 0.01
  k_best: 100
  gating: true
  gate_threshold: 25.0
  truncation: {prune: 1.0e-5, merge: 4.0, max_components: 100}
  existence_prune: 1.0e-3
  extraction_threshold: 0.5
  birth:
    max_existence: 0.04
    expected_births: 1.0
    position_std: 40.0
    velocity_std: 30.0
    velocity_offset: 30.0
    snr_low_db: 10.0
    snr_high_db: 40.0
    snr_step_db: 1.0
  mh: {samples: 1000, proposal_std: 4.0, burn_in_fraction: 0.1}
  ess_threshold_fraction: 0.5
  known_snr_bind_radius: 100.0
metrics: {c: 30.0, phi: 30.0, p: 1.0, labeling_after_k: 55}
experiment:
  runs: 25
  seed: 1
  jobs: 1
  filters: [gm-lmb, gm-lmb-k, gm-lmb-m, gm-smc-hlmb, gm-g-hlmb]
)";

// Reads known keys of one mapping and rejects the rest.
class Section {
public:
    Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
        if (node_ && node_.IsNull()) {
            node_ = YAML::Node(YAML::NodeType::Undefined);  // "key:" with nothing under it
        }
        if (node_ && !node_.IsMap()) {
            throw ConfigError("'" + path_ + "' must be a mapping");
        }
    }

    template <typename T>
    void get(const std::string& key, T& out) {
        known_.insert(key);
        if (!node_) {
            return;
        }
        const YAML::Node value = node_[key];
        if (!value) {
            return;
        }
        try {
            out = value.as<T>();
        } catch (const YAML::Exception& e) {
            throw ConfigError("bad value for '" + path_ + "." + key + "': " + e.what());
        }
    }

    YAML::Node child(const std::string& key) {
        known_.insert(key);
        return node_ ? node_[key] : YAML::Node(YAML::NodeType::Undefined);
    }

    void finish() const {
        if (!node_) {
            return;
        }
        for (const auto& item : node_) {
            const auto key = item.first.as<std::string>();
            if (!known_.contains(key)) {
                throw ConfigError("unknown configuration key '" + path_ + "." + key + "'");
            }
        }
    }

private:
    YAML::Node node_;
    std::string path_;
    std::set<std::string> known_;
};

TargetSpec parse_target(const YAML::Node& node, std::size_t index) {
    Section s(node, "scenario.targets[" + std::to_string(index) + "]");
    TargetSpec t;
    s.get("birth_time", t.birth_time);
    s.get("death_time", t.death_time);
    std::vector<double> state;
    s.get("state", state);
    if (state.size() != 4) {
        throw ConfigError("target state needs [x, vx, y, vy]");
    }
    t.initial_state << state[0], state[1], state[2], state[3];
    s.get("snr_db", t.initial_snr_db);
    const YAML::Node changes = s.child("velocity_changes");
    if (changes) {
        if (!changes.IsSequence()) {
            throw ConfigError("velocity_changes must be a list");
        }
        for (std::size_t i = 0; i < changes.size(); ++i) {
            Section c(changes[i], "velocity_changes[" + std::to_string(i) + "]");
            VelocityChange change;
            c.get("k", change.k);
            double v = 0.0;
            if (changes[i]["vx"]) {
                c.get("vx", v);
                change.vx = v;
            }
            if (changes[i]["vy"]) {
                c.get("vy", v);
                change.vy = v;
            }
            c.finish();
            t.schedule.push_back(change);
        }
    }
    s.finish();
    return t;
}

void apply_scenario(const YAML::Node& node, HarnessConfig& config) {
    Section s(node, "scenario");
    auto& sc = config.scenario;
    {
        Section r(s.child("region"), "scenario.region");
        r.get("x_min", sc.region.x_min);
        r.get("x_max", sc.region.x_max);
        r.get("y_min", sc.region.y_min);
        r.get("y_max", sc.region.y_max);
        r.finish();
    }
    s.get("duration", sc.duration);
    s.get("dt", sc.dt);
    s.get("sigma_v", sc.sigma_v);
    s.get("sigma_eps", sc.sigma_eps);
    s.get("survival_probability", sc.survival_probability);
    s.get("clutter_mean", sc.clutter_mean);
    int swerling = static_cast<int>(sc.swerling.kind);
    s.get("swerling", swerling);
    sc.swerling.kind = parse_swerling(swerling);
    s.get("threshold", sc.swerling.threshold);
    {
        Section a(s.child("snr_dynamics"), "scenario.snr_dynamics");
        a.get("delta", sc.truth_snr.delta);
        a.get("rho", sc.truth_snr.rho);
        a.get("c", sc.truth_snr.c);
        a.finish();
    }
    const YAML::Node targets = s.child("targets");
    if (targets) {
        if (!targets.IsSequence()) {
            throw ConfigError("scenario.targets must be a list");
        }
        sc.targets.clear();
        for (std::size_t i = 0; i < targets.size(); ++i) {
            sc.targets.push_back(parse_target(targets[i], i));
        }
    }
    s.finish();
}

void apply_filter(const YAML::Node& node, HarnessConfig& config) {
    Section s(node, "filter");
    auto& f = config.filter;
    std::string kind(to_string(f.kind));
    s.get("kind", kind);
    try {
        f.kind = parse_filter_kind(kind);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    s.get("use_amplitude", f.use_amplitude);
    s.get("survival_probability", f.survival_probability);
    s.get("fixed_detection_probability", f.fixed_detection_probability);
    std::vector<double> interval{f.snr_interval_db.first, f.snr_interval_db.second};
    s.get("snr_interval_db", interval);
    if (interval.size() != 2) {
        throw ConfigError("filter.snr_interval_db needs [low, high]");
    }
    f.snr_interval_db = {interval[0], interval[1]};
    s.get("snr_interval_step_db", f.snr_interval_step_db);
    s.get("delta_swerling1", config.filter_delta_swerling1);
    s.get("delta_swerling3", config.filter_delta_swerling3);
    s.get("rho", f.snr_dynamics.rho);
    s.get("c", f.snr_dynamics.c);
    s.get("k_best", f.k_best);
    s.get("gating", f.gating);
    s.get("gate_threshold", f.gate_threshold);
    {
        Section t(s.child("truncation"), "filter.truncation");
        t.get("prune", f.truncation.prune_threshold);
        t.get("merge", f.truncation.merge_threshold);
        t.get("max_components", f.truncation.max_components);
        t.finish();
    }
    s.get("existence_prune", f.existence_prune);
    s.get("extraction_threshold", f.extraction_threshold);
    {
        Section b(s.child("birth"), "filter.birth");
        b.get("max_existence", f.birth.max_existence);
        b.get("expected_births", f.birth.expected_births);
        b.get("position_std", f.birth.position_std);
        b.get("velocity_std", f.birth.velocity_std);
        b.get("velocity_offset", f.birth.velocity_offset);
        b.get("snr_low_db", f.birth.snr_low_db);
        b.get("snr_high_db", f.birth.snr_high_db);
        b.get("snr_step_db", f.birth.snr_step_db);
        b.finish();
    }
    {
        Section m(s.child("mh"), "filter.mh");
        m.get("samples", f.mh.samples);
        m.get("proposal_std", f.mh.proposal_std);
        m.get("burn_in_fraction", f.mh.burn_in_fraction);
        m.finish();
    }
    s.get("ess_threshold_fraction", f.ess_threshold_fraction);
    s.get("known_snr_bind_radius", f.known_snr_bind_radius);
    s.finish();
}

void apply_metrics(const YAML::Node& node, HarnessConfig& config) {
    Section s(node, "metrics");
    s.get("c", config.ospa.cutoff);
    s.get("phi", config.ospa.label_penalty);
    s.get("p", config.ospa.order);
    s.get("labeling_after_k", config.experiment.labeling_after_k);
    s.finish();
}

void apply_experiment(const YAML::Node& node, HarnessConfig& config) {
    Section s(node, "experiment");
    auto& e = config.experiment;
    s.get("runs", e.runs);
    s.get("seed", e.seed);
    s.get("jobs", e.jobs);
    std::vector<std::string> filters;
    s.get("filters", filters);
    if (!filters.empty()) {
        e.filters.clear();
        for (const auto& name : filters) {
            try {
                e.filters.push_back(parse_filter_kind(name));
            } catch (const DomainError& err) {
                throw ConfigError(err.what());
            }
        }
    }
    s.finish();
}

void validate(const HarnessConfig& config) {
    try {
        config.scenario.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    const auto& f = config.filter;
    if (f.k_best < 1 || f.mh.samples < 2 || !(f.fixed_detection_probability > 0.0) ||
        !(f.fixed_detection_probability < 1.0) || !(f.snr_interval_db.second >= f.snr_interval_db.first) ||
        !(f.ess_threshold_fraction > 0.0) || f.ess_threshold_fraction > 1.0) {
        throw ConfigError("filter configuration is out of range");
    }
    if (config.experiment.runs < 1 || config.experiment.jobs < 1) {
        throw ConfigError("experiment needs runs >= 1 and jobs >= 1");
    }
    if (!(config.ospa.cutoff > 0.0) || !(config.ospa.label_penalty > 0.0) || !(config.ospa.order >= 1.0)) {
        throw ConfigError("metrics need c > 0, phi > 0, p >= 1");
    }
}

HarnessConfig apply_yaml(const std::string& yaml, HarnessConfig config) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("configuration is not valid YAML: ") + e.what());
    }
    if (root.IsNull()) {
        return config;
    }
    Section top(root, "");
    apply_scenario(top.child("scenario"), config);
    apply_filter(top.child("filter"), config);
    apply_metrics(top.child("metrics"), config);
    apply_experiment(top.child("experiment"), config);
    top.finish();
    validate(config);
    return config;
}

}  // namespace

const std::string& default_config_yaml() { return kDefaultYaml; }

HarnessConfig default_config() {
    static const HarnessConfig defaults = apply_yaml(kDefaultYaml, HarnessConfig{});
    return defaults;
}

HarnessConfig parse_config(const std::string& yaml) { return apply_yaml(yaml, default_config()); }

HarnessConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read configuration file '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

SwerlingKind parse_swerling(int value) {
    if (value == 1) {
        return SwerlingKind::One;
    }
    if (value == 3) {
        return SwerlingKind::Three;
    }
    throw ConfigError("swerling must be 1 or 3");
}

ScenarioConfig make_scenario(const HarnessConfig& config, SwerlingKind swerling) {
    ScenarioConfig sc = config.scenario;
    sc.swerling.kind = swerling;
    return sc;
}

FilterConfig make_filter_config(const HarnessConfig& config, FilterKind kind, SwerlingKind swerling) {
    FilterConfig f = config.filter;
    const auto& sc = config.scenario;
    f.kind = kind;
    f.motion = LinearGaussianModel::constant_velocity(sc.dt, sc.sigma_v, sc.sigma_eps);
    f.swerling = SwerlingModel{swerling, sc.swerling.threshold};
    f.snr_dynamics.delta = swerling == SwerlingKind::One ? config.filter_delta_swerling1 : config.filter_delta_swerling3;
    // A clutter-free scenario still needs a positive intensity in the filter's likelihood ratios.
    f.clutter.mean_count = sc.clutter_mean > 0.0 ? sc.clutter_mean : 1e-3;
    f.clutter.region = sc.region;
    return f;
}

}  // namespace fluctrack::harness
