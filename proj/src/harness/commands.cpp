#include "fluctrack/harness/commands.hpp"

#include "fluctrack/errors.hpp"
#include "fluctrack/harness/config.hpp"
#include "fluctrack/harness/csv_io.hpp"
#include "fluctrack/harness/experiment.hpp"
#include "fluctrack/snr_gamma.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace fluctrack::harness {

namespace fs = std::filesystem;

namespace {

struct Options {
    std::string config_path;
    std::uint64_t seed = 1;
    bool seed_set = false;
    int swerling = 1;
    std::string out_dir = ".";
    std::string out_file;
    std::string filter = "gm-g-hlmb";
    std::string measurements;
    std::string known_snr;
    std::string truth;
    std::string tracks;
    double c = 30.0;
    double phi = 30.0;
    double p = 1.0;
    int runs = 0;
    int jobs = 0;
    std::string filters;
    double alpha = 10.0;
    double beta = 1.0;
    double delta = 1.0;
    double rho = 0.999;
    double scale = 1.0;
    int points = 400;
};

HarnessConfig load(const Options& o) {
    return o.config_path.empty() ? default_config() : load_config(o.config_path);
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create directory '" + dir + "': " + ec.message());
    }
}

std::vector<FilterKind> parse_filter_list(const std::string& text) {
    std::vector<FilterKind> out;
    std::stringstream in(text);
    std::string name;
    while (std::getline(in, name, ',')) {
        if (name.empty()) {
            continue;
        }
        try {
            out.push_back(parse_filter_kind(name));
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        }
    }
    if (out.empty()) {
        throw ConfigError("empty filter list");
    }
    return out;
}

int cmd_simulate(const Options& o) {
    const auto config = load(o);
    const auto scenario = make_scenario(config, parse_swerling(o.swerling));
    Rng rng(o.seed_set ? o.seed : config.experiment.seed);
    const auto truth = generate_truth(scenario, rng);
    const auto frames = generate_measurements(truth, scenario, rng);
    ensure_dir(o.out_dir);
    write_truth((fs::path(o.out_dir) / "truth.csv").string(), truth);
    write_measurements((fs::path(o.out_dir) / "measurements.csv").string(), frames);
    spdlog::info("wrote {} scans, {} truth states to {}", frames.size(), truth.size(), o.out_dir);
    return kExitOk;
}

int cmd_track(const Options& o) {
    const auto config = load(o);
    FilterKind kind{};
    try {
        kind = parse_filter_kind(o.filter);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    auto fc = make_filter_config(config, kind, parse_swerling(o.swerling));
    if (kind == FilterKind::GmLmbK) {
        if (o.known_snr.empty()) {
            throw ConfigError("gm-lmb-k needs --known-snr <truth.csv>");
        }
        fc.known_snr = std::make_shared<const KnownSnrTruth>(known_snr_from_truth(read_truth(o.known_snr)));
    }
    const auto frames = read_measurements(o.measurements);
    const auto seed = o.seed_set ? o.seed : config.experiment.seed;
    const auto run = run_filter(fc, frames, filter_seed(seed));
    std::vector<TrackRecord> records;
    for (std::size_t i = 0; i < run.estimates.size(); ++i) {
        records.push_back({0, run.estimates[i], run.existence[i]});
    }
    const std::string out = o.out_file.empty() ? "tracks.csv" : o.out_file;
    write_tracks(out, records);
    spdlog::info("{}: {} estimates over {} scans in {:.3f} s", o.filter, records.size(), frames.size(), run.seconds);
    return kExitOk;
}

int cmd_metrics(const Options& o) {
    const auto truth = truth_records(read_truth(o.truth));
    const auto tracks = read_tracks(o.tracks);
    OspaParams params{o.c, o.phi, o.p};
    if (!(params.cutoff > 0.0) || !(params.label_penalty > 0.0) || !(params.order >= 1.0)) {
        throw ConfigError("metrics need c > 0, phi > 0, p >= 1");
    }
    int first_k = 1;
    int last_k = 0;
    for (const auto& s : truth) {
        last_k = std::max(last_k, s.k);
    }
    std::map<int, std::vector<StateRecord>> by_run;
    for (const auto& t : tracks) {
        by_run[t.run].push_back(t.state);
        last_k = std::max(last_k, t.state.k);
    }
    if (by_run.empty()) {
        by_run[0];
    }
    std::vector<std::vector<MetricRow>> tables;
    for (const auto& [run, estimates] : by_run) {
        tables.push_back(evaluate_run(truth, estimates, first_k, last_k, params).rows);
    }
    const auto average = average_over_runs(tables);
    const std::string out = o.out_file.empty() ? "metrics.csv" : o.out_file;
    write_metrics(out, average.per_time);
    spdlog::info("OSPA {:.3f} (loc {:.3f}, lab {:.3f}, card {:.3f}) over {} run(s)", average.time_average.ospa,
                 average.time_average.localization, average.time_average.labeling, average.time_average.cardinality,
                 tables.size());
    return kExitOk;
}

int cmd_montecarlo(const Options& o) {
    const auto config = load(o);
    MonteCarloOptions mc;
    mc.runs = o.runs > 0 ? o.runs : config.experiment.runs;
    mc.jobs = o.jobs > 0 ? o.jobs : config.experiment.jobs;
    mc.seed = o.seed_set ? o.seed : config.experiment.seed;
    mc.swerling = parse_swerling(o.swerling);
    mc.filters = o.filters.empty() ? config.experiment.filters : parse_filter_list(o.filters);
    const auto result = run_monte_carlo(config, mc, [&](int run, FilterKind kind) {
        spdlog::debug("run {} {} done", run, to_string(kind));
    });

    ensure_dir(o.out_dir);
    const fs::path dir(o.out_dir);
    write_summary((dir / "summary.csv").string(), result, mc.swerling);
    write_timing((dir / "timing.csv").string(), result);
    write_truth((dir / "truth.csv").string(), result.first_truth);
    write_measurements((dir / "measurements.csv").string(), result.first_frames);
    for (const auto& s : result.filters) {
        const auto name = std::string(to_string(s.kind));
        write_metrics((dir / ("metrics_" + name + ".csv")).string(), s.average.per_time);
        write_tracks((dir / ("tracks_" + name + ".csv")).string(), s.tracks);
        spdlog::info("{}: {}/{} runs, OSPA {:.2f}, SNR RMSE {:.2f} dB, {:.2f} s/run", name, s.completed, s.runs,
                     s.average.time_average.ospa, s.snr_rmse, s.seconds);
        for (std::size_t r = 0; r < s.errors.size(); ++r) {
            if (!s.errors[r].empty()) {
                spdlog::error("{} run {} failed: {}", name, r, s.errors[r]);
            }
        }
    }
    return result.complete() ? kExitOk : kExitRuntime;
}

int cmd_density(const Options& o) {
    const GammaDensity prior{o.alpha, o.beta};
    ArgParams params{o.delta, o.rho, o.scale};
    try {
        params.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    if (!(prior.shape > 0.0) || !(prior.rate > 0.0) || o.points < 2) {
        throw ConfigError("density needs alpha > 0, beta > 0 and at least two points");
    }
    const auto approx = predict_gamma(prior, params);
    const double upper = std::max(prior.mean() + 6.0 * std::sqrt(prior.variance()),
                                  approx.mean() + 6.0 * std::sqrt(approx.variance()));
    std::vector<double> grid(o.points);
    for (int i = 0; i < o.points; ++i) {
        grid[i] = upper * (i + 1) / o.points;
    }
    const auto predicted = inverse_laplace_predict_oracle(prior, params, grid);
    const std::string out = o.out_file.empty() ? "density-dump.csv" : o.out_file;
    std::ofstream file(out);
    if (!file) {
        throw std::runtime_error("cannot write '" + out + "'");
    }
    file << "# fluctrack-schema v1 density alpha=" << format_number(o.alpha) << " beta=" << format_number(o.beta)
         << " delta=" << format_number(o.delta) << " rho=" << format_number(o.rho)
         << " c=" << format_number(o.scale) << '\n';
    file << "d,prior,predicted,approx\n";
    for (int i = 0; i < o.points; ++i) {
        file << format_number(grid[i]) << ',' << format_number(prior.pdf(grid[i])) << ','
             << format_number(predicted[i]) << ',' << format_number(approx.pdf(grid[i])) << '\n';
    }
    spdlog::info("KLD of the Gamma approximation: {:.6f}", kld_gamma_approx(prior, params));
    return kExitOk;
}

}  // namespace

void configure_logging() {
    static bool configured = false;
    if (!configured) {
        auto logger = spdlog::stderr_color_mt("fluctrack");
        spdlog::set_default_logger(logger);
        configured = true;
    }
    spdlog::set_level(spdlog::level::info);
    if (const char* env = std::getenv("FLUCTRACK_LOG")) {
        const std::string level(env);
        if (level == "error") {
            spdlog::set_level(spdlog::level::err);
        } else if (level == "debug") {
            spdlog::set_level(spdlog::level::debug);
        }
    }
}

int run_cli(int argc, const char* const* argv) {
    configure_logging();
    CLI::App app{"Multi-target tracking with amplitude information: simulation, filtering, metrics"};
    app.require_subcommand(0, 1);
    bool dump_config = false;
    app.add_flag("--dump-config", dump_config, "Print the default configuration and exit");

    Options o;
    const auto add_config = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "YAML configuration file")->check(CLI::ExistingFile);
    };
    const auto add_seed = [&](CLI::App* sub) {
        sub->add_option_function<std::uint64_t>(
            "--seed", [&](const std::uint64_t& v) { o.seed = v; o.seed_set = true; }, "Base seed");
    };
    const auto add_swerling = [&](CLI::App* sub) {
        sub->add_option("--swerling", o.swerling, "Fluctuation model")->check(CLI::IsMember({1, 3}));
    };

    auto* simulate = app.add_subcommand("simulate", "Generate truth.csv and measurements.csv");
    add_config(simulate);
    add_seed(simulate);
    add_swerling(simulate);
    simulate->add_option("--out-dir", o.out_dir, "Output directory");

    auto* track = app.add_subcommand("track", "Run one filter over measurements.csv");
    add_config(track);
    add_seed(track);
    add_swerling(track);
    track->add_option("--filter", o.filter, "gm-lmb | gm-lmb-k | gm-lmb-m | gm-smc-hlmb | gm-g-hlmb")
        ->check(CLI::IsMember({"gm-lmb", "gm-lmb-k", "gm-lmb-m", "gm-smc-hlmb", "gm-g-hlmb"}));
    track->add_option("measurements,--measurements", o.measurements, "measurements.csv")
        ->required()
        ->check(CLI::ExistingFile);
    track->add_option("--known-snr", o.known_snr, "truth.csv with the SNR trajectories (gm-lmb-k)")
        ->check(CLI::ExistingFile);
    track->add_option("--out", o.out_file, "Output tracks.csv");

    auto* metrics = app.add_subcommand("metrics", "Labeled OSPA and SNR RMSE of tracks against truth");
    metrics->add_option("truth,--truth", o.truth, "truth.csv")->required()->check(CLI::ExistingFile);
    metrics->add_option("tracks,--tracks", o.tracks, "tracks.csv")->required()->check(CLI::ExistingFile);
    metrics->add_option("--c", o.c, "Cut-off distance");
    metrics->add_option("--phi", o.phi, "Label mismatch penalty");
    metrics->add_option("--p", o.p, "Order");
    metrics->add_option("--out", o.out_file, "Output metrics.csv");

    auto* montecarlo = app.add_subcommand("montecarlo", "Monte Carlo comparison of filters");
    add_config(montecarlo);
    add_seed(montecarlo);
    add_swerling(montecarlo);
    montecarlo->add_option("--runs", o.runs, "Number of runs")->check(CLI::PositiveNumber);
    montecarlo->add_option("--filters", o.filters, "Comma separated filter names");
    montecarlo->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
    montecarlo->add_option("--out-dir", o.out_dir, "Output directory");

    auto* density = app.add_subcommand("density", "Dump prior, predicted and approximate SNR densities");
    density->add_option("--alpha", o.alpha, "Prior shape");
    density->add_option("--beta", o.beta, "Prior rate");
    density->add_option("--delta", o.delta, "ARG delta");
    density->add_option("--rho", o.rho, "ARG rho");
    density->add_option("--c", o.scale, "ARG scale");
    density->add_option("--points", o.points, "Grid size");
    density->add_option("--out", o.out_file, "Output density-dump.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (dump_config) {
            std::cout << default_config_yaml();
            return kExitOk;
        }
        if (simulate->parsed()) {
            return cmd_simulate(o);
        }
        if (track->parsed()) {
            return cmd_track(o);
        }
        if (metrics->parsed()) {
            return cmd_metrics(o);
        }
        if (montecarlo->parsed()) {
            return cmd_montecarlo(o);
        }
        if (density->parsed()) {
            return cmd_density(o);
        }
        std::cerr << app.help();
        return kExitUsage;
    } catch (const ConfigError& e) {
        spdlog::error("{}", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kExitRuntime;
    }
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace fluctrack::harness
