#include "fluctrack/harness/experiment.hpp"

#include "fluctrack/errors.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <thread>

namespace fluctrack::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct RunSlot {
    std::vector<MetricRow> rows;
    double snr_rmse = kNaN;
    FilterRun run;
    std::string error;
};

}  // namespace

std::uint64_t filter_seed(std::uint64_t run_seed) { return run_seed * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL; }

FilterRun run_filter(const FilterConfig& config, const std::vector<MeasurementFrame>& frames, std::uint64_t seed) {
    config.clutter.validate();
    Rng rng(seed);
    FilterState state;
    FilterRun out;
    const auto start = std::chrono::steady_clock::now();
    for (const auto& frame : frames) {
        for (const auto& e : step_filter(state, frame, config, rng)) {
            out.estimates.push_back({frame.k, e.label, e.state, e.snr_db});
            out.existence.push_back(e.existence);
        }
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

bool MonteCarloResult::complete() const {
    for (const auto& f : filters) {
        if (f.completed != f.runs) {
            return false;
        }
    }
    return true;
}

const FilterSummary& MonteCarloResult::summary(FilterKind kind) const {
    for (const auto& f : filters) {
        if (f.kind == kind) {
            return f;
        }
    }
    throw DomainError("no summary for filter " + std::string(to_string(kind)));
}

MonteCarloResult run_monte_carlo(const HarnessConfig& config, const MonteCarloOptions& options,
                                 const std::function<void(int, FilterKind)>& on_run_done) {
    if (options.runs < 1 || options.jobs < 1) {
        throw ConfigError("Monte Carlo needs runs >= 1 and jobs >= 1");
    }
    const ScenarioConfig scenario = make_scenario(config, options.swerling);
    const int runs = options.runs;
    const int nf = static_cast<int>(options.filters.size());

    std::vector<std::vector<TruthState>> truths(runs);
    std::vector<std::vector<MeasurementFrame>> frames(runs);
    std::vector<std::shared_ptr<const KnownSnrTruth>> known(runs);
    for (int r = 0; r < runs; ++r) {
        Rng rng(options.seed + static_cast<std::uint64_t>(r));
        truths[r] = generate_truth(scenario, rng);
        frames[r] = generate_measurements(truths[r], scenario, rng);
        round_to_csv_precision(truths[r]);
        round_to_csv_precision(frames[r]);
        known[r] = std::make_shared<const KnownSnrTruth>(known_snr_from_truth(truths[r]));
    }

    std::vector<RunSlot> slots(static_cast<std::size_t>(runs) * nf);
    std::atomic<int> next{0};
    std::mutex callback_mutex;
    const auto worker = [&] {
        for (;;) {
            const int task = next.fetch_add(1);
            if (task >= runs * nf) {
                return;
            }
            const int r = task / nf;
            const int f = task % nf;
            auto& slot = slots[task];
            try {
                FilterConfig fc = make_filter_config(config, options.filters[f], options.swerling);
                fc.known_snr = known[r];
                slot.run = run_filter(fc, frames[r], filter_seed(options.seed + static_cast<std::uint64_t>(r)));
                round_to_csv_precision(slot.run.estimates);
                auto eval = evaluate_run(truth_records(truths[r]), slot.run.estimates, 1, scenario.duration,
                                         config.ospa);
                slot.rows = std::move(eval.rows);
                slot.snr_rmse = eval.snr_rmse;
            } catch (const std::exception& e) {
                slot.error = e.what();
                if (slot.error.empty()) {
                    slot.error = "unknown failure";
                }
            }
            if (on_run_done) {
                const std::lock_guard lock(callback_mutex);
                on_run_done(r, options.filters[f]);
            }
        }
    };
    std::vector<std::thread> pool;
    for (int j = 1; j < options.jobs; ++j) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }

    MonteCarloResult result;
    result.first_truth = truths.front();
    result.first_frames = frames.front();
    for (int f = 0; f < nf; ++f) {
        FilterSummary s;
        s.kind = options.filters[f];
        s.runs = runs;
        std::vector<std::vector<MetricRow>> tables;
        double snr_sum = 0.0;
        int snr_count = 0;
        double seconds = 0.0;
        for (int r = 0; r < runs; ++r) {
            auto& slot = slots[static_cast<std::size_t>(r) * nf + f];
            s.errors.push_back(slot.error);
            s.run_seconds.push_back(slot.error.empty() ? slot.run.seconds : kNaN);
            if (!slot.error.empty()) {
                continue;
            }
            ++s.completed;
            seconds += slot.run.seconds;
            tables.push_back(slot.rows);
            if (!std::isnan(slot.snr_rmse)) {
                snr_sum += slot.snr_rmse;
                ++snr_count;
            }
            for (std::size_t i = 0; i < slot.run.estimates.size(); ++i) {
                s.tracks.push_back({r, slot.run.estimates[i], slot.run.existence[i]});
            }
        }
        s.average = average_over_runs(tables);
        s.snr_rmse = snr_count > 0 ? snr_sum / snr_count : kNaN;
        s.labeling_after = time_average_after(s.average.per_time, &MetricRow::labeling,
                                              config.experiment.labeling_after_k);
        s.seconds = s.completed > 0 ? seconds / s.completed : kNaN;
        result.filters.push_back(std::move(s));
    }
    double reference = kNaN;
    for (const auto& s : result.filters) {
        if (s.kind == FilterKind::GmLmb) {
            reference = s.seconds;
        }
    }
    for (auto& s : result.filters) {
        s.relative_time = s.seconds / reference;
    }
    return result;
}

void write_summary(const std::string& path, const MonteCarloResult& result, SwerlingKind swerling) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    out << "# fluctrack-schema v1 summary" << (result.complete() ? "" : " incomplete=1") << '\n';
    out << "filter,swerling,runs,completed,ospa,loc,lab,card,snr_rmse,lab_late,seconds,relative_time\n";
    for (const auto& s : result.filters) {
        const auto& a = s.average.time_average;
        out << to_string(s.kind) << ',' << static_cast<int>(swerling) << ',' << s.runs << ',' << s.completed << ','
            << format_number(a.ospa) << ',' << format_number(a.localization) << ',' << format_number(a.labeling)
            << ',' << format_number(a.cardinality) << ',' << format_number(s.snr_rmse) << ','
            << format_number(s.labeling_after) << ',' << format_number(s.seconds) << ','
            << format_number(s.relative_time) << '\n';
    }
}

void write_timing(const std::string& path, const MonteCarloResult& result) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    out << "# fluctrack-schema v1 timing\n";
    out << "filter,run,seconds,error\n";
    for (const auto& s : result.filters) {
        for (std::size_t r = 0; r < s.run_seconds.size(); ++r) {
            std::string error = s.errors[r];
            std::replace(error.begin(), error.end(), ',', ';');
            std::replace(error.begin(), error.end(), '\n', ' ');
            out << to_string(s.kind) << ',' << r << ',' << format_number(s.run_seconds[r]) << ',' << error << '\n';
        }
    }
}

}  // namespace fluctrack::harness
