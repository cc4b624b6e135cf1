#pragma once

#include "fluctrack/harness/config.hpp"
#include "fluctrack/harness/csv_io.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace fluctrack::harness {

struct FilterRun {
    std::vector<StateRecord> estimates;
    std::vector<double> existence;  ///< parallel to estimates
    double seconds = 0.0;  ///< wall clock of the filter loop only
};

/// Runs one filter over all frames. The filter RNG is seeded from `seed`.
FilterRun run_filter(const FilterConfig& config, const std::vector<MeasurementFrame>& frames, std::uint64_t seed);

/// Seed of the filter RNG for a run seed, kept apart from the scenario stream.
std::uint64_t filter_seed(std::uint64_t run_seed);

struct MonteCarloOptions {
    int runs = 25;
    std::vector<FilterKind> filters;
    SwerlingKind swerling = SwerlingKind::One;
    int jobs = 1;
    std::uint64_t seed = 1;  ///< run r uses seed + r
};

struct FilterSummary {
    FilterKind kind = FilterKind::GmLmb;
    int runs = 0;
    int completed = 0;
    RunAverage average;           ///< over completed runs
    double snr_rmse = 0.0;        ///< mean of per-run SNR RMSE (NaN if none)
    double labeling_after = 0.0;  ///< time-averaged labeling error after the configured scan
    double seconds = 0.0;         ///< mean wall clock per completed run
    double relative_time = 0.0;   ///< seconds / GM-LMB seconds, NaN without GM-LMB
    std::vector<double> run_seconds;
    std::vector<std::string> errors;  ///< per run, empty on success
    std::vector<TrackRecord> tracks;
};

struct MonteCarloResult {
    std::vector<FilterSummary> filters;
    std::vector<TruthState> first_truth;
    std::vector<MeasurementFrame> first_frames;
    [[nodiscard]] bool complete() const;
    [[nodiscard]] const FilterSummary& summary(FilterKind kind) const;
};

/// Independent runs dispatched to `jobs` workers. Every filter sees the same scenario of a
/// run; results do not depend on the number of workers.
MonteCarloResult run_monte_carlo(const HarnessConfig& config, const MonteCarloOptions& options,
                                 const std::function<void(int, FilterKind)>& on_run_done = {});

void write_summary(const std::string& path, const MonteCarloResult& result, SwerlingKind swerling);
void write_timing(const std::string& path, const MonteCarloResult& result);

}  // namespace fluctrack::harness
