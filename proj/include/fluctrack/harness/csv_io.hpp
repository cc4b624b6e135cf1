#pragma once

#include "fluctrack/hlmb_filter.hpp"
#include "fluctrack/metrics.hpp"
#include "fluctrack/scenario.hpp"

#include <map>
#include <string>
#include <vector>

namespace fluctrack::harness {

/// Every file starts with "# fluctrack-schema v1 <kind>[ key=value...]" and a header row.
/// Numbers use 9 significant digits in the classic locale.
std::string format_number(double value);

struct CsvTable {
    std::string kind;
    std::map<std::string, std::string> attributes;  ///< key=value pairs on the schema line
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    /// Index of a column; throws ConfigError if absent.
    [[nodiscard]] std::size_t column(const std::string& name) const;
};

/// Throws ConfigError on a missing file, a wrong schema kind, missing columns or ragged rows.
CsvTable read_csv(const std::string& path, const std::string& expected_kind,
                  const std::vector<std::string>& required_columns);

void write_truth(const std::string& path, const std::vector<TruthState>& truth);
std::vector<TruthState> read_truth(const std::string& path);

void write_measurements(const std::string& path, const std::vector<MeasurementFrame>& frames);
std::vector<MeasurementFrame> read_measurements(const std::string& path);

/// Estimates of one run; `run` goes in the first column.
struct TrackRecord {
    int run = 0;
    StateRecord state;
    double existence = 0.0;
};

void write_tracks(const std::string& path, const std::vector<TrackRecord>& tracks);
std::vector<TrackRecord> read_tracks(const std::string& path);

void write_metrics(const std::string& path, const std::vector<MetricRow>& rows);
std::vector<MetricRow> read_metrics(const std::string& path);

std::vector<StateRecord> truth_records(const std::vector<TruthState>& truth);

/// Rounds every value to what a write/read round trip through the CSV files yields, so that
/// in-memory experiments match the file-based commands exactly.
void round_to_csv_precision(std::vector<TruthState>& truth);
void round_to_csv_precision(std::vector<MeasurementFrame>& frames);
void round_to_csv_precision(std::vector<StateRecord>& records);

}  // namespace fluctrack::harness
