#include "fluctrack/harness/csv_io.hpp"

#include "fluctrack/amplitude.hpp"
#include "fluctrack/errors.hpp"
#include "fluctrack/harness/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace fluctrack::harness {

namespace {

constexpr const char* kSchemaPrefix = "# fluctrack-schema v1 ";

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

double parse_double(const std::string& text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw ConfigError("not a number: '" + text + "'");
    }
    return value;
}

int parse_int(const std::string& text) {
    int value = 0;
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), last, value);
    if (ec != std::errc{} || ptr != last) {
        throw ConfigError("not an integer: '" + text + "'");
    }
    return value;
}

Label parse_label_field(const std::string& text) {
    try {
        return parse_label(text);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

std::ofstream open_output(const std::string& path, const std::string& kind, const std::string& attributes,
                          const std::string& header) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    out << kSchemaPrefix << kind << attributes << '\n' << header << '\n';
    return out;
}

}  // namespace

std::string format_number(double value) { return fmt::format("{:.9g}", value); }

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) {
            return i;
        }
    }
    throw ConfigError("missing column '" + name + "'");
}

CsvTable read_csv(const std::string& path, const std::string& expected_kind,
                  const std::vector<std::string>& required_columns) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read '" + path + "'");
    }
    CsvTable table;
    std::string line;
    if (!std::getline(in, line) || line.rfind(kSchemaPrefix, 0) != 0) {
        throw ConfigError("'" + path + "' has no fluctrack schema line");
    }
    const auto words = split(line.substr(std::string(kSchemaPrefix).size()), ' ');
    if (words.empty() || words.front() != expected_kind) {
        throw ConfigError("'" + path + "' is not a " + expected_kind + " file");
    }
    table.kind = words.front();
    for (std::size_t i = 1; i < words.size(); ++i) {
        const auto eq = words[i].find('=');
        if (eq != std::string::npos) {
            table.attributes[words[i].substr(0, eq)] = words[i].substr(eq + 1);
        }
    }
    if (!std::getline(in, line)) {
        throw ConfigError("'" + path + "' has no header row");
    }
    table.columns = split(line, ',');
    for (const auto& name : required_columns) {
        static_cast<void>(table.column(name));
    }
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        auto fields = split(line, ',');
        if (fields.size() != table.columns.size()) {
            throw ConfigError("'" + path + "' has a row with " + std::to_string(fields.size()) + " fields, expected " +
                              std::to_string(table.columns.size()));
        }
        table.rows.push_back(std::move(fields));
    }
    return table;
}

void write_truth(const std::string& path, const std::vector<TruthState>& truth) {
    auto out = open_output(path, "truth", "", "k,label,x,vx,y,vy,snr_db");
    for (const auto& s : truth) {
        out << s.k << ',' << to_string(s.label) << ',' << format_number(s.state(0)) << ','
            << format_number(s.state(1)) << ',' << format_number(s.state(2)) << ',' << format_number(s.state(3))
            << ',' << format_number(s.snr_db) << '\n';
    }
}

std::vector<TruthState> read_truth(const std::string& path) {
    const auto table = read_csv(path, "truth", {"k", "label", "x", "vx", "y", "vy", "snr_db"});
    const auto ck = table.column("k");
    const auto cl = table.column("label");
    const std::array<std::size_t, 4> cs{table.column("x"), table.column("vx"), table.column("y"),
                                        table.column("vy")};
    const auto cd = table.column("snr_db");
    std::map<Label, int> targets;
    std::vector<TruthState> out;
    for (const auto& row : table.rows) {
        TruthState s;
        s.k = parse_int(row[ck]);
        s.label = parse_label_field(row[cl]);
        const auto [it, inserted] = targets.try_emplace(s.label, static_cast<int>(targets.size()));
        s.target = it->second;
        for (int i = 0; i < 4; ++i) {
            s.state(i) = parse_double(row[cs[i]]);
        }
        s.snr_db = parse_double(row[cd]);
        s.snr = db_to_snr(s.snr_db);
        out.push_back(s);
    }
    return out;
}

void write_measurements(const std::string& path, const std::vector<MeasurementFrame>& frames) {
    auto out = open_output(path, "measurements", " scans=" + std::to_string(frames.size()), "k,idx,zx,zy,amp");
    for (const auto& frame : frames) {
        for (std::size_t j = 0; j < frame.measurements.size(); ++j) {
            const auto& z = frame.measurements[j];
            out << frame.k << ',' << j << ',' << format_number(z.position.x()) << ','
                << format_number(z.position.y()) << ',' << format_number(z.amplitude) << '\n';
        }
    }
}

std::vector<MeasurementFrame> read_measurements(const std::string& path) {
    const auto table = read_csv(path, "measurements", {"k", "idx", "zx", "zy", "amp"});
    const auto ck = table.column("k");
    const auto cx = table.column("zx");
    const auto cy = table.column("zy");
    const auto ca = table.column("amp");
    int scans = 0;
    if (const auto it = table.attributes.find("scans"); it != table.attributes.end()) {
        scans = parse_int(it->second);
    }
    for (const auto& row : table.rows) {
        scans = std::max(scans, parse_int(row[ck]));
    }
    std::vector<MeasurementFrame> frames(scans);
    for (int k = 1; k <= scans; ++k) {
        frames[k - 1].k = k;
    }
    for (const auto& row : table.rows) {
        const int k = parse_int(row[ck]);
        if (k < 1) {
            throw ConfigError("measurement scan numbers start at 1");
        }
        Measurement z;
        z.position = Vector2(parse_double(row[cx]), parse_double(row[cy]));
        z.amplitude = parse_double(row[ca]);
        frames[k - 1].measurements.push_back(z);
    }
    return frames;
}

void write_tracks(const std::string& path, const std::vector<TrackRecord>& tracks) {
    auto out = open_output(path, "tracks", "", "run,k,label,x,vx,y,vy,snr_est_db,existence");
    for (const auto& t : tracks) {
        const auto& s = t.state;
        out << t.run << ',' << s.k << ',' << to_string(s.label) << ',' << format_number(s.state(0)) << ','
            << format_number(s.state(1)) << ',' << format_number(s.state(2)) << ',' << format_number(s.state(3))
            << ',' << format_number(s.snr_db) << ',' << format_number(t.existence) << '\n';
    }
}

std::vector<TrackRecord> read_tracks(const std::string& path) {
    const auto table =
        read_csv(path, "tracks", {"run", "k", "label", "x", "vx", "y", "vy", "snr_est_db", "existence"});
    const auto cr = table.column("run");
    const auto ck = table.column("k");
    const auto cl = table.column("label");
    const std::array<std::size_t, 4> cs{table.column("x"), table.column("vx"), table.column("y"),
                                        table.column("vy")};
    const auto cd = table.column("snr_est_db");
    const auto ce = table.column("existence");
    std::vector<TrackRecord> out;
    for (const auto& row : table.rows) {
        TrackRecord t;
        t.run = parse_int(row[cr]);
        t.state.k = parse_int(row[ck]);
        t.state.label = parse_label_field(row[cl]);
        for (int i = 0; i < 4; ++i) {
            t.state.state(i) = parse_double(row[cs[i]]);
        }
        t.state.snr_db = parse_double(row[cd]);
        t.existence = parse_double(row[ce]);
        out.push_back(t);
    }
    return out;
}

void write_metrics(const std::string& path, const std::vector<MetricRow>& rows) {
    auto out = open_output(path, "metrics", "", "k,ospa,loc,lab,card,snr_rmse");
    for (const auto& r : rows) {
        out << r.k << ',' << format_number(r.ospa) << ',' << format_number(r.localization) << ','
            << format_number(r.labeling) << ',' << format_number(r.cardinality) << ',' << format_number(r.snr_rmse)
            << '\n';
    }
}

std::vector<MetricRow> read_metrics(const std::string& path) {
    const auto table = read_csv(path, "metrics", {"k", "ospa", "loc", "lab", "card", "snr_rmse"});
    std::vector<MetricRow> out;
    for (const auto& row : table.rows) {
        MetricRow r;
        r.k = parse_int(row[table.column("k")]);
        r.ospa = parse_double(row[table.column("ospa")]);
        r.localization = parse_double(row[table.column("loc")]);
        r.labeling = parse_double(row[table.column("lab")]);
        r.cardinality = parse_double(row[table.column("card")]);
        r.snr_rmse = parse_double(row[table.column("snr_rmse")]);
        out.push_back(r);
    }
    return out;
}

std::vector<StateRecord> truth_records(const std::vector<TruthState>& truth) {
    std::vector<StateRecord> out;
    out.reserve(truth.size());
    for (const auto& s : truth) {
        out.push_back({s.k, s.label, s.state, s.snr_db});
    }
    return out;
}

void round_to_csv_precision(std::vector<TruthState>& truth) {
    for (auto& s : truth) {
        for (int i = 0; i < 4; ++i) {
            s.state(i) = parse_double(format_number(s.state(i)));
        }
        s.snr_db = parse_double(format_number(s.snr_db));
        s.snr = db_to_snr(s.snr_db);
    }
}

void round_to_csv_precision(std::vector<StateRecord>& records) {
    for (auto& r : records) {
        for (int i = 0; i < 4; ++i) {
            r.state(i) = parse_double(format_number(r.state(i)));
        }
        r.snr_db = parse_double(format_number(r.snr_db));
    }
}

void round_to_csv_precision(std::vector<MeasurementFrame>& frames) {
    for (auto& frame : frames) {
        for (auto& z : frame.measurements) {
            z.position = Vector2(parse_double(format_number(z.position.x())), parse_double(format_number(z.position.y())));
            z.amplitude = parse_double(format_number(z.amplitude));
        }
    }
}

}  // namespace fluctrack::harness
