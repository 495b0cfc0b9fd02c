#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bldctune/csv.hpp"
#include "bldctune/metrics.hpp"
#include "bldctune/nsga2.hpp"
#include "bldctune/tuning.hpp"

namespace bldctune {

inline std::vector<std::string> gene_names(std::size_t count) {
    if (count == 3) {
        return {"kp", "ki", "kd"};
    }
    if (count == 2) {
        return {"kp", "ki"};
    }
    std::vector<std::string> names;
    for (std::size_t i = 0; i < count; ++i) {
        names.push_back("g" + std::to_string(i));
    }
    return names;
}

inline void write_pareto_csv(const std::string& path,
                             const std::vector<ParetoRecord>& records,
                             std::size_t gene_count = 3) {
    std::vector<std::string> header{"solution_index"};
    for (const auto& name : gene_names(records.empty() ? gene_count
                                                       : records.front().genes.size())) {
        header.push_back(name);
    }
    header.insert(header.end(), {"f1_iae", "f2_thd", "scheme"});

    std::vector<std::vector<std::string>> rows;
    for (const auto& r : records) {
        std::vector<std::string> row{std::to_string(r.solution_index)};
        for (double g : r.genes) {
            row.push_back(format_double(g));
        }
        row.push_back(format_double(r.f1_iae));
        row.push_back(format_double(r.f2_thd));
        row.push_back(r.scheme);
        rows.push_back(std::move(row));
    }
    write_csv(path, header, rows);
}

inline std::vector<ParetoRecord> read_pareto_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    if (table.header.size() < 4 || table.header.front() != "solution_index") {
        throw IoError("not a pareto archive: " + path);
    }
    const std::size_t gene_count = table.header.size() - 4;

    std::vector<ParetoRecord> records;
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) {
            throw IoError("malformed pareto row in " + path);
        }
        ParetoRecord r;
        r.solution_index = static_cast<int>(parse_double(row[0]));
        for (std::size_t g = 0; g < gene_count; ++g) {
            r.genes.push_back(parse_double(row[1 + g]));
        }
        r.f1_iae = parse_double(row[1 + gene_count]);
        r.f2_thd = parse_double(row[2 + gene_count]);
        r.scheme = row[3 + gene_count];
        records.push_back(std::move(r));
    }
    return records;
}

inline void write_trace_csv(const std::string& path, const SimTrace& trace) {
    const std::vector<std::string> header{"time",  "theta_ref", "theta_mech",
                                          "omega", "torque",    "ia",
                                          "ib",    "ic",        "actuation"};
    std::vector<std::vector<std::string>> rows;
    rows.reserve(trace.size());
    for (std::size_t k = 0; k < trace.size(); ++k) {
        rows.push_back({format_double(trace.time[k]), format_double(trace.theta_ref[k]),
                        format_double(trace.theta_mech[k]), format_double(trace.omega[k]),
                        format_double(trace.torque[k]), format_double(trace.ia[k]),
                        format_double(trace.ib[k]), format_double(trace.ic[k]),
                        format_double(trace.actuation[k])});
    }
    write_csv(path, header, rows);
}

inline SimTrace read_trace_csv(const std::string& path, double sample_time) {
    const CsvTable table = read_csv(path);
    if (table.header.size() != 9 || table.header.front() != "time") {
        throw IoError("not a trace file: " + path);
    }
    SimTrace trace;
    trace.sample_time = sample_time;
    for (const auto& row : table.rows) {
        if (row.size() != 9) {
            throw IoError("malformed trace row in " + path);
        }
        trace.time.push_back(parse_double(row[0]));
        trace.theta_ref.push_back(parse_double(row[1]));
        trace.theta_mech.push_back(parse_double(row[2]));
        trace.omega.push_back(parse_double(row[3]));
        trace.torque.push_back(parse_double(row[4]));
        trace.ia.push_back(parse_double(row[5]));
        trace.ib.push_back(parse_double(row[6]));
        trace.ic.push_back(parse_double(row[7]));
        trace.actuation.push_back(parse_double(row[8]));
    }
    return trace;
}

inline void write_history_csv(const std::string& path,
                              const std::vector<GenerationSnapshot>& history) {
    std::size_t gene_count = 3;
    if (!history.empty() && !history.front().population.empty()) {
        gene_count = history.front().population.front().genes.size();
    }
    std::vector<std::string> header{"generation"};
    for (const auto& name : gene_names(gene_count)) {
        header.push_back(name);
    }
    header.insert(header.end(), {"f1_iae", "f2_thd", "rank", "crowding_distance"});

    std::vector<std::vector<std::string>> rows;
    for (const auto& snapshot : history) {
        for (const auto& ind : snapshot.population) {
            std::vector<std::string> row{std::to_string(snapshot.generation)};
            for (double g : ind.genes) {
                row.push_back(format_double(g));
            }
            row.push_back(format_double(ind.fitness->f1_iae));
            row.push_back(format_double(ind.fitness->f2_thd));
            row.push_back(std::to_string(ind.rank));
            row.push_back(format_double(ind.crowding_distance));
            rows.push_back(std::move(row));
        }
    }
    write_csv(path, header, rows);
}

inline void write_spectrum_csv(const std::string& path,
                               const std::vector<SpectrumBin>& bins) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(bins.size());
    for (const auto& bin : bins) {
        rows.push_back({format_double(bin.frequency), format_double(bin.magnitude)});
    }
    write_csv(path, {"frequency_hz", "magnitude"}, rows);
}

/// The manifest captures the fully resolved configuration (including the
/// seed) so a run can be replayed bit-identically.
inline void write_manifest(const std::string& path, const ExperimentConfig& config) {
    json manifest{{"format", "bldctune-manifest"},
                  {"version", 1},
                  {"config", config}};
    write_file(path, manifest.dump(2) + "\n");
}

inline ExperimentConfig read_manifest(const std::string& path) {
    json manifest;
    try {
        manifest = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("manifest parse error: ") + e.what());
    }
    if (manifest.value("format", "") != "bldctune-manifest") {
        throw std::invalid_argument("not a bldctune manifest: " + path);
    }
    ExperimentConfig config;
    try {
        manifest.at("config").get_to(config);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("manifest config error: ") + e.what());
    }
    validate(config);
    return config;
}

/// Spectrum of the torque analysis window used by the THD objective.
inline std::vector<SpectrumBin> trace_torque_spectrum(const SimTrace& trace,
                                                      const ThdWindow& window) {
    std::size_t start = 0;
    if (window.kind == ThdWindow::Kind::steady_state_fraction) {
        start = trace.size() -
                static_cast<std::size_t>(std::ceil(window.fraction * trace.size()));
    }
    const std::vector<double> torque(
        trace.torque.begin() + static_cast<std::ptrdiff_t>(start), trace.torque.end());
    return magnitude_spectrum(torque, trace.sample_time);
}

/// Writes the campaign artifacts: pareto.csv, front_history.csv, one
/// trace_<index>.csv and spectrum_<index>.csv per front solution, and the
/// replayable run_manifest.json.
inline void export_tune_result(const TuneResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
    }
    const auto in_dir = [&out_dir](const std::string& name) {
        return (fs::path(out_dir) / name).string();
    };

    write_pareto_csv(in_dir("pareto.csv"), result.pareto,
                     result.resolved_config.tuning.position_bounds.dimension());
    write_history_csv(in_dir("front_history.csv"), result.history);
    write_manifest(in_dir("run_manifest.json"), result.resolved_config);

    for (std::size_t i = 0; i < result.pareto.size(); ++i) {
        const std::string suffix = std::to_string(result.pareto[i].solution_index);
        const SimTrace& trace = result.traces[i];
        write_trace_csv(in_dir("trace_" + suffix + ".csv"), trace);
        if (!trace.diverged) {
            write_spectrum_csv(
                in_dir("spectrum_" + suffix + ".csv"),
                trace_torque_spectrum(trace, result.resolved_config.tuning.thd_window));
        }
    }
}

}  // namespace bldctune
