// bldctune: BLDC motor closed-loop simulation and multi-objective tuning
// of the cascaded position controller.
//
// Subcommands: simulate (one candidate -> trace), tune (full campaign),
// pareto (re-rank/inspect an archive), replay (rerun from a manifest).

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bldctune/bldctune.hpp"

namespace {

namespace fs = std::filesystem;
using namespace bldctune;

struct CommonOptions {
    std::string config_path;
    std::string scheme = "trapezoidal";
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
    std::optional<int> generations;
    std::optional<int> population;
    bool emit_plots = false;
};

void add_common_flags(CLI::App* cmd, CommonOptions* opts, bool tuning_flags) {
    cmd->add_option("--config", opts->config_path,
                    "Experiment config file (JSON); bundled defaults when omitted");
    cmd->add_option("--scheme", opts->scheme, "Control scheme: trapezoidal|foc")
        ->check(CLI::IsMember({"trapezoidal", "foc"}));
    cmd->add_option("--seed", opts->seed, "Campaign RNG seed override");
    cmd->add_option("--out", opts->out_dir, "Output directory");
    if (tuning_flags) {
        cmd->add_option("--generations", opts->generations, "NSGA-II generation count");
        cmd->add_option("--population", opts->population, "NSGA-II population size");
    }
    cmd->add_flag("--emit-plots", opts->emit_plots, "Write SVG plots next to the CSVs");
}

ExperimentConfig resolve_config(const CommonOptions& opts, bool scheme_given) {
    ExperimentConfig cfg;
    if (!opts.config_path.empty()) {
        cfg = load_config(opts.config_path);
        if (scheme_given) {
            cfg.scheme = scheme_from_string(opts.scheme);
        }
    } else {
        cfg = default_config(scheme_from_string(opts.scheme));
    }
    if (opts.seed.has_value()) {
        cfg.tuning.nsga.rng_seed = *opts.seed;
        cfg.trajectory.seed = *opts.seed;
    }
    if (opts.generations.has_value()) {
        cfg.tuning.nsga.generations = *opts.generations;
    }
    if (opts.population.has_value()) {
        cfg.tuning.nsga.population_size = *opts.population;
    }
    validate(cfg);
    for (const auto& warning : config_warnings(cfg)) {
        std::cerr << "warning: " << warning << "\n";
    }
    return cfg;
}

std::string in_dir(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void plot_trace(const SimTrace& trace, const std::string& dir,
                const std::string& suffix) {
    write_svg_chart(in_dir(dir, "position_response" + suffix + ".svg"),
                    "Tracked position response", "time [s]", "position [rad]",
                    {PlotSeries{"reference", trace.time, trace.theta_ref},
                     PlotSeries{"position", trace.time, trace.theta_mech}});
    write_svg_chart(in_dir(dir, "torque_profile" + suffix + ".svg"), "Torque profile",
                    "time [s]", "torque [N m]",
                    {PlotSeries{"Te", trace.time, trace.torque}});
}

void plot_pareto(const std::vector<ParetoRecord>& records, const std::string& dir) {
    PlotSeries points{"front", {}, {}, true, true};
    for (const auto& r : records) {
        points.x.push_back(r.f1_iae);
        points.y.push_back(r.f2_thd);
    }
    write_svg_chart(in_dir(dir, "pareto_front.svg"), "Pareto front",
                    "f1: position IAE [rad s]", "f2: torque THD [-]", {points});
}

int run_simulate(const CommonOptions& opts, bool scheme_given,
                 const std::vector<double>& gains) {
    const ExperimentConfig cfg = resolve_config(opts, scheme_given);
    if (!gains.empty() && gains.size() != 3) {
        throw std::invalid_argument("--gains expects kp,ki,kd");
    }

    const SimTrace trace = run_simulation(cfg, gains);
    const FitnessPair fitness = evaluate_candidate(cfg, gains);

    std::error_code ec;
    fs::create_directories(opts.out_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + opts.out_dir);
    }
    write_trace_csv(in_dir(opts.out_dir, "trace.csv"), trace);
    if (!trace.diverged) {
        write_spectrum_csv(in_dir(opts.out_dir, "spectrum.csv"),
                           trace_torque_spectrum(trace, cfg.tuning.thd_window));
    }
    ExperimentConfig resolved = cfg;
    if (!gains.empty()) {
        resolved.cascade.position_gains.kp = gains[0];
        resolved.cascade.position_gains.ki = gains[1];
        resolved.cascade.position_gains.kd = gains[2];
    }
    write_manifest(in_dir(opts.out_dir, "run_manifest.json"), resolved);
    if (opts.emit_plots) {
        plot_trace(trace, opts.out_dir, "");
    }

    std::cout << "scheme " << to_string(cfg.scheme) << ", " << trace.size()
              << " samples" << (trace.diverged ? " (diverged)" : "") << "\n"
              << "f1 (position IAE) = " << format_double(fitness.f1_iae) << " rad s\n"
              << "f2 (torque THD)   = " << format_double(fitness.f2_thd) << "\n"
              << "outputs in " << opts.out_dir << "\n";
    return 0;
}

int export_and_report(const TuneResult& result, const CommonOptions& opts) {
    export_tune_result(result, opts.out_dir);
    if (opts.emit_plots) {
        plot_pareto(result.pareto, opts.out_dir);
        for (std::size_t i = 0; i < result.traces.size(); ++i) {
            plot_trace(result.traces[i], opts.out_dir,
                       "_" + std::to_string(result.pareto[i].solution_index));
        }
    }

    std::cout << "final front (" << result.pareto.size() << " solutions, scheme "
              << to_string(result.resolved_config.scheme) << "):\n";
    std::cout << "  index        kp        ki        kd        f1_iae        f2_thd\n";
    for (const auto& r : result.pareto) {
        std::printf("  %5d %9.4f %9.4f %9.4f %13.6e %13.6e\n", r.solution_index,
                    r.genes[0], r.genes[1], r.genes[2], r.f1_iae, r.f2_thd);
    }
    std::cout << "outputs in " << opts.out_dir << "\n";
    return 0;
}

int run_tune(const CommonOptions& opts, bool scheme_given, bool stage1) {
    ExperimentConfig cfg = resolve_config(opts, scheme_given);
    if (stage1) {
        cfg.tuning.tune_inner_first = true;
    }
    const TuneResult result = tune(cfg);
    return export_and_report(result, opts);
}

int run_replay(const std::string& manifest_path, const CommonOptions& opts) {
    const ExperimentConfig cfg = read_manifest(manifest_path);
    const TuneResult result = tune(cfg);
    return export_and_report(result, opts);
}

int run_pareto(const std::string& archive_path, const CommonOptions& opts,
               bool rewrite) {
    const std::vector<ParetoRecord> records = read_pareto_csv(archive_path);

    std::vector<Individual> individuals;
    individuals.reserve(records.size());
    for (const auto& r : records) {
        individuals.push_back(
            Individual{r.genes, FitnessPair{r.f1_iae, r.f2_thd, false}, 0, 0.0});
    }
    const auto fronts = fast_non_dominated_sort(individuals);
    for (const auto& front : fronts) {
        const auto distances = crowding_distance(individuals, front);
        for (std::size_t i = 0; i < front.size(); ++i) {
            individuals[front[i]].crowding_distance = distances[i];
        }
    }

    std::cout << "archive " << archive_path << ": " << records.size()
              << " records, " << fronts.size() << " fronts\n";
    std::cout << "  index  rank  crowding        f1_iae        f2_thd\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        std::printf("  %5d %5d %9.4g %13.6e %13.6e\n", records[i].solution_index,
                    individuals[i].rank, individuals[i].crowding_distance,
                    records[i].f1_iae, records[i].f2_thd);
    }

    if (rewrite || opts.emit_plots) {
        std::error_code ec;
        fs::create_directories(opts.out_dir, ec);
        if (ec) {
            throw IoError("cannot create output directory " + opts.out_dir);
        }
    }
    if (rewrite) {
        std::vector<ParetoRecord> first_front;
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (individuals[i].rank == 1) {
                first_front.push_back(records[i]);
            }
        }
        std::stable_sort(first_front.begin(), first_front.end(),
                         [](const ParetoRecord& a, const ParetoRecord& b) {
                             return a.f1_iae < b.f1_iae;
                         });
        for (std::size_t i = 0; i < first_front.size(); ++i) {
            first_front[i].solution_index = static_cast<int>(i) + 1;
        }
        write_pareto_csv(in_dir(opts.out_dir, "pareto.csv"), first_front);
        std::cout << "re-ranked first front written to "
                  << in_dir(opts.out_dir, "pareto.csv") << "\n";
    }
    if (opts.emit_plots) {
        plot_pareto(records, opts.out_dir);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"BLDC motor simulation and controller tuning toolkit"};
    app.require_subcommand(1);

    CommonOptions sim_opts;
    std::vector<double> sim_gains;
    auto* simulate = app.add_subcommand("simulate", "Run one closed-loop simulation");
    add_common_flags(simulate, &sim_opts, false);
    simulate->add_option("--gains", sim_gains,
                         "Position PID gains kp,ki,kd (defaults from config)")
        ->delimiter(',');

    CommonOptions tune_opts;
    bool stage1 = false;
    auto* tune_cmd = app.add_subcommand("tune", "Run the two-stage tuning campaign");
    add_common_flags(tune_cmd, &tune_opts, true);
    tune_cmd->add_flag("--stage1", stage1,
                       "Re-tune the inner speed PI before the NSGA-II stage");

    CommonOptions pareto_opts;
    std::string archive_path;
    bool rewrite = false;
    auto* pareto_cmd = app.add_subcommand("pareto", "Inspect or re-rank an archive");
    pareto_cmd->add_option("--archive", archive_path, "pareto.csv to inspect")
        ->required();
    pareto_cmd->add_option("--out", pareto_opts.out_dir, "Output directory");
    pareto_cmd->add_flag("--rewrite", rewrite, "Write the re-ranked first front");
    pareto_cmd->add_flag("--emit-plots", pareto_opts.emit_plots, "Write the Pareto scatter");

    CommonOptions replay_opts;
    std::string manifest_path;
    auto* replay_cmd = app.add_subcommand("replay", "Re-run a campaign from its manifest");
    replay_cmd->add_option("--manifest", manifest_path, "run_manifest.json to replay")
        ->required();
    replay_cmd->add_option("--out", replay_opts.out_dir, "Output directory");
    replay_cmd->add_flag("--emit-plots", replay_opts.emit_plots, "Write SVG plots");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (simulate->parsed()) {
            return run_simulate(sim_opts, simulate->count("--scheme") > 0, sim_gains);
        }
        if (tune_cmd->parsed()) {
            return run_tune(tune_opts, tune_cmd->count("--scheme") > 0, stage1);
        }
        if (pareto_cmd->parsed()) {
            return run_pareto(archive_path, pareto_opts, rewrite);
        }
        if (replay_cmd->parsed()) {
            return run_replay(manifest_path, replay_opts);
        }
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
