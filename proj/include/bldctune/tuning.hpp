#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "bldctune/config.hpp"
#include "bldctune/nsga2.hpp"
#include "bldctune/simulation.hpp"

namespace bldctune {

/// One Pareto-front solution from a tuning campaign.
struct ParetoRecord {
    int solution_index = 0;  // 1-based, unique per run
    std::vector<double> genes;
    double f1_iae = 0.0;
    double f2_thd = 0.0;
    std::string scheme;
};

struct TuneResult {
    std::vector<ParetoRecord> pareto;  // sorted by f1_iae
    std::vector<SimTrace> traces;      // one re-simulated trace per record
    std::vector<GenerationSnapshot> history;
    ExperimentConfig resolved_config;  // config actually used in stage two
};

/// Stage-one single-objective pass: minimizes the speed-step IAE of the
/// inner speed PI by running the evolutionary loop with both objectives set
/// to that IAE (reduces to an elitist single-objective GA). Returns the best
/// [kp, ki].
inline std::vector<double> tune_inner_speed_pi(const ExperimentConfig& config,
                                               bool parallel = true) {
    const auto evaluator = [&config](const std::vector<double>& genes) {
        const SpeedStepResult r = run_speed_step(config, genes);
        const double f = r.diverged ? config.tuning.penalty_fitness : r.iae;
        return FitnessPair{f, f, r.diverged};
    };

    const Nsga2Result result =
        evolve(evaluator, config.tuning.inner_bounds, config.tuning.nsga, parallel);

    const Individual* best = nullptr;
    for (const auto& ind : result.population) {
        if (best == nullptr || ind.fitness->f1_iae < best->fitness->f1_iae) {
            best = &ind;
        }
    }
    return best->genes;
}

/// The bundled scheme-comparison campaign. A seeded random multi-step
/// trajectory keeps the rotor moving through the THD analysis window, and
/// the gain bounds are restricted to the regime where the controller still
/// tracks the dwell times; an overdamped crawl produces a near-DC torque
/// whose THD carries no ripple information. Both schemes share the
/// trajectory, seed, and bounds, so their fronts compare directly.
inline ExperimentConfig campaign_config(ControlScheme scheme, std::uint64_t seed) {
    ExperimentConfig cfg = default_config(scheme);
    cfg.trajectory.kind = TrajectoryConfig::Kind::multi_step;
    cfg.trajectory.seed = seed;
    cfg.trajectory.count = 5;
    cfg.trajectory.amplitude_range = {-2.0, 2.0};
    cfg.trajectory.dwell_range = {0.06, 0.12};
    cfg.sim_duration = 0.4;
    cfg.tuning.nsga.rng_seed = seed;
    cfg.tuning.position_bounds = Bounds{{5.0, 0.0, 0.0}, {50.0, 200.0, 1.0}};
    return cfg;
}

/// Two-stage campaign: optionally re-tune the inner speed PI (stage one),
/// then run NSGA-II over the outer position PID genes, re-simulate every
/// first-front solution, and return indexed records sorted by f1.
inline TuneResult tune(const ExperimentConfig& config, bool parallel = true) {
    validate(config);

    TuneResult result;
    result.resolved_config = config;

    if (config.tuning.tune_inner_first) {
        const std::vector<double> inner = tune_inner_speed_pi(config, parallel);
        result.resolved_config.cascade.speed_gains.kp = inner[0];
        result.resolved_config.cascade.speed_gains.ki = inner[1];
        result.resolved_config.cascade.speed_gains.kd = 0.0;
    }

    const ExperimentConfig& resolved = result.resolved_config;
    const auto evaluator = [&resolved](const std::vector<double>& genes) {
        return evaluate_candidate(resolved, genes);
    };

    Nsga2Result evolution = evolve(evaluator, resolved.tuning.position_bounds,
                                   resolved.tuning.nsga, parallel);
    result.history = std::move(evolution.history);

    std::vector<Individual> front = std::move(evolution.first_front);
    std::stable_sort(front.begin(), front.end(),
                     [](const Individual& a, const Individual& b) {
                         return a.fitness->f1_iae < b.fitness->f1_iae;
                     });

    for (std::size_t i = 0; i < front.size(); ++i) {
        ParetoRecord record;
        record.solution_index = static_cast<int>(i) + 1;
        record.genes = front[i].genes;
        record.f1_iae = front[i].fitness->f1_iae;
        record.f2_thd = front[i].fitness->f2_thd;
        record.scheme = to_string(resolved.scheme);
        result.pareto.push_back(std::move(record));
        result.traces.push_back(run_simulation(resolved, front[i].genes));
    }
    return result;
}

}  // namespace bldctune
