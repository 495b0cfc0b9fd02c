#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "bldctune/metrics.hpp"
#include "bldctune/rng.hpp"

namespace bldctune {

/// One candidate gain vector with its evaluation results. rank is the
/// 1-based front index once sorted; crowding_distance may be infinite for
/// front boundary members.
struct Individual {
    std::vector<double> genes;
    std::optional<FitnessPair> fitness;
    int rank = 0;
    double crowding_distance = 0.0;
};

struct Bounds {
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t dimension() const { return lower.size(); }
};

inline void validate(const Bounds& b) {
    if (b.lower.empty() || b.lower.size() != b.upper.size()) {
        throw std::invalid_argument("bounds vectors must be non-empty and equal length");
    }
    for (std::size_t i = 0; i < b.lower.size(); ++i) {
        if (!(b.lower[i] < b.upper[i])) {
            throw std::invalid_argument("bounds must satisfy lower < upper per gene");
        }
    }
}

struct Nsga2Config {
    int population_size = 10;
    int generations = 30;
    double crossover_probability = 0.9;
    double crossover_distribution_index = 15.0;
    double mutation_probability = 1.0 / 3.0;  // one expected mutation per 3-gene candidate
    double mutation_distribution_index = 20.0;
    std::uint64_t rng_seed = 1;
};

inline void validate(const Nsga2Config& cfg) {
    if (cfg.population_size < 4 || cfg.population_size % 2 != 0) {
        throw std::invalid_argument("population_size must be even and >= 4");
    }
    if (cfg.generations < 1) {
        throw std::invalid_argument("generations must be >= 1");
    }
    const auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!in_unit(cfg.crossover_probability) || !in_unit(cfg.mutation_probability)) {
        throw std::invalid_argument("operator probabilities must lie in [0, 1]");
    }
    if (cfg.crossover_distribution_index < 0.0 || cfg.mutation_distribution_index < 0.0) {
        throw std::invalid_argument("distribution indices must be non-negative");
    }
}

/// Pareto dominance with both objectives minimized: a is no worse in both
/// and strictly better in at least one.
inline bool dominates(const FitnessPair& a, const FitnessPair& b) {
    return a.f1_iae <= b.f1_iae && a.f2_thd <= b.f2_thd &&
           (a.f1_iae < b.f1_iae || a.f2_thd < b.f2_thd);
}

/// Partitions the population into non-dominated fronts F1, F2, ... and
/// assigns each individual its 1-based rank. Returns the fronts as index
/// lists. comparison_count, when provided, receives the number of pairwise
/// dominance checks performed.
inline std::vector<std::vector<std::size_t>> fast_non_dominated_sort(
    std::vector<Individual>& population, std::size_t* comparison_count = nullptr) {
    const std::size_t n = population.size();
    for (const auto& ind : population) {
        if (!ind.fitness.has_value()) {
            throw std::invalid_argument("non-dominated sort requires evaluated individuals");
        }
    }

    std::vector<std::vector<std::size_t>> dominated_by(n);
    std::vector<std::size_t> domination_count(n, 0);
    std::size_t comparisons = 0;

    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            const auto& fp = *population[p].fitness;
            const auto& fq = *population[q].fitness;
            comparisons += 2;
            if (dominates(fp, fq)) {
                dominated_by[p].push_back(q);
                ++domination_count[q];
            } else if (dominates(fq, fp)) {
                dominated_by[q].push_back(p);
                ++domination_count[p];
            }
        }
    }

    std::vector<std::vector<std::size_t>> fronts;
    std::vector<std::size_t> current;
    for (std::size_t i = 0; i < n; ++i) {
        if (domination_count[i] == 0) {
            current.push_back(i);
        }
    }
    int rank = 1;
    while (!current.empty()) {
        for (std::size_t i : current) {
            population[i].rank = rank;
        }
        std::vector<std::size_t> next;
        for (std::size_t p : current) {
            for (std::size_t q : dominated_by[p]) {
                if (--domination_count[q] == 0) {
                    next.push_back(q);
                }
            }
        }
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(current));
        current = std::move(next);
        ++rank;
    }

    if (comparison_count != nullptr) {
        *comparison_count = comparisons;
    }
    return fronts;
}

/// Crowding distance within one front: boundary members per objective get
/// infinity, interior members accrue the normalized neighbor gap per
/// objective. A degenerate objective (max == min) contributes nothing.
/// Returns distances aligned with the front's order.
inline std::vector<double> crowding_distance(const std::vector<Individual>& population,
                                             const std::vector<std::size_t>& front) {
    if (front.empty()) {
        throw std::invalid_argument("crowding distance needs a non-empty front");
    }
    const std::size_t m = front.size();
    std::vector<double> distance(m, 0.0);
    constexpr double kInf = std::numeric_limits<double>::infinity();

    if (m <= 2) {
        std::fill(distance.begin(), distance.end(), kInf);
        return distance;
    }

    const auto objective = [&](std::size_t front_pos, int which) {
        const auto& f = *population[front[front_pos]].fitness;
        return which == 0 ? f.f1_iae : f.f2_thd;
    };

    for (int which = 0; which < 2; ++which) {
        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t lhs, std::size_t rhs) {
                             return objective(lhs, which) < objective(rhs, which);
                         });

        const double span = objective(order.back(), which) - objective(order.front(), which);
        distance[order.front()] = kInf;
        distance[order.back()] = kInf;
        if (span <= 0.0) {
            continue;
        }
        for (std::size_t i = 1; i + 1 < m; ++i) {
            if (std::isinf(distance[order[i]])) {
                continue;
            }
            distance[order[i]] +=
                std::abs(objective(order[i + 1], which) - objective(order[i - 1], which)) / span;
        }
    }
    return distance;
}

/// Binary tournament on (rank, crowding distance); full ties resolve by coin flip.
inline std::size_t crowded_tournament_select(const std::vector<Individual>& population,
                                             Rng& rng) {
    const std::size_t a = rng.uniform_index(population.size());
    const std::size_t b = rng.uniform_index(population.size());
    if (a == b) {
        return a;
    }
    const Individual& ia = population[a];
    const Individual& ib = population[b];
    if (ia.rank != ib.rank) {
        return ia.rank < ib.rank ? a : b;
    }
    if (ia.crowding_distance != ib.crowding_distance) {
        return ia.crowding_distance > ib.crowding_distance ? a : b;
    }
    return rng.bernoulli(0.5) ? a : b;
}

/// Simulated binary crossover; children are clipped to bounds.
inline std::pair<Individual, Individual> sbx_crossover(const Individual& p1,
                                                       const Individual& p2,
                                                       const Bounds& bounds,
                                                       const Nsga2Config& cfg, Rng& rng) {
    Individual c1{p1.genes, std::nullopt, 0, 0.0};
    Individual c2{p2.genes, std::nullopt, 0, 0.0};

    if (!rng.bernoulli(cfg.crossover_probability)) {
        return {std::move(c1), std::move(c2)};
    }

    const double eta = cfg.crossover_distribution_index;
    for (std::size_t g = 0; g < bounds.dimension(); ++g) {
        if (!rng.bernoulli(0.5)) {
            continue;
        }
        const double x1 = p1.genes[g];
        const double x2 = p2.genes[g];
        if (std::abs(x1 - x2) <= 1e-14) {
            continue;
        }
        const double u = rng.uniform();
        const double exponent = 1.0 / (eta + 1.0);
        const double beta = u <= 0.5 ? std::pow(2.0 * u, exponent)
                                     : std::pow(1.0 / (2.0 * (1.0 - u)), exponent);
        const double y1 = 0.5 * ((1.0 + beta) * x1 + (1.0 - beta) * x2);
        const double y2 = 0.5 * ((1.0 - beta) * x1 + (1.0 + beta) * x2);
        c1.genes[g] = clamp(y1, bounds.lower[g], bounds.upper[g]);
        c2.genes[g] = clamp(y2, bounds.lower[g], bounds.upper[g]);
    }
    return {std::move(c1), std::move(c2)};
}

/// Per-gene polynomial mutation; results are clipped to bounds.
inline Individual polynomial_mutation(const Individual& ind, const Bounds& bounds,
                                      const Nsga2Config& cfg, Rng& rng) {
    Individual out{ind.genes, std::nullopt, 0, 0.0};
    const double eta = cfg.mutation_distribution_index;

    for (std::size_t g = 0; g < bounds.dimension(); ++g) {
        if (!rng.bernoulli(cfg.mutation_probability)) {
            continue;
        }
        const double lo = bounds.lower[g];
        const double hi = bounds.upper[g];
        const double range = hi - lo;
        const double x = out.genes[g];
        const double d1 = (x - lo) / range;
        const double d2 = (hi - x) / range;
        const double u = rng.uniform();
        const double exponent = 1.0 / (eta + 1.0);

        double delta = 0.0;
        if (u < 0.5) {
            const double v = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, eta + 1.0);
            delta = std::pow(v, exponent) - 1.0;
        } else {
            const double v =
                2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, eta + 1.0);
            delta = 1.0 - std::pow(v, exponent);
        }
        out.genes[g] = clamp(x + delta * range, lo, hi);
    }
    return out;
}

using FitnessEvaluator = std::function<FitnessPair(const std::vector<double>&)>;

struct GenerationSnapshot {
    int generation = 0;
    std::vector<Individual> population;
};

struct Nsga2Result {
    std::vector<Individual> population;   // final generation, ranks assigned
    std::vector<Individual> first_front;  // rank-1 members of the final generation
    std::vector<GenerationSnapshot> history;
};

namespace detail {

inline constexpr double kEvaluatorFailurePenalty = 1e6;

inline void evaluate_all(std::vector<Individual>& group,
                         const FitnessEvaluator& evaluator, bool parallel) {
    const auto evaluate_one = [&](Individual& ind) {
        if (ind.fitness.has_value()) {
            return;
        }
        try {
            ind.fitness = evaluator(ind.genes);
        } catch (const std::exception&) {
            ind.fitness =
                FitnessPair{kEvaluatorFailurePenalty, kEvaluatorFailurePenalty, true};
        }
    };

    const unsigned workers = std::min<unsigned>(
        std::max(1u, std::thread::hardware_concurrency()),
        static_cast<unsigned>(group.size()));
    if (!parallel || workers < 2 || group.size() < 2) {
        for (auto& ind : group) {
            evaluate_one(ind);
        }
        return;
    }

    std::vector<std::future<void>> jobs;
    jobs.reserve(group.size());
    for (auto& ind : group) {
        jobs.push_back(std::async(std::launch::async, [&evaluate_one, &ind] {
            evaluate_one(ind);
        }));
    }
    for (auto& job : jobs) {
        job.get();
    }
}

/// Ranks the population, assigns crowding distances front by front, and
/// keeps the best keep_count individuals by (rank, crowding distance).
inline std::vector<Individual> rank_and_truncate(std::vector<Individual> merged,
                                                 std::size_t keep_count) {
    const auto fronts = fast_non_dominated_sort(merged);

    std::vector<Individual> kept;
    kept.reserve(keep_count);
    for (const auto& front : fronts) {
        const auto distances = crowding_distance(merged, front);
        for (std::size_t i = 0; i < front.size(); ++i) {
            merged[front[i]].crowding_distance = distances[i];
        }
        if (kept.size() + front.size() <= keep_count) {
            for (std::size_t i : front) {
                kept.push_back(merged[i]);
            }
        } else {
            std::vector<std::size_t> order(front.size());
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return merged[front[a]].crowding_distance >
                       merged[front[b]].crowding_distance;
            });
            for (std::size_t i = 0; kept.size() < keep_count; ++i) {
                kept.push_back(merged[front[order[i]]]);
            }
        }
        if (kept.size() == keep_count) {
            break;
        }
    }
    return kept;
}

}  // namespace detail

/// Full NSGA-II run: uniform initialization within bounds, binary-tournament
/// selection, SBX and polynomial mutation producing one offspring set per
/// generation, merge with the parents, non-dominated sorting plus crowding
/// truncation back to the population size. Reproducible from cfg.rng_seed;
/// evaluator failures become penalty fitness instead of aborting the run.
inline Nsga2Result evolve(const FitnessEvaluator& evaluator, const Bounds& bounds,
                          const Nsga2Config& cfg, bool parallel_evaluations = true) {
    validate(cfg);
    validate(bounds);

    Rng rng(cfg.rng_seed);
    const std::size_t n = static_cast<std::size_t>(cfg.population_size);

    std::vector<Individual> population(n);
    for (auto& ind : population) {
        ind.genes.resize(bounds.dimension());
        for (std::size_t g = 0; g < bounds.dimension(); ++g) {
            ind.genes[g] = rng.uniform(bounds.lower[g], bounds.upper[g]);
        }
    }
    detail::evaluate_all(population, evaluator, parallel_evaluations);
    population = detail::rank_and_truncate(std::move(population), n);

    Nsga2Result result;
    result.history.push_back({0, population});

    for (int gen = 1; gen <= cfg.generations; ++gen) {
        std::vector<Individual> offspring;
        offspring.reserve(n);
        while (offspring.size() < n) {
            const std::size_t a = crowded_tournament_select(population, rng);
            const std::size_t b = crowded_tournament_select(population, rng);
            auto [c1, c2] = sbx_crossover(population[a], population[b], bounds, cfg, rng);
            offspring.push_back(polynomial_mutation(c1, bounds, cfg, rng));
            if (offspring.size() < n) {
                offspring.push_back(polynomial_mutation(c2, bounds, cfg, rng));
            }
        }
        detail::evaluate_all(offspring, evaluator, parallel_evaluations);

        std::vector<Individual> merged = population;
        merged.insert(merged.end(), std::make_move_iterator(offspring.begin()),
                      std::make_move_iterator(offspring.end()));
        population = detail::rank_and_truncate(std::move(merged), n);
        result.history.push_back({gen, population});
    }

    for (const auto& ind : population) {
        if (ind.rank == 1) {
            result.first_front.push_back(ind);
        }
    }
    result.population = std::move(population);
    return result;
}

}  // namespace bldctune
