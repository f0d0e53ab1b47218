#include "nsbidico/algorithm.hpp"

#include <chrono>

#include <fmt/format.h>

#include "nsbidico/problems.hpp"
#include "nsbidico/ranking.hpp"

namespace nsbidico {

void RunConfig::validate() const {
    if (population_size < 4)
        throw ContractViolation(fmt::format("population size must be >= 4, got {}", population_size));
    if (budget < population_size)
        throw ContractViolation(
            fmt::format("budget {} is smaller than the population size {}", budget, population_size));
    if (!(epsilon >= 0.0)) throw ContractViolation("epsilon must be non-negative");
    VariationParams params{F, CR, p_m.value_or(0.0), eta_m, force_inherit};
    params.validate();
}

VariationParams RunConfig::variation(std::size_t n) const {
    return VariationParams{F, CR, p_m.value_or(1.0 / static_cast<double>(n)), eta_m, force_inherit};
}

AlgorithmState initialize(const RunConfig& config, const ProblemDefinition& problem) {
    config.validate();
    problem.validate();
    AlgorithmState state(config.seed);
    state.population.reserve(config.population_size);
    Vector x(problem.n);
    for (std::size_t i = 0; i < config.population_size; ++i) {
        for (std::size_t k = 0; k < problem.n; ++k)
            x[k] = state.rng.uniform(problem.lower[k], problem.upper[k]);
        state.population.push_back(evaluate(problem, x, state.evaluations, config.epsilon));
    }
    return state;
}

bool can_step(const AlgorithmState& state, const RunConfig& config) {
    return state.evaluations.used + config.population_size <= config.budget;
}

void step(AlgorithmState& state, const RunConfig& config, const ProblemDefinition& problem) {
    const std::size_t capacity = config.population_size;

    Population pool(state.population);
    pool.insert(pool.end(), state.archive.begin(), state.archive.end());
    const RestrictedMating mating(state.population, state.archive, capacity);
    const auto pairs = mating.select_many(capacity, state.rng);

    auto offspring = generate_offspring(pairs, pool, config.variation(problem.n), problem,
                                        config.epsilon, state.rng, state.evaluations);

    auto next = environmental_selection(state.population, offspring, capacity);
    const Population& archive_source =
        config.archive_after_selection ? next : state.population;
    state.archive = update_archive(archive_source, state.archive, offspring, capacity,
                                   config.archive_normalization);
    state.population = std::move(next);
    ++state.generation;
}

RunResult run(const RunConfig& config, const ProblemDefinition& problem,
              const PointSet& reference) {
    const auto start = std::chrono::steady_clock::now();
    auto state = initialize(config, problem);
    while (can_step(state, config)) step(state, config, problem);

    RunResult result;
    result.fe_used = state.evaluations.used;
    result.generations = state.generation;
    result.igd = igd_metric(state.population, reference);
    result.hv = problem.m <= 3 ? hv_metric(state.population, reference)
                               : MetricResult{std::numeric_limits<double>::quiet_NaN()};
    result.feasible_ratio = feasible_ratio(state.population);
    result.front = final_front(state.population);
    result.population = std::move(state.population);
    result.archive = std::move(state.archive);
    result.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

RunResult run(const RunConfig& config, const PointSet* reference) {
    const auto problem = builtin_problems().get(config.problem);
    if (reference) return run(config, problem, *reference);
    const auto front = reference_front(problem, problem.default_reference_count);
    return run(config, problem, front);
}

}  // namespace nsbidico
