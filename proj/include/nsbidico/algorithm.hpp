#ifndef NSBIDICO_ALGORITHM_HPP
#define NSBIDICO_ALGORITHM_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "nsbidico/coevolution.hpp"
#include "nsbidico/core.hpp"
#include "nsbidico/metrics.hpp"
#include "nsbidico/random.hpp"
#include "nsbidico/variation.hpp"

namespace nsbidico {

/// Parameters of one optimization run.
struct RunConfig {
    std::string problem;
    std::size_t population_size = 100;
    std::size_t budget = 20000;  ///< maximum function evaluations
    double F = 0.5;
    double CR = 1.0;
    /// Per-variable mutation probability; 1/n when unset.
    std::optional<double> p_m;
    double eta_m = 20.0;
    double epsilon = kDefaultEpsilon;
    std::uint64_t seed = 1;
    bool force_inherit = true;
    ArchiveNormalization archive_normalization = ArchiveNormalization::Reversed;
    /// Archive update sees P_{t+1} instead of P_t.
    bool archive_after_selection = false;

    /// Throws ContractViolation on an out-of-range field.
    void validate() const;
    VariationParams variation(std::size_t n) const;
};

struct AlgorithmState {
    std::size_t generation = 0;
    Population population;
    Population archive;
    EvaluationCounter evaluations;
    Rng rng;

    explicit AlgorithmState(std::uint64_t seed) : rng(seed) {}
};

/// Samples and evaluates the initial population; the archive starts empty.
AlgorithmState initialize(const RunConfig& config, const ProblemDefinition& problem);

/// True when another full generation fits in the budget.
bool can_step(const AlgorithmState& state, const RunConfig& config);

/// One generation: restricted mating, DE variation, environmental selection,
/// archive update.
void step(AlgorithmState& state, const RunConfig& config, const ProblemDefinition& problem);

struct RunResult {
    Population population;
    Population archive;
    std::size_t fe_used = 0;
    std::size_t generations = 0;
    double wall_time_seconds = 0.0;
    MetricResult igd;
    MetricResult hv;
    double feasible_ratio = 0.0;
    Population front;  ///< feasible non-dominated subset of the final population
};

/// Runs to the budget on a registered problem. Metrics use `reference`, or
/// the problem's default reference front when none is given.
RunResult run(const RunConfig& config, const PointSet* reference = nullptr);

/// Same, for an explicit problem definition.
RunResult run(const RunConfig& config, const ProblemDefinition& problem,
              const PointSet& reference);

}  // namespace nsbidico

#endif
