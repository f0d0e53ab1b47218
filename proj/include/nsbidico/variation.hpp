#ifndef NSBIDICO_VARIATION_HPP
#define NSBIDICO_VARIATION_HPP

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "nsbidico/core.hpp"
#include "nsbidico/random.hpp"

namespace nsbidico {

struct VariationParams {
    double F = 0.5;
    double CR = 1.0;
    double p_m = 0.0;
    double eta_m = 20.0;
    /// Guarantees at least one coordinate is taken from the mutant.
    bool force_inherit = true;

    void validate() const;
};

/// Indices into the mating pool: base/target parent and first
/// difference-vector endpoint.
struct MatingPair {
    std::size_t first;
    std::size_t second;
};

/// current + F * (r1 - r2), not clipped.
Vector de_mutation(std::span<const double> current, std::span<const double> r1,
                   std::span<const double> r2, double F);

/// Binomial crossover. When `force_inherit` is set, one index drawn before
/// the per-coordinate draws always takes the mutant value.
Vector binomial_crossover(std::span<const double> target, std::span<const double> mutant,
                          double CR, Rng& rng, bool force_inherit);

/// Inverse-CDF sample of the polynomial mutation perturbation for a uniform rho.
double polynomial_mutation_delta(double rho, double eta_m);

/// Perturbs each coordinate with probability p_m, then clips to bounds.
Vector polynomial_mutation(std::span<const double> u, const ProblemDefinition& problem,
                           double p_m, double eta_m, Rng& rng);

/// Builds one evaluated trial solution per mating pair.
///
/// For pair i: base = pool[first], difference pair (pool[second], pool[r]) with
/// r uniform over the pool and distinct from both parents when the pool
/// allows it; then binomial crossover against the base, polynomial mutation
/// and bound clipping. Each offspring costs one evaluation.
Population generate_offspring(std::span<const MatingPair> pairs, const Population& pool,
                              const VariationParams& params, const ProblemDefinition& problem,
                              double epsilon, Rng& rng, EvaluationCounter& counter);

}  // namespace nsbidico

#endif
