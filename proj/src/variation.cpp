#include "nsbidico/variation.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace nsbidico {

void VariationParams::validate() const {
    const auto check_unit = [](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0))
            throw ContractViolation(fmt::format("{} must lie in [0, 1], got {}", name, v));
    };
    check_unit(F, "F");
    check_unit(CR, "CR");
    check_unit(p_m, "p_m");
    if (!(eta_m >= 0.0)) throw ContractViolation(fmt::format("eta_m must be >= 0, got {}", eta_m));
}

Vector de_mutation(std::span<const double> current, std::span<const double> r1,
                   std::span<const double> r2, double F) {
    if (current.size() != r1.size() || current.size() != r2.size())
        throw ContractViolation("de_mutation: length mismatch");
    Vector mutant(current.size());
    for (std::size_t j = 0; j < mutant.size(); ++j) mutant[j] = current[j] + F * (r1[j] - r2[j]);
    return mutant;
}

Vector binomial_crossover(std::span<const double> target, std::span<const double> mutant,
                          double CR, Rng& rng, bool force_inherit) {
    if (target.size() != mutant.size())
        throw ContractViolation("binomial_crossover: length mismatch");
    const std::size_t forced = force_inherit ? rng.index(target.size()) : target.size();
    Vector trial(target.begin(), target.end());
    for (std::size_t j = 0; j < trial.size(); ++j) {
        if (rng.uniform() < CR || j == forced) trial[j] = mutant[j];
    }
    return trial;
}

double polynomial_mutation_delta(double rho, double eta_m) {
    const double exponent = 1.0 / (eta_m + 1.0);
    if (rho <= 0.5) return std::pow(2.0 * rho, exponent) - 1.0;
    return 1.0 - std::pow(2.0 * (1.0 - rho), exponent);
}

Vector polynomial_mutation(std::span<const double> u, const ProblemDefinition& problem,
                           double p_m, double eta_m, Rng& rng) {
    if (u.size() != problem.n) throw ContractViolation("polynomial_mutation: dimension mismatch");
    Vector out(u.begin(), u.end());
    for (std::size_t j = 0; j < out.size(); ++j) {
        if (rng.uniform() < p_m) {
            const double delta = polynomial_mutation_delta(rng.uniform(), eta_m);
            out[j] += (problem.upper[j] - problem.lower[j]) * delta;
        }
    }
    return clip_to_bounds(out, problem);
}

namespace {

// Uniform pool index outside {a, b}; falls back to any index for tiny pools.
std::size_t draw_third(std::size_t pool_size, std::size_t a, std::size_t b, Rng& rng) {
    std::vector<std::size_t> excluded{a};
    if (b != a) excluded.push_back(b);
    if (pool_size <= excluded.size()) return rng.index(pool_size);
    std::size_t r = rng.index(pool_size - excluded.size());
    std::sort(excluded.begin(), excluded.end());
    for (std::size_t e : excluded)
        if (r >= e) ++r;
    return r;
}

}  // namespace

Population generate_offspring(std::span<const MatingPair> pairs, const Population& pool,
                              const VariationParams& params, const ProblemDefinition& problem,
                              double epsilon, Rng& rng, EvaluationCounter& counter) {
    if (pool.empty()) throw ContractViolation("generate_offspring: empty mating pool");
    Population offspring;
    offspring.reserve(pairs.size());
    for (const auto& pair : pairs) {
        if (pair.first >= pool.size() || pair.second >= pool.size())
            throw ContractViolation("generate_offspring: parent index outside the pool");
        const std::size_t third = draw_third(pool.size(), pair.first, pair.second, rng);
        const auto& base = pool[pair.first].x;
        const Vector mutant = de_mutation(base, pool[pair.second].x, pool[third].x, params.F);
        const Vector trial = binomial_crossover(base, mutant, params.CR, rng, params.force_inherit);
        const Vector mutated = polynomial_mutation(clip_to_bounds(trial, problem), problem,
                                                   params.p_m, params.eta_m, rng);
        offspring.push_back(evaluate(problem, mutated, counter, epsilon));
    }
    return offspring;
}

}  // namespace nsbidico
