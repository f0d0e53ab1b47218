#include "nsbidico/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

namespace nsbidico {

namespace {
constexpr double kInvalidObjective = 1e300;
}  // namespace

void ProblemDefinition::validate() const {
    if (n < 1) throw ContractViolation(fmt::format("problem '{}': n must be >= 1", name));
    if (m < 2) throw ContractViolation(fmt::format("problem '{}': m must be >= 2", name));
    if (p > l) throw ContractViolation(fmt::format("problem '{}': p exceeds l", name));
    if (lower.size() != n || upper.size() != n)
        throw ContractViolation(fmt::format("problem '{}': bounds must have length n", name));
    for (std::size_t k = 0; k < n; ++k) {
        if (!(lower[k] < upper[k]))
            throw ContractViolation(
                fmt::format("problem '{}': lower bound {} is not below upper bound", name, k));
    }
    if (!evaluator) throw ContractViolation(fmt::format("problem '{}': missing evaluator", name));
}

double constraint_violation_component(double raw, std::size_t index, std::size_t p,
                                      double epsilon) {
    if (index < p) return std::max(0.0, raw);
    return std::max(0.0, std::abs(raw) - epsilon);
}

double total_cv(std::span<const double> components) {
    return std::accumulate(components.begin(), components.end(), 0.0);
}

double constraint_violation(std::span<const double> raw, std::size_t p, double epsilon) {
    double sum = 0.0;
    for (std::size_t j = 0; j < raw.size(); ++j)
        sum += constraint_violation_component(raw[j], j, p, epsilon);
    return sum;
}

Individual evaluate(const ProblemDefinition& problem, std::span<const double> x,
                    EvaluationCounter& counter, double epsilon) {
    if (x.size() != problem.n)
        throw ContractViolation(fmt::format("evaluate: expected {} variables, got {}",
                                            problem.n, x.size()));
    auto result = problem.evaluator(x);
    ++counter.used;
    if (result.objectives.size() != problem.m || result.constraints.size() != problem.l)
        throw ContractViolation(
            fmt::format("evaluate: problem '{}' returned mis-sized output", problem.name));

    Individual ind;
    ind.x.assign(x.begin(), x.end());
    ind.objectives = std::move(result.objectives);
    ind.constraints = std::move(result.constraints);

    const auto finite = [](double v) { return std::isfinite(v); };
    ind.valid = std::all_of(ind.objectives.begin(), ind.objectives.end(), finite) &&
                std::all_of(ind.constraints.begin(), ind.constraints.end(), finite);
    if (!ind.valid) {
        // Keep sorting and normalization well-defined for pathological points.
        for (double& f : ind.objectives)
            if (!std::isfinite(f)) f = kInvalidObjective;
        ind.cv = std::numeric_limits<double>::infinity();
    } else {
        ind.cv = constraint_violation(ind.constraints, problem.p, epsilon);
    }
    return ind;
}

Vector augmented_objectives(const Individual& ind) {
    Vector out(ind.objectives);
    out.push_back(ind.cv);
    return out;
}

Vector clip_to_bounds(std::span<const double> x, const ProblemDefinition& problem) {
    if (x.size() != problem.n) throw ContractViolation("clip_to_bounds: dimension mismatch");
    Vector out(x.begin(), x.end());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = std::clamp(out[k], problem.lower[k], problem.upper[k]);
    return out;
}

}  // namespace nsbidico
