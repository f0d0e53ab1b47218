#ifndef NSBIDICO_CORE_HPP
#define NSBIDICO_CORE_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsbidico {

using Vector = std::vector<double>;
using PointSet = std::vector<Vector>;

/// Raised when a caller breaks a documented precondition.
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an indicator cannot be computed for a problem.
class UnsupportedMetric : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultEpsilon = 1e-4;

/// Raw evaluator output: objectives (length m) followed by constraint values
/// (length l, inequalities first).
struct EvaluationResult {
    Vector objectives;
    Vector constraints;
};

using Evaluator = std::function<EvaluationResult(std::span<const double>)>;
using FrontGenerator = std::function<PointSet(std::size_t)>;

/// A box-bounded constrained multi-objective minimization problem.
///
/// Constraints are g_j(x) <= 0 for the first `p` entries and h_j(x) = 0 for
/// the remaining `l - p`.
struct ProblemDefinition {
    std::string name;
    std::size_t n = 0;  ///< decision dimension
    std::size_t m = 0;  ///< objective count
    std::size_t p = 0;  ///< inequality count
    std::size_t l = 0;  ///< total constraint count
    Vector lower;
    Vector upper;
    Evaluator evaluator;
    /// Optional; produces points on the constrained Pareto front.
    FrontGenerator reference_front;
    /// Argument passed to `reference_front` when the caller has no preference.
    std::size_t default_reference_count = 0;

    /// Throws ContractViolation if any structural invariant is broken.
    void validate() const;
};

struct Individual {
    Vector x;
    Vector objectives;
    Vector constraints;
    double cv = 0.0;
    /// False when the evaluator produced non-finite output; cv is then +inf.
    bool valid = true;
    std::optional<std::size_t> rank;
    std::optional<double> crowding;

    bool feasible() const { return cv == 0.0; }
};

using Population = std::vector<Individual>;

/// Counts function evaluations for one run.
struct EvaluationCounter {
    std::size_t used = 0;
};

double constraint_violation_component(double raw, std::size_t index, std::size_t p,
                                      double epsilon = kDefaultEpsilon);

double total_cv(std::span<const double> components);

/// Sum of the per-constraint violations of a raw constraint vector.
double constraint_violation(std::span<const double> raw, std::size_t p,
                            double epsilon = kDefaultEpsilon);

/// Evaluates `x` and charges one evaluation to `counter`.
Individual evaluate(const ProblemDefinition& problem, std::span<const double> x,
                    EvaluationCounter& counter, double epsilon = kDefaultEpsilon);

/// [f_1, ..., f_m, CV].
Vector augmented_objectives(const Individual& ind);

Vector clip_to_bounds(std::span<const double> x, const ProblemDefinition& problem);

}  // namespace nsbidico

#endif
