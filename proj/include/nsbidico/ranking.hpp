#ifndef NSBIDICO_RANKING_HPP
#define NSBIDICO_RANKING_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "nsbidico/core.hpp"

namespace nsbidico {

/// Pareto dominance under minimization.
bool pareto_dominates(std::span<const double> a, std::span<const double> b);

/// Constraint dominance principle: feasible beats infeasible, lower CV wins
/// among infeasible, Pareto dominance decides among feasible.
bool cdp_dominates(const Individual& a, const Individual& b);

/// Compares objective vectors only (ignores constraints).
bool objective_dominates(const Individual& a, const Individual& b);

using IndexDominance = std::function<bool(std::size_t, std::size_t)>;
using Comparator = std::function<bool(const Individual&, const Individual&)>;

/// Ordered fronts F1, F2, ... of indices into the sorted input.
struct FrontPartition {
    std::vector<std::vector<std::size_t>> fronts;
};

/// Fast non-dominated sort over `count` items related by `dominates(i, j)`.
/// Indices inside each front are ascending.
FrontPartition fast_nondominated_sort(std::size_t count, const IndexDominance& dominates);

/// Sorts a population and writes each member's rank (0-based front index).
FrontPartition fast_nondominated_sort(std::span<Individual> pop, const Comparator& comparator);

/// Crowding distance of each member of `front`, in input order.
///
/// Per objective with a non-zero range, members holding the minimum or
/// maximum value are boundary points (+inf). Interior members add the gap
/// between the nearest distinct smaller and larger values, divided by the
/// range; a member whose value is shared by another member adds 0. The result
/// does not depend on the input order.
std::vector<double> crowding_distance(std::span<const Individual> front);

/// Same computation over raw objective vectors.
std::vector<double> crowding_distance(std::span<const Vector> objectives);

/// Picks min(N, |P ∪ Q|) survivors from P ∪ Q: whole CDP fronts while they
/// fit, then the largest-crowding members of the first overflowing front
/// (ties keep union order). Survivors carry rank and crowding.
Population environmental_selection(const Population& parents, const Population& offspring,
                                   std::size_t capacity);

}  // namespace nsbidico

#endif
