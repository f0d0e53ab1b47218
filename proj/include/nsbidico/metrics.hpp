#ifndef NSBIDICO_METRICS_HPP
#define NSBIDICO_METRICS_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nsbidico/core.hpp"

namespace nsbidico {

/// Indicator value with the size of the set it was computed on. `value` is
/// NaN exactly when no feasible solution was available.
struct MetricResult {
    double value;
    std::size_t n_feasible = 0;
    std::size_t n_nondominated = 0;
};

/// Feasible members of `population` that no other feasible member
/// Pareto-dominates, in population order.
Population final_front(std::span<const Individual> population);

/// Indices of the points of `points` not Pareto-dominated by another point.
std::vector<std::size_t> nondominated_indices(std::span<const Vector> points);

PointSet objective_vectors(std::span<const Individual> individuals);

/// Mean over reference points of the distance to the nearest front point.
/// NaN for an empty front; an empty reference throws.
double igd(std::span<const Vector> front, std::span<const Vector> reference);

/// Exact hypervolume dominated by `points` and bounded by `reference_point`,
/// for two or three objectives. Points that do not strictly dominate the
/// reference point contribute nothing.
double hypervolume_exact(std::span<const Vector> points, std::span<const double> reference_point);

/// Hypervolume after normalizing by the reference front's ideal and nadir
/// points, measured against (1.1, ..., 1.1). NaN for an empty front.
double hypervolume(std::span<const Vector> front, std::span<const Vector> reference_front);

inline constexpr double kHypervolumeReferenceFactor = 1.1;

double feasible_ratio(std::span<const Individual> population);

MetricResult igd_metric(std::span<const Individual> population, std::span<const Vector> reference);
MetricResult hv_metric(std::span<const Individual> population, std::span<const Vector> reference);

enum class Orientation { SmallerIsBetter, LargerIsBetter };

/// '+' when sample A is significantly better, '-' when worse, '=' otherwise.
enum class Verdict { Better, Worse, Equivalent };

std::string to_string(Verdict verdict);

struct ComparisonVerdict {
    Verdict symbol = Verdict::Equivalent;
    double p_value = 1.0;
    double mean_a = 0.0;
    double mean_b = 0.0;
    double median_a = 0.0;
    double median_b = 0.0;
    std::size_t nan_removed_a = 0;
    std::size_t nan_removed_b = 0;
};

inline constexpr double kSignificanceLevel = 0.05;

/// Two-sided Wilcoxon rank-sum test (normal approximation with tie and
/// continuity corrections). NaN entries are dropped first; a sample that is
/// entirely NaN loses to one with values, and two all-NaN samples tie with p = 1.
ComparisonVerdict wilcoxon_rank_sum(std::span<const double> sample_a,
                                    std::span<const double> sample_b, Orientation orientation);

/// Normal-approximation two-sided p-value only.
double rank_sum_p_normal(std::span<const double> sample_a, std::span<const double> sample_b);

/// Exact two-sided p-value by enumerating every assignment of the pooled
/// ranks (mid-ranks on ties). Limited to samples of at most 10 each.
double rank_sum_p_exact(std::span<const double> sample_a, std::span<const double> sample_b);

}  // namespace nsbidico

#endif
