#include "nsbidico/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "nsbidico/ranking.hpp"

namespace nsbidico {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double hypervolume_2d(std::vector<Vector> points, double ref_x, double ref_y) {
    std::sort(points.begin(), points.end());
    double volume = 0.0;
    double lowest = ref_y;
    for (const auto& pt : points) {
        if (pt[1] < lowest) {
            volume += (ref_x - pt[0]) * (lowest - pt[1]);
            lowest = pt[1];
        }
    }
    return volume;
}

double hypervolume_3d(std::vector<Vector> points, std::span<const double> ref) {
    std::sort(points.begin(), points.end(),
              [](const Vector& a, const Vector& b) { return a[2] < b[2]; });
    double volume = 0.0;
    std::vector<Vector> slice;
    for (std::size_t i = 0; i < points.size(); ++i) {
        slice.push_back({points[i][0], points[i][1]});
        const double top = i + 1 < points.size() ? points[i + 1][2] : ref[2];
        const double depth = top - points[i][2];
        if (depth > 0.0) volume += depth * hypervolume_2d(slice, ref[0], ref[1]);
    }
    return volume;
}

double mean_of(std::span<const double> values) {
    if (values.empty()) return kNaN;
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double median_of(std::vector<double> values) {
    if (values.empty()) return kNaN;
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<double> drop_nan(std::span<const double> values) {
    std::vector<double> out;
    for (double v : values)
        if (!std::isnan(v)) out.push_back(v);
    return out;
}

// Mid-ranks (1-based) of the pooled sample a ++ b.
std::vector<double> pooled_ranks(std::span<const double> a, std::span<const double> b) {
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::vector<std::size_t> order(pooled.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return pooled[i] < pooled[j]; });
    std::vector<double> ranks(pooled.size());
    std::size_t begin = 0;
    while (begin < order.size()) {
        std::size_t end = begin + 1;
        while (end < order.size() && pooled[order[end]] == pooled[order[begin]]) ++end;
        const double mid_rank = 0.5 * static_cast<double>(begin + 1 + end);
        for (std::size_t k = begin; k < end; ++k) ranks[order[k]] = mid_rank;
        begin = end;
    }
    return ranks;
}

}  // namespace

std::vector<std::size_t> nondominated_indices(std::span<const Vector> points) {
    std::vector<std::size_t> kept;
    if (points.empty()) return kept;

    if (points.front().size() == 2) {
        std::vector<std::size_t> order(points.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
        std::vector<bool> keep(points.size(), false);
        double best_f2 = std::numeric_limits<double>::infinity();
        double best_f1 = std::numeric_limits<double>::infinity();
        for (std::size_t idx : order) {
            const double f1 = points[idx][0];
            const double f2 = points[idx][1];
            // Every earlier point has f1' <= f1; it dominates unless it is identical.
            const bool dominated = best_f2 < f2 || (best_f2 == f2 && best_f1 < f1);
            keep[idx] = !dominated;
            if (f2 < best_f2) {
                best_f2 = f2;
                best_f1 = f1;
            }
        }
        for (std::size_t i = 0; i < points.size(); ++i)
            if (keep[i]) kept.push_back(i);
        return kept;
    }

    for (std::size_t i = 0; i < points.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < points.size() && !dominated; ++j)
            dominated = j != i && pareto_dominates(points[j], points[i]);
        if (!dominated) kept.push_back(i);
    }
    return kept;
}

PointSet objective_vectors(std::span<const Individual> individuals) {
    PointSet out;
    out.reserve(individuals.size());
    for (const auto& ind : individuals) out.push_back(ind.objectives);
    return out;
}

Population final_front(std::span<const Individual> population) {
    Population feasible;
    for (const auto& ind : population)
        if (ind.feasible()) feasible.push_back(ind);
    const auto objectives = objective_vectors(feasible);
    Population front;
    for (std::size_t i : nondominated_indices(objectives)) front.push_back(feasible[i]);
    return front;
}

double igd(std::span<const Vector> front, std::span<const Vector> reference) {
    if (reference.empty()) throw ContractViolation("igd: empty reference set");
    if (front.empty()) return kNaN;
    double total = 0.0;
    for (const auto& r : reference) {
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& a : front) {
            double sq = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i) sq += (r[i] - a[i]) * (r[i] - a[i]);
            nearest = std::min(nearest, sq);
        }
        total += std::sqrt(nearest);
    }
    return total / static_cast<double>(reference.size());
}

double hypervolume_exact(std::span<const Vector> points, std::span<const double> reference_point) {
    const std::size_t m = reference_point.size();
    if (m < 2 || m > 3)
        throw UnsupportedMetric(fmt::format("hypervolume supports 2 or 3 objectives, got {}", m));
    std::vector<Vector> inside;
    for (const auto& pt : points) {
        if (pt.size() != m) throw ContractViolation("hypervolume: dimension mismatch");
        bool strictly = true;
        for (std::size_t i = 0; i < m; ++i) strictly = strictly && pt[i] < reference_point[i];
        if (strictly) inside.push_back(pt);
    }
    if (inside.empty()) return 0.0;
    if (m == 2) return hypervolume_2d(std::move(inside), reference_point[0], reference_point[1]);
    return hypervolume_3d(std::move(inside), reference_point);
}

double hypervolume(std::span<const Vector> front, std::span<const Vector> reference_front) {
    if (front.empty()) return kNaN;
    if (reference_front.empty()) throw ContractViolation("hypervolume: empty reference front");
    const std::size_t m = reference_front.front().size();
    Vector ideal(reference_front.front());
    Vector nadir(reference_front.front());
    for (const auto& r : reference_front) {
        for (std::size_t i = 0; i < m; ++i) {
            ideal[i] = std::min(ideal[i], r[i]);
            nadir[i] = std::max(nadir[i], r[i]);
        }
    }
    std::vector<Vector> normalized;
    normalized.reserve(front.size());
    for (const auto& pt : front) {
        Vector v(m);
        for (std::size_t i = 0; i < m; ++i) {
            const double range = nadir[i] - ideal[i];
            v[i] = (pt[i] - ideal[i]) / (range > 0.0 ? range : 1.0);
        }
        normalized.push_back(std::move(v));
    }
    const Vector ref(m, kHypervolumeReferenceFactor);
    return hypervolume_exact(normalized, ref);
}

double feasible_ratio(std::span<const Individual> population) {
    if (population.empty()) return 0.0;
    const auto feasible = std::count_if(population.begin(), population.end(),
                                        [](const Individual& ind) { return ind.feasible(); });
    return static_cast<double>(feasible) / static_cast<double>(population.size());
}

namespace {

template <typename Indicator>
MetricResult front_metric(std::span<const Individual> population, Indicator&& indicator) {
    MetricResult result{kNaN};
    result.n_feasible = static_cast<std::size_t>(std::count_if(
        population.begin(), population.end(), [](const Individual& ind) { return ind.feasible(); }));
    const auto front = final_front(population);
    result.n_nondominated = front.size();
    if (!front.empty()) result.value = indicator(objective_vectors(front));
    return result;
}

}  // namespace

MetricResult igd_metric(std::span<const Individual> population, std::span<const Vector> reference) {
    return front_metric(population, [&](const PointSet& front) { return igd(front, reference); });
}

MetricResult hv_metric(std::span<const Individual> population, std::span<const Vector> reference) {
    return front_metric(population,
                        [&](const PointSet& front) { return hypervolume(front, reference); });
}

std::string to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::Better: return "+";
        case Verdict::Worse: return "−";
        case Verdict::Equivalent: return "=";
    }
    return "?";
}

double rank_sum_p_normal(std::span<const double> sample_a, std::span<const double> sample_b) {
    const auto n1 = static_cast<double>(sample_a.size());
    const auto n2 = static_cast<double>(sample_b.size());
    const double n = n1 + n2;
    const auto ranks = pooled_ranks(sample_a, sample_b);
    const double w = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(sample_a.size()), 0.0);

    // Tie term: sum of (t^3 - t) over groups of equal mid-ranks.
    std::vector<double> sorted(ranks);
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    for (std::size_t begin = 0; begin < sorted.size();) {
        std::size_t end = begin + 1;
        while (end < sorted.size() && sorted[end] == sorted[begin]) ++end;
        const auto t = static_cast<double>(end - begin);
        tie_term += t * t * t - t;
        begin = end;
    }

    const double mean = n1 * (n + 1.0) / 2.0;
    const double variance = n > 1.0 ? n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0))) : 0.0;
    if (!(variance > 0.0)) return 1.0;
    const double z = std::max(0.0, std::abs(w - mean) - 0.5) / std::sqrt(variance);
    return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

double rank_sum_p_exact(std::span<const double> sample_a, std::span<const double> sample_b) {
    const std::size_t n1 = sample_a.size();
    const std::size_t n2 = sample_b.size();
    if (n1 == 0 || n2 == 0) throw ContractViolation("rank_sum_p_exact: empty sample");
    if (n1 > 10 || n2 > 10) throw ContractViolation("rank_sum_p_exact: samples limited to 10");
    const auto ranks = pooled_ranks(sample_a, sample_b);
    // Doubled mid-ranks are integers, so sums compare exactly.
    std::vector<long> doubled(ranks.size());
    for (std::size_t i = 0; i < ranks.size(); ++i) doubled[i] = std::lround(2.0 * ranks[i]);
    long observed = 0;
    for (std::size_t i = 0; i < n1; ++i) observed += doubled[i];

    const std::size_t n = n1 + n2;
    std::vector<bool> chosen(n, false);
    std::fill(chosen.begin(), chosen.begin() + static_cast<std::ptrdiff_t>(n1), true);
    std::size_t total = 0;
    std::size_t at_most = 0;
    std::size_t at_least = 0;
    // prev_permutation walks every n1-subset of the n positions once.
    do {
        long sum = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (chosen[i]) sum += doubled[i];
        ++total;
        if (sum <= observed) ++at_most;
        if (sum >= observed) ++at_least;
    } while (std::prev_permutation(chosen.begin(), chosen.end()));

    const double tail = static_cast<double>(std::min(at_most, at_least)) / static_cast<double>(total);
    return std::min(1.0, 2.0 * tail);
}

ComparisonVerdict wilcoxon_rank_sum(std::span<const double> sample_a,
                                    std::span<const double> sample_b, Orientation orientation) {
    const auto a = drop_nan(sample_a);
    const auto b = drop_nan(sample_b);
    ComparisonVerdict verdict;
    verdict.nan_removed_a = sample_a.size() - a.size();
    verdict.nan_removed_b = sample_b.size() - b.size();
    verdict.mean_a = mean_of(a);
    verdict.mean_b = mean_of(b);
    verdict.median_a = median_of(a);
    verdict.median_b = median_of(b);

    if (a.empty() || b.empty()) {
        if (a.empty() && b.empty()) {
            verdict.symbol = Verdict::Equivalent;
            verdict.p_value = 1.0;
        } else {
            verdict.symbol = a.empty() ? Verdict::Worse : Verdict::Better;
            verdict.p_value = 0.0;
        }
        return verdict;
    }

    verdict.p_value = rank_sum_p_normal(a, b);
    if (verdict.p_value >= kSignificanceLevel) {
        verdict.symbol = Verdict::Equivalent;
        return verdict;
    }
    const auto ranks = pooled_ranks(a, b);
    const double rank_a =
        std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(a.size()), 0.0);
    const double total = std::accumulate(ranks.begin(), ranks.end(), 0.0);
    const double mean_rank_a = rank_a / static_cast<double>(a.size());
    const double mean_rank_b = (total - rank_a) / static_cast<double>(b.size());
    const bool a_higher = mean_rank_a > mean_rank_b;
    const bool a_better = orientation == Orientation::LargerIsBetter ? a_higher : !a_higher;
    verdict.symbol = a_better ? Verdict::Better : Verdict::Worse;
    return verdict;
}

}  // namespace nsbidico
