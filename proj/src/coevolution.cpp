#include "nsbidico/coevolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nsbidico/ranking.hpp"

namespace nsbidico {

namespace {

void extend_frame(NormalizationFrame& frame, std::span<const Individual> members) {
    for (const auto& ind : members) {
        if (frame.z_min.empty()) {
            frame.z_min = ind.objectives;
            frame.z_max = ind.objectives;
            continue;
        }
        for (std::size_t i = 0; i < frame.z_min.size(); ++i) {
            frame.z_min[i] = std::min(frame.z_min[i], ind.objectives[i]);
            frame.z_max[i] = std::max(frame.z_max[i], ind.objectives[i]);
        }
    }
}

}  // namespace

NormalizationFrame NormalizationFrame::over(std::span<const Individual> members) {
    return over(members, {});
}

NormalizationFrame NormalizationFrame::over(std::span<const Individual> first,
                                            std::span<const Individual> second) {
    if (first.empty() && second.empty())
        throw ContractViolation("NormalizationFrame: no members to span");
    NormalizationFrame frame;
    extend_frame(frame, first);
    extend_frame(frame, second);
    return frame;
}

Vector normalize_reversed(const Individual& v, const NormalizationFrame& frame) {
    Vector out(v.objectives.size(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double range = frame.z_max[i] - frame.z_min[i];
        if (range > 0.0) out[i] = (frame.z_max[i] - v.objectives[i]) / range;
    }
    return out;
}

Vector normalize_standard(const Individual& v, const NormalizationFrame& frame) {
    Vector out(v.objectives.size(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double range = frame.z_max[i] - frame.z_min[i];
        if (range > 0.0) out[i] = (v.objectives[i] - frame.z_min[i]) / range;
    }
    return out;
}

double vector_angle(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ContractViolation("vector_angle: length mismatch");
    double norm_a = 0.0;
    double norm_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        norm_a += a[i] * a[i];
        norm_b += b[i] * b[i];
    }
    norm_a = std::sqrt(norm_a);
    norm_b = std::sqrt(norm_b);
    if (norm_a < 1e-12 || norm_b < 1e-12) return 0.0;
    // 2 atan2(|u - v|, |u + v|) on unit vectors; taking the shorter of the
    // two chords folds the result into [0, pi/2].
    double diff = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double u = a[i] / norm_a;
        const double v = b[i] / norm_b;
        diff += (u - v) * (u - v);
        sum += (u + v) * (u + v);
    }
    diff = std::sqrt(diff);
    sum = std::sqrt(sum);
    return 2.0 * std::atan2(std::min(diff, sum), std::max(diff, sum));
}

Population select_infeasible_nondominated(const Population& population, const Population& archive,
                                          const Population& offspring) {
    std::vector<const Individual*> united;
    united.reserve(population.size() + archive.size() + offspring.size());
    for (const auto* set : {&population, &archive, &offspring})
        for (const auto& ind : *set) united.push_back(&ind);

    std::vector<Vector> augmented;
    augmented.reserve(united.size());
    for (const auto* ind : united) augmented.push_back(augmented_objectives(*ind));

    Population selected;
    for (std::size_t i = 0; i < united.size(); ++i) {
        if (united[i]->feasible()) continue;
        bool dominated = false;
        for (std::size_t j = 0; j < united.size() && !dominated; ++j)
            dominated = j != i && pareto_dominates(augmented[j], augmented[i]);
        if (!dominated) selected.push_back(*united[i]);
    }
    return selected;
}

Population truncate_by_angle(Population candidates, std::size_t capacity,
                             ArchiveNormalization orientation) {
    if (candidates.size() <= capacity) return candidates;

    const auto frame = NormalizationFrame::over(candidates);
    std::vector<Vector> normalized;
    normalized.reserve(candidates.size());
    for (const auto& ind : candidates)
        normalized.push_back(orientation == ArchiveNormalization::Reversed
                                 ? normalize_reversed(ind, frame)
                                 : normalize_standard(ind, frame));

    const std::size_t size = candidates.size();
    std::vector<std::vector<double>> angle(size, std::vector<double>(size, 0.0));
    for (std::size_t i = 0; i < size; ++i)
        for (std::size_t j = i + 1; j < size; ++j)
            angle[i][j] = angle[j][i] = vector_angle(normalized[i], normalized[j]);

    std::vector<bool> alive(size, true);
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    // For each i, the alive partner j > i with the smallest angle (first on ties).
    std::vector<std::size_t> partner(size, none);
    const auto refresh = [&](std::size_t i) {
        partner[i] = none;
        for (std::size_t j = i + 1; j < size; ++j) {
            if (!alive[j]) continue;
            if (partner[i] == none || angle[i][j] < angle[i][partner[i]]) partner[i] = j;
        }
    };
    for (std::size_t i = 0; i < size; ++i) refresh(i);

    std::size_t remaining = size;
    while (remaining > capacity) {
        std::size_t best_i = none;
        for (std::size_t i = 0; i < size; ++i) {
            if (!alive[i] || partner[i] == none) continue;
            if (best_i == none || angle[i][partner[i]] < angle[best_i][partner[best_i]])
                best_i = i;
        }
        const std::size_t i = best_i;
        const std::size_t j = partner[i];
        const std::size_t removed = candidates[j].cv < candidates[i].cv ? i : j;
        alive[removed] = false;
        --remaining;
        for (std::size_t k = 0; k < size; ++k)
            if (alive[k] && (k == removed || partner[k] == removed)) refresh(k);
    }

    Population kept;
    kept.reserve(capacity);
    for (std::size_t i = 0; i < size; ++i)
        if (alive[i]) kept.push_back(std::move(candidates[i]));
    return kept;
}

Population update_archive(const Population& population, const Population& archive,
                          const Population& offspring, std::size_t capacity,
                          ArchiveNormalization orientation) {
    return truncate_by_angle(select_infeasible_nondominated(population, archive, offspring),
                             capacity, orientation);
}

std::size_t angle_diversity_rank(std::size_t capacity) {
    const auto k = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(capacity))));
    return std::max<std::size_t>(k, 1);
}

double angle_diversity(std::span<const Individual> population, std::size_t index,
                       const NormalizationFrame& frame, std::size_t k) {
    if (index >= population.size()) throw ContractViolation("angle_diversity: index out of range");
    if (population.size() == 1) return std::numbers::pi / 2.0;
    const Vector self = normalize_standard(population[index], frame);
    std::vector<double> angles;
    angles.reserve(population.size() - 1);
    for (std::size_t other = 0; other < population.size(); ++other) {
        if (other == index) continue;
        angles.push_back(vector_angle(self, normalize_standard(population[other], frame)));
    }
    const std::size_t rank = std::clamp<std::size_t>(k, 1, angles.size());
    std::nth_element(angles.begin(), angles.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                     angles.end());
    return angles[rank - 1];
}

std::vector<double> angle_diversity_table(std::span<const Individual> population,
                                          const NormalizationFrame& frame, std::size_t k) {
    const std::size_t size = population.size();
    if (size == 1) return {std::numbers::pi / 2.0};

    std::vector<Vector> normalized;
    normalized.reserve(size);
    for (const auto& ind : population) normalized.push_back(normalize_standard(ind, frame));

    std::vector<std::vector<double>> angle(size, std::vector<double>(size, 0.0));
    for (std::size_t i = 0; i < size; ++i)
        for (std::size_t j = i + 1; j < size; ++j)
            angle[i][j] = angle[j][i] = vector_angle(normalized[i], normalized[j]);

    const std::size_t rank = std::clamp<std::size_t>(k, 1, size - 1);
    std::vector<double> table(size);
    std::vector<double> row;
    for (std::size_t i = 0; i < size; ++i) {
        row.clear();
        for (std::size_t j = 0; j < size; ++j)
            if (j != i) row.push_back(angle[i][j]);
        std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                         row.end());
        table[i] = row[rank - 1];
    }
    return table;
}

RestrictedMating::RestrictedMating(const Population& population, const Population& archive,
                                   std::size_t capacity)
    : population_size_(population.size()),
      archive_size_(archive.size()),
      tournaments_(archive.size() >= capacity && !archive.empty()) {
    if (population.empty()) throw ContractViolation("restricted mating: empty population");
    if (!tournaments_) return;

    for (const auto& ind : population) population_cv_.push_back(ind.cv);
    for (const auto& ind : archive) archive_cv_.push_back(ind.cv);
    const auto frame = NormalizationFrame::over(population, archive);
    const std::size_t k = angle_diversity_rank(capacity);
    population_ad_ = angle_diversity_table(population, frame, k);
    archive_ad_ = angle_diversity_table(archive, frame, k);
}

MatingPair RestrictedMating::select(Rng& rng) const {
    if (!tournaments_) {
        const std::size_t pool = population_size_ + archive_size_;
        const std::size_t first = rng.index(pool);
        if (pool < 2) return {first, first};
        std::size_t second = rng.index(pool - 1);
        if (second >= first) ++second;
        return {first, second};
    }

    // Archive members sit after the population in the pool.
    const std::size_t x1 = rng.index(population_size_);
    const std::size_t a1 = rng.index(archive_size_);
    const std::size_t first =
        population_cv_[x1] <= archive_cv_[a1] ? x1 : population_size_ + a1;

    const std::size_t x2 = rng.index(population_size_);
    const std::size_t a2 = rng.index(archive_size_);
    const std::size_t second =
        archive_ad_[a2] > population_ad_[x2] ? population_size_ + a2 : x2;
    return {first, second};
}

std::vector<MatingPair> RestrictedMating::select_many(std::size_t count, Rng& rng) const {
    std::vector<MatingPair> pairs;
    pairs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) pairs.push_back(select(rng));
    return pairs;
}

MatingPair restricted_mating(const Population& population, const Population& archive,
                             std::size_t capacity, Rng& rng) {
    return RestrictedMating(population, archive, capacity).select(rng);
}

}  // namespace nsbidico
