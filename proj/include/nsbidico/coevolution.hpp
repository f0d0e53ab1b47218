#ifndef NSBIDICO_COEVOLUTION_HPP
#define NSBIDICO_COEVOLUTION_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nsbidico/core.hpp"
#include "nsbidico/random.hpp"
#include "nsbidico/variation.hpp"

namespace nsbidico {

/// Ideal (componentwise minimum) and nadir (componentwise maximum) objective
/// estimates over a reference set.
struct NormalizationFrame {
    Vector z_min;
    Vector z_max;

    /// Frame spanning the objectives of `members`. Empty input is an error.
    static NormalizationFrame over(std::span<const Individual> members);
    /// Frame spanning two populations taken together.
    static NormalizationFrame over(std::span<const Individual> first,
                                   std::span<const Individual> second);
};

/// Orientation used to normalize objectives before archive truncation.
enum class ArchiveNormalization {
    Reversed,  ///< (z_max - f) / (z_max - z_min)
    Standard,  ///< (f - z_min) / (z_max - z_min)
};

/// (z_max - f) / (z_max - z_min) per objective; 0 on a degenerate axis.
Vector normalize_reversed(const Individual& v, const NormalizationFrame& frame);

/// (f - z_min) / (z_max - z_min) per objective; 0 on a degenerate axis.
Vector normalize_standard(const Individual& v, const NormalizationFrame& frame);

/// arccos(|a.b| / (|a||b|)) in [0, pi/2]; 0 when either norm is below 1e-12.
double vector_angle(std::span<const double> a, std::span<const double> b);

/// Infeasible members of the first front of P ∪ A ∪ Q under Pareto dominance
/// on [f_1, ..., f_m, CV]. Union order is preserved.
Population select_infeasible_nondominated(const Population& population, const Population& archive,
                                          const Population& offspring);

/// Angle-based truncation: while more than `capacity` members remain, the pair
/// with the smallest normalized vector angle loses its higher-CV member (the
/// later member of the pair on a CV tie). The normalization frame is taken
/// over the candidates once, before the first deletion.
Population truncate_by_angle(Population candidates, std::size_t capacity,
                             ArchiveNormalization orientation = ArchiveNormalization::Reversed);

/// Next archive from P_t, A_t and Q_t.
Population update_archive(const Population& population, const Population& archive,
                          const Population& offspring, std::size_t capacity,
                          ArchiveNormalization orientation = ArchiveNormalization::Reversed);

/// Neighbour rank used by angle diversity: round(sqrt(capacity)), at least 1.
std::size_t angle_diversity_rank(std::size_t capacity);

/// k-th smallest angle between member `index` of `population` and every other
/// member, on objectives normalized with `frame`. k is clamped to |P| - 1;
/// a singleton population yields pi/2.
double angle_diversity(std::span<const Individual> population, std::size_t index,
                       const NormalizationFrame& frame, std::size_t k);

/// Angle diversity of every member of `population`.
std::vector<double> angle_diversity_table(std::span<const Individual> population,
                                          const NormalizationFrame& frame, std::size_t k);

/// Restricted mating over the pool P_t ∪ A_t (population members first,
/// archive members after). Angle diversities are computed once on
/// construction when the archive is full.
class RestrictedMating {
public:
    RestrictedMating(const Population& population, const Population& archive,
                     std::size_t capacity);

    /// One parent pair as indices into the pool.
    MatingPair select(Rng& rng) const;

    /// N pairs drawn in sequence.
    std::vector<MatingPair> select_many(std::size_t count, Rng& rng) const;

    bool uses_tournaments() const { return tournaments_; }
    std::span<const double> population_diversity() const { return population_ad_; }
    std::span<const double> archive_diversity() const { return archive_ad_; }

private:
    std::size_t population_size_;
    std::size_t archive_size_;
    bool tournaments_;
    std::vector<double> population_cv_;
    std::vector<double> archive_cv_;
    std::vector<double> population_ad_;
    std::vector<double> archive_ad_;
};

/// Convenience wrapper around RestrictedMating for a single draw.
MatingPair restricted_mating(const Population& population, const Population& archive,
                             std::size_t capacity, Rng& rng);

}  // namespace nsbidico

#endif
