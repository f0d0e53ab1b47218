#ifndef NSBIDICO_PROBLEMS_HPP
#define NSBIDICO_PROBLEMS_HPP

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsbidico/core.hpp"

namespace nsbidico {

class ProblemNotFound : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Binh-Korn: two variables, two objectives, two inequalities.
ProblemDefinition bnh();
/// Srinivas-Deb.
ProblemDefinition srn();
/// Tanaka; disconnected front on the constraint boundary.
ProblemDefinition tnk();
/// f = x subject to x1^2 + x2^2 = 1 on [0, 1.2]^2; front is the quarter arc.
ProblemDefinition eq_ring();

/// Feasible, mutually non-dominated objective vectors from a uniform
/// `side` x `side` grid over a two-variable box. Duplicates are dropped.
PointSet grid_reference_front(const ProblemDefinition& problem, std::size_t side,
                              double epsilon = kDefaultEpsilon);

class ProblemRegistry {
public:
    using Factory = std::function<ProblemDefinition()>;

    /// Registers a problem after a midpoint self-check. Duplicate names throw.
    void add(const std::string& name, Factory factory);

    ProblemDefinition get(const std::string& name) const;
    bool contains(const std::string& name) const { return factories_.count(name) != 0; }
    std::vector<std::string> names() const;

private:
    std::map<std::string, Factory> factories_;
};

/// Registry of the built-in problems (bnh, eq_ring, srn, tnk).
const ProblemRegistry& builtin_problems();

/// Reference front for `problem`; `count` is forwarded to its generator
/// (sample count for analytic fronts, grid side for grid fronts).
PointSet reference_front(const ProblemDefinition& problem, std::size_t count);

/// Disk-backed reference-front cache. Files are named `<problem>_<count>.front`
/// and hold one objective vector per line with 17 significant digits.
class ReferenceFrontCache {
public:
    explicit ReferenceFrontCache(std::filesystem::path directory);

    PointSet get(const ProblemDefinition& problem, std::size_t count);
    std::filesystem::path path_for(const std::string& name, std::size_t count) const;

private:
    std::filesystem::path directory_;
    std::mutex mutex_;
};

void write_point_set(const std::filesystem::path& path, const PointSet& points);
PointSet read_point_set(const std::filesystem::path& path);

}  // namespace nsbidico

#endif
