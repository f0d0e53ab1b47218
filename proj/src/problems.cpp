#include "nsbidico/problems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

namespace nsbidico {

namespace {

// Drops dominated points of a two-objective set; exact duplicates collapse.
PointSet nondominated_2d(PointSet points) {
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    PointSet front;
    for (const auto& pt : points) {
        // Sorted by (f1, f2): pt is dominated iff an earlier point has f2 <= pt's f2.
        if (front.empty() || pt[1] < front.back()[1]) front.push_back(pt);
    }
    return front;
}

}  // namespace

ProblemDefinition bnh() {
    ProblemDefinition problem;
    problem.name = "bnh";
    problem.n = 2;
    problem.m = 2;
    problem.p = 2;
    problem.l = 2;
    problem.lower = {0.0, 0.0};
    problem.upper = {5.0, 3.0};
    problem.evaluator = [](std::span<const double> x) {
        const double x1 = x[0];
        const double x2 = x[1];
        EvaluationResult r;
        r.objectives = {4.0 * x1 * x1 + 4.0 * x2 * x2, (x1 - 5.0) * (x1 - 5.0) + (x2 - 5.0) * (x2 - 5.0)};
        r.constraints = {(x1 - 5.0) * (x1 - 5.0) + x2 * x2 - 25.0,
                         7.7 - (x1 - 8.0) * (x1 - 8.0) - (x2 + 3.0) * (x2 + 3.0)};
        return r;
    };
    problem.default_reference_count = 500;
    problem.reference_front = [problem](std::size_t side) {
        return grid_reference_front(problem, side);
    };
    return problem;
}

ProblemDefinition srn() {
    ProblemDefinition problem;
    problem.name = "srn";
    problem.n = 2;
    problem.m = 2;
    problem.p = 2;
    problem.l = 2;
    problem.lower = {-20.0, -20.0};
    problem.upper = {20.0, 20.0};
    problem.evaluator = [](std::span<const double> x) {
        const double x1 = x[0];
        const double x2 = x[1];
        EvaluationResult r;
        r.objectives = {2.0 + (x1 - 2.0) * (x1 - 2.0) + (x2 - 1.0) * (x2 - 1.0),
                        9.0 * x1 - (x2 - 1.0) * (x2 - 1.0)};
        r.constraints = {x1 * x1 + x2 * x2 - 225.0, x1 - 3.0 * x2 + 10.0};
        return r;
    };
    problem.default_reference_count = 500;
    problem.reference_front = [problem](std::size_t side) {
        return grid_reference_front(problem, side);
    };
    return problem;
}

ProblemDefinition tnk() {
    ProblemDefinition problem;
    problem.name = "tnk";
    problem.n = 2;
    problem.m = 2;
    problem.p = 2;
    problem.l = 2;
    problem.lower = {1e-9, 1e-9};
    problem.upper = {std::numbers::pi, std::numbers::pi};
    problem.evaluator = [](std::span<const double> x) {
        const double x1 = x[0];
        const double x2 = x[1];
        const double angle = std::abs(x2) < 1e-12 ? 0.0 : std::atan(x1 / x2);
        EvaluationResult r;
        r.objectives = {x1, x2};
        r.constraints = {-x1 * x1 - x2 * x2 + 1.0 + 0.1 * std::cos(16.0 * angle),
                         (x1 - 0.5) * (x1 - 0.5) + (x2 - 0.5) * (x2 - 0.5) - 0.5};
        return r;
    };
    problem.default_reference_count = 500;
    problem.reference_front = [problem](std::size_t side) {
        return grid_reference_front(problem, side);
    };
    return problem;
}

ProblemDefinition eq_ring() {
    ProblemDefinition problem;
    problem.name = "eq_ring";
    problem.n = 2;
    problem.m = 2;
    problem.p = 0;
    problem.l = 1;
    problem.lower = {0.0, 0.0};
    problem.upper = {1.2, 1.2};
    problem.evaluator = [](std::span<const double> x) {
        EvaluationResult r;
        r.objectives = {x[0], x[1]};
        r.constraints = {x[0] * x[0] + x[1] * x[1] - 1.0};
        return r;
    };
    problem.default_reference_count = 1000;
    problem.reference_front = [](std::size_t count) {
        PointSet arc;
        arc.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            const double t =
                count == 1 ? 0.0
                           : std::numbers::pi / 2.0 * static_cast<double>(i) /
                                 static_cast<double>(count - 1);
            arc.push_back({std::cos(t), std::sin(t)});
        }
        return arc;
    };
    return problem;
}

PointSet grid_reference_front(const ProblemDefinition& problem, std::size_t side,
                              double epsilon) {
    if (problem.n != 2 || problem.m != 2)
        throw UnsupportedMetric(
            fmt::format("grid reference front needs n = m = 2 (problem '{}')", problem.name));
    if (side == 0) return {};
    if (side == 1) throw ContractViolation("grid reference front needs at least 2 points per side");

    PointSet feasible;
    EvaluationCounter counter;
    const auto coordinate = [&](std::size_t k, std::size_t i) {
        if (i == side - 1) return problem.upper[k];
        return problem.lower[k] + (problem.upper[k] - problem.lower[k]) * static_cast<double>(i) /
                                      static_cast<double>(side - 1);
    };
    for (std::size_t i = 0; i < side; ++i) {
        for (std::size_t j = 0; j < side; ++j) {
            const Vector x{coordinate(0, i), coordinate(1, j)};
            auto ind = evaluate(problem, x, counter, epsilon);
            if (ind.feasible()) feasible.push_back(std::move(ind.objectives));
        }
    }
    return nondominated_2d(std::move(feasible));
}

void ProblemRegistry::add(const std::string& name, Factory factory) {
    if (factories_.count(name) != 0)
        throw ContractViolation(fmt::format("problem '{}' registered twice", name));
    const auto problem = factory();
    problem.validate();
    Vector mid(problem.n);
    for (std::size_t k = 0; k < problem.n; ++k) mid[k] = 0.5 * (problem.lower[k] + problem.upper[k]);
    EvaluationCounter counter;
    if (!evaluate(problem, mid, counter).valid)
        throw ContractViolation(fmt::format("problem '{}' fails its midpoint self-check", name));
    factories_.emplace(name, std::move(factory));
}

ProblemDefinition ProblemRegistry::get(const std::string& name) const {
    const auto it = factories_.find(name);
    if (it == factories_.end()) throw ProblemNotFound(fmt::format("unknown problem '{}'", name));
    return it->second();
}

std::vector<std::string> ProblemRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [name, factory] : factories_) out.push_back(name);
    return out;
}

const ProblemRegistry& builtin_problems() {
    static const ProblemRegistry registry = [] {
        ProblemRegistry r;
        r.add("bnh", bnh);
        r.add("eq_ring", eq_ring);
        r.add("srn", srn);
        r.add("tnk", tnk);
        return r;
    }();
    return registry;
}

PointSet reference_front(const ProblemDefinition& problem, std::size_t count) {
    if (!problem.reference_front)
        throw UnsupportedMetric(
            fmt::format("problem '{}' has no reference front generator", problem.name));
    return problem.reference_front(count);
}

ReferenceFrontCache::ReferenceFrontCache(std::filesystem::path directory)
    : directory_(std::move(directory)) {}

std::filesystem::path ReferenceFrontCache::path_for(const std::string& name,
                                                    std::size_t count) const {
    return directory_ / fmt::format("{}_{}.front", name, count);
}

PointSet ReferenceFrontCache::get(const ProblemDefinition& problem, std::size_t count) {
    std::lock_guard lock(mutex_);
    const auto path = path_for(problem.name, count);
    if (std::filesystem::exists(path)) return read_point_set(path);
    auto front = reference_front(problem, count);
    std::filesystem::create_directories(directory_);
    write_point_set(path, front);
    return front;
}

void write_point_set(const std::filesystem::path& path, const PointSet& points) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", tmp.string()));
        for (const auto& pt : points) {
            for (std::size_t i = 0; i < pt.size(); ++i)
                out << (i ? " " : "") << fmt::format("{:.17g}", pt[i]);
            out << '\n';
        }
        if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", tmp.string()));
    }
    std::filesystem::rename(tmp, path);
}

PointSet read_point_set(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(fmt::format("cannot read '{}'", path.string()));
    PointSet points;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        Vector pt;
        double v;
        while (fields >> v) pt.push_back(v);
        if (!pt.empty()) points.push_back(std::move(pt));
    }
    return points;
}

}  // namespace nsbidico
