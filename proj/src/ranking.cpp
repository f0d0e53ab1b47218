#include "nsbidico/ranking.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace nsbidico {

bool pareto_dominates(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ContractViolation("pareto_dominates: length mismatch");
    bool strictly_better = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) return false;
        if (a[i] < b[i]) strictly_better = true;
    }
    return strictly_better;
}

bool cdp_dominates(const Individual& a, const Individual& b) {
    const bool fa = a.feasible();
    const bool fb = b.feasible();
    if (fa && !fb) return true;
    if (!fa && fb) return false;
    if (!fa) return a.cv < b.cv;
    return pareto_dominates(a.objectives, b.objectives);
}

bool objective_dominates(const Individual& a, const Individual& b) {
    return pareto_dominates(a.objectives, b.objectives);
}

FrontPartition fast_nondominated_sort(std::size_t count, const IndexDominance& dominates) {
    FrontPartition partition;
    if (count == 0) return partition;

    std::vector<std::vector<std::size_t>> dominated_by(count);
    std::vector<std::size_t> domination_count(count, 0);
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = i + 1; j < count; ++j) {
            if (dominates(i, j)) {
                dominated_by[i].push_back(j);
                ++domination_count[j];
            } else if (dominates(j, i)) {
                dominated_by[j].push_back(i);
                ++domination_count[i];
            }
        }
    }

    std::vector<std::size_t> current;
    for (std::size_t i = 0; i < count; ++i)
        if (domination_count[i] == 0) current.push_back(i);

    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (std::size_t i : current) {
            for (std::size_t j : dominated_by[i]) {
                if (--domination_count[j] == 0) next.push_back(j);
            }
        }
        std::sort(next.begin(), next.end());
        partition.fronts.push_back(std::move(current));
        current = std::move(next);
    }
    return partition;
}

FrontPartition fast_nondominated_sort(std::span<Individual> pop, const Comparator& comparator) {
    auto partition = fast_nondominated_sort(
        pop.size(), [&](std::size_t i, std::size_t j) { return comparator(pop[i], pop[j]); });
    for (std::size_t f = 0; f < partition.fronts.size(); ++f)
        for (std::size_t i : partition.fronts[f]) pop[i].rank = f;
    return partition;
}

std::vector<double> crowding_distance(std::span<const Vector> objectives) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const std::size_t size = objectives.size();
    std::vector<double> distance(size, 0.0);
    if (size <= 2) {
        std::fill(distance.begin(), distance.end(), inf);
        return distance;
    }

    const std::size_t m = objectives.front().size();
    std::vector<std::size_t> order(size);
    for (std::size_t obj = 0; obj < m; ++obj) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return objectives[a][obj] < objectives[b][obj];
        });
        const double lo = objectives[order.front()][obj];
        const double hi = objectives[order.back()][obj];
        const double range = hi - lo;
        if (range <= 0.0) continue;

        // Walk groups of equal values.
        std::size_t begin = 0;
        while (begin < size) {
            std::size_t end = begin + 1;
            const double value = objectives[order[begin]][obj];
            while (end < size && objectives[order[end]][obj] == value) ++end;

            if (value == lo || value == hi) {
                // One boundary member per end: the lexicographically extreme
                // vector, first in input order among exact copies.
                std::size_t pick = order[begin];
                for (std::size_t k = begin + 1; k < end; ++k) {
                    const auto& candidate = objectives[order[k]];
                    const bool better = value == lo ? candidate < objectives[pick]
                                                    : candidate > objectives[pick];
                    if (better || (candidate == objectives[pick] && order[k] < pick)) pick = order[k];
                }
                distance[pick] = inf;
            } else if (end - begin == 1) {
                const double gap =
                    objectives[order[end]][obj] - objectives[order[begin - 1]][obj];
                distance[order[begin]] += gap / range;
            }
            begin = end;
        }
    }
    return distance;
}

std::vector<double> crowding_distance(std::span<const Individual> front) {
    std::vector<Vector> objectives;
    objectives.reserve(front.size());
    for (const auto& ind : front) objectives.push_back(ind.objectives);
    return crowding_distance(objectives);
}

Population environmental_selection(const Population& parents, const Population& offspring,
                                   std::size_t capacity) {
    Population united;
    united.reserve(parents.size() + offspring.size());
    united.insert(united.end(), parents.begin(), parents.end());
    united.insert(united.end(), offspring.begin(), offspring.end());

    const auto partition = fast_nondominated_sort(std::span<Individual>(united), cdp_dominates);

    Population next;
    next.reserve(std::min(capacity, united.size()));
    for (const auto& front : partition.fronts) {
        if (next.size() == capacity) break;

        Population members;
        members.reserve(front.size());
        for (std::size_t i : front) members.push_back(united[i]);
        const auto distance = crowding_distance(std::span<const Individual>(members));
        for (std::size_t k = 0; k < members.size(); ++k) members[k].crowding = distance[k];

        if (next.size() + members.size() <= capacity) {
            next.insert(next.end(), members.begin(), members.end());
            continue;
        }

        std::vector<std::size_t> order(members.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return distance[a] > distance[b];
        });
        const std::size_t remaining = capacity - next.size();
        for (std::size_t k = 0; k < remaining; ++k) next.push_back(members[order[k]]);
        break;
    }
    return next;
}

}  // namespace nsbidico
