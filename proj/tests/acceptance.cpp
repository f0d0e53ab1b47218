// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <fmt/core.h>

#include "nsbidico/algorithm.hpp"
#include "nsbidico/coevolution.hpp"
#include "nsbidico/harness.hpp"
#include "nsbidico/metrics.hpp"
#include "nsbidico/problems.hpp"
#include "nsbidico/ranking.hpp"
#include "nsbidico/variation.hpp"
#include "oracles.hpp"

using namespace nsbidico;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
        outcome = check();
    } catch (const std::exception& e) {
        outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!outcome.pass) ++failures;
    fmt::print("[{}] {} {} ({}; {:.1f} s)\n", outcome.pass ? "PASS" : "FAIL", id, name,
               outcome.detail, seconds);
    std::fflush(stdout);
}

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::string without_wall_time(const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line))
        if (line.rfind("wall_time_seconds:", 0) != 0) out += line + "\n";
    return out;
}

// 1 -------------------------------------------------------------------------

Outcome sorting_oracle() {
    std::mt19937_64 gen(1);
    std::uniform_int_distribution<std::size_t> size_dist(1, 50);
    std::uniform_int_distribution<std::size_t> m_dist(2, 3);
    std::size_t mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        auto pop = oracle::random_population(gen, size_dist(gen), m_dist(gen));
        for (int mode = 0; mode < 2; ++mode) {
            const std::function<bool(std::size_t, std::size_t)> dom =
                mode == 0 ? std::function<bool(std::size_t, std::size_t)>([&](std::size_t a, std::size_t b) {
                    return oracle::dominates(pop[a].objectives, pop[b].objectives);
                })
                          : [&](std::size_t a, std::size_t b) { return oracle::cdp(pop[a], pop[b]); };
            const auto expected = oracle::peel_ranks(pop.size(), dom);
            const auto fronts = fast_nondominated_sort(
                pop.size(), mode == 0 ? IndexDominance([&](std::size_t a, std::size_t b) {
                    return pareto_dominates(pop[a].objectives, pop[b].objectives);
                })
                                      : IndexDominance([&](std::size_t a, std::size_t b) {
                                            return cdp_dominates(pop[a], pop[b]);
                                        }));
            std::vector<std::vector<std::size_t>> oracle_fronts;
            for (std::size_t i = 0; i < pop.size(); ++i) {
                if (oracle_fronts.size() <= expected[i]) oracle_fronts.resize(expected[i] + 1);
                oracle_fronts[expected[i]].push_back(i);
            }
            if (fronts.fronts != oracle_fronts) ++mismatches;
        }
    }
    return {mismatches == 0, fmt::format("{} mismatches over 2000 sorts", mismatches)};
}

// 2 -------------------------------------------------------------------------

Outcome archive_contract() {
    const auto problem = eq_ring();
    std::size_t violations = 0, updates = 0, brute_checks = 0;
    const auto mutually_nondominated = [](const Population& archive) {
        for (const auto& a : archive)
            for (const auto& b : archive)
                if (&a != &b && oracle::dominates(augmented_objectives(a), augmented_objectives(b)))
                    return false;
        return true;
    };
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        RunConfig config;
        config.problem = "eq_ring";
        config.seed = seed;
        auto state = initialize(config, problem);
        while (can_step(state, config)) {
            step(state, config, problem);
            ++updates;
            if (state.archive.size() > config.population_size) ++violations;
            for (const auto& a : state.archive)
                if (a.cv <= 0.0) ++violations;
            if (state.generation % 100 == 0 || !can_step(state, config)) {
                ++brute_checks;
                if (!mutually_nondominated(state.archive)) ++violations;
            }
        }
    }
    return {violations == 0, fmt::format("{} violations over {} updates, {} brute-force checks",
                                         violations, updates, brute_checks)};
}

// 3 -------------------------------------------------------------------------

Outcome mutation_distribution() {
    Rng rng(3);
    const int samples = 100000;
    double sum = 0.0;
    bool in_range = true;
    for (int i = 0; i < samples; ++i) {
        const double delta = polynomial_mutation_delta(rng.uniform(), 20.0);
        in_range = in_range && delta >= -1.0 && delta <= 1.0;
        sum += delta;
    }
    const double mean = sum / samples;
    const bool exact = polynomial_mutation_delta(0.5, 20.0) == 0.0 &&
                       polynomial_mutation_delta(0.0, 20.0) == -1.0 &&
                       polynomial_mutation_delta(1.0, 20.0) == 1.0;
    return {in_range && std::abs(mean) <= 0.01 && exact,
            fmt::format("mean {:.2e}, range ok {}, endpoints exact {}", mean, in_range, exact)};
}

// 4 -------------------------------------------------------------------------

Outcome angle_properties() {
    std::mt19937_64 gen(4);
    std::uniform_int_distribution<std::size_t> m_dist(2, 4);
    std::uniform_real_distribution<double> value(-1.0, 1.0);
    std::uniform_real_distribution<double> scale(1e-3, 1e3);
    std::size_t bad = 0;
    double worst_symmetry = 0.0, worst_scaling = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t m = m_dist(gen);
        Vector a(m), b(m);
        for (auto& v : a) v = value(gen);
        for (auto& v : b) v = value(gen);
        const double angle = vector_angle(a, b);
        if (!(angle >= 0.0 && angle <= std::numbers::pi / 2)) ++bad;
        worst_symmetry = std::max(worst_symmetry, std::abs(angle - vector_angle(b, a)));
        Vector sa = a, sb = b;
        const double ka = scale(gen), kb = scale(gen);
        for (auto& v : sa) v *= ka;
        for (auto& v : sb) v *= kb;
        worst_scaling = std::max(worst_scaling, std::abs(angle - vector_angle(sa, sb)));
        Vector neg = a;
        for (auto& v : neg) v = -v;
        if (vector_angle(a, neg) != 0.0) ++bad;
    }
    const bool pass = bad == 0 && worst_symmetry <= 1e-12 && worst_scaling <= 1e-9;
    return {pass, fmt::format("{} range/antipode failures, symmetry {:.1e}, scaling {:.1e}", bad,
                              worst_symmetry, worst_scaling)};
}

// 5 -------------------------------------------------------------------------

Outcome indicator_correctness() {
    const double unit[] = {1.0, 1.0};
    const bool hv_example = hypervolume_exact(PointSet{{0.25, 0.75}, {0.75, 0.25}}, unit) == 0.3125;
    const PointSet two{{0, 1}, {1, 0}};
    const bool igd_self = igd(two, two) == 0.0;
    const bool igd_example = std::abs(igd(PointSet{{0, 1}}, two) - std::sqrt(2.0) / 2) <= 1e-12;

    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> count(1, 20);
    std::size_t outside = 0;
    double worst_z = 0.0;
    for (int front_id = 0; front_id < 50; ++front_id) {
        PointSet candidates(count(gen), Vector(2));
        for (auto& p : candidates) p = {u(gen), u(gen)};
        PointSet front;
        for (std::size_t i : nondominated_indices(candidates)) front.push_back(candidates[i]);
        std::sort(front.begin(), front.end());
        const double exact = hypervolume_exact(front, unit);
        const int samples = 1000000;
        int hits = 0;
        for (int s = 0; s < samples; ++s) {
            const double x = u(gen), y = u(gen);
            // Front sorted by f1 ascending has f2 descending; the last point
            // with f1 <= x has the smallest f2 among those.
            const auto it = std::upper_bound(front.begin(), front.end(), Vector{x, 2.0});
            if (it != front.begin() && (it - 1)->at(1) <= y) ++hits;
        }
        const double p = static_cast<double>(hits) / samples;
        const double se = std::sqrt(std::max(p * (1 - p), 1e-12) / samples);
        const double z = std::abs(p - exact) / se;
        worst_z = std::max(worst_z, z);
        if (z > 3.0) ++outside;
    }
    const bool pass = hv_example && igd_self && igd_example && outside == 0;
    return {pass, fmt::format("HV example {}, IGD self {}, IGD example {}, {} of 50 fronts beyond 3 SE "
                              "(worst {:.2f})",
                              hv_example, igd_self, igd_example, outside, worst_z)};
}

// 6 -------------------------------------------------------------------------

// (n_a, n_b, rank sum of A) where the normal approximation and exact
// enumeration reach different verdicts at 0.05, for tie-free samples.
// Generated once by enumerating every rank subset and frozen here.
const std::set<std::tuple<int, int, int>> kBoundaryList = {
#include "wilcoxon_boundary.inc"
};

Outcome wilcoxon_oracle() {
    std::set<std::tuple<int, int, int>> disagreements;
    std::size_t pairs = 0;
    for (int na = 1; na <= 7; ++na) {
        for (int nb = 1; nb <= 7; ++nb) {
            const int total = na + nb;
            std::map<int, std::pair<double, double>> by_sum;
            std::vector<bool> pick(total, false);
            std::fill(pick.begin(), pick.begin() + na, true);
            do {
                ++pairs;
                std::vector<double> a, b;
                int sum = 0;
                for (int r = 0; r < total; ++r) {
                    if (pick[r]) {
                        a.push_back(r + 1);
                        sum += r + 1;
                    } else {
                        b.push_back(r + 1);
                    }
                }
                if (by_sum.count(sum)) continue;
                by_sum[sum] = {rank_sum_p_normal(a, b), rank_sum_p_exact(a, b)};
            } while (std::prev_permutation(pick.begin(), pick.end()));
            for (const auto& [sum, p] : by_sum)
                if ((p.first < kSignificanceLevel) != (p.second < kSignificanceLevel))
                    disagreements.insert({na, nb, sum});
        }
    }
    const double a[] = {1, 2, 3};
    const double b[] = {4, 5, 6};
    const double exact = rank_sum_p_exact(a, b);
    const bool example = std::abs(exact - 0.1) <= 1e-12;
    std::string listing;
    if (disagreements != kBoundaryList)
        for (const auto& [na, nb, sum] : disagreements) listing += fmt::format(" {{{}, {}, {}}},", na, nb, sum);
    return {disagreements == kBoundaryList && example,
            fmt::format("{} sample pairs, {} boundary disagreements (frozen list {}), exact p {{1,2,3}} vs "
                        "{{4,5,6}} = {}{}",
                        pairs, disagreements.size(), kBoundaryList.size(), exact, listing)};
}

// 7 -------------------------------------------------------------------------

double random_baseline_igd(const ProblemDefinition& problem, std::size_t budget, std::uint64_t seed,
                           const PointSet& reference) {
    Rng rng(seed);
    EvaluationCounter counter;
    Population samples;
    samples.reserve(budget);
    Vector x(problem.n);
    for (std::size_t i = 0; i < budget; ++i) {
        for (std::size_t k = 0; k < problem.n; ++k) x[k] = rng.uniform(problem.lower[k], problem.upper[k]);
        samples.push_back(evaluate(problem, x, counter));
    }
    return igd_metric(samples, reference).value;
}

// IGD of a k-point set fitted to the reference front by Lloyd iterations,
// seeded evenly along the sorted front. Approximates the lowest IGD any
// k-member population can reach.
double best_fixed_size_igd(PointSet reference, std::size_t k) {
    std::sort(reference.begin(), reference.end());
    const std::size_t m = reference.front().size();
    PointSet centers;
    for (std::size_t c = 0; c < k; ++c) centers.push_back(reference[(2 * c + 1) * reference.size() / (2 * k)]);
    const auto nearest = [&](const Vector& r) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < centers.size(); ++c) {
            double d = 0.0;
            for (std::size_t j = 0; j < m; ++j) d += (r[j] - centers[c][j]) * (r[j] - centers[c][j]);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        return best;
    };
    for (int iteration = 0; iteration < 50; ++iteration) {
        PointSet sums(centers.size(), Vector(m, 0.0));
        std::vector<std::size_t> counts(centers.size(), 0);
        for (const auto& r : reference) {
            const std::size_t c = nearest(r);
            for (std::size_t j = 0; j < m; ++j) sums[c][j] += r[j];
            ++counts[c];
        }
        for (std::size_t c = 0; c < centers.size(); ++c)
            if (counts[c] > 0)
                for (std::size_t j = 0; j < m; ++j) centers[c][j] = sums[c][j] / counts[c];
    }
    return igd(centers, reference);
}

Outcome convergence() {
    std::string detail;
    bool pass = true;
    for (const std::string name : {"bnh", "srn", "tnk", "eq_ring"}) {
        const auto problem = builtin_problems().get(name);
        const auto reference = reference_front(problem, problem.default_reference_count);
        std::vector<double> algo, baseline;
        for (std::uint64_t r = 0; r < 30; ++r) {
            RunConfig config;
            config.problem = name;
            config.population_size = 100;
            config.budget = 20000;
            config.F = 0.5;
            config.CR = 1.0;
            config.seed = 1 + r;
            algo.push_back(run(config, problem, reference).igd.value);
            baseline.push_back(random_baseline_igd(problem, 20000, 1 + r, reference));
        }
        // A NaN (no feasible point) sorts as the worst outcome.
        for (auto* v : {&algo, &baseline})
            for (auto& x : *v)
                if (std::isnan(x)) x = std::numeric_limits<double>::infinity();
        const double ma = median(algo), mb = median(baseline);
        const double ratio = ma / mb;
        const bool ok = ratio <= 0.1;
        pass = pass && ok;
        detail += fmt::format("{}{} {:.3e}/{:.3e}={:.3f} (best {}-point IGD ~{:.3e})",
                              detail.empty() ? "" : ", ", name, ma, mb, ratio, 100,
                              best_fixed_size_igd(reference, 100));
    }
    return {pass, "median IGD algorithm/random: " + detail};
}

// 8 -------------------------------------------------------------------------

Outcome determinism() {
    const std::string text =
        "runs: 3\n"
        "defaults: {population_size: 20, budget: 1000}\n"
        "problems: [bnh, srn, tnk, eq_ring]\n"
        "cells:\n  base: {}\n  alt: {F: 0.7, CR: 0.45}\n";
    const auto root = fs::temp_directory_path() / "nsbidico_acceptance_determinism";
    // Every execution writes to the same directory; only the worker count varies.
    // The resolved config echoes that count, so its workers line is skipped.
    const auto snapshot = [&] {
        std::map<std::string, std::string> files;
        for (const auto& entry : fs::recursive_directory_iterator(root)) {
            if (!entry.is_regular_file()) continue;
            std::string body = without_wall_time(slurp(entry.path()));
            if (entry.path().filename() == "resolved_config.yaml") {
                std::istringstream in(body);
                std::string line, kept;
                while (std::getline(in, line))
                    if (line.rfind("workers:", 0) != 0) kept += line + "\n";
                body = kept;
            }
            files[fs::relative(entry.path(), root).string()] = body;
        }
        return files;
    };
    std::vector<std::map<std::string, std::string>> executions;
    for (std::size_t workers : {1u, 1u, 2u, 4u}) {
        fs::remove_all(root);
        auto config = harness::parse_config_text(text, "determinism.yaml");
        config.workers = workers;
        config.output_dir = root;
        harness::run_experiment(config);
        executions.push_back(snapshot());
    }
    fs::remove_all(root);
    std::size_t differing = 0;
    for (std::size_t i = 1; i < executions.size(); ++i)
        if (executions[i] != executions[0]) ++differing;
    return {differing == 0 && !executions[0].empty(),
            fmt::format("{} files per execution, workers 1,1,2,4; {} executions differ from the first",
                        executions[0].size(), differing)};
}

// 9 -------------------------------------------------------------------------

Outcome nan_protocol() {
    const std::string text =
        "runs: 5\n"
        "defaults: {population_size: 20, budget: 2000}\n"
        "problems: [eq_ring]\n"
        "cells:\n  exact: {epsilon: 0}\n  relaxed: {}\n";
    const auto root = fs::temp_directory_path() / "nsbidico_acceptance_nan";
    fs::remove_all(root);
    auto config = harness::parse_config_text(text, "nan.yaml");
    config.output_dir = root;
    const auto result = harness::run_experiment(config);
    bool all_nan = true;
    std::size_t feasible = 0;
    for (const auto& record : result.records) {
        if (record.cell != "exact") continue;
        all_nan = all_nan && std::isnan(record.igd) && std::isnan(record.hv);
        feasible += record.n_feasible;
    }
    const auto igd_table = harness::compare_directories(root / "exact", root / "relaxed", "igd");
    const auto hv_table = harness::compare_directories(root / "exact", root / "relaxed", "hv");
    const auto& igd_row = igd_table.rows.at(0);
    const auto& hv_row = hv_table.rows.at(0);
    const bool loss = igd_row.verdict.symbol == Verdict::Worse && igd_row.verdict.p_value == 0.0 &&
                      hv_row.verdict.symbol == Verdict::Worse && hv_row.verdict.p_value == 0.0;
    const bool aggregate_nan = std::isnan(igd_row.mean_a) && std::isnan(hv_row.mean_a);
    fs::remove_all(root);
    return {all_nan && loss && aggregate_nan,
            fmt::format("{} feasible members at eps 0, metrics NaN {}, verdicts IGD {} HV {}", feasible,
                        all_nan, to_string(igd_row.verdict.symbol), to_string(hv_row.verdict.symbol))};
}

}  // namespace

int main() {
    report(1, "sorting matches the peeling oracle", sorting_oracle);
    report(2, "archive contract on eq_ring", archive_contract);
    report(3, "polynomial mutation distribution", mutation_distribution);
    report(4, "angle properties", angle_properties);
    report(5, "indicator correctness", indicator_correctness);
    report(6, "rank-sum normal vs exact", wilcoxon_oracle);
    report(7, "convergence against uniform sampling", convergence);
    report(8, "determinism across worker counts", determinism);
    report(9, "NaN protocol", nan_protocol);
    fmt::print("{} of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
