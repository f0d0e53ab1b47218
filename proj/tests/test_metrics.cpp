#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "nsbidico/metrics.hpp"
#include "nsbidico/ranking.hpp"

using namespace nsbidico;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Individual make(Vector f, double cv) {
    Individual ind;
    ind.x = f;
    ind.objectives = std::move(f);
    ind.cv = cv;
    return ind;
}

}  // namespace

TEST_CASE("final front keeps feasible non-dominated members") {
    const Population pop{make({1, 2}, 0), make({2, 1}, 0), make({2, 2}, 0), make({0, 0}, 0.5)};
    const auto front = final_front(pop);
    REQUIRE(front.size() == 2);
    CHECK(front[0].objectives == Vector{1, 2});
    CHECK(front[1].objectives == Vector{2, 1});
    CHECK(final_front(Population{make({0, 0}, 1)}).empty());
    CHECK(std::isnan(igd_metric(Population{make({0, 0}, 1)}, PointSet{{0, 0}}).value));
}

TEST_CASE("igd") {
    const PointSet reference{{0, 1}, {1, 0}};
    CHECK(igd(PointSet{{0, 1}, {1, 0}}, reference) == 0.0);
    CHECK(igd(PointSet{{0.5, 0.5}}, reference) == doctest::Approx(std::sqrt(2.0) / 2));
    CHECK(std::isnan(igd(PointSet{}, reference)));
    CHECK_THROWS(igd(PointSet{{0, 0}}, PointSet{}));

    // Adding points never raises IGD.
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(0, 1);
    PointSet front;
    double previous = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 40; ++i) {
        front.push_back({u(gen), u(gen)});
        const double value = igd(front, reference);
        CHECK(value <= previous);
        previous = value;
    }
}

TEST_CASE("hypervolume examples") {
    const double ref[] = {1, 1};
    CHECK(hypervolume_exact(PointSet{{0.5, 0.5}}, ref) == doctest::Approx(0.25));
    CHECK(hypervolume_exact(PointSet{{0.25, 0.75}, {0.75, 0.25}}, ref) == doctest::Approx(0.3125));
    CHECK(hypervolume_exact(PointSet{{0.5, 0.5}, {0.25, 0.75}}, ref) == doctest::Approx(0.3125));
    CHECK(hypervolume_exact(PointSet{{1.5, 0.5}}, ref) == 0.0);
    const double ref3[] = {1, 1, 1};
    CHECK(hypervolume_exact(PointSet{{0.5, 0.5, 0.5}}, ref3) == doctest::Approx(0.125));
    CHECK(hypervolume_exact(PointSet{{0.5, 0.5, 0.5}, {0, 0, 0.75}}, ref3) ==
          doctest::Approx(0.125 + 0.25 - 0.125 * 0.5));
    const double ref4[] = {1, 1, 1, 1};
    CHECK_THROWS_AS(hypervolume_exact(PointSet{{0, 0, 0, 0}}, ref4), UnsupportedMetric);

    // Normalized: the reference front's ideal point scores 1.1^2.
    const PointSet reference{{0, 4}, {4, 0}};
    CHECK(hypervolume(PointSet{{0, 0}}, reference) == doctest::Approx(1.21));
    CHECK(std::isnan(hypervolume(PointSet{}, reference)));
}

TEST_CASE("hypervolume agrees with Monte Carlo") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(0, 1);
    for (std::size_t m : {2u, 3u}) {
        for (int trial = 0; trial < 5; ++trial) {
            PointSet points(12, Vector(m));
            for (auto& p : points)
                for (auto& v : p) v = u(gen);
            const Vector ref(m, 1.0);
            const double exact = hypervolume_exact(points, ref);
            const int samples = 200000;
            int hits = 0;
            Vector s(m);
            for (int k = 0; k < samples; ++k) {
                for (auto& v : s) v = u(gen);
                for (const auto& p : points) {
                    bool covered = true;
                    for (std::size_t j = 0; j < m; ++j) covered = covered && p[j] <= s[j];
                    if (covered) {
                        ++hits;
                        break;
                    }
                }
            }
            CHECK(std::abs(exact - static_cast<double>(hits) / samples) < 0.005);
        }
    }
}

TEST_CASE("hypervolume is monotone under adding points") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0, 1);
    const double ref[] = {1, 1, 1};
    PointSet points;
    double previous = 0.0;
    for (int i = 0; i < 30; ++i) {
        points.push_back({u(gen), u(gen), u(gen)});
        const double value = hypervolume_exact(points, ref);
        CHECK(value >= previous - 1e-15);
        previous = value;
    }
}

TEST_CASE("nondominated indices match a pairwise filter") {
    std::mt19937_64 gen(21);
    std::uniform_int_distribution<int> grid(0, 6);
    for (std::size_t m : {2u, 3u}) {
        for (int trial = 0; trial < 200; ++trial) {
            PointSet points(15, Vector(m));
            for (auto& p : points)
                for (auto& v : p) v = grid(gen);
            std::vector<std::size_t> expected;
            for (std::size_t i = 0; i < points.size(); ++i) {
                bool dominated = false;
                for (std::size_t j = 0; j < points.size(); ++j)
                    dominated = dominated || pareto_dominates(points[j], points[i]);
                if (!dominated) expected.push_back(i);
            }
            CHECK(nondominated_indices(points) == expected);
        }
    }
}

TEST_CASE("rank-sum test") {
    const double a[] = {1, 2, 3};
    const double b[] = {4, 5, 6};
    CHECK(rank_sum_p_exact(a, b) == doctest::Approx(0.1));

    std::vector<double> low, high;
    for (int i = 0; i < 30; ++i) {
        low.push_back(i);
        high.push_back(i + 100);
    }
    const auto better = wilcoxon_rank_sum(low, high, Orientation::SmallerIsBetter);
    CHECK(better.symbol == Verdict::Better);
    CHECK(better.p_value < 1e-6);
    const auto worse = wilcoxon_rank_sum(high, low, Orientation::SmallerIsBetter);
    CHECK(worse.symbol == Verdict::Worse);
    CHECK(worse.p_value == doctest::Approx(better.p_value));
    CHECK(wilcoxon_rank_sum(low, high, Orientation::LargerIsBetter).symbol == Verdict::Worse);

    const auto same = wilcoxon_rank_sum(low, low, Orientation::SmallerIsBetter);
    CHECK(same.symbol == Verdict::Equivalent);
    CHECK(same.p_value == doctest::Approx(1.0));

    std::vector<double> constant(10, 2.0);
    CHECK(wilcoxon_rank_sum(constant, constant, Orientation::SmallerIsBetter).symbol ==
          Verdict::Equivalent);
}

TEST_CASE("rank-sum test NaN rules") {
    const std::vector<double> values{1, 2, 3, 4, 5};
    const std::vector<double> missing(5, kNaN);
    const auto lose = wilcoxon_rank_sum(missing, values, Orientation::SmallerIsBetter);
    CHECK(lose.symbol == Verdict::Worse);
    CHECK(lose.p_value == 0.0);
    CHECK(lose.nan_removed_a == 5);
    const auto win = wilcoxon_rank_sum(values, missing, Orientation::LargerIsBetter);
    CHECK(win.symbol == Verdict::Better);
    const auto tie = wilcoxon_rank_sum(missing, missing, Orientation::SmallerIsBetter);
    CHECK(tie.symbol == Verdict::Equivalent);
    CHECK(tie.p_value == 1.0);

    std::vector<double> partial{1, 2, kNaN, 3};
    const auto dropped = wilcoxon_rank_sum(partial, values, Orientation::SmallerIsBetter);
    CHECK(dropped.nan_removed_a == 1);
    CHECK(dropped.mean_a == doctest::Approx(2.0));
}

TEST_CASE("verdict symbols") {
    CHECK(to_string(Verdict::Better) == "+");
    CHECK(to_string(Verdict::Equivalent) == "=");
    CHECK(to_string(Verdict::Worse) == "−");
}
