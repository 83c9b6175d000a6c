#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flare/decision_tree.hpp"
#include "flare/errors.hpp"
#include "flare/linalg.hpp"
#include "flare/logistic.hpp"
#include "flare/util.hpp"
#include "support/oracles.hpp"

#include <cmath>
#include <random>

using namespace flare;

TEST_CASE("dot, norm and cosine basics") {
    CHECK(linalg::dot({1, 2, 3}, {4, 5, 6}) == doctest::Approx(32.0));
    CHECK(linalg::norm({3, 4}) == doctest::Approx(5.0));
    CHECK(linalg::cosine({1, 0}, {0, 1}) == doctest::Approx(0.0));
    CHECK(linalg::cosine({2, 0}, {5, 0}) == doctest::Approx(1.0));
    CHECK(linalg::cosine({1, 1}, {-1, -1}) == doctest::Approx(-1.0));
}

TEST_CASE("cosine of a zero vector is zero, not NaN") {
    CHECK(linalg::cosine({0, 0, 0}, {1, 2, 3}) == 0.0);
    CHECK(linalg::cosine({1, 2, 3}, {0, 0, 0}) == 0.0);
}

TEST_CASE("solve_spd matches Gaussian elimination on random SPD systems") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t p = 2 + static_cast<std::size_t>(trial % 7);
        linalg::Matrix basis(p + 3, linalg::Vector(p));
        for (auto& row : basis)
            for (double& v : row) v = unit(rng);
        linalg::Matrix a(p, linalg::Vector(p, 0.0));
        for (const auto& row : basis)
            for (std::size_t i = 0; i < p; ++i)
                for (std::size_t j = 0; j < p; ++j) a[i][j] += row[i] * row[j];
        for (std::size_t i = 0; i < p; ++i) a[i][i] += 0.5;  // keep it well conditioned
        linalg::Vector b(p);
        for (double& v : b) v = unit(rng);

        const linalg::Vector got = linalg::solve_spd(a, b);
        const std::vector<double> want = oracle::gauss_solve(a, b);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < p; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-9));
    }
}

TEST_CASE("solve_spd rejects a non-positive-definite matrix") {
    linalg::Matrix a = {{1.0, 2.0}, {2.0, 1.0}};  // eigenvalues 3 and -1
    CHECK_THROWS_AS(linalg::solve_spd(a, {1.0, 1.0}), SingularFit);
}

TEST_CASE("logistic gradient matches central finite differences") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 12 + static_cast<std::size_t>(trial);
        const std::size_t p = 3 + static_cast<std::size_t>(trial % 4);
        linalg::Matrix x(n, linalg::Vector(p));
        std::vector<int> y(n);
        for (std::size_t r = 0; r < n; ++r) {
            for (double& v : x[r]) v = unit(rng);
            y[r] = unit(rng) > 0.0 ? 1 : 0;
        }
        std::vector<double> weights(p);
        for (double& v : weights) v = unit(rng);
        const double intercept = unit(rng);
        const double l2 = 0.01;

        const std::vector<double> analytic = logistic_gradient(x, y, weights, intercept, l2);
        std::vector<double> packed = weights;
        packed.push_back(intercept);
        const std::vector<double> numeric = oracle::fd_gradient(
            [&](const std::vector<double>& point) {
                const std::vector<double> w(point.begin(), point.end() - 1);
                return logistic_loss(x, y, w, point.back(), l2);
            },
            packed, 1e-5);
        REQUIRE(analytic.size() == numeric.size());
        for (std::size_t i = 0; i < analytic.size(); ++i) {
            const double scale = std::max(1.0, std::abs(analytic[i]));
            CHECK(std::abs(analytic[i] - numeric[i]) / scale < 1e-6);
        }
    }
}

TEST_CASE("fit_logistic separates a linearly separable set and is deterministic") {
    linalg::Matrix x;
    std::vector<int> y;
    for (int i = 0; i < 20; ++i) {
        const double v = i < 10 ? -1.0 - i * 0.1 : 1.0 + (i - 10) * 0.1;
        x.push_back({v, 0.5 * v});
        y.push_back(i < 10 ? 0 : 1);
    }
    const LogisticModel a = fit_logistic(x, y, {});
    const LogisticModel b = fit_logistic(x, y, {});
    CHECK(a.weights == b.weights);
    CHECK(a.intercept == b.intercept);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double prob = predict_logistic_prob(a, x[i]);
        CHECK((prob >= 0.5) == (y[i] == 1));
    }
}

TEST_CASE("sigmoid stays finite at extreme inputs") {
    CHECK(sigmoid(1000.0) == doctest::Approx(1.0));
    CHECK(sigmoid(-1000.0) == doctest::Approx(0.0));
    CHECK(std::isfinite(sigmoid(710.0)));
    CHECK(std::isfinite(sigmoid(-710.0)));
}

namespace {

/// Random training sets mixing separable and noisy labels.
void fill_random_training(std::mt19937_64& rng, linalg::Matrix& x, std::vector<int>& y) {
    std::uniform_int_distribution<std::size_t> n_dist(5, 120);
    std::uniform_int_distribution<std::size_t> p_dist(1, 6);
    std::uniform_int_distribution<int> label_dist(0, 3);
    std::uniform_real_distribution<double> value(-5.0, 5.0);
    const std::size_t n = n_dist(rng);
    const std::size_t p = p_dist(rng);
    x.assign(n, linalg::Vector(p));
    y.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (double& v : x[r]) v = value(rng);
        y[r] = label_dist(rng);
    }
}

}  // namespace

TEST_CASE("decision tree depth never exceeds the configured cap") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 40; ++trial) {
        linalg::Matrix x;
        std::vector<int> y;
        fill_random_training(rng, x, y);
        const DecisionTree tree = fit_tree(x, y, {});
        CHECK(tree.depth() <= 10);
        // Every training row lands on some leaf without throwing.
        for (const auto& row : x) {
            const int label = tree.predict(row);
            CHECK(label >= 0);
            CHECK(label <= 3);
        }
    }
}

TEST_CASE("decision tree fits an axis-aligned separable fixture exactly") {
    linalg::Matrix x;
    std::vector<int> y;
    for (double a = 0.0; a < 4.0; ++a) {
        for (double b = 0.0; b < 4.0; ++b) {
            x.push_back({a, b});
            y.push_back((a < 2.0 ? 0 : 2) + (b < 2.0 ? 0 : 1));
        }
    }
    const DecisionTree tree = fit_tree(x, y, {});
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(tree.predict(x[i]) == y[i]);
}

TEST_CASE("tree induction is deterministic and survives a JSON round-trip") {
    std::mt19937_64 rng(41);
    linalg::Matrix x;
    std::vector<int> y;
    fill_random_training(rng, x, y);
    const DecisionTree first = fit_tree(x, y, {});
    const DecisionTree second = fit_tree(x, y, {});
    CHECK(tree_to_json(first) == tree_to_json(second));
    const DecisionTree reloaded = tree_from_json(tree_to_json(first));
    for (const auto& row : x) CHECK(reloaded.predict(row) == first.predict(row));
}

TEST_CASE("random forest majority vote is deterministic per seed") {
    std::mt19937_64 rng(43);
    linalg::Matrix x;
    std::vector<int> y;
    fill_random_training(rng, x, y);
    const RandomForest one = fit_forest(x, y, 9, 7, {});
    const RandomForest two = fit_forest(x, y, 9, 7, {});
    CHECK(forest_to_json(one) == forest_to_json(two));
    const RandomForest other_seed = fit_forest(x, y, 9, 8, {});
    for (const auto& tree : one.trees) CHECK(tree.depth() <= 10);
    // The reloaded forest predicts identically.
    const RandomForest reloaded = forest_from_json(forest_to_json(one));
    for (const auto& row : x) CHECK(reloaded.predict(row) == one.predict(row));
    (void)other_seed;
}

TEST_CASE("utility helpers behave") {
    CHECK(util::trim("  padded\t\n") == "padded");
    CHECK(util::to_lower("MiXeD") == "mixed");
    CHECK(util::tokenize("The fire, the FIRE!") ==
          std::vector<std::string>{"the", "fire", "the", "fire"});
    CHECK(util::parse_long("42").value() == 42);
    CHECK_FALSE(util::parse_long("4x").has_value());
    CHECK_FALSE(util::parse_long("").has_value());
    CHECK(util::parse_double("0.25").value() == doctest::Approx(0.25));
    CHECK(util::format_fixed(0.8165, 3) == "0.817");
    CHECK(util::format_fixed(-1.25, 1) == "-1.3");
    CHECK(util::format_fixed(2.0, 3) == "2.000");
}

TEST_CASE("fnv1a is stable across calls and sensitive to content") {
    CHECK(util::fnv1a_hex("abc") == util::fnv1a_hex("abc"));
    CHECK(util::fnv1a_hex("abc") != util::fnv1a_hex("abd"));
    CHECK(util::fnv1a_hex("").size() == 16);
    // Reference value of the empty string under 64-bit FNV-1a.
    CHECK(util::fnv1a("") == 14695981039346656037ULL);
}
