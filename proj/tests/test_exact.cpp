#include <algorithm>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "ssc/ssc.hpp"
#include "test_support.hpp"

using namespace ssc;
using namespace ssc::testing;

namespace {

constexpr double kTol = 1e-9;

// min over all n! orders, the literal brute force
double brute_force_nonadaptive(const Instance& inst) {
  std::vector<int> order(static_cast<std::size_t>(inst.num_tests()));
  std::iota(order.begin(), order.end(), 1);
  double best = std::numeric_limits<double>::infinity();
  do {
    best = std::min(best, expected_cost(inst, TestSequence{order, true}));
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

// lexicographically smallest order whose cost is within tol of `value`
std::vector<int> lex_first_optimal(const Instance& inst, double value) {
  std::vector<int> order(static_cast<std::size_t>(inst.num_tests()));
  std::iota(order.begin(), order.end(), 1);
  do {
    if (expected_cost(inst, TestSequence{order, true}) <= value + kTol) return order;
  } while (std::next_permutation(order.begin(), order.end()));
  return {};
}

}  // namespace

TEST_CASE("optimal adaptive on the sample instance") {
  const Instance sample = sample_instance();
  const AdaptiveResult result = optimal_adaptive(sample);
  REQUIRE(result.tree.root != nullptr);
  CHECK(result.tree.root->test == 2);
  CHECK(result.value == Catch::Approx(14.2632).margin(kTol));
  CHECK(tree_valid(sample, result.tree));
  CHECK(expected_cost_enum(sample, result.tree) == Catch::Approx(result.value).margin(kTol));
  // the hand-built reference strategy achieves exactly the optimal value
  CHECK(expected_cost_enum(sample, sample_optimal_tree()) == Catch::Approx(result.value).margin(kTol));
}

TEST_CASE("optimal adaptive on the gap family costs m+1") {
  for (int m = 1; m <= 5; ++m) {
    const Instance inst = gap_instance({m, 0.0});
    CHECK(optimal_adaptive(inst).value == Catch::Approx(m + 1.0).margin(kTol));
  }
}

TEST_CASE("optimal adaptive degenerate and limit cases") {
  const Instance one_class({2, 3}, {0.5, 0.5}, {0, 3});
  const AdaptiveResult result = optimal_adaptive(one_class);
  CHECK(result.value == 0.0);
  REQUIRE(result.tree.root != nullptr);
  CHECK(result.tree.root->is_leaf());

  CHECK_THROWS_AS(optimal_adaptive(sample_instance(), 3), resource_error);
}

TEST_CASE("optimal adaptive matches the history-based oracle") {
  std::mt19937_64 rng(111);
  for (int round = 0; round < 25; ++round) {
    const int n = 2 + static_cast<int>(rng() % 4);  // 2..5
    const Instance inst = random_instance(n, 2 + static_cast<int>(rng() % n), rng());
    CHECK(optimal_adaptive(inst).value ==
          Catch::Approx(history_optimal_value(inst)).margin(kTol));
  }
}

TEST_CASE("optimal adaptive equals the minimum over all strategies on tiny instances") {
  std::mt19937_64 rng(222);
  for (int round = 0; round < 10; ++round) {
    const int n = 2 + static_cast<int>(rng() % 2);  // 2..3
    const Instance inst = random_instance(n, 2 + static_cast<int>(rng() % n), rng());
    double best = std::numeric_limits<double>::infinity();
    for (const DecisionTree& tree : all_strategies(inst)) {
      CHECK(tree_valid(inst, tree));
      best = std::min(best, expected_cost_enum(inst, tree));
    }
    CHECK(optimal_adaptive(inst).value == Catch::Approx(best).margin(kTol));
  }
}

TEST_CASE("optimal nonadaptive basics") {
  const Instance single({5}, {0.3}, {0, 1, 2});
  const NonadaptiveResult r1 = optimal_nonadaptive(single);
  CHECK(r1.value == Catch::Approx(5.0).margin(kTol));
  CHECK(r1.order.order == std::vector<int>{1});

  const Instance gap2 = gap_instance({2, 0.0});
  CHECK(optimal_nonadaptive(gap2).value == Catch::Approx(4.0).margin(kTol));

  const Instance sample = sample_instance();
  const NonadaptiveResult r2 = optimal_nonadaptive(sample);
  CHECK(r2.value == Catch::Approx(15.4608).margin(kTol));
  CHECK(r2.value >= optimal_adaptive(sample).value - kTol);
  CHECK(expected_cost(sample, TestSequence{r2.order.order, true}) ==
        Catch::Approx(r2.value).margin(kTol));

  CHECK_THROWS_AS(optimal_nonadaptive(gap_instance({6, 0.0})), resource_error);
}

TEST_CASE("optimal nonadaptive equals the n! brute force with lexicographic ties") {
  std::mt19937_64 rng(333);
  for (int round = 0; round < 20; ++round) {
    const int n = 2 + static_cast<int>(rng() % 4);  // 2..5
    const Instance inst = random_instance(n, 2 + static_cast<int>(rng() % n), rng());
    const double brute_value = brute_force_nonadaptive(inst);
    const NonadaptiveResult result = optimal_nonadaptive(inst);
    CHECK(result.value == Catch::Approx(brute_value).margin(kTol));
    CHECK(expected_cost(inst, TestSequence{result.order.order, true}) ==
          Catch::Approx(result.value).margin(kTol));
    CHECK(result.order.order == lex_first_optimal(inst, brute_value));
  }
}

TEST_CASE("strategy hierarchy: adaptive <= nonadaptive <= any permutation") {
  std::mt19937_64 rng(444);
  for (int round = 0; round < 30; ++round) {
    const int n = 2 + static_cast<int>(rng() % 6);
    const Instance inst = random_instance(n, 2 + static_cast<int>(rng() % n), rng());
    const double adaptive = optimal_adaptive(inst).value;
    const double nonadaptive = optimal_nonadaptive(inst).value;
    CHECK(adaptive <= nonadaptive + kTol);
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 1);
    std::shuffle(order.begin(), order.end(), rng);
    CHECK(nonadaptive <= expected_cost(inst, TestSequence{order, true}) + kTol);
  }
}

TEST_CASE("conditional optimal adaptive basics") {
  const Instance single({5}, {0.3}, {0, 1, 2});
  CHECK(conditional_optimal_adaptive(single, 1).value == Catch::Approx(5.0).margin(kTol));
  CHECK(conditional_optimal_adaptive(single, 2).value == Catch::Approx(5.0).margin(kTol));

  const Instance gap1e = gap_instance({1, 1e-6});
  CHECK(conditional_optimal_adaptive(gap1e, 2).value == Catch::Approx(2.0).margin(1e-4));

  const Instance sample = sample_instance();
  CHECK_THROWS_AS(conditional_optimal_adaptive(sample, 0), domain_error);
  CHECK_THROWS_AS(conditional_optimal_adaptive(sample, 4), domain_error);
  CHECK_THROWS_AS(conditional_optimal_adaptive(sample, 1, 2), resource_error);

  const Instance skewed({1, 1, 1}, {1.0, 1.0, 0.5}, {0, 1, 4});
  CHECK_THROWS_AS(conditional_optimal_adaptive(skewed, 1), domain_error);
}

TEST_CASE("conditional optimal adaptive matches the history-based oracle") {
  std::mt19937_64 rng(555);
  for (int round = 0; round < 25; ++round) {
    const int n = 2 + static_cast<int>(rng() % 4);  // 2..5
    const Instance inst = random_instance(n, 2, rng());
    for (int cls = 1; cls <= 2; ++cls) {
      const CountDistribution dist = success_count_distribution(inst.probs());
      double p_class = 0.0;
      for (int k = 0; k <= n; ++k)
        if (classify(inst, k) == cls) p_class += dist[static_cast<std::size_t>(k)];
      REQUIRE(p_class > 0.0);
      CHECK(conditional_optimal_adaptive(inst, cls).value ==
            Catch::Approx(history_optimal_value(inst, cls) / p_class).margin(kTol));
    }
  }
}

TEST_CASE("conditional optimum is attained by one of the two ratio orders") {
  std::mt19937_64 rng(666);
  for (int round = 0; round < 40; ++round) {
    const int n = 2 + static_cast<int>(rng() % 5);  // 2..6
    const Instance inst = random_instance(n, 2, rng());
    const TestSequence sfail{ratio_permutation(inst, RatioRule::fail).order, true};
    const TestSequence ssucc{ratio_permutation(inst, RatioRule::succ).order, true};
    for (int cls = 1; cls <= 2; ++cls) {
      const double best_ratio = std::min(conditional_expected_cost(inst, sfail, cls),
                                         conditional_expected_cost(inst, ssucc, cls));
      CHECK(conditional_optimal_adaptive(inst, cls).value ==
            Catch::Approx(best_ratio).margin(kTol));
    }
  }
}

TEST_CASE("conditional trees are valid strategies and reproduce their value") {
  std::mt19937_64 rng(777);
  for (int round = 0; round < 15; ++round) {
    const int n = 2 + static_cast<int>(rng() % 4);
    const Instance inst = random_instance(n, 2, rng());
    for (int cls = 1; cls <= 2; ++cls) {
      const AdaptiveResult result = conditional_optimal_adaptive(inst, cls);
      CHECK(tree_valid(inst, result.tree));
      const auto [oracle, p_class] = conditional_cost_enum(inst, result.tree, cls);
      REQUIRE(p_class > 0.0);
      CHECK(oracle == Catch::Approx(result.value).margin(kTol));
    }
  }
}

TEST_CASE("uniform cost scaling scales the optimal values") {
  std::mt19937_64 rng(888);
  for (int round = 0; round < 15; ++round) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const Instance inst = random_instance(n, 2 + static_cast<int>(rng() % n), rng());
    for (double lambda : {0.5, 4.0}) {
      std::vector<double> costs = inst.costs();
      for (double& c : costs) c *= lambda;
      const Instance scaled(costs, inst.probs(), inst.cuts());
      CHECK(optimal_adaptive(scaled).value ==
            Catch::Approx(lambda * optimal_adaptive(inst).value).margin(1e-8));
      CHECK(optimal_nonadaptive(scaled).value ==
            Catch::Approx(lambda * optimal_nonadaptive(inst).value).margin(1e-8));
      CHECK(optimal_nonadaptive(scaled).order.order == optimal_nonadaptive(inst).order.order);
    }
  }
}
