#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ssc/decision_tree.hpp"
#include "ssc/eval.hpp"
#include "ssc/instance.hpp"
#include "ssc/strategies.hpp"

namespace ssc {

struct AdaptiveResult {
  double value = 0.0;
  DecisionTree tree;
};

struct NonadaptiveResult {
  double value = 0.0;
  Permutation order;
};

namespace detail {

inline void check_exact_limit(const Instance& inst, int limit, const char* what) {
  if (inst.num_tests() > limit)
    throw resource_error(std::string(what) + ": " + std::to_string(inst.num_tests()) +
                         " tests exceed the limit " + std::to_string(limit));
}

// Value table over states (conducted-set bitmask, successes). The pair is a
// sufficient state because costs and probabilities are per-test and
// determination depends only on the success and conducted counts.
class AdaptiveSolver {
public:
  explicit AdaptiveSolver(const Instance& inst)
      : inst_(inst),
        n_(inst.num_tests()),
        memo_((std::size_t{1} << n_) * static_cast<std::size_t>(n_ + 1), -1.0) {}

  double value(std::uint32_t mask, int successes) {
    double& slot = memo_[index(mask, successes)];
    if (slot >= 0.0) return slot;
    if (determination(inst_, successes, std::popcount(mask))) return slot = 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= n_; ++j) {
      const std::uint32_t bit = std::uint32_t{1} << (j - 1);
      if (mask & bit) continue;
      const double p = inst_.prob(j);
      const double v = inst_.cost(j) + p * value(mask | bit, successes + 1) +
                       (1.0 - p) * value(mask | bit, successes);
      if (v < best) best = v;
    }
    return slot = best;
  }

  DecisionTree::NodePtr build(std::uint32_t mask, int successes) {
    if (auto cls = determination(inst_, successes, std::popcount(mask)))
      return DecisionTree::leaf(*cls);
    int best_test = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= n_; ++j) {
      const std::uint32_t bit = std::uint32_t{1} << (j - 1);
      if (mask & bit) continue;
      const double p = inst_.prob(j);
      const double v = inst_.cost(j) + p * value(mask | bit, successes + 1) +
                       (1.0 - p) * value(mask | bit, successes);
      if (v < best) {
        best = v;
        best_test = j;
      }
    }
    const std::uint32_t bit = std::uint32_t{1} << (best_test - 1);
    return DecisionTree::internal(best_test, build(mask | bit, successes),
                                  build(mask | bit, successes + 1));
  }

private:
  std::size_t index(std::uint32_t mask, int successes) const {
    return static_cast<std::size_t>(mask) * static_cast<std::size_t>(n_ + 1) +
           static_cast<std::size_t>(successes);
  }

  const Instance& inst_;
  int n_;
  std::vector<double> memo_;
};

}  // namespace detail

// Minimum expected cost over all adaptive strategies, with one optimal
// decision tree. Argmin ties break toward the lowest test id.
inline AdaptiveResult optimal_adaptive(const Instance& inst, int max_adaptive = 20) {
  detail::check_exact_limit(inst, max_adaptive, "optimal_adaptive");
  detail::AdaptiveSolver solver(inst);
  AdaptiveResult result;
  result.value = solver.value(0, 0);
  result.tree.root = solver.build(0, 0);
  return result;
}

namespace detail {

// Subset DP for the best fixed order. The probability that a prefix leaves
// the class undetermined depends only on the set of conducted tests, so
// W(set) = min over next tests j of c_j * P(undetermined | set) + W(set+j)
// is exact over all n! orders.
class NonadaptiveSolver {
public:
  explicit NonadaptiveSolver(const Instance& inst)
      : inst_(inst),
        n_(inst.num_tests()),
        memo_(std::size_t{1} << n_, -1.0),
        live_(std::size_t{1} << n_, -1.0) {}

  double live_mass(std::uint32_t mask) {
    double& slot = live_[mask];
    if (slot >= 0.0) return slot;
    std::vector<double> probs;
    for (int j = 1; j <= n_; ++j)
      if (mask & (std::uint32_t{1} << (j - 1))) probs.push_back(inst_.prob(j));
    const std::vector<double> dp = convolve_success_counts(probs);
    const int conducted = std::popcount(mask);
    double mass = 0.0;
    for (int s = 0; s <= conducted; ++s)
      if (dp[static_cast<std::size_t>(s)] > 0.0 && !determination(inst_, s, conducted))
        mass += dp[static_cast<std::size_t>(s)];
    return slot = mass;
  }

  double value(std::uint32_t mask) {
    double& slot = memo_[mask];
    if (slot >= 0.0) return slot;
    const double live = live_mass(mask);
    if (live == 0.0) return slot = 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= n_; ++j) {
      const std::uint32_t bit = std::uint32_t{1} << (j - 1);
      if (mask & bit) continue;
      const double v = inst_.cost(j) * live + value(mask | bit);
      if (v < best) best = v;
    }
    return slot = best;
  }

  // Lexicographically smallest optimal order: the smallest argmin test at
  // every prefix, remaining tests ascending once nothing is live.
  // Mathematically tied candidates can differ by summation noise, so
  // near-ties within ~1e-12 relative resolve toward the lowest test id.
  Permutation build() {
    Permutation perm;
    std::uint32_t mask = 0;
    while (static_cast<int>(perm.order.size()) < n_) {
      if (live_mass(mask) == 0.0) {
        for (int j = 1; j <= n_; ++j)
          if (!(mask & (std::uint32_t{1} << (j - 1)))) perm.order.push_back(j);
        break;
      }
      double best = std::numeric_limits<double>::infinity();
      for (int j = 1; j <= n_; ++j) {
        const std::uint32_t bit = std::uint32_t{1} << (j - 1);
        if (mask & bit) continue;
        best = std::min(best, inst_.cost(j) * live_mass(mask) + value(mask | bit));
      }
      const double cushion = best + 1e-12 * (1.0 + std::abs(best));
      int best_test = 0;
      for (int j = 1; j <= n_ && best_test == 0; ++j) {
        const std::uint32_t bit = std::uint32_t{1} << (j - 1);
        if (mask & bit) continue;
        if (inst_.cost(j) * live_mass(mask) + value(mask | bit) <= cushion) best_test = j;
      }
      perm.order.push_back(best_test);
      mask |= std::uint32_t{1} << (best_test - 1);
    }
    return perm;
  }

private:
  const Instance& inst_;
  int n_;
  std::vector<double> memo_;
  std::vector<double> live_;
};

}  // namespace detail

// Minimum expected cost over all fixed test orders, with one optimal order.
inline NonadaptiveResult optimal_nonadaptive(const Instance& inst, int max_nonadaptive = 10) {
  detail::check_exact_limit(inst, max_nonadaptive, "optimal_nonadaptive");
  detail::NonadaptiveSolver solver(inst);
  NonadaptiveResult result;
  result.value = solver.value(0);
  result.order = solver.build();
  return result;
}

namespace detail {

// Same state space as AdaptiveSolver, but minimizing E[cost * 1{f = cls}]:
// a step's cost enters weighted by the probability that the final score
// lands in the class given the current state. Dividing the optimum by the
// strategy-independent P(f = cls) yields the conditional expected cost.
class ConditionalSolver {
public:
  ConditionalSolver(const Instance& inst, int cls)
      : inst_(inst),
        n_(inst.num_tests()),
        cls_(cls),
        memo_((std::size_t{1} << n_) * static_cast<std::size_t>(n_ + 1), -1.0) {}

  double class_mass(std::uint32_t mask, int successes) {
    const std::vector<double>& dist = suffix_dist(mask);
    double mass = 0.0;
    for (std::size_t k = 0; k < dist.size(); ++k)
      if (classify(inst_, successes + static_cast<int>(k)) == cls_) mass += dist[k];
    return mass;
  }

  double value(std::uint32_t mask, int successes) {
    double& slot = memo_[index(mask, successes)];
    if (slot >= 0.0) return slot;
    if (determination(inst_, successes, std::popcount(mask))) return slot = 0.0;
    const double mass = class_mass(mask, successes);
    double best = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= n_; ++j) {
      const std::uint32_t bit = std::uint32_t{1} << (j - 1);
      if (mask & bit) continue;
      const double p = inst_.prob(j);
      const double v = inst_.cost(j) * mass + p * value(mask | bit, successes + 1) +
                       (1.0 - p) * value(mask | bit, successes);
      if (v < best) best = v;
    }
    return slot = best;
  }

  DecisionTree::NodePtr build(std::uint32_t mask, int successes) {
    if (auto cls = determination(inst_, successes, std::popcount(mask)))
      return DecisionTree::leaf(*cls);
    const double mass = class_mass(mask, successes);
    int best_test = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= n_; ++j) {
      const std::uint32_t bit = std::uint32_t{1} << (j - 1);
      if (mask & bit) continue;
      const double p = inst_.prob(j);
      const double v = inst_.cost(j) * mass + p * value(mask | bit, successes + 1) +
                       (1.0 - p) * value(mask | bit, successes);
      if (v < best) {
        best = v;
        best_test = j;
      }
    }
    const std::uint32_t bit = std::uint32_t{1} << (best_test - 1);
    return DecisionTree::internal(best_test, build(mask | bit, successes),
                                  build(mask | bit, successes + 1));
  }

private:
  const std::vector<double>& suffix_dist(std::uint32_t mask) {
    auto it = suffix_.find(mask);
    if (it != suffix_.end()) return it->second;
    std::vector<double> probs;
    for (int j = 1; j <= n_; ++j)
      if (!(mask & (std::uint32_t{1} << (j - 1)))) probs.push_back(inst_.prob(j));
    return suffix_.emplace(mask, convolve_success_counts(probs)).first->second;
  }

  std::size_t index(std::uint32_t mask, int successes) const {
    return static_cast<std::size_t>(mask) * static_cast<std::size_t>(n_ + 1) +
           static_cast<std::size_t>(successes);
  }

  const Instance& inst_;
  int n_;
  int cls_;
  std::vector<double> memo_;
  std::unordered_map<std::uint32_t, std::vector<double>> suffix_;
};

}  // namespace detail

// Minimum of E[cost | f(x) = cls] over all adaptive strategies.
inline AdaptiveResult conditional_optimal_adaptive(const Instance& inst, int cls,
                                                   int max_adaptive = 20) {
  detail::check_exact_limit(inst, max_adaptive, "conditional_optimal_adaptive");
  if (cls < 1 || cls > inst.num_classes())
    throw domain_error("conditional_optimal_adaptive: invalid class index");
  const std::vector<double> full = detail::convolve_success_counts(inst.probs());
  double p_class = 0.0;
  for (int k = 0; k <= inst.num_tests(); ++k)
    if (classify(inst, k) == cls) p_class += full[static_cast<std::size_t>(k)];
  if (p_class == 0.0)
    throw domain_error("conditional_optimal_adaptive: class has zero probability");

  detail::ConditionalSolver solver(inst, cls);
  AdaptiveResult result;
  result.value = solver.value(0, 0) / p_class;
  result.tree.root = solver.build(0, 0);
  return result;
}

}  // namespace ssc
