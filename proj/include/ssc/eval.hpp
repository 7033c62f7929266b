#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ssc/decision_tree.hpp"
#include "ssc/instance.hpp"
#include "ssc/strategies.hpp"

namespace ssc {

// Exact distribution of the number of successes among independent tests.
class CountDistribution {
public:
  explicit CountDistribution(std::vector<double> probabilities)
      : p_(std::move(probabilities)) {
    double sum = 0.0;
    for (double v : p_) {
      if (!(v >= 0.0)) throw domain_error("count distribution: negative entry");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw domain_error("count distribution: entries must sum to 1");
  }

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t k) const { return p_[k]; }
  const std::vector<double>& probabilities() const { return p_; }

private:
  std::vector<double> p_;
};

namespace detail {

// Convolution kernel shared by the public distribution and the evaluators.
inline std::vector<double> convolve_success_counts(const std::vector<double>& probs) {
  std::vector<double> dist{1.0};
  dist.reserve(probs.size() + 1);
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0))
      throw domain_error("success count distribution: probability outside [0,1]");
    dist.push_back(0.0);
    for (std::size_t k = dist.size() - 1; k > 0; --k)
      dist[k] = dist[k] * (1.0 - p) + dist[k - 1] * p;
    dist[0] *= 1.0 - p;
  }
  return dist;
}

inline void check_realization(const Instance& inst, const Realization& x) {
  if (static_cast<int>(x.outcomes.size()) != inst.num_tests())
    throw domain_error("realization length does not match the instance");
}

inline void check_sequence(const Instance& inst, const TestSequence& seq) {
  const int n = inst.num_tests();
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(n), 0);
  for (int t : seq.steps) {
    if (t < 1 || t > n) throw domain_error("test sequence: invalid test id");
    if (seq.dedup && seen[static_cast<std::size_t>(t) - 1])
      throw domain_error("test sequence: repeated test in a dedup sequence");
    seen[static_cast<std::size_t>(t) - 1] = 1;
  }
}

}  // namespace detail

inline CountDistribution success_count_distribution(const std::vector<double>& probs) {
  return CountDistribution(detail::convolve_success_counts(probs));
}

// One conducted test of an execution.
struct ConductedTest {
  int test;
  bool success;
  double cost;
};

// Per-realization record of a strategy run under the stopping rule.
struct ExecutionTrace {
  std::vector<ConductedTest> conducted;
  double total_cost = 0.0;
  int determined_class = 0;
};

// Replays a test sequence on a realization, stopping once the class is
// determined. A repeated step in a no-dedup sequence is charged again but
// reveals nothing new.
inline ExecutionTrace execute(const Instance& inst, const TestSequence& seq,
                              const Realization& x) {
  detail::check_realization(inst, x);
  detail::check_sequence(inst, seq);
  const int n = inst.num_tests();
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(n), 0);
  ExecutionTrace trace;
  int successes = 0;
  int conducted = 0;
  for (int t : seq.steps) {
    if (auto cls = determination(inst, successes, conducted)) {
      trace.determined_class = *cls;
      return trace;
    }
    const bool outcome = x.success(t);
    trace.conducted.push_back(ConductedTest{t, outcome, inst.cost(t)});
    trace.total_cost += inst.cost(t);
    if (!seen[static_cast<std::size_t>(t) - 1]) {
      seen[static_cast<std::size_t>(t) - 1] = 1;
      ++conducted;
      if (outcome) ++successes;
    }
  }
  if (auto cls = determination(inst, successes, conducted)) {
    trace.determined_class = *cls;
    return trace;
  }
  throw contract_error("test sequence failed to determine the class");
}

// Replays a decision tree on a realization.
inline ExecutionTrace execute(const Instance& inst, const DecisionTree& tree,
                              const Realization& x) {
  detail::check_realization(inst, x);
  ExecutionTrace trace;
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(inst.num_tests()), 0);
  const DecisionTree::Node* node = tree.root.get();
  for (;;) {
    if (node == nullptr) throw contract_error("decision tree: missing branch");
    if (node->is_leaf()) {
      trace.determined_class = node->leaf_class;
      return trace;
    }
    const int t = node->test;
    if (t < 1 || t > inst.num_tests()) throw contract_error("decision tree: invalid test id");
    if (seen[static_cast<std::size_t>(t) - 1])
      throw contract_error("decision tree: test repeated along a path");
    seen[static_cast<std::size_t>(t) - 1] = 1;
    const bool outcome = x.success(t);
    trace.conducted.push_back(ConductedTest{t, outcome, inst.cost(t)});
    trace.total_cost += inst.cost(t);
    node = outcome ? node->on_succ.get() : node->on_fail.get();
  }
}

// Exact expected execution cost of a test sequence under the stopping rule,
// by a forward DP over (step, successes among distinct conducted tests).
// E[cost] = sum_t c(step t) * P(still undetermined after steps 1..t-1);
// the probability that step t runs equals the probability of being
// undetermined after t-1 steps because determination is monotone.
inline double expected_cost(const Instance& inst, const TestSequence& seq) {
  detail::check_sequence(inst, seq);
  const int n = inst.num_tests();
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(n), 0);
  std::vector<double> dp{1.0};  // dp[s] = P(s successes among distinct conducted)
  int conducted = 0;
  double total = 0.0;

  auto undetermined_mass = [&]() {
    double mass = 0.0;
    for (int s = 0; s <= conducted; ++s)
      if (dp[static_cast<std::size_t>(s)] > 0.0 && !determination(inst, s, conducted))
        mass += dp[static_cast<std::size_t>(s)];
    return mass;
  };

  for (int t : seq.steps) {
    const double live = undetermined_mass();
    if (live == 0.0) return total;
    total += inst.cost(t) * live;
    if (!seen[static_cast<std::size_t>(t) - 1]) {
      seen[static_cast<std::size_t>(t) - 1] = 1;
      const double p = inst.prob(t);
      dp.push_back(0.0);
      for (std::size_t k = dp.size() - 1; k > 0; --k)
        dp[k] = dp[k] * (1.0 - p) + dp[k - 1] * p;
      dp[0] *= 1.0 - p;
      ++conducted;
    }
  }
  if (undetermined_mass() > 0.0)
    throw contract_error("expected_cost: sequence can fail to determine the class");
  return total;
}

// Brute-force oracle: sums P(x) * cost(strategy, x) over all 2^n outcome
// vectors. Works for any strategy execute() accepts.
template <typename Strategy>
double expected_cost_enum(const Instance& inst, const Strategy& strategy, int max_enum = 20) {
  const int n = inst.num_tests();
  if (n > max_enum)
    throw resource_error("expected_cost_enum: " + std::to_string(n) +
                         " tests exceed the enumeration limit " + std::to_string(max_enum));
  double total = 0.0;
  Realization x;
  x.outcomes.assign(static_cast<std::size_t>(n), 0);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double px = 1.0;
    for (int j = 0; j < n; ++j) {
      const bool bit = (mask >> j) & 1u;
      x.outcomes[static_cast<std::size_t>(j)] = bit ? 1 : 0;
      px *= bit ? inst.prob(j + 1) : 1.0 - inst.prob(j + 1);
    }
    if (px == 0.0) continue;
    total += px * execute(inst, strategy, x).total_cost;
  }
  return total;
}

// E[cost | f(x) = cls] for a test sequence. The numerator weights each
// still-undetermined prefix state by the probability that the final score
// lands in the class, using the success-count distribution of the tests not
// yet conducted; the denominator is P(f = cls).
inline double conditional_expected_cost(const Instance& inst, const TestSequence& seq, int cls) {
  detail::check_sequence(inst, seq);
  const int n = inst.num_tests();
  if (cls < 1 || cls > inst.num_classes())
    throw domain_error("conditional_expected_cost: invalid class index");

  const std::vector<double> full = detail::convolve_success_counts(inst.probs());
  double p_class = 0.0;
  for (int k = 0; k <= n; ++k)
    if (classify(inst, k) == cls) p_class += full[static_cast<std::size_t>(k)];
  if (p_class == 0.0)
    throw domain_error("conditional_expected_cost: class has zero probability");

  std::vector<std::uint8_t> seen(static_cast<std::size_t>(n), 0);
  std::vector<double> dp{1.0};
  int conducted = 0;

  // Distribution of successes among the not-yet-conducted tests.
  auto suffix_distribution = [&]() {
    std::vector<double> rest;
    for (int j = 1; j <= n; ++j)
      if (!seen[static_cast<std::size_t>(j) - 1]) rest.push_back(inst.prob(j));
    return detail::convolve_success_counts(rest);
  };

  std::vector<double> suffix = suffix_distribution();
  double numerator = 0.0;
  bool all_determined = false;
  for (int t : seq.steps) {
    double weighted = 0.0;
    double live = 0.0;
    for (int s = 0; s <= conducted; ++s) {
      const double ps = dp[static_cast<std::size_t>(s)];
      if (ps == 0.0 || determination(inst, s, conducted)) continue;
      live += ps;
      double in_class = 0.0;
      for (std::size_t k = 0; k < suffix.size(); ++k)
        if (classify(inst, s + static_cast<int>(k)) == cls) in_class += suffix[k];
      weighted += ps * in_class;
    }
    if (live == 0.0) {
      all_determined = true;
      break;
    }
    numerator += inst.cost(t) * weighted;
    if (!seen[static_cast<std::size_t>(t) - 1]) {
      seen[static_cast<std::size_t>(t) - 1] = 1;
      const double p = inst.prob(t);
      dp.push_back(0.0);
      for (std::size_t k = dp.size() - 1; k > 0; --k)
        dp[k] = dp[k] * (1.0 - p) + dp[k - 1] * p;
      dp[0] *= 1.0 - p;
      ++conducted;
      suffix = suffix_distribution();
    }
  }
  if (!all_determined) {
    for (int s = 0; s <= conducted; ++s)
      if (dp[static_cast<std::size_t>(s)] > 0.0 && !determination(inst, s, conducted))
        throw contract_error("conditional_expected_cost: sequence can fail to determine the class");
  }
  return numerator / p_class;
}

enum class Verifier { fail, succ };

// Diagnostic record of one round-robin execution, split at the step where
// the realized class's interval first becomes the leftmost or rightmost of
// the remaining sub-instance.
struct PhaseTrace {
  struct Share {
    double phase1 = 0.0;
    double phase2 = 0.0;
  };

  int tau1 = 0;
  int tau2 = 0;
  Verifier verifier = Verifier::fail;
  std::vector<Share> shares;  // one per sub-strategy of the spec

  double total() const {
    double sum = 0.0;
    for (const Share& s : shares) sum += s.phase1 + s.phase2;
    return sum;
  }
};

// Replays the merged order of `spec` on a realization. tau1 is the first
// step after which the scheme has found at least t_i successes or at least
// n+1-t_{i+1} failures for the realized class i (0 when a threshold is
// already trivial); tau2 is the determination step. The verifier is `fail`
// when the success threshold was met at tau1, i.e. the score lies in the
// leftmost interval of the remaining sub-instance. Each step's cost is
// attributed in full to the sub-strategy that was chosen as minimizer.
inline PhaseTrace phase_trace(const Instance& inst, const RoundRobinSpec& spec,
                              const Realization& x) {
  detail::check_realization(inst, x);
  const int n = inst.num_tests();
  const std::vector<MergeStep> steps = round_robin_trace(inst, spec);

  const int realized = classify(inst, score_of(x));
  const int need_succ = inst.cut(realized);
  const int need_fail = n + 1 - inst.cut(realized + 1);

  PhaseTrace trace;
  trace.shares.assign(spec.sub_perms.size(), PhaseTrace::Share{});

  std::vector<std::uint8_t> seen(static_cast<std::size_t>(n), 0);
  int successes = 0;
  int conducted = 0;
  bool phase1_open = !(successes >= need_succ || conducted - successes >= need_fail);
  if (!phase1_open) trace.verifier = successes >= need_succ ? Verifier::fail : Verifier::succ;
  if (determination(inst, successes, conducted)) return trace;  // single-class instance

  int step_index = 0;
  for (const MergeStep& step : steps) {
    ++step_index;
    const std::size_t owner = static_cast<std::size_t>(step.owner);
    if (phase1_open)
      trace.shares[owner].phase1 += step.cost;
    else
      trace.shares[owner].phase2 += step.cost;
    if (!seen[static_cast<std::size_t>(step.test) - 1]) {
      seen[static_cast<std::size_t>(step.test) - 1] = 1;
      ++conducted;
      if (x.success(step.test)) ++successes;
    }
    if (phase1_open && (successes >= need_succ || conducted - successes >= need_fail)) {
      phase1_open = false;
      trace.tau1 = step_index;
      trace.verifier = successes >= need_succ ? Verifier::fail : Verifier::succ;
    }
    if (determination(inst, successes, conducted)) {
      trace.tau2 = step_index;
      return trace;
    }
  }
  throw contract_error("phase_trace: merged order failed to determine the class");
}

}  // namespace ssc
