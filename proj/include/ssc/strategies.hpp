#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "ssc/instance.hpp"

namespace ssc {

// A fixed test order covering every test exactly once.
struct Permutation {
  std::vector<int> order;  // 1-based test ids
};

// A non-adaptive strategy. With dedup set the steps form a permutation;
// without it steps may repeat (duplicate-counting round-robin variant), and
// a repeated step re-adds its cost but reveals nothing new.
struct TestSequence {
  std::vector<int> steps;
  bool dedup = true;
};

enum class RatioRule { fail, succ, cheap };

// Tests in ascending order of the rule's sort key: c/(1-p) for fail,
// c/p for succ, plain cost for cheap. A zero denominator yields +infinity,
// placing the test after all finite keys. Ties break by ascending test id.
inline Permutation ratio_permutation(const Instance& inst, RatioRule rule) {
  const int n = inst.num_tests();
  std::vector<double> key(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) {
    const double c = inst.cost(j);
    const double p = inst.prob(j);
    double denom = 1.0;
    switch (rule) {
      case RatioRule::fail: denom = 1.0 - p; break;
      case RatioRule::succ: denom = p; break;
      case RatioRule::cheap: denom = 1.0; break;
    }
    key[static_cast<std::size_t>(j) - 1] =
        denom == 0.0 ? std::numeric_limits<double>::infinity() : c / denom;
  }
  Permutation perm;
  perm.order.resize(static_cast<std::size_t>(n));
  std::iota(perm.order.begin(), perm.order.end(), 1);
  std::sort(perm.order.begin(), perm.order.end(), [&](int a, int b) {
    const double ka = key[static_cast<std::size_t>(a) - 1];
    const double kb = key[static_cast<std::size_t>(b) - 1];
    if (ka != kb) return ka < kb;
    return a < b;
  });
  return perm;
}

// Sub-strategies to interleave, their weights, and whether the scheme skips
// tests some other sub-strategy already performed.
struct RoundRobinSpec {
  std::vector<Permutation> sub_perms;
  std::vector<double> weights;
  bool dedup = true;
};

// One emitted step of the round-robin merge: the test conducted, the
// sub-strategy chosen as minimizer, and the cost charged to it.
struct MergeStep {
  int test;
  int owner;  // index into spec.sub_perms
  double cost;
};

// Runs the round-robin selection loop to completion, ignoring the stopping
// condition. The selection depends only on costs and prior picks, never on
// outcomes, so the emitted order is outcome-independent and an evaluator can
// apply the stopping rule afterwards.
//
// Each iteration charges delta_h = cost of the next test sub-strategy h
// would conduct (skipping globally conducted tests when dedup is set, its
// own past picks otherwise) and advances the h* minimizing (C_h + delta_h)
// / weight_h, ties to the lowest index. An exhausted sub-strategy gets
// delta_h = +infinity.
inline std::vector<MergeStep> round_robin_trace(const Instance& inst, const RoundRobinSpec& spec) {
  const int n = inst.num_tests();
  const std::size_t k = spec.sub_perms.size();
  if (k == 0) throw domain_error("round robin: need at least one sub-strategy");
  if (spec.weights.size() != k)
    throw domain_error("round robin: one weight per sub-strategy required");
  for (double w : spec.weights)
    if (!(w > 0.0)) throw domain_error("round robin: weights must be positive");
  for (const Permutation& p : spec.sub_perms) {
    if (static_cast<int>(p.order.size()) != n)
      throw domain_error("round robin: sub-strategy must cover all tests");
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(n), 0);
    for (int t : p.order) {
      if (t < 1 || t > n || seen[static_cast<std::size_t>(t) - 1])
        throw domain_error("round robin: sub-strategy is not a permutation");
      seen[static_cast<std::size_t>(t) - 1] = 1;
    }
  }

  std::vector<MergeStep> steps;
  std::vector<double> acc(k, 0.0);                               // C_h
  std::vector<std::size_t> cursor(k, 0);                         // position in own order
  std::vector<std::uint8_t> done(static_cast<std::size_t>(n), 0);  // conducted by the scheme
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> delta(k, inf);

  for (;;) {
    int best = -1;
    double best_score = inf;
    std::fill(delta.begin(), delta.end(), inf);
    for (std::size_t h = 0; h < k; ++h) {
      std::size_t pos = cursor[h];
      if (spec.dedup) {
        while (pos < spec.sub_perms[h].order.size() &&
               done[static_cast<std::size_t>(spec.sub_perms[h].order[pos]) - 1])
          ++pos;
        cursor[h] = pos;
      }
      if (pos >= spec.sub_perms[h].order.size()) continue;
      delta[h] = inst.cost(spec.sub_perms[h].order[pos]);
      const double score = (acc[h] + delta[h]) / spec.weights[h];
      if (score < best_score) {
        best_score = score;
        best = static_cast<int>(h);
      }
    }
    if (best < 0) break;  // every sub-strategy exhausted

    const std::size_t h = static_cast<std::size_t>(best);
    const int test = spec.sub_perms[h].order[cursor[h]];
    steps.push_back(MergeStep{test, best, delta[h]});
    acc[h] += delta[h];
    ++cursor[h];
    done[static_cast<std::size_t>(test) - 1] = 1;
    if (spec.dedup && static_cast<int>(steps.size()) == n) break;
  }
  return steps;
}

// The merged test sequence: a permutation of all tests under dedup, or the
// duplicate-counting sequence until every sub-strategy is exhausted.
inline TestSequence round_robin_merge(const Instance& inst, const RoundRobinSpec& spec) {
  TestSequence seq;
  seq.dedup = spec.dedup;
  for (const MergeStep& s : round_robin_trace(inst, spec)) seq.steps.push_back(s.test);
  return seq;
}

enum class Preset { rr2, rr3 };

inline constexpr double kDefaultCheapWeight = 1.4142135623730951;  // sqrt(2)

// RoundRobin(ALG_fail, ALG_succ, 1, 1).
inline RoundRobinSpec two_rr_spec(const Instance& inst) {
  return RoundRobinSpec{{ratio_permutation(inst, RatioRule::fail),
                         ratio_permutation(inst, RatioRule::succ)},
                        {1.0, 1.0},
                        true};
}

// RoundRobin(ALG_fail, ALG_succ, ALG_cheap, a_fail, a_succ, a_cheap),
// defaulting to the weights (1, 1, sqrt 2).
inline RoundRobinSpec three_rr_spec(
    const Instance& inst,
    std::array<double, 3> weights = {1.0, 1.0, kDefaultCheapWeight}) {
  for (double w : weights)
    if (!(w > 0.0)) throw domain_error("3RR: weights must be positive");
  return RoundRobinSpec{{ratio_permutation(inst, RatioRule::fail),
                         ratio_permutation(inst, RatioRule::succ),
                         ratio_permutation(inst, RatioRule::cheap)},
                        {weights[0], weights[1], weights[2]},
                        true};
}

// The 2RR or 3RR merged order. Weights apply to 3RR only; 2RR is fixed
// at (1, 1).
inline Permutation preset_strategy(const Instance& inst, Preset which,
                                   std::optional<std::array<double, 3>> weights = std::nullopt) {
  RoundRobinSpec spec;
  if (which == Preset::rr2) {
    if (weights) throw domain_error("2RR takes no weights");
    spec = two_rr_spec(inst);
  } else {
    spec = weights ? three_rr_spec(inst, *weights) : three_rr_spec(inst);
  }
  return Permutation{round_robin_merge(inst, spec).steps};
}

}  // namespace ssc
