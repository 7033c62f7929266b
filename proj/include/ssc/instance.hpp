#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ssc/errors.hpp"

namespace ssc {

// An instance of the score classification problem: n tests with positive
// costs and independent success probabilities, plus a partition of the
// score range {0..n} into B intervals given by cut points
// t_1 = 0 < t_2 < ... < t_{B+1} = n+1.
//
// Test IDs and class indices are 1-based throughout the library.
// Probabilities of exactly 0 or 1 are accepted (generalized setting);
// is_strict() reports whether all probabilities lie strictly inside (0,1).
class Instance {
public:
  Instance(std::vector<double> costs, std::vector<double> probs, std::vector<int> cuts)
      : costs_(std::move(costs)), probs_(std::move(probs)), cuts_(std::move(cuts)) {
    if (costs_.empty() || costs_.size() != probs_.size())
      throw domain_error("instance: costs and probs must be nonempty and equal in length");
    for (double c : costs_)
      if (!(c > 0.0)) throw domain_error("instance: every cost must be positive");
    for (double p : probs_)
      if (!(p >= 0.0 && p <= 1.0)) throw domain_error("instance: probabilities must lie in [0,1]");
    const int n = num_tests();
    if (cuts_.size() < 2 || cuts_.front() != 0 || cuts_.back() != n + 1)
      throw domain_error("instance: cuts must run from 0 to n+1");
    for (std::size_t i = 1; i < cuts_.size(); ++i)
      if (cuts_[i - 1] >= cuts_[i])
        throw domain_error("instance: cuts must be strictly increasing");
  }

  int num_tests() const { return static_cast<int>(costs_.size()); }
  int num_classes() const { return static_cast<int>(cuts_.size()) - 1; }

  double cost(int test) const { return costs_[index_of(test)]; }
  double prob(int test) const { return probs_[index_of(test)]; }

  // t_i for 1 <= i <= B+1.
  int cut(int i) const {
    if (i < 1 || i > num_classes() + 1)
      throw domain_error("instance: cut index " + std::to_string(i) + " out of range");
    return cuts_[static_cast<std::size_t>(i) - 1];
  }

  const std::vector<double>& costs() const { return costs_; }
  const std::vector<double>& probs() const { return probs_; }
  const std::vector<int>& cuts() const { return cuts_; }

  bool is_strict() const {
    return std::all_of(probs_.begin(), probs_.end(),
                       [](double p) { return p > 0.0 && p < 1.0; });
  }

private:
  std::size_t index_of(int test) const {
    if (test < 1 || test > num_tests())
      throw domain_error("instance: invalid test id " + std::to_string(test));
    return static_cast<std::size_t>(test) - 1;
  }

  std::vector<double> costs_;
  std::vector<double> probs_;
  std::vector<int> cuts_;
};

// A fixed outcome vector for all tests of an instance.
struct Realization {
  std::vector<std::uint8_t> outcomes;  // 0 = failure, 1 = success

  bool success(int test) const { return outcomes[static_cast<std::size_t>(test) - 1] != 0; }
};

// Number of successes in a realization.
inline int score_of(const Realization& x) {
  return static_cast<int>(std::count(x.outcomes.begin(), x.outcomes.end(), std::uint8_t{1}));
}

// The class index i with t_i <= score < t_{i+1}.
inline int classify(const Instance& inst, int score) {
  if (score < 0 || score > inst.num_tests())
    throw domain_error("classify: score " + std::to_string(score) + " out of range");
  const auto& cuts = inst.cuts();
  auto it = std::upper_bound(cuts.begin(), cuts.end(), score);
  return static_cast<int>(it - cuts.begin());
}

// Class index once `conducted` tests produced `successes` successes, or
// nullopt while more than one class is still reachable. The reachable score
// range is [successes, successes + n - conducted]; because classes are
// contiguous intervals, agreement of classify() on the two endpoints is
// equivalent to agreement on the whole range.
inline std::optional<int> determination(const Instance& inst, int successes, int conducted) {
  if (successes < 0 || conducted < successes || conducted > inst.num_tests())
    throw domain_error("determination: need 0 <= successes <= conducted <= n");
  const int lo = classify(inst, successes);
  const int hi = classify(inst, successes + inst.num_tests() - conducted);
  if (lo == hi) return lo;
  return std::nullopt;
}

// The instance left after conducting one test, together with the maps that
// translate its test indices and class labels back to the original.
struct SubInstance {
  Instance instance;
  std::vector<int> kept_tests;  // kept_tests[k-1] = original id of new test k
  std::vector<int> class_map;   // class_map[i-1] = original class of new class i
};

// Remove a conducted test. On success every interior cut drops by one; on
// failure cuts are unchanged; intervals pushed outside the reachable score
// range {0..n'} disappear, and class_map records which original classes the
// surviving intervals correspond to.
inline SubInstance reduce(const Instance& inst, int test, bool success) {
  const int n = inst.num_tests();
  if (test < 1 || test > n) throw domain_error("reduce: invalid test id");
  if (n == 1) throw domain_error("reduce: instance with a single test cannot be reduced");

  std::vector<double> costs, probs;
  std::vector<int> kept;
  costs.reserve(static_cast<std::size_t>(n) - 1);
  probs.reserve(static_cast<std::size_t>(n) - 1);
  kept.reserve(static_cast<std::size_t>(n) - 1);
  for (int j = 1; j <= n; ++j) {
    if (j == test) continue;
    costs.push_back(inst.cost(j));
    probs.push_back(inst.prob(j));
    kept.push_back(j);
  }

  // Intersect every original interval, shifted by the consumed success,
  // with the reachable range [0, n'+1). Surviving intervals stay contiguous,
  // so collecting their upper ends yields the new strictly increasing cuts.
  const int np = n - 1;
  const int shift = success ? 1 : 0;
  std::vector<int> cuts{0};
  std::vector<int> class_map;
  for (int i = 1; i <= inst.num_classes(); ++i) {
    const int lo = std::max(0, inst.cut(i) - shift);
    const int hi = std::min(np + 1, inst.cut(i + 1) - shift);
    if (lo >= hi) continue;  // class unreachable in the sub-instance
    cuts.push_back(hi);
    class_map.push_back(i);
  }

  return SubInstance{Instance(std::move(costs), std::move(probs), std::move(cuts)),
                     std::move(kept), std::move(class_map)};
}

}  // namespace ssc
