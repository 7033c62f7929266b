#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ssc/eval.hpp"
#include "ssc/exact.hpp"
#include "ssc/instance.hpp"
#include "ssc/strategies.hpp"

namespace ssc {

// Parameters of the adaptivity-gap family: n = 2m+1 unit-cost tests, m with
// success probability 1-eps, m with eps, one coin test with 1/2, and the
// two classes split at m+1. eps = 0 gives the generalized-setting instance,
// small eps > 0 its strict perturbation.
struct GapParams {
  int m = 1;
  double eps = 0.0;
};

inline Instance gap_instance(const GapParams& params) {
  if (params.m < 1) throw domain_error("gap_instance: m must be at least 1");
  if (!(params.eps >= 0.0 && params.eps < 0.5))
    throw domain_error("gap_instance: eps must lie in [0, 0.5)");
  const int n = 2 * params.m + 1;
  std::vector<double> costs(static_cast<std::size_t>(n), 1.0);
  std::vector<double> probs;
  probs.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < params.m; ++j) probs.push_back(1.0 - params.eps);
  for (int j = 0; j < params.m; ++j) probs.push_back(params.eps);
  probs.push_back(0.5);
  return Instance(std::move(costs), std::move(probs), {0, params.m + 1, n + 1});
}

// Seed-deterministic instance: integer costs in [1,100], probabilities in
// [0.01, 0.99], and B-1 distinct interior cuts drawn from {1..n}.
inline Instance random_instance(int n, int num_classes, std::uint64_t seed) {
  if (n < 1) throw domain_error("random_instance: n must be at least 1");
  if (num_classes < 1 || num_classes > n + 1)
    throw domain_error("random_instance: B must lie in [1, n+1]");
  std::mt19937_64 rng(seed);
  auto next_below = [&rng](std::uint64_t bound) { return rng() % bound; };
  auto next_unit = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
  };

  std::vector<double> costs, probs;
  costs.reserve(static_cast<std::size_t>(n));
  probs.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) costs.push_back(1.0 + static_cast<double>(next_below(100)));
  for (int j = 0; j < n; ++j) probs.push_back(0.01 + next_unit() * 0.98);

  std::vector<int> pool(static_cast<std::size_t>(n));
  for (int v = 1; v <= n; ++v) pool[static_cast<std::size_t>(v) - 1] = v;
  std::vector<int> cuts{0};
  for (int i = 0; i < num_classes - 1; ++i) {
    const std::size_t j =
        static_cast<std::size_t>(i) + static_cast<std::size_t>(next_below(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    cuts.push_back(pool[static_cast<std::size_t>(i)]);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(n + 1);
  return Instance(std::move(costs), std::move(probs), std::move(cuts));
}

struct EvalLimits {
  int max_enum = 20;
  int max_adaptive = 20;
  int max_nonadaptive = 10;
};

struct StudySelection {
  bool rr2 = true;
  bool rr3 = true;
  bool opt_adaptive = true;
  bool opt_nonadaptive = true;
};

struct StudyInput {
  std::string instance_id;
  std::string seed_or_family;
  Instance instance;
};

// One row of a ratio study. Missing entries mean the column was not
// requested or its exact baseline exceeded a limit (then flagged).
struct RatioRecord {
  std::string instance_id;
  int n = 0;
  int num_classes = 0;
  std::string seed_or_family;
  std::optional<double> cost_2rr;
  std::optional<double> cost_3rr;
  std::optional<double> cost_opt_adaptive;
  std::optional<double> cost_opt_nonadaptive;
  std::optional<double> ratio_2rr;
  std::optional<double> ratio_3rr;
  std::optional<double> adaptivity_ratio;
  std::vector<std::string> violation_flags;
};

inline constexpr double kTwoRRBound = 6.0;
inline constexpr double kThreeRRBound = 3.0 + 2.0 * 1.4142135623730951;  // 3 + 2*sqrt(2)
inline constexpr double kBoundTolerance = 1e-9;

// Evaluates the requested strategies and baselines per instance and flags
// any record that violates the proven approximation bounds against the
// optimal adaptive cost. Single-class instances report all costs 0 and
// ratios 1 by convention.
inline std::vector<RatioRecord> ratio_study(const std::vector<StudyInput>& inputs,
                                            const StudySelection& select = {},
                                            const EvalLimits& limits = {}) {
  std::vector<RatioRecord> records;
  records.reserve(inputs.size());
  for (const StudyInput& input : inputs) {
    const Instance& inst = input.instance;
    RatioRecord rec;
    rec.instance_id = input.instance_id;
    rec.seed_or_family = input.seed_or_family;
    rec.n = inst.num_tests();
    rec.num_classes = inst.num_classes();

    if (inst.num_classes() == 1) {
      if (select.rr2) rec.cost_2rr = 0.0;
      if (select.rr3) rec.cost_3rr = 0.0;
      if (select.opt_adaptive) rec.cost_opt_adaptive = 0.0;
      if (select.opt_nonadaptive) rec.cost_opt_nonadaptive = 0.0;
      if (select.rr2) rec.ratio_2rr = 1.0;
      if (select.rr3) rec.ratio_3rr = 1.0;
      if (select.opt_adaptive && select.opt_nonadaptive) rec.adaptivity_ratio = 1.0;
      records.push_back(std::move(rec));
      continue;
    }

    if (select.rr2)
      rec.cost_2rr = expected_cost(
          inst, TestSequence{preset_strategy(inst, Preset::rr2).order, true});
    if (select.rr3)
      rec.cost_3rr = expected_cost(
          inst, TestSequence{preset_strategy(inst, Preset::rr3).order, true});
    if (select.opt_adaptive) {
      try {
        rec.cost_opt_adaptive = optimal_adaptive(inst, limits.max_adaptive).value;
      } catch (const resource_error&) {
        rec.violation_flags.push_back("limit:opt_adaptive");
      }
    }
    if (select.opt_nonadaptive) {
      try {
        rec.cost_opt_nonadaptive = optimal_nonadaptive(inst, limits.max_nonadaptive).value;
      } catch (const resource_error&) {
        rec.violation_flags.push_back("limit:opt_nonadaptive");
      }
    }

    if (rec.cost_opt_adaptive) {
      const double opt = *rec.cost_opt_adaptive;
      if (rec.cost_2rr) {
        rec.ratio_2rr = *rec.cost_2rr / opt;
        if (*rec.cost_2rr > kTwoRRBound * opt + kBoundTolerance)
          rec.violation_flags.push_back("2rr_bound");
      }
      if (rec.cost_3rr) {
        rec.ratio_3rr = *rec.cost_3rr / opt;
        if (*rec.cost_3rr > kThreeRRBound * opt + kBoundTolerance)
          rec.violation_flags.push_back("3rr_bound");
      }
      if (rec.cost_opt_nonadaptive)
        rec.adaptivity_ratio = *rec.cost_opt_nonadaptive / opt;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::string csv_optional(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string{};
}

}  // namespace detail

// CSV per the fixed schema; floats carry 12 significant digits and
// violation flags are joined with ';'.
inline void write_csv(std::ostream& out, const std::vector<RatioRecord>& records) {
  out << "instance_id,n,B,seed_or_family,cost_2rr,cost_3rr,cost_opt_adaptive,"
         "cost_opt_nonadaptive,ratio_2rr,ratio_3rr,adaptivity_ratio,violation_flags\n";
  for (const RatioRecord& rec : records) {
    out << rec.instance_id << ',' << rec.n << ',' << rec.num_classes << ','
        << rec.seed_or_family << ',' << detail::csv_optional(rec.cost_2rr) << ','
        << detail::csv_optional(rec.cost_3rr) << ','
        << detail::csv_optional(rec.cost_opt_adaptive) << ','
        << detail::csv_optional(rec.cost_opt_nonadaptive) << ','
        << detail::csv_optional(rec.ratio_2rr) << ','
        << detail::csv_optional(rec.ratio_3rr) << ','
        << detail::csv_optional(rec.adaptivity_ratio) << ',';
    for (std::size_t i = 0; i < rec.violation_flags.size(); ++i) {
      if (i) out << ';';
      out << rec.violation_flags[i];
    }
    out << '\n';
  }
}

enum class RealizationMode { exhaustive, sampled };

struct AuditOptions {
  RealizationMode mode = RealizationMode::exhaustive;
  int max_enum = 20;           // exhaustive mode size ceiling
  int samples_per_instance = 256;
  std::uint64_t sample_seed = 1;
  double tolerance = 1e-9;
};

// Violation counters for the per-realization consequences of the two-phase
// cost analysis. All counts are expected to stay zero.
struct AuditReport {
  long long instances_checked = 0;
  long long instances_skipped = 0;
  long long realizations = 0;
  long long phase_conservation_violations = 0;
  long long tau1_bound_violations = 0;
  long long share_bound_3rr_violations = 0;
  long long share_bound_2rr_violations = 0;
  long long cross_version_violations = 0;
  std::vector<std::string> notes;

  long long total_violations() const {
    return phase_conservation_violations + tau1_bound_violations + share_bound_3rr_violations +
           share_bound_2rr_violations + cross_version_violations;
  }
};

namespace detail {

// Replay of a precomputed merge trace on one realization under the stopping
// rule, tracking per-sub-strategy accumulated cost.
struct StoppedRun {
  std::vector<double> per_sub;
  double total = 0.0;
};

inline StoppedRun replay_with_stopping(const Instance& inst, const std::vector<MergeStep>& steps,
                                       std::size_t num_subs, const Realization& x) {
  StoppedRun run;
  run.per_sub.assign(num_subs, 0.0);
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(inst.num_tests()), 0);
  int successes = 0;
  int conducted = 0;
  for (const MergeStep& step : steps) {
    if (determination(inst, successes, conducted)) return run;
    run.per_sub[static_cast<std::size_t>(step.owner)] += step.cost;
    run.total += step.cost;
    if (!seen[static_cast<std::size_t>(step.test) - 1]) {
      seen[static_cast<std::size_t>(step.test) - 1] = 1;
      ++conducted;
      if (x.success(step.test)) ++successes;
    }
  }
  if (!determination(inst, successes, conducted))
    throw contract_error("audit replay: merge failed to determine the class");
  return run;
}

}  // namespace detail

// Checks, realization by realization: phase-share conservation against the
// executed cost, the tau1 lower bound min{t_i, n+1-t_{i+1}}, the 3RR and
// 2RR phase-1 share bounds against the n_i cheapest costs, and the
// dedup/no-dedup cross-version accounting bound. Instances too large for
// exhaustive enumeration are skipped with a note.
inline AuditReport lemma_audit(const std::vector<Instance>& instances,
                               const AuditOptions& options = {}) {
  AuditReport report;
  std::size_t index = 0;
  for (const Instance& inst : instances) {
    const std::size_t instance_index = index++;
    const int n = inst.num_tests();
    if (options.mode == RealizationMode::exhaustive && n > options.max_enum) {
      ++report.instances_skipped;
      report.notes.push_back("instance " + std::to_string(instance_index) +
                             " skipped: " + std::to_string(n) + " tests exceed the limit " +
                             std::to_string(options.max_enum));
      continue;
    }
    ++report.instances_checked;

    const RoundRobinSpec spec2 = two_rr_spec(inst);
    const RoundRobinSpec spec3 = three_rr_spec(inst);
    // The dedup/no-dedup accounting bound is an equal-weight statement;
    // weighted schemes violate the plain form.
    RoundRobinSpec spec2_dup = spec2;
    spec2_dup.dedup = false;
    RoundRobinSpec spec3_eq = three_rr_spec(inst, {1.0, 1.0, 1.0});
    RoundRobinSpec spec3_eq_dup = spec3_eq;
    spec3_eq_dup.dedup = false;
    const std::vector<MergeStep> trace2 = round_robin_trace(inst, spec2);
    const std::vector<MergeStep> trace3_eq = round_robin_trace(inst, spec3_eq);
    const std::vector<MergeStep> trace2_dup = round_robin_trace(inst, spec2_dup);
    const std::vector<MergeStep> trace3_eq_dup = round_robin_trace(inst, spec3_eq_dup);
    const TestSequence seq2{round_robin_merge(inst, spec2).steps, true};
    const TestSequence seq3{round_robin_merge(inst, spec3).steps, true};

    const Permutation cheap = ratio_permutation(inst, RatioRule::cheap);
    std::vector<double> cheap_prefix{0.0};
    for (int t : cheap.order) cheap_prefix.push_back(cheap_prefix.back() + inst.cost(t));

    auto check_realization = [&](const Realization& x) {
      ++report.realizations;
      const int realized = classify(inst, score_of(x));
      const int need_succ = inst.cut(realized);
      const int need_fail = n + 1 - inst.cut(realized + 1);
      const int n_i = need_succ + need_fail;
      const double cheap_bound = cheap_prefix[static_cast<std::size_t>(n_i)];

      const PhaseTrace pt2 = phase_trace(inst, spec2, x);
      const PhaseTrace pt3 = phase_trace(inst, spec3, x);

      const double exec2 = execute(inst, seq2, x).total_cost;
      const double exec3 = execute(inst, seq3, x).total_cost;
      if (std::abs(pt2.total() - exec2) > options.tolerance ||
          std::abs(pt3.total() - exec3) > options.tolerance)
        ++report.phase_conservation_violations;

      const int tau1_floor = std::min(need_succ, need_fail);
      if (pt2.tau1 < tau1_floor || pt2.tau1 > pt2.tau2 || pt3.tau1 < tau1_floor ||
          pt3.tau1 > pt3.tau2)
        ++report.tau1_bound_violations;

      for (std::size_t h = 0; h < spec3.weights.size(); ++h) {
        if (pt3.shares[h].phase1 / spec3.weights[h] >
            cheap_bound / spec3.weights[2] + options.tolerance) {
          ++report.share_bound_3rr_violations;
          break;
        }
      }
      for (std::size_t h = 0; h < spec2.weights.size(); ++h) {
        if (pt2.shares[h].phase1 > 2.0 * cheap_bound + options.tolerance) {
          ++report.share_bound_2rr_violations;
          break;
        }
      }

      const auto cross_violates = [&](const std::vector<MergeStep>& dedup_steps,
                                      const std::vector<MergeStep>& dup_steps,
                                      std::size_t num_subs) {
        const detail::StoppedRun a = detail::replay_with_stopping(inst, dedup_steps, num_subs, x);
        const detail::StoppedRun b = detail::replay_with_stopping(inst, dup_steps, num_subs, x);
        for (double c : a.per_sub)
          if (c > b.total + options.tolerance) return true;
        for (double c : b.per_sub)
          if (c > a.total + options.tolerance) return true;
        return false;
      };
      if (cross_violates(trace2, trace2_dup, 2) || cross_violates(trace3_eq, trace3_eq_dup, 3))
        ++report.cross_version_violations;
    };

    if (options.mode == RealizationMode::exhaustive) {
      Realization x;
      x.outcomes.assign(static_cast<std::size_t>(n), 0);
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        for (int j = 0; j < n; ++j)
          x.outcomes[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>((mask >> j) & 1u);
        check_realization(x);
      }
    } else {
      std::mt19937_64 rng(options.sample_seed + 0x9e3779b97f4a7c15ULL * instance_index);
      Realization x;
      x.outcomes.assign(static_cast<std::size_t>(n), 0);
      for (int s = 0; s < options.samples_per_instance; ++s) {
        for (int j = 0; j < n; ++j)
          x.outcomes[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(rng() & 1u);
        check_realization(x);
      }
    }
  }
  return report;
}

}  // namespace ssc
