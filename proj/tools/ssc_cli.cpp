#include <array>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ssc/ssc.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitDomain = 2;
constexpr int kExitResource = 3;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// stdout by default, --out PATH otherwise.
class Sink {
public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw ssc::domain_error("cannot open output file: " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
  std::ofstream file_;
};

std::vector<double> parse_alpha(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ssc::domain_error("cannot parse weight \"" + item + "\"");
    }
  }
  return values;
}

std::vector<int> parse_id_list(const std::string& text) {
  std::vector<int> ids;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      ids.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ssc::domain_error("cannot parse test id \"" + item + "\"");
    }
  }
  return ids;
}

ssc::RatioRule parse_rule(const std::string& rule) {
  if (rule == "fail") return ssc::RatioRule::fail;
  if (rule == "succ") return ssc::RatioRule::succ;
  if (rule == "cheap") return ssc::RatioRule::cheap;
  throw ssc::domain_error("unknown rule \"" + rule + "\"");
}

// 2rr | 3rr | perm:<comma ids>, with optional --alpha weights for 3rr.
ssc::TestSequence resolve_strategy(const ssc::Instance& inst, const std::string& spec,
                                   const std::string& alpha) {
  if (spec == "2rr") {
    if (!alpha.empty()) throw ssc::domain_error("2rr takes no --alpha weights");
    return ssc::TestSequence{ssc::preset_strategy(inst, ssc::Preset::rr2).order, true};
  }
  if (spec == "3rr") {
    if (alpha.empty())
      return ssc::TestSequence{ssc::preset_strategy(inst, ssc::Preset::rr3).order, true};
    const std::vector<double> w = parse_alpha(alpha);
    if (w.size() != 3) throw ssc::domain_error("3rr needs three --alpha weights");
    return ssc::TestSequence{
        ssc::preset_strategy(inst, ssc::Preset::rr3, std::array<double, 3>{w[0], w[1], w[2]}).order,
        true};
  }
  if (spec.rfind("perm:", 0) == 0) {
    ssc::TestSequence seq{parse_id_list(spec.substr(5)), false};
    if (seq.steps.empty()) throw ssc::domain_error("perm: needs at least one test id");
    return seq;
  }
  throw ssc::domain_error("unknown strategy \"" + spec + "\"");
}

void print_order(std::ostream& out, const std::vector<int>& order) {
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i) out << ' ';
    out << order[i];
  }
  out << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic score classification: strategies, exact baselines, studies"};
  app.require_subcommand(1);

  std::string instance_path, out_path, rule, strategy, alpha, dedup = "on", emit = "instance";
  int m = 1, n = 8, num_classes = 0, score = 0, cls = 0, count = 100;
  int max_enum = 20, max_adaptive = 20;
  double eps = 0.0;
  std::uint64_t seed = 1;

  CLI::App* cmd_classify = app.add_subcommand("classify", "Class index of a score");
  cmd_classify->add_option("--instance", instance_path)->required();
  cmd_classify->add_option("--count", score, "score (number of successes)")->required();
  cmd_classify->add_option("--out", out_path);

  CLI::App* cmd_perm = app.add_subcommand("perm", "Ratio-ordered test permutation");
  cmd_perm->add_option("--instance", instance_path)->required();
  cmd_perm->add_option("--rule", rule, "fail | succ | cheap")->required();
  cmd_perm->add_option("--out", out_path);

  CLI::App* cmd_merge = app.add_subcommand("merge", "Round-robin merged test sequence");
  cmd_merge->add_option("--instance", instance_path)->required();
  cmd_merge->add_option("--strategy", strategy, "2rr | 3rr")->default_val("2rr");
  cmd_merge->add_option("--alpha", alpha, "comma-separated weights (3rr)");
  cmd_merge->add_option("--dedup", dedup, "on | off")->default_val("on");
  cmd_merge->add_option("--out", out_path);

  CLI::App* cmd_eval = app.add_subcommand("eval", "Exact expected cost of a strategy");
  cmd_eval->add_option("--instance", instance_path)->required();
  cmd_eval->add_option("--strategy", strategy, "2rr | 3rr | perm:<comma ids>")->required();
  cmd_eval->add_option("--alpha", alpha, "comma-separated weights (3rr)");
  cmd_eval->add_option("--class", cls, "condition on this class");
  cmd_eval->add_option("--out", out_path);

  CLI::App* cmd_opta = app.add_subcommand("opt-adaptive", "Optimal adaptive strategy");
  cmd_opta->add_option("--instance", instance_path)->required();
  cmd_opta->add_option("--max-adaptive", max_adaptive)->default_val(20);
  cmd_opta->add_option("--class", cls, "conditionally optimal for this class");
  cmd_opta->add_option("--out", out_path);

  CLI::App* cmd_optn = app.add_subcommand("opt-nonadaptive", "Optimal fixed test order");
  cmd_optn->add_option("--instance", instance_path)->required();
  cmd_optn->add_option("--out", out_path);

  CLI::App* cmd_gap = app.add_subcommand("gap", "Adaptivity-gap family instance");
  cmd_gap->add_option("--m", m)->required();
  cmd_gap->add_option("--eps", eps)->default_val(0.0);
  cmd_gap->add_option("--emit", emit, "instance | summary")->default_val("instance");
  cmd_gap->add_option("--out", out_path);

  CLI::App* cmd_study = app.add_subcommand("study", "Ratio study over random instances (CSV)");
  cmd_study->add_option("--count", count)->default_val(100);
  cmd_study->add_option("--n", n, "maximum tests per instance (drawn from [2, n])")->default_val(10);
  cmd_study->add_option("--b", num_classes, "fixed class count (0 = random in [2, n+1])")
      ->default_val(0);
  cmd_study->add_option("--seed", seed)->default_val(1);
  cmd_study->add_option("--max-adaptive", max_adaptive)->default_val(20);
  cmd_study->add_option("--out", out_path);

  CLI::App* cmd_audit = app.add_subcommand("audit", "Per-realization lemma audits");
  cmd_audit->add_option("--instance", instance_path, "audit a single instance");
  cmd_audit->add_option("--count", count)->default_val(100);
  cmd_audit->add_option("--n", n, "maximum tests per instance (drawn from [2, n])")->default_val(8);
  cmd_audit->add_option("--seed", seed)->default_val(1);
  cmd_audit->add_option("--max-enum", max_enum)->default_val(20);
  cmd_audit->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    Sink sink(out_path);
    std::ostream& out = sink.stream();

    if (app.got_subcommand(cmd_classify)) {
      const ssc::Instance inst = ssc::load_instance_file(instance_path);
      out << ssc::classify(inst, score) << '\n';
    } else if (app.got_subcommand(cmd_perm)) {
      const ssc::Instance inst = ssc::load_instance_file(instance_path);
      print_order(out, ssc::ratio_permutation(inst, parse_rule(rule)).order);
    } else if (app.got_subcommand(cmd_merge)) {
      const ssc::Instance inst = ssc::load_instance_file(instance_path);
      ssc::RoundRobinSpec spec;
      if (strategy == "2rr") {
        if (!alpha.empty()) throw ssc::domain_error("2rr takes no --alpha weights");
        spec = ssc::two_rr_spec(inst);
      } else if (strategy == "3rr") {
        if (alpha.empty()) {
          spec = ssc::three_rr_spec(inst);
        } else {
          const std::vector<double> w = parse_alpha(alpha);
          if (w.size() != 3) throw ssc::domain_error("3rr needs three --alpha weights");
          spec = ssc::three_rr_spec(inst, {w[0], w[1], w[2]});
        }
      } else {
        throw ssc::domain_error("unknown strategy \"" + strategy + "\"");
      }
      if (dedup == "off")
        spec.dedup = false;
      else if (dedup != "on")
        throw ssc::domain_error("--dedup must be on or off");
      print_order(out, ssc::round_robin_merge(inst, spec).steps);
    } else if (app.got_subcommand(cmd_eval)) {
      const ssc::Instance inst = ssc::load_instance_file(instance_path);
      const ssc::TestSequence seq = resolve_strategy(inst, strategy, alpha);
      const double value = cmd_eval->count("--class")
                               ? ssc::conditional_expected_cost(inst, seq, cls)
                               : ssc::expected_cost(inst, seq);
      out << fmt(value) << '\n';
    } else if (app.got_subcommand(cmd_opta)) {
      const ssc::Instance inst = ssc::load_instance_file(instance_path);
      const ssc::AdaptiveResult result =
          cmd_opta->count("--class") ? ssc::conditional_optimal_adaptive(inst, cls, max_adaptive)
                                     : ssc::optimal_adaptive(inst, max_adaptive);
      out << fmt(result.value) << '\n';
      out << ssc::tree_to_json(result.tree).dump(2) << '\n';
    } else if (app.got_subcommand(cmd_optn)) {
      const ssc::Instance inst = ssc::load_instance_file(instance_path);
      const ssc::NonadaptiveResult result = ssc::optimal_nonadaptive(inst);
      out << fmt(result.value) << '\n';
      print_order(out, result.order.order);
    } else if (app.got_subcommand(cmd_gap)) {
      const ssc::Instance inst = ssc::gap_instance(ssc::GapParams{m, eps});
      if (emit == "instance") {
        out << ssc::instance_to_json(inst).dump() << '\n';
      } else if (emit == "summary") {
        out << "n " << inst.num_tests() << "\nB " << inst.num_classes() << '\n';
        out << "cost_2rr "
            << fmt(ssc::expected_cost(
                   inst, ssc::TestSequence{ssc::preset_strategy(inst, ssc::Preset::rr2).order, true}))
            << '\n';
        out << "cost_3rr "
            << fmt(ssc::expected_cost(
                   inst, ssc::TestSequence{ssc::preset_strategy(inst, ssc::Preset::rr3).order, true}))
            << '\n';
        try {
          out << "cost_opt_adaptive " << fmt(ssc::optimal_adaptive(inst).value) << '\n';
        } catch (const ssc::resource_error&) {
          out << "cost_opt_adaptive n/a\n";
        }
        try {
          out << "cost_opt_nonadaptive " << fmt(ssc::optimal_nonadaptive(inst).value) << '\n';
        } catch (const ssc::resource_error&) {
          out << "cost_opt_nonadaptive n/a\n";
        }
      } else {
        throw ssc::domain_error("--emit must be instance or summary");
      }
    } else if (app.got_subcommand(cmd_study)) {
      if (count < 1) throw ssc::domain_error("--count must be positive");
      if (n < 2) throw ssc::domain_error("--n must be at least 2");
      std::mt19937_64 meta(seed);
      std::vector<ssc::StudyInput> inputs;
      inputs.reserve(static_cast<std::size_t>(count));
      for (int i = 0; i < count; ++i) {
        const int ni = 2 + static_cast<int>(meta() % static_cast<std::uint64_t>(n - 1));
        const int bi = num_classes > 0
                           ? num_classes
                           : 2 + static_cast<int>(meta() % static_cast<std::uint64_t>(ni));
        const std::uint64_t inst_seed = meta();
        inputs.push_back(ssc::StudyInput{"rnd" + std::to_string(i),
                                         "seed=" + std::to_string(inst_seed),
                                         ssc::random_instance(ni, bi, inst_seed)});
      }
      ssc::EvalLimits limits;
      limits.max_adaptive = max_adaptive;
      ssc::write_csv(out, ssc::ratio_study(inputs, ssc::StudySelection{}, limits));
    } else if (app.got_subcommand(cmd_audit)) {
      std::vector<ssc::Instance> instances;
      if (!instance_path.empty()) {
        instances.push_back(ssc::load_instance_file(instance_path));
      } else {
        if (count < 1) throw ssc::domain_error("--count must be positive");
        if (n < 2) throw ssc::domain_error("--n must be at least 2");
        std::mt19937_64 meta(seed);
        for (int i = 0; i < count; ++i) {
          const int ni = 2 + static_cast<int>(meta() % static_cast<std::uint64_t>(n - 1));
          const int bi = 2 + static_cast<int>(meta() % static_cast<std::uint64_t>(ni));
          instances.push_back(ssc::random_instance(ni, bi, meta()));
        }
      }
      ssc::AuditOptions options;
      options.max_enum = max_enum;
      const ssc::AuditReport report = ssc::lemma_audit(instances, options);
      out << "instances_checked " << report.instances_checked << '\n';
      out << "instances_skipped " << report.instances_skipped << '\n';
      out << "realizations " << report.realizations << '\n';
      out << "phase_conservation_violations " << report.phase_conservation_violations << '\n';
      out << "tau1_bound_violations " << report.tau1_bound_violations << '\n';
      out << "share_bound_3rr_violations " << report.share_bound_3rr_violations << '\n';
      out << "share_bound_2rr_violations " << report.share_bound_2rr_violations << '\n';
      out << "cross_version_violations " << report.cross_version_violations << '\n';
      for (const std::string& note : report.notes) out << "note " << note << '\n';
    }
    return 0;
  } catch (const ssc::resource_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitResource;
  } catch (const ssc::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const ssc::contract_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  }
}
