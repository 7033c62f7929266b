#include <cmath>
#include <random>
#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include "ssc/ssc.hpp"
#include "test_support.hpp"

using namespace ssc;
using namespace ssc::testing;

namespace {
constexpr double kTol = 1e-9;
}

TEST_CASE("gap instance construction") {
  const Instance g1 = gap_instance({1, 0.0});
  CHECK(g1.costs() == std::vector<double>{1, 1, 1});
  CHECK(g1.probs() == std::vector<double>{1.0, 0.0, 0.5});
  CHECK(g1.cuts() == std::vector<int>{0, 2, 4});

  const Instance g2 = gap_instance({2, 0.0});
  CHECK(g2.probs() == std::vector<double>{1.0, 1.0, 0.0, 0.0, 0.5});
  CHECK(g2.cuts() == std::vector<int>{0, 3, 6});

  const Instance g1e = gap_instance({1, 0.1});
  CHECK(g1e.probs()[0] == Catch::Approx(0.9).margin(1e-15));
  CHECK(g1e.probs()[1] == Catch::Approx(0.1).margin(1e-15));
  CHECK(g1e.probs()[2] == 0.5);
  CHECK(g1e.is_strict());

  CHECK_THROWS_AS(gap_instance({0, 0.0}), domain_error);
  CHECK_THROWS_AS(gap_instance({1, 0.5}), domain_error);
  CHECK_THROWS_AS(gap_instance({1, -0.1}), domain_error);
}

TEST_CASE("random instances are deterministic and valid") {
  const Instance a = random_instance(5, 3, 42);
  const Instance b = random_instance(5, 3, 42);
  CHECK(a.costs() == b.costs());
  CHECK(a.probs() == b.probs());
  CHECK(a.cuts() == b.cuts());
  CHECK(a.costs() != random_instance(5, 3, 43).costs());

  // B = n+1 forces the full ladder of cuts
  const Instance ladder = random_instance(4, 5, 7);
  CHECK(ladder.cuts() == std::vector<int>{0, 1, 2, 3, 4, 5});

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const int n = 1 + static_cast<int>(seed % 10);
    const int b_count = 1 + static_cast<int>(seed % (n + 1));
    const Instance inst = random_instance(n, b_count, seed);  // ctor revalidates
    CHECK(inst.num_tests() == n);
    CHECK(inst.num_classes() == b_count);
    for (double c : inst.costs()) {
      CHECK(c >= 1.0);
      CHECK(c <= 100.0);
      CHECK(c == std::floor(c));
    }
    for (double p : inst.probs()) {
      CHECK(p >= 0.01);
      CHECK(p <= 0.99);
    }
  }

  CHECK_THROWS_AS(random_instance(4, 6, 1), domain_error);
  CHECK_THROWS_AS(random_instance(4, 0, 1), domain_error);
  CHECK_THROWS_AS(random_instance(0, 1, 1), domain_error);
}

TEST_CASE("ratio study on the gap family") {
  std::vector<StudyInput> inputs;
  for (int m = 1; m <= 4; ++m)
    inputs.push_back(StudyInput{"gap" + std::to_string(m), "gap(m=" + std::to_string(m) + ")",
                                gap_instance({m, 0.0})});
  const std::vector<RatioRecord> records = ratio_study(inputs);
  REQUIRE(records.size() == 4);
  const double expected_ratio[] = {1.5, 5.0 / 3.0, 1.75, 1.8};
  for (int m = 1; m <= 4; ++m) {
    const RatioRecord& rec = records[static_cast<std::size_t>(m) - 1];
    REQUIRE(rec.ratio_2rr.has_value());
    CHECK(*rec.ratio_2rr ==
          Catch::Approx(expected_ratio[m - 1]).margin(kTol));
    CHECK(*rec.cost_2rr == Catch::Approx(2.0 * m + 1.0).margin(kTol));
    CHECK(*rec.cost_opt_adaptive == Catch::Approx(m + 1.0).margin(kTol));
    CHECK(*rec.cost_opt_nonadaptive == Catch::Approx(1.5 * m + 1.0).margin(kTol));
    REQUIRE(rec.adaptivity_ratio.has_value());
    CHECK(*rec.adaptivity_ratio ==
          Catch::Approx((1.5 * m + 1.0) / (m + 1.0)).margin(kTol));
    CHECK(rec.violation_flags.empty());
  }
}

TEST_CASE("ratio study degenerate and limit handling") {
  std::vector<StudyInput> inputs;
  inputs.push_back(StudyInput{"oneclass", "manual", Instance({2, 3}, {0.5, 0.5}, {0, 3})});
  inputs.push_back(StudyInput{"big", "seed=1", random_instance(11, 3, 1)});
  const std::vector<RatioRecord> records = ratio_study(inputs);
  REQUIRE(records.size() == 2);

  CHECK(records[0].cost_2rr == 0.0);
  CHECK(records[0].ratio_2rr == 1.0);
  CHECK(records[0].ratio_3rr == 1.0);
  CHECK(records[0].adaptivity_ratio == 1.0);

  // n = 11 exceeds the non-adaptive limit but not the adaptive one
  CHECK(records[1].cost_opt_adaptive.has_value());
  CHECK_FALSE(records[1].cost_opt_nonadaptive.has_value());
  CHECK(records[1].violation_flags == std::vector<std::string>{"limit:opt_nonadaptive"});
  CHECK(records[1].ratio_2rr.has_value());
}

TEST_CASE("ratio study finds no bound violations on random instances") {
  std::mt19937_64 rng(1234);
  std::vector<StudyInput> inputs;
  for (int i = 0; i < 200; ++i) {
    const int n = 2 + static_cast<int>(rng() % 8);
    const int b_count = 2 + static_cast<int>(rng() % n);
    const std::uint64_t seed = rng();
    inputs.push_back(StudyInput{"rnd" + std::to_string(i), "seed=" + std::to_string(seed),
                                random_instance(n, b_count, seed)});
  }
  StudySelection select;
  select.opt_nonadaptive = false;
  for (const RatioRecord& rec : ratio_study(inputs, select)) {
    CHECK(rec.violation_flags.empty());
    REQUIRE(rec.ratio_2rr.has_value());
    REQUIRE(rec.ratio_3rr.has_value());
    CHECK(*rec.ratio_2rr <= kTwoRRBound + kTol);
    CHECK(*rec.ratio_3rr <= kThreeRRBound + kTol);
  }
}

TEST_CASE("csv output follows the schema") {
  std::vector<StudyInput> inputs;
  inputs.push_back(StudyInput{"gap1", "gap(m=1)", gap_instance({1, 0.0})});
  std::ostringstream out;
  write_csv(out, ratio_study(inputs));
  std::istringstream in(out.str());
  std::string header, row;
  REQUIRE(std::getline(in, header));
  CHECK(header ==
        "instance_id,n,B,seed_or_family,cost_2rr,cost_3rr,cost_opt_adaptive,"
        "cost_opt_nonadaptive,ratio_2rr,ratio_3rr,adaptivity_ratio,violation_flags");
  REQUIRE(std::getline(in, row));
  CHECK(row == "gap1,3,2,gap(m=1),3,3,2,2.5,1.5,1.5,1.25,");
  CHECK_FALSE(std::getline(in, row));
}

TEST_CASE("lemma audit is clean on the sample and gap instances") {
  const AuditReport on_sample = lemma_audit({sample_instance()});
  CHECK(on_sample.instances_checked == 1);
  CHECK(on_sample.realizations == 16);
  CHECK(on_sample.total_violations() == 0);

  const AuditReport gap = lemma_audit({gap_instance({3, 0.0})});
  CHECK(gap.realizations == 128);
  CHECK(gap.total_violations() == 0);
}

TEST_CASE("lemma audit is clean on random instances") {
  std::mt19937_64 rng(555);
  std::vector<Instance> instances;
  for (int i = 0; i < 60; ++i) {
    const int n = 2 + static_cast<int>(rng() % 7);
    instances.push_back(random_instance(n, 2 + static_cast<int>(rng() % n), rng()));
  }
  const AuditReport report = lemma_audit(instances);
  CHECK(report.instances_checked == 60);
  CHECK(report.total_violations() == 0);
}

TEST_CASE("lemma audit skips oversized instances with a note") {
  AuditOptions options;
  options.max_enum = 4;
  const AuditReport report = lemma_audit({random_instance(6, 3, 9), sample_instance()}, options);
  CHECK(report.instances_checked == 1);
  CHECK(report.instances_skipped == 1);
  REQUIRE(report.notes.size() == 1);
  CHECK(report.notes[0].find("skipped") != std::string::npos);
}

TEST_CASE("lemma audit sampled mode") {
  AuditOptions options;
  options.mode = RealizationMode::sampled;
  options.samples_per_instance = 64;
  const AuditReport report = lemma_audit({random_instance(12, 4, 11)}, options);
  CHECK(report.instances_checked == 1);
  CHECK(report.realizations == 64);
  CHECK(report.total_violations() == 0);
}

TEST_CASE("optimal adaptive cost is continuous in the perturbation") {
  for (int m = 1; m <= 3; ++m) {
    const double exact = optimal_adaptive(gap_instance({m, 0.0})).value;
    const double coarse = optimal_adaptive(gap_instance({m, 1e-3})).value;
    const double fine = optimal_adaptive(gap_instance({m, 1e-6})).value;
    CHECK(std::abs(coarse - exact) < 0.05);
    CHECK(std::abs(fine - exact) < 1e-4);
    CHECK(std::abs(fine - exact) < std::abs(coarse - exact));
  }
}
