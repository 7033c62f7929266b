#include <catch2/catch_amalgamated.hpp>

#include "ssc/ssc.hpp"
#include "test_support.hpp"

using namespace ssc;
using namespace ssc::testing;

TEST_CASE("instance json parsing") {
  const Instance inst =
      parse_instance(R"({"costs":[3,4,5,6],"probs":[0.98,0.4,0.9,0.5],"cuts":[0,1,3,5]})");
  CHECK(inst.costs() == std::vector<double>{3, 4, 5, 6});
  CHECK(inst.probs() == std::vector<double>{0.98, 0.4, 0.9, 0.5});
  CHECK(inst.cuts() == std::vector<int>{0, 1, 3, 5});
}

TEST_CASE("instance json rejects malformed input") {
  CHECK_THROWS_AS(parse_instance("not json"), domain_error);
  CHECK_THROWS_AS(parse_instance("[1,2,3]"), domain_error);
  CHECK_THROWS_AS(parse_instance(R"({"costs":[1],"probs":[0.5]})"), domain_error);
  CHECK_THROWS_AS(
      parse_instance(R"({"costs":[1],"probs":[0.5],"cuts":[0,2],"extra":1})"),
      domain_error);
  CHECK_THROWS_AS(parse_instance(R"({"costs":[1],"probs":[0.5],"cuts":[0,1.5]})"),
                  domain_error);
  CHECK_THROWS_AS(parse_instance(R"({"costs":["1"],"probs":[0.5],"cuts":[0,2]})"),
                  domain_error);
  CHECK_THROWS_AS(parse_instance(R"({"costs":1,"probs":[0.5],"cuts":[0,2]})"),
                  domain_error);
  // structurally fine but semantically invalid
  CHECK_THROWS_AS(parse_instance(R"({"costs":[1],"probs":[0.5],"cuts":[0,3]})"),
                  domain_error);
}

TEST_CASE("instance json round-trips exactly") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const int n = 1 + static_cast<int>(seed % 10);
    const Instance inst = random_instance(n, 1 + static_cast<int>(seed % (n + 1)), seed);
    const Instance back = parse_instance(instance_to_json(inst).dump());
    CHECK(back.costs() == inst.costs());
    CHECK(back.probs() == inst.probs());
    CHECK(back.cuts() == inst.cuts());
  }
}

TEST_CASE("instance json emits the documented key order") {
  const std::string text = instance_to_json(gap_instance({1, 0.0})).dump();
  CHECK(text == R"({"costs":[1.0,1.0,1.0],"probs":[1.0,0.0,0.5],"cuts":[0,2,4]})");
}

TEST_CASE("decision tree json round-trips") {
  const DecisionTree tree = sample_optimal_tree();
  const auto j = tree_to_json(tree);
  CHECK(j["test"] == 2);
  const DecisionTree back = tree_from_json(j);
  CHECK(tree_to_json(back) == j);

  const Instance sample = sample_instance();
  for_each_realization(4, [&](const Realization& x) {
    CHECK(execute(sample, back, x).determined_class == execute(sample, tree, x).determined_class);
  });
}

TEST_CASE("decision tree json rejects malformed nodes") {
  CHECK_THROWS_AS(tree_from_json(nlohmann::json::parse(R"({"leaf":1,"test":2})")), domain_error);
  CHECK_THROWS_AS(tree_from_json(nlohmann::json::parse(R"({"test":1,"fail":{"leaf":1}})")),
                  domain_error);
  CHECK_THROWS_AS(tree_from_json(nlohmann::json::parse(R"(42)")), domain_error);
  CHECK_THROWS_AS(tree_from_json(nlohmann::json::parse(R"({"leaf":"x"})")), domain_error);
}

TEST_CASE("loading a missing instance file fails cleanly") {
  CHECK_THROWS_AS(load_instance_file("/nonexistent/instance.json"), domain_error);
}
