#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ssc/decision_tree.hpp"
#include "ssc/instance.hpp"

namespace ssc {

// Instance wire format: a single object with exactly the keys "costs",
// "probs" (arrays of numbers) and "cuts" (array of integers). Unknown keys
// are rejected.
inline nlohmann::ordered_json instance_to_json(const Instance& inst) {
  nlohmann::ordered_json j;
  j["costs"] = inst.costs();
  j["probs"] = inst.probs();
  j["cuts"] = inst.cuts();
  return j;
}

inline Instance instance_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw domain_error("instance json: expected an object");
  for (const auto& item : j.items())
    if (item.key() != "costs" && item.key() != "probs" && item.key() != "cuts")
      throw domain_error("instance json: unknown key \"" + item.key() + "\"");
  if (!j.contains("costs") || !j.contains("probs") || !j.contains("cuts"))
    throw domain_error("instance json: keys costs, probs, cuts are required");

  auto numbers = [](const nlohmann::json& arr, const char* name) {
    if (!arr.is_array()) throw domain_error(std::string("instance json: ") + name + " must be an array");
    std::vector<double> out;
    out.reserve(arr.size());
    for (const auto& v : arr) {
      if (!v.is_number()) throw domain_error(std::string("instance json: ") + name + " must hold numbers");
      out.push_back(v.get<double>());
    }
    return out;
  };
  auto integers = [](const nlohmann::json& arr, const char* name) {
    if (!arr.is_array()) throw domain_error(std::string("instance json: ") + name + " must be an array");
    std::vector<int> out;
    out.reserve(arr.size());
    for (const auto& v : arr) {
      if (!v.is_number_integer()) throw domain_error(std::string("instance json: ") + name + " must hold integers");
      out.push_back(v.get<int>());
    }
    return out;
  };

  return Instance(numbers(j["costs"], "costs"), numbers(j["probs"], "probs"),
                  integers(j["cuts"], "cuts"));
}

inline Instance parse_instance(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw domain_error(std::string("instance json: ") + e.what());
  }
  return instance_from_json(j);
}

inline Instance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw domain_error("cannot open instance file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

// Decision tree wire format: {"leaf": class} at leaves, otherwise
// {"test": id, "fail": <node>, "succ": <node>}.
inline nlohmann::ordered_json tree_to_json(const DecisionTree::Node* node) {
  if (node == nullptr) throw domain_error("tree json: missing node");
  nlohmann::ordered_json j;
  if (node->is_leaf()) {
    j["leaf"] = node->leaf_class;
    return j;
  }
  j["test"] = node->test;
  j["fail"] = tree_to_json(node->on_fail.get());
  j["succ"] = tree_to_json(node->on_succ.get());
  return j;
}

inline nlohmann::ordered_json tree_to_json(const DecisionTree& tree) {
  return tree_to_json(tree.root.get());
}

inline DecisionTree::NodePtr tree_node_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw domain_error("tree json: expected an object");
  if (j.contains("leaf")) {
    if (j.size() != 1 || !j["leaf"].is_number_integer())
      throw domain_error("tree json: leaf node must be {\"leaf\": class}");
    return DecisionTree::leaf(j["leaf"].get<int>());
  }
  if (j.size() != 3 || !j.contains("test") || !j.contains("fail") || !j.contains("succ") ||
      !j["test"].is_number_integer())
    throw domain_error("tree json: internal node must be {\"test\", \"fail\", \"succ\"}");
  return DecisionTree::internal(j["test"].get<int>(), tree_node_from_json(j["fail"]),
                                tree_node_from_json(j["succ"]));
}

inline DecisionTree tree_from_json(const nlohmann::json& j) {
  DecisionTree tree;
  tree.root = tree_node_from_json(j);
  return tree;
}

}  // namespace ssc
