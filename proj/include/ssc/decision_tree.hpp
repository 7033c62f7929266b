#pragma once

#include <memory>
#include <utility>

namespace ssc {

// An adaptive strategy: internal nodes name the next test to conduct with a
// child per outcome, leaves carry the determined class label.
struct DecisionTree {
  struct Node;
  using NodePtr = std::unique_ptr<Node>;

  struct Node {
    int test = 0;       // 1-based test id; 0 marks a leaf
    int leaf_class = 0; // class label, valid at leaves
    NodePtr on_fail;
    NodePtr on_succ;

    bool is_leaf() const { return test == 0; }
  };

  NodePtr root;

  static NodePtr leaf(int cls) {
    auto node = std::make_unique<Node>();
    node->leaf_class = cls;
    return node;
  }

  static NodePtr internal(int test, NodePtr fail_child, NodePtr succ_child) {
    auto node = std::make_unique<Node>();
    node->test = test;
    node->on_fail = std::move(fail_child);
    node->on_succ = std::move(succ_child);
    return node;
  }
};

}  // namespace ssc
