// Copyright 2026 The Bushy Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BUSHY_BIGNESS_HPP_
#define BUSHY_BIGNESS_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bushy/trees.hpp"

namespace bushy {

// A p-bushy tree over root whose leaves lie in targets. The tree also holds
// the path from the empty node up to root.
struct BigWitness {
  FiniteTree tree;
  Node root;
  LevelFn p;
  NodeSet targets;
};

// Big/small labels over the ambient cone above root.
struct SmallTable {
  Node root;
  LevelFn p;
  std::map<Node, bool> labels;
  NodeSet targets;
};

struct BigDecision {
  bool big = false;
  std::optional<BigWitness> witness;
  std::optional<SmallTable> table;
};

// Labels every ambient node in the cone above root. A node is big when it is
// a target, or it has at least one and at least p(|node|) big children.
std::map<Node, bool> big_labels(const NodeSet& s, const LevelFn& p, const Node& root,
                                const TreeIndex& ambient);

bool is_big(const NodeSet& s, const LevelFn& p, const Node& root, const TreeIndex& ambient);

BigDecision decide_big(const NodeSet& s, const LevelFn& p, const Node& root,
                       const FiniteTree& ambient);

// Witness tree for a node labelled big: stops at targets and keeps the
// lexicographically least qualifying children elsewhere.
NodeSet witness_nodes(const NodeSet& s, const LevelFn& p, const Node& root,
                      const TreeIndex& ambient, const std::map<Node, bool>& labels);

// Definitional checks. Each returns a description of the first violation.
std::optional<std::string> check_bushy_over(const NodeSet& tree, const LevelFn& p,
                                            const Node& root);
std::optional<std::string> check_bushy_band(const NodeSet& tree, const LevelFn& p,
                                            size_t from, size_t to);
std::optional<std::string> check_witness(const BigWitness& w, const NodeSet* ambient);
std::optional<std::string> check_small_table(const SmallTable& t, const FiniteTree& ambient);

enum class Side { kLeft, kRight };

struct SplitResult {
  Side side;
  BigWitness witness;
};

SplitResult split_big(const NodeSet& b, const NodeSet& c, const LevelFn& p, const LevelFn& q,
                      const Node& root, const BigWitness& witness);

struct MarkovSelection {
  std::vector<size_t> selected;  // indices x with f(x) < lambda_hat
  Rational mean;
  Rational ratio;  // |selected| / |S|
  Rational bound;  // 1 - lambda / lambda_hat
};

MarkovSelection markov_select(const std::vector<Rational>& f, const Rational& lambda,
                              const Rational& lambda_hat);

}  // namespace bushy

#endif  // BUSHY_BIGNESS_HPP_
