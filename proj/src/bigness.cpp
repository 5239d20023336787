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

#include "bushy/bigness.hpp"

#include <algorithm>

#include "bushy/error.hpp"

namespace bushy {
namespace {

size_t required_children(const Rational& p) {
  uint64_t c = ceil_u64(p);
  return c == 0 ? 1 : static_cast<size_t>(c);
}

bool enough(size_t count, const Rational& p) { return count >= 1 && Rational(count) >= p; }

}  // namespace

std::map<Node, bool> big_labels(const NodeSet& s, const LevelFn& p, const Node& root,
                                const TreeIndex& ambient) {
  std::map<Node, bool> labels;
  NodeSet cone = cone_of(ambient.nodes(), root);
  // Reverse lexicographic order visits every child before its parent.
  for (auto it = cone.rbegin(); it != cone.rend(); ++it) {
    const Node& x = *it;
    bool big = s.count(x) != 0;
    if (!big) {
      size_t k = 0;
      for (const Node& c : ambient.children(x)) k += labels[c] ? 1 : 0;
      big = enough(k, p(x.size()));
    }
    labels[x] = big;
  }
  return labels;
}

bool is_big(const NodeSet& s, const LevelFn& p, const Node& root, const TreeIndex& ambient) {
  if (!ambient.contains(root)) fail(ErrorKind::kPrecondition, "root " + node_str(root) + " not in ambient");
  return big_labels(s, p, root, ambient).at(root);
}

NodeSet witness_nodes(const NodeSet& s, const LevelFn& p, const Node& root,
                      const TreeIndex& ambient, const std::map<Node, bool>& labels) {
  NodeSet out = path_to(root);
  std::vector<Node> stack{root};
  while (!stack.empty()) {
    Node x = stack.back();
    stack.pop_back();
    out.insert(x);
    if (s.count(x)) continue;
    size_t need = required_children(p(x.size()));
    for (const Node& c : ambient.children(x)) {
      if (need == 0) break;
      if (labels.at(c)) {
        stack.push_back(c);
        --need;
      }
    }
  }
  return out;
}

BigDecision decide_big(const NodeSet& s, const LevelFn& p, const Node& root,
                       const FiniteTree& ambient) {
  if (!ambient.contains(root)) fail(ErrorKind::kPrecondition, "root " + node_str(root) + " not in ambient");
  TreeIndex idx(ambient.nodes);
  auto labels = big_labels(s, p, root, idx);
  NodeSet targets;
  for (const Node& x : cone_of(s, root)) targets.insert(x);
  BigDecision d;
  d.big = labels.at(root);
  if (d.big) {
    BigWitness w;
    w.tree.nodes = witness_nodes(s, p, root, idx, labels);
    w.tree.bound = ambient.bound;
    w.tree.max_depth = ambient.max_depth;
    w.root = root;
    w.p = p;
    w.targets = targets;
    d.witness = std::move(w);
  } else {
    d.table = SmallTable{root, p, std::move(labels), targets};
  }
  return d;
}

std::optional<std::string> check_bushy_over(const NodeSet& tree, const LevelFn& p,
                                            const Node& root) {
  NodeSet scope = cone_of(tree, root);
  scope.insert(root);
  TreeIndex idx(tree);
  for (const Node& x : scope) {
    auto it = tree.upper_bound(x);
    bool leaf = it == tree.end() || !is_prefix(x, *it);
    if (leaf) continue;
    size_t k = idx.children(x).size();
    if (Rational(k) < p(x.size())) {
      return "node " + node_str(x) + " has " + std::to_string(k) + " children, needs " +
             to_string(p(x.size()));
    }
  }
  return std::nullopt;
}

std::optional<std::string> check_bushy_band(const NodeSet& tree, const LevelFn& p,
                                            size_t from, size_t to) {
  TreeIndex idx(tree);
  for (const Node& x : tree) {
    if (x.size() < from || x.size() > to) continue;
    size_t k = idx.children(x).size();
    if (k == 0) continue;
    if (Rational(k) < p(x.size())) {
      return "node " + node_str(x) + " has " + std::to_string(k) + " children, needs " +
             to_string(p(x.size()));
    }
  }
  return std::nullopt;
}

std::optional<std::string> check_witness(const BigWitness& w, const NodeSet* ambient) {
  const NodeSet& t = w.tree.nodes;
  if (!t.count(w.root)) return "root " + node_str(w.root) + " missing from witness tree";
  for (const Node& x : t) {
    if (!comparable(x, w.root)) return "node " + node_str(x) + " not comparable with root";
    if (!x.empty() && !t.count(parent_of(x))) return "node " + node_str(x) + " has no parent";
    if (ambient && !ambient->count(x)) return "node " + node_str(x) + " outside ambient";
  }
  if (auto v = check_bushy_over(t, w.p, w.root)) return v;
  for (const Node& l : leaves_of(t)) {
    if (!w.targets.count(l)) return "leaf " + node_str(l) + " not a target";
  }
  return std::nullopt;
}

std::optional<std::string> check_small_table(const SmallTable& t, const FiniteTree& ambient) {
  NodeSet cone = cone_of(ambient.nodes, t.root);
  if (cone.empty()) return "root " + node_str(t.root) + " not in ambient";
  TreeIndex idx(ambient.nodes);
  for (const Node& x : cone) {
    auto it = t.labels.find(x);
    if (it == t.labels.end()) return "node " + node_str(x) + " unlabelled";
    size_t k = 0;
    for (const Node& c : idx.children(x)) {
      auto ci = t.labels.find(c);
      if (ci == t.labels.end()) return "node " + node_str(c) + " unlabelled";
      k += ci->second ? 1 : 0;
    }
    bool expect = t.targets.count(x) != 0 || (k >= 1 && Rational(k) >= t.p(x.size()));
    if (expect != it->second) return "label of " + node_str(x) + " is not a fixed point";
  }
  for (const auto& [x, lab] : t.labels) {
    if (!cone.count(x)) return "label for " + node_str(x) + " outside the cone";
  }
  if (t.labels.at(t.root)) return "root labelled big";
  return std::nullopt;
}

SplitResult split_big(const NodeSet& b, const NodeSet& c, const LevelFn& p, const LevelFn& q,
                      const Node& root, const BigWitness& witness) {
  NodeSet bc = b;
  bc.insert(c.begin(), c.end());
  BigWitness pre = witness;
  pre.p = p + q;
  pre.targets = bc;
  if (pre.root != root) fail(ErrorKind::kPrecondition, "witness root differs from split root");
  if (auto v = check_witness(pre, nullptr)) {
    fail(ErrorKind::kPrecondition, "witness for B u C fails: " + *v);
  }
  for (const Node& x : witness.tree.nodes) {
    if (p(x.size()) < 0 || q(x.size()) < 0) {
      fail(ErrorKind::kPrecondition, "p and q must be nonnegative on the witness levels");
    }
  }
  TreeIndex idx(witness.tree.nodes);
  auto labels = big_labels(b, p, root, idx);
  SplitResult out;
  out.witness.tree.bound = witness.tree.bound;
  out.witness.tree.max_depth = witness.tree.max_depth;
  out.witness.root = root;
  if (labels.at(root)) {
    out.side = Side::kLeft;
    out.witness.p = p;
    out.witness.tree.nodes = witness_nodes(b, p, root, idx, labels);
    out.witness.targets = b;
  } else {
    // Nodes of the witness where B is p-small, reachable from root.
    out.side = Side::kRight;
    out.witness.p = q;
    NodeSet keep = path_to(root);
    std::vector<Node> stack{root};
    while (!stack.empty()) {
      Node x = stack.back();
      stack.pop_back();
      keep.insert(x);
      for (const Node& ch : idx.children(x)) {
        if (!labels.at(ch)) stack.push_back(ch);
      }
    }
    out.witness.tree.nodes = std::move(keep);
    out.witness.targets = c;
  }
  out.witness.targets = cone_of(out.witness.targets, root);
  if (auto v = check_witness(out.witness, &witness.tree.nodes)) {
    fail(ErrorKind::kInternal, "split certificate fails: " + *v);
  }
  return out;
}

MarkovSelection markov_select(const std::vector<Rational>& f, const Rational& lambda,
                              const Rational& lambda_hat) {
  if (f.empty()) fail(ErrorKind::kPrecondition, "empty set");
  if (lambda_hat <= 0) fail(ErrorKind::kPrecondition, "lambda_hat must be positive");
  MarkovSelection m;
  m.mean = 0;
  for (const Rational& v : f) {
    if (v < 0) fail(ErrorKind::kPrecondition, "negative function value");
    m.mean += v;
  }
  m.mean /= Rational(f.size());
  if (m.mean >= lambda) {
    fail(ErrorKind::kPrecondition, "mean " + to_string(m.mean) + " is not below lambda " + to_string(lambda));
  }
  for (size_t i = 0; i < f.size(); ++i) {
    if (f[i] < lambda_hat) m.selected.push_back(i);
  }
  m.ratio = Rational(m.selected.size()) / Rational(f.size());
  m.bound = 1 - lambda / lambda_hat;
  if (!(m.ratio > m.bound)) fail(ErrorKind::kInternal, "selection ratio below the Markov bound");
  return m;
}

}  // namespace bushy
