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

#include "bushy/thinning.hpp"

#include <algorithm>
#include <map>

#include "bushy/error.hpp"

namespace bushy {

std::optional<std::string> check_exact_bushy(const NodeSet& tree, const LevelFn& p, size_t from,
                                             size_t to) {
  TreeIndex idx(tree);
  for (const Node& x : tree) {
    if (x.size() < from || x.size() > to) continue;
    size_t k = idx.children(x).size();
    if (k == 0) continue;
    if (mpz_class(k) != ceil_of(p(x.size()))) {
      return "node " + node_str(x) + " has " + std::to_string(k) + " children, expected " +
             ceil_of(p(x.size())).get_str();
    }
  }
  return std::nullopt;
}

ThinResult exact_thin(const FiniteTree& t, const Node& root, const LevelFn& p, const NodeSet& s,
                      const Rational& lambda, const LevelFn& eps) {
  if (!t.contains(root)) fail(ErrorKind::kPrecondition, "root " + node_str(root) + " not in tree");
  NodeSet cone = cone_of(t.nodes, root);
  std::vector<Node> leaves = leaves_of(cone);
  size_t depth = leaves.front().size();
  for (const Node& l : leaves) {
    if (l.size() != depth) fail(ErrorKind::kPrecondition, "leaves lie on different levels");
  }
  size_t base = root.size();
  if (depth > base) {
    if (auto v = check_exact_bushy(cone, p, base, depth - 1)) {
      fail(ErrorKind::kPrecondition, "tree is not exactly p-bushy: " + *v);
    }
  }
  NodeSet leafset(leaves.begin(), leaves.end());
  NodeSet s_cone = cone_of(s, root);
  size_t hits = 0;
  for (const Node& x : s_cone) {
    if (!leafset.count(x)) fail(ErrorKind::kPrecondition, "S member " + node_str(x) + " is not a leaf");
    ++hits;
  }
  Rational ratio = Rational(hits) / Rational(leaves.size());
  if (!(ratio > lambda)) {
    fail(ErrorKind::kPrecondition, "|S|/|leaves| = " + to_string(ratio) + " is not above lambda");
  }
  Rational budget = 0;
  for (size_t l = base; l < depth; ++l) {
    if (eps(l) <= 0) fail(ErrorKind::kPrecondition, "eps must be positive");
    budget += eps(l);
  }
  if (!(lambda > budget)) fail(ErrorKind::kPrecondition, "lambda does not exceed the eps sum");

  TreeIndex idx(cone);
  std::map<Node, std::pair<size_t, size_t>> frac;  // surviving, total leaves
  for (auto it = cone.rbegin(); it != cone.rend(); ++it) {
    const auto& ch = idx.children(*it);
    if (ch.empty()) {
      frac[*it] = {s_cone.count(*it), 1};
      continue;
    }
    size_t a = 0, b = 0;
    for (const Node& c : ch) {
      a += frac[c].first;
      b += frac[c].second;
    }
    frac[*it] = {a, b};
  }

  ThinResult r;
  r.p_hat = p * eps;
  r.tree.bound = t.bound;
  r.tree.max_depth = t.max_depth;
  r.tree.nodes = path_to(root);
  std::vector<std::pair<Node, Rational>> stack{{root, lambda}};
  while (!stack.empty()) {
    auto [x, lam] = stack.back();
    stack.pop_back();
    r.tree.nodes.insert(x);
    const auto& ch = idx.children(x);
    if (ch.empty()) continue;
    ThinStep st;
    st.node = x;
    st.children = ch.size();
    st.lambda = lam;
    st.eps = eps(x.size());
    st.threshold = 1 - (1 - lam) / (1 - st.eps);
    for (const Node& c : ch) {
      Rational f = Rational(frac[c].first) / Rational(frac[c].second);
      if (f > st.threshold) {
        ++st.kept;
        stack.push_back({c, lam - st.eps});
      }
    }
    if (!(Rational(st.kept) > st.eps * Rational(st.children))) {
      fail(ErrorKind::kInternal, "kept-children bound fails at " + node_str(x));
    }
    r.steps.push_back(st);
  }
  std::sort(r.steps.begin(), r.steps.end(),
            [](const ThinStep& a, const ThinStep& b) { return a.node < b.node; });
  for (const Node& l : leaves_of(r.tree.nodes)) {
    if (!s.count(l)) fail(ErrorKind::kInternal, "thinned leaf " + node_str(l) + " outside S");
  }
  if (auto v = check_bushy_over(r.tree.nodes, r.p_hat, root)) {
    fail(ErrorKind::kInternal, "thinned tree not p*eps-bushy: " + *v);
  }
  return r;
}

namespace {

NodeSet minus(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

}  // namespace

PruneResult avoid_prune(const FiniteTree& ambient, const FiniteTree& t, const Node& stem,
                        const NodeSet& s, const LevelFn& p, const LevelFn& q, const LevelFn& q1) {
  if (!t.contains(stem)) fail(ErrorKind::kPrecondition, "stem not in T");
  for (const Node& x : t.nodes) {
    if (!ambient.contains(x)) fail(ErrorKind::kPrecondition, "T is not inside the ambient tree");
  }
  for (const Node& x : s) {
    if (!ambient.contains(x)) fail(ErrorKind::kPrecondition, "S is not inside the ambient tree");
  }
  size_t top = ambient.max_depth == 0 ? 0 : ambient.max_depth - 1;
  if (!pointwise_less(q + q1, p, stem.size(), top)) {
    fail(ErrorKind::kPrecondition, "p > q + q' fails on some level");
  }
  if (auto v = check_bushy_over(t.nodes, p, stem)) fail(ErrorKind::kPrecondition, "T not p-bushy: " + *v);
  TreeIndex amb(ambient.nodes);
  NodeSet core = cone_of(t.nodes, stem);
  auto outside = big_labels(minus(ambient.nodes, t.nodes), q, stem, amb);
  for (const Node& x : core) {
    if (outside.at(x)) {
      fail(ErrorKind::kPrecondition, "ambient minus T is q-big over " + node_str(x));
    }
  }
  NodeSet up;
  for (const Node& x : cone_of(ambient.nodes, stem)) {
    for (size_t k = 0; k <= x.size(); ++k) {
      if (s.count(Node(x.begin(), x.begin() + k))) {
        up.insert(x);
        break;
      }
    }
  }
  auto lab = big_labels(up, q1, stem, amb);
  if (lab.at(stem)) fail(ErrorKind::kPrecondition, "upward closure of S is q'-big over the stem");

  PruneResult r;
  r.tree.bound = t.bound;
  r.tree.max_depth = t.max_depth;
  r.tree.nodes = path_to(stem);
  TreeIndex tidx(t.nodes);
  std::vector<Node> stack{stem};
  while (!stack.empty()) {
    Node x = stack.back();
    stack.pop_back();
    r.tree.nodes.insert(x);
    for (const Node& c : tidx.children(x)) {
      if (!lab.at(c)) stack.push_back(c);
    }
  }

  NodeSet pruned = cone_of(r.tree.nodes, stem);
  for (const Node& x : pruned) {
    if (up.count(x)) fail(ErrorKind::kInternal, "pruned tree meets the closure of S at " + node_str(x));
  }
  for (const Node& l : leaves_of(pruned)) {
    if (!tidx.children(l).empty()) fail(ErrorKind::kInternal, "pruning created leaf " + node_str(l));
  }
  if (auto v = check_bushy_over(r.tree.nodes, p - q - q1, stem)) {
    fail(ErrorKind::kInternal, "pruned tree not (p-q-q')-bushy: " + *v);
  }
  BigDecision d = decide_big(minus(ambient.nodes, r.tree.nodes), q + q1, stem, ambient);
  if (d.big) fail(ErrorKind::kInternal, "ambient minus T' is (q+q')-big over the stem");
  for (const Node& x : pruned) {
    if (d.table->labels.at(x)) {
      fail(ErrorKind::kInternal, "ambient minus T' is (q+q')-big over " + node_str(x));
    }
  }
  r.outside_small = std::move(*d.table);
  return r;
}

PruneResult force_divergence(const FiniteTree& ambient, const FiniteTree& t, const Node& stem,
                             const ValueFunctional& psi, size_t n, const LevelFn& p,
                             const LevelFn& q, const LevelFn& q2) {
  NodeSet conv;
  for (const Node& x : ambient.nodes) {
    if (psi.restrict_to(x, n)) conv.insert(x);
  }
  TreeIndex amb(ambient.nodes);
  if (!ambient.contains(stem)) fail(ErrorKind::kPrecondition, "stem not in ambient");
  if (is_big(conv, q2, stem, amb)) {
    fail(ErrorKind::kPrecondition, "convergence set is q''-big over the stem");
  }
  PruneResult r = avoid_prune(ambient, t, stem, conv, p, q, q2);
  for (const Node& x : cone_of(r.tree.nodes, stem)) {
    if (psi.restrict_to(x, n)) fail(ErrorKind::kInternal, "node " + node_str(x) + " still converges");
  }
  return r;
}

StagingResult stage_totality(const FiniteTree& ambient, const Node& stem,
                             const ValueFunctional& psi, const LevelFn& p_hat, size_t m,
                             const Expulsion& expulsion) {
  if (!ambient.contains(stem)) fail(ErrorKind::kPrecondition, "stem not in ambient");
  TreeIndex amb(ambient.nodes);
  uint32_t horizon = psi.max_stage();
  for (const auto& [x, st] : expulsion.stages()) horizon = std::max(horizon, st);

  auto converging = [&](size_t value, uint32_t time) {
    NodeSet out;
    for (const Node& x : ambient.nodes) {
      if (psi.defined_at(x, value, time)) out.insert(x);
    }
    return out;
  };

  StagingResult r;
  r.tree.bound = ambient.bound;
  r.tree.max_depth = ambient.max_depth;
  r.tree.nodes = path_to(stem);
  NodeSet skipped_all;
  std::vector<Node> frontier{stem};
  for (size_t value = 0; value <= m; ++value) {
    Stage st;
    st.frontier = frontier;
    std::optional<uint32_t> chosen;
    NodeSet conv;
    for (uint32_t time = 0; time <= horizon && !chosen; ++time) {
      conv = converging(value, time);
      bool ok = true;
      for (const Node& x : frontier) {
        if (expulsion.present(x, time) && !is_big(conv, p_hat, x, amb)) {
          ok = false;
          break;
        }
      }
      if (ok) chosen = time;
    }
    if (!chosen) {
      for (const Node& x : frontier) {
        if (expulsion.present(x, horizon) && !is_big(conv, p_hat, x, amb)) {
          fail(ErrorKind::kPrecondition, "convergence set for value " + std::to_string(value) +
                                             " is not p_hat-big over " + node_str(x));
        }
      }
      fail(ErrorKind::kInternal, "staging found no time");
    }
    st.time = *chosen;
    std::vector<Node> next;
    for (const Node& x : frontier) {
      if (!expulsion.present(x, st.time)) {
        st.skipped.push_back(x);
        skipped_all.insert(x);
        continue;
      }
      st.attached.push_back(x);
      auto labels = big_labels(conv, p_hat, x, amb);
      NodeSet w = witness_nodes(conv, p_hat, x, amb, labels);
      for (const Node& y : cone_of(w, x)) r.tree.nodes.insert(y);
      for (const Node& l : leaves_of(cone_of(w, x))) next.push_back(l);
    }
    std::sort(next.begin(), next.end());
    frontier = next;
    r.stages.push_back(std::move(st));
  }

  if (auto v = check_bushy_over(r.tree.nodes, p_hat, stem)) {
    fail(ErrorKind::kInternal, "staged tree not p_hat-bushy: " + *v);
  }
  for (const Node& l : leaves_of(r.tree.nodes)) {
    if (skipped_all.count(l)) continue;
    if (!psi.defined_at(l, m)) fail(ErrorKind::kInternal, "leaf " + node_str(l) + " misses a value");
  }
  return r;
}

}  // namespace bushy
