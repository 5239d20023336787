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

#include <algorithm>

#include "bushy/error.hpp"
#include "bushy/schnorr.hpp"

namespace bushy {

namespace {

size_t depth_of(const NodeSet& s) {
  size_t d = 0;
  for (const Node& x : s) d = std::max(d, x.size());
  return d;
}

FiniteTree truncate(const FiniteTree& t, const NodeSet& nodes, size_t level) {
  FiniteTree out{{}, t.bound, t.max_depth};
  for (const Node& x : nodes) {
    if (x.size() <= level) out.nodes.insert(x);
  }
  return out;
}

NodeSet core_nodes(const FiniteTree& ambient, const Expulsion& core) {
  return core.bounded() ? core.core() : ambient.nodes;
}

// Least stage at which x is out of T[t], if any.
std::optional<uint32_t> expelled_at(const Expulsion& core, const Node& x) {
  if (!core.bounded() || core.core().count(x)) return std::nullopt;
  auto it = core.stages().find(x);
  return it == core.stages().end() ? 0 : it->second;
}

}  // namespace

CoveringResult build_covering_test(const FiniteTree& ambient, const Expulsion& core,
                                   const ValueFunctional& psi, const Node& eta, const LevelFn& p,
                                   const LevelFn& p_hat, const LevelFn& q, unsigned rounds) {
  if (!ambient.contains(eta)) fail(ErrorKind::kPrecondition, "eta not in ambient");
  CoveringResult out;
  out.t_hat.bound = ambient.bound;
  out.t_hat.max_depth = ambient.max_depth;
  out.t_hat.nodes = path_to(eta);
  if (rounds == 0) return out;

  size_t top = depth_of(cone_of(ambient.nodes, eta));
  if (top < eta.size() + rounds) {
    fail(ErrorKind::kInconclusive, "ambient depth " + std::to_string(top) + " too shallow for " +
                                       std::to_string(rounds) + " rounds");
  }
  NodeSet core_all = core_nodes(ambient, core);
  std::vector<Node> frontier{eta};
  for (unsigned n = 0; n < rounds; ++n) {
    CoveringRound round;
    round.index = n;
    round.level = eta.size() + ((n + 1) * (top - eta.size())) / rounds;
    round.frontier = frontier;
    round.budget = pow2_neg(n) / Rational(static_cast<long>(frontier.size()));
    if (round.budget >= 1) round.budget = Rational(1, 2);
    FiniteTree amb = truncate(ambient, ambient.nodes, round.level);
    FiniteTree cor = truncate(ambient, core_all, round.level);

    std::vector<std::pair<Node, Error>> failed;
    std::vector<Node> next;
    std::set<Bits> v;
    for (const Node& x : frontier) {
      try {
        CaptureResult c = capture_small_measure(amb, cor, psi, x, round.budget, p, q, p_hat);
        v.insert(c.v_star.strings().begin(), c.v_star.strings().end());
        out.t_hat.nodes.insert(c.t_hat.nodes.begin(), c.t_hat.nodes.end());
        for (const Node& l : leaves_of(cone_of(c.t_hat.nodes, x))) next.push_back(l);
        round.captures.push_back(std::move(c));
      } catch (const Error& e) {
        failed.emplace_back(x, e);
      }
    }
    for (const auto& [x, e] : failed) {
      auto when = expelled_at(core, x);
      if (!when) {
        fail(e.kind(), "round " + std::to_string(n) + ", node " + node_str(x) + ": " + e.what());
      }
      round.time = std::max(round.time, *when);
      round.skipped.push_back(x);
    }
    if (next.empty()) fail(ErrorKind::kPrecondition, "round " + std::to_string(n) + " leaves no frontier");
    out.test.levels.push_back(CylinderSet(v));
    frontier = std::move(next);
    out.rounds.push_back(std::move(round));
  }
  return out;
}

std::optional<std::string> check_covering(const CoveringResult& r, const FiniteTree& ambient,
                                          const ValueFunctional& psi, const Node& eta,
                                          const LevelFn& p_hat) {
  if (auto n = schnorr_violation(r.test)) return "level " + std::to_string(*n) + " exceeds 2^-n";
  if (r.test.levels.size() != r.rounds.size()) return "test and rounds disagree in length";
  for (const Node& x : r.t_hat.nodes) {
    if (!ambient.contains(x)) return "node " + node_str(x) + " outside the ambient";
    if (!x.empty() && !r.t_hat.contains(parent_of(x))) return "tree not prefix-closed at " + node_str(x);
  }
  if (!r.t_hat.contains(eta)) return "tree misses eta";
  if (r.rounds.empty()) {
    return r.t_hat.nodes == path_to(eta) ? std::nullopt : std::optional<std::string>("no rounds but a bushy part");
  }
  if (auto e = check_bushy_over(r.t_hat.nodes, p_hat, eta)) return "tree not p_hat-bushy: " + *e;
  size_t last = r.rounds.back().level;
  for (const Node& x : leaves_of(cone_of(r.t_hat.nodes, eta))) {
    if (x.size() != last) continue;
    Bits out = psi.output(x);
    for (size_t n = 0; n < r.test.levels.size(); ++n) {
      if (!r.test.levels[n].covers(out)) {
        return "leaf " + node_str(x) + " escapes V_" + std::to_string(n);
      }
    }
  }
  return std::nullopt;
}

namespace {

NodeSet convergence_set(const ValueFunctional& psi, const FiniteTree& ambient, size_t m) {
  NodeSet out;
  for (const Node& x : ambient.nodes) {
    if (psi.defined_at(x, m)) out.insert(x);
  }
  return out;
}

// T_hat for (xi, m): core nodes above xi, reachable through such nodes, over
// which the convergence set is not big.
NodeSet small_part(const NodeSet& conv, const NodeSet& core, const Node& xi, const LevelFn& p_hat,
                   const TreeIndex& idx) {
  auto labels = big_labels(conv, p_hat, xi, idx);
  NodeSet out = path_to(xi);
  std::vector<Node> stack{xi};
  while (!stack.empty()) {
    Node x = stack.back();
    stack.pop_back();
    for (const Node& c : idx.children(x)) {
      if (core.count(c) && !labels.at(c)) {
        out.insert(c);
        stack.push_back(c);
      }
    }
  }
  return out;
}

SmallTable rest_table(const FiniteTree& ambient, const NodeSet& t_hat, const Node& xi,
                      const LevelFn& bound, const TreeIndex& idx) {
  NodeSet rest;
  for (const Node& x : cone_of(ambient.nodes, xi)) {
    if (!t_hat.count(x)) rest.insert(x);
  }
  SmallTable t;
  t.root = xi;
  t.p = bound;
  t.targets = rest;
  t.labels = big_labels(rest, bound, xi, idx);
  return t;
}

}  // namespace

Classification classify_condition(const ConditionSpec& cond, const ValueFunctional& psi,
                                  const LevelFn& p_hat) {
  const FiniteTree& ambient = cond.ambient;
  if (!ambient.contains(cond.eta)) fail(ErrorKind::kPrecondition, "eta not in ambient");
  if (auto e = psi.validate()) fail(ErrorKind::kInvalidInput, "functional: " + *e);
  for (size_t l = 0; l < cond.eps.table().size(); ++l) {
    Rational lhs = cond.p(l) * pow(cond.eps(l), cond.split_k);
    if (!(lhs > cond.q(l) && cond.q(l) >= 1)) {
      fail(ErrorKind::kPrecondition, "allow-split fails at level " + std::to_string(l));
    }
  }
  NodeSet core = core_nodes(ambient, cond.core);
  if (!core.count(cond.eta)) fail(ErrorKind::kPrecondition, "eta not in the core");

  size_t d_min = SIZE_MAX;
  for (const Node& x : leaves_of(cone_of(ambient.nodes, cond.eta))) {
    d_min = std::min(d_min, psi.output(x).size());
  }
  size_t depth = std::max<size_t>(d_min, 1);

  std::vector<Node> order;
  for (const Node& x : cone_of(core, cond.eta)) order.push_back(x);
  std::stable_sort(order.begin(), order.end(),
                   [](const Node& a, const Node& b) { return a.size() < b.size(); });

  TreeIndex idx(ambient.nodes);
  LevelFn rest_bound = p_hat + cond.q;
  size_t uncertified = 0;
  for (size_t m = 0; m < depth; ++m) {
    NodeSet conv = convergence_set(psi, ambient, m);
    for (const Node& xi : order) {
      BigDecision d = decide_big(conv, p_hat, xi, ambient);
      if (d.big) continue;
      ConditionCase1 c;
      c.xi = xi;
      c.m = m;
      c.t_hat = FiniteTree{small_part(conv, core, xi, p_hat, idx), ambient.bound, ambient.max_depth};
      c.conv_small = *d.table;
      c.rest_small = rest_table(ambient, c.t_hat.nodes, xi, rest_bound, idx);
      if (check_case1(c, cond, psi, p_hat)) {
        ++uncertified;
        continue;
      }
      return c;
    }
  }
  if (uncertified > 0) {
    fail(ErrorKind::kInconclusive, std::to_string(uncertified) +
                                       " non-big convergence sets found but none with a verifying certificate");
  }
  try {
    ConditionCase2 c;
    c.depth = depth;
    c.staging = stage_totality(ambient, cond.eta, psi, p_hat, depth - 1, cond.core);
    return c;
  } catch (const Error& e) {
    fail(ErrorKind::kInconclusive, std::string("totality staging at depth ") + std::to_string(depth) +
                                       " fails: " + e.what());
  }
}

std::optional<std::string> check_case1(const ConditionCase1& c, const ConditionSpec& cond,
                                       const ValueFunctional& psi, const LevelFn& p_hat) {
  const FiniteTree& ambient = cond.ambient;
  NodeSet core = core_nodes(ambient, cond.core);
  if (!core.count(c.xi) || !is_prefix(cond.eta, c.xi)) return "xi is not a core node above eta";
  NodeSet conv = convergence_set(psi, ambient, c.m);
  const SmallTable& cs = c.conv_small;
  if (cs.root != c.xi || !(cs.p == p_hat) || cs.targets != cone_of(conv, c.xi)) return "convergence table has the wrong data";
  if (auto e = check_small_table(cs, ambient)) return "convergence table: " + *e;

  TreeIndex idx(ambient.nodes);
  if (c.t_hat.nodes != small_part(conv, core, c.xi, p_hat, idx)) return "T_hat differs from its definition";
  const SmallTable& rs = c.rest_small;
  NodeSet rest;
  for (const Node& x : cone_of(ambient.nodes, c.xi)) {
    if (!c.t_hat.contains(x)) rest.insert(x);
  }
  if (rs.root != c.xi || !(rs.p == p_hat + cond.q) || rs.targets != rest) return "rest table has the wrong data";
  if (auto e = check_small_table(rs, ambient)) return "rest table: " + *e;
  for (const Node& x : cone_of(c.t_hat.nodes, c.xi)) {
    if (rs.labels.at(x)) return "ambient minus T_hat is big over " + node_str(x);
  }
  return std::nullopt;
}

}  // namespace bushy
