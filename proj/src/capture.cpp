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
#include <map>
#include <set>
#include <string>
#include <vector>

#include "bushy/error.hpp"
#include "bushy/splitcalc.hpp"

namespace bushy {

unsigned capture_k(const Rational& lambda) {
  if (!(lambda > 0 && lambda < 1)) fail(ErrorKind::kInvalidInput, "lambda must lie in (0,1)");
  Rational miss = 1 - lambda;
  Rational acc = miss;
  unsigned k = 1;
  while (!(acc < lambda)) {
    acc *= miss;
    ++k;
  }
  return k;
}

namespace {

constexpr size_t kExhaustiveImages = 12;
constexpr size_t kMaxShapeNodes = 8;
constexpr size_t kMaxCombinations = 4096;

uint32_t bits_value(const Bits& b) {
  uint32_t v = 0;
  for (char c : b) v = v << 1 | (c == '1' ? 1u : 0u);
  return v;
}

struct Level {
  std::vector<Node> nodes;  // core nodes at level t inside the cone
  std::vector<Bits> out;    // their visible outputs
};

bool try_direct(const Level& lv, unsigned n_bits, const Rational& lambda, const LevelFn& p_hat,
                const Node& rho, const FiniteTree& ambient, CaptureResult& r) {
  std::map<Bits, std::vector<size_t>> by_image;
  for (size_t i = 0; i < lv.nodes.size(); ++i) by_image[lv.out[i].substr(0, n_bits)].push_back(i);
  Rational unit = pow2_neg(n_bits);
  auto attempt = [&](const std::set<Bits>& v) {
    if (!(unit * Rational(v.size()) < lambda)) return false;
    NodeSet s;
    for (const Bits& b : v) {
      for (size_t i : by_image[b]) s.insert(lv.nodes[i]);
    }
    BigDecision d = decide_big(s, p_hat, rho, ambient);
    if (!d.big) return false;
    r.v_star = CylinderSet(v);
    r.t_hat = d.witness->tree;
    r.n_bits = n_bits;
    r.direct = true;
    return true;
  };

  // The images met by the canonical witness for all of level t.
  NodeSet all(lv.nodes.begin(), lv.nodes.end());
  BigDecision full = decide_big(all, p_hat, rho, ambient);
  if (!full.big) {
    fail(ErrorKind::kPrecondition, "core nodes at level t are not p_hat-big over " + node_str(rho));
  }
  std::set<Bits> met;
  for (const Node& x : leaves_of(full.witness->tree.nodes)) {
    auto it = std::find(lv.nodes.begin(), lv.nodes.end(), x);
    if (it != lv.nodes.end()) met.insert(lv.out[it - lv.nodes.begin()].substr(0, n_bits));
  }
  if (attempt(met)) return true;

  std::vector<Bits> images;
  for (const auto& [b, idx] : by_image) images.push_back(b);
  if (images.size() <= kExhaustiveImages) {
    size_t m = images.size();
    for (size_t size = 1; size <= m; ++size) {
      if (!(unit * Rational(size) < lambda)) break;
      std::vector<bool> pick(m, false);
      std::fill(pick.begin(), pick.begin() + size, true);
      do {
        std::set<Bits> v;
        for (size_t i = 0; i < m; ++i) {
          if (pick[i]) v.insert(images[i]);
        }
        if (attempt(v)) return true;
      } while (std::prev_permutation(pick.begin(), pick.end()));
    }
    return false;
  }
  std::stable_sort(images.begin(), images.end(), [&](const Bits& a, const Bits& b) {
    return by_image[a].size() > by_image[b].size();
  });
  std::set<Bits> v;
  for (const Bits& b : images) {
    v.insert(b);
    if (!(unit * Rational(v.size()) < lambda)) break;
    if (attempt(v)) return true;
  }
  return false;
}

}  // namespace

CaptureResult capture_small_measure(const FiniteTree& ambient, const FiniteTree& core,
                                    const ValueFunctional& psi, const Node& rho,
                                    const Rational& lambda, const LevelFn& p, const LevelFn& q,
                                    const LevelFn& p_hat, const CaptureOptions& opt) {
  if (!ambient.contains(rho)) fail(ErrorKind::kPrecondition, "rho " + node_str(rho) + " not in ambient");
  CaptureResult r;
  r.k = capture_k(lambda);

  NodeSet cone = cone_of(ambient.nodes, rho);
  std::vector<Node> leaves = leaves_of(cone);
  size_t t = leaves.front().size();
  for (const Node& x : leaves) {
    if (x.size() != t) fail(ErrorKind::kPrecondition, "leaves above rho lie on different levels");
  }
  r.level_t = t;
  if (t > rho.size()) {
    for (size_t lv = rho.size(); lv < t; ++lv) {
      Rational a = 6 * q(lv), b = 3 * p_hat(lv);
      if (!(a < b && b < p(lv))) {
        fail(ErrorKind::kPrecondition, "6q < 3p_hat < p fails at level " + std::to_string(lv));
      }
    }
  }

  Level level;
  size_t n0 = SIZE_MAX;
  for (const Node& x : leaves) {
    if (!core.contains(x)) continue;
    level.nodes.push_back(x);
    level.out.push_back(psi.output(x));
    n0 = std::min(n0, level.out.back().size());
  }
  if (level.nodes.empty()) fail(ErrorKind::kPrecondition, "no core node at level t above rho");
  if (n0 > 30) n0 = 30;

  if (!opt.skip_direct && try_direct(level, static_cast<unsigned>(n0), lambda, p_hat, rho, ambient, r)) {
    return r;
  }

  size_t l = rho.size();
  while (l <= t && !(Rational(5 * r.k) * p_hat(l) < p(l))) ++l;
  if (l > t) fail(ErrorKind::kPrecondition, "no level l <= t with 5k p_hat(l) < p(l)");
  r.level_l = l;
  std::vector<Node> frontier = level_of(cone, l);
  if (frontier.size() > kMaxShapeNodes) {
    fail(ErrorKind::kPrecondition, "pigeonhole frontier too large: " + std::to_string(frontier.size()) +
                                       " nodes at level " + std::to_string(l) + " (cap " +
                                       std::to_string(kMaxShapeNodes) + ")");
  }
  size_t shapes = size_t{1} << frontier.size();
  r.m_sets = r.k * shapes + 1;

  HashGeneration gen =
      generate_hash_family(1 - lambda, lambda, r.k, static_cast<unsigned>(r.m_sets - 1), opt.seed, opt.max_n);
  const HashFamily& fam = gen.family;
  unsigned n = fam.ground;
  if (n > n0) {
    fail(ErrorKind::kPrecondition, "functional depth " + std::to_string(n0) + " below hash ground " +
                                       std::to_string(n));
  }
  r.n_bits = n;

  std::vector<uint32_t> image(level.nodes.size());
  for (size_t i = 0; i < level.nodes.size(); ++i) image[i] = bits_value(level.out[i].substr(0, n));

  std::vector<std::vector<size_t>> members(fam.sets.size());
  std::map<std::vector<Node>, std::vector<size_t>> groups;
  std::vector<std::vector<Node>> group_order;
  for (size_t j = 0; j < fam.sets.size(); ++j) {
    const auto& set = fam.sets[j];
    std::set<Node> shape;
    for (size_t i = 0; i < level.nodes.size(); ++i) {
      if (std::binary_search(set.begin(), set.end(), image[i])) {
        members[j].push_back(i);
        shape.insert(Node(level.nodes[i].begin(), level.nodes[i].begin() + l));
      }
    }
    std::vector<Node> key(shape.begin(), shape.end());
    if (!groups.count(key)) group_order.push_back(key);
    groups[key].push_back(j);
  }

  // Wider predecessor shapes first.
  std::stable_sort(group_order.begin(), group_order.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
  // Combinations whose closure meets both bands are preferred; otherwise the
  // first one with a p_hat-big intersection is kept.
  std::optional<CaptureResult> fallback;
  size_t tried = 0;
  for (const auto& key : group_order) {
    const auto& g = groups[key];
    if (g.size() < r.k) continue;
    std::vector<bool> pick(g.size(), false);
    std::fill(pick.begin(), pick.begin() + r.k, true);
    do {
      if (++tried > kMaxCombinations) break;
      std::vector<size_t> chosen;
      for (size_t i = 0; i < g.size(); ++i) {
        if (pick[i]) chosen.push_back(g[i]);
      }
      std::vector<size_t> common = members[chosen[0]];
      for (size_t c = 1; c < chosen.size(); ++c) {
        std::vector<size_t> next;
        std::set_intersection(common.begin(), common.end(), members[chosen[c]].begin(),
                              members[chosen[c]].end(), std::back_inserter(next));
        common.swap(next);
      }
      NodeSet s;
      for (size_t i : common) s.insert(level.nodes[i]);
      BigDecision d = decide_big(s, p_hat, rho, ambient);
      if (!d.big) continue;

      CaptureResult c = r;
      NodeSet closure = path_to(rho);
      for (const Node& x : s) {
        for (size_t len = rho.size(); len <= x.size(); ++len) closure.insert(Node(x.begin(), x.begin() + len));
      }
      if (l > rho.size()) {
        c.closure_low_band = !check_bushy_band(closure, p - p_hat - q, rho.size(), l - 1);
      }
      if (t > l) {
        c.closure_high_band = !check_bushy_band(closure, p - p_hat.scaled(Rational(4 * r.k)), l, t - 1);
      }
      bool bands = c.closure_low_band && c.closure_high_band;
      if (!bands && fallback) continue;

      std::vector<uint32_t> inter = fam.sets[chosen[0]];
      for (size_t k = 1; k < chosen.size(); ++k) {
        std::vector<uint32_t> next;
        std::set_intersection(inter.begin(), inter.end(), fam.sets[chosen[k]].begin(),
                              fam.sets[chosen[k]].end(), std::back_inserter(next));
        inter.swap(next);
      }
      std::set<Bits> v;
      for (uint32_t x : inter) v.insert(element_bits(x, n));
      c.v_star = CylinderSet(v);
      c.t_hat = d.witness->tree;
      c.chosen = chosen;
      c.family = fam;
      if (bands) return c;
      fallback = std::move(c);
    } while (std::prev_permutation(pick.begin(), pick.end()));
    if (tried > kMaxCombinations) break;
  }
  if (fallback) return *fallback;
  fail(ErrorKind::kInconclusive, "no " + std::to_string(r.k) +
                                     " hash sets with a common shape give a p_hat-big intersection");
}

std::optional<std::string> check_capture(const CaptureResult& r, const FiniteTree& ambient,
                                         const FiniteTree& core, const ValueFunctional& psi,
                                         const Node& rho, const Rational& lambda,
                                         const LevelFn& p_hat) {
  for (const Bits& b : r.v_star.strings()) {
    if (b.size() != r.n_bits) return "V* holds a string of the wrong length";
  }
  if (!(measure(r.v_star) < lambda)) return "m(V*) = " + to_string(measure(r.v_star)) + " is not below lambda";
  for (const Node& x : r.t_hat.nodes) {
    if (!ambient.contains(x)) return "tree node " + node_str(x) + " outside the ambient";
  }
  if (!r.t_hat.contains(rho)) return "tree misses rho";
  if (auto e = check_bushy_over(r.t_hat.nodes, p_hat, rho)) return "tree not p_hat-bushy: " + *e;
  for (const Node& x : leaves_of(r.t_hat.nodes)) {
    if (!core.contains(x)) return "leaf " + node_str(x) + " outside the core";
    auto out = psi.restrict_to(x, r.n_bits);
    if (!out || !r.v_star.strings().count(*out)) return "leaf " + node_str(x) + " does not land in V*";
  }
  return std::nullopt;
}

}  // namespace bushy
