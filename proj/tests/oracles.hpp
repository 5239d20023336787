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

// Random instance generators and brute-force oracles shared by the unit
// tests and the acceptance suite. Nothing here calls the bigness decision
// procedure.

#ifndef BUSHY_TESTS_ORACLES_HPP_
#define BUSHY_TESTS_ORACLES_HPP_

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "bushy/functional.hpp"
#include "bushy/schnorr.hpp"
#include "bushy/trees.hpp"

namespace oracle {

using namespace bushy;

inline FiniteTree random_tree(std::mt19937_64& rng, uint32_t max_branch, unsigned depth,
                              double grow = 0.8) {
  FiniteTree t;
  t.bound = LevelFn(Rational(max_branch));
  t.max_depth = depth;
  std::vector<Node> frontier{Node{}};
  t.nodes.insert(Node{});
  std::bernoulli_distribution go(grow);
  std::uniform_int_distribution<uint32_t> width(1, max_branch);
  while (!frontier.empty()) {
    Node x = frontier.back();
    frontier.pop_back();
    if (x.size() >= depth || (!x.empty() && !go(rng))) continue;
    uint32_t w = width(rng);
    std::vector<uint32_t> labels(max_branch);
    for (uint32_t i = 0; i < max_branch; ++i) labels[i] = i;
    std::shuffle(labels.begin(), labels.end(), rng);
    for (uint32_t i = 0; i < w; ++i) {
      Node c = extend(x, labels[i]);
      t.nodes.insert(c);
      frontier.push_back(c);
    }
  }
  return t;
}

// Full tree of the given width and depth.
inline FiniteTree full_tree(uint32_t width, unsigned depth) {
  FiniteTree t;
  t.bound = LevelFn(Rational(width));
  t.max_depth = depth;
  std::vector<Node> layer{Node{}};
  t.nodes.insert(Node{});
  for (unsigned d = 0; d < depth; ++d) {
    std::vector<Node> next;
    for (const Node& x : layer) {
      for (uint32_t i = 0; i < width; ++i) next.push_back(extend(x, i));
    }
    t.nodes.insert(next.begin(), next.end());
    layer.swap(next);
  }
  return t;
}

inline NodeSet random_subset(std::mt19937_64& rng, const NodeSet& from, double prob) {
  std::bernoulli_distribution in(prob);
  NodeSet out;
  for (const Node& x : from) {
    if (in(rng)) out.insert(x);
  }
  return out;
}

inline LevelFn random_levelfn(std::mt19937_64& rng, unsigned depth,
                              const std::vector<Rational>& choices) {
  std::uniform_int_distribution<size_t> pick(0, choices.size() - 1);
  std::vector<Rational> table;
  for (unsigned i = 0; i <= depth; ++i) table.push_back(choices[pick(rng)]);
  return LevelFn(table, choices[pick(rng)]);
}

inline std::vector<Node> kids(const NodeSet& t, const Node& x) {
  std::vector<Node> out;
  for (auto it = t.upper_bound(x); it != t.end() && is_prefix(x, *it); ++it) {
    if (it->size() == x.size() + 1) out.push_back(*it);
  }
  return out;
}

// Definitional check written independently of the library: every non-leaf
// node at or above root has at least p(level) children, all leaves in s.
inline bool is_bushy_witness(const NodeSet& w, const LevelFn& p, const Node& root,
                             const NodeSet& s) {
  if (!w.count(root)) return false;
  for (const Node& x : w) {
    if (!is_prefix(root, x)) continue;
    auto k = kids(w, x);
    if (k.empty()) {
      if (!s.count(x)) return false;
    } else if (Rational(k.size()) < p(x.size())) {
      return false;
    }
  }
  return true;
}

// Enumerates candidate witness trees over root inside ambient. Every witness
// contains one that stops at the first member of s on each branch and keeps
// exactly max(1, ceil p) children elsewhere, so these shapes are exhaustive
// for existence. Each candidate is checked with is_bushy_witness.
class SubtreeEnumerator {
 public:
  SubtreeEnumerator(const NodeSet& ambient, const NodeSet& s, const LevelFn& p)
      : ambient_(ambient), s_(s), p_(p) {}

  bool exists(const Node& root, uint64_t* explored = nullptr) {
    bool found = false;
    uint64_t count = 0;
    enumerate(root, [&](const NodeSet& sub) {
      ++count;
      NodeSet w = path_to(root);
      w.insert(sub.begin(), sub.end());
      if (is_bushy_witness(w, p_, root, s_)) found = true;
      return !found;
    });
    if (explored) *explored = count;
    return found;
  }

 private:
  using Visit = std::function<bool(const NodeSet&)>;

  // Calls visit on each candidate subtree rooted at x; visit returns false to
  // stop. Returns false when stopped.
  bool enumerate(const Node& x, const Visit& visit) {
    if (s_.count(x)) return visit(NodeSet{x});
    std::vector<Node> ch = kids(ambient_, x);
    uint64_t c = ceil_u64(p_(x.size()));
    size_t need = c == 0 ? 1 : c;
    if (ch.size() < need) return true;
    std::vector<size_t> pick(need);
    for (size_t i = 0; i < need; ++i) pick[i] = i;
    while (true) {
      std::vector<Node> chosen;
      for (size_t i : pick) chosen.push_back(ch[i]);
      NodeSet acc{x};
      if (!product(chosen, 0, acc, visit)) return false;
      // Next combination in lexicographic order.
      size_t i = need;
      while (i > 0 && pick[i - 1] == ch.size() - need + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (size_t j = i; j < need; ++j) pick[j] = pick[j - 1] + 1;
    }
    return true;
  }

  bool product(const std::vector<Node>& chosen, size_t at, NodeSet& acc, const Visit& visit) {
    if (at == chosen.size()) return visit(acc);
    return enumerate(chosen[at], [&](const NodeSet& sub) {
      NodeSet next = acc;
      next.insert(sub.begin(), sub.end());
      return product(chosen, at + 1, next, visit);
    });
  }

  const NodeSet& ambient_;
  const NodeSet& s_;
  const LevelFn& p_;
};

// The root outputs nothing; every other node extends its parent's output by
// min_ext..max_ext random bits.
inline ValueFunctional random_functional(std::mt19937_64& rng, const FiniteTree& t,
                                         unsigned max_ext, unsigned min_ext = 0) {
  std::uniform_int_distribution<unsigned> ext(min_ext, max_ext);
  std::bernoulli_distribution bit(0.5);
  std::map<Node, Bits> out;
  ValueFunctional psi;
  for (const Node& x : t.nodes) {
    Bits b = x.empty() ? Bits() : out[parent_of(x)];
    unsigned e = x.empty() ? 0 : ext(rng);
    for (unsigned i = 0; i < e; ++i) b.push_back(bit(rng) ? '1' : '0');
    out[x] = b;
    psi.set(x, b);
  }
  return psi;
}

// Output of a node: the binary codes (width bits each) of its entries.
inline ValueFunctional coded_functional(const FiniteTree& t, unsigned width) {
  ValueFunctional psi;
  for (const Node& x : t.nodes) {
    Bits b;
    for (uint32_t c : x) {
      for (unsigned i = width; i-- > 0;) b.push_back((c >> i & 1) ? '1' : '0');
    }
    psi.set(x, b);
  }
  return psi;
}

// Measure of [strings] inside [prefix], relative to [prefix], by halving.
inline Rational split_measure(const std::vector<Bits>& strings, const Bits& prefix) {
  bool below = false;
  for (const Bits& s : strings) {
    if (s.size() <= prefix.size() && prefix.compare(0, s.size(), s) == 0) return 1;
    if (s.size() > prefix.size() && s.compare(0, prefix.size(), prefix) == 0) below = true;
  }
  if (!below) return 0;
  Rational r = (split_measure(strings, prefix + "0") + split_measure(strings, prefix + "1")) / 2;
  return r;
}

inline std::vector<Bits> as_vector(const CylinderSet& v) { return {v.strings().begin(), v.strings().end()}; }

// Everything node x (or a prefix) emitted by time t, read off the raw entries.
inline std::vector<Bits> emitted(const TestFunctional& psi, const Node& x, uint32_t t) {
  std::vector<Bits> out;
  for (const auto& [y, es] : psi.entries()) {
    if (!is_prefix(y, x)) continue;
    for (const TestEntry& e : es) {
      if (e.stage > t || e.index > t) continue;
      out.insert(out.end(), e.v.strings().begin(), e.v.strings().end());
    }
  }
  return out;
}

}  // namespace oracle

#endif  // BUSHY_TESTS_ORACLES_HPP_
