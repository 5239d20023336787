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

#include "bushy/trees.hpp"

#include <algorithm>
#include <sstream>

#include "bushy/error.hpp"

namespace bushy {

bool is_prefix(const Node& a, const Node& b) {
  return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

bool comparable(const Node& a, const Node& b) {
  return is_prefix(a, b) || is_prefix(b, a);
}

Node extend(const Node& a, uint32_t i) {
  Node out = a;
  out.push_back(i);
  return out;
}

Node parent_of(const Node& a) {
  if (a.empty()) fail(ErrorKind::kInvalidInput, "root has no parent");
  return Node(a.begin(), a.end() - 1);
}

std::string node_str(const Node& a) {
  std::ostringstream os;
  os << '<';
  for (size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << a[i];
  os << '>';
  return os.str();
}

std::vector<Node> leaves_of(const NodeSet& s) {
  if (s.empty()) return {Node{}};
  std::vector<Node> out;
  // In lexicographic order an extension of x, if any, follows x directly.
  for (auto it = s.begin(); it != s.end(); ++it) {
    auto next = std::next(it);
    if (next == s.end() || !is_prefix(*it, *next)) out.push_back(*it);
  }
  return out;
}

NodeSet path_to(const Node& a) {
  NodeSet out;
  for (size_t i = 0; i <= a.size(); ++i) out.insert(Node(a.begin(), a.begin() + i));
  return out;
}

NodeSet cone_of(const NodeSet& s, const Node& root) {
  NodeSet out;
  for (auto it = s.lower_bound(root); it != s.end() && is_prefix(root, *it); ++it) {
    out.insert(*it);
  }
  return out;
}

std::vector<Node> level_of(const NodeSet& s, size_t level) {
  std::vector<Node> out;
  for (const Node& x : s) {
    if (x.size() == level) out.push_back(x);
  }
  return out;
}

template <typename Op>
LevelFn LevelFn::zip(const LevelFn& o, Op op) const {
  size_t n = std::max(table_.size(), o.table_.size());
  std::vector<Rational> t;
  t.reserve(n);
  for (size_t i = 0; i < n; ++i) t.push_back(op((*this)(i), o(i)));
  return LevelFn(std::move(t), op(tail_, o.tail_));
}

LevelFn LevelFn::operator+(const LevelFn& o) const {
  return zip(o, [](const Rational& a, const Rational& b) { return Rational(a + b); });
}

LevelFn LevelFn::operator-(const LevelFn& o) const {
  return zip(o, [](const Rational& a, const Rational& b) { return Rational(a - b); });
}

LevelFn LevelFn::operator*(const LevelFn& o) const {
  return zip(o, [](const Rational& a, const Rational& b) { return Rational(a * b); });
}

LevelFn LevelFn::scaled(const Rational& c) const {
  return zip(*this, [&c](const Rational& a, const Rational&) { return Rational(a * c); });
}

bool LevelFn::operator==(const LevelFn& o) const {
  size_t n = std::max(table_.size(), o.table_.size());
  for (size_t i = 0; i < n; ++i) {
    if ((*this)(i) != o(i)) return false;
  }
  return tail_ == o.tail_;
}

bool pointwise_less(const LevelFn& a, const LevelFn& b, size_t from, size_t to) {
  for (size_t l = from; l <= to; ++l) {
    if (!(a(l) < b(l))) return false;
  }
  return true;
}

bool pointwise_nonneg(const LevelFn& a, size_t from, size_t to) {
  for (size_t l = from; l <= to; ++l) {
    if (a(l) < 0) return false;
  }
  return true;
}

TreeIndex::TreeIndex(const NodeSet& nodes) : nodes_(nodes) {
  for (const Node& x : nodes_) {
    if (!x.empty()) kids_[parent_of(x)].push_back(x);
  }
}

const std::vector<Node>& TreeIndex::children(const Node& s) const {
  auto it = kids_.find(s);
  return it == kids_.end() ? none_ : it->second;
}

Node stem_of(const NodeSet& nodes) {
  if (nodes.empty()) return {};
  // Longest common prefix of the maximal members; for a lexicographically
  // sorted list it is that of the first and last entries.
  std::vector<Node> lv = leaves_of(nodes);
  const Node& lo = lv.front();
  const Node& hi = lv.back();
  size_t k = 0;
  while (k < lo.size() && k < hi.size() && lo[k] == hi[k]) ++k;
  return Node(lo.begin(), lo.begin() + k);
}

TreeReport validate_tree(const FiniteTree& t) {
  TreeReport r;
  auto bad = [&r](const std::string& what, const Node& at) {
    r.ok = false;
    r.violation = what;
    r.offending = at;
    return r;
  };
  if (t.nodes.empty()) return bad("empty tree", {});
  for (const Node& x : t.nodes) {
    if (x.size() > t.max_depth) return bad("depth exceeds maxDepth", x);
    for (size_t i = 0; i < x.size(); ++i) {
      if (!(Rational(x[i]) < t.bound(i))) return bad("bound exceeded", x);
    }
    if (!x.empty() && !t.nodes.count(parent_of(x))) return bad("not prefix-closed", x);
  }
  r.stem = stem_of(t.nodes);
  r.leaves = leaves_of(t.nodes);
  return r;
}

bool bits_prefix(const Bits& a, const Bits& b) {
  return a.size() <= b.size() && b.compare(0, a.size(), a) == 0;
}

bool bits_comparable(const Bits& a, const Bits& b) {
  return bits_prefix(a, b) || bits_prefix(b, a);
}

static void check_bits(const Bits& s) {
  for (char c : s) {
    if (c != '0' && c != '1') fail(ErrorKind::kInvalidInput, "not a binary string: '" + s + "'");
  }
}

CylinderSet::CylinderSet(const std::vector<Bits>& strings)
    : strings_(strings.begin(), strings.end()) {
  normalize();
}

CylinderSet::CylinderSet(const std::set<Bits>& strings) : strings_(strings) {
  normalize();
}

void CylinderSet::normalize() {
  std::set<Bits> out;
  // Sorted order puts every prefix before its extensions.
  // Everything between a kept prefix and its extension is absorbed, so only
  // the last kept string can be a prefix of the next one.
  const Bits* last = nullptr;
  for (const Bits& s : strings_) {
    check_bits(s);
    if (last && bits_prefix(*last, s)) continue;
    last = &*out.insert(out.end(), s);
  }
  strings_.swap(out);
}

bool CylinderSet::covers(const Bits& x) const {
  // In a prefix-free set only the greatest member not above x can be a
  // prefix of x.
  auto it = strings_.upper_bound(x);
  if (it == strings_.begin()) return false;
  --it;
  return bits_prefix(*it, x);
}

Rational measure(const CylinderSet& v) {
  Rational m(0);
  for (const Bits& s : v.strings()) m += pow2_neg(static_cast<unsigned>(s.size()));
  return m;
}

Rational cond_measure(const CylinderSet& v, const Bits& rho) {
  if (v.covers(rho)) return Rational(1);
  Rational m(0);
  for (const Bits& s : v.strings()) {
    if (bits_prefix(rho, s)) m += pow2_neg(static_cast<unsigned>(s.size() - rho.size()));
  }
  return m;
}

CylinderSet unite(const CylinderSet& a, const CylinderSet& b) {
  std::set<Bits> all = a.strings();
  all.insert(b.strings().begin(), b.strings().end());
  return CylinderSet(all);
}

CylinderSet intersect(const CylinderSet& a, const CylinderSet& b) {
  std::set<Bits> out;
  for (const Bits& x : a.strings()) {
    for (const Bits& y : b.strings()) {
      if (bits_prefix(x, y)) out.insert(y);
      else if (bits_prefix(y, x)) out.insert(x);
    }
  }
  return CylinderSet(out);
}

bool disjoint(const CylinderSet& a, const CylinderSet& b) {
  for (const Bits& x : a.strings()) {
    for (const Bits& y : b.strings()) {
      if (bits_comparable(x, y)) return false;
    }
  }
  return true;
}

std::vector<Bits> all_strings(unsigned n) {
  std::vector<Bits> out;
  if (n > 24) fail(ErrorKind::kInvalidInput, "string length too large to enumerate");
  for (uint64_t x = 0; x < (uint64_t{1} << n); ++x) {
    Bits s(n, '0');
    for (unsigned i = 0; i < n; ++i) {
      if (x >> (n - 1 - i) & 1) s[i] = '1';
    }
    out.push_back(std::move(s));
  }
  return out;
}

CylinderSet complement_in(const CylinderSet& v, unsigned n) {
  std::set<Bits> out;
  for (Bits& s : all_strings(n)) {
    if (!v.strings().count(s)) out.insert(std::move(s));
  }
  return CylinderSet(out);
}

std::optional<size_t> schnorr_violation(const SchnorrTest& t) {
  for (size_t n = 0; n < t.levels.size(); ++n) {
    if (measure(t.levels[n]) > pow2_neg(static_cast<unsigned>(n))) return n;
  }
  return std::nullopt;
}

}  // namespace bushy
