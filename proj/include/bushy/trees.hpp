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

#ifndef BUSHY_TREES_HPP_
#define BUSHY_TREES_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bushy/rational.hpp"

namespace bushy {

// A finite sequence of naturals. The empty node is the root.
using Node = std::vector<uint32_t>;
using NodeSet = std::set<Node>;

bool is_prefix(const Node& a, const Node& b);  // a is an initial segment of b
bool comparable(const Node& a, const Node& b);
Node extend(const Node& a, uint32_t i);
Node parent_of(const Node& a);
std::string node_str(const Node& a);

// Nodes of s having no proper extension in s. Empty s has the root as leaf.
std::vector<Node> leaves_of(const NodeSet& s);

// Proper prefixes of a together with a itself.
NodeSet path_to(const Node& a);

// Members of s extending root (root included when present).
NodeSet cone_of(const NodeSet& s, const Node& root);

// Members of s at a given length.
std::vector<Node> level_of(const NodeSet& s, size_t level);

// A map level -> exact rational, backed by a finite table plus a tail value.
class LevelFn {
 public:
  LevelFn() = default;
  explicit LevelFn(Rational constant) : tail_(std::move(constant)) {}
  LevelFn(std::vector<Rational> table, Rational tail)
      : table_(std::move(table)), tail_(std::move(tail)) {}

  const Rational& operator()(size_t level) const {
    return level < table_.size() ? table_[level] : tail_;
  }
  const std::vector<Rational>& table() const { return table_; }
  const Rational& tail() const { return tail_; }

  LevelFn operator+(const LevelFn& o) const;
  LevelFn operator-(const LevelFn& o) const;
  LevelFn operator*(const LevelFn& o) const;
  LevelFn scaled(const Rational& c) const;
  bool operator==(const LevelFn& o) const;

 private:
  template <typename Op>
  LevelFn zip(const LevelFn& o, Op op) const;

  std::vector<Rational> table_;
  Rational tail_{0};
};

// a(l) < b(l) for every l in [from, to].
bool pointwise_less(const LevelFn& a, const LevelFn& b, size_t from, size_t to);
bool pointwise_nonneg(const LevelFn& a, size_t from, size_t to);

struct FiniteTree {
  NodeSet nodes;
  LevelFn bound{Rational(0)};  // entries at level i are < bound(i)
  unsigned max_depth = 0;

  bool contains(const Node& s) const { return nodes.count(s) != 0; }
};

// Child lists of a node set, built once.
class TreeIndex {
 public:
  explicit TreeIndex(const NodeSet& nodes);
  const std::vector<Node>& children(const Node& s) const;
  bool contains(const Node& s) const { return nodes_.count(s) != 0; }
  const NodeSet& nodes() const { return nodes_; }

 private:
  NodeSet nodes_;
  std::map<Node, std::vector<Node>> kids_;
  std::vector<Node> none_;
};

struct TreeReport {
  bool ok = true;
  std::string violation;  // empty when ok
  Node offending;
  Node stem;
  std::vector<Node> leaves;
};

// The stem is the longest node comparable with every member.
Node stem_of(const NodeSet& nodes);

TreeReport validate_tree(const FiniteTree& t);

// A finite set of binary strings naming a union of cylinders, kept prefix-free.
using Bits = std::string;

bool bits_prefix(const Bits& a, const Bits& b);
bool bits_comparable(const Bits& a, const Bits& b);

class CylinderSet {
 public:
  CylinderSet() = default;
  explicit CylinderSet(const std::vector<Bits>& strings);
  explicit CylinderSet(const std::set<Bits>& strings);

  const std::set<Bits>& strings() const { return strings_; }
  bool empty() const { return strings_.empty(); }
  size_t size() const { return strings_.size(); }
  // Some member is a prefix of x.
  bool covers(const Bits& x) const;
  bool operator==(const CylinderSet& o) const { return strings_ == o.strings_; }

 private:
  void normalize();
  std::set<Bits> strings_;
};

Rational measure(const CylinderSet& v);
Rational cond_measure(const CylinderSet& v, const Bits& rho);
CylinderSet unite(const CylinderSet& a, const CylinderSet& b);
CylinderSet intersect(const CylinderSet& a, const CylinderSet& b);
// No member of one is comparable with a member of the other.
bool disjoint(const CylinderSet& a, const CylinderSet& b);

std::vector<Bits> all_strings(unsigned n);
// 2^n minus v, for v a set of length-n strings.
CylinderSet complement_in(const CylinderSet& v, unsigned n);

struct SchnorrTest {
  std::vector<CylinderSet> levels;
};

// Index of the first level with measure above 2^{-n}.
std::optional<size_t> schnorr_violation(const SchnorrTest& t);

}  // namespace bushy

#endif  // BUSHY_TREES_HPP_
