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

#include <random>

#include "bushy/trees.hpp"
#include "doctest.h"

using namespace bushy;

namespace {

// Independent oracle: fraction of length-L strings having a member of v as a
// prefix, by direct scan. Valid when L bounds every member's length.
Rational oracle_measure(const std::vector<Bits>& v, unsigned len) {
  uint64_t hit = 0;
  for (const Bits& x : all_strings(len)) {
    bool in = false;
    for (const Bits& s : v) in = in || bits_prefix(s, x);
    hit += in ? 1 : 0;
  }
  return Rational(hit) / Rational(uint64_t{1} << len);
}

Rational oracle_cond(const std::vector<Bits>& v, const Bits& rho, unsigned len) {
  uint64_t hit = 0, tot = 0;
  for (const Bits& x : all_strings(len)) {
    if (!bits_prefix(rho, x)) continue;
    ++tot;
    bool in = false;
    for (const Bits& s : v) in = in || bits_prefix(s, x);
    hit += in ? 1 : 0;
  }
  return Rational(hit) / Rational(tot);
}

std::vector<Bits> random_strings(std::mt19937_64& rng, size_t count, unsigned max_len) {
  std::vector<Bits> out;
  std::uniform_int_distribution<unsigned> len(0, max_len);
  std::bernoulli_distribution bit(0.5);
  for (size_t i = 0; i < count; ++i) {
    Bits s(len(rng), '0');
    for (char& c : s) c = bit(rng) ? '1' : '0';
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("measure examples") {
  CHECK(measure(CylinderSet(std::vector<Bits>{""})) == 1);
  CHECK(measure(CylinderSet(std::vector<Bits>{"0", "01"})) == rat(1, 2));
  std::vector<Bits> v{"00", "01", "10"};
  Rational expected = rat(3, 4);
  CHECK(oracle_measure(v, 2) == expected);
  CHECK(measure(CylinderSet(v)) == expected);
}

TEST_CASE("cond_measure examples") {
  CHECK(cond_measure(CylinderSet(std::vector<Bits>{"00"}), "0") == rat(1, 2));
  CHECK(cond_measure(CylinderSet(std::vector<Bits>{"1"}), "0") == 0);
  std::vector<Bits> v{"010", "011", "00"};
  Rational expected = 1;
  CHECK(oracle_cond(v, "01", 3) == expected);
  CHECK(cond_measure(CylinderSet(v), "01") == expected);
}

TEST_CASE("normalization is prefix-free") {
  CylinderSet v(std::vector<Bits>{"0", "01", "011", "1", "10"});
  CHECK(v.strings() == std::set<Bits>{"0", "1"});
  CHECK_THROWS(CylinderSet(std::vector<Bits>{"02"}));
}

TEST_CASE("validate_tree examples") {
  FiniteTree t{{{}, {0}, {1}}, LevelFn(Rational(2)), 3};
  TreeReport r = validate_tree(t);
  CHECK(r.ok);
  CHECK(r.stem == Node{});
  CHECK(r.leaves == std::vector<Node>{{0}, {1}});

  FiniteTree gap{{{0, 1}}, LevelFn(Rational(2)), 3};
  r = validate_tree(gap);
  CHECK_FALSE(r.ok);
  CHECK(r.violation == "not prefix-closed");
  CHECK(r.offending == Node{0, 1});

  FiniteTree wide{{{}, {3}}, LevelFn(Rational(2)), 3};
  r = validate_tree(wide);
  CHECK_FALSE(r.ok);
  CHECK(r.violation == "bound exceeded");
  CHECK(r.offending == Node{3});

  FiniteTree path{{{}, {1}, {1, 0}}, LevelFn(Rational(2)), 3};
  CHECK(validate_tree(path).stem == Node{1, 0});
}

TEST_CASE("measure properties") {
  std::mt19937_64 rng(20260101);
  for (int trial = 0; trial < 300; ++trial) {
    auto a = random_strings(rng, 1 + trial % 6, 6);
    auto b = random_strings(rng, 1 + trial % 5, 6);
    CylinderSet va(a), vb(b);
    // Normalization invariance and agreement with the brute-force oracle.
    CHECK(measure(va) == oracle_measure(a, 8));
    CHECK(measure(CylinderSet(va.strings())) == measure(va));
    CylinderSet u = unite(va, vb);
    CHECK(measure(u) >= measure(va));
    CHECK(measure(u) >= measure(vb));
    if (disjoint(va, vb)) CHECK(measure(u) == measure(va) + measure(vb));
    CHECK(measure(intersect(va, vb)) == measure(va) + measure(vb) - measure(u));
    for (const Bits& rho : random_strings(rng, 4, 5)) {
      Rational c = cond_measure(va, rho);
      CHECK(c * pow2_neg(rho.size()) <= measure(va));
      CHECK(c == oracle_cond(a, rho, 8));
    }
    for (const Bits& x : all_strings(8)) {
      bool scan = false;
      for (const Bits& s : a) scan = scan || bits_prefix(s, x);
      CHECK(scan == va.covers(x));
    }
  }
}

TEST_CASE("schnorr test invariant") {
  SchnorrTest t;
  t.levels.push_back(CylinderSet(std::vector<Bits>{""}));
  t.levels.push_back(CylinderSet(std::vector<Bits>{"0"}));
  t.levels.push_back(CylinderSet(std::vector<Bits>{"00"}));
  CHECK_FALSE(schnorr_violation(t).has_value());
  t.levels.push_back(CylinderSet(std::vector<Bits>{"00", "11"}));
  CHECK(schnorr_violation(t) == std::optional<size_t>(3));
}

TEST_CASE("level functions") {
  LevelFn a({rat(1), rat(2)}, rat(3));
  LevelFn b(rat(1, 2));
  CHECK((a + b)(0) == rat(3, 2));
  CHECK((a + b)(7) == rat(7, 2));
  CHECK((a - b)(1) == rat(3, 2));
  CHECK(a.scaled(rat(1, 3))(5) == 1);
  CHECK(ceil_of(rat(3, 2)) == 2);
  CHECK(ceil_of(rat(-3, 2)) == -1);
  CHECK(parse_rational("6/8") == rat(3, 4));
}
