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
#include <set>

#include "bushy/error.hpp"
#include "bushy/schnorr.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bushy;

namespace {

using oracle::as_vector;
using oracle::emitted;
using oracle::split_measure;

// The squared conditional invariant at every level-l_j node of every T_j.
void scan_invariant(const RoundState& s, const TestFunctional& psi) {
  for (size_t j = 0; j < s.trees.size(); ++j) {
    for (const Node& x : s.trees[j].nodes) {
      if (x.size() != s.level[j + 1]) continue;
      Rational c = split_measure(emitted(psi, x, s.time[j]), s.rho[j]);
      Rational sq = c * c;
      CHECK(sq < s.lambda[j]);
      CHECK(split_measure(emitted(psi, x, s.time[j]), "") > s.lambda_star - s.lambda_bar[j]);
    }
  }
}

void all_ok(const std::vector<RoundCheck>& checks) {
  for (const RoundCheck& c : checks) {
    INFO(c.name << ": " << c.lhs << " vs " << c.rhs);
    CHECK(c.ok);
  }
}

TestFunctional half_test() {
  std::map<Node, std::vector<TestEntry>> e;
  e[{}].push_back(TestEntry{0, CylinderSet(std::vector<Bits>{"1"}), 0});
  return TestFunctional(e, Rational(1, 2));
}

LevelFn small_eps(unsigned depth) { return LevelFn(std::vector<Rational>(depth, Rational(1, 32)), 0); }

}  // namespace

TEST_CASE("test functional visibility and validation") {
  FiniteTree t = oracle::full_tree(2, 2);
  std::map<Node, std::vector<TestEntry>> e;
  e[{}].push_back(TestEntry{0, CylinderSet(std::vector<Bits>{"0"}), 0});
  e[{1}].push_back(TestEntry{1, CylinderSet(std::vector<Bits>{"10"}), 2});
  TestFunctional psi(e, Rational(3, 4));
  CHECK(psi.validate(t) == std::nullopt);
  CHECK(psi.visible({1, 0}, 1).strings() == std::set<Bits>{"0"});
  CHECK(psi.visible({1, 0}, 2).strings() == std::set<Bits>{"0", "10"});
  CHECK(psi.visible({0, 0}, 5).strings() == std::set<Bits>{"0"});
  CHECK(psi.through({1}, 1)->strings() == std::set<Bits>{"0", "10"});
  CHECK_FALSE(psi.through({0}, 1).has_value());
  CHECK(psi.max_stage() == 2);

  TestFunctional early = psi;
  early.add({0, 1}, TestEntry{1, CylinderSet(std::vector<Bits>{"11"}), 1});
  CHECK(early.validate(t)->find("below its use") != std::string::npos);
  TestFunctional twice = psi;
  twice.add({1, 1}, TestEntry{1, CylinderSet(std::vector<Bits>{"11"}), 2});
  CHECK(twice.validate(t)->find("twice") != std::string::npos);
  TestFunctional heavy = psi;
  heavy.add({0}, TestEntry{1, CylinderSet(std::vector<Bits>{"1"}), 1});
  CHECK(heavy.validate(t)->find("exceeds the budget") != std::string::npos);
  std::map<Node, std::vector<TestEntry>> light;
  light[{}].push_back(TestEntry{0, CylinderSet(std::vector<Bits>{"00"}), 0});
  auto why = TestFunctional(light, Rational(3, 4)).validate(t);
  REQUIRE(why.has_value());
  CHECK(why->find("not above") != std::string::npos);
}

TEST_CASE("gap bound") {
  CHECK(gap_bound(Rational(1, 8), 1, 0) == Rational(1, 256));
  CHECK(gap_bound(Rational(1, 2), 3, 2) == Rational(1, 192));
}

TEST_CASE("present nodes follow the expulsion schedule") {
  FiniteTree t = oracle::full_tree(2, 2);
  Expulsion core({{}, {0}, {0, 0}, {0, 1}}, {{{1}, 2}, {{1, 0}, 5}});
  CHECK(present_nodes(t, core, 1).size() == 6);
  CHECK(present_nodes(t, core, 2) == NodeSet{{}, {0}, {0, 0}, {0, 1}});
}

TEST_CASE("empty conditional measure: rho is the least extension") {
  FiniteTree t = oracle::full_tree(2, 4);
  TestFunctional psi = half_test();
  Expulsion core;
  RoundState s = initial_round(psi, t, core, {}, LevelFn(Rational(2)), LevelFn(Rational(0)), small_eps(4));
  CHECK(s.time[0] == 0);
  CHECK(s.level[1] == 1);
  CHECK(s.m[1] == 2);
  CHECK(s.trees[0].nodes == NodeSet{{}, {0}});
  all_ok(check_round_state(s, psi, t, core));

  s = avoidance_round(s, psi, t, core);
  CHECK(s.rho.back() == "00");
  CHECK(s.level.back() == 2);
  all_ok(check_round_state(s, psi, t, core));
  scan_invariant(s, psi);

  Avoider a = assemble_avoider(s, psi, t, core);
  CHECK(a.x == "00");
  CHECK(a.cylinders_scanned > 0);
}

TEST_CASE("depth-5 instance with two seeded rounds") {
  ScheduledInstance inst = scheduled_instance(11, 3, 5, 3, 2);
  Expulsion core;
  RoundState s = initial_round(inst.psi, inst.ambient, core, {}, inst.p, inst.q, inst.eps);
  s = avoidance_round(s, inst.psi, inst.ambient, core);
  REQUIRE(s.trees.size() == 2);
  RoundState next = avoidance_round(s, inst.psi, inst.ambient, core);
  CHECK(next.trees.size() == 3);
  CHECK(next.time.back() > s.time.back());
  CHECK(next.level.back() > s.level.back());
  all_ok(check_round_state(next, inst.psi, inst.ambient, core));
  scan_invariant(next, inst.psi);

  Avoider a = assemble_avoider(next, inst.psi, inst.ambient, core);
  CHECK(a.x == next.rho.back());
  uint32_t t_top = next.time.back();
  for (const Node& x : a.t_hat.nodes) {
    if (x.size() != next.level.back()) continue;
    for (const Bits& b : emitted(inst.psi, x, t_top)) CHECK_FALSE(bits_prefix(b, a.x));
  }
}

TEST_CASE("scheduled instances re-verify every round") {
  std::mt19937_64 rng(5);
  int rounds = 0, avoiders = 0;
  for (int trial = 0; trial < 24; ++trial) {
    uint32_t b = 2 + static_cast<uint32_t>(rng() % 4);
    unsigned depth = 4 + static_cast<unsigned>(rng() % 2);
    unsigned a = 3 + static_cast<unsigned>(rng() % 2);
    unsigned fill = 1 + static_cast<unsigned>(rng() % 3);
    ScheduledInstance inst = scheduled_instance(rng(), b, depth, a, fill);
    REQUIRE(inst.psi.validate(inst.ambient) == std::nullopt);
    Expulsion core;
    RoundState s = initial_round(inst.psi, inst.ambient, core, {}, inst.p, inst.q, inst.eps);
    while (true) {
      try {
        s = avoidance_round(s, inst.psi, inst.ambient, core);
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::kInconclusive);
        break;
      }
      ++rounds;
      all_ok(check_round_state(s, inst.psi, inst.ambient, core));
      scan_invariant(s, inst.psi);
    }
    if (s.trees.size() < 2) continue;
    Avoider av = assemble_avoider(s, inst.psi, inst.ambient, core);
    ++avoiders;
    for (const Node& x : av.t_hat.nodes) {
      if (x.size() != s.level.back()) continue;
      for (const Bits& v : emitted(inst.psi, x, s.time.back())) CHECK_FALSE(bits_prefix(v, av.x));
    }
  }
  CHECK(rounds >= 48);
  CHECK(avoiders == 24);
}

TEST_CASE("assembly rejects a leaf whose test covers rho") {
  ScheduledInstance inst = scheduled_instance(3, 3, 4, 3, 2);
  Expulsion core;
  RoundState s = initial_round(inst.psi, inst.ambient, core, {}, inst.p, inst.q, inst.eps);
  s = avoidance_round(s, inst.psi, inst.ambient, core);
  s = avoidance_round(s, inst.psi, inst.ambient, core);
  Avoider a = assemble_avoider(s, inst.psi, inst.ambient, core);

  uint32_t t = s.time.back();
  Node leaf;
  for (const Node& x : a.t_hat.nodes) {
    if (x.size() == s.level.back()) leaf = x;
  }
  TestFunctional bad = inst.psi;
  Node anc(leaf.begin(), leaf.begin() + t);
  bad.add(anc, TestEntry{t, CylinderSet(std::vector<Bits>{s.rho[s.rho.size() - 2]}), t});
  try {
    assemble_avoider(s, bad, inst.ambient, core);
    FAIL("assembly accepted the violating instance");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kPrecondition);
    CHECK(std::string(e.what()).find("contradiction") != std::string::npos);
  }
}

TEST_CASE("round preconditions") {
  FiniteTree t = oracle::full_tree(2, 4);
  TestFunctional psi = half_test();
  Expulsion core;
  LevelFn p(Rational(2)), q(Rational(0));
  CHECK_THROWS_AS(initial_round(psi, t, core, {}, p, q, LevelFn(Rational(1, 32))), Error);
  CHECK_THROWS_AS(initial_round(psi, t, core, {}, p, LevelFn(Rational(1)), small_eps(4)), Error);
  std::vector<Rational> big(4, Rational(1, 8));
  CHECK_THROWS_AS(initial_round(psi, t, core, {}, p, q, LevelFn(big, 0)), Error);
  TestFunctional none({}, Rational(1, 2));
  try {
    initial_round(none, t, core, {}, p, q, small_eps(4));
    FAIL("no mass accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInconclusive);
  }
  RoundState s = initial_round(psi, t, core, {}, p, q, small_eps(4));
  CHECK_THROWS_AS(assemble_avoider(s, psi, t, core), Error);
  s.lambda[0] += Rational(1, 1024);
  CHECK_THROWS_AS(avoidance_round(s, psi, t, core), Error);
}

TEST_CASE("scheduled instance lengths follow the gap schedule") {
  ScheduledInstance inst = scheduled_instance(1, 2, 4, 3, 3);
  REQUIRE(inst.lengths.size() == 5);
  CHECK(inst.lengths[0] == 3);
  CHECK(inst.lengths[1] == 10);
  CHECK(inst.lengths[2] > inst.lengths[1]);
  CHECK(inst.lengths[3] == inst.lengths[2]);
  // lambda_bar_0 = (1/64) / 4 / 2 = 1/512, so L_1 is the least L with 2^-L < 1/512.
  for (const Node& x : inst.ambient.nodes) {
    if (x.size() < 3) continue;
    CHECK(split_measure(emitted(inst.psi, x, 10), "") == Rational(1, 8));
  }
  CHECK_THROWS_AS(scheduled_instance(1, 1, 4, 3, 3), Error);
}

namespace {

FiniteTree full8() { return oracle::full_tree(8, 2); }

}  // namespace

TEST_CASE("covering test with no rounds is the stem") {
  FiniteTree t = full8();
  ValueFunctional psi = oracle::coded_functional(t, 3);
  CoveringResult r = build_covering_test(t, Expulsion(), psi, {2}, LevelFn(Rational(8)),
                                         LevelFn(Rational(2)), LevelFn(Rational(0)), 0);
  CHECK(r.t_hat.nodes == NodeSet{{}, {2}});
  CHECK(r.test.levels.empty());
  CHECK(check_covering(r, t, psi, {2}, LevelFn(Rational(2))) == std::nullopt);
}

TEST_CASE("covering test around a constant image") {
  FiniteTree t = full8();
  ValueFunctional psi;
  psi.set({}, "011010");
  CoveringResult r = build_covering_test(t, Expulsion(), psi, {}, LevelFn(Rational(8)),
                                         LevelFn(Rational(2)), LevelFn(Rational(0)), 2);
  REQUIRE(r.test.levels.size() == 2);
  for (size_t n = 0; n < 2; ++n) {
    REQUIRE(r.test.levels[n].size() == 1);
    const Bits& v = *r.test.levels[n].strings().begin();
    CHECK(bits_prefix(v, "011010"));
    CHECK(split_measure(as_vector(r.test.levels[n]), "") <= pow2_neg(static_cast<unsigned>(n)));
  }
  CHECK(check_covering(r, t, psi, {}, LevelFn(Rational(2))) == std::nullopt);
}

TEST_CASE("covering test on random total functionals") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 12; ++trial) {
    FiniteTree t = oracle::full_tree(8, 3);
    ValueFunctional psi = oracle::random_functional(rng, t, 4, 2);
    CoveringResult r = build_covering_test(t, Expulsion(), psi, {}, LevelFn(Rational(8)),
                                           LevelFn(Rational(2)), LevelFn(Rational(0)), 3);
    REQUIRE(r.test.levels.size() == 3);
    for (size_t n = 0; n < 3; ++n) {
      CHECK(split_measure(as_vector(r.test.levels[n]), "") <= pow2_neg(static_cast<unsigned>(n)));
    }
    size_t leaves = 0;
    for (const Node& x : r.t_hat.nodes) {
      if (x.size() != 3) continue;
      ++leaves;
      for (const CylinderSet& v : r.test.levels) CHECK(v.covers(psi.output(x)));
    }
    CHECK(leaves > 0);
    CHECK(check_covering(r, t, psi, {}, LevelFn(Rational(2))) == std::nullopt);
  }
}

TEST_CASE("covering test reports the failing round and node") {
  FiniteTree t = full8();
  ValueFunctional psi = oracle::coded_functional(t, 3);
  try {
    build_covering_test(t, Expulsion(), psi, {}, LevelFn(Rational(8)), LevelFn(Rational(3)),
                        LevelFn(Rational(0)), 1);
    FAIL("capture precondition ignored");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("round 0, node <>") != std::string::npos);
  }
}

namespace {

ConditionSpec condition(const FiniteTree& t) {
  ConditionSpec c;
  c.ambient = t;
  c.p = LevelFn(Rational(4));
  c.q = LevelFn(Rational(1));
  c.eps = LevelFn(std::vector<Rational>(2, Rational(1, 2)), 0);
  c.split_k = 1;
  return c;
}

}  // namespace

TEST_CASE("classification: divergence everywhere") {
  FiniteTree t = oracle::full_tree(4, 2);
  ConditionSpec c = condition(t);
  ValueFunctional psi;
  Classification r = classify_condition(c, psi, LevelFn(Rational(2)));
  REQUIRE(std::holds_alternative<ConditionCase1>(r));
  const auto& c1 = std::get<ConditionCase1>(r);
  CHECK(c1.xi == Node{});
  CHECK(c1.m == 0);
  CHECK(c1.t_hat.nodes == t.nodes);
  CHECK(check_case1(c1, c, psi, LevelFn(Rational(2))) == std::nullopt);
}

TEST_CASE("classification: total functional") {
  FiniteTree t = oracle::full_tree(4, 2);
  ConditionSpec c = condition(t);
  ValueFunctional psi = oracle::coded_functional(t, 2);
  Classification r = classify_condition(c, psi, LevelFn(Rational(2)));
  REQUIRE(std::holds_alternative<ConditionCase2>(r));
  CHECK(std::get<ConditionCase2>(r).depth == 4);
}

TEST_CASE("classification: divergence above one child") {
  FiniteTree t = oracle::full_tree(4, 2);
  ConditionSpec c = condition(t);
  ValueFunctional psi;
  for (const Node& x : t.nodes) {
    if (!x.empty() && x[0] != 2) psi.set(x, "1");
  }
  LevelFn p_hat(Rational(2));
  Classification r = classify_condition(c, psi, p_hat);
  REQUIRE(std::holds_alternative<ConditionCase1>(r));
  const auto& c1 = std::get<ConditionCase1>(r);
  CHECK(c1.xi == Node{2});
  CHECK(c1.m == 0);
  CHECK(check_case1(c1, c, psi, p_hat) == std::nullopt);

  NodeSet conv;
  for (const Node& x : t.nodes) {
    if (psi.defined_at(x, 0)) conv.insert(x);
  }
  CHECK(oracle::SubtreeEnumerator(t.nodes, conv, p_hat).exists({}));
  CHECK_FALSE(oracle::SubtreeEnumerator(t.nodes, conv, p_hat).exists({2}));

  ConditionCase1 tampered = c1;
  tampered.t_hat.nodes.erase({2, 3});
  CHECK(check_case1(tampered, c, psi, p_hat).has_value());
}

TEST_CASE("classification preconditions") {
  FiniteTree t = oracle::full_tree(4, 2);
  ConditionSpec c = condition(t);
  c.q = LevelFn(Rational(2));
  CHECK_THROWS_AS(classify_condition(c, ValueFunctional(), LevelFn(Rational(2))), Error);
  c = condition(t);
  c.q = LevelFn(Rational(1, 2));
  CHECK_THROWS_AS(classify_condition(c, ValueFunctional(), LevelFn(Rational(2))), Error);
}
