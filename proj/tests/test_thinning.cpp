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

#include "bushy/error.hpp"
#include "bushy/thinning.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bushy;

namespace {

// Independent replay of the thinning recursion for a full binary tree of
// depth 2, used to freeze the expected output.
NodeSet replay_binary_depth2(const NodeSet& s, Rational lambda, Rational eps) {
  NodeSet out{{}};
  auto frac = [&](const Node& c) -> Rational {
    Rational hit = 0;
    for (uint32_t i = 0; i < 2; ++i) hit += s.count(extend(c, i)) ? 1 : 0;
    return hit / 2;
  };
  Rational th0 = 1 - (1 - lambda) / (1 - eps);
  for (uint32_t a = 0; a < 2; ++a) {
    Node c{a};
    if (!(frac(c) > th0)) continue;
    out.insert(c);
    Rational lam1 = lambda - eps;
    Rational th1 = 1 - (1 - lam1) / (1 - eps);
    for (uint32_t b = 0; b < 2; ++b) {
      Node g{a, b};
      if (Rational(s.count(g)) > th1) out.insert(g);
    }
  }
  return out;
}

ValueFunctional total_use1(const FiniteTree& t, const std::string& bit = "0") {
  ValueFunctional f;
  for (const Node& x : t.nodes) {
    std::string o;
    for (size_t i = 0; i < x.size(); ++i) o += bit;
    f.set(x, o);
  }
  return f;
}

}  // namespace

TEST_CASE("check_exact_bushy examples") {
  FiniteTree t = oracle::full_tree(2, 2);
  CHECK_FALSE(check_exact_bushy(t.nodes, LevelFn(rat(2)), 0, 1));
  CHECK_FALSE(check_exact_bushy(t.nodes, LevelFn(rat(3, 2)), 0, 1));
  NodeSet cut = t.nodes;
  cut.erase({1, 1});
  auto v = check_exact_bushy(cut, LevelFn(rat(2)), 0, 1);
  REQUIRE(v);
  CHECK(v->find("<1>") != std::string::npos);
  CHECK(v->find("1 children") != std::string::npos);
}

TEST_CASE("exact_thin with nothing to thin") {
  FiniteTree t = oracle::full_tree(3, 1);
  NodeSet s{{0}, {1}, {2}};
  ThinResult r = exact_thin(t, {}, LevelFn(rat(3)), s, rat(1, 2), LevelFn(rat(1, 3)));
  CHECK(r.tree.nodes == t.nodes);
}

TEST_CASE("exact_thin worked example") {
  FiniteTree t = oracle::full_tree(2, 2);
  NodeSet s{{0, 0}, {0, 1}, {1, 0}};
  NodeSet expected{{}, {0}, {0, 0}, {0, 1}};
  CHECK(replay_binary_depth2(s, rat(7, 10), rat(1, 4)) == expected);
  ThinResult r = exact_thin(t, {}, LevelFn(rat(2)), s, rat(7, 10), LevelFn(rat(1, 4)));
  CHECK(r.tree.nodes == expected);
  REQUIRE(r.steps.size() == 2);
  CHECK(r.steps[0].threshold == rat(3, 5));
  CHECK(r.steps[0].kept == 1);
  CHECK_FALSE(check_bushy_over(r.tree.nodes, LevelFn(rat(1, 2)), {}));
}

TEST_CASE("exact_thin preconditions") {
  FiniteTree t = oracle::full_tree(2, 2);
  NodeSet s{{0, 0}};
  CHECK_THROWS_AS(exact_thin(t, {}, LevelFn(rat(2)), s, rat(7, 10), LevelFn(rat(1, 4))), Error);
  NodeSet all{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  CHECK_THROWS_AS(exact_thin(t, {}, LevelFn(rat(2)), all, rat(1, 3), LevelFn(rat(1, 4))), Error);
  CHECK_THROWS_AS(exact_thin(t, {}, LevelFn(rat(3)), all, rat(7, 10), LevelFn(rat(1, 4))), Error);
}

TEST_CASE("exact_thin randomized") {
  std::mt19937_64 rng(5);
  FiniteTree t = oracle::full_tree(2, 4);
  std::vector<Node> leaves = leaves_of(t.nodes);
  LevelFn eps(rat(1, 10));
  int done = 0;
  while (done < 200) {
    NodeSet s = oracle::random_subset(rng, NodeSet(leaves.begin(), leaves.end()), 0.8);
    if (!(Rational(s.size()) / 16 > rat(3, 5))) continue;
    ++done;
    ThinResult r = exact_thin(t, {}, LevelFn(rat(2)), s, rat(3, 5), eps);
    for (const Node& l : leaves_of(r.tree.nodes)) CHECK(s.count(l));
    CHECK(oracle::is_bushy_witness(r.tree.nodes, LevelFn(rat(1, 5)), {}, s));
    for (const ThinStep& st : r.steps) CHECK(Rational(st.kept) > st.eps * Rational(st.children));
  }
}

TEST_CASE("avoid_prune examples") {
  FiniteTree t = oracle::full_tree(4, 3);
  LevelFn p(rat(4)), one(rat(1));
  PruneResult r = avoid_prune(t, t, {}, {}, p, one, one);
  CHECK(r.tree.nodes == t.nodes);
  CHECK_FALSE(check_small_table(r.outside_small, t));

  NodeSet kids{{0}, {1}, {2}, {3}};
  CHECK_THROWS_AS(avoid_prune(t, t, {}, kids, p, one, one), Error);

  // With q' = 1 smallness means no target above the stem at all.
  NodeSet far{{1, 2}, {2, 0, 0}};
  PruneResult r2 = avoid_prune(t, t, {0}, far, p, one, one);
  CHECK(r2.tree.nodes == [&] {
    NodeSet c = cone_of(t.nodes, {0});
    c.insert(Node{});
    return c;
  }());
}

TEST_CASE("avoid_prune randomized") {
  std::mt19937_64 rng(9);
  FiniteTree amb = oracle::full_tree(6, 3);
  LevelFn p(rat(6)), q(rat(1)), q1(rat(2));
  int runs = 0;
  for (int trial = 0; trial < 200; ++trial) {
    NodeSet s = oracle::random_subset(rng, amb.nodes, 0.08);
    s.erase(Node{});
    TreeIndex idx(amb.nodes);
    NodeSet up;
    for (const Node& x : amb.nodes) {
      for (size_t k = 0; k <= x.size(); ++k) {
        if (s.count(Node(x.begin(), x.begin() + k))) up.insert(x);
      }
    }
    if (is_big(up, q1, {}, idx)) {
      CHECK_THROWS_AS(avoid_prune(amb, amb, {}, s, p, q, q1), Error);
      continue;
    }
    ++runs;
    PruneResult r = avoid_prune(amb, amb, {}, s, p, q, q1);
    for (const Node& x : r.tree.nodes) CHECK_FALSE(up.count(x));
    CHECK_FALSE(check_bushy_over(r.tree.nodes, LevelFn(rat(3)), {}));
    CHECK_FALSE(check_small_table(r.outside_small, amb));
  }
  CHECK(runs > 20);
}

TEST_CASE("force_divergence") {
  FiniteTree t = oracle::full_tree(4, 3);
  LevelFn p(rat(4)), q(rat(1)), q2(rat(2));
  ValueFunctional none;
  CHECK(force_divergence(t, t, {}, none, 1, p, q, q2).tree.nodes == t.nodes);

  ValueFunctional every;
  for (uint32_t i = 0; i < 4; ++i) every.set({i}, "1");
  CHECK_THROWS_AS(force_divergence(t, t, {}, every, 1, p, q, q2), Error);

  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    ValueFunctional f;
    for (const Node& x : t.nodes) {
      if (x.size() >= 2 && rng() % 5 == 0) f.set(x, "01");
    }
    NodeSet conv;
    for (const Node& x : t.nodes) {
      if (f.restrict_to(x, 2)) conv.insert(x);
    }
    if (is_big(conv, q2, {}, TreeIndex(t.nodes))) continue;
    PruneResult r = force_divergence(t, t, {}, f, 2, p, q, q2);
    for (const Node& x : r.tree.nodes) CHECK_FALSE(f.restrict_to(x, 2));
  }
}

TEST_CASE("stage_totality examples") {
  FiniteTree t = oracle::full_tree(3, 3);
  LevelFn p_hat(rat(2));
  ValueFunctional f = total_use1(t);

  StagingResult r0 = stage_totality(t, {}, f, p_hat, 0, Expulsion());
  CHECK(r0.tree.nodes == NodeSet{{}, {0}, {1}});

  StagingResult r2 = stage_totality(t, {}, f, p_hat, 2, Expulsion());
  NodeSet skeleton;
  for (const Node& x : t.nodes) {
    bool in = true;
    for (uint32_t v : x) in = in && v < 2;
    if (in) skeleton.insert(x);
  }
  CHECK(r2.tree.nodes == skeleton);
  for (const Node& l : leaves_of(r2.tree.nodes)) CHECK(f.defined_at(l, 2));
  CHECK(r2.stages.size() == 3);
}

TEST_CASE("stage_totality routes around divergence") {
  FiniteTree t = oracle::full_tree(4, 3);
  LevelFn p_hat(rat(2));
  ValueFunctional f;
  for (const Node& x : t.nodes) {
    if (x.size() == 1) f.set(x, "0");
    // Value 1 diverges above grandchildren with an even last entry.
    if (x.size() >= 2 && x[1] % 2 == 1) f.set(x, "00");
  }
  StagingResult r = stage_totality(t, {}, f, p_hat, 1, Expulsion());
  for (const Node& l : leaves_of(r.tree.nodes)) {
    CHECK(f.defined_at(l, 1));
    CHECK(l[1] % 2 == 1);
  }
  NodeSet conv;
  for (const Node& x : t.nodes) {
    if (f.defined_at(x, 1)) conv.insert(x);
  }
  for (const Node& x : r.stages[1].frontier) CHECK(decide_big(conv, p_hat, x, t).big);

  ValueFunctional sparse;
  for (const Node& x : t.nodes) {
    if (x.size() == 1) sparse.set(x, "0");
    if (x.size() >= 2 && x[1] == 3) sparse.set(x, "00");
  }
  try {
    stage_totality(t, {}, sparse, p_hat, 1, Expulsion());
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("value 1") != std::string::npos);
    CHECK(std::string(e.what()).find("<0>") != std::string::npos);
  }
}

TEST_CASE("stage_totality skips expelled frontier nodes") {
  FiniteTree t = oracle::full_tree(3, 3);
  ValueFunctional f = total_use1(t);
  NodeSet core = t.nodes;
  for (const Node& x : t.nodes) {
    if (!x.empty() && x[0] == 0) core.erase(x);
  }
  // Node <0> leaves T at time 0, so nothing grows above it.
  Expulsion ex(core, {});
  StagingResult r = stage_totality(t, {}, f, LevelFn(rat(2)), 1, ex);
  CHECK(r.stages[1].skipped == std::vector<Node>{{0}});
  CHECK(cone_of(r.tree.nodes, {0}) == NodeSet{{0}});
}
