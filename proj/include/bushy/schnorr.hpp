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

#ifndef BUSHY_SCHNORR_HPP_
#define BUSHY_SCHNORR_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bushy/bigness.hpp"
#include "bushy/functional.hpp"
#include "bushy/splitcalc.hpp"
#include "bushy/thinning.hpp"
#include "bushy/trees.hpp"

namespace bushy {

struct TestEntry {
  uint32_t index = 0;
  CylinderSet v;
  uint32_t stage = 0;
};

// A finite oracle test: each node emits values Psi(index) at stages. An entry
// at node x needs stage >= |x|, so whatever is visible at time t along a
// path is fixed once the path has length t.
class TestFunctional {
 public:
  TestFunctional() = default;
  TestFunctional(std::map<Node, std::vector<TestEntry>> entries, Rational budget)
      : entries_(std::move(entries)), budget_(std::move(budget)) {}

  const std::map<Node, std::vector<TestEntry>>& entries() const { return entries_; }
  const Rational& budget() const { return budget_; }
  void add(const Node& x, TestEntry e) { entries_[x].push_back(std::move(e)); }

  // Psi^x[t]: the union of Psi^x(m) for m <= t emitted by time t.
  CylinderSet visible(const Node& x, uint32_t t) const;
  // Psi^x(m) for m <= n, whatever the stage; nullopt unless all are emitted.
  std::optional<CylinderSet> through(const Node& x, uint32_t n) const;
  uint32_t max_stage() const;

  // Binary strings, use bound, one value per index along a path, and the
  // budget discipline at every ambient node.
  std::optional<std::string> validate(const FiniteTree& ambient) const;

 private:
  std::map<Node, std::vector<TestEntry>> entries_;
  Rational budget_{0};
};

struct RoundCheck {
  std::string name;
  bool ok = true;
  std::string lhs;
  std::string rhs;
};

struct RoundTrace {
  int round = 0;  // index of the tree built, n + 2 for the step from n
  uint32_t t = 0;
  size_t l = 0;
  Bits rho;
  Rational lambda;
  std::vector<RoundCheck> checks;
};

// Index j of every vector below stands for the subscript j - 1 where the
// sequence starts at -1 (rho, level, m), and for j where it starts at 0.
struct RoundState {
  Node eta;
  LevelFn p, q, eps;
  Rational lambda_star;
  std::vector<FiniteTree> trees;  // T_0 .. T_{n+1}
  std::vector<Bits> rho;          // rho_{-1} .. rho_n
  std::vector<Rational> lambda;   // lambda_0 .. lambda_{n+1}
  std::vector<Rational> lambda_bar;  // lambda_bar_0 .. lambda_bar_{n+1}
  std::vector<size_t> level;      // l_{-1} .. l_{n+1}
  std::vector<uint32_t> time;     // t_0 .. t_{n+1}
  std::vector<unsigned> m;        // m_{-1} .. m_{n+1}
  std::vector<RoundTrace> traces;

  int n() const { return static_cast<int>(trees.size()) - 2; }
};

// lambda_bar^2 / (4 * nodes * 2^m): the gap schedule.
Rational gap_bound(const Rational& lambda_bar, size_t nodes, unsigned m);

// Ambient nodes present in T[t], closed under prefixes.
NodeSet present_nodes(const FiniteTree& ambient, const Expulsion& core, uint32_t t);

// Builds T_0, lambda_0, l_0, t_0, m_0.
RoundState initial_round(const TestFunctional& psi, const FiniteTree& ambient,
                         const Expulsion& core, const Node& eta, const LevelFn& p,
                         const LevelFn& q, const LevelFn& eps);

// One inductive step: from T_{n+1}, rho_n to T_{n+2}, rho_{n+1}.
RoundState avoidance_round(const RoundState& state, const TestFunctional& psi,
                           const FiniteTree& ambient, const Expulsion& core);

// All inductive-hypothesis items for every index, with exact arithmetic.
std::vector<RoundCheck> check_round_state(const RoundState& state, const TestFunctional& psi,
                                          const FiniteTree& ambient, const Expulsion& core);

struct Avoider {
  FiniteTree t_hat;
  Bits x;
  size_t leaves_scanned = 0;
  size_t cylinders_scanned = 0;
};

Avoider assemble_avoider(const RoundState& state, const TestFunctional& psi,
                         const FiniteTree& ambient, const Expulsion& core);

struct ScheduledInstance {
  FiniteTree ambient;
  TestFunctional psi;
  LevelFn p, q, eps;
  std::vector<size_t> lengths;  // longest emitted string per depth
};

// Full tree of the given branching and depth whose test mass at depth d
// reaches lambda_star - 2^{-L_d}, with L_d fixed by the gap schedule for
// levels l_k = k + 1. From depth fill_depth on the gap is closed by one
// cylinder and deeper nodes emit empty values. lambda_star must be 2^{-a}.
ScheduledInstance scheduled_instance(uint64_t seed, uint32_t branching, unsigned depth,
                                     unsigned a, unsigned fill_depth);

struct CoveringRound {
  unsigned index = 0;
  uint32_t time = 0;
  size_t level = 0;
  Rational budget;  // per-node measure bound
  std::vector<Node> frontier;
  std::vector<Node> skipped;  // frontier nodes expelled by the waiting time
  std::vector<CaptureResult> captures;
};

struct CoveringResult {
  FiniteTree t_hat;
  SchnorrTest test;
  std::vector<CoveringRound> rounds;
};

CoveringResult build_covering_test(const FiniteTree& ambient, const Expulsion& core,
                                   const ValueFunctional& psi, const Node& eta,
                                   const LevelFn& p, const LevelFn& p_hat, const LevelFn& q,
                                   unsigned rounds);

// Measure and per-round coverage of every maximal node.
std::optional<std::string> check_covering(const CoveringResult& r, const FiniteTree& ambient,
                                          const ValueFunctional& psi, const Node& eta,
                                          const LevelFn& p_hat);

struct ConditionCase1 {
  Node xi;
  size_t m = 0;
  FiniteTree t_hat;       // core nodes above xi whose convergence set is not p_hat-big
  SmallTable conv_small;  // the convergence set at p_hat over xi
  SmallTable rest_small;  // ambient minus t_hat at p_hat + q over xi
};

struct ConditionCase2 {
  size_t depth = 0;  // every m below this was checked
  StagingResult staging;
};

using Classification = std::variant<ConditionCase1, ConditionCase2>;

struct ConditionSpec {
  Node eta;
  FiniteTree ambient;
  Expulsion core;
  LevelFn p, q;
  LevelFn eps;
  unsigned split_k = 1;  // allow-split exponent checked on declared levels
};

Classification classify_condition(const ConditionSpec& cond, const ValueFunctional& psi,
                                  const LevelFn& p_hat);

std::optional<std::string> check_case1(const ConditionCase1& c, const ConditionSpec& cond,
                                       const ValueFunctional& psi, const LevelFn& p_hat);

}  // namespace bushy

#endif  // BUSHY_SCHNORR_HPP_
