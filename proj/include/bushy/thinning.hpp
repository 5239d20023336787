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

#ifndef BUSHY_THINNING_HPP_
#define BUSHY_THINNING_HPP_

#include <optional>
#include <string>
#include <vector>

#include "bushy/bigness.hpp"
#include "bushy/functional.hpp"
#include "bushy/trees.hpp"

namespace bushy {

// Every non-leaf node with from <= |node| <= to has exactly ceil(p(|node|))
// children.
std::optional<std::string> check_exact_bushy(const NodeSet& tree, const LevelFn& p, size_t from,
                                             size_t to);

struct ThinStep {
  Node node;
  size_t children = 0;
  size_t kept = 0;
  Rational lambda;     // budget entering this node
  Rational threshold;  // children with surviving fraction above this are kept
  Rational eps;
};

struct ThinResult {
  FiniteTree tree;
  LevelFn p_hat;
  std::vector<ThinStep> steps;
};

// T is exactly p-bushy over root with all leaves at one level; eps is indexed
// by absolute level.
ThinResult exact_thin(const FiniteTree& t, const Node& root, const LevelFn& p, const NodeSet& s,
                      const Rational& lambda, const LevelFn& eps);

struct PruneResult {
  FiniteTree tree;           // T'
  SmallTable outside_small;  // ambient minus T' labelled over the stem at q + q'
};

// T' = {x in T : [S] upward closure is q'-small over x}, restricted to the
// part reachable from the stem.
PruneResult avoid_prune(const FiniteTree& ambient, const FiniteTree& t, const Node& stem,
                        const NodeSet& s, const LevelFn& p, const LevelFn& q, const LevelFn& q1);

PruneResult force_divergence(const FiniteTree& ambient, const FiniteTree& t, const Node& stem,
                             const ValueFunctional& psi, size_t n, const LevelFn& p,
                             const LevelFn& q, const LevelFn& q2);

struct Stage {
  uint32_t time = 0;
  std::vector<Node> frontier;
  std::vector<Node> attached;  // frontier nodes that received a tree
  std::vector<Node> skipped;   // frontier nodes no longer in T at that time
};

struct StagingResult {
  FiniteTree tree;
  std::vector<Stage> stages;
};

// Attaches, stage by stage, p_hat-bushy trees whose leaves compute the next
// value of psi, for values 0..m.
StagingResult stage_totality(const FiniteTree& ambient, const Node& stem,
                             const ValueFunctional& psi, const LevelFn& p_hat, size_t m,
                             const Expulsion& expulsion);

}  // namespace bushy

#endif  // BUSHY_THINNING_HPP_
