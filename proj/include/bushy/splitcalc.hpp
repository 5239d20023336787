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

#ifndef BUSHY_SPLITCALC_HPP_
#define BUSHY_SPLITCALC_HPP_

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "bushy/bigness.hpp"
#include "bushy/functional.hpp"
#include "bushy/hashfam.hpp"
#include "bushy/thinning.hpp"
#include "bushy/trees.hpp"

namespace bushy {

// Membership of V (a set of length-n strings) in the small family
// (kTilde: nodes landing outside V are q-small over eta) or the big family
// (kPlain: nodes landing inside V are q-big over eta).
enum class VKind { kTilde, kPlain };

struct VCert {
  VKind kind = VKind::kTilde;
  bool member = false;
  CylinderSet v;
  unsigned n = 0;
  LevelFn q;
  Node eta;
  NodeSet defining;  // the preimage set handed to decide_big
  std::optional<BigWitness> witness;
  std::optional<SmallTable> table;
};

// Nodes of the ambient whose first n output bits exist and satisfy `inside`.
NodeSet preimage(const ValueFunctional& psi, const FiniteTree& ambient, unsigned n,
                 const std::set<Bits>& v, bool inside);

VCert in_tilde_V(const ValueFunctional& psi, const FiniteTree& ambient, const Node& eta,
                 unsigned n, const LevelFn& q, const CylinderSet& v);
VCert in_V(const ValueFunctional& psi, const FiniteTree& ambient, const Node& eta, unsigned n,
           const LevelFn& q, const CylinderSet& v);

// Recomputes the defining set and checks the evidence.
std::optional<std::string> check_vcert(const VCert& c, const ValueFunctional& psi,
                                       const FiniteTree& ambient);

struct CalculusInstance {
  ValueFunctional psi;
  FiniteTree ambient;
  Node eta;
  unsigned n = 0;
  CylinderSet v, v1;
  LevelFn q, q1;
};

struct CalculusOutcome {
  bool holds = false;
  std::vector<VCert> hypotheses;
  VCert conclusion;
};

// Items 1..6 of the calculus. Throws kPrecondition when a hypothesis fails.
CalculusOutcome calculus_check(int item, const CalculusInstance& inst);

struct CaptureResult {
  CylinderSet v_star;
  FiniteTree t_hat;
  unsigned n_bits = 0;
  unsigned k = 0;
  size_t level_t = 0;
  bool direct = false;
  // Hash branch only.
  size_t level_l = 0;
  size_t m_sets = 0;
  std::vector<size_t> chosen;
  std::optional<HashFamily> family;
  // Closure of the chosen intersection, checked against the two bands.
  bool closure_low_band = true;
  bool closure_high_band = true;
};

struct CaptureOptions {
  uint64_t seed = 0;
  unsigned max_n = 16;
  bool skip_direct = false;
};

// Least k with (1 - lambda)^k < lambda.
unsigned capture_k(const Rational& lambda);

CaptureResult capture_small_measure(const FiniteTree& ambient, const FiniteTree& core,
                                    const ValueFunctional& psi, const Node& rho,
                                    const Rational& lambda, const LevelFn& p, const LevelFn& q,
                                    const LevelFn& p_hat, const CaptureOptions& opt = {});

std::optional<std::string> check_capture(const CaptureResult& r, const FiniteTree& ambient,
                                         const FiniteTree& core, const ValueFunctional& psi,
                                         const Node& rho, const Rational& lambda,
                                         const LevelFn& p_hat);

struct Partition {
  std::vector<std::vector<size_t>> parts;
  Rational min_share;
};

// measures[i][x] is the weight of element x under measure i.
Partition partition_by_measures(const std::vector<std::vector<Rational>>& measures);

struct SplitInstance {
  ValueFunctional psi;
  FiniteTree ambient;  // T~_i
  FiniteTree core;     // T_i
  Node eta;
};

struct SplitParams {
  LevelFn p, q, q1, q2;  // p, q, q', q''
  std::vector<LevelFn> qi;
  std::set<Bits> v_star;
  unsigned n_star = 0;
};

struct DisjointPart {
  std::set<Bits> v;
  unsigned n = 0;
  BigWitness witness;
};

struct DisjointCert {
  std::vector<DisjointPart> parts;  // indexed like the instances
};

struct NonTotalCert {
  size_t index = 0;
  FiniteTree tree;
  NodeSet s;            // finite big set whose extensions in tree diverge
  unsigned n_hat = 0;
  std::set<Bits> w_hat;  // W at level n_hat
  SmallTable outside;    // ambient minus tree, small over every node of tree
  BigWitness s_witness;  // s is big over eta at s_witness.p
};

struct ComputableCert {
  size_t index = 0;
  FiniteTree tree;
  unsigned n_bar = 0;
  unsigned n_top = 0;
  size_t width = 0;
  std::vector<std::set<Bits>> w_levels;  // W at n_bar+1 .. n_top
  SmallTable outside;
  SmallTable s_hat_small;  // nodes leaving W are small over eta
};

struct Inconclusive {
  unsigned depth = 0;
  std::string reason;
};

using SplitCertificate = std::variant<DisjointCert, NonTotalCert, ComputableCert, Inconclusive>;

std::string variant_name(const SplitCertificate& c);

// Least output length over the leaves of the instance's cone.
unsigned functional_depth(const SplitInstance& inst);

// Levels n* < n <= D are examined, D being the largest level at which every
// instance converges on a (q' + 2jq)-big set.
SplitCertificate j_split(const std::vector<SplitInstance>& inst, const SplitParams& params);

// Independent re-verification of a certificate.
std::optional<std::string> check_split_certificate(const SplitCertificate& c,
                                                   const std::vector<SplitInstance>& inst,
                                                   const SplitParams& params);

struct Condition {
  Node eta;
  FiniteTree ambient;
  FiniteTree core;
  LevelFn p_t, q_t;
};

std::optional<std::string> check_step_parameters(const Condition& cond, const LevelFn& p_hat);

struct SplittingTree {
  Node eta;
  FiniteTree tree;
  std::set<Bits> v;
  unsigned n = 0;
};

enum class ExtensionKind { kDivergence, kNonTotal, kComputable };

struct Extension {
  ExtensionKind kind;
  Condition cond;
  SplitCertificate source;  // the j_split certificate, or Inconclusive for divergence
  size_t index = 0;
};

struct StepResult {
  std::vector<SplittingTree> trees;
  std::optional<Extension> extension;
  std::optional<Inconclusive> inconclusive;
};

StepResult split_step(const Condition& cond, const ValueFunctional& psi,
                      const std::vector<Node>& frontier, const LevelFn& p_hat);

}  // namespace bushy

#endif  // BUSHY_SPLITCALC_HPP_
