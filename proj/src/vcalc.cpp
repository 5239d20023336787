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

#include <set>
#include <string>

#include "bushy/error.hpp"
#include "bushy/splitcalc.hpp"

namespace bushy {

namespace {

void require_level(const CylinderSet& v, unsigned n) {
  for (const Bits& b : v.strings()) {
    if (b.size() != n) {
      fail(ErrorKind::kInvalidInput, "string \"" + b + "\" is not of length " + std::to_string(n));
    }
  }
}

VCert decide(VKind kind, const ValueFunctional& psi, const FiniteTree& ambient, const Node& eta,
             unsigned n, const LevelFn& q, const CylinderSet& v) {
  require_level(v, n);
  VCert c;
  c.kind = kind;
  c.v = v;
  c.n = n;
  c.q = q;
  c.eta = eta;
  c.defining = preimage(psi, ambient, n, v.strings(), kind == VKind::kPlain);
  BigDecision d = decide_big(c.defining, q, eta, ambient);
  c.member = kind == VKind::kTilde ? !d.big : d.big;
  c.witness = std::move(d.witness);
  c.table = std::move(d.table);
  return c;
}

}  // namespace

NodeSet preimage(const ValueFunctional& psi, const FiniteTree& ambient, unsigned n,
                 const std::set<Bits>& v, bool inside) {
  NodeSet out;
  for (const Node& x : ambient.nodes) {
    auto r = psi.restrict_to(x, n);
    if (!r) continue;
    if ((v.count(*r) != 0) == inside) out.insert(x);
  }
  return out;
}

VCert in_tilde_V(const ValueFunctional& psi, const FiniteTree& ambient, const Node& eta,
                 unsigned n, const LevelFn& q, const CylinderSet& v) {
  return decide(VKind::kTilde, psi, ambient, eta, n, q, v);
}

VCert in_V(const ValueFunctional& psi, const FiniteTree& ambient, const Node& eta, unsigned n,
           const LevelFn& q, const CylinderSet& v) {
  // V is in the big family iff 2^n \ V is outside the small family, i.e. the
  // nodes landing in V are q-big.
  return decide(VKind::kPlain, psi, ambient, eta, n, q, v);
}

std::optional<std::string> check_vcert(const VCert& c, const ValueFunctional& psi,
                                       const FiniteTree& ambient) {
  NodeSet s = preimage(psi, ambient, c.n, c.v.strings(), c.kind == VKind::kPlain);
  if (s != c.defining) return "defining set does not match the functional";
  bool big = c.kind == VKind::kTilde ? !c.member : c.member;
  if (big) {
    if (!c.witness) return "missing witness";
    BigWitness w = *c.witness;
    if (w.root != c.eta || !(w.p == c.q)) return "witness root or bound mismatch";
    w.targets = cone_of(s, c.eta);
    if (auto e = check_witness(w, &ambient.nodes)) return "witness: " + *e;
  } else {
    if (!c.table) return "missing small table";
    if (c.table->root != c.eta || !(c.table->p == c.q)) return "table root or bound mismatch";
    if (c.table->targets != cone_of(s, c.eta)) return "table targets mismatch";
    if (auto e = check_small_table(*c.table, ambient)) return "table: " + *e;
  }
  return std::nullopt;
}

namespace {

CylinderSet set_op(const CylinderSet& a, const CylinderSet& b, char op) {
  std::set<Bits> out;
  const auto& x = a.strings();
  const auto& y = b.strings();
  for (const Bits& s : x) {
    bool in_b = y.count(s) != 0;
    if ((op == '&' && in_b) || (op == '-' && !in_b) || op == '|') out.insert(s);
  }
  if (op == '|') out.insert(y.begin(), y.end());
  return CylinderSet(out);
}

void expect(const VCert& c, bool member, int item, const char* what) {
  if (c.member != member) {
    fail(ErrorKind::kPrecondition,
         "item " + std::to_string(item) + ": hypothesis " + what + " does not hold");
  }
}

}  // namespace

CalculusOutcome calculus_check(int item, const CalculusInstance& in) {
  if (item < 1 || item > 6) fail(ErrorKind::kInvalidInput, "item must be 1..6");
  size_t from = in.eta.size();
  size_t to = in.ambient.max_depth;
  if (!pointwise_nonneg(in.q, from, to) || !pointwise_nonneg(in.q1, from, to)) {
    fail(ErrorKind::kPrecondition, "q and q' must be nonnegative");
  }
  if ((item == 3 || item == 5) && !pointwise_nonneg(in.q1 - in.q, from, to)) {
    fail(ErrorKind::kPrecondition, "items 3 and 5 need q' >= q");
  }
  auto tv = [&](const CylinderSet& v, const LevelFn& q) {
    return in_tilde_V(in.psi, in.ambient, in.eta, in.n, q, v);
  };
  auto pv = [&](const CylinderSet& v, const LevelFn& q) {
    return in_V(in.psi, in.ambient, in.eta, in.n, q, v);
  };
  CalculusOutcome out;
  switch (item) {
    case 1: {
      // V in V_q exactly when 2^n \ V is not in V~_q.
      VCert a = pv(in.v, in.q);
      VCert b = tv(complement_in(in.v, in.n), in.q);
      out.hypotheses = {a};
      out.conclusion = b;
      out.holds = a.member != b.member;
      return out;
    }
    case 2: {
      VCert a = tv(in.v, in.q), b = tv(in.v1, in.q1);
      expect(a, true, 2, "V in V~_q");
      expect(b, true, 2, "V' in V~_q'");
      out.hypotheses = {a, b};
      out.conclusion = tv(set_op(in.v, in.v1, '&'), in.q + in.q1);
      out.holds = out.conclusion.member;
      return out;
    }
    case 3: {
      VCert a = tv(in.v, in.q), b = pv(in.v1, in.q1);
      expect(a, true, 3, "V in V~_q");
      expect(b, true, 3, "V' in V_q'");
      out.hypotheses = {a, b};
      out.conclusion = pv(set_op(in.v, in.v1, '&'), in.q1 - in.q);
      out.holds = out.conclusion.member;
      return out;
    }
    case 4: {
      VCert a = tv(in.v, in.q), b = pv(in.v1, in.q1);
      expect(a, true, 4, "V in V~_q");
      expect(b, false, 4, "V' not in V_q'");
      out.hypotheses = {a, b};
      out.conclusion = tv(set_op(in.v, in.v1, '-'), in.q + in.q1);
      out.holds = out.conclusion.member;
      return out;
    }
    case 5: {
      VCert a = tv(in.v, in.q), b = tv(in.v1, in.q1);
      expect(a, true, 5, "V in V~_q");
      expect(b, false, 5, "V' not in V~_q'");
      out.hypotheses = {a, b};
      out.conclusion = pv(set_op(in.v, in.v1, '-'), in.q1 - in.q);
      out.holds = out.conclusion.member;
      return out;
    }
    default: {
      VCert a = pv(in.v, in.q), b = pv(in.v1, in.q1);
      expect(a, false, 6, "V not in V_q");
      expect(b, false, 6, "V' not in V_q'");
      out.hypotheses = {a, b};
      out.conclusion = pv(set_op(in.v, in.v1, '|'), in.q + in.q1);
      out.holds = !out.conclusion.member;
      return out;
    }
  }
}

}  // namespace bushy
