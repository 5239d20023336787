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

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "bushy/error.hpp"
#include "bushy/splitcalc.hpp"

namespace bushy {

Partition partition_by_measures(const std::vector<std::vector<Rational>>& measures) {
  if (measures.empty()) fail(ErrorKind::kInvalidInput, "need at least one measure");
  size_t n = measures[0].size();
  if (n > 14) fail(ErrorKind::kInvalidInput, "support larger than the exhaustive cap of 14");
  for (const auto& m : measures) {
    if (m.size() != n) fail(ErrorKind::kInvalidInput, "measures over different supports");
    Rational total = 0;
    for (const Rational& x : m) {
      if (x < 0) fail(ErrorKind::kInvalidInput, "negative weight");
      total += x;
    }
    if (total != 1) fail(ErrorKind::kInvalidInput, "a measure does not sum to 1");
  }
  size_t j = measures.size();
  // rest[i][x]: weight of measure i on elements x..n-1
  std::vector<std::vector<Rational>> rest(j, std::vector<Rational>(n + 1, Rational(0)));
  for (size_t i = 0; i < j; ++i) {
    for (size_t x = n; x-- > 0;) rest[i][x] = rest[i][x + 1] + measures[i][x];
  }
  std::vector<size_t> assign(n), best_assign(n);
  std::vector<Rational> share(j, Rational(0));
  Rational best = -1;
  std::function<void(size_t)> go = [&](size_t x) {
    Rational bound = share[0] + rest[0][x];
    for (size_t i = 1; i < j; ++i) bound = std::min<Rational>(bound, share[i] + rest[i][x]);
    if (bound <= best) return;
    if (x == n) {
      best = bound;
      best_assign = assign;
      return;
    }
    for (size_t i = 0; i < j; ++i) {
      assign[x] = i;
      share[i] += measures[i][x];
      go(x + 1);
      share[i] -= measures[i][x];
    }
  };
  go(0);
  Partition p;
  p.parts.assign(j, {});
  for (size_t x = 0; x < n; ++x) p.parts[best_assign[x]].push_back(x);
  p.min_share = best;
  return p;
}

std::string variant_name(const SplitCertificate& c) {
  switch (c.index()) {
    case 0: return "disjoint";
    case 1: return "nontotal";
    case 2: return "computable";
    default: return "inconclusive";
  }
}

unsigned functional_depth(const SplitInstance& inst) {
  size_t depth = SIZE_MAX;
  for (const Node& x : leaves_of(cone_of(inst.ambient.nodes, inst.eta))) {
    depth = std::min(depth, inst.psi.output(x).size());
  }
  return depth == SIZE_MAX ? 0 : static_cast<unsigned>(depth);
}

namespace {

using Strings = std::set<Bits>;

// One instance with its nodes grouped by visible output prefix.
class View {
 public:
  explicit View(const SplitInstance& in) : in_(in), idx_(in.ambient.nodes) {
    cone_ = cone_of(in.ambient.nodes, in.eta);
  }

  const SplitInstance& instance() const { return in_; }
  const NodeSet& cone() const { return cone_; }

  const std::map<Bits, NodeSet>& images(unsigned n) {
    auto it = images_.find(n);
    if (it != images_.end()) return it->second;
    std::map<Bits, NodeSet>& m = images_[n];
    for (const Node& x : cone_) {
      if (auto r = in_.psi.restrict_to(x, n)) m[*r].insert(x);
    }
    return m;
  }

  // Nodes landing inside (or outside) v at length n are q-big.
  bool big(const Strings& v, unsigned n, const LevelFn& q, bool inside) {
    NodeSet s;
    for (const auto& [b, nodes] : images(n)) {
      if ((v.count(b) != 0) == inside) s.insert(nodes.begin(), nodes.end());
    }
    return is_big(s, q, in_.eta, idx_);
  }
  bool in_plain(const Strings& v, unsigned n, const LevelFn& q) { return big(v, n, q, true); }
  bool in_tilde(const Strings& v, unsigned n, const LevelFn& q) { return !big(v, n, q, false); }

 private:
  const SplitInstance& in_;
  TreeIndex idx_;
  NodeSet cone_;
  std::map<unsigned, std::map<Bits, NodeSet>> images_;
};

struct Frame {
  std::vector<size_t> active;
  Strings v_star;
  unsigned n_star;
  LevelFn q1;
};

class Splitter {
 public:
  Splitter(const std::vector<SplitInstance>& inst, const SplitParams& prm)
      : inst_(inst), prm_(prm) {
    for (const auto& in : inst) views_.emplace_back(in);
    parts_.resize(inst.size());
  }

  // Largest n >= n* at which every instance converges on a bound-big set;
  // -1 when already n* fails.
  long available_depth(const LevelFn& bound) {
    size_t longest = 0;
    for (const auto& in : inst_) {
      for (const auto& [x, e] : in.psi.entries()) longest = std::max(longest, e.out.size());
    }
    long n = static_cast<long>(prm_.n_star) - 1;
    while (static_cast<size_t>(n + 1) <= longest) {
      bool all = true;
      for (auto& v : views_) {
        if (v.in_tilde(Strings{}, static_cast<unsigned>(n + 1), bound)) all = false;
      }
      if (!all) break;
      ++n;
    }
    if (n >= 0) n_max_ = static_cast<unsigned>(n);
    return n;
  }

  unsigned n_max() const { return n_max_; }

  SplitCertificate run() {
    Frame f{{}, prm_.v_star, prm_.n_star, prm_.q1};
    for (size_t i = 0; i < inst_.size(); ++i) f.active.push_back(i);
    while (true) {
      if (f.active.empty()) break;
      if (f.active.size() == 1) {
        size_t i = f.active[0];
        if (!views_[i].in_plain(f.v_star, f.n_star, prm_.q)) {
          fail(ErrorKind::kInternal, "base case: V* is not in the big family of instance " + std::to_string(i));
        }
        // Keep only strings the last instance actually outputs.
        Strings own;
        for (const auto& [b, nodes] : views_[i].images(f.n_star)) {
          if (f.v_star.count(b)) own.insert(b);
        }
        record(i, own, f.n_star);
        break;
      }
      std::optional<SplitCertificate> done = step(f);
      if (done) return *done;
    }
    DisjointCert d;
    for (auto& part : parts_) d.parts.push_back(std::move(*part));
    return d;
  }

 private:
  void record(size_t i, const Strings& v, unsigned n) {
    const SplitInstance& in = inst_[i];
    NodeSet s = preimage(in.psi, in.ambient, n, v, true);
    BigDecision d = decide_big(s, prm_.q, in.eta, in.ambient);
    if (!d.big) fail(ErrorKind::kInternal, "part for instance " + std::to_string(i) + " is not q-big");
    parts_[i] = DisjointPart{v, n, *d.witness};
  }

  // V*_n restricted to strings some active instance actually outputs.
  Strings extend_star(const Frame& f, unsigned n) {
    Strings out;
    for (size_t i : f.active) {
      for (const auto& [b, nodes] : views_[i].images(n)) {
        if (f.v_star.count(b.substr(0, f.n_star))) out.insert(b);
      }
    }
    return out;
  }

  void check_star(const Frame& f) {
    for (size_t i : f.active) {
      if (!views_[i].in_tilde(f.v_star, f.n_star, f.q1)) {
        fail(ErrorKind::kInternal, "recursion hypothesis fails for instance " + std::to_string(i));
      }
    }
  }

  std::optional<SplitCertificate> step(Frame& f) {
    if (f.n_star >= n_max_) {
      return Inconclusive{n_max_, "no level beyond n* = " + std::to_string(f.n_star)};
    }
    const LevelFn& q = prm_.q;
    std::map<unsigned, Strings> star;
    std::map<unsigned, std::map<size_t, Strings>> w;
    std::map<unsigned, Strings> w_all;
    for (unsigned n = f.n_star + 1; n <= n_max_; ++n) {
      star[n] = extend_star(f, n);
      for (size_t i : f.active) {
        Strings& wi = w[n][i];
        for (const Bits& b : star[n]) {
          if (views_[i].in_plain(Strings{b}, n, q)) wi.insert(b);
        }
        w_all[n].insert(wi.begin(), wi.end());
      }
    }

    // Case 1.
    LevelFn qq1 = q + f.q1;
    for (unsigned n = f.n_star + 1; n <= n_max_; ++n) {
      for (size_t ti : f.active) {
        if (views_[ti].in_tilde(w_all[n], n, qq1)) continue;
        Strings v_hat;
        for (const Bits& b : star[n]) {
          if (!w_all[n].count(b)) v_hat.insert(b);
        }
        if (!views_[ti].in_plain(v_hat, n, q)) {
          fail(ErrorKind::kInternal, "case 1: V*_n minus W is not in the big family");
        }
        auto member_any = [&](const Strings& v) {
          for (size_t i : f.active) {
            if (views_[i].in_plain(v, n, q)) return true;
          }
          return false;
        };
        std::vector<Bits> order(v_hat.begin(), v_hat.end());
        for (const Bits& b : order) {
          Strings less = v_hat;
          less.erase(b);
          if (member_any(less)) v_hat = std::move(less);
        }
        size_t hat_i = SIZE_MAX;
        for (size_t i : f.active) {
          if (views_[i].in_plain(v_hat, n, q)) {
            hat_i = i;
            break;
          }
        }
        record(hat_i, v_hat, n);
        Strings next;
        for (const Bits& b : star[n]) {
          if (!v_hat.count(b)) next.insert(b);
        }
        f.active.erase(std::find(f.active.begin(), f.active.end(), hat_i));
        f.v_star = std::move(next);
        f.n_star = n;
        f.q1 = f.q1 + q.scaled(Rational(2));
        check_star(f);
        return std::nullopt;
      }
    }

    if (n_max_ < f.n_star + 2) {
      return Inconclusive{n_max_, "depth " + std::to_string(n_max_) + " too shallow to classify widths"};
    }
    unsigned top = n_max_;
    std::vector<size_t> grow;
    for (size_t i : f.active) {
      if (w[top][i].size() > w[top - 1][i].size()) grow.push_back(i);
    }

    if (!grow.empty()) {
      // Case 2: one fresh string per growing instance.
      for (unsigned n = top; n > f.n_star; --n) {
        std::vector<Strings> cand;
        for (size_t i : grow) {
          Strings c;
          for (const Bits& b : w[n][i]) {
            bool taken = false;
            for (size_t o : f.active) {
              if (std::find(grow.begin(), grow.end(), o) == grow.end() && w[n][o].count(b)) taken = true;
            }
            if (!taken) c.insert(b);
          }
          cand.push_back(std::move(c));
        }
        std::vector<Bits> pick(grow.size());
        std::set<Bits> used;
        std::function<bool(size_t)> choose = [&](size_t k) {
          if (k == grow.size()) return true;
          for (const Bits& b : cand[k]) {
            if (used.count(b)) continue;
            used.insert(b);
            pick[k] = b;
            if (choose(k + 1)) return true;
            used.erase(b);
          }
          return false;
        };
        if (!choose(0)) continue;
        for (size_t k = 0; k < grow.size(); ++k) record(grow[k], Strings{pick[k]}, n);
        Strings next;
        for (const Bits& b : star[n]) {
          if (!used.count(b)) next.insert(b);
        }
        std::vector<size_t> rest;
        for (size_t i : f.active) {
          if (std::find(grow.begin(), grow.end(), i) == grow.end()) rest.push_back(i);
        }
        f.active = rest;
        f.v_star = std::move(next);
        f.n_star = n;
        f.q1 = f.q1 + q.scaled(Rational(static_cast<long>(grow.size())));
        check_star(f);
        return std::nullopt;
      }
      return Inconclusive{n_max_, "growing widths but no fresh strings up to depth " + std::to_string(n_max_)};
    }

    // Case 3: the union of W has constant width from n_bar + 1 on.
    size_t u = w_all[top].size();
    unsigned n_bar = top - 1;
    while (n_bar > f.n_star && w_all[n_bar].size() == u) --n_bar;
    if (n_bar + 2 > top) {
      return Inconclusive{n_max_, "widths not yet stable at depth " + std::to_string(n_max_)};
    }
    std::vector<Strings> levels;
    for (unsigned n = n_bar + 1; n <= top; ++n) levels.push_back(w_all[n]);
    LevelFn big_bound = q + f.q1 + prm_.q2;
    for (size_t i : f.active) {
      const SplitInstance& in = inst_[i];
      NodeSet s_hat;
      std::map<Node, unsigned> first_bad;
      for (const Node& x : views_[i].cone()) {
        for (unsigned n = n_bar + 1; n <= top; ++n) {
          auto r = in.psi.restrict_to(x, n);
          if (r && !w_all[n].count(*r)) {
            s_hat.insert(x);
            first_bad[x] = n;
            break;
          }
        }
      }
      BigDecision d = decide_big(s_hat, big_bound, in.eta, in.ambient);
      if (!d.big) {
        PruneResult pr = avoid_prune(in.ambient, in.core, in.eta, s_hat, prm_.p, prm_.qi[i], big_bound);
        ComputableCert c;
        c.index = i;
        c.tree = pr.tree;
        c.n_bar = n_bar;
        c.n_top = top;
        c.width = u;
        c.w_levels = levels;
        c.outside = pr.outside_small;
        c.s_hat_small = *d.table;
        return SplitCertificate(c);
      }
      NodeSet s;
      unsigned n_hat = 0;
      for (const Node& x : leaves_of(d.witness->tree.nodes)) {
        s.insert(x);
        n_hat = std::max(n_hat, first_bad.at(x) + 1);
      }
      if (n_hat > top) continue;
      LevelFn bound2 = q + f.q1;
      if (!views_[i].in_tilde(w_all[n_hat], n_hat, bound2)) {
        fail(ErrorKind::kInternal, "case 3: W at n_hat is not in the small family");
      }
      NodeSet leave;
      for (const Node& x : views_[i].cone()) {
        auto r = in.psi.restrict_to(x, n_hat);
        if (r && !w_all[n_hat].count(*r)) leave.insert(x);
      }
      PruneResult pr = avoid_prune(in.ambient, in.core, in.eta, leave, prm_.p, prm_.qi[i], bound2);
      NonTotalCert c;
      c.index = i;
      c.tree = pr.tree;
      c.s = s;
      c.n_hat = n_hat;
      c.w_hat = w_all[n_hat];
      c.outside = pr.outside_small;
      c.s_witness = *d.witness;
      c.s_witness.targets = s;
      return SplitCertificate(c);
    }
    return Inconclusive{n_max_, "case 3 found no index with room for n_hat below depth " + std::to_string(n_max_)};
  }

  const std::vector<SplitInstance>& inst_;
  const SplitParams& prm_;
  std::vector<View> views_;
  unsigned n_max_ = 0;
  std::vector<std::optional<DisjointPart>> parts_;
};

size_t top_level(const std::vector<SplitInstance>& inst) {
  unsigned d = 0;
  for (const auto& in : inst) d = std::max(d, in.ambient.max_depth);
  return d == 0 ? 0 : d - 1;
}

}  // namespace

SplitCertificate j_split(const std::vector<SplitInstance>& inst, const SplitParams& prm) {
  if (inst.empty()) fail(ErrorKind::kInvalidInput, "need at least one instance");
  if (prm.qi.size() != inst.size()) fail(ErrorKind::kInvalidInput, "one q_i per instance required");
  for (const Bits& b : prm.v_star) {
    if (b.size() != prm.n_star) fail(ErrorKind::kInvalidInput, "V* strings must have length n*");
  }
  size_t from = SIZE_MAX;
  for (const auto& in : inst) {
    if (!in.ambient.contains(in.eta)) fail(ErrorKind::kPrecondition, "eta " + node_str(in.eta) + " not in ambient");
    if (auto e = in.psi.validate()) fail(ErrorKind::kInvalidInput, "functional: " + *e);
    from = std::min(from, in.eta.size());
  }
  if (!pointwise_less(prm.q + prm.q1 + prm.q2, prm.p, from, top_level(inst))) {
    fail(ErrorKind::kPrecondition, "p > q + q' + q'' fails on some level");
  }
  for (size_t i = 0; i < inst.size(); ++i) {
    const SplitInstance& in = inst[i];
    if (!in_tilde_V(in.psi, in.ambient, in.eta, prm.n_star, prm.q1, CylinderSet(prm.v_star)).member) {
      fail(ErrorKind::kPrecondition, "V* is not in the small family at q' for instance " + std::to_string(i));
    }
  }
  // The available levels are those where the empty set stays outside the
  // small family at q' + 2jq for every instance.
  Splitter sp(inst, prm);
  LevelFn empty_bound = prm.q1 + prm.q.scaled(Rational(2 * static_cast<long>(inst.size())));
  if (sp.available_depth(empty_bound) < static_cast<long>(prm.n_star)) {
    fail(ErrorKind::kPrecondition, "the empty set is in the small family at q' + 2jq for n = n*");
  }
  SplitCertificate c = sp.run();
  if (auto e = check_split_certificate(c, inst, prm)) {
    fail(ErrorKind::kInternal, "certificate fails re-verification: " + *e);
  }
  return c;
}

namespace {

std::optional<std::string> check_outside(const SmallTable& t, const SplitInstance& in,
                                         const FiniteTree& tree, const LevelFn& bound) {
  if (t.root != in.eta) return "outside table rooted away from eta";
  NodeSet cone = cone_of(in.ambient.nodes, in.eta);
  NodeSet expect;
  for (const Node& x : cone) {
    if (!tree.contains(x)) expect.insert(x);
  }
  if (t.targets != expect) return "outside table targets differ from ambient minus tree";
  if (auto e = check_small_table(t, in.ambient)) return "outside table: " + *e;
  for (const Node& x : cone_of(tree.nodes, in.eta)) {
    if (t.labels.at(x)) return "ambient minus tree is big over " + node_str(x);
  }
  size_t top = in.ambient.max_depth;
  if (!pointwise_nonneg(bound - t.p, in.eta.size(), top)) return "outside bound exceeds the required bound";
  return std::nullopt;
}

std::optional<std::string> check_tree_in(const FiniteTree& tree, const SplitInstance& in) {
  if (!tree.contains(in.eta)) return "tree misses eta";
  for (const Node& x : tree.nodes) {
    if (!in.core.contains(x)) return "tree node " + node_str(x) + " outside T_i";
    if (!comparable(x, in.eta)) return "tree node " + node_str(x) + " not comparable with eta";
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::string> check_split_certificate(const SplitCertificate& c,
                                                   const std::vector<SplitInstance>& inst,
                                                   const SplitParams& prm) {
  long j = static_cast<long>(inst.size());
  LevelFn required = prm.q.scaled(Rational(2 * j)) + prm.q1;
  if (const auto* d = std::get_if<DisjointCert>(&c)) {
    if (d->parts.size() != inst.size()) return "one part per instance expected";
    for (size_t i = 0; i < inst.size(); ++i) {
      const DisjointPart& part = d->parts[i];
      const SplitInstance& in = inst[i];
      if (part.v.empty()) return "empty part " + std::to_string(i);
      for (const Bits& b : part.v) {
        if (b.size() != part.n) return "part " + std::to_string(i) + " mixes lengths";
        if (part.n < prm.n_star || !prm.v_star.count(b.substr(0, prm.n_star))) {
          return "part " + std::to_string(i) + " leaves [V*]";
        }
      }
      BigWitness w = part.witness;
      if (w.root != in.eta || !(w.p == prm.q)) return "part " + std::to_string(i) + " witness root or bound";
      w.targets = cone_of(preimage(in.psi, in.ambient, part.n, part.v, true), in.eta);
      if (auto e = check_witness(w, &in.ambient.nodes)) return "part " + std::to_string(i) + ": " + *e;
    }
    for (size_t a = 0; a < inst.size(); ++a) {
      for (size_t b = a + 1; b < inst.size(); ++b) {
        for (const Bits& x : d->parts[a].v) {
          for (const Bits& y : d->parts[b].v) {
            if (bits_comparable(x, y)) return "parts " + std::to_string(a) + " and " + std::to_string(b) + " overlap";
          }
        }
      }
    }
    return std::nullopt;
  }
  if (const auto* nt = std::get_if<NonTotalCert>(&c)) {
    if (nt->index >= inst.size()) return "index out of range";
    const SplitInstance& in = inst[nt->index];
    if (auto e = check_tree_in(nt->tree, in)) return e;
    if (auto e = check_outside(nt->outside, in, nt->tree, required + prm.qi[nt->index])) return e;
    BigWitness w = nt->s_witness;
    w.targets = nt->s;
    if (w.root != in.eta) return "S witness rooted away from eta";
    if (!pointwise_nonneg(w.p - (prm.q + prm.q1 + prm.q2), in.eta.size(), in.ambient.max_depth)) {
      return "S witness bound below q + q' + q''";
    }
    if (auto e = check_witness(w, &in.ambient.nodes)) return "S: " + *e;
    for (const Node& x : nt->tree.nodes) {
      auto r = in.psi.restrict_to(x, nt->n_hat);
      bool above_s = false;
      for (const Node& s : nt->s) {
        if (is_prefix(s, x)) above_s = true;
      }
      if (r && !nt->w_hat.count(*r)) return "tree node " + node_str(x) + " leaves W at n_hat";
      if (r && above_s) return "tree node " + node_str(x) + " above S converges to n_hat";
    }
    return std::nullopt;
  }
  if (const auto* cp = std::get_if<ComputableCert>(&c)) {
    if (cp->index >= inst.size()) return "index out of range";
    const SplitInstance& in = inst[cp->index];
    if (auto e = check_tree_in(cp->tree, in)) return e;
    if (auto e = check_outside(cp->outside, in, cp->tree, required + prm.q2 + prm.qi[cp->index])) return e;
    if (cp->n_top < cp->n_bar + 1 || cp->w_levels.size() != cp->n_top - cp->n_bar) return "level count mismatch";
    for (size_t k = 0; k < cp->w_levels.size(); ++k) {
      if (cp->w_levels[k].size() != cp->width) return "W level of the wrong width";
      for (const Bits& b : cp->w_levels[k]) {
        if (b.size() != cp->n_bar + 1 + k) return "W string of the wrong length";
        if (k > 0 && !cp->w_levels[k - 1].count(b.substr(0, b.size() - 1))) return "W is not a tree";
      }
    }
    for (const Node& x : cp->tree.nodes) {
      for (size_t k = 0; k < cp->w_levels.size(); ++k) {
        auto r = in.psi.restrict_to(x, cp->n_bar + 1 + k);
        if (r && !cp->w_levels[k].count(*r)) return "tree node " + node_str(x) + " leaves W";
      }
    }
    return std::nullopt;
  }
  return std::nullopt;
}

std::optional<std::string> check_step_parameters(const Condition& cond, const LevelFn& p_hat) {
  size_t top = cond.ambient.max_depth == 0 ? 0 : cond.ambient.max_depth - 1;
  for (size_t n = cond.eta.size(); n <= top; ++n) {
    Rational width(static_cast<long>(level_of(cond.ambient.nodes, n).size()));
    Rational mid = 4 * p_hat(n) * width;
    if (!(cond.p_t(n) > mid)) {
      return "p_T(n) > 4p_hat(n)|T~ cap w^n| fails at level " + std::to_string(n);
    }
    if (!(mid > 16 * cond.q_t(n) * width)) {
      return "4p_hat(n)|T~ cap w^n| > 16q_T(n)|T~ cap w^n| fails at level " + std::to_string(n);
    }
  }
  return std::nullopt;
}

namespace {

FiniteTree restrict_cone(const FiniteTree& t, const Node& eta) {
  FiniteTree out;
  out.bound = t.bound;
  out.max_depth = t.max_depth;
  out.nodes = path_to(eta);
  for (const Node& x : cone_of(t.nodes, eta)) out.nodes.insert(x);
  return out;
}

}  // namespace

StepResult split_step(const Condition& cond, const ValueFunctional& psi,
                      const std::vector<Node>& frontier, const LevelFn& p_hat) {
  if (auto e = check_step_parameters(cond, p_hat)) fail(ErrorKind::kPrecondition, *e);
  if (frontier.empty()) fail(ErrorKind::kInvalidInput, "empty frontier");
  for (const Node& x : frontier) {
    if (!cond.core.contains(x) || !is_prefix(cond.eta, x)) {
      fail(ErrorKind::kPrecondition, "frontier node " + node_str(x) + " not in T above eta");
    }
    if (x.size() != frontier[0].size()) fail(ErrorKind::kPrecondition, "frontier nodes on different levels");
  }
  std::vector<SplitInstance> inst;
  for (const Node& x : frontier) {
    inst.push_back(SplitInstance{psi, restrict_cone(cond.ambient, x), restrict_cone(cond.core, x), x});
  }
  long j = static_cast<long>(frontier.size());
  LevelFn two_j = p_hat.scaled(Rational(2 * j));
  StepResult out;
  unsigned depth = 0;
  for (const auto& in : inst) depth = std::max(depth, functional_depth(in));
  for (size_t i = 0; i < inst.size(); ++i) {
    for (unsigned n = 0; n <= depth; ++n) {
      if (!in_tilde_V(psi, inst[i].ambient, inst[i].eta, n, two_j, CylinderSet()).member) continue;
      PruneResult pr = force_divergence(inst[i].ambient, inst[i].core, inst[i].eta, psi, n, cond.p_t,
                                        cond.q_t, two_j);
      out.extension = Extension{ExtensionKind::kDivergence,
                                Condition{inst[i].eta, inst[i].ambient, pr.tree, cond.p_t, cond.q_t + two_j},
                                Inconclusive{n, "divergence at n = " + std::to_string(n)}, i};
      return out;
    }
  }
  SplitParams prm;
  prm.p = cond.p_t;
  prm.q = p_hat;
  prm.q1 = LevelFn(Rational(0));
  prm.q2 = cond.q_t;
  prm.qi.assign(inst.size(), cond.q_t);
  prm.v_star = {""};
  prm.n_star = 0;
  SplitCertificate c = j_split(inst, prm);
  if (auto* d = std::get_if<DisjointCert>(&c)) {
    LevelFn half = p_hat.scaled(Rational(1, 2));
    for (size_t i = 0; i < inst.size(); ++i) {
      const DisjointPart& part = d->parts[i];
      NodeSet s;
      for (const Node& x : preimage(psi, inst[i].ambient, part.n, part.v, true)) {
        if (inst[i].core.contains(x)) s.insert(x);
      }
      BigDecision bd = decide_big(s, half, inst[i].eta, inst[i].ambient);
      if (!bd.big) fail(ErrorKind::kInternal, "converging set inside T is not p_hat/2-big");
      out.trees.push_back(SplittingTree{inst[i].eta, bd.witness->tree, part.v, part.n});
    }
    return out;
  }
  if (auto* nt = std::get_if<NonTotalCert>(&c)) {
    const SplitInstance& in = inst[nt->index];
    std::optional<Node> start;
    for (const Node& x : nt->s) {
      if (nt->tree.contains(x)) {
        start = x;
        break;
      }
    }
    if (!start) fail(ErrorKind::kInternal, "S misses the pruned tree");
    out.extension = Extension{ExtensionKind::kNonTotal,
                              Condition{*start, restrict_cone(in.ambient, *start),
                                        restrict_cone(nt->tree, *start), cond.p_t, nt->outside.p},
                              c, nt->index};
    return out;
  }
  if (auto* cp = std::get_if<ComputableCert>(&c)) {
    const SplitInstance& in = inst[cp->index];
    out.extension = Extension{ExtensionKind::kComputable,
                              Condition{in.eta, in.ambient, cp->tree, cond.p_t, cp->outside.p}, c, cp->index};
    return out;
  }
  out.inconclusive = std::get<Inconclusive>(c);
  return out;
}

}  // namespace bushy
