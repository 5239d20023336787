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

#include "bushy/schnorr.hpp"

#include <algorithm>
#include <random>

#include "bushy/error.hpp"
#include "bushy/seed.hpp"

namespace bushy {

CylinderSet TestFunctional::visible(const Node& x, uint32_t t) const {
  std::set<Bits> all;
  for (size_t k = 0; k <= x.size(); ++k) {
    auto it = entries_.find(Node(x.begin(), x.begin() + k));
    if (it == entries_.end()) continue;
    for (const TestEntry& e : it->second) {
      if (e.stage <= t && e.index <= t) all.insert(e.v.strings().begin(), e.v.strings().end());
    }
  }
  return CylinderSet(all);
}

std::optional<CylinderSet> TestFunctional::through(const Node& x, uint32_t n) const {
  std::set<Bits> all;
  std::vector<bool> seen(n + 1, false);
  for (size_t k = 0; k <= x.size(); ++k) {
    auto it = entries_.find(Node(x.begin(), x.begin() + k));
    if (it == entries_.end()) continue;
    for (const TestEntry& e : it->second) {
      if (e.index > n) continue;
      seen[e.index] = true;
      all.insert(e.v.strings().begin(), e.v.strings().end());
    }
  }
  for (bool b : seen) {
    if (!b) return std::nullopt;
  }
  return CylinderSet(all);
}

uint32_t TestFunctional::max_stage() const {
  uint32_t m = 0;
  for (const auto& [x, es] : entries_) {
    for (const TestEntry& e : es) m = std::max(m, e.stage);
  }
  return m;
}

std::optional<std::string> TestFunctional::validate(const FiniteTree& ambient) const {
  if (budget_ <= 0 || budget_ >= 1) return "budget must lie strictly between 0 and 1";
  for (const auto& [x, es] : entries_) {
    if (!ambient.contains(x)) return "entry at " + node_str(x) + " outside the ambient tree";
    for (const TestEntry& e : es) {
      for (const Bits& b : e.v.strings()) {
        if (b.find_first_not_of("01") != Bits::npos) return "non-binary string at " + node_str(x);
      }
      if (e.stage < x.size()) {
        return "entry at " + node_str(x) + " has stage " + std::to_string(e.stage) +
               " below its use " + std::to_string(x.size());
      }
    }
  }
  for (const Node& x : ambient.nodes) {
    std::map<uint32_t, std::set<Bits>> by_index;
    for (size_t k = 0; k <= x.size(); ++k) {
      auto it = entries_.find(Node(x.begin(), x.begin() + k));
      if (it == entries_.end()) continue;
      for (const TestEntry& e : it->second) {
        if (by_index.count(e.index)) {
          return "index " + std::to_string(e.index) + " emitted twice along " + node_str(x);
        }
        by_index[e.index] = e.v.strings();
      }
    }
    std::set<Bits> all;
    for (const auto& [i, v] : by_index) all.insert(v.begin(), v.end());
    Rational total = measure(CylinderSet(all));
    if (total > budget_) {
      return "measure " + to_string(total) + " at " + node_str(x) + " exceeds the budget";
    }
    std::set<Bits> acc;
    uint32_t expect = 0;
    for (const auto& [i, v] : by_index) {
      if (i != expect) break;
      acc.insert(v.begin(), v.end());
      Rational floor = budget_ - pow2_neg(i + 1);
      if (!(measure(CylinderSet(acc)) > floor)) {
        return "measure through index " + std::to_string(i) + " at " + node_str(x) +
               " is not above budget - 2^-" + std::to_string(i + 1);
      }
      ++expect;
    }
  }
  return std::nullopt;
}

Rational gap_bound(const Rational& lambda_bar, size_t nodes, unsigned m) {
  Rational d = Rational(4 * static_cast<long>(nodes)) / pow2_neg(m);
  Rational r = lambda_bar * lambda_bar / d;
  return r;
}

NodeSet present_nodes(const FiniteTree& ambient, const Expulsion& core, uint32_t t) {
  NodeSet out;
  for (const Node& x : ambient.nodes) {
    if (!core.present(x, t)) continue;
    if (!x.empty() && !out.count(parent_of(x))) continue;
    out.insert(x);
  }
  return out;
}

namespace {

size_t depth_of(const FiniteTree& t) {
  size_t d = 0;
  for (const Node& x : t.nodes) d = std::max(d, x.size());
  return d;
}

size_t count_upto(const FiniteTree& t, size_t l) {
  size_t c = 0;
  for (const Node& x : t.nodes) c += x.size() <= l ? 1 : 0;
  return c;
}

NodeSet upto(const NodeSet& s, size_t l) {
  NodeSet out;
  for (const Node& x : s) {
    if (x.size() <= l) out.insert(x);
  }
  return out;
}

NodeSet meet(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

Rational pow4(const Rational& x) {
  Rational s = x * x;
  Rational r = s * s;
  return r;
}

Rational pow3(const Rational& x) {
  Rational r = x * x * x;
  return r;
}

// One LevelFn per level up to depth, built from a per-level rule.
template <typename F>
LevelFn tabulate(size_t depth, F f) {
  std::vector<Rational> v;
  for (size_t l = 0; l <= depth; ++l) v.push_back(f(l));
  return LevelFn(v, v.back());
}

struct Params {
  LevelFn half, eps1, eps2, eps3;  // p/2, p eps/2, p eps^2/4, p eps^3/8
};

Params derive(const LevelFn& p, const LevelFn& eps, size_t depth) {
  Params r;
  r.half = tabulate(depth, [&](size_t l) { return Rational(p(l) / 2); });
  r.eps1 = tabulate(depth, [&](size_t l) { return Rational(p(l) * eps(l) / 2); });
  r.eps2 = tabulate(depth, [&](size_t l) { return Rational(p(l) * eps(l) * eps(l) / 4); });
  r.eps3 = tabulate(depth, [&](size_t l) { return Rational(p(l) * eps(l) * eps(l) * eps(l) / 8); });
  return r;
}

void check_params(const LevelFn& p, const LevelFn& q, const LevelFn& eps, const Node& eta,
                  size_t depth) {
  if (eps.tail() != 0) fail(ErrorKind::kPrecondition, "eps must vanish beyond its table");
  Rational sum = 0;
  for (const Rational& e : eps.table()) {
    if (e < 0) fail(ErrorKind::kPrecondition, "eps must be nonnegative");
    sum += e;
  }
  if (!(sum < Rational(1, 4))) fail(ErrorKind::kPrecondition, "sum of eps is not below 1/4");
  for (size_t l = eta.size(); l < depth; ++l) {
    if (eps(l) <= 0) fail(ErrorKind::kPrecondition, "eps must be positive at level " + std::to_string(l));
    if (p(l) <= 0) fail(ErrorKind::kPrecondition, "p must be positive at level " + std::to_string(l));
    Rational bound = p(l) * eps(l) * eps(l) * eps(l) / 8;
    if (!(q(l) < bound)) {
      fail(ErrorKind::kPrecondition, "q < p eps^3 / 8 fails at level " + std::to_string(l));
    }
  }
}

unsigned longest_at(const TestFunctional& psi, const NodeSet& present, size_t l, uint32_t t) {
  size_t len = 0;
  for (const Node& x : present) {
    if (x.size() != l) continue;
    CylinderSet v = psi.visible(x, t);
    for (const Bits& s : v.strings()) len = std::max(len, s.size());
  }
  return static_cast<unsigned>(len);
}

RoundCheck make_check(std::string name, bool ok, std::string lhs = "", std::string rhs = "") {
  return RoundCheck{std::move(name), ok, std::move(lhs), std::move(rhs)};
}

// l_k for k >= -2, where l_{-2} = l_{-1}.
size_t lev(const RoundState& s, int k) { return s.level[static_cast<size_t>(std::max(k, -1) + 1)]; }

std::vector<RoundCheck> checks_for(const RoundState& s, int j, const TestFunctional& psi,
                                   const FiniteTree& ambient, const Expulsion& core,
                                   const Params& pr) {
  std::vector<RoundCheck> out;
  std::string tag = "_" + std::to_string(j);
  const FiniteTree& tj = s.trees[static_cast<size_t>(j)];
  size_t lj = lev(s, j);
  uint32_t tt = s.time[static_cast<size_t>(j)];

  auto band = [&](const std::string& name, const NodeSet& nodes, const LevelFn& bound, size_t from,
                  size_t to_plus_one) {
    if (to_plus_one <= from) {
      out.push_back(make_check(name + tag, true, "empty band"));
      return;
    }
    auto v = check_bushy_band(nodes, bound, from, to_plus_one - 1);
    out.push_back(make_check(name + tag, !v, v.value_or("ok"),
                             "[" + std::to_string(from) + "," + std::to_string(to_plus_one - 1) + "]"));
  };
  band("band_eps", tj.nodes, pr.eps1, lev(s, j - 1), lj);
  band("band_eps2", tj.nodes, pr.eps2, lev(s, j - 2), lev(s, j - 1));
  NodeSet with_outside = tj.nodes;
  if (core.bounded()) {
    for (const Node& x : ambient.nodes) {
      if (!core.core().count(x)) with_outside.insert(x);
    }
  }
  band("band_eps3", with_outside, pr.eps3, lev(s, -1), lev(s, j - 2));

  bool leaves_ok = true;
  std::string bad;
  for (const Node& x : leaves_of(tj.nodes)) {
    bool outside = core.bounded() && !core.core().count(x);
    if (x.size() != lj && !outside) {
      leaves_ok = false;
      bad = node_str(x);
      break;
    }
  }
  out.push_back(make_check("leaves" + tag, leaves_ok, bad, "level " + std::to_string(lj)));

  Rational sum = 0;
  for (int i = 0; i <= j; ++i) sum += s.lambda[static_cast<size_t>(i)];
  bool sum_ok = s.lambda_bar[static_cast<size_t>(j)] == s.lambda_star - sum;
  out.push_back(make_check("lambda_sum" + tag, sum_ok, to_string(s.lambda_bar[static_cast<size_t>(j)]),
                           to_string(Rational(s.lambda_star - sum))));

  std::optional<Rational> min_mass, max_cond;
  const Bits& rho_prev = s.rho[static_cast<size_t>(j)];  // rho_{j-1}
  for (const Node& x : level_of(tj.nodes, lj)) {
    CylinderSet v = psi.visible(x, tt);
    Rational mass = measure(v);
    Rational cm = cond_measure(v, rho_prev);
    if (!min_mass || mass < *min_mass) min_mass = mass;
    if (!max_cond || cm > *max_cond) max_cond = cm;
  }
  if (!min_mass) {
    out.push_back(make_check("mass" + tag, false, "no nodes at level " + std::to_string(lj)));
  } else {
    out.push_back(make_check("mass" + tag, *min_mass > sum, to_string(*min_mass), to_string(sum)));
    Rational sq = *max_cond * *max_cond;
    out.push_back(make_check("conditional" + tag, sq < s.lambda[static_cast<size_t>(j)], to_string(sq),
                             to_string(s.lambda[static_cast<size_t>(j)])));
  }

  const Rational& prev_bar = j == 0 ? s.lambda_star : s.lambda_bar[static_cast<size_t>(j - 1)];
  Rational g = gap_bound(prev_bar, count_upto(ambient, lev(s, j - 1)), s.m[static_cast<size_t>(j)]);
  const Rational& bar = s.lambda_bar[static_cast<size_t>(j)];
  out.push_back(make_check("gap" + tag, bar > 0 && bar < g, to_string(bar), to_string(g)));

  unsigned mj = s.m[static_cast<size_t>(j + 1)];
  unsigned mprev = s.m[static_cast<size_t>(j)];
  NodeSet present = present_nodes(ambient, core, tt);
  unsigned longest = longest_at(psi, present, lj, tt);
  out.push_back(make_check("length" + tag, mj > mprev && mj > longest, std::to_string(mj),
                           std::to_string(std::max(mprev, longest))));

  bool time_ok = tt <= lj && lj > lev(s, j - 1);
  for (const Node& x : tj.nodes) {
    if (x.size() > lj || !present.count(x)) time_ok = false;
  }
  out.push_back(make_check("time" + tag, time_ok, std::to_string(tt), std::to_string(lj)));

  if (static_cast<size_t>(j + 1) < s.rho.size()) {
    const Bits& r = s.rho[static_cast<size_t>(j + 1)];
    bool ok = r.size() == mj && bits_prefix(rho_prev, r);
    out.push_back(make_check("rho" + tag, ok, std::to_string(r.size()), std::to_string(mj)));
  }
  if (j >= 1) {
    size_t low = lev(s, j - 3);
    NodeSet a = upto(tj.nodes, low);
    NodeSet b = meet(upto(s.trees[static_cast<size_t>(j - 1)].nodes, low), present);
    out.push_back(make_check("below" + tag, a == b, std::to_string(a.size()), std::to_string(b.size())));
  }
  return out;
}

void require_ok(const std::vector<RoundCheck>& checks, ErrorKind kind, const std::string& what) {
  for (const RoundCheck& c : checks) {
    if (!c.ok) fail(kind, what + ": check " + c.name + " fails (" + c.lhs + " vs " + c.rhs + ")");
  }
}

RoundTrace trace_for(const RoundState& s, int j, std::vector<RoundCheck> checks) {
  RoundTrace tr;
  tr.round = j;
  tr.t = s.time[static_cast<size_t>(j)];
  tr.l = lev(s, j);
  tr.rho = s.rho.back();
  tr.lambda = s.lambda[static_cast<size_t>(j)];
  tr.checks = std::move(checks);
  return tr;
}

}  // namespace

std::vector<RoundCheck> check_round_state(const RoundState& state, const TestFunctional& psi,
                                          const FiniteTree& ambient, const Expulsion& core) {
  std::vector<RoundCheck> out;
  size_t k = state.trees.size();
  bool shape = k >= 1 && state.rho.size() == k && state.lambda.size() == k &&
               state.lambda_bar.size() == k && state.level.size() == k + 1 &&
               state.time.size() == k && state.m.size() == k + 1;
  out.push_back(make_check("shape", shape));
  if (!shape) return out;
  size_t depth = depth_of(ambient);
  Params pr = derive(state.p, state.eps, depth);
  Rational sum = 0;
  for (const Rational& e : state.eps.table()) sum += e;
  out.push_back(make_check("eps_budget", state.eps.tail() == 0 && sum < Rational(1, 4), to_string(sum), "1/4"));
  bool q_ok = true;
  for (size_t l = state.eta.size(); l < depth; ++l) q_ok = q_ok && state.q(l) < pr.eps3(l);
  out.push_back(make_check("q_small", q_ok));
  out.push_back(make_check("rho_root", state.rho[0].empty() && state.m[0] == 0 &&
                                            state.level[0] == state.eta.size()));
  for (size_t j = 0; j < k; ++j) {
    auto c = checks_for(state, static_cast<int>(j), psi, ambient, core, pr);
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

RoundState initial_round(const TestFunctional& psi, const FiniteTree& ambient, const Expulsion& core,
                         const Node& eta, const LevelFn& p, const LevelFn& q, const LevelFn& eps) {
  if (!ambient.contains(eta)) fail(ErrorKind::kPrecondition, "eta not in ambient");
  size_t depth = depth_of(ambient);
  check_params(p, q, eps, eta, depth);
  if (auto e = psi.validate(ambient)) fail(ErrorKind::kInvalidInput, "test functional: " + *e);
  const Rational& star = psi.budget();
  Params pr = derive(p, eps, depth);

  Rational g = gap_bound(star, count_upto(ambient, eta.size()), 0);
  Rational bar0 = g / 2;
  Rational lam0 = star - bar0;
  if (!(star * star < lam0)) fail(ErrorKind::kPrecondition, "budget too large: lambda*^2 >= lambda_0");

  uint32_t last = std::max(psi.max_stage(), static_cast<uint32_t>(depth));
  for (uint32_t t = 0; t <= last; ++t) {
    NodeSet present = present_nodes(ambient, core, t);
    if (!present.count(eta)) break;
    FiniteTree pt{present, ambient.bound, ambient.max_depth};
    for (size_t l = std::max<size_t>(t, eta.size() + 1); l <= depth; ++l) {
      NodeSet good;
      for (const Node& x : cone_of(present, eta)) {
        if (x.size() == l && measure(psi.visible(x, t)) > lam0) good.insert(x);
      }
      BigDecision d = decide_big(good, pr.half, eta, pt);
      if (!d.big) continue;
      RoundState s;
      s.eta = eta;
      s.p = p;
      s.q = q;
      s.eps = eps;
      s.lambda_star = star;
      FiniteTree t0 = d.witness->tree;
      s.trees = {t0};
      s.rho = {""};
      s.lambda = {lam0};
      s.lambda_bar = {bar0};
      s.level = {eta.size(), l};
      s.time = {t};
      s.m = {0, std::max(1u, longest_at(psi, present, l, t) + 1)};
      auto checks = checks_for(s, 0, psi, ambient, core, pr);
      require_ok(checks, ErrorKind::kInternal, "initial round");
      s.traces.push_back(trace_for(s, 0, checks));
      return s;
    }
  }
  fail(ErrorKind::kInconclusive, "insufficient functional depth: no initial level reaches lambda_0");
}

namespace {

// Candidate search for rho_{n+1}. Strings are owned either by a node of S
// (old, visible at t_{n+1}) or by a node of some S_sigma (new, visible at
// t_{n+2}). Below rho_n every string splits the strings of length m into
// atoms on which all conditional measures are constant.
class RhoSearch {
 public:
  struct Item {
    int owner;  // index into old owners, or into new owners when fresh
    bool fresh;
    const Bits* s;
  };

  RhoSearch(const Bits& rho_n, unsigned m, size_t n_old, const std::vector<size_t>& parent,
            const std::vector<size_t>& group_size, const Rational& lam_cut)
      : rho_n_(rho_n), m_(m), parent_(parent), group_size_(group_size), lam_cut_(lam_cut),
        old_cov_(n_old, false), new_cov_(parent.size(), false), cov_count_(n_old, 0),
        partial_(parent.size(), 0) {
    count_a_ = n_old;
    n_old_ = n_old;
    sum_c_ = 0;
  }

  void run(const std::vector<Item>& items) {
    std::vector<Item> below;
    for (const Item& it : items) {
      if (bits_prefix(*it.s, rho_n_)) {
        cover(it);
      } else if (bits_prefix(rho_n_, *it.s)) {
        below.push_back(it);
      }
    }
    path_ = rho_n_;
    if (rho_n_.size() == m_) {
      full_atom(below);
    } else {
      visit(below);
    }
  }

  bool found() const { return best_score_.has_value(); }
  const Bits& best() const { return best_rho_; }
  const Rational& best_score() const { return *best_score_; }
  mpz_class r_weight() const { return r_weight_; }

 private:
  void cover(const Item& it) {
    if (!it.fresh) {
      size_t i = static_cast<size_t>(it.owner);
      if (old_cov_[i]) return;
      old_cov_[i] = true;
      --count_a_;
      sum_c_ -= Rational(cov_count_[i]) / Rational(group_size_[i]);
      undo_.push_back({false, i});
    } else {
      size_t k = static_cast<size_t>(it.owner);
      if (new_cov_[k]) return;
      new_cov_[k] = true;
      size_t g = parent_[k];
      ++cov_count_[g];
      if (!old_cov_[g]) sum_c_ += Rational(1) / Rational(group_size_[g]);
      undo_.push_back({true, k});
    }
  }

  void rollback(size_t mark) {
    while (undo_.size() > mark) {
      auto [fresh, i] = undo_.back();
      undo_.pop_back();
      if (!fresh) {
        old_cov_[i] = false;
        ++count_a_;
        sum_c_ += Rational(cov_count_[i]) / Rational(group_size_[i]);
      } else {
        new_cov_[i] = false;
        size_t g = parent_[i];
        --cov_count_[g];
        if (!old_cov_[g]) sum_c_ -= Rational(1) / Rational(group_size_[g]);
      }
    }
  }

  bool in_r() const {
    Rational f = Rational(n_old_ - count_a_) / Rational(n_old_);
    return pow4(f) < lam_cut_;
  }

  void offer(const Rational& score, const Bits& rep, const mpz_class& weight) {
    if (!in_r() || count_a_ == 0) return;
    r_weight_ += weight;
    bool better = !best_score_ || score < *best_score_ ||
                  (score == *best_score_ && count_a_ > best_a_);
    if (better) {
      best_score_ = score;
      best_a_ = count_a_;
      best_rho_ = rep;
    }
  }

  void visit(const std::vector<Item>& items) {
    size_t len = path_.size();
    for (char b : {'0', '1'}) {
      std::vector<Item> sub;
      for (const Item& it : items) {
        if ((*it.s)[len] == b) sub.push_back(it);
      }
      path_.push_back(b);
      if (sub.empty()) {
        mpz_class w = 1;
        w <<= static_cast<mp_bitcnt_t>(m_ - len - 1);
        Rational score = count_a_ == 0 ? Rational(0) : Rational(sum_c_ / Rational(count_a_));
        offer(score, path_ + Bits(m_ - len - 1, '0'), w);
      } else {
        size_t mark = undo_.size();
        std::vector<Item> longer;
        for (const Item& it : sub) {
          if (it.s->size() == len + 1) {
            cover(it);
          } else {
            longer.push_back(it);
          }
        }
        if (len + 1 == m_) {
          full_atom(longer);
        } else {
          visit(longer);
        }
        rollback(mark);
      }
      path_.pop_back();
    }
  }

  // path_ has length m; items are strictly longer and extend it.
  void full_atom(const std::vector<Item>& items) {
    std::vector<size_t> touched;
    for (const Item& it : items) {
      if (!it.fresh) fail(ErrorKind::kInternal, "old string longer than m_{n+1}");
      size_t k = static_cast<size_t>(it.owner);
      if (partial_[k] == 0) touched.push_back(k);
      partial_[k] += pow2_neg(static_cast<unsigned>(it.s->size() - m_));
    }
    Rational extra = 0;
    for (size_t k : touched) {
      size_t g = parent_[k];
      if (!new_cov_[k] && !old_cov_[g]) extra += partial_[k] / Rational(group_size_[g]);
    }
    Rational score = count_a_ == 0 ? Rational(0) : Rational((sum_c_ + extra) / Rational(count_a_));
    offer(score, path_, mpz_class(1));
    for (size_t k : touched) partial_[k] = 0;
  }

  Bits rho_n_;
  unsigned m_;
  std::vector<size_t> parent_;
  std::vector<size_t> group_size_;
  Rational lam_cut_;
  std::vector<bool> old_cov_, new_cov_;
  std::vector<size_t> cov_count_;
  std::vector<Rational> partial_;
  size_t count_a_ = 0, n_old_ = 0;
  Rational sum_c_;
  std::vector<std::pair<bool, size_t>> undo_;
  Bits path_;
  std::optional<Rational> best_score_;
  size_t best_a_ = 0;
  Bits best_rho_;
  mpz_class r_weight_ = 0;
};

struct Attempt {
  std::optional<RoundState> state;
  std::string failure;
  std::optional<Rational> achieved;
};

}  // namespace

RoundState avoidance_round(const RoundState& state, const TestFunctional& psi,
                           const FiniteTree& ambient, const Expulsion& core) {
  size_t depth = depth_of(ambient);
  check_params(state.p, state.q, state.eps, state.eta, depth);
  if (auto e = psi.validate(ambient)) fail(ErrorKind::kInvalidInput, "test functional: " + *e);
  if (psi.budget() != state.lambda_star) fail(ErrorKind::kPrecondition, "budget differs from the state");
  require_ok(check_round_state(state, psi, ambient, core), ErrorKind::kPrecondition, "state invariant");

  const Params pr = derive(state.p, state.eps, depth);
  const int n = state.n();
  const size_t l_nm1 = lev(state, n - 1), l_n = lev(state, n), l_np1 = lev(state, n + 1);
  const FiniteTree& t1 = state.trees.back();
  const Bits& rho_n = state.rho.back();
  const unsigned m_np1 = state.m.back();
  const uint32_t t_np1 = state.time.back();
  const Rational& lam_np1 = state.lambda.back();
  const Rational& bar_np1 = state.lambda_bar.back();

  const Rational g = gap_bound(bar_np1, count_upto(ambient, l_np1), m_np1);
  const Rational bar_new = g / 2;
  const Rational lam_new = bar_np1 - bar_new;
  const Rational threshold = state.lambda_star - bar_new;
  const Rational cut = pow3(bar_np1);  // C^4 < bar^3 stands for C < bar^{3/4}
  LevelFn band = tabulate(depth, [&](size_t l) { return l < l_n ? pr.eps2(l) / 2 : pr.eps1(l) / 2; });
  // band is p eps^2 / 8 below l_n and p eps / 4 from l_n on.

  std::optional<std::string> last_failure;
  std::optional<Rational> best_min;
  bool structure = false;
  uint32_t last = std::max(psi.max_stage(), static_cast<uint32_t>(depth));

  for (uint32_t t = t_np1 + 1; t <= last; ++t) {
    NodeSet present = present_nodes(ambient, core, t);
    if (!present.count(state.eta)) break;
    TreeIndex pidx(present);
    NodeSet t1p = meet(t1.nodes, present);
    TreeIndex idx1(t1p);
    std::vector<Node> alphas = level_of(t1p, l_nm1);
    if (alphas.empty()) break;
    for (size_t l = std::max<size_t>(t, l_np1 + 1); l <= depth; ++l) {
      NodeSet good;
      std::map<Node, CylinderSet> vis_new;
      for (const Node& x : cone_of(present, state.eta)) {
        if (x.size() != l) continue;
        CylinderSet v = psi.visible(x, t);
        if (measure(v) > threshold) {
          good.insert(x);
          vis_new.emplace(x, std::move(v));
        }
      }
      auto half_labels = big_labels(good, pr.half, state.eta, pidx);
      NodeSet qualifying;
      for (const Node& x : level_of(t1p, l_np1)) {
        auto it = half_labels.find(x);
        if (it != half_labels.end() && it->second) qualifying.insert(x);
      }
      auto band_labels = big_labels(qualifying, band, state.eta, idx1);
      bool all = true;
      for (const Node& a : alphas) all = all && band_labels.at(a);
      if (!all) continue;
      structure = true;

      // S with its exactly bushy trees over each alpha, and S_sigma.
      std::map<Node, NodeSet> alpha_tree;
      std::vector<Node> s_list;
      for (const Node& a : alphas) {
        NodeSet w = witness_nodes(qualifying, band, a, idx1, band_labels);
        alpha_tree[a] = w;
        for (const Node& x : cone_of(w, a)) {
          if (qualifying.count(x)) s_list.push_back(x);
        }
      }
      std::map<Node, NodeSet> sigma_tree;
      std::vector<size_t> parent, group_size;
      std::vector<Node> tau_list;
      for (size_t i = 0; i < s_list.size(); ++i) {
        NodeSet w = witness_nodes(good, pr.half, s_list[i], pidx, half_labels);
        sigma_tree[s_list[i]] = w;
        size_t cnt = 0;
        for (const Node& x : cone_of(w, s_list[i])) {
          if (good.count(x)) {
            tau_list.push_back(x);
            parent.push_back(i);
            ++cnt;
          }
        }
        group_size.push_back(cnt);
      }

      std::vector<CylinderSet> old_sets;
      for (const Node& x : s_list) old_sets.push_back(psi.visible(x, t_np1));
      std::vector<RhoSearch::Item> items;
      for (size_t i = 0; i < s_list.size(); ++i) {
        for (const Bits& b : old_sets[i].strings()) {
          if (b.size() >= m_np1) fail(ErrorKind::kInternal, "string at " + node_str(s_list[i]) + " reaches m_{n+1}");
          items.push_back({static_cast<int>(i), false, &b});
        }
      }
      for (size_t k = 0; k < tau_list.size(); ++k) {
        for (const Bits& b : vis_new.at(tau_list[k]).strings()) items.push_back({static_cast<int>(k), true, &b});
      }
      RhoSearch search(rho_n, m_np1, s_list.size(), parent, group_size, lam_np1);
      search.run(items);
      if (!search.found()) {
        last_failure = "no rho in R at t = " + std::to_string(t) + ", l = " + std::to_string(l);
        continue;
      }
      const Bits rho = search.best();
      if (!best_min || search.best_score() < *best_min) best_min = search.best_score();
      if (!(pow4(search.best_score()) < cut)) {
        last_failure = "minimum expectation " + to_string(search.best_score()) +
                       " is not below lambda_bar^{3/4} at t = " + std::to_string(t) + ", l = " + std::to_string(l);
        continue;
      }

      // S*, S*_sigma and the thinned trees.
      NodeSet s_star;
      std::map<Node, NodeSet> sigma_thin;
      size_t pos = 0;
      for (size_t i = 0; i < s_list.size(); ++i) {
        const Node& sg = s_list[i];
        bool in_a = !old_sets[i].covers(rho);
        NodeSet keep;
        Rational c = 0;
        for (size_t k = pos; k < pos + group_size[i]; ++k) {
          Rational cm = cond_measure(vis_new.at(tau_list[k]), rho);
          c += cm;
          if (pow4(cm) < cut) keep.insert(tau_list[k]);
        }
        c /= Rational(group_size[i]);
        pos += group_size[i];
        if (!in_a || !(pow4(c) < cut)) continue;
        Rational ratio = Rational(keep.size()) / Rational(group_size[i]);
        Rational budget = 0;
        for (size_t x = l_np1; x < l; ++x) budget += state.eps(x);
        if (!(ratio > budget)) continue;
        FiniteTree tree{sigma_tree[sg], ambient.bound, ambient.max_depth};
        ThinResult r = exact_thin(tree, sg, pr.half, keep, (ratio + budget) / 2, state.eps);
        sigma_thin[sg] = r.tree.nodes;
        s_star.insert(sg);
      }
      NodeSet next = upto(t1p, l_nm1);
      bool thinned_below = false;
      for (const Node& a : alphas) {
        const NodeSet& w = alpha_tree[a];
        NodeSet in_s, in_star;
        for (const Node& x : cone_of(w, a)) {
          if (x.size() == l_np1) {
            in_s.insert(x);
            if (s_star.count(x)) in_star.insert(x);
          }
        }
        Rational ratio = Rational(in_star.size()) / Rational(in_s.size());
        Rational budget = 0;
        for (size_t x = l_nm1; x < l_np1; ++x) budget += state.eps(x);
        if (!(ratio > budget)) {
          thinned_below = true;
          last_failure = "thinning reaches below level " + std::to_string(l_nm1) + " at " + node_str(a);
          break;
        }
        FiniteTree tree{w, ambient.bound, ambient.max_depth};
        ThinResult r = exact_thin(tree, a, band, in_star, (ratio + budget) / 2, state.eps);
        next.insert(r.tree.nodes.begin(), r.tree.nodes.end());
        for (const Node& x : cone_of(r.tree.nodes, a)) {
          if (x.size() == l_np1) {
            const NodeSet& st = sigma_thin.at(x);
            next.insert(st.begin(), st.end());
          }
        }
      }
      if (thinned_below) continue;

      RoundState s = state;
      s.trees.push_back(FiniteTree{next, ambient.bound, ambient.max_depth});
      s.rho.push_back(rho);
      s.lambda.push_back(lam_new);
      s.lambda_bar.push_back(bar_new);
      s.level.push_back(l);
      s.time.push_back(t);
      s.m.push_back(std::max(m_np1 + 1, longest_at(psi, present, l, t) + 1));
      int j = n + 2;
      auto checks = checks_for(s, j, psi, ambient, core, pr);
      checks.push_back(make_check("markov_R_" + std::to_string(j), true, search.r_weight().get_str(),
                                  "2^" + std::to_string(m_np1 - rho_n.size())));
      checks.push_back(make_check("expectation_" + std::to_string(j), true, to_string(search.best_score()),
                                  "lambda_bar^{3/4}"));
      require_ok(checks, ErrorKind::kInternal, "round " + std::to_string(j));
      s.traces.push_back(trace_for(s, j, checks));
      return s;
    }
  }
  if (!structure) {
    fail(ErrorKind::kInconclusive, "insufficient functional depth: no (t, l) with the exactly bushy structure");
  }
  std::string what = "no rho achieving the expectation bound";
  if (best_min) what += " (achieved minimum " + to_string(*best_min) + ")";
  if (last_failure) what += "; last failure: " + *last_failure;
  fail(ErrorKind::kPrecondition, what);
}

Avoider assemble_avoider(const RoundState& state, const TestFunctional& psi, const FiniteTree& ambient,
                         const Expulsion& core) {
  if (state.trees.size() < 2) fail(ErrorKind::kPrecondition, "need at least one completed round");
  const int top = static_cast<int>(state.trees.size()) - 1;
  size_t depth = depth_of(ambient);
  Params pr = derive(state.p, state.eps, depth);

  for (int j = 1; j <= top; ++j) {
    size_t low = lev(state, j - 3);
    NodeSet present = present_nodes(ambient, core, state.time[static_cast<size_t>(j)]);
    NodeSet a = upto(state.trees[static_cast<size_t>(j)].nodes, low);
    NodeSet b = meet(upto(state.trees[static_cast<size_t>(j - 1)].nodes, low), present);
    if (a != b) fail(ErrorKind::kPrecondition, "band mismatch between rounds " + std::to_string(j - 1) +
                                                   " and " + std::to_string(j));
    if (lev(state, j) <= lev(state, j - 1)) fail(ErrorKind::kPrecondition, "levels do not increase");
  }

  Avoider out;
  out.x = state.rho.back();
  out.t_hat.bound = ambient.bound;
  out.t_hat.max_depth = ambient.max_depth;
  out.t_hat.nodes = path_to(state.eta);
  for (int j = 1; j <= top; ++j) {
    size_t from = lev(state, j - 3), to = lev(state, j - 2);
    for (const Node& x : state.trees[static_cast<size_t>(j)].nodes) {
      if (x.size() >= from && x.size() <= to) out.t_hat.nodes.insert(x);
    }
  }
  for (const Node& x : state.trees.back().nodes) {
    if (x.size() >= lev(state, top - 2)) out.t_hat.nodes.insert(x);
  }

  if (auto v = check_bushy_over(out.t_hat.nodes, pr.eps3, state.eta)) {
    fail(ErrorKind::kInternal, "assembled tree not p eps^3/8-bushy: " + *v);
  }
  TreeIndex idx(out.t_hat.nodes);
  size_t top_level = lev(state, top);
  for (const Node& x : out.t_hat.nodes) {
    if (x.size() < state.eta.size() || x.size() >= top_level) continue;
    if (core.bounded() && !core.core().count(x)) continue;
    size_t alive = 0;
    for (const Node& c : idx.children(x)) {
      if (!core.bounded() || core.core().count(c)) ++alive;
    }
    Rational need = pr.eps3(x.size()) - state.q(x.size());
    if (alive == 0 || Rational(alive) < need) {
      fail(ErrorKind::kInternal, "surviving node " + node_str(x) + " has " + std::to_string(alive) +
                                     " surviving children");
    }
  }

  // The contradiction check: no node kept at level l_j may emit a cylinder
  // around rho_{j-1} by t_j.
  for (int j = 0; j <= top; ++j) {
    const Bits& rho = state.rho[static_cast<size_t>(j)];
    uint32_t t = state.time[static_cast<size_t>(j)];
    for (const Node& x : level_of(out.t_hat.nodes, lev(state, j))) {
      CylinderSet v = psi.visible(x, t);
      Rational cm = cond_measure(v, rho);
      if (v.covers(rho)) {
        fail(ErrorKind::kPrecondition, "contradiction at " + node_str(x) + ": m(Psi[t_" + std::to_string(j) +
                                           "] | rho_" + std::to_string(j - 1) + ") = 1 > sqrt(lambda_" +
                                           std::to_string(j) + ")");
      }
      if (!(cm * cm < state.lambda[static_cast<size_t>(j)])) {
        fail(ErrorKind::kPrecondition, "conditional measure at " + node_str(x) + " breaks the round " +
                                           std::to_string(j) + " invariant");
      }
    }
  }

  uint32_t t_top = state.time.back();
  for (const Node& x : level_of(out.t_hat.nodes, top_level)) {
    ++out.leaves_scanned;
    CylinderSet v = psi.visible(x, t_top);
    for (const Bits& s : v.strings()) {
      ++out.cylinders_scanned;
      if (bits_prefix(s, out.x)) {
        fail(ErrorKind::kInternal, "X lies in cylinder " + s + " emitted at " + node_str(x));
      }
    }
  }
  return out;
}

namespace {

bool clashes(const std::set<Bits>& taken, const Bits& s) {
  auto it = taken.upper_bound(s);
  if (it != taken.end() && bits_prefix(s, *it)) return true;
  if (it == taken.begin()) return false;
  --it;
  return bits_prefix(*it, s);
}

Bits fresh_string(std::mt19937_64& rng, const std::set<Bits>& taken, size_t len) {
  for (int attempt = 0; attempt < 100000; ++attempt) {
    Bits s(len, '0');
    for (char& c : s) c = (rng() & 1) ? '1' : '0';
    if (!clashes(taken, s)) return s;
  }
  fail(ErrorKind::kInternal, "no free cylinder of length " + std::to_string(len));
}

}  // namespace

ScheduledInstance scheduled_instance(uint64_t seed, uint32_t branching, unsigned depth, unsigned a,
                                     unsigned fill_depth) {
  if (branching < 2 || branching > 16) fail(ErrorKind::kInvalidInput, "branching must be in [2, 16]");
  if (depth < 2 || depth > 6) fail(ErrorKind::kInvalidInput, "depth must be in [2, 6]");
  if (a < 3) fail(ErrorKind::kInvalidInput, "budget 2^-a needs a >= 3");
  if (fill_depth < 1) fail(ErrorKind::kInvalidInput, "fill depth must be positive");

  ScheduledInstance out;
  FiniteTree& t = out.ambient;
  t.bound = LevelFn(Rational(branching));
  t.max_depth = depth;
  std::vector<Node> layer{Node{}};
  t.nodes.insert(Node{});
  for (unsigned d = 0; d < depth; ++d) {
    std::vector<Node> next;
    for (const Node& x : layer) {
      for (uint32_t i = 0; i < branching; ++i) next.push_back(extend(x, i));
    }
    t.nodes.insert(next.begin(), next.end());
    layer.swap(next);
  }

  // L_d for d = 0 .. depth following the gap schedule with l_k = k + 1.
  std::vector<size_t> len{a};
  Rational bar = pow2_neg(a);
  unsigned m = 0;
  size_t nodes = 1, width = 1;
  for (unsigned d = 1; d <= depth; ++d) {
    bar = gap_bound(bar, nodes, m) / 2;
    size_t l = len.back();
    if (d < fill_depth) {
      l = len.back() + 1;
      while (!(pow2_neg(static_cast<unsigned>(l)) < bar)) ++l;
    }
    len.push_back(l);
    m = std::max<unsigned>(m + 1, static_cast<unsigned>(l) + 1);
    width *= branching;
    nodes += width;
  }
  out.lengths = len;

  std::map<Node, std::vector<TestEntry>> entries;
  std::map<Node, std::set<Bits>> taken{{Node{}, {}}};
  for (const Node& x : t.nodes) {
    if (x.empty()) continue;
    size_t d = x.size();
    std::set<Bits> own = taken.at(parent_of(x));
    std::mt19937_64 rng(derive_seed(seed, "psi" + node_str(x)));
    std::set<Bits> emitted;
    if (d < fill_depth) {
      for (size_t l = len[d - 1] + 1; l <= len[d]; ++l) {
        Bits s = fresh_string(rng, own, l);
        own.insert(s);
        emitted.insert(s);
      }
    } else if (d == fill_depth) {
      Bits s = fresh_string(rng, own, len[d - 1]);
      own.insert(s);
      emitted.insert(s);
    }
    entries[x].push_back(TestEntry{static_cast<uint32_t>(d - 1), CylinderSet(emitted), static_cast<uint32_t>(d)});
    taken[x] = std::move(own);
  }
  out.psi = TestFunctional(std::move(entries), pow2_neg(a));
  out.p = LevelFn(Rational(branching));
  out.q = LevelFn(Rational(0));
  std::vector<Rational> e(depth, Rational(1, 32));
  out.eps = LevelFn(e, Rational(0));
  return out;
}

}  // namespace bushy
