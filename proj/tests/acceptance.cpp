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

// Acceptance run: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>

#include "bushy/scenario.hpp"
#include "bushy/seed.hpp"
#include "oracles.hpp"

using namespace bushy;

namespace {

// Pinned thresholds.
constexpr int kBigInstances = 1000;
constexpr double kBigSeconds = 60.0;
constexpr int kSplitInstances = 500;
constexpr int kThinInstances = 300;
constexpr int kHashSeeds = 20;
constexpr int kHashMinSuccess = 18;
constexpr double kHashSeconds = 120.0;
constexpr int kCalcPerItem = 500;
constexpr int kCalcMaxTries = 5000;
constexpr int kCaptureInstances = 100;
constexpr int kJsplitInstances = 200;
constexpr double kJsplitMaxInconclusive = 0.20;
constexpr int kSchnorrInstances = 30;
constexpr unsigned kSchnorrMaxDepth = 6;
constexpr int kCoveringPerRounds = 20;
constexpr int kSuitePerKind = 30;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Tally {
 public:
  void require(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (first_.empty()) first_ = what;
  }
  int failures() const { return failures_; }
  const std::string& first() const { return first_; }

 private:
  int failures_ = 0;
  std::string first_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

uint64_t seed_for(const std::string& tag, int i) { return derive_seed(2026, tag + "/" + std::to_string(i)); }

std::string verdict_of(const Json& result, const Json& sc) {
  Json v = verify_result(result, sc);
  return v.at("ok").get<bool>() ? std::string() : v.at("detail").get<std::string>();
}

Outcome finish(const Tally& t, const std::string& summary) {
  if (t.failures() == 0) return {true, summary};
  return {false, summary + "; " + std::to_string(t.failures()) + " failures, first: " + t.first()};
}

// Exact measure of a set of strings, read as a union of cylinders.
Rational oracle_measure(const std::set<Bits>& v) { return oracle::split_measure({v.begin(), v.end()}, ""); }

Outcome bigness() {
  auto t0 = std::chrono::steady_clock::now();
  Tally t;
  int bigs = 0;
  for (int i = 0; i < kBigInstances; ++i) {
    Json prm{{"branch", 2 + i % 3}, {"depth", 1 + i % 3}, {"density", std::vector<std::string>{"1/5", "2/5", "3/5", "4/5"}[i / 3 % 4]}};
    Json sc = generate("bigness", prm, seed_for("big", i));
    const Json& in = sc.at("instance");
    Json res = run_scenario(sc);
    auto amb = in.at("ambient").get<FiniteTree>();
    auto s = in.at("s").get<NodeSet>();
    auto p = in.at("p").get<LevelFn>();
    bool expect = oracle::SubtreeEnumerator(amb.nodes, s, p).exists(Node{});
    bool got = res.at("status") == "ok";
    t.require(res.at("status") == "ok" || res.at("status") == "refusal", "status " + res.at("status").get<std::string>());
    t.require(got == expect, "instance " + std::to_string(i) + " disagrees with enumeration");
    std::string v = verdict_of(res, sc);
    t.require(v.empty(), "instance " + std::to_string(i) + ": " + v);
    bigs += got ? 1 : 0;
  }
  double sec = seconds_since(t0);
  t.require(sec < kBigSeconds, "took " + std::to_string(sec) + " s");
  std::ostringstream os;
  os << kBigInstances << " instances, " << bigs << " big, " << (kBigInstances - t.failures()) << " agree, " << sec
     << " s";
  return finish(t, os.str());
}

Outcome split() {
  Tally t;
  int left = 0;
  for (int i = 0; i < kSplitInstances; ++i) {
    Json sc = generate("split", Json{{"branch", 2 + i % 4}, {"depth", 1 + i % 3}}, seed_for("split", i));
    const Json& in = sc.at("instance");
    Json res = run_scenario(sc);
    t.require(res.at("status") == "ok", "instance " + std::to_string(i) + ": " + res.at("message").get<std::string>());
    if (res.at("status") != "ok") continue;
    std::string v = verdict_of(res, sc);
    t.require(v.empty(), "instance " + std::to_string(i) + ": " + v);
    auto r = res.at("certificate").get<SplitResult>();
    bool is_b = r.side == Side::kLeft;
    left += is_b ? 1 : 0;
    auto side = in.at(is_b ? "b" : "c").get<NodeSet>();
    auto p = in.at(is_b ? "p" : "q").get<LevelFn>();
    t.require(oracle::is_bushy_witness(r.witness.tree.nodes, p, Node{}, side),
              "instance " + std::to_string(i) + ": witness fails the direct check");
  }
  return finish(t, std::to_string(kSplitInstances) + " instances, B chosen " + std::to_string(left) + " times");
}

Outcome thin() {
  Tally t;
  size_t steps = 0;
  for (int i = 0; i < kThinInstances; ++i) {
    Json sc = generate("thin", Json{{"branch", 3 + i % 3}, {"depth", 1 + i % 3}}, seed_for("thin", i));
    const Json& in = sc.at("instance");
    auto tree = in.at("tree").get<FiniteTree>();
    auto s = in.at("s").get<NodeSet>();
    auto p = in.at("p").get<LevelFn>();
    auto eps = in.at("eps").get<LevelFn>();
    auto lambda = in.at("lambda").get<Rational>();
    std::vector<Node> leaves = leaves_of(tree.nodes);
    Rational ratio = Rational(static_cast<long>(s.size())) / Rational(static_cast<long>(leaves.size()));
    Rational sum = 0;
    for (unsigned l = 0; l < tree.max_depth; ++l) sum += eps(l);
    std::string tag = "instance " + std::to_string(i);
    t.require(ratio > lambda && lambda > sum, tag + ": generator broke |S|/|leaves| > lambda > sum eps");
    Json res = run_scenario(sc);
    t.require(res.at("status") == "ok", tag + ": " + res.at("message").get<std::string>());
    if (res.at("status") != "ok") continue;
    std::string v = verdict_of(res, sc);
    t.require(v.empty(), tag + ": " + v);
    auto r = res.at("certificate").get<ThinResult>();
    t.require(oracle::is_bushy_witness(r.tree.nodes, p * eps, Node{}, s), tag + ": not p*eps-bushy onto S");
    for (const Node& x : r.tree.nodes) {
      auto kept = oracle::kids(r.tree.nodes, x);
      if (kept.empty()) continue;
      auto all = oracle::kids(tree.nodes, x);
      ++steps;
      t.require(Rational(static_cast<long>(kept.size())) > eps(x.size()) * Rational(static_cast<long>(all.size())),
                tag + ": too few children kept at " + node_str(x));
    }
  }
  return finish(t, std::to_string(kThinInstances) + " instances, " + std::to_string(steps) + " kept-children checks");
}

// All C(n+1, k) intersections strictly below delta * 2^N, by direct counting.
bool oracle_hash(const HashFamily& f, std::string* why) {
  size_t m = f.sets.size();
  Rational cap = f.delta * Rational(1L << f.ground);
  std::vector<size_t> pick(f.k);
  std::function<bool(size_t, size_t)> walk = [&](size_t at, size_t from) {
    if (at == f.k) {
      size_t count = 0;
      for (uint32_t x = 0; x < (1u << f.ground); ++x) {
        bool all = true;
        for (size_t i : pick) all = all && std::binary_search(f.sets[i].begin(), f.sets[i].end(), x);
        count += all ? 1 : 0;
      }
      if (Rational(static_cast<long>(count)) < cap) return true;
      *why = "intersection of size " + std::to_string(count);
      return false;
    }
    for (size_t i = from; i < m; ++i) {
      pick[at] = i;
      if (!walk(at + 1, i + 1)) return false;
    }
    return true;
  };
  return walk(0, 0);
}

Outcome hash() {
  auto t0 = std::chrono::steady_clock::now();
  Tally t;
  int ok = 0;
  std::vector<unsigned> ns;
  for (int i = 0; i < kHashSeeds; ++i) {
    Json sc = generate("hash", Json{{"eps", "2/5"}, {"delta", "1/4"}, {"k", 2}, {"n", 3}, {"maxN", 16}},
                       static_cast<uint64_t>(i + 1));
    Json res = run_scenario(sc);
    if (res.at("status") != "ok") continue;
    ++ok;
    auto f = res.at("certificate").get<HashFamily>();
    ns.push_back(f.ground);
    std::string why;
    t.require(f.sets.size() == 4 && f.k == 2 && f.ground <= 16, "seed " + std::to_string(i + 1) + ": shape");
    t.require(oracle_hash(f, &why), "seed " + std::to_string(i + 1) + ": " + why);
    std::string v = verdict_of(res, sc);
    t.require(v.empty(), "seed " + std::to_string(i + 1) + ": " + v);
  }
  double sec = seconds_since(t0);
  t.require(ok >= kHashMinSuccess, "only " + std::to_string(ok) + " seeds succeeded");
  t.require(sec < kHashSeconds, "took " + std::to_string(sec) + " s");
  std::ostringstream os;
  os << ok << "/" << kHashSeeds << " seeds succeed, N in [" << (ns.empty() ? 0 : *std::min_element(ns.begin(), ns.end()))
     << ", " << (ns.empty() ? 0 : *std::max_element(ns.begin(), ns.end())) << "], " << sec << " s";
  return finish(t, os.str());
}

// Membership from the defining set by enumeration.
bool oracle_member(const VCert& c, const FiniteTree& amb) {
  bool big = oracle::SubtreeEnumerator(amb.nodes, c.defining, c.q).exists(c.eta);
  return c.kind == VKind::kPlain ? big : !big;
}

Outcome vcalc() {
  Tally t;
  int pairs = 0;
  std::ostringstream counts;
  for (int item = 1; item <= 6; ++item) {
    int certified = 0, tries = 0;
    for (; certified < kCalcPerItem && tries < kCalcMaxTries; ++tries) {
      Json sc = generate("vcalc", Json{{"item", item}}, seed_for("calc" + std::to_string(item), tries));
      Json res = run_scenario(sc);
      if (res.at("status") == "precondition") continue;
      std::string tag = "item " + std::to_string(item) + " try " + std::to_string(tries);
      t.require(res.at("status") == "ok", tag + ": " + res.at("message").get<std::string>());
      if (res.at("status") != "ok") continue;
      ++certified;
      std::string v = verdict_of(res, sc);
      t.require(v.empty(), tag + ": " + v);
      auto o = res.at("certificate").get<CalculusOutcome>();
      auto c = sc.at("instance").at("calc").get<CalculusInstance>();
      t.require(o.holds, tag + ": counterexample");
      for (const VCert& h : o.hypotheses) t.require(oracle_member(h, c.ambient) == h.member, tag + ": hypothesis");
      t.require(oracle_member(o.conclusion, c.ambient) == o.conclusion.member, tag + ": conclusion");
      // Duality on both sets of the instance.
      for (const auto& [v0, q0] : {std::pair{c.v, c.q}, std::pair{c.v1, c.q1}}) {
        bool plain = in_V(c.psi, c.ambient, c.eta, c.n, q0, v0).member;
        bool tilde = in_tilde_V(c.psi, c.ambient, c.eta, c.n, q0, complement_in(v0, c.n)).member;
        t.require(plain != tilde, tag + ": duality");
        ++pairs;
      }
    }
    t.require(certified == kCalcPerItem, "item " + std::to_string(item) + ": only " + std::to_string(certified) +
                                             " certified instances");
    counts << (item > 1 ? ", " : "") << "item " << item << ": " << certified << "/" << tries;
  }
  return finish(t, counts.str() + "; " + std::to_string(pairs) + " duality pairs");
}

Outcome capture() {
  Tally t;
  int hashed = 0;
  unsigned k_formula = 0;
  {
    // Least k with k > log(lambda) / log(1 - lambda), from the formula.
    double bound = std::log(0.5) / std::log(0.5);
    k_formula = static_cast<unsigned>(std::floor(bound)) + 1;
  }
  t.require(capture_k(Rational(1, 2)) == k_formula, "capture_k(1/2) differs from the formula");
  for (int i = 0; i < kCaptureInstances; ++i) {
    Json sc = generate("capture", Json{{"hash", i % 2 == 1}, {"lambda", "1/2"}}, seed_for("capture", i));
    const Json& in = sc.at("instance");
    Json res = run_scenario(sc);
    std::string tag = "instance " + std::to_string(i);
    t.require(res.at("status") == "ok", tag + ": " + res.at("message").get<std::string>());
    if (res.at("status") != "ok") continue;
    std::string v = verdict_of(res, sc);
    t.require(v.empty(), tag + ": " + v);
    auto c = res.at("certificate").get<CaptureResult>();
    auto psi = in.at("psi").get<ValueFunctional>();
    auto p_hat = in.at("pHat").get<LevelFn>();
    hashed += c.direct ? 0 : 1;
    t.require(oracle_measure(c.v_star.strings()) < Rational(1, 2), tag + ": m(V*) >= 1/2");
    std::vector<Node> leaves = leaves_of(c.t_hat.nodes);
    NodeSet leaf_set(leaves.begin(), leaves.end());
    t.require(oracle::is_bushy_witness(c.t_hat.nodes, p_hat, Node{}, leaf_set), tag + ": T_hat not p_hat-bushy");
    for (const Node& x : leaves) {
      Bits out = psi.output(x);
      t.require(out.size() >= c.n_bits && c.v_star.covers(out.substr(0, c.n_bits)),
                tag + ": leaf " + node_str(x) + " lands outside V*");
    }
    t.require(c.k == k_formula, tag + ": k differs from the formula");
  }
  std::ostringstream os;
  os << kCaptureInstances << " instances (" << hashed << " through hash families), k = " << k_formula;
  return finish(t, os.str());
}

// Test-side reading of a j-splitting certificate.
void oracle_split(const SplitCertificate& c, const std::vector<SplitInstance>& inst, const SplitParams& prm,
                  Tally& t, const std::string& tag) {
  if (const auto* d = std::get_if<DisjointCert>(&c)) {
    t.require(d->parts.size() == inst.size(), tag + ": part count");
    for (size_t i = 0; i < d->parts.size() && i < inst.size(); ++i) {
      const DisjointPart& part = d->parts[i];
      NodeSet landing;
      for (const Node& x : inst[i].ambient.nodes) {
        Bits out = inst[i].psi.output(x);
        if (out.size() >= part.n && part.v.count(out.substr(0, part.n))) landing.insert(x);
      }
      t.require(oracle::is_bushy_witness(part.witness.tree.nodes, prm.q, inst[i].eta, landing),
                tag + ": part " + std::to_string(i) + " is not q-big");
      for (size_t k = i + 1; k < d->parts.size(); ++k) {
        for (const Bits& a : part.v) {
          for (const Bits& b : d->parts[k].v) t.require(!bits_comparable(a, b), tag + ": parts meet");
        }
      }
    }
  } else if (const auto* nt = std::get_if<NonTotalCert>(&c)) {
    const SplitInstance& in = inst.at(nt->index);
    for (const Node& x : nt->tree.nodes) {
      for (const Node& s : nt->s) {
        if (is_prefix(s, x)) t.require(in.psi.output(x).size() < nt->n_hat, tag + ": claimed divergence converges");
      }
    }
  } else if (const auto* cp = std::get_if<ComputableCert>(&c)) {
    const SplitInstance& in = inst.at(cp->index);
    for (const Node& x : cp->tree.nodes) {
      Bits out = in.psi.output(x);
      for (unsigned n = cp->n_bar + 1; n <= cp->n_top && n <= out.size(); ++n) {
        t.require(cp->w_levels[n - cp->n_bar - 1].count(out.substr(0, n)) > 0, tag + ": value outside W");
      }
    }
  }
}

Outcome jsplit(std::string* table) {
  Tally t;
  std::map<std::string, int> variants;
  int inconclusive = 0;
  std::vector<Json> results, verdicts;
  static const std::vector<std::string> modes = {"random", "few", "partial"};
  for (int i = 0; i < kJsplitInstances; ++i) {
    int j = 1 + i % 3;
    std::string mode = modes[i / 3 % 3];
    Json sc = generate("jsplit", Json{{"j", j}, {"mode", mode}}, seed_for("jsplit", i));
    const Json& in = sc.at("instance");
    Json res = run_scenario(sc);
    std::string tag = "instance " + std::to_string(i) + " (" + mode + ", j=" + std::to_string(j) + ")";
    std::string status = res.at("status");
    t.require(status == "ok" || status == "inconclusive", tag + ": " + res.at("message").get<std::string>());
    results.push_back(res);
    verdicts.push_back(verify_result(res, sc));
    if (status == "inconclusive") {
      ++inconclusive;
      continue;
    }
    if (status != "ok") continue;
    t.require(verdicts.back().at("ok").get<bool>(), tag + ": " + verdicts.back().at("detail").get<std::string>());
    auto c = res.at("certificate").get<SplitCertificate>();
    ++variants[variant_name(c)];
    auto inst = in.at("instances").get<std::vector<SplitInstance>>();
    oracle_split(c, inst, in.at("params").get<SplitParams>(), t, tag);
  }
  double rate = static_cast<double>(inconclusive) / kJsplitInstances;
  t.require(rate <= kJsplitMaxInconclusive, "inconclusive rate " + std::to_string(rate));
  Json rep = report(results, verdicts);
  const Json& rows = rep.at("jsplitBushiness");
  std::set<size_t> js;
  for (const Json& row : rows) {
    js.insert(row.at("j").get<size_t>());
    Rational q = row.at("qHat").get<Rational>();
    Rational need = Rational(static_cast<long>(row.at("j").get<size_t>())) * q;
    t.require(row.at("requiredHere").get<Rational>() == need, "table row j*qHat");
    t.require(row.at("referenceLabel").get<std::string>().find("not a rerun") != std::string::npos,
              "reference column must be labelled");
  }
  t.require(js == std::set<size_t>{1, 2, 3}, "table misses some j");
  std::string md = report_markdown(rep);
  auto at = md.find("## Required bushiness");
  *table = at == std::string::npos ? std::string() : md.substr(at);
  std::ostringstream os;
  os << kJsplitInstances << " instances, inconclusive " << inconclusive << " (" << 100.0 * rate << "%)";
  for (const auto& [name, n] : variants) os << ", " << name << " " << n;
  return finish(t, os.str());
}

Outcome schnorr() {
  Tally t;
  int rounds = 0, nodes = 0;
  for (int i = 0; i < kSchnorrInstances; ++i) {
    unsigned depth = 4 + static_cast<unsigned>(i % 3);
    Json prm{{"branch", 2 + i % 3}, {"depth", depth}, {"fill", 1 + i % 3}, {"rounds", 1 + i % 2}};
    Json sc = generate("schnorr-round", prm, seed_for("schnorr", i));
    const Json& in = sc.at("instance");
    auto psi = in.at("psi").get<TestFunctional>();
    std::string tag = "instance " + std::to_string(i);
    t.require(depth <= kSchnorrMaxDepth && psi.budget() <= Rational(1, 8), tag + ": outside depth/budget bounds");
    Json res = run_scenario(sc);
    t.require(res.at("status") == "ok", tag + ": " + res.at("message").get<std::string>());
    if (res.at("status") != "ok") continue;
    std::string v = verdict_of(res, sc);
    t.require(v.empty(), tag + ": " + v);
    auto s = res.at("certificate").at("state").get<RoundState>();
    auto av = res.at("certificate").at("avoider").get<Avoider>();
    for (size_t j = 0; j < s.trees.size(); ++j) {
      ++rounds;
      for (const Node& x : s.trees[j].nodes) {
        if (x.size() != s.level[j + 1]) continue;
        ++nodes;
        Rational c = oracle::split_measure(oracle::emitted(psi, x, s.time[j]), s.rho[j]);
        Rational sq = c * c;
        t.require(sq < s.lambda[j], tag + ": squared invariant at " + node_str(x));
      }
    }
    for (const Node& x : av.t_hat.nodes) {
      if (x.size() != s.level.back()) continue;
      for (const Bits& b : oracle::emitted(psi, x, s.time.back())) {
        t.require(!bits_prefix(b, av.x), tag + ": X lies in an emitted cylinder");
      }
    }
  }
  // The adversarial instance: an entry at a depth-t ancestor of a top leaf
  // covering the previous rho.
  bool fired = false;
  {
    ScheduledInstance inst = scheduled_instance(3, 3, 4, 3, 2);
    Expulsion core;
    RoundState s = initial_round(inst.psi, inst.ambient, core, {}, inst.p, inst.q, inst.eps);
    s = avoidance_round(s, inst.psi, inst.ambient, core);
    s = avoidance_round(s, inst.psi, inst.ambient, core);
    Avoider a = assemble_avoider(s, inst.psi, inst.ambient, core);
    uint32_t time = s.time.back();
    Node leaf;
    for (const Node& x : a.t_hat.nodes) {
      if (x.size() == s.level.back()) leaf = x;
    }
    TestFunctional bad = inst.psi;
    bad.add(Node(leaf.begin(), leaf.begin() + time),
            TestEntry{time, CylinderSet(std::vector<Bits>{s.rho[s.rho.size() - 2]}), time});
    try {
      assemble_avoider(s, bad, inst.ambient, core);
    } catch (const Error& e) {
      fired = e.kind() == ErrorKind::kPrecondition && std::string(e.what()).find("contradiction") != std::string::npos;
    }
  }
  t.require(fired, "adversarial instance was not rejected by the contradiction check");
  std::ostringstream os;
  os << kSchnorrInstances << " instances, " << rounds << " rounds, " << nodes
     << " node invariants; adversarial instance rejected";
  return finish(t, os.str());
}

Outcome covering() {
  Tally t;
  int levels = 0;
  for (unsigned rounds = 1; rounds <= 3; ++rounds) {
    for (int i = 0; i < kCoveringPerRounds; ++i) {
      Json sc = generate("covering-test", Json{{"rounds", rounds}}, seed_for("cover" + std::to_string(rounds), i));
      const Json& in = sc.at("instance");
      Json res = run_scenario(sc);
      std::string tag = "rounds " + std::to_string(rounds) + " instance " + std::to_string(i);
      t.require(res.at("status") == "ok", tag + ": " + res.at("message").get<std::string>());
      if (res.at("status") != "ok") continue;
      std::string v = verdict_of(res, sc);
      t.require(v.empty(), tag + ": " + v);
      auto c = res.at("certificate").get<CoveringResult>();
      auto psi = in.at("psi").get<ValueFunctional>();
      t.require(c.test.levels.size() == rounds, tag + ": level count");
      for (size_t n = 0; n < c.test.levels.size(); ++n) {
        ++levels;
        t.require(oracle_measure(c.test.levels[n].strings()) <= pow2_neg(static_cast<unsigned>(n)),
                  tag + ": m(V_" + std::to_string(n) + ") > 2^-n");
        // Coverage on maximal nodes of the final tree.
        for (const Node& x : leaves_of(c.t_hat.nodes)) {
          Bits out = psi.output(x);
          t.require(c.test.levels[n].covers(out), tag + ": leaf " + node_str(x) + " escapes V_" + std::to_string(n));
        }
      }
    }
  }
  return finish(t, std::to_string(3 * kCoveringPerRounds) + " tests, " + std::to_string(levels) + " levels");
}

Outcome roundtrip() {
  Tally t;
  size_t checked = 0;
  std::set<std::string> types;
  std::vector<Json> plan = suite_plan(kSuitePerKind * scenario_kinds().size(), 77);
  for (size_t i = 0; i < plan.size(); ++i) {
    const Json& sc = plan[i];
    std::string tag = "scenario " + std::to_string(i) + " (" + sc.at("kind").get<std::string>() + ")";
    Json again = bushy::generate(sc.at("kind").get<std::string>(), sc.at("params"), sc.at("seed").get<uint64_t>());
    t.require(again.dump() == sc.dump(), tag + ": regeneration differs");
    Json res = run_scenario(sc);
    std::string text = res.dump(2);
    Json rerun = run_scenario(parse_json(sc.dump(2)));
    t.require(rerun.dump(2) == text, tag + ": rerun is not byte-identical");
    Json back = parse_json(text);
    t.require(back == res, tag + ": parse(serialize) differs");
    Json v1 = verify_result(res, sc), v2 = verify_result(back, parse_json(sc.dump()));
    t.require(v1 == v2, tag + ": verdict changed across the round trip");
    if (!res.at("certificate").is_null()) {
      ++checked;
      types.insert(sc.at("kind").get<std::string>());
      t.require(v1.at("ok").get<bool>(), tag + ": " + v1.at("detail").get<std::string>());
    }
  }
  t.require(types.size() == scenario_kinds().size(), "some kinds produced no certificate");
  return finish(t, std::to_string(plan.size()) + " scenarios, " + std::to_string(checked) + " certificates over " +
                       std::to_string(types.size()) + " kinds");
}

}  // namespace

int main() {
  std::string table;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"bigness agrees with enumeration", bigness},
      {"splitting returns a verified side", split},
      {"exact thinning", thin},
      {"hash families", hash},
      {"V-calculus laws and duality", vcalc},
      {"capture at lambda = 1/2", capture},
      {"j-splitting trichotomy", [&] { return jsplit(&table); }},
      {"Schnorr avoidance rounds", schnorr},
      {"covering test", covering},
      {"certificate round trip", roundtrip},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << (i + 1) << "] " << criteria[i].first << ": " << o.detail << " ("
              << seconds_since(t0) << " s)" << std::endl;
  }
  if (!table.empty()) std::cout << "\n" << table;
  return failed;
}
