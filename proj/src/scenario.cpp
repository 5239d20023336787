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

#include "bushy/scenario.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "bushy/seed.hpp"

namespace bushy {

const char* status_name(Status s) {
  switch (s) {
    case Status::kOk: return "ok";
    case Status::kInvalid: return "invalid";
    case Status::kRefusal: return "refusal";
    case Status::kInconclusive: return "inconclusive";
    case Status::kPrecondition: return "precondition";
    default: return "internal";
  }
}

Status status_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::kInvalidInput: return Status::kInvalid;
    case ErrorKind::kPrecondition: return Status::kPrecondition;
    case ErrorKind::kInconclusive: return Status::kInconclusive;
    default: return Status::kInternal;
  }
}

Caps caps_from_json(const Json& j) {
  Caps c;
  if (j.is_null()) return c;
  c.branching = j.value("branching", c.branching);
  c.depth = j.value("depth", c.depth);
  c.ground = j.value("N", c.ground);
  c.j = j.value("j", c.j);
  return c;
}

const std::vector<std::string>& scenario_kinds() {
  static const std::vector<std::string> kinds = {"bigness", "split",      "thin",          "hash",
                                                 "vcalc",   "capture",    "jsplit",        "split-step",
                                                 "schnorr-round", "covering-test", "classify"};
  return kinds;
}

namespace {

using Rng = std::mt19937_64;

template <typename T>
T param(const Json& params, const char* key, T fallback) {
  if (!params.contains(key) || params.at(key).is_null()) return fallback;
  return read_as<T>(params.at(key), std::string("parameter ") + key);
}

void cap(bool ok, const std::string& what) {
  if (!ok) fail(ErrorKind::kPrecondition, "caps exceeded: " + what);
}

void cap_shape(uint32_t branch, unsigned depth, const Caps& caps) {
  cap(branch >= 1 && branch <= caps.branching, "branching " + std::to_string(branch));
  cap(depth >= 1 && depth <= caps.depth, "depth " + std::to_string(depth));
}

FiniteTree full(uint32_t branch, unsigned depth) {
  FiniteTree t;
  t.bound = LevelFn(Rational(branch));
  t.max_depth = depth;
  std::vector<Node> layer{Node{}};
  t.nodes.insert(Node{});
  for (unsigned d = 0; d < depth; ++d) {
    std::vector<Node> next;
    for (const Node& x : layer) {
      for (uint32_t i = 0; i < branch; ++i) next.push_back(extend(x, i));
    }
    t.nodes.insert(next.begin(), next.end());
    layer.swap(next);
  }
  return t;
}

FiniteTree sparse(Rng& rng, uint32_t branch, unsigned depth) {
  FiniteTree t;
  t.bound = LevelFn(Rational(branch));
  t.max_depth = depth;
  t.nodes.insert(Node{});
  std::vector<Node> todo{Node{}};
  std::uniform_int_distribution<uint32_t> width(1, branch);
  std::bernoulli_distribution grow(0.85);
  while (!todo.empty()) {
    Node x = todo.back();
    todo.pop_back();
    if (x.size() >= depth || (!x.empty() && !grow(rng))) continue;
    std::vector<uint32_t> labels(branch);
    for (uint32_t i = 0; i < branch; ++i) labels[i] = i;
    std::shuffle(labels.begin(), labels.end(), rng);
    uint32_t w = width(rng);
    for (uint32_t i = 0; i < w; ++i) {
      t.nodes.insert(extend(x, labels[i]));
      todo.push_back(extend(x, labels[i]));
    }
  }
  return t;
}

Bits random_bits(Rng& rng, size_t n) {
  Bits b(n, '0');
  for (char& c : b) c = (rng() & 1) ? '1' : '0';
  return b;
}

// Each node extends its parent's output by min_ext..max_ext random bits.
ValueFunctional growing(Rng& rng, const FiniteTree& t, unsigned min_ext, unsigned max_ext) {
  std::uniform_int_distribution<unsigned> ext(min_ext, max_ext);
  std::map<Node, Bits> out;
  ValueFunctional psi;
  for (const Node& x : t.nodes) {
    Bits b = x.empty() ? Bits() : out.at(parent_of(x)) + random_bits(rng, ext(rng));
    out[x] = b;
    psi.set(x, b);
  }
  return psi;
}

NodeSet pick(Rng& rng, const NodeSet& from, double prob) {
  std::bernoulli_distribution in(prob);
  NodeSet out;
  for (const Node& x : from) {
    if (in(rng)) out.insert(x);
  }
  return out;
}

NodeSet leaf_set(const NodeSet& t) {
  std::vector<Node> l = leaves_of(t);
  return NodeSet(l.begin(), l.end());
}

std::set<Bits> random_strings(Rng& rng, unsigned n, double density) {
  std::bernoulli_distribution in(density);
  std::set<Bits> v;
  for (const Bits& b : all_strings(n)) {
    if (in(rng)) v.insert(b);
  }
  return v;
}

FiniteTree cone_tree(const FiniteTree& t, const Node& eta) {
  FiniteTree out{path_to(eta), t.bound, t.max_depth};
  for (const Node& x : cone_of(t.nodes, eta)) out.nodes.insert(x);
  return out;
}

std::optional<std::string> closed(const NodeSet& s) {
  for (const Node& x : s) {
    if (!x.empty() && !s.count(parent_of(x))) return "node " + node_str(x) + " has no parent in the tree";
  }
  return std::nullopt;
}

std::optional<std::string> inside(const NodeSet& s, const NodeSet& ambient) {
  for (const Node& x : s) {
    if (!ambient.count(x)) return "node " + node_str(x) + " outside the ambient tree";
  }
  return std::nullopt;
}

struct RunOut {
  Status status = Status::kOk;
  Json certificate;
  Json facts = Json::object();
  std::string message;
};

using Verdict = std::optional<std::string>;

struct Kind {
  std::function<Json(const Json&, Rng&, uint64_t, const Caps&)> gen;
  std::function<RunOut(const Json&, uint64_t)> run;
  std::function<Verdict(const Json&, const Json&)> verify;
};

// ---- bigness

Json gen_bigness(const Json& prm, Rng& rng, uint64_t, const Caps& caps) {
  auto b = param<uint32_t>(prm, "branch", 4);
  auto d = param<unsigned>(prm, "depth", 3);
  cap_shape(b, d, caps);
  Rational density = param<Rational>(prm, "density", Rational(1, 2));
  FiniteTree t = sparse(rng, b, d);
  static const std::vector<Rational> ps = {Rational(1), Rational(3, 2), Rational(2), Rational(5, 2), Rational(3)};
  Rational p = prm.contains("p") ? param<Rational>(prm, "p", 1) : ps[rng() % ps.size()];
  NodeSet s = pick(rng, t.nodes, density.get_d());
  return Json{{"ambient", t}, {"s", s}, {"p", LevelFn(p)}, {"root", Node{}}};
}

RunOut run_bigness(const Json& in, uint64_t) {
  BigDecision d = decide_big(in.at("s").get<NodeSet>(), in.at("p").get<LevelFn>(), in.at("root").get<Node>(),
                             in.at("ambient").get<FiniteTree>());
  RunOut r;
  r.certificate = d;
  r.facts = Json{{"big", d.big}};
  r.status = d.big ? Status::kOk : Status::kRefusal;
  if (!d.big) r.message = "small: negative certificate";
  return r;
}

Verdict verify_bigness(const Json& cert, const Json& in) {
  auto d = cert.get<BigDecision>();
  auto t = in.at("ambient").get<FiniteTree>();
  auto s = in.at("s").get<NodeSet>();
  auto p = in.at("p").get<LevelFn>();
  auto root = in.at("root").get<Node>();
  if (d.big) {
    if (!d.witness || d.table) return "big decision must carry exactly a witness";
    const BigWitness& w = *d.witness;
    if (w.root != root || !(w.p == p) || w.targets != cone_of(s, root)) return "witness data differs from the instance";
    if (auto e = closed(w.tree.nodes)) return e;
    return check_witness(w, &t.nodes);
  }
  if (!d.table || d.witness) return "small decision must carry exactly a table";
  if (d.table->root != root || !(d.table->p == p) || d.table->targets != cone_of(s, root)) {
    return "table data differs from the instance";
  }
  return check_small_table(*d.table, t);
}

// ---- split

Json gen_split(const Json& prm, Rng& rng, uint64_t, const Caps& caps) {
  auto b = param<uint32_t>(prm, "branch", 4);
  auto d = param<unsigned>(prm, "depth", 2);
  cap_shape(b, d, caps);
  if (b < 2) fail(ErrorKind::kPrecondition, "split needs branching >= 2");
  FiniteTree t = full(b, d);
  uint32_t pk = 1 + static_cast<uint32_t>(rng() % (b - 1));
  LevelFn p{Rational(pk)}, q{Rational(b - pk)};
  NodeSet leaves = leaf_set(t.nodes);
  NodeSet bs = pick(rng, leaves, 0.5), cs;
  for (const Node& x : leaves) {
    if (!bs.count(x)) cs.insert(x);
  }
  BigWitness w{t, Node{}, p + q, leaves};
  return Json{{"ambient", t}, {"b", bs}, {"c", cs}, {"p", p}, {"q", q}, {"root", Node{}}, {"witness", w}};
}

RunOut run_split(const Json& in, uint64_t) {
  SplitResult s = split_big(in.at("b").get<NodeSet>(), in.at("c").get<NodeSet>(), in.at("p").get<LevelFn>(),
                            in.at("q").get<LevelFn>(), in.at("root").get<Node>(), in.at("witness").get<BigWitness>());
  RunOut r;
  r.certificate = s;
  r.facts = Json{{"side", s.side == Side::kLeft ? "B" : "C"}};
  return r;
}

Verdict verify_split(const Json& cert, const Json& in) {
  auto s = cert.get<SplitResult>();
  auto t = in.at("ambient").get<FiniteTree>();
  auto root = in.at("root").get<Node>();
  bool left = s.side == Side::kLeft;
  auto side = in.at(left ? "b" : "c").get<NodeSet>();
  auto p = in.at(left ? "p" : "q").get<LevelFn>();
  if (s.witness.root != root || !(s.witness.p == p) || s.witness.targets != cone_of(side, root)) {
    return "witness data differs from the chosen side";
  }
  if (auto e = closed(s.witness.tree.nodes)) return e;
  return check_witness(s.witness, &t.nodes);
}

// ---- thin

Json gen_thin(const Json& prm, Rng& rng, uint64_t, const Caps& caps) {
  auto b = param<uint32_t>(prm, "branch", 4);
  auto d = param<unsigned>(prm, "depth", 3);
  cap_shape(b, d, caps);
  FiniteTree t = full(b, d);
  static const std::vector<Rational> es = {Rational(1, 16), Rational(1, 12), Rational(1, 8)};
  NodeSet leaves = leaf_set(t.nodes);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<Rational> eps;
    Rational sum = 0;
    for (unsigned l = 0; l < d; ++l) {
      eps.push_back(es[rng() % es.size()]);
      sum += eps.back();
    }
    double density = 0.6 + 0.35 * static_cast<double>(rng() % 1000) / 1000.0;
    NodeSet s = pick(rng, leaves, density);
    Rational ratio = Rational(static_cast<long>(s.size())) / Rational(static_cast<long>(leaves.size()));
    if (!(ratio > sum)) continue;
    Rational lambda = (ratio + sum) / 2;
    return Json{{"tree", t},   {"root", Node{}},          {"p", LevelFn(Rational(b))},
                {"s", s},      {"lambda", lambda},        {"eps", LevelFn(eps, 0)}};
  }
  fail(ErrorKind::kInternal, "no thinning instance drawn");
}

RunOut run_thin(const Json& in, uint64_t) {
  ThinResult t = exact_thin(in.at("tree").get<FiniteTree>(), in.at("root").get<Node>(), in.at("p").get<LevelFn>(),
                            in.at("s").get<NodeSet>(), in.at("lambda").get<Rational>(), in.at("eps").get<LevelFn>());
  RunOut r;
  r.certificate = t;
  r.facts = Json{{"leaves", leaves_of(t.tree.nodes).size()}, {"steps", t.steps.size()}};
  return r;
}

Verdict verify_thin(const Json& cert, const Json& in) {
  auto r = cert.get<ThinResult>();
  auto t = in.at("tree").get<FiniteTree>();
  auto root = in.at("root").get<Node>();
  auto p = in.at("p").get<LevelFn>();
  auto s = in.at("s").get<NodeSet>();
  auto eps = in.at("eps").get<LevelFn>();
  if (auto e = inside(r.tree.nodes, t.nodes)) return e;
  if (auto e = closed(r.tree.nodes)) return e;
  if (!r.tree.contains(root)) return "thinned tree misses the root";
  size_t depth = 0;
  for (const Node& x : t.nodes) depth = std::max(depth, x.size());
  for (size_t l = root.size(); l < depth; ++l) {
    Rational want = p(l) * eps(l);
    if (r.p_hat(l) != want) return "p_hat differs from p * eps at level " + std::to_string(l);
  }
  if (auto e = check_bushy_over(r.tree.nodes, r.p_hat, root)) return "not p*eps-bushy: " + *e;
  for (const Node& x : leaves_of(cone_of(r.tree.nodes, root))) {
    if (!s.count(x)) return "leaf " + node_str(x) + " not in S";
  }
  for (const ThinStep& st : r.steps) {
    if (!(Rational(static_cast<long>(st.kept)) > st.eps * Rational(static_cast<long>(st.children)))) {
      return "step at " + node_str(st.node) + " keeps " + std::to_string(st.kept) + " of " +
             std::to_string(st.children);
    }
    if (st.eps != eps(st.node.size())) return "step at " + node_str(st.node) + " uses the wrong eps";
  }
  return std::nullopt;
}

// ---- hash

Json gen_hash(const Json& prm, Rng&, uint64_t, const Caps& caps) {
  Rational eps = param<Rational>(prm, "eps", Rational(2, 5));
  Rational delta = param<Rational>(prm, "delta", Rational(1, 4));
  auto k = param<unsigned>(prm, "k", 2);
  auto n = param<unsigned>(prm, "n", 3);
  auto max_n = param<unsigned>(prm, "maxN", 16);
  cap(max_n <= caps.ground, "maxN " + std::to_string(max_n));
  cap(n >= 1 && n <= 31, "n " + std::to_string(n));
  if (!choose_eps_hat(eps, delta, k)) fail(ErrorKind::kPrecondition, "no inclusion probability fits (eps, delta, k)");
  return Json{{"eps", eps}, {"delta", delta}, {"k", k}, {"n", n}, {"maxN", max_n}};
}

RunOut run_hash(const Json& in, uint64_t seed) {
  HashGeneration g = generate_hash_family(in.at("eps").get<Rational>(), in.at("delta").get<Rational>(),
                                          in.at("k").get<unsigned>(), in.at("n").get<unsigned>(),
                                          derive_seed(seed, "hash"), in.at("maxN").get<unsigned>());
  RunOut r;
  r.certificate = g.family;
  r.facts = Json{{"N", g.family.ground}, {"attempts", g.attempts.size()}};
  return r;
}

Verdict verify_hash(const Json& cert, const Json& in) {
  auto f = cert.get<HashFamily>();
  if (f.epsilon != in.at("eps").get<Rational>() || f.delta != in.at("delta").get<Rational>() ||
      f.k != in.at("k").get<unsigned>()) {
    return "family parameters differ from the instance";
  }
  if (f.sets.size() != in.at("n").get<unsigned>() + 1) return "family must have n + 1 sets";
  if (f.ground > in.at("maxN").get<unsigned>()) return "N above maxN";
  HashVerdict v = verify_hash_family(f);
  if (v.ok) return std::nullopt;
  std::ostringstream os;
  os << v.kind << " violation at";
  for (size_t i : v.index) os << ' ' << i;
  os << " (value " << to_string(v.value) << ")";
  return os.str();
}

// ---- vcalc

Json gen_vcalc(const Json& prm, Rng& rng, uint64_t, const Caps& caps) {
  auto item = param<int>(prm, "item", 1 + static_cast<int>(rng() % 6));
  auto b = param<uint32_t>(prm, "branch", 4);
  auto d = param<unsigned>(prm, "depth", 3);
  cap_shape(b, d, caps);
  if (item < 1 || item > 6) fail(ErrorKind::kPrecondition, "item must be in 1..6");
  static const std::vector<Rational> qs = {Rational(0), Rational(1, 2), Rational(1), Rational(2), Rational(3)};
  auto levelfn = [&]() {
    std::vector<Rational> tab;
    for (unsigned i = 0; i <= d; ++i) tab.push_back(qs[rng() % qs.size()]);
    return LevelFn(tab, qs[rng() % qs.size()]);
  };
  CalculusInstance last;
  for (int attempt = 0; attempt < 400; ++attempt) {
    FiniteTree t = sparse(rng, b, d);
    ValueFunctional psi = growing(rng, t, 0, 2);
    unsigned n = 1 + static_cast<unsigned>(rng() % 2);
    double d0 = 0.2 + 0.3 * static_cast<double>(rng() % 3), d1 = 0.2 + 0.3 * static_cast<double>(rng() % 3);
    last = CalculusInstance{psi, t, {}, n, CylinderSet(random_strings(rng, n, d0)),
                            CylinderSet(random_strings(rng, n, d1)), levelfn(), levelfn()};
    try {
      calculus_check(item, last);
      break;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kPrecondition) throw;
    }
  }
  return Json{{"item", item}, {"calc", last}};
}

RunOut run_vcalc(const Json& in, uint64_t) {
  int item = in.at("item").get<int>();
  CalculusOutcome o = calculus_check(item, in.at("calc").get<CalculusInstance>());
  RunOut r;
  r.certificate = o;
  r.facts = Json{{"item", item}, {"holds", o.holds}};
  if (!o.holds) {
    r.status = Status::kInternal;
    r.message = "counterexample to calculus item " + std::to_string(item);
  }
  return r;
}

Verdict verify_vcalc(const Json& cert, const Json& in) {
  auto o = cert.get<CalculusOutcome>();
  auto c = in.at("calc").get<CalculusInstance>();
  // Required membership of each hypothesis per item; item 1 has none.
  static const std::map<int, std::vector<bool>> want = {
      {2, {true, true}}, {3, {true, true}}, {4, {true, false}}, {5, {true, false}}, {6, {false, false}}};
  int item = in.at("item").get<int>();
  if (!o.holds) return "the item does not hold";
  auto it = want.find(item);
  for (size_t i = 0; i < o.hypotheses.size(); ++i) {
    const VCert& h = o.hypotheses[i];
    if (it != want.end() && (i >= it->second.size() || h.member != it->second[i])) {
      return "hypothesis " + std::to_string(i) + " has the wrong membership";
    }
    if (auto e = check_vcert(h, c.psi, c.ambient)) return "hypothesis: " + *e;
  }
  if (item != 1 && o.conclusion.member != (item != 6)) return "conclusion has the wrong membership";
  if (auto e = check_vcert(o.conclusion, c.psi, c.ambient)) return "conclusion: " + *e;
  return std::nullopt;
}

// ---- capture

// With "hash" set the direct route is skipped and the defaults follow the
// wide shallow shape where the hash-family route applies.
Json gen_capture(const Json& prm, Rng& rng, uint64_t, const Caps& caps) {
  bool hash = param<bool>(prm, "hash", false);
  auto b = param<uint32_t>(prm, "branch", hash ? 21 : 10);
  auto d = param<unsigned>(prm, "depth", 2);
  cap_shape(b, d, caps);
  Rational lambda = param<Rational>(prm, "lambda", Rational(1, 2));
  LevelFn p_hat = param<LevelFn>(prm, "pHat", LevelFn(Rational(hash ? 2 : 1)));
  LevelFn q = param<LevelFn>(prm, "q", LevelFn(hash ? Rational(1, 4) : Rational(0)));
  auto lo = param<unsigned>(prm, "minExt", hash ? 4 : 2);
  auto hi = param<unsigned>(prm, "maxExt", hash ? 5 : 3);
  FiniteTree t = full(b, d);
  ValueFunctional psi = growing(rng, t, lo, hi);
  return Json{{"ambient", t},   {"core", t},  {"psi", psi},    {"rho", Node{}}, {"lambda", lambda},
              {"p", LevelFn(Rational(b))},    {"q", q},        {"pHat", p_hat}, {"hash", hash}};
}

RunOut run_capture(const Json& in, uint64_t seed) {
  CaptureOptions opt;
  opt.seed = derive_seed(seed, "capture");
  opt.skip_direct = in.value("hash", false);
  CaptureResult c = capture_small_measure(in.at("ambient").get<FiniteTree>(), in.at("core").get<FiniteTree>(),
                                          in.at("psi").get<ValueFunctional>(), in.at("rho").get<Node>(),
                                          in.at("lambda").get<Rational>(), in.at("p").get<LevelFn>(),
                                          in.at("q").get<LevelFn>(), in.at("pHat").get<LevelFn>(), opt);
  RunOut r;
  r.certificate = c;
  r.facts = Json{{"N", c.n_bits}, {"k", c.k}, {"direct", c.direct}};
  if (c.family) r.facts["hashN"] = c.family->ground;
  return r;
}

Verdict verify_capture(const Json& cert, const Json& in) {
  auto c = cert.get<CaptureResult>();
  auto lambda = in.at("lambda").get<Rational>();
  Rational miss = 1 - lambda;
  Rational pw = pow(miss, c.k);
  Rational prev = c.k == 0 ? Rational(1) : Rational(pw / miss);
  if (!(pw < lambda) || (c.k > 0 && prev < lambda)) return "k is not the least k with (1 - lambda)^k < lambda";
  return check_capture(c, in.at("ambient").get<FiniteTree>(), in.at("core").get<FiniteTree>(),
                       in.at("psi").get<ValueFunctional>(), in.at("rho").get<Node>(), lambda,
                       in.at("pHat").get<LevelFn>());
}

// ---- jsplit

std::vector<SplitInstance> jsplit_instances(const Json& in) {
  return in.at("instances").get<std::vector<SplitInstance>>();
}

// Modes: "random" grows outputs freely; "few" gives every first-level
// subtree a handful of long constant outputs; "partial" stops a random set of
// three children per first-level node just after a deviating bit.
ValueFunctional jsplit_functional(Rng& rng, const FiniteTree& t, const std::string& mode, unsigned lo,
                                  unsigned hi, uint32_t branch, unsigned depth) {
  if (mode == "random") return growing(rng, t, lo, hi);
  ValueFunctional psi;
  if (mode == "few") {
    std::map<uint32_t, std::vector<Bits>> values;
    for (uint32_t a = 0; a < branch; ++a) {
      size_t w = 1 + rng() % 2;
      for (size_t k = 0; k < w; ++k) values[a].push_back(random_bits(rng, 3 * depth));
    }
    for (const Node& x : t.nodes) {
      if (x.empty()) continue;
      const auto& v = values.at(x[0]);
      psi.set(x, x.size() == 1 ? Bits() : v[x[1] % v.size()]);
    }
    return psi;
  }
  if (mode != "partial") fail(ErrorKind::kPrecondition, "unknown mode " + mode);
  if (branch < 4) fail(ErrorKind::kPrecondition, "partial mode needs branching >= 4");
  std::map<uint32_t, std::set<uint32_t>> stop;
  for (uint32_t a = 0; a < branch; ++a) {
    std::vector<uint32_t> kids(branch);
    for (uint32_t i = 0; i < branch; ++i) kids[i] = i;
    std::shuffle(kids.begin(), kids.end(), rng);
    stop[a].insert(kids.begin(), kids.begin() + 3);
  }
  for (const Node& x : t.nodes) {
    if (x.empty()) continue;
    if (x.size() >= 2 && stop.at(x[0]).count(x[1])) {
      psi.set(x, Bits(3 + (x[1] % 3), '0') + "1");
    } else {
      psi.set(x, Bits(x.size() * 3, '0'));
    }
  }
  return psi;
}

Json gen_jsplit(const Json& prm, Rng& rng, uint64_t, const Caps& caps) {
  auto j = param<unsigned>(prm, "j", 2);
  std::string mode = param<std::string>(prm, "mode", "random");
  auto b = param<uint32_t>(prm, "branch", mode == "partial" ? 12 : 7);
  auto d = param<unsigned>(prm, "depth", 3);
  cap_shape(b, d, caps);
  cap(j >= 1 && j <= caps.j && j <= b, "j " + std::to_string(j));
  Rational q = param<Rational>(prm, "q", mode == "partial" && j <= 2 ? Rational(2) : Rational(1));
  Rational q2 = param<Rational>(prm, "q2", Rational(1, 2));
  auto lo = param<unsigned>(prm, "minExt", 1);
  auto hi = param<unsigned>(prm, "maxExt", 3);
  if (lo > hi) fail(ErrorKind::kPrecondition, "minExt above maxExt");
  FiniteTree t = full(b, d);
  SplitParams prm_out;
  prm_out.p = LevelFn(Rational(b));
  prm_out.q = LevelFn(q);
  prm_out.q1 = LevelFn(Rational(0));
  prm_out.q2 = LevelFn(q2);
  prm_out.qi.assign(j, LevelFn(Rational(0)));
  prm_out.v_star = {""};
  prm_out.n_star = 0;
  std::vector<SplitInstance> inst;
  for (int attempt = 0; attempt < 50; ++attempt) {
    ValueFunctional psi = jsplit_functional(rng, t, mode, lo, hi, b, d);
    if (auto e = psi.validate()) fail(ErrorKind::kInternal, "generated functional: " + *e);
    inst.clear();
    bool ok = true;
    for (uint32_t i = 0; i < j; ++i) {
      inst.push_back(SplitInstance{psi, t, t, Node{i}});
      // Generator self-check: V* is in the small family at n*.
      ok = ok && in_tilde_V(psi, t, Node{i}, 0, prm_out.q1, CylinderSet(prm_out.v_star)).member;
    }
    if (ok) return Json{{"instances", inst}, {"params", prm_out}, {"mode", mode}};
  }
  fail(ErrorKind::kPrecondition, "no instance with certified preconditions drawn");
}

RunOut run_jsplit(const Json& in, uint64_t) {
  auto inst = jsplit_instances(in);
  auto prm = in.at("params").get<SplitParams>();
  SplitCertificate c = j_split(inst, prm);
  RunOut r;
  r.certificate = c;
  r.facts = Json{{"j", inst.size()}, {"qHat", prm.q(0)}, {"variant", variant_name(c)}};
  if (std::holds_alternative<Inconclusive>(c)) {
    r.status = Status::kInconclusive;
    r.message = std::get<Inconclusive>(c).reason;
  }
  return r;
}

Verdict verify_jsplit(const Json& cert, const Json& in) {
  return check_split_certificate(cert.get<SplitCertificate>(), jsplit_instances(in),
                                 in.at("params").get<SplitParams>());
}

// ---- split-step

Json gen_split_step(const Json& prm, Rng& rng, uint64_t, const Caps& caps) {
  auto j = param<unsigned>(prm, "j", 2);
  cap(j >= 1 && j <= std::min(caps.j, 3u), "j " + std::to_string(j));
  uint32_t w = 4 * j + 1;
  cap_shape(w, 2, caps);
  bool diverge = param<bool>(prm, "diverge", rng() % 4 == 0);
  FiniteTree t;
  t.bound = LevelFn({Rational(j), Rational(w)}, Rational(w));
  t.max_depth = 2;
  t.nodes.insert(Node{});
  for (uint32_t a = 0; a < j; ++a) {
    t.nodes.insert(Node{a});
    for (uint32_t c = 0; c < w; ++c) t.nodes.insert(Node{a, c});
  }
  ValueFunctional psi;
  for (const Node& x : t.nodes) {
    if (x.empty()) continue;
    Bits code;
    for (unsigned i = 2; i-- > 0;) code.push_back((x[0] >> i & 1) ? '1' : '0');
    if (x.size() == 1) {
      psi.set(x, code);
    } else if (diverge && x[0] == j - 1) {
      psi.set(x, code);
    } else {
      psi.set(x, code + random_bits(rng, 3));
    }
  }
  Condition cond{Node{}, t, t, LevelFn({Rational(2), Rational(w)}, Rational(w)), LevelFn(Rational(1, 32))};
  LevelFn p_hat({Rational(1, 4), Rational(1)}, Rational(1));
  std::vector<Node> frontier;
  for (uint32_t a = 0; a < j; ++a) frontier.push_back(Node{a});
  return Json{{"cond", cond}, {"psi", psi}, {"frontier", frontier}, {"pHat", p_hat}};
}

RunOut run_split_step(const Json& in, uint64_t) {
  StepResult s = split_step(in.at("cond").get<Condition>(), in.at("psi").get<ValueFunctional>(),
                            in.at("frontier").get<std::vector<Node>>(), in.at("pHat").get<LevelFn>());
  RunOut r;
  r.certificate = s;
  std::string outcome = s.extension ? std::string("extension") : s.inconclusive ? "inconclusive" : "trees";
  r.facts = Json{{"outcome", outcome}};
  if (s.inconclusive) {
    r.status = Status::kInconclusive;
    r.message = s.inconclusive->reason;
  }
  return r;
}

Verdict verify_split_step(const Json& cert, const Json& in) {
  auto s = cert.get<StepResult>();
  auto cond = in.at("cond").get<Condition>();
  auto psi = in.at("psi").get<ValueFunctional>();
  auto frontier = in.at("frontier").get<std::vector<Node>>();
  auto p_hat = in.at("pHat").get<LevelFn>();
  long j = static_cast<long>(frontier.size());
  int outcomes = (s.trees.empty() ? 0 : 1) + (s.extension ? 1 : 0) + (s.inconclusive ? 1 : 0);
  if (outcomes != 1) return "exactly one outcome expected";
  if (!s.trees.empty()) {
    if (s.trees.size() != frontier.size()) return "one splitting tree per frontier node expected";
    LevelFn half = p_hat.scaled(Rational(1, 2));
    for (size_t i = 0; i < s.trees.size(); ++i) {
      const SplittingTree& st = s.trees[i];
      if (st.eta != frontier[i]) return "tree " + std::to_string(i) + " has the wrong root";
      if (auto e = inside(st.tree.nodes, cond.ambient.nodes)) return e;
      if (auto e = closed(st.tree.nodes)) return e;
      if (auto e = check_bushy_over(st.tree.nodes, half, st.eta)) return "tree " + std::to_string(i) + ": " + *e;
      for (const Node& x : leaves_of(cone_of(st.tree.nodes, st.eta))) {
        auto out = psi.restrict_to(x, st.n);
        if (!cond.core.contains(x)) return "leaf " + node_str(x) + " outside the core";
        if (!out || !st.v.count(*out)) return "leaf " + node_str(x) + " does not converge into V";
      }
      for (size_t k = i + 1; k < s.trees.size(); ++k) {
        for (const Bits& a : st.v) {
          for (const Bits& b : s.trees[k].v) {
            if (bits_comparable(a, b)) return "V_" + std::to_string(i) + " and V_" + std::to_string(k) + " meet";
          }
        }
      }
    }
    return std::nullopt;
  }
  if (s.inconclusive) return std::nullopt;
  const Extension& ext = *s.extension;
  if (ext.index >= frontier.size()) return "extension index out of range";
  const Node& eta = frontier[ext.index];
  FiniteTree amb = cone_tree(cond.ambient, eta);
  if (auto e = inside(ext.cond.core.nodes, cond.ambient.nodes)) return e;
  if (ext.kind == ExtensionKind::kDivergence) {
    const auto* inc = std::get_if<Inconclusive>(&ext.source);
    if (!inc) return "divergence must cite its level";
    if (!in_tilde_V(psi, amb, eta, inc->depth, p_hat.scaled(Rational(2 * j)), CylinderSet()).member) {
      return "convergence at level " + std::to_string(inc->depth) + " is not small";
    }
    return std::nullopt;
  }
  std::vector<SplitInstance> inst;
  for (const Node& x : frontier) inst.push_back(SplitInstance{psi, cone_tree(cond.ambient, x), cone_tree(cond.core, x), x});
  SplitParams prm;
  prm.p = cond.p_t;
  prm.q = p_hat;
  prm.q1 = LevelFn(Rational(0));
  prm.q2 = cond.q_t;
  prm.qi.assign(inst.size(), cond.q_t);
  prm.v_star = {""};
  prm.n_star = 0;
  return check_split_certificate(ext.source, inst, prm);
}

// ---- schnorr-round

Json gen_schnorr(const Json& prm, Rng&, uint64_t seed, const Caps& caps) {
  auto b = param<uint32_t>(prm, "branch", 3);
  auto d = param<unsigned>(prm, "depth", 5);
  auto a = param<unsigned>(prm, "a", 3);
  auto fill = param<unsigned>(prm, "fill", 2);
  auto rounds = param<unsigned>(prm, "rounds", 2);
  cap_shape(b, d, caps);
  ScheduledInstance s = scheduled_instance(derive_seed(seed, "schnorr"), b, d, a, fill);
  return Json{{"ambient", s.ambient}, {"psi", s.psi}, {"core", Expulsion()}, {"eta", Node{}},
              {"p", s.p},             {"q", s.q},     {"eps", s.eps},         {"rounds", rounds},
              {"lengths", s.lengths}};
}

RunOut run_schnorr(const Json& in, uint64_t) {
  auto t = in.at("ambient").get<FiniteTree>();
  auto psi = in.at("psi").get<TestFunctional>();
  auto core = in.at("core").get<Expulsion>();
  auto rounds = in.at("rounds").get<unsigned>();
  RoundState s = initial_round(psi, t, core, in.at("eta").get<Node>(), in.at("p").get<LevelFn>(),
                               in.at("q").get<LevelFn>(), in.at("eps").get<LevelFn>());
  for (unsigned r = 0; r < rounds; ++r) s = avoidance_round(s, psi, t, core);
  RunOut r;
  Avoider av = assemble_avoider(s, psi, t, core);
  r.certificate = Json{{"state", s}, {"avoider", av}, {"trace", s.traces}};
  r.facts = Json{{"rounds", rounds}, {"xLength", av.x.size()}, {"cylinders", av.cylinders_scanned}};
  return r;
}

Verdict verify_schnorr(const Json& cert, const Json& in) {
  auto t = in.at("ambient").get<FiniteTree>();
  auto psi = in.at("psi").get<TestFunctional>();
  auto core = in.at("core").get<Expulsion>();
  auto s = cert.at("state").get<RoundState>();
  auto av = cert.at("avoider").get<Avoider>();
  if (s.trees.size() != in.at("rounds").get<unsigned>() + 1) return "round count differs";
  if (!(s.lambda_star == psi.budget()) || s.eta != in.at("eta").get<Node>()) return "state disagrees with the instance";
  if (!(s.p == in.at("p").get<LevelFn>()) || !(s.q == in.at("q").get<LevelFn>()) ||
      !(s.eps == in.at("eps").get<LevelFn>())) {
    return "parameters differ from the instance";
  }
  for (const RoundCheck& c : check_round_state(s, psi, t, core)) {
    if (!c.ok) return "invariant " + c.name + " fails (" + c.lhs + " vs " + c.rhs + ")";
  }
  for (const RoundTrace& tr : s.traces) {
    for (const RoundCheck& c : tr.checks) {
      if (!c.ok) return "trace of round " + std::to_string(tr.round) + " records a failed check " + c.name;
    }
  }
  if (av.x != s.rho.back()) return "X is not the last rho";
  if (auto e = inside(av.t_hat.nodes, t.nodes)) return e;
  if (auto e = closed(av.t_hat.nodes)) return e;
  // Exhaustive scan: every cylinder emitted along a top-level node of T_hat by t_K.
  size_t top = s.level.back();
  uint32_t tk = s.time.back();
  for (const Node& x : av.t_hat.nodes) {
    if (x.size() != top) continue;
    for (const auto& [y, es] : psi.entries()) {
      if (!is_prefix(y, x)) continue;
      for (const TestEntry& e : es) {
        if (e.stage > tk || e.index > tk) continue;
        for (const Bits& b : e.v.strings()) {
          if (bits_prefix(b, av.x)) return "X lies in cylinder " + b + " emitted at " + node_str(y);
        }
      }
    }
  }
  return std::nullopt;
}

// ---- covering-test

Json gen_covering(const Json& prm, Rng& rng, uint64_t, const Caps& caps) {
  auto b = param<uint32_t>(prm, "branch", 8);
  auto d = param<unsigned>(prm, "depth", 3);
  cap_shape(b, d, caps);
  auto rounds = param<unsigned>(prm, "rounds", 3);
  LevelFn p_hat = param<LevelFn>(prm, "pHat", LevelFn(Rational(2)));
  LevelFn q = param<LevelFn>(prm, "q", LevelFn(Rational(0)));
  auto lo = param<unsigned>(prm, "minExt", 2);
  auto hi = param<unsigned>(prm, "maxExt", 4);
  FiniteTree t = full(b, d);
  ValueFunctional psi = growing(rng, t, lo, hi);
  return Json{{"ambient", t}, {"core", Expulsion()}, {"psi", psi},  {"eta", Node{}},
              {"p", LevelFn(Rational(b))}, {"pHat", p_hat}, {"q", q}, {"rounds", rounds}};
}

RunOut run_covering(const Json& in, uint64_t) {
  CoveringResult c = build_covering_test(in.at("ambient").get<FiniteTree>(), in.at("core").get<Expulsion>(),
                                         in.at("psi").get<ValueFunctional>(), in.at("eta").get<Node>(),
                                         in.at("p").get<LevelFn>(), in.at("pHat").get<LevelFn>(),
                                         in.at("q").get<LevelFn>(), in.at("rounds").get<unsigned>());
  RunOut r;
  r.certificate = c;
  Json measures = Json::array();
  for (const CylinderSet& v : c.test.levels) measures.push_back(measure(v));
  r.facts = Json{{"rounds", c.rounds.size()}, {"measures", measures}};
  return r;
}

Verdict verify_covering(const Json& cert, const Json& in) {
  auto c = cert.get<CoveringResult>();
  if (c.rounds.size() != in.at("rounds").get<unsigned>()) return "round count differs";
  for (size_t n = 0; n < c.test.levels.size(); ++n) {
    if (measure(c.test.levels[n]) > pow2_neg(static_cast<unsigned>(n))) return "m(V_" + std::to_string(n) + ") > 2^-n";
  }
  return check_covering(c, in.at("ambient").get<FiniteTree>(), in.at("psi").get<ValueFunctional>(),
                        in.at("eta").get<Node>(), in.at("pHat").get<LevelFn>());
}

// ---- classify

Json gen_classify(const Json& prm, Rng& rng, uint64_t, const Caps& caps) {
  static const std::vector<std::string> modes = {"diverge", "total", "mixed"};
  auto b = param<uint32_t>(prm, "branch", 4);
  auto d = param<unsigned>(prm, "depth", 2);
  cap_shape(b, d, caps);
  std::string mode = param<std::string>(prm, "mode", modes[rng() % modes.size()]);
  FiniteTree t = full(b, d);
  ConditionSpec c;
  c.ambient = t;
  c.p = LevelFn(Rational(b));
  c.q = LevelFn(Rational(1));
  c.eps = LevelFn(std::vector<Rational>(d, Rational(1, 2)), 0);
  c.split_k = 1;
  ValueFunctional psi;
  uint32_t dead = static_cast<uint32_t>(rng() % b);
  for (const Node& x : t.nodes) {
    if (x.empty()) continue;
    if (mode == "diverge") continue;
    if (mode == "mixed" && x[0] == dead) continue;
    psi.set(x, random_bits(rng, 2 * x.size()));
  }
  if (mode == "total" || mode == "mixed") {
    // Outputs must extend along prefixes.
    ValueFunctional grown = growing(rng, t, 2, 2);
    psi = ValueFunctional();
    for (const auto& [x, e] : grown.entries()) {
      if (x.empty() || (mode == "mixed" && x[0] == dead)) continue;
      psi.set(x, e.out);
    }
  }
  if (mode != "diverge" && mode != "total" && mode != "mixed") fail(ErrorKind::kPrecondition, "unknown mode " + mode);
  return Json{{"cond", c}, {"psi", psi}, {"pHat", LevelFn(Rational(2))}, {"mode", mode}};
}

RunOut run_classify(const Json& in, uint64_t) {
  Classification c = classify_condition(in.at("cond").get<ConditionSpec>(), in.at("psi").get<ValueFunctional>(),
                                        in.at("pHat").get<LevelFn>());
  RunOut r;
  r.certificate = c;
  r.facts = Json{{"case", std::holds_alternative<ConditionCase1>(c) ? 1 : 2}};
  return r;
}

Verdict verify_classify(const Json& cert, const Json& in) {
  auto c = cert.get<Classification>();
  auto cond = in.at("cond").get<ConditionSpec>();
  auto psi = in.at("psi").get<ValueFunctional>();
  auto p_hat = in.at("pHat").get<LevelFn>();
  if (const auto* c1 = std::get_if<ConditionCase1>(&c)) return check_case1(*c1, cond, psi, p_hat);
  const auto& c2 = std::get<ConditionCase2>(c);
  const NodeSet& t = c2.staging.tree.nodes;
  if (auto e = inside(t, cond.ambient.nodes)) return e;
  if (auto e = closed(t)) return e;
  if (!t.count(cond.eta)) return "staging tree misses eta";
  if (auto e = check_bushy_over(t, p_hat, cond.eta)) return "staging tree: " + *e;
  std::set<Node> skipped;
  for (const Stage& s : c2.staging.stages) skipped.insert(s.skipped.begin(), s.skipped.end());
  if (c2.depth == 0) return "depth must be positive";
  for (const Node& x : leaves_of(cone_of(t, cond.eta))) {
    bool gone = false;
    for (const Node& y : skipped) gone = gone || is_prefix(y, x);
    if (!gone && !psi.defined_at(x, c2.depth - 1)) return "leaf " + node_str(x) + " does not reach value " +
                                                          std::to_string(c2.depth - 1);
  }
  return std::nullopt;
}

const std::map<std::string, Kind>& registry() {
  static const std::map<std::string, Kind> r = {
      {"bigness", {gen_bigness, run_bigness, verify_bigness}},
      {"split", {gen_split, run_split, verify_split}},
      {"thin", {gen_thin, run_thin, verify_thin}},
      {"hash", {gen_hash, run_hash, verify_hash}},
      {"vcalc", {gen_vcalc, run_vcalc, verify_vcalc}},
      {"capture", {gen_capture, run_capture, verify_capture}},
      {"jsplit", {gen_jsplit, run_jsplit, verify_jsplit}},
      {"split-step", {gen_split_step, run_split_step, verify_split_step}},
      {"schnorr-round", {gen_schnorr, run_schnorr, verify_schnorr}},
      {"covering-test", {gen_covering, run_covering, verify_covering}},
      {"classify", {gen_classify, run_classify, verify_classify}},
  };
  return r;
}

const Kind& kind_of(const std::string& k) {
  auto it = registry().find(k);
  if (it == registry().end()) fail(ErrorKind::kInvalidInput, "unknown scenario kind " + k);
  return it->second;
}

}  // namespace

Json generate(const std::string& kind, const Json& params, uint64_t seed, const Caps& caps) {
  const Kind& k = kind_of(kind);
  Json prm = params.is_null() ? Json::object() : params;
  if (!prm.is_object()) fail(ErrorKind::kInvalidInput, "params must be an object");
  Rng rng(derive_seed(seed, "gen/" + kind));
  Json inst;
  try {
    inst = k.gen(prm, rng, seed, caps);
  } catch (const Json::exception& e) {
    fail(ErrorKind::kInvalidInput, std::string("params: ") + e.what());
  }
  return Json{{"kind", kind}, {"seed", seed}, {"params", prm}, {"instance", inst}};
}

Json run_scenario(const Json& scenario) {
  Json out{{"kind", nullptr}, {"seed", nullptr}, {"certificate", nullptr}, {"facts", Json::object()}, {"message", ""}};
  RunOut r;
  try {
    if (!scenario.is_object() || !scenario.contains("kind") || !scenario.contains("instance")) {
      fail(ErrorKind::kInvalidInput, "scenario needs kind and instance");
    }
    std::string kind = read_as<std::string>(scenario.at("kind"), "kind");
    uint64_t seed = scenario.contains("seed") ? read_as<uint64_t>(scenario.at("seed"), "seed") : 0;
    out["kind"] = kind;
    out["seed"] = seed;
    const Kind& k = kind_of(kind);
    try {
      r = k.run(scenario.at("instance"), seed);
    } catch (const Json::exception& e) {
      fail(ErrorKind::kInvalidInput, std::string("instance: ") + e.what());
    }
  } catch (const Error& e) {
    r.status = status_of(e.kind());
    r.message = e.what();
    r.certificate = nullptr;
  }
  out["status"] = status_name(r.status);
  out["exit"] = static_cast<int>(r.status);
  out["message"] = r.message;
  out["certificate"] = r.certificate;
  out["facts"] = r.facts;
  return out;
}

Json verify_result(const Json& result, const Json& scenario) {
  auto verdict = [](bool ok, const std::string& detail) { return Json{{"ok", ok}, {"detail", detail}}; };
  try {
    std::string kind = read_as<std::string>(result.at("kind"), "kind");
    if (kind != read_as<std::string>(scenario.at("kind"), "kind")) return verdict(false, "kind mismatch");
    if (!result.contains("certificate") || result.at("certificate").is_null()) {
      std::string status = result.value("status", "");
      return verdict(status != "ok", "no certificate (status " + status + ")");
    }
    Verdict v = kind_of(kind).verify(result.at("certificate"), scenario.at("instance"));
    return v ? verdict(false, *v) : verdict(true, "ok");
  } catch (const Json::exception& e) {
    return verdict(false, std::string("malformed certificate: ") + e.what());
  } catch (const Error& e) {
    return verdict(false, e.what());
  }
}

Json report(const std::vector<Json>& results, const std::vector<Json>& verdicts,
            const std::vector<double>& timings_ms) {
  Json by_kind = Json::object();
  std::map<std::string, std::vector<double>> times;
  std::vector<unsigned> hash_n;
  std::map<std::pair<size_t, std::string>, size_t> jrows;
  size_t failed_verify = 0;
  for (size_t i = 0; i < results.size(); ++i) {
    const Json& r = results[i];
    std::string kind = r.value("kind", std::string("unknown"));
    Json& k = by_kind[kind];
    if (k.is_null()) {
      k = Json{{"count", 0}, {"verified", 0}, {"verifyFailed", 0}};
      for (int s : {0, 1, 2, 3, 4, 5}) k[status_name(static_cast<Status>(s))] = 0;
    }
    k["count"] = k["count"].get<int>() + 1;
    std::string st = r.value("status", std::string("internal"));
    k[st] = k[st].get<int>() + 1;
    if (i < verdicts.size()) {
      bool ok = verdicts[i].value("ok", false);
      k[ok ? "verified" : "verifyFailed"] = k[ok ? "verified" : "verifyFailed"].get<int>() + 1;
      failed_verify += ok ? 0 : 1;
    }
    if (i < timings_ms.size()) times[kind].push_back(timings_ms[i]);
    const Json& f = r.contains("facts") ? r.at("facts") : Json::object();
    if (f.contains("hashN")) hash_n.push_back(f.at("hashN").get<unsigned>());
    if (kind == "hash" && f.contains("N")) hash_n.push_back(f.at("N").get<unsigned>());
    if (kind == "jsplit" && f.contains("j") && f.contains("qHat")) {
      Rational q = f.at("qHat").get<Rational>();
      ++jrows[{f.at("j").get<size_t>(), to_string(q)}];
    }
  }
  for (auto& [kind, k] : by_kind.items()) {
    int count = k["count"].get<int>();
    k["passRate"] = count == 0 ? 0.0 : static_cast<double>(k["ok"].get<int>()) / count;
    auto it = times.find(kind);
    if (it != times.end() && !it->second.empty()) {
      double total = 0;
      for (double t : it->second) total += t;
      k["meanMs"] = total / static_cast<double>(it->second.size());
      k["maxMs"] = *std::max_element(it->second.begin(), it->second.end());
    }
  }
  Json hash = Json::object();
  if (!hash_n.empty()) {
    double sum = 0;
    for (unsigned n : hash_n) sum += n;
    hash = Json{{"count", hash_n.size()},
                {"minN", *std::min_element(hash_n.begin(), hash_n.end())},
                {"maxN", *std::max_element(hash_n.begin(), hash_n.end())},
                {"meanN", sum / static_cast<double>(hash_n.size())}};
  }
  Json table = Json::array();
  for (const auto& [key, count] : jrows) {
    Rational q = parse_rational(key.second);
    Rational need = Rational(static_cast<long>(key.first)) * q;
    Rational base = Rational(1L << key.first) * q;
    table.push_back(Json{{"j", key.first},
                         {"qHat", q},
                         {"instances", count},
                         {"requiredHere", need},
                         {"reference2j", base},
                         {"referenceLabel", "computed reference value 2^j * qHat, not a rerun of the prior method"}});
  }
  return Json{{"total", results.size()},
              {"verifyFailed", failed_verify},
              {"byKind", by_kind},
              {"hashN", hash},
              {"jsplitBushiness", table}};
}

std::string report_markdown(const Json& s) {
  std::ostringstream os;
  os << "# Scenario report\n\n";
  os << "Total results: " << s.at("total").get<size_t>() << "; failed verifications: "
     << s.at("verifyFailed").get<size_t>() << "\n\n";
  os << "| kind | count | ok | refusal | inconclusive | precondition | internal | invalid | verified | mean ms |\n";
  os << "|---|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& [kind, k] : s.at("byKind").items()) {
    os << "| " << kind << " | " << k["count"] << " | " << k["ok"] << " | " << k["refusal"] << " | "
       << k["inconclusive"] << " | " << k["precondition"] << " | " << k["internal"] << " | " << k["invalid"]
       << " | " << k["verified"] << " | ";
    if (k.contains("meanMs")) {
      os.setf(std::ios::fixed);
      os.precision(2);
      os << k["meanMs"].get<double>();
    } else {
      os << "-";
    }
    os << " |\n";
  }
  const Json& h = s.at("hashN");
  if (!h.empty()) {
    os << "\nHash families: " << h["count"] << " generated, N from " << h["minN"] << " to " << h["maxN"] << "\n";
  }
  const Json& t = s.at("jsplitBushiness");
  if (!t.empty()) {
    os << "\n## Required bushiness for j-fold splitting\n\n";
    os << "| j | qHat | instances | required here (j * qHat) | reference 2^j * qHat (computed, not rerun) |\n";
    os << "|---|---|---|---|---|\n";
    for (const Json& row : t) {
      os << "| " << row["j"] << " | " << to_string(row["qHat"].get<Rational>()) << " | " << row["instances"]
         << " | " << to_string(row["requiredHere"].get<Rational>()) << " | "
         << to_string(row["reference2j"].get<Rational>()) << " |\n";
    }
  }
  return os.str();
}

std::vector<Json> suite_plan(size_t count, uint64_t seed, const Caps& caps) {
  std::vector<Json> out;
  const auto& kinds = scenario_kinds();
  for (size_t i = 0; i < count; ++i) {
    const std::string& kind = kinds[i % kinds.size()];
    size_t round = i / kinds.size();
    Json prm = Json::object();
    if (kind == "vcalc") prm["item"] = 1 + round % 6;
    if (kind == "jsplit") {
      prm["j"] = 1 + round % 3;
      prm["mode"] = std::vector<std::string>{"random", "few", "partial"}[round / 3 % 3];
    }
    if (kind == "split-step") prm["j"] = 1 + round % 3;
    if (kind == "classify") prm["mode"] = std::vector<std::string>{"diverge", "total", "mixed"}[round % 3];
    if (kind == "schnorr-round") {
      prm["branch"] = 2 + round % 3;
      prm["depth"] = 4 + round % 2;
      prm["fill"] = 1 + round % 3;
    }
    if (kind == "hash") prm["n"] = 2 + round % 2;
    if (kind == "capture") prm["hash"] = round % 2 == 1;
    out.push_back(generate(kind, prm, derive_seed(seed, "suite/" + std::to_string(i)), caps));
  }
  return out;
}

}  // namespace bushy
