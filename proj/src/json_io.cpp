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

#include "bushy/json_io.hpp"

namespace nlohmann {

void adl_serializer<mpq_class>::to_json(json& j, const mpq_class& r) {
  j = json::array({r.get_num().get_str(), r.get_den().get_str()});
}

void adl_serializer<mpq_class>::from_json(const json& j, mpq_class& r) {
  if (j.is_string()) {
    r = bushy::parse_rational(j.get<std::string>());
    return;
  }
  if (j.is_number_integer()) {
    r = mpq_class(j.get<long>());
    return;
  }
  if (!j.is_array() || j.size() != 2) throw json::type_error::create(302, "rational must be [num, den]", &j);
  auto part = [&](const json& x) {
    return x.is_string() ? mpz_class(x.get<std::string>()) : mpz_class(x.get<long>());
  };
  mpz_class num = part(j[0]), den = part(j[1]);
  if (den == 0) throw json::type_error::create(302, "rational with zero denominator", &j);
  r = mpq_class(num, den);
  r.canonicalize();
}

}  // namespace nlohmann

namespace bushy {

namespace {

template <typename T>
void put_opt(Json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <typename T>
void get_opt(const Json& j, const char* key, std::optional<T>& v) {
  if (j.contains(key) && !j.at(key).is_null()) {
    v = j.at(key).get<T>();
  } else {
    v.reset();
  }
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

void to_json(Json& j, const LevelFn& v) { j = Json{{"table", v.table()}, {"tail", v.tail()}}; }
void from_json(const Json& j, LevelFn& v) {
  if (!j.is_object()) {
    v = LevelFn(j.get<Rational>());
    return;
  }
  v = LevelFn(get_or(j, "table", std::vector<Rational>{}), j.at("tail").get<Rational>());
}

void to_json(Json& j, const FiniteTree& v) {
  j = Json{{"nodes", v.nodes}, {"bound", v.bound}, {"maxDepth", v.max_depth}};
}
void from_json(const Json& j, FiniteTree& v) {
  v.nodes = j.at("nodes").get<NodeSet>();
  v.bound = j.at("bound").get<LevelFn>();
  v.max_depth = j.at("maxDepth").get<unsigned>();
}

void to_json(Json& j, const CylinderSet& v) { j = v.strings(); }
void from_json(const Json& j, CylinderSet& v) { v = CylinderSet(j.get<std::vector<Bits>>()); }

void to_json(Json& j, const SchnorrTest& v) { j = Json{{"levels", v.levels}}; }
void from_json(const Json& j, SchnorrTest& v) { v.levels = j.at("levels").get<std::vector<CylinderSet>>(); }

void to_json(Json& j, const ValueFunctional& v) {
  Json e = Json::array();
  for (const auto& [x, en] : v.entries()) e.push_back(Json::array({x, en.out, en.stage}));
  j = Json{{"entries", e}};
}
void from_json(const Json& j, ValueFunctional& v) {
  v = ValueFunctional();
  for (const Json& e : j.at("entries")) {
    v.set(e.at(0).get<Node>(), e.at(1).get<Bits>(), e.size() > 2 ? e.at(2).get<uint32_t>() : 0);
  }
}

void to_json(Json& j, const Expulsion& v) {
  if (!v.bounded()) {
    j = nullptr;
    return;
  }
  Json st = Json::array();
  for (const auto& [x, s] : v.stages()) st.push_back(Json::array({x, s}));
  j = Json{{"core", v.core()}, {"stages", st}};
}
void from_json(const Json& j, Expulsion& v) {
  if (j.is_null()) {
    v = Expulsion();
    return;
  }
  std::map<Node, uint32_t> st;
  for (const Json& e : j.at("stages")) st[e.at(0).get<Node>()] = e.at(1).get<uint32_t>();
  v = Expulsion(j.at("core").get<NodeSet>(), st);
}

void to_json(Json& j, const BigWitness& v) {
  j = Json{{"root", v.root}, {"tree", v.tree}, {"p", v.p}, {"targets", v.targets}};
}
void from_json(const Json& j, BigWitness& v) {
  v.root = j.at("root").get<Node>();
  v.tree = j.at("tree").get<FiniteTree>();
  v.p = j.at("p").get<LevelFn>();
  v.targets = j.at("targets").get<NodeSet>();
}

void to_json(Json& j, const SmallTable& v) {
  Json labels = Json::array();
  for (const auto& [x, big] : v.labels) labels.push_back(Json::array({x, big ? "big" : "small"}));
  j = Json{{"root", v.root}, {"p", v.p}, {"labels", labels}, {"targets", v.targets}};
}
void from_json(const Json& j, SmallTable& v) {
  v.root = j.at("root").get<Node>();
  v.p = j.at("p").get<LevelFn>();
  v.targets = j.at("targets").get<NodeSet>();
  v.labels.clear();
  for (const Json& e : j.at("labels")) {
    std::string s = e.at(1).get<std::string>();
    if (s != "big" && s != "small") throw Json::type_error::create(302, "label must be big or small", &e);
    v.labels[e.at(0).get<Node>()] = s == "big";
  }
}

void to_json(Json& j, const BigDecision& v) {
  j = Json{{"big", v.big}};
  put_opt(j, "witness", v.witness);
  put_opt(j, "table", v.table);
}
void from_json(const Json& j, BigDecision& v) {
  v.big = j.at("big").get<bool>();
  get_opt(j, "witness", v.witness);
  get_opt(j, "table", v.table);
}

void to_json(Json& j, const SplitResult& v) {
  j = Json{{"side", v.side == Side::kLeft ? "B" : "C"}, {"witness", v.witness}};
}
void from_json(const Json& j, SplitResult& v) {
  v.side = j.at("side").get<std::string>() == "B" ? Side::kLeft : Side::kRight;
  v.witness = j.at("witness").get<BigWitness>();
}

void to_json(Json& j, const MarkovSelection& v) {
  j = Json{{"selected", v.selected}, {"mean", v.mean}, {"ratio", v.ratio}, {"bound", v.bound}};
}
void from_json(const Json& j, MarkovSelection& v) {
  v.selected = j.at("selected").get<std::vector<size_t>>();
  v.mean = j.at("mean").get<Rational>();
  v.ratio = j.at("ratio").get<Rational>();
  v.bound = j.at("bound").get<Rational>();
}

void to_json(Json& j, const ThinStep& v) {
  j = Json{{"node", v.node},         {"children", v.children},   {"kept", v.kept},
           {"lambda", v.lambda},     {"threshold", v.threshold}, {"eps", v.eps}};
}
void from_json(const Json& j, ThinStep& v) {
  v.node = j.at("node").get<Node>();
  v.children = j.at("children").get<size_t>();
  v.kept = j.at("kept").get<size_t>();
  v.lambda = j.at("lambda").get<Rational>();
  v.threshold = j.at("threshold").get<Rational>();
  v.eps = j.at("eps").get<Rational>();
}

void to_json(Json& j, const ThinResult& v) {
  j = Json{{"tree", v.tree}, {"pHat", v.p_hat}, {"steps", v.steps}};
}
void from_json(const Json& j, ThinResult& v) {
  v.tree = j.at("tree").get<FiniteTree>();
  v.p_hat = j.at("pHat").get<LevelFn>();
  v.steps = j.at("steps").get<std::vector<ThinStep>>();
}

void to_json(Json& j, const PruneResult& v) {
  j = Json{{"tree", v.tree}, {"outsideSmall", v.outside_small}};
}
void from_json(const Json& j, PruneResult& v) {
  v.tree = j.at("tree").get<FiniteTree>();
  v.outside_small = j.at("outsideSmall").get<SmallTable>();
}

void to_json(Json& j, const Stage& v) {
  j = Json{{"time", v.time}, {"frontier", v.frontier}, {"attached", v.attached}, {"skipped", v.skipped}};
}
void from_json(const Json& j, Stage& v) {
  v.time = j.at("time").get<uint32_t>();
  v.frontier = j.at("frontier").get<std::vector<Node>>();
  v.attached = j.at("attached").get<std::vector<Node>>();
  v.skipped = get_or(j, "skipped", std::vector<Node>{});
}

void to_json(Json& j, const StagingResult& v) { j = Json{{"tree", v.tree}, {"stages", v.stages}}; }
void from_json(const Json& j, StagingResult& v) {
  v.tree = j.at("tree").get<FiniteTree>();
  v.stages = j.at("stages").get<std::vector<Stage>>();
}

void to_json(Json& j, const HashFamily& v) {
  Json sets = Json::array();
  for (const auto& s : v.sets) {
    Json one = Json::array();
    for (uint32_t x : s) one.push_back(element_bits(x, v.ground));
    sets.push_back(one);
  }
  j = Json{{"N", v.ground},          {"k", v.k},       {"delta", v.delta},
           {"epsilon", v.epsilon},   {"epsHat", v.eps_hat}, {"seed", v.seed},
           {"attempts", v.attempts}, {"sets", sets}};
}
void from_json(const Json& j, HashFamily& v) {
  v.ground = j.at("N").get<unsigned>();
  v.k = j.at("k").get<unsigned>();
  v.delta = j.at("delta").get<Rational>();
  v.epsilon = j.at("epsilon").get<Rational>();
  v.eps_hat = get_or(j, "epsHat", Rational(0));
  v.seed = get_or<uint64_t>(j, "seed", 0);
  v.attempts = get_or<unsigned>(j, "attempts", 0);
  v.sets.clear();
  for (const Json& s : j.at("sets")) {
    std::vector<uint32_t> one;
    for (const Json& b : s) {
      std::string bits = b.get<std::string>();
      if (bits.size() != v.ground || bits.find_first_not_of("01") != std::string::npos) {
        throw Json::type_error::create(302, "hash element must be an N-bit string", &b);
      }
      one.push_back(bits.empty() ? 0 : static_cast<uint32_t>(std::stoul(bits, nullptr, 2)));
    }
    std::sort(one.begin(), one.end());
    v.sets.push_back(one);
  }
}

void to_json(Json& j, const VCert& v) {
  j = Json{{"kind", v.kind == VKind::kTilde ? "tilde" : "plain"},
           {"member", v.member},
           {"v", v.v},
           {"n", v.n},
           {"q", v.q},
           {"eta", v.eta},
           {"defining", v.defining}};
  put_opt(j, "witness", v.witness);
  put_opt(j, "table", v.table);
}
void from_json(const Json& j, VCert& v) {
  v.kind = j.at("kind").get<std::string>() == "tilde" ? VKind::kTilde : VKind::kPlain;
  v.member = j.at("member").get<bool>();
  v.v = j.at("v").get<CylinderSet>();
  v.n = j.at("n").get<unsigned>();
  v.q = j.at("q").get<LevelFn>();
  v.eta = j.at("eta").get<Node>();
  v.defining = j.at("defining").get<NodeSet>();
  get_opt(j, "witness", v.witness);
  get_opt(j, "table", v.table);
}

void to_json(Json& j, const CalculusInstance& v) {
  j = Json{{"psi", v.psi}, {"ambient", v.ambient}, {"eta", v.eta}, {"n", v.n},
           {"v", v.v},     {"v1", v.v1},           {"q", v.q},     {"q1", v.q1}};
}
void from_json(const Json& j, CalculusInstance& v) {
  v.psi = j.at("psi").get<ValueFunctional>();
  v.ambient = j.at("ambient").get<FiniteTree>();
  v.eta = j.at("eta").get<Node>();
  v.n = j.at("n").get<unsigned>();
  v.v = j.at("v").get<CylinderSet>();
  v.v1 = j.at("v1").get<CylinderSet>();
  v.q = j.at("q").get<LevelFn>();
  v.q1 = j.at("q1").get<LevelFn>();
}

void to_json(Json& j, const CalculusOutcome& v) {
  j = Json{{"holds", v.holds}, {"hypotheses", v.hypotheses}, {"conclusion", v.conclusion}};
}
void from_json(const Json& j, CalculusOutcome& v) {
  v.holds = j.at("holds").get<bool>();
  v.hypotheses = j.at("hypotheses").get<std::vector<VCert>>();
  v.conclusion = j.at("conclusion").get<VCert>();
}

void to_json(Json& j, const CaptureResult& v) {
  j = Json{{"vStar", v.v_star},
           {"tHat", v.t_hat},
           {"N", v.n_bits},
           {"k", v.k},
           {"levelT", v.level_t},
           {"direct", v.direct},
           {"levelL", v.level_l},
           {"mSets", v.m_sets},
           {"chosen", v.chosen},
           {"closureLowBand", v.closure_low_band},
           {"closureHighBand", v.closure_high_band}};
  put_opt(j, "family", v.family);
}
void from_json(const Json& j, CaptureResult& v) {
  v.v_star = j.at("vStar").get<CylinderSet>();
  v.t_hat = j.at("tHat").get<FiniteTree>();
  v.n_bits = j.at("N").get<unsigned>();
  v.k = j.at("k").get<unsigned>();
  v.level_t = j.at("levelT").get<size_t>();
  v.direct = j.at("direct").get<bool>();
  v.level_l = j.at("levelL").get<size_t>();
  v.m_sets = j.at("mSets").get<size_t>();
  v.chosen = j.at("chosen").get<std::vector<size_t>>();
  v.closure_low_band = j.at("closureLowBand").get<bool>();
  v.closure_high_band = j.at("closureHighBand").get<bool>();
  get_opt(j, "family", v.family);
}

void to_json(Json& j, const SplitInstance& v) {
  j = Json{{"psi", v.psi}, {"ambient", v.ambient}, {"core", v.core}, {"eta", v.eta}};
}
void from_json(const Json& j, SplitInstance& v) {
  v.psi = j.at("psi").get<ValueFunctional>();
  v.ambient = j.at("ambient").get<FiniteTree>();
  v.core = j.at("core").get<FiniteTree>();
  v.eta = j.at("eta").get<Node>();
}

void to_json(Json& j, const SplitParams& v) {
  j = Json{{"p", v.p},   {"q", v.q},   {"q1", v.q1},          {"q2", v.q2},
           {"qi", v.qi}, {"vStar", v.v_star}, {"nStar", v.n_star}};
}
void from_json(const Json& j, SplitParams& v) {
  v.p = j.at("p").get<LevelFn>();
  v.q = j.at("q").get<LevelFn>();
  v.q1 = j.at("q1").get<LevelFn>();
  v.q2 = j.at("q2").get<LevelFn>();
  v.qi = j.at("qi").get<std::vector<LevelFn>>();
  v.v_star = j.at("vStar").get<std::set<Bits>>();
  v.n_star = j.at("nStar").get<unsigned>();
}

void to_json(Json& j, const DisjointPart& v) { j = Json{{"v", v.v}, {"n", v.n}, {"witness", v.witness}}; }
void from_json(const Json& j, DisjointPart& v) {
  v.v = j.at("v").get<std::set<Bits>>();
  v.n = j.at("n").get<unsigned>();
  v.witness = j.at("witness").get<BigWitness>();
}

void to_json(Json& j, const DisjointCert& v) { j = Json{{"parts", v.parts}}; }
void from_json(const Json& j, DisjointCert& v) { v.parts = j.at("parts").get<std::vector<DisjointPart>>(); }

void to_json(Json& j, const NonTotalCert& v) {
  j = Json{{"index", v.index}, {"tree", v.tree},       {"s", v.s},
           {"nHat", v.n_hat},  {"wHat", v.w_hat},      {"outside", v.outside},
           {"sWitness", v.s_witness}};
}
void from_json(const Json& j, NonTotalCert& v) {
  v.index = j.at("index").get<size_t>();
  v.tree = j.at("tree").get<FiniteTree>();
  v.s = j.at("s").get<NodeSet>();
  v.n_hat = j.at("nHat").get<unsigned>();
  v.w_hat = j.at("wHat").get<std::set<Bits>>();
  v.outside = j.at("outside").get<SmallTable>();
  v.s_witness = j.at("sWitness").get<BigWitness>();
}

void to_json(Json& j, const ComputableCert& v) {
  j = Json{{"index", v.index}, {"tree", v.tree},          {"nBar", v.n_bar},
           {"nTop", v.n_top},  {"width", v.width},        {"wLevels", v.w_levels},
           {"outside", v.outside}, {"sHatSmall", v.s_hat_small}};
}
void from_json(const Json& j, ComputableCert& v) {
  v.index = j.at("index").get<size_t>();
  v.tree = j.at("tree").get<FiniteTree>();
  v.n_bar = j.at("nBar").get<unsigned>();
  v.n_top = j.at("nTop").get<unsigned>();
  v.width = j.at("width").get<size_t>();
  v.w_levels = j.at("wLevels").get<std::vector<std::set<Bits>>>();
  v.outside = j.at("outside").get<SmallTable>();
  v.s_hat_small = j.at("sHatSmall").get<SmallTable>();
}

void to_json(Json& j, const Inconclusive& v) { j = Json{{"depth", v.depth}, {"reason", v.reason}}; }
void from_json(const Json& j, Inconclusive& v) {
  v.depth = j.at("depth").get<unsigned>();
  v.reason = j.at("reason").get<std::string>();
}

void to_json(Json& j, const SplitCertificate& v) {
  std::visit([&](const auto& c) { j = c; }, v);
  j["variant"] = variant_name(v);
}
void from_json(const Json& j, SplitCertificate& v) {
  std::string name = j.at("variant").get<std::string>();
  if (name == "disjoint") {
    v = j.get<DisjointCert>();
  } else if (name == "nontotal") {
    v = j.get<NonTotalCert>();
  } else if (name == "computable") {
    v = j.get<ComputableCert>();
  } else if (name == "inconclusive") {
    v = j.get<Inconclusive>();
  } else {
    throw Json::type_error::create(302, "unknown certificate variant " + name, &j);
  }
}

void to_json(Json& j, const Condition& v) {
  j = Json{{"eta", v.eta}, {"ambient", v.ambient}, {"core", v.core}, {"pT", v.p_t}, {"qT", v.q_t}};
}
void from_json(const Json& j, Condition& v) {
  v.eta = j.at("eta").get<Node>();
  v.ambient = j.at("ambient").get<FiniteTree>();
  v.core = j.at("core").get<FiniteTree>();
  v.p_t = j.at("pT").get<LevelFn>();
  v.q_t = j.at("qT").get<LevelFn>();
}

void to_json(Json& j, const SplittingTree& v) {
  j = Json{{"eta", v.eta}, {"tree", v.tree}, {"v", v.v}, {"n", v.n}};
}
void from_json(const Json& j, SplittingTree& v) {
  v.eta = j.at("eta").get<Node>();
  v.tree = j.at("tree").get<FiniteTree>();
  v.v = j.at("v").get<std::set<Bits>>();
  v.n = j.at("n").get<unsigned>();
}

namespace {

const char* extension_name(ExtensionKind k) {
  switch (k) {
    case ExtensionKind::kDivergence: return "divergence";
    case ExtensionKind::kNonTotal: return "nontotal";
    default: return "computable";
  }
}

}  // namespace

void to_json(Json& j, const Extension& v) {
  j = Json{{"kind", extension_name(v.kind)}, {"cond", v.cond}, {"source", v.source}, {"index", v.index}};
}
void from_json(const Json& j, Extension& v) {
  std::string k = j.at("kind").get<std::string>();
  v.kind = k == "divergence" ? ExtensionKind::kDivergence
           : k == "nontotal" ? ExtensionKind::kNonTotal
                             : ExtensionKind::kComputable;
  v.cond = j.at("cond").get<Condition>();
  v.source = j.at("source").get<SplitCertificate>();
  v.index = j.at("index").get<size_t>();
}

void to_json(Json& j, const StepResult& v) {
  j = Json{{"trees", v.trees}};
  put_opt(j, "extension", v.extension);
  put_opt(j, "inconclusive", v.inconclusive);
}
void from_json(const Json& j, StepResult& v) {
  v.trees = j.at("trees").get<std::vector<SplittingTree>>();
  get_opt(j, "extension", v.extension);
  get_opt(j, "inconclusive", v.inconclusive);
}

void to_json(Json& j, const TestFunctional& v) {
  Json e = Json::array();
  for (const auto& [x, es] : v.entries()) {
    for (const TestEntry& t : es) e.push_back(Json::array({x, t.index, t.v, t.stage}));
  }
  j = Json{{"budget", v.budget()}, {"entries", e}};
}
void from_json(const Json& j, TestFunctional& v) {
  std::map<Node, std::vector<TestEntry>> es;
  for (const Json& e : j.at("entries")) {
    es[e.at(0).get<Node>()].push_back(
        TestEntry{e.at(1).get<uint32_t>(), e.at(2).get<CylinderSet>(), e.at(3).get<uint32_t>()});
  }
  v = TestFunctional(es, j.at("budget").get<Rational>());
}

void to_json(Json& j, const RoundCheck& v) {
  j = Json{{"name", v.name}, {"ok", v.ok}, {"lhs", v.lhs}, {"rhs", v.rhs}};
}
void from_json(const Json& j, RoundCheck& v) {
  v.name = j.at("name").get<std::string>();
  v.ok = j.at("ok").get<bool>();
  v.lhs = j.at("lhs").get<std::string>();
  v.rhs = j.at("rhs").get<std::string>();
}

void to_json(Json& j, const RoundTrace& v) {
  j = Json{{"round", v.round}, {"t", v.t},           {"l", v.l},
           {"rho", v.rho},     {"lambda", v.lambda}, {"checks", v.checks}};
}
void from_json(const Json& j, RoundTrace& v) {
  v.round = j.at("round").get<int>();
  v.t = j.at("t").get<uint32_t>();
  v.l = j.at("l").get<size_t>();
  v.rho = j.at("rho").get<Bits>();
  v.lambda = j.at("lambda").get<Rational>();
  v.checks = j.at("checks").get<std::vector<RoundCheck>>();
}

void to_json(Json& j, const RoundState& v) {
  j = Json{{"eta", v.eta},
           {"p", v.p},
           {"q", v.q},
           {"eps", v.eps},
           {"lambdaStar", v.lambda_star},
           {"trees", v.trees},
           {"rho", v.rho},
           {"lambda", v.lambda},
           {"lambdaBar", v.lambda_bar},
           {"level", v.level},
           {"time", v.time},
           {"m", v.m},
           {"traces", v.traces}};
}
void from_json(const Json& j, RoundState& v) {
  v.eta = j.at("eta").get<Node>();
  v.p = j.at("p").get<LevelFn>();
  v.q = j.at("q").get<LevelFn>();
  v.eps = j.at("eps").get<LevelFn>();
  v.lambda_star = j.at("lambdaStar").get<Rational>();
  v.trees = j.at("trees").get<std::vector<FiniteTree>>();
  v.rho = j.at("rho").get<std::vector<Bits>>();
  v.lambda = j.at("lambda").get<std::vector<Rational>>();
  v.lambda_bar = j.at("lambdaBar").get<std::vector<Rational>>();
  v.level = j.at("level").get<std::vector<size_t>>();
  v.time = j.at("time").get<std::vector<uint32_t>>();
  v.m = j.at("m").get<std::vector<unsigned>>();
  v.traces = get_or(j, "traces", std::vector<RoundTrace>{});
}

void to_json(Json& j, const Avoider& v) {
  j = Json{{"tHat", v.t_hat}, {"x", v.x}, {"leavesScanned", v.leaves_scanned},
           {"cylindersScanned", v.cylinders_scanned}};
}
void from_json(const Json& j, Avoider& v) {
  v.t_hat = j.at("tHat").get<FiniteTree>();
  v.x = j.at("x").get<Bits>();
  v.leaves_scanned = get_or<size_t>(j, "leavesScanned", 0);
  v.cylinders_scanned = get_or<size_t>(j, "cylindersScanned", 0);
}

void to_json(Json& j, const CoveringRound& v) {
  j = Json{{"index", v.index},       {"time", v.time},       {"level", v.level},
           {"budget", v.budget},     {"frontier", v.frontier}, {"skipped", v.skipped},
           {"captures", v.captures}};
}
void from_json(const Json& j, CoveringRound& v) {
  v.index = j.at("index").get<unsigned>();
  v.time = j.at("time").get<uint32_t>();
  v.level = j.at("level").get<size_t>();
  v.budget = j.at("budget").get<Rational>();
  v.frontier = j.at("frontier").get<std::vector<Node>>();
  v.skipped = j.at("skipped").get<std::vector<Node>>();
  v.captures = j.at("captures").get<std::vector<CaptureResult>>();
}

void to_json(Json& j, const CoveringResult& v) {
  j = Json{{"tHat", v.t_hat}, {"test", v.test}, {"rounds", v.rounds}};
}
void from_json(const Json& j, CoveringResult& v) {
  v.t_hat = j.at("tHat").get<FiniteTree>();
  v.test = j.at("test").get<SchnorrTest>();
  v.rounds = j.at("rounds").get<std::vector<CoveringRound>>();
}

void to_json(Json& j, const ConditionSpec& v) {
  j = Json{{"eta", v.eta}, {"ambient", v.ambient}, {"core", v.core}, {"p", v.p},
           {"q", v.q},     {"eps", v.eps},         {"splitK", v.split_k}};
}
void from_json(const Json& j, ConditionSpec& v) {
  v.eta = j.at("eta").get<Node>();
  v.ambient = j.at("ambient").get<FiniteTree>();
  v.core = j.contains("core") ? j.at("core").get<Expulsion>() : Expulsion();
  v.p = j.at("p").get<LevelFn>();
  v.q = j.at("q").get<LevelFn>();
  v.eps = j.at("eps").get<LevelFn>();
  v.split_k = get_or<unsigned>(j, "splitK", 1);
}

void to_json(Json& j, const ConditionCase1& v) {
  j = Json{{"xi", v.xi},
           {"m", v.m},
           {"tHat", v.t_hat},
           {"convSmall", v.conv_small},
           {"restSmall", v.rest_small}};
}
void from_json(const Json& j, ConditionCase1& v) {
  v.xi = j.at("xi").get<Node>();
  v.m = j.at("m").get<size_t>();
  v.t_hat = j.at("tHat").get<FiniteTree>();
  v.conv_small = j.at("convSmall").get<SmallTable>();
  v.rest_small = j.at("restSmall").get<SmallTable>();
}

void to_json(Json& j, const ConditionCase2& v) { j = Json{{"depth", v.depth}, {"staging", v.staging}}; }
void from_json(const Json& j, ConditionCase2& v) {
  v.depth = j.at("depth").get<size_t>();
  v.staging = j.at("staging").get<StagingResult>();
}

void to_json(Json& j, const Classification& v) {
  if (const auto* c1 = std::get_if<ConditionCase1>(&v)) {
    j = *c1;
    j["case"] = 1;
  } else {
    j = std::get<ConditionCase2>(v);
    j["case"] = 2;
  }
}
void from_json(const Json& j, Classification& v) {
  int c = j.at("case").get<int>();
  if (c == 1) {
    v = j.get<ConditionCase1>();
  } else if (c == 2) {
    v = j.get<ConditionCase2>();
  } else {
    throw Json::type_error::create(302, "case must be 1 or 2", &j);
  }
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    fail(ErrorKind::kInvalidInput, std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace bushy
