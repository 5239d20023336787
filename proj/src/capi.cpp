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

#include "bushy/bushy.h"

#include <cstring>
#include <string>

#include "bushy/scenario.hpp"

struct bushy_doc {
  std::string text;
};

struct bushy_tree {
  bushy::FiniteTree tree;
};

struct bushy_cylinders {
  bushy::CylinderSet set;
};

namespace {

thread_local std::string last_error;

bushy_status code(bushy::Status s) { return static_cast<bushy_status>(static_cast<int>(s)); }

template <typename F>
bushy_status guard(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const bushy::Error& e) {
    last_error = e.what();
    return code(bushy::status_of(e.kind()));
  } catch (const nlohmann::json::exception& e) {
    last_error = e.what();
    return BUSHY_INVALID;
  } catch (const std::exception& e) {
    last_error = e.what();
    return BUSHY_INTERNAL;
  }
}

bushy::Json parse(const char* text, const char* what) {
  if (text == nullptr) bushy::fail(bushy::ErrorKind::kInvalidInput, std::string(what) + " is null");
  return bushy::parse_json(text);
}

bushy::Json parse_opt(const char* text) { return text == nullptr ? bushy::Json() : bushy::parse_json(text); }

bushy_status emit(const bushy::Json& j, bushy_doc** out, bushy_status s = BUSHY_OK) {
  if (out == nullptr) bushy::fail(bushy::ErrorKind::kInvalidInput, "out is null");
  *out = new bushy_doc{j.dump(2) + "\n"};
  return s;
}

void need(const void* p, const char* what) {
  if (p == nullptr) bushy::fail(bushy::ErrorKind::kInvalidInput, std::string(what) + " is null");
}

}  // namespace

extern "C" {

const char* bushy_last_error(void) { return last_error.c_str(); }

const char* bushy_version(void) { return "0.1.0"; }

const char* bushy_doc_text(const bushy_doc* d) { return d == nullptr ? "" : d->text.c_str(); }

void bushy_doc_free(bushy_doc* d) { delete d; }

bushy_status bushy_gen(const char* kind, const char* params_json, uint64_t seed, const char* caps_json,
                       bushy_doc** out) {
  return guard([&] {
    need(kind, "kind");
    bushy::Caps caps = bushy::caps_from_json(parse_opt(caps_json));
    return emit(bushy::generate(kind, parse_opt(params_json), seed, caps), out);
  });
}

bushy_status bushy_run(const char* scenario_json, bushy_doc** out) {
  return guard([&] {
    bushy::Json r = bushy::run_scenario(parse(scenario_json, "scenario"));
    bushy_status s = static_cast<bushy_status>(r.at("exit").get<int>());
    if (s != BUSHY_OK) last_error = r.at("message").get<std::string>();
    return emit(r, out, s);
  });
}

bushy_status bushy_verify(const char* result_json, const char* scenario_json, bushy_doc** out) {
  return guard([&] {
    bushy::Json v = bushy::verify_result(parse(result_json, "result"), parse(scenario_json, "scenario"));
    bool ok = v.at("ok").get<bool>();
    if (!ok) last_error = v.at("detail").get<std::string>();
    return emit(v, out, ok ? BUSHY_OK : BUSHY_INVALID);
  });
}

bushy_status bushy_report(const char* results_json, const char* verdicts_json, const char* timings_json,
                          bushy_doc** out) {
  return guard([&] {
    auto results = bushy::read_as<std::vector<bushy::Json>>(parse(results_json, "results"), "results");
    bushy::Json v = parse_opt(verdicts_json), t = parse_opt(timings_json);
    std::vector<bushy::Json> verdicts;
    std::vector<double> timings;
    if (!v.is_null()) verdicts = bushy::read_as<std::vector<bushy::Json>>(v, "verdicts");
    if (!t.is_null()) timings = bushy::read_as<std::vector<double>>(t, "timings");
    return emit(bushy::report(results, verdicts, timings), out);
  });
}

bushy_status bushy_report_markdown(const char* report_json, bushy_doc** out) {
  return guard([&] {
    need(out, "out");
    *out = new bushy_doc{bushy::report_markdown(parse(report_json, "report"))};
    return BUSHY_OK;
  });
}

bushy_status bushy_kinds(bushy_doc** out) {
  return guard([&] { return emit(bushy::Json(bushy::scenario_kinds()), out); });
}

bushy_status bushy_suite_plan(size_t count, uint64_t seed, const char* caps_json, bushy_doc** out) {
  return guard([&] {
    bushy::Caps caps = bushy::caps_from_json(parse_opt(caps_json));
    return emit(bushy::Json(bushy::suite_plan(count, seed, caps)), out);
  });
}

bushy_status bushy_tree_parse(const char* json, bushy_tree** out) {
  return guard([&] {
    need(out, "out");
    auto t = bushy::read_as<bushy::FiniteTree>(parse(json, "tree"), "tree");
    *out = new bushy_tree{std::move(t)};
    return BUSHY_OK;
  });
}

size_t bushy_tree_size(const bushy_tree* t) { return t == nullptr ? 0 : t->tree.nodes.size(); }

bushy_status bushy_tree_validate(const bushy_tree* t) {
  return guard([&] {
    need(t, "tree");
    bushy::TreeReport r = bushy::validate_tree(t->tree);
    if (r.ok) return BUSHY_OK;
    last_error = r.violation + " at " + bushy::node_str(r.offending);
    return BUSHY_INVALID;
  });
}

void bushy_tree_free(bushy_tree* t) { delete t; }

bushy_status bushy_cylinders_parse(const char* json, bushy_cylinders** out) {
  return guard([&] {
    need(out, "out");
    auto v = bushy::read_as<bushy::CylinderSet>(parse(json, "cylinders"), "cylinders");
    *out = new bushy_cylinders{std::move(v)};
    return BUSHY_OK;
  });
}

bushy_status bushy_cylinders_measure(const bushy_cylinders* v, char* buf, size_t len) {
  return guard([&] {
    need(v, "cylinders");
    need(buf, "buf");
    std::string s = bushy::to_string(bushy::measure(v->set));
    if (s.size() + 1 > len) bushy::fail(bushy::ErrorKind::kInvalidInput, "buffer too small");
    std::memcpy(buf, s.c_str(), s.size() + 1);
    return BUSHY_OK;
  });
}

bushy_status bushy_cylinders_covers(const bushy_cylinders* v, const char* bits, int* covered) {
  return guard([&] {
    need(v, "cylinders");
    need(bits, "bits");
    need(covered, "covered");
    std::string b(bits);
    if (b.find_first_not_of("01") != std::string::npos) {
      bushy::fail(bushy::ErrorKind::kInvalidInput, "bits must be binary");
    }
    *covered = v->set.covers(b) ? 1 : 0;
    return BUSHY_OK;
  });
}

void bushy_cylinders_free(bushy_cylinders* v) { delete v; }

}  // extern "C"
