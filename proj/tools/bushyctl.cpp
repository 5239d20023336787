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

// Command-line front end over the C API.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "bushy/bushy.h"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Failure {
  int code;
  std::string message;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{BUSHY_INVALID, "cannot read " + path};
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spill(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{BUSHY_INVALID, "cannot write " + path};
  out << text;
}

// Owns a document returned by the library.
class Doc {
 public:
  Doc() = default;
  Doc(const Doc&) = delete;
  Doc& operator=(const Doc&) = delete;
  ~Doc() { bushy_doc_free(d_); }
  bushy_doc** out() { return &d_; }
  std::string text() const { return d_ == nullptr ? std::string() : bushy_doc_text(d_); }
  bool has() const { return d_ != nullptr; }

 private:
  bushy_doc* d_ = nullptr;
};

void check(bushy_status s, const Doc& d) {
  if (s != BUSHY_OK && !d.has()) throw Failure{s, bushy_last_error()};
}

Json params_from(const std::vector<std::string>& kv, const std::string& file) {
  Json p = file.empty() ? Json::object() : Json::parse(slurp(file));
  for (const std::string& s : kv) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw Failure{BUSHY_INVALID, "expected key=value, got " + s};
    std::string key = s.substr(0, eq), value = s.substr(eq + 1);
    Json parsed = Json::parse(value, nullptr, false);
    // Bare words and fractions like 1/2 stay strings.
    p[key] = parsed.is_discarded() ? Json(value) : parsed;
  }
  return p;
}

std::string caps_text(const std::string& file) { return file.empty() ? std::string() : slurp(file); }

const char* or_null(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

std::string name_of(size_t i, const char* suffix) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04zu.%s.json", i, suffix);
  return buf;
}

int cmd_gen(const std::string& kind, const std::vector<std::string>& kv, const std::string& params_file,
            uint64_t seed, const std::string& caps, const std::string& out) {
  std::string params = params_from(kv, params_file).dump();
  std::string c = caps_text(caps);
  Doc d;
  check(bushy_gen(kind.c_str(), params.c_str(), seed, or_null(c), d.out()), d);
  spill(out, d.text());
  return 0;
}

int cmd_run(const std::string& scenario, const std::string& out) {
  std::string text = slurp(scenario);
  Doc d;
  bushy_status s = bushy_run(text.c_str(), d.out());
  check(s, d);
  spill(out, d.text());
  if (s != BUSHY_OK) std::cerr << "bushyctl: " << bushy_last_error() << "\n";
  return s;
}

int cmd_verify(const std::string& result, const std::string& scenario, const std::string& out) {
  std::string r = slurp(result), sc = slurp(scenario);
  Doc d;
  bushy_status s = bushy_verify(r.c_str(), sc.c_str(), d.out());
  check(s, d);
  spill(out, d.text());
  return s;
}

int cmd_report(const std::string& dir, const std::string& format, const std::string& out) {
  Json results = Json::array(), verdicts = Json::array(), timings = Json::array();
  Json times = fs::exists(fs::path(dir) / "timings.json") ? Json::parse(slurp((fs::path(dir) / "timings.json").string()))
                                                          : Json::object();
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::string n = e.path().filename().string();
    if (n.size() > 12 && n.substr(n.size() - 12) == ".result.json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  bool have_verdicts = true;
  for (const fs::path& f : files) {
    std::string stem = f.filename().string();
    stem = stem.substr(0, stem.size() - 12);
    results.push_back(Json::parse(slurp(f.string())));
    fs::path v = f.parent_path() / (stem + ".verdict.json");
    if (fs::exists(v)) {
      verdicts.push_back(Json::parse(slurp(v.string())));
    } else {
      have_verdicts = false;
    }
    timings.push_back(times.value(stem, 0.0));
  }
  std::string r = results.dump(), v = verdicts.dump(), t = timings.dump();
  Doc d;
  check(bushy_report(r.c_str(), have_verdicts ? v.c_str() : nullptr, t.c_str(), d.out()), d);
  if (format == "md") {
    std::string rep = d.text();
    Doc m;
    check(bushy_report_markdown(rep.c_str(), m.out()), m);
    spill(out, m.text());
  } else {
    spill(out, d.text());
  }
  return 0;
}

int cmd_suite(size_t count, uint64_t seed, const std::string& caps, const std::string& dir) {
  std::string c = caps_text(caps);
  Doc plan;
  check(bushy_suite_plan(count, seed, or_null(c), plan.out()), plan);
  Json scenarios = Json::parse(plan.text());
  fs::create_directories(dir);
  Json times = Json::object();
  size_t bad = 0;
  for (size_t i = 0; i < scenarios.size(); ++i) {
    std::string sc = scenarios[i].dump(2) + "\n";
    spill((fs::path(dir) / name_of(i, "scenario")).string(), sc);
    auto t0 = std::chrono::steady_clock::now();
    Doc r;
    check(bushy_run(sc.c_str(), r.out()), r);
    auto t1 = std::chrono::steady_clock::now();
    std::string rt = r.text();
    spill((fs::path(dir) / name_of(i, "result")).string(), rt);
    Doc v;
    bushy_status vs = bushy_verify(rt.c_str(), sc.c_str(), v.out());
    check(vs, v);
    bad += vs == BUSHY_OK ? 0 : 1;
    spill((fs::path(dir) / name_of(i, "verdict")).string(), v.text());
    std::string stem = name_of(i, "x");
    times[stem.substr(0, 4)] = std::chrono::duration<double, std::milli>(t1 - t0).count();
  }
  spill((fs::path(dir) / "timings.json").string(), times.dump(2) + "\n");
  std::cerr << "bushyctl: " << scenarios.size() << " scenarios, " << bad << " rejected verdicts\n";
  return bad == 0 ? 0 : BUSHY_INVALID;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate, run and verify bushy-tree scenarios"};
  app.set_version_flag("--version", std::string(bushy_version()));
  app.require_subcommand(1);

  std::string kind, params_file, caps, out = "-", scenario, result, dir, format = "json";
  std::vector<std::string> kv;
  uint64_t seed = 0;
  size_t count = 100;

  auto* gen = app.add_subcommand("gen", "Generate a scenario");
  gen->add_option("kind", kind, "Scenario kind")->required();
  gen->add_option("--param,-p", kv, "Parameter as key=value (repeatable)");
  gen->add_option("--params", params_file, "JSON file of parameters");
  gen->add_option("--seed", seed, "Seed");
  gen->add_option("--caps", caps, "JSON file of size caps");
  gen->add_option("--out,-o", out, "Output file");

  auto* run = app.add_subcommand("run", "Run a scenario");
  run->add_option("scenario", scenario, "Scenario file")->required();
  run->add_option("--out,-o", out, "Output file");

  auto* verify = app.add_subcommand("verify", "Re-check a result's certificate");
  verify->add_option("result", result, "Result file")->required();
  verify->add_option("scenario", scenario, "Scenario file")->required();
  verify->add_option("--out,-o", out, "Output file");

  auto* rep = app.add_subcommand("report", "Summarize a suite directory");
  rep->add_option("dir", dir, "Suite directory")->required();
  rep->add_option("--format", format, "json or md")->check(CLI::IsMember({"json", "md"}));
  rep->add_option("--out,-o", out, "Output file");

  auto* suite = app.add_subcommand("suite", "Generate, run and verify a mixed batch");
  suite->add_option("--count,-n", count, "Number of scenarios");
  suite->add_option("--seed", seed, "Seed");
  suite->add_option("--caps", caps, "JSON file of size caps");
  suite->add_option("--dir,-d", dir, "Output directory")->required();

  app.add_subcommand("kinds", "List scenario kinds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : BUSHY_INVALID;
  }

  try {
    if (*gen) return cmd_gen(kind, kv, params_file, seed, caps, out);
    if (*run) return cmd_run(scenario, out);
    if (*verify) return cmd_verify(result, scenario, out);
    if (*rep) return cmd_report(dir, format, out);
    if (*suite) return cmd_suite(count, seed, caps, dir);
    Doc k;
    check(bushy_kinds(k.out()), k);
    for (const auto& name : Json::parse(k.text())) std::cout << name.get<std::string>() << "\n";
    return 0;
  } catch (const Failure& f) {
    std::cerr << "bushyctl: " << f.message << "\n";
    return f.code;
  } catch (const Json::exception& e) {
    std::cerr << "bushyctl: " << e.what() << "\n";
    return BUSHY_INVALID;
  } catch (const std::exception& e) {
    std::cerr << "bushyctl: " << e.what() << "\n";
    return BUSHY_INTERNAL;
  }
}
