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

#include "bushy/functional.hpp"

#include <algorithm>

namespace bushy {

Bits ValueFunctional::output(const Node& x, uint32_t t) const {
  for (size_t k = x.size() + 1; k-- > 0;) {
    auto it = entries_.find(Node(x.begin(), x.begin() + k));
    if (it != entries_.end() && it->second.stage <= t) return it->second.out;
  }
  return {};
}

std::optional<Bits> ValueFunctional::restrict_to(const Node& x, size_t n, uint32_t t) const {
  Bits o = output(x, t);
  if (o.size() < n) return std::nullopt;
  return o.substr(0, n);
}

uint32_t ValueFunctional::max_stage() const {
  uint32_t m = 0;
  for (const auto& [x, e] : entries_) m = std::max(m, e.stage);
  return m;
}

std::optional<std::string> ValueFunctional::validate() const {
  for (const auto& [x, e] : entries_) {
    for (char c : e.out) {
      if (c != '0' && c != '1') return "non-binary output at " + node_str(x);
    }
    for (size_t k = 0; k < x.size(); ++k) {
      auto it = entries_.find(Node(x.begin(), x.begin() + k));
      if (it == entries_.end()) continue;
      const Entry& below = it->second;
      if (!bits_prefix(below.out, e.out)) return "output at " + node_str(x) + " does not extend its prefix";
      if (e.out.size() > below.out.size() && e.stage < below.stage) {
        return "output at " + node_str(x) + " appears before its prefix's output";
      }
    }
  }
  return std::nullopt;
}

bool Expulsion::present(const Node& x, uint32_t t) const {
  if (!bounded_ || core_.count(x)) return true;
  auto it = stages_.find(x);
  uint32_t s = it == stages_.end() ? 0 : it->second;
  return t < s;
}

}  // namespace bushy
