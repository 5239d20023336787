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

#ifndef BUSHY_FUNCTIONAL_HPP_
#define BUSHY_FUNCTIONAL_HPP_

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>

#include "bushy/trees.hpp"

namespace bushy {

constexpr uint32_t kForever = std::numeric_limits<uint32_t>::max();

// A finite, stage-annotated map from nodes to binary outputs. A node without
// an entry shows the output of its longest annotated prefix.
class ValueFunctional {
 public:
  struct Entry {
    Bits out;
    uint32_t stage = 0;
  };

  ValueFunctional() = default;
  explicit ValueFunctional(std::map<Node, Entry> entries) : entries_(std::move(entries)) {}

  const std::map<Node, Entry>& entries() const { return entries_; }
  void set(const Node& x, Bits out, uint32_t stage = 0) { entries_[x] = Entry{std::move(out), stage}; }

  // Output visible at x by time t.
  Bits output(const Node& x, uint32_t t = kForever) const;
  // Psi^x restricted to n bits, when at least n bits are visible.
  std::optional<Bits> restrict_to(const Node& x, size_t n, uint32_t t = kForever) const;
  // Psi^x(m) is defined.
  bool defined_at(const Node& x, size_t m, uint32_t t = kForever) const {
    return output(x, t).size() > m;
  }
  uint32_t max_stage() const;

  // Outputs extend along prefixes; longer outputs never appear at earlier
  // stages than shorter outputs below them.
  std::optional<std::string> validate() const;

 private:
  std::map<Node, Entry> entries_;
};

// Stage at which a node of the ambient tree leaves the core tree T. Nodes of
// T never leave; other nodes leave at their listed stage, or at stage 0.
class Expulsion {
 public:
  Expulsion() = default;
  Expulsion(NodeSet core, std::map<Node, uint32_t> stages)
      : core_(std::move(core)), stages_(std::move(stages)), bounded_(true) {}

  // Membership in T[t].
  bool present(const Node& x, uint32_t t) const;
  bool bounded() const { return bounded_; }
  const NodeSet& core() const { return core_; }
  const std::map<Node, uint32_t>& stages() const { return stages_; }

 private:
  NodeSet core_;
  std::map<Node, uint32_t> stages_;
  bool bounded_ = false;  // default: nothing is ever expelled
};

}  // namespace bushy

#endif  // BUSHY_FUNCTIONAL_HPP_
