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

#ifndef BUSHY_HASHFAM_HPP_
#define BUSHY_HASHFAM_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bushy/trees.hpp"

namespace bushy {

// Subsets B_0..B_n of the ground set 2^N. Members are stored as N-bit
// integers, most significant bit first when read as a string.
struct HashFamily {
  unsigned ground = 0;  // N
  unsigned k = 0;
  Rational delta;
  Rational epsilon;
  Rational eps_hat;  // inclusion probability used by the generator
  uint64_t seed = 0;
  unsigned attempts = 0;
  std::vector<std::vector<uint32_t>> sets;  // sorted members

  CylinderSet as_cylinders(size_t i) const;
};

std::string element_bits(uint32_t x, unsigned n);

struct HashVerdict {
  bool ok = true;
  std::string kind;            // "density" or "intersection"
  std::vector<size_t> index;   // offending set or index set J
  Rational value;              // offending density
};

HashVerdict verify_hash_family(const HashFamily& f);

// The a/b with b <= 64 inside (epsilon, delta^{1/k}) closest to the midpoint
// of that interval. Empty when epsilon^k >= delta.
std::optional<Rational> choose_eps_hat(const Rational& epsilon, const Rational& delta, unsigned k);

struct HashAttempt {
  unsigned ground;
  unsigned retry;
  bool ok;
};

struct HashGeneration {
  HashFamily family;
  std::vector<HashAttempt> attempts;
};

// n + 1 sets; N runs over 4, 6, ..., max_n with 8 draws each.
HashGeneration generate_hash_family(const Rational& epsilon, const Rational& delta, unsigned k,
                                    unsigned n, uint64_t seed, unsigned max_n = 16);

}  // namespace bushy

#endif  // BUSHY_HASHFAM_HPP_
