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

#ifndef BUSHY_RATIONAL_HPP_
#define BUSHY_RATIONAL_HPP_

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace bushy {

using Rational = mpq_class;

Rational rat(long num, long den = 1);

// Accepts "a", "a/b" and "-a/b".
Rational parse_rational(const std::string& text);

std::string to_string(const Rational& r);

// Smallest integer y with y >= r.
mpz_class ceil_of(const Rational& r);

// ceil_of clamped into uint64; negative values map to 0.
uint64_t ceil_u64(const Rational& r);

// 2^{-k}
Rational pow2_neg(unsigned k);

Rational pow(const Rational& base, unsigned exp);

}  // namespace bushy

#endif  // BUSHY_RATIONAL_HPP_
