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

#include "bushy/rational.hpp"

#include "bushy/error.hpp"

namespace bushy {

Rational rat(long num, long den) {
  if (den == 0) fail(ErrorKind::kInvalidInput, "zero denominator");
  Rational r{mpz_class(num), mpz_class(den)};
  r.canonicalize();
  return r;
}

Rational parse_rational(const std::string& text) {
  Rational r;
  if (text.empty() || r.set_str(text, 10) != 0) {
    fail(ErrorKind::kInvalidInput, "bad rational: '" + text + "'");
  }
  if (r.get_den() == 0) fail(ErrorKind::kInvalidInput, "zero denominator");
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& r) { return r.get_str(10); }

mpz_class ceil_of(const Rational& r) {
  mpz_class out;
  mpz_cdiv_q(out.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return out;
}

uint64_t ceil_u64(const Rational& r) {
  mpz_class c = ceil_of(r);
  if (c <= 0) return 0;
  if (!c.fits_ulong_p()) fail(ErrorKind::kInvalidInput, "value too large");
  return c.get_ui();
}

Rational pow2_neg(unsigned k) {
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 2, k);
  return Rational(mpz_class(1), den);
}

Rational pow(const Rational& base, unsigned exp) {
  Rational out(1);
  for (unsigned i = 0; i < exp; ++i) out *= base;
  return out;
}

}  // namespace bushy
