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

#include "bushy/hashfam.hpp"

#include <bit>
#include <random>
#include <sstream>

#include "bushy/error.hpp"
#include "bushy/seed.hpp"

namespace bushy {
namespace {

std::vector<uint64_t> to_words(const std::vector<uint32_t>& members, unsigned n) {
  std::vector<uint64_t> w(((uint64_t{1} << n) + 63) / 64, 0);
  for (uint32_t x : members) w[x / 64] |= uint64_t{1} << (x % 64);
  return w;
}

// Calls visit on every k-subset of {0..n-1}; stops when visit returns false.
template <typename Visit>
void for_each_subset(size_t n, size_t k, Visit visit) {
  if (k > n) return;
  std::vector<size_t> pick(k);
  for (size_t i = 0; i < k; ++i) pick[i] = i;
  while (true) {
    if (!visit(pick)) return;
    size_t i = k;
    while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++pick[i - 1];
    for (size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
}

}  // namespace

std::string element_bits(uint32_t x, unsigned n) {
  std::string s(n, '0');
  for (unsigned i = 0; i < n; ++i) {
    if (x >> (n - 1 - i) & 1) s[i] = '1';
  }
  return s;
}

CylinderSet HashFamily::as_cylinders(size_t i) const {
  std::set<Bits> out;
  for (uint32_t x : sets.at(i)) out.insert(element_bits(x, ground));
  return CylinderSet(out);
}

HashVerdict verify_hash_family(const HashFamily& f) {
  HashVerdict v;
  if (f.ground > 24) fail(ErrorKind::kInvalidInput, "ground set too large to verify");
  Rational size(uint64_t{1} << f.ground);
  std::vector<std::vector<uint64_t>> words;
  for (size_t i = 0; i < f.sets.size(); ++i) {
    for (uint32_t x : f.sets[i]) {
      if (x >= (uint64_t{1} << f.ground)) fail(ErrorKind::kInvalidInput, "element outside 2^N");
    }
    words.push_back(to_words(f.sets[i], f.ground));
    Rational d = Rational(f.sets[i].size()) / size;
    if (!(d > f.epsilon) && v.ok) {
      v.ok = false;
      v.kind = "density";
      v.index = {i};
      v.value = d;
    }
  }
  if (!v.ok) return v;
  for_each_subset(f.sets.size(), f.k, [&](const std::vector<size_t>& j) {
    uint64_t count = 0;
    for (size_t w = 0; w < words[j[0]].size(); ++w) {
      uint64_t acc = ~uint64_t{0};
      for (size_t i : j) acc &= words[i][w];
      count += std::popcount(acc);
    }
    Rational d = Rational(count) / size;
    if (!(d < f.delta)) {
      v.ok = false;
      v.kind = "intersection";
      v.index = j;
      v.value = d;
      return false;
    }
    return true;
  });
  return v;
}

std::optional<Rational> choose_eps_hat(const Rational& epsilon, const Rational& delta, unsigned k) {
  if (!(pow(epsilon, k) < delta)) return std::nullopt;
  // Bracket delta^{1/k} from below by bisection on exact rationals.
  Rational lo = epsilon, hi = 1;
  for (int i = 0; i < 48; ++i) {
    Rational mid = (lo + hi) / 2;
    if (pow(mid, k) < delta) lo = mid;
    else hi = mid;
  }
  Rational target = (epsilon + lo) / 2;
  std::optional<Rational> best;
  Rational best_gap;
  for (long den = 1; den <= 64; ++den) {
    Rational scaled = target * Rational(den);
    mpz_class num = ceil_of(scaled - Rational(1, 2));
    for (mpz_class a : {mpz_class(num - 1), num, mpz_class(num + 1)}) {
      if (a <= 0 || a >= den) continue;
      Rational c(a, mpz_class(den));
      c.canonicalize();
      if (!(c > epsilon) || !(pow(c, k) < delta)) continue;
      Rational gap = abs(c - target);
      if (!best || gap < best_gap) {
        best = c;
        best_gap = gap;
      }
    }
  }
  return best;
}

HashGeneration generate_hash_family(const Rational& epsilon, const Rational& delta, unsigned k,
                                    unsigned n, uint64_t seed, unsigned max_n) {
  if (!(epsilon < 1 && epsilon > 0 && delta < 1 && delta > 0)) {
    fail(ErrorKind::kPrecondition, "need epsilon and delta strictly between 0 and 1");
  }
  if (k == 0) fail(ErrorKind::kPrecondition, "k must be positive");
  if (max_n > 20) fail(ErrorKind::kPrecondition, "maxN above 20");
  std::optional<Rational> eh = choose_eps_hat(epsilon, delta, k);
  if (!eh) {
    fail(ErrorKind::kPrecondition, "no eps_hat with denominator <= 64 satisfies epsilon < eps_hat and eps_hat^k < delta");
  }
  uint64_t num = eh->get_num().get_ui();
  uint64_t den = eh->get_den().get_ui();
  HashGeneration g;
  for (unsigned ground = 4; ground <= max_n; ground += 2) {
    for (unsigned retry = 0; retry < 8; ++retry) {
      std::mt19937_64 rng(derive_seed(seed, "hash/N" + std::to_string(ground) + "/r" + std::to_string(retry)));
      std::uniform_int_distribution<uint64_t> draw(0, den - 1);
      HashFamily f;
      f.ground = ground;
      f.k = k;
      f.delta = delta;
      f.epsilon = epsilon;
      f.eps_hat = *eh;
      f.seed = seed;
      for (unsigned i = 0; i <= n; ++i) {
        std::vector<uint32_t> b;
        for (uint32_t x = 0; x < (uint32_t{1} << ground); ++x) {
          if (draw(rng) < num) b.push_back(x);
        }
        f.sets.push_back(std::move(b));
      }
      bool ok = verify_hash_family(f).ok;
      g.attempts.push_back({ground, retry, ok});
      if (ok) {
        f.attempts = static_cast<unsigned>(g.attempts.size());
        g.family = std::move(f);
        return g;
      }
    }
  }
  std::ostringstream os;
  os << "no verified family up to N=" << max_n << " after " << g.attempts.size() << " draws";
  fail(ErrorKind::kInconclusive, os.str());
}

}  // namespace bushy
