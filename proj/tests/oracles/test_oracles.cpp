// Randomized comparisons of library results against the naive references in
// brute.hpp.

#include <doctest.h>

#include <numeric>
#include <random>

#include "aquad/enumerate.hpp"
#include "aquad/error.hpp"
#include "aquad/forms.hpp"
#include "aquad/geomsieve.hpp"
#include "aquad/modular.hpp"
#include "aquad/sieve.hpp"
#include "oracles/brute.hpp"

using namespace aquad;

namespace {

std::mt19937_64& rng() {
  static std::mt19937_64 r(20240601);
  return r;
}

std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng());
}

std::optional<QuadraticForm> random_form(std::size_t n, std::int64_t range) {
  std::vector<std::int64_t> g(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) g[i * n + j] = g[j * n + i] = uniform(-range, range);
  try {
    return QuadraticForm(n, g);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::int64_t squarefree_nonzero() {
  static const std::vector<std::int64_t> pool{-15, -10, -7, -6, -5, -3, -2, -1, 1, 2, 3, 5, 6, 7, 10, 11, 14, 15};
  return pool[static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(pool.size()) - 1))];
}

// z^2 = a x^2 + b y^2 with (x, y, z) primitive mod p^k.
bool hilbert_brute(std::int64_t a, std::int64_t b, std::int64_t p) {
  const int k = p == 2 ? 5 : 3;
  std::int64_t mod = 1;
  for (int i = 0; i < k; ++i) mod *= p;
  bool found = false;
  oracle::for_box(3, 0, mod - 1, [&](const oracle::Vec& v) {
    if (found || (v[0] % p == 0 && v[1] % p == 0 && v[2] % p == 0)) return;
    if (oracle::mod(a * v[0] * v[0] + b * v[1] * v[1] - v[2] * v[2], mod) == 0) found = true;
  });
  return found;
}

}  // namespace

TEST_CASE("enumeration equals the ball scan on random forms") {
  int checked = 0;
  while (checked < 60) {
    std::size_t n = static_cast<std::size_t>(uniform(2, 4));
    auto q = random_form(n, 3);
    if (!q) continue;
    std::int64_t m = uniform(-6, 6);
    if (m == 0) continue;
    std::int64_t N = n == 4 ? 4 : 7;
    oracle::Vec gram(q->gram().begin(), q->gram().end());
    auto got = enumeration::enumerate_integral(QuadricInstance(*q, m), N);
    std::vector<oracle::Vec> as_vec;
    for (const auto& x : got) as_vec.push_back(x.numerators);
    CHECK_MESSAGE(as_vec == oracle::ball_points(gram, n, m, N), q->to_string() << " m=" << m);
    ++checked;
  }
}

TEST_CASE("prime-power counts equal full scans on random forms") {
  int checked = 0;
  while (checked < 80) {
    std::size_t n = static_cast<std::size_t>(uniform(2, 3));
    auto q = random_form(n, 4);
    if (!q) continue;
    std::int64_t p = std::vector<std::int64_t>{2, 3, 5}[static_cast<std::size_t>(uniform(0, 2))];
    int k = static_cast<int>(uniform(1, p == 5 ? 2 : 3));
    std::int64_t mod = oracle::pow_mod(p, k, INT64_MAX);
    std::int64_t m = uniform(-10, 10);
    oracle::Vec gram(q->gram().begin(), q->gram().end());
    auto expect = oracle::count_mod(gram, n, m, mod);
    CHECK_MESSAGE(modular::count_prime_power(*q, m, p, k) == Integer(static_cast<unsigned long>(expect)),
                  q->to_string() << " m=" << m << " mod " << mod);
    ++checked;
  }
}

TEST_CASE("Hilbert symbols against brute-force conics") {
  for (int t = 0; t < 150; ++t) {
    std::int64_t a = squarefree_nonzero(), b = squarefree_nonzero();
    std::int64_t p = std::vector<std::int64_t>{2, 3, 5, 7}[static_cast<std::size_t>(uniform(0, 3))];
    int expect = hilbert_brute(a, b, p) ? 1 : -1;
    CHECK_MESSAGE(forms::hilbert_symbol(a, b, Place::prime(p)) == expect, "(" << a << "," << b << ")_" << p);
  }
}

TEST_CASE("Hilbert product formula") {
  for (int t = 0; t < 300; ++t) {
    std::int64_t a = uniform(-200, 200), b = uniform(-200, 200);
    if (a == 0 || b == 0) continue;
    int prod = forms::hilbert_symbol(a, b, Place::real());
    for (auto p : oracle::primes_below(202))
      if (a % p == 0 || b % p == 0 || p == 2) prod *= forms::hilbert_symbol(a, b, Place::prime(p));
    CHECK_MESSAGE(prod == 1, "a=" << a << " b=" << b);
  }
}

TEST_CASE("local squares") {
  for (std::int64_t p : {2, 3, 5, 7}) {
    const std::int64_t mod = p == 2 ? 8 : p;
    for (std::int64_t u = -60; u <= 60; ++u) {
      if (u == 0 || u % p == 0) continue;
      bool expect = false;
      for (std::int64_t x = 1; x < mod; ++x)
        if (oracle::mod(x * x - u, mod) == 0) expect = true;
      CHECK(forms::is_local_square(u, Place::prime(p)) == expect);
      CHECK(forms::is_local_square(u * p * p, Place::prime(p)) == expect);
      CHECK_FALSE(forms::is_local_square(u * p, Place::prime(p)));
    }
  }
}

TEST_CASE("integer solutions imply global representability") {
  for (int t = 0; t < 100; ++t) {
    std::size_t n = static_cast<std::size_t>(uniform(2, 4));
    auto q = random_form(n, 3);
    if (!q) continue;
    oracle::Vec gram(q->gram().begin(), q->gram().end());
    std::int64_t m = uniform(-12, 12);
    if (m == 0) continue;
    if (!oracle::ball_points(gram, n, m, 5).empty()) CHECK_MESSAGE(forms::represents_global(*q, m), q->to_string() << " m=" << m);
  }
}

TEST_CASE("subsequence counts and sifting on random sequences") {
  for (int t = 0; t < 100; ++t) {
    sieve::SieveSequence a;
    std::map<std::uint64_t, std::uint64_t> raw;
    for (int i = 0; i < 50; ++i) {
      auto b = static_cast<std::uint64_t>(uniform(1, 100000));
      auto w = static_cast<std::uint64_t>(uniform(1, 4));
      a.add(b, w);
      raw[b] += w;
    }
    std::uint64_t d = 1;
    for (auto p : oracle::primes_below(20))
      if (uniform(0, 2) == 0) d *= static_cast<std::uint64_t>(p);
    std::uint64_t expect = 0;
    for (auto [b, w] : raw)
      if (b % d == 0) expect += w;
    CHECK(sieve::subsequence_count(a, d) == expect);
    std::int64_t z = uniform(2, 40);
    CHECK(static_cast<std::int64_t>(sieve::sift(a, sieve::primes_outside({}), z).sifted) ==
          oracle::legendre_sum(raw, oracle::primes_below(z)));
  }
}

TEST_CASE("factorization against trial division") {
  for (int t = 0; t < 2000; ++t) {
    auto n = static_cast<std::uint64_t>(uniform(1, 4'000'000'000'000LL));
    CHECK(factorize(n) == oracle::trial_factor(n));
  }
}

TEST_CASE("half-dimensional representability") {
  for (std::int64_t a : {1, 2, 3, 5, 7})
    for (std::int64_t t = -5; t < 3000; ++t) CHECK(geomsieve::represented_by_binary(a, t) == oracle::sum_uv(a, t));
}

TEST_CASE("Ekedahl counts on random linear pairs") {
  for (int t = 0; t < 10; ++t) {
    std::vector<std::int64_t> c1{uniform(-3, 3), uniform(-3, 3)}, c2{uniform(-3, 3), uniform(-3, 3)};
    if (c1[0] * c2[1] - c1[1] * c2[0] == 0) continue;
    std::int64_t B = 40, M = uniform(3, 30);
    auto r = geomsieve::ekedahl_count({Polynomial::linear(c1), Polynomial::linear(c2)}, B, M);
    std::uint64_t expect = 0;
    oracle::for_box(2, -B, B, [&](const oracle::Vec& y) {
      std::int64_t u = c1[0] * y[0] + c1[1] * y[1], v = c2[0] * y[0] + c2[1] * y[1];
      std::int64_t g = std::gcd(u, v);
      if (g == 0) {
        ++expect;
        return;
      }
      for (auto p : oracle::trial_factor(static_cast<std::uint64_t>(g)))
        if (static_cast<std::int64_t>(p) >= M) {
          ++expect;
          return;
        }
    });
    CHECK(r.count == expect);
  }
}
