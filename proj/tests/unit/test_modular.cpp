#include <doctest.h>

#include <random>

#include "aquad/error.hpp"
#include "aquad/modular.hpp"
#include "oracles/brute.hpp"

using namespace aquad;
using namespace aquad::modular;

namespace {

Polynomial coordinate(std::size_t n, std::size_t i) {
  std::vector<std::int64_t> c(n, 0);
  c[i] = 1;
  return Polynomial::linear(c);
}

IntegralPoint rational_point(std::vector<std::int64_t> num, std::int64_t p0, int scale) {
  IntegralPoint x;
  x.numerators = std::move(num);
  x.p0 = p0;
  x.scale = scale;
  return x;
}

}  // namespace

TEST_CASE("reduce_point") {
  auto r = reduce_point(IntegralPoint{{3, 4, 0}}, 5, 1);
  CHECK(r.coords == std::vector<std::int64_t>{3, 4, 0});
  CHECK(r.modulus == 5);
  // (1/2, 1, 1) stored as (1, 2, 2) / 2
  auto half = rational_point({1, 2, 2}, 2, 1);
  CHECK(reduce_point(half, 3, 1).coords == std::vector<std::int64_t>{2, 1, 1});
  CHECK(reduce_point(half, 3, 2).coords == std::vector<std::int64_t>{5, 1, 1});
  try {
    reduce_point(half, 2, 1);
    FAIL("expected DenominatorDivisibleByP");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DenominatorDivisibleByP);
  }
  auto q = QuadraticForm::parse("1,1,1");
  auto tagged = reduce_point(IntegralPoint{{-1, 2, 2}}, 7, 2, q, 9);
  CHECK(tagged.on_quadric == true);
  CHECK(tagged.coords == std::vector<std::int64_t>{48, 2, 2});
  CHECK(reduce_point(IntegralPoint{{1, 2, 2}}, 7, 1, q, 1).on_quadric == false);
}

TEST_CASE("finite field counts: examples") {
  CHECK(count_quadric_ffield_brute(QuadraticForm::parse("1,1,1,1"), 1, 3) == 24);
  CHECK(count_quadric_ffield_brute(QuadraticForm::parse("1,1"), 0, 5) == 9);
  CHECK(count_quadric_ffield_exact(QuadraticForm::parse("1,1,1,1"), 1, 11) == 1320);
  CHECK(count_quadric_ffield_brute(QuadraticForm::parse("1,1,1,1"), 1, 11) == 1320);
  // 7^2 + 7 * chi(-1) with chi(-1) = -1 mod 7.
  CHECK(count_quadric_ffield_exact(QuadraticForm::parse("1,1,1"), 1, 7) == 42);
  CHECK(count_quadric_ffield_brute(QuadraticForm::parse("1,1,1"), 1, 7) == 42);
  CHECK(count_quadric_ffield_exact(QuadraticForm::parse("1,1,1,1,1"), 2, 5) ==
        count_quadric_ffield_brute(QuadraticForm::parse("1,1,1,1,1"), 2, 5));
  CHECK_THROWS_AS(count_quadric_ffield_exact(QuadraticForm::parse("1,1,1"), 1, 2), Error);
  CHECK_THROWS_AS(count_quadric_ffield_exact(QuadraticForm::parse("1,1,3"), 1, 3), Error);
}

TEST_CASE("exact formula equals brute force") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 150; ++t) {
    std::size_t n = 2 + rng() % 4;
    std::vector<std::int64_t> g(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) g[i * n + j] = g[j * n + i] = static_cast<std::int64_t>(rng() % 9) - 4;
    std::optional<QuadraticForm> q;
    try {
      q.emplace(n, g);
    } catch (const Error&) {
      continue;
    }
    for (std::int64_t p : {3, 5, 7, 11}) {
      if (q->det() % p == 0) continue;
      if (n == 5 && p > 7) continue;
      std::int64_t m = static_cast<std::int64_t>(rng() % 15) - 7;
      CHECK_MESSAGE(count_quadric_ffield_exact(*q, m, p) == count_quadric_ffield_brute(*q, m, p),
                    q->to_string() << " m=" << m << " p=" << p);
    }
  }
}

TEST_CASE("value histogram sums to p^n") {
  auto q = QuadraticForm::parse("[[1,1,0],[1,3,0],[0,0,-2]]");
  auto h = value_histogram_ffield(q, 5);
  std::uint64_t s = 0;
  for (auto c : h) s += c;
  CHECK(s == 125);
  for (std::int64_t t = 0; t < 5; ++t) CHECK(h[t] == count_quadric_ffield_brute(q, t, 5));
  CHECK_THROWS_AS(value_histogram_ffield(QuadraticForm::parse("1,1,1,1,1"), 101, 1000), Error);
}

TEST_CASE("subvariety counts") {
  auto q = QuadraticForm::parse("1,1,1,1");
  SubvarietySpec z({coordinate(4, 0), coordinate(4, 1)});
  CHECK(count_subvariety_ffield(z, q, 1, 3) == 4);
  CHECK(count_subvariety_ffield(z, q, 1, 5) == 4);
  auto pts = subvariety_points_ffield(z, q, 1, 5);
  CHECK(pts.size() == 4);
  for (const auto& x : pts) {
    CHECK(x[0] == 0);
    CHECK(x[1] == 0);
    CHECK((x[2] * x[2] + x[3] * x[3]) % 5 == 1);
  }
  CHECK_THROWS_AS(SubvarietySpec({coordinate(4, 0), coordinate(4, 0)}), Error);
  std::vector<std::int64_t> twice{2, 0, 0, 0};
  CHECK_THROWS_AS(SubvarietySpec({coordinate(4, 0), Polynomial::linear(twice)}), Error);
  CHECK_THROWS_AS(SubvarietySpec({coordinate(4, 0), Polynomial::constant(4, 0)}), Error);
  CHECK_FALSE(z.advisories().empty());
  std::vector<std::int64_t> x{0, 7, 1, 1};
  CHECK(z.vanishes_mod(x, 7));
  CHECK_FALSE(z.vanishes_mod(x, 5));
}

TEST_CASE("prime power counts") {
  auto q4 = QuadraticForm::parse("1,1,1,1");
  CHECK(count_prime_power(q4, 1, 3, 1) == 24);
  CHECK(count_prime_power(q4, 1, 3, 2) == 27 * 24);
  CHECK(count_prime_power_scan(q4, 1, 3, 2) == 27 * 24);
  CHECK(count_prime_power(QuadraticForm::parse("1,1"), 0, 2, 3) == oracle::count_mod({1, 0, 0, 1}, 2, 0, 8));

  // Every strategy agrees with the full scan.
  const std::vector<std::string> forms{"1,1,1,1", "1,1,1,-1", "1,2,3", "[[1,1,0],[1,3,0],[0,0,1]]", "2,6,-3"};
  int lifted_runs = 0;
  for (const auto& text : forms) {
    auto q = QuadraticForm::parse(text);
    oracle::Vec gram(q.gram().begin(), q.gram().end());
    for (std::int64_t p : {2, 3, 5})
      for (int k = 1; k <= 3; ++k) {
        std::int64_t mod = oracle::pow_mod(p, k, INT64_MAX);
        if (static_cast<double>(mod) * mod * mod * (q.dim() == 4 ? mod : 1) > 3e6) continue;
        for (std::int64_t m : {1, 2, 6, -3}) {
          auto expect = oracle::count_mod(gram, q.dim(), m, mod);
          CHECK_MESSAGE(count_prime_power(q, m, p, k) == Integer(static_cast<unsigned long>(expect)),
                        text << " m=" << m << " p^k=" << mod);
          // Lifting recursion alone, with direct counts only where small.
          PrimePowerOptions lift;
          lift.convolution_cap = 1;
          lift.scan_cap = 20000;
          std::optional<Integer> lifted;
          try {
            lifted = count_prime_power(q, m, p, k, lift);
          } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::CapExceeded);
          }
          if (lifted) {
            ++lifted_runs;
            CHECK(*lifted == Integer(static_cast<unsigned long>(expect)));
          }
        }
      }
  }
  CHECK(lifted_runs > 20);
  MESSAGE("lifting recursion exercised " << lifted_runs << " times");
}

TEST_CASE("diagonal value distribution") {
  std::vector<std::int64_t> a{1, 3, -2};
  auto dist = diagonal_value_distribution(a, 3, 2);
  REQUIRE(dist.size() == 9);
  u128 total = 0;
  for (auto c : dist) total += c;
  CHECK(total == 729);
  for (std::int64_t t = 0; t < 9; ++t)
    CHECK(static_cast<std::uint64_t>(dist[t]) == oracle::count_mod(oracle::diag_gram(a), 3, t, 9));
}
