#include <doctest.h>

#include <random>

#include "aquad/error.hpp"
#include "aquad/numtheory.hpp"
#include "oracles/brute.hpp"

using namespace aquad;

TEST_CASE("checked arithmetic throws on overflow") {
  CHECK(checked_add(1, 2) == 3);
  CHECK(checked_mul(-4, 5) == -20);
  CHECK(checked_pow(3, 4) == 81);
  CHECK_THROWS_AS(checked_mul(INT64_MAX, 2), Error);
  CHECK_THROWS_AS(checked_pow(2, 63), Error);
  CHECK(narrow(i128{42}) == 42);
  CHECK_THROWS_AS(narrow(i128{1} << 70), Error);
}

TEST_CASE("to_integer round-trips 128-bit values") {
  CHECK(to_integer(i128{-5}) == -5);
  i128 big = (i128{1} << 100) + 7;
  CHECK(to_integer(big).get_str() == "1267650600228229401496703205383");
  CHECK(to_integer(-big).get_str() == "-1267650600228229401496703205383");
  i128 lowest = -(i128{1} << 126) * 2;  // -2^127
  CHECK(to_integer(lowest) == -(Integer(1) << 127));
}

TEST_CASE("integer square roots") {
  for (std::int64_t n = 0; n < 5000; ++n) {
    auto r = isqrt(n);
    CHECK(r * r <= n);
    CHECK((r + 1) * (r + 1) > n);
  }
  CHECK(isqrt(INT64_MAX) == 3037000499);
  std::int64_t root = 0;
  CHECK(is_square(144, &root));
  CHECK(root == 12);
  CHECK_FALSE(is_square(-4));
  CHECK_FALSE(is_square(2));
}

TEST_CASE("floor and modular helpers") {
  CHECK(floor_div(-7, 2) == -4);
  CHECK(ceil_div(-7, 2) == -3);
  CHECK(ceil_div(7, 2) == 4);
  CHECK(mod_floor(-1, 5) == 4);
  CHECK(pow_mod(3, 200, 1000000007) == static_cast<std::uint64_t>(oracle::pow_mod(3, 200, 1000000007)));
  for (std::int64_t a = 1; a < 13; ++a) CHECK(mod_floor(a * inv_mod(a, 13), 13) == 1);
}

TEST_CASE("primality and prime tables") {
  auto ps = primes_up_to(1000);
  std::size_t k = 0;
  for (std::int64_t n = 0; n <= 1000; ++n) {
    CHECK(is_prime(static_cast<std::uint64_t>(n)) == oracle::prime(n));
    if (oracle::prime(n)) CHECK(ps[k++] == static_cast<std::uint64_t>(n));
  }
  CHECK(k == ps.size());
  CHECK(is_prime(1000000007));
  CHECK(is_prime(18446744073709551557ULL));
  CHECK_FALSE(is_prime(3215031751ULL));  // strong pseudoprime to bases 2, 3, 5, 7
}

TEST_CASE("factorize") {
  CHECK(factorize(std::uint64_t{1}).empty());
  CHECK(factorize(std::uint64_t{1024}) == std::vector<std::uint64_t>(10, 2));
  CHECK(factorize(std::uint64_t{1000000007}) == std::vector<std::uint64_t>{1000000007});
  CHECK(factorize(std::int64_t{-12}) == std::vector<std::uint64_t>{2, 2, 3});
  // Semiprime with both factors above the trial-division range.
  std::uint64_t a = 1000003, b = 999999937;
  CHECK(factorize(a * b) == std::vector<std::uint64_t>{a, b});
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    std::uint64_t n = rng() % 2000000000ULL + 1;
    CHECK(factorize(n) == oracle::trial_factor(n));
  }
  Integer big = Integer("4611686014132420609");  // (2^31 - 1)^2
  CHECK(factorize(big) == std::vector<std::uint64_t>{2147483647, 2147483647});
  try {
    factorize(Integer("2305843009213693951") * 1000000007);
    FAIL("expected Overflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Overflow);
  }
  CHECK(distinct(std::vector<std::uint64_t>{2, 2, 3, 5, 5}) == std::vector<std::uint64_t>{2, 3, 5});
}

TEST_CASE("valuation and legendre") {
  CHECK(valuation(48, 2) == 4);
  CHECK(valuation(-81, 3) == 4);
  CHECK(valuation(Integer(250), 5) == 3);
  for (std::int64_t p : {3, 5, 7, 11, 13}) {
    for (std::int64_t a = 0; a < p; ++a) {
      int expect = 0;
      if (a != 0) {
        expect = -1;
        for (std::int64_t x = 1; x < p; ++x)
          if (x * x % p == a) expect = 1;
      }
      CHECK(legendre(a, p) == expect);
    }
  }
}

TEST_CASE("rational parsing") {
  CHECK(parse_rational("3") == 3);
  CHECK(parse_rational("-7/2") == Rational(-7, 2));
  CHECK(parse_rational("1.25") == Rational(5, 4));
  CHECK(parse_rational("-1.5") == Rational(-3, 2));
  CHECK(to_string(Rational(3, 2)) == "3/2");
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
  CHECK_THROWS_AS(parse_rational("abc"), Error);
}
