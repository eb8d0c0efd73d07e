#pragma once

// Integer helpers shared by every module: exact big-number aliases, checked
// 64-bit arithmetic, primality, factorization and small prime tables.

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace aquad {

using Integer = mpz_class;
using Rational = mpq_class;

__extension__ using i128 = __int128;
__extension__ using u128 = unsigned __int128;

// Checked int64 arithmetic; throws Error{Overflow} on wrap.
std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);
std::int64_t checked_pow(std::int64_t base, unsigned exp);
std::int64_t narrow(const Integer& value);
std::int64_t narrow(i128 value);
Integer to_integer(i128 value);
Integer to_integer(u128 value);

// floor(sqrt(n)) for n >= 0.
std::int64_t isqrt(std::int64_t n);
std::uint64_t isqrt_u128(u128 n);
bool is_square(std::int64_t n, std::int64_t* root = nullptr);

std::int64_t floor_div(std::int64_t a, std::int64_t b);
std::int64_t ceil_div(std::int64_t a, std::int64_t b);
std::int64_t mod_floor(std::int64_t a, std::int64_t m);

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m);
// Inverse of a modulo m; a must be a unit.
std::int64_t inv_mod(std::int64_t a, std::int64_t m);

// Deterministic Miller-Rabin; exact for every 64-bit input.
bool is_prime(std::uint64_t n);

// Primes p with p <= limit, ascending.
std::vector<std::uint64_t> primes_up_to(std::uint64_t limit);

// p-adic valuation; value must be nonzero.
int valuation(std::int64_t value, std::int64_t p);
int valuation(const Integer& value, std::int64_t p);

// Legendre symbol (a/p) for odd prime p; 0 when p | a.
int legendre(std::int64_t a, std::int64_t p);
int legendre(const Integer& a, std::int64_t p);

// Prime factors of |t| with multiplicity, ascending. Trial division to 10^6,
// then Pollard-Brent with fixed parameters; every cofactor is certified by
// the deterministic primality test. 1 -> {}.
std::vector<std::uint64_t> factorize(std::uint64_t t);
std::vector<std::uint64_t> factorize(std::int64_t t);
std::vector<std::uint64_t> factorize(const Integer& t);

// Distinct primes of a factorization.
std::vector<std::uint64_t> distinct(std::span<const std::uint64_t> factors);

// Parses "3", "-7/2" or "1.25" into an exact rational.
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& value);

}  // namespace aquad
