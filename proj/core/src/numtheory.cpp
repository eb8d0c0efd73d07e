#include "aquad/numtheory.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <limits>
#include <numeric>
#include <tuple>

#include "aquad/error.hpp"

namespace aquad {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateForm: return "DegenerateForm";
    case ErrorCode::DenominatorNotPPower: return "DenominatorNotPPower";
    case ErrorCode::DenominatorDivisibleByP: return "DenominatorDivisibleByP";
    case ErrorCode::BoxTooLarge: return "BoxTooLarge";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::BadPrime: return "BadPrime";
    case ErrorCode::NotStabilized: return "NotStabilized";
    case ErrorCode::ChartDegenerate: return "ChartDegenerate";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::MissingPrime: return "MissingPrime";
    case ErrorCode::NotSquarefree: return "NotSquarefree";
    case ErrorCode::InvalidDensity: return "InvalidDensity";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::Io: return "Io";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) fail(ErrorCode::Overflow, "int64 addition");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) fail(ErrorCode::Overflow, "int64 multiplication");
  return r;
}

std::int64_t checked_pow(std::int64_t base, unsigned exp) {
  std::int64_t r = 1;
  for (unsigned i = 0; i < exp; ++i) r = checked_mul(r, base);
  return r;
}

std::int64_t narrow(const Integer& value) {
  if (!value.fits_slong_p()) fail(ErrorCode::Overflow, "integer does not fit in 64 bits");
  return value.get_si();
}

std::int64_t narrow(i128 value) {
  if (value > std::numeric_limits<std::int64_t>::max() ||
      value < std::numeric_limits<std::int64_t>::min())
    fail(ErrorCode::Overflow, "128-bit value does not fit in 64 bits");
  return static_cast<std::int64_t>(value);
}

Integer to_integer(u128 value) {
  Integer hi(static_cast<unsigned long>(static_cast<std::uint64_t>(value >> 64)));
  Integer lo(static_cast<unsigned long>(static_cast<std::uint64_t>(value)));
  return (hi << 64) + lo;
}

Integer to_integer(i128 value) {
  if (value >= 0) return to_integer(static_cast<u128>(value));
  return -to_integer(static_cast<u128>(-(value + 1)) + 1);
}

std::int64_t isqrt(std::int64_t n) {
  if (n < 0) fail(ErrorCode::InvalidArgument, "isqrt of negative number");
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<long double>(n)));
  while (r > 0 && static_cast<i128>(r) * r > n) --r;
  while (static_cast<i128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

std::uint64_t isqrt_u128(u128 n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
  while (r > 0 && static_cast<u128>(r) * r > n) --r;
  while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

bool is_square(std::int64_t n, std::int64_t* root) {
  if (n < 0) return false;
  std::int64_t r = isqrt(n);
  if (root) *root = r;
  return r * r == n;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

std::int64_t mod_floor(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

std::int64_t inv_mod(std::int64_t a, std::int64_t m) {
  std::int64_t g = m, x = 0, x1 = 1, a1 = mod_floor(a, m);
  while (a1) {
    std::int64_t q = g / a1;
    std::tie(g, a1) = std::make_pair(a1, g - q * a1);
    std::tie(x, x1) = std::make_pair(x1, x - q * x1);
  }
  if (g != 1) fail(ErrorCode::InvalidArgument, "inverse of a non-unit");
  return mod_floor(x, m);
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  static constexpr std::uint64_t small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (std::uint64_t p : small) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : small) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::vector<std::uint64_t> primes_up_to(std::uint64_t limit) {
  std::vector<std::uint64_t> primes;
  if (limit < 2) return primes;
  std::vector<bool> composite(limit + 1, false);
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return primes;
}

int valuation(std::int64_t value, std::int64_t p) {
  if (value == 0) fail(ErrorCode::InvalidArgument, "valuation of zero");
  int v = 0;
  while (value % p == 0) {
    value /= p;
    ++v;
  }
  return v;
}

int valuation(const Integer& value, std::int64_t p) {
  if (value == 0) fail(ErrorCode::InvalidArgument, "valuation of zero");
  Integer prime(static_cast<long>(p));
  Integer rest;
  return static_cast<int>(mpz_remove(rest.get_mpz_t(), value.get_mpz_t(), prime.get_mpz_t()));
}

int legendre(std::int64_t a, std::int64_t p) { return legendre(Integer(static_cast<long>(a)), p); }

int legendre(const Integer& a, std::int64_t p) {
  Integer prime(static_cast<long>(p));
  return mpz_legendre(a.get_mpz_t(), prime.get_mpz_t());
}

namespace {

std::uint64_t pollard_brent(std::uint64_t n) {
  if (n % 2 == 0) return 2;
  // Fixed constants keep the factorization deterministic.
  for (std::uint64_t c = 1;; ++c) {
    std::uint64_t y = 2, g = 1, r = 1, q = 1, x = 0, ys = 0;
    const std::uint64_t m = 128;
    auto f = [&](std::uint64_t v) { return (mul_mod(v, v, n) + c) % n; };
    do {
      x = y;
      for (std::uint64_t i = 0; i < r; ++i) y = f(y);
      std::uint64_t k = 0;
      do {
        ys = y;
        for (std::uint64_t i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = mul_mod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
        k += m;
      } while (k < r && g == 1);
      r *= 2;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void split(std::uint64_t n, std::vector<std::uint64_t>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  std::uint64_t d = pollard_brent(n);
  split(d, out);
  split(n / d, out);
}

}  // namespace

std::vector<std::uint64_t> factorize(std::uint64_t t) {
  if (t == 0) fail(ErrorCode::InvalidArgument, "factorize(0)");
  std::vector<std::uint64_t> out;
  constexpr std::uint64_t kTrialLimit = 1'000'000;
  while (t % 2 == 0) {
    out.push_back(2);
    t /= 2;
  }
  for (std::uint64_t d = 3; d <= kTrialLimit && d * d <= t; d += 2) {
    while (t % d == 0) {
      out.push_back(d);
      t /= d;
    }
  }
  if (t > 1) split(t, out);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::uint64_t> factorize(std::int64_t t) {
  if (t == 0) fail(ErrorCode::InvalidArgument, "factorize(0)");
  std::uint64_t magnitude = t < 0 ? static_cast<std::uint64_t>(-(t + 1)) + 1 : static_cast<std::uint64_t>(t);
  return factorize(magnitude);
}

std::vector<std::uint64_t> factorize(const Integer& t) {
  Integer magnitude = abs(t);
  if (!magnitude.fits_ulong_p()) fail(ErrorCode::Overflow, "factorize beyond 64 bits");
  return factorize(static_cast<std::uint64_t>(magnitude.get_ui()));
}

std::vector<std::uint64_t> distinct(std::span<const std::uint64_t> factors) {
  std::vector<std::uint64_t> out(factors.begin(), factors.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Rational parse_rational(const std::string& raw) {
  std::string text;
  for (char c : raw) {
    if (!std::isspace(static_cast<unsigned char>(c))) text.push_back(c);
  }
  if (text.empty()) fail(ErrorCode::InvalidArgument, "empty number");
  auto valid_int = [](const std::string& s) {
    std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
  };
  Rational result;
  if (auto slash = text.find('/'); slash != std::string::npos) {
    std::string num = text.substr(0, slash), den = text.substr(slash + 1);
    if (!valid_int(num) || !valid_int(den)) fail(ErrorCode::InvalidArgument, "bad rational '" + raw + "'");
    Integer d(den.front() == '+' ? den.substr(1) : den);
    if (d == 0) fail(ErrorCode::InvalidArgument, "zero denominator in '" + raw + "'");
    result = Rational(Integer(num.front() == '+' ? num.substr(1) : num), d);
  } else if (auto dot = text.find('.'); dot != std::string::npos) {
    std::string whole = text.substr(0, dot), frac = text.substr(dot + 1);
    bool negative = !whole.empty() && whole[0] == '-';
    if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) whole.erase(0, 1);
    if (whole.empty()) whole = "0";
    if (frac.empty() || !valid_int(whole) || !valid_int(frac) || frac[0] == '-' || frac[0] == '+')
      fail(ErrorCode::InvalidArgument, "bad decimal '" + raw + "'");
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    result = Rational(Integer(whole) * scale + Integer(frac), scale);
    if (negative) result = -result;
  } else {
    if (!valid_int(text)) fail(ErrorCode::InvalidArgument, "bad integer '" + raw + "'");
    result = Rational(Integer(text.front() == '+' ? text.substr(1) : text));
  }
  result.canonicalize();
  return result;
}

std::string to_string(const Rational& value) {
  if (value.get_den() == 1) return value.get_num().get_str();
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

}  // namespace aquad
