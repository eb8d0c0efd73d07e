#include "aquad/polynomial.hpp"

#include <cctype>
#include <algorithm>
#include <map>
#include <sstream>

#include "aquad/error.hpp"

namespace aquad {

Polynomial::Polynomial(std::size_t nvars, std::vector<Monomial> terms) : nvars_(nvars) {
  std::map<std::vector<unsigned>, Integer> merged;
  for (auto& t : terms) {
    require(t.exponents.size() == nvars, ErrorCode::InvalidArgument,
            "monomial has " + std::to_string(t.exponents.size()) + " exponents, expected " + std::to_string(nvars));
    merged[t.exponents] += Integer(static_cast<long>(t.coeff));
  }
  for (auto& [e, c] : merged)
    if (c != 0) terms_.push_back(Monomial{e, narrow(c)});
}

Polynomial Polynomial::constant(std::size_t nvars, std::int64_t c) {
  return Polynomial(nvars, {Monomial{std::vector<unsigned>(nvars, 0), c}});
}

Polynomial Polynomial::linear(std::span<const std::int64_t> coeffs, std::int64_t c) {
  std::size_t n = coeffs.size();
  std::vector<Monomial> terms;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<unsigned> e(n, 0);
    e[i] = 1;
    terms.push_back(Monomial{e, coeffs[i]});
  }
  terms.push_back(Monomial{std::vector<unsigned>(n, 0), c});
  return Polynomial(n, std::move(terms));
}

unsigned Polynomial::degree() const {
  unsigned d = 0;
  for (const auto& t : terms_) {
    unsigned s = 0;
    for (auto e : t.exponents) s += e;
    d = std::max(d, s);
  }
  return d;
}

namespace {

i128 mul128(i128 a, i128 b) {
  i128 r;
  if (__builtin_mul_overflow(a, b, &r)) fail(ErrorCode::Overflow, "polynomial value exceeds 128 bits");
  return r;
}

}  // namespace

i128 Polynomial::eval(std::span<const std::int64_t> x) const {
  i128 total = 0;
  for (const auto& t : terms_) {
    i128 term = t.coeff;
    for (std::size_t i = 0; i < nvars_; ++i)
      for (unsigned k = 0; k < t.exponents[i]; ++k) term = mul128(term, x[i]);
    if (__builtin_add_overflow(total, term, &total)) fail(ErrorCode::Overflow, "polynomial value exceeds 128 bits");
  }
  return total;
}

Integer Polynomial::eval(std::span<const Integer> x) const {
  Integer total = 0;
  for (const auto& t : terms_) {
    Integer term = static_cast<long>(t.coeff);
    for (std::size_t i = 0; i < nvars_; ++i) {
      Integer power;
      mpz_pow_ui(power.get_mpz_t(), x[i].get_mpz_t(), t.exponents[i]);
      term *= power;
    }
    total += term;
  }
  return total;
}

Rational Polynomial::eval(std::span<const Rational> x) const {
  Rational total = 0;
  for (const auto& t : terms_) {
    Rational term = static_cast<long>(t.coeff);
    for (std::size_t i = 0; i < nvars_; ++i)
      for (unsigned k = 0; k < t.exponents[i]; ++k) term *= x[i];
    total += term;
  }
  return total;
}

std::int64_t Polynomial::eval_mod(std::span<const std::int64_t> x, std::int64_t modulus) const {
  const auto m = static_cast<std::uint64_t>(modulus);
  std::uint64_t total = 0;
  for (const auto& t : terms_) {
    std::uint64_t term = static_cast<std::uint64_t>(mod_floor(t.coeff, modulus));
    for (std::size_t i = 0; i < nvars_; ++i)
      if (t.exponents[i] > 0)
        term = mul_mod(term, pow_mod(static_cast<std::uint64_t>(mod_floor(x[i], modulus)), t.exponents[i], m), m);
    total = (total + term) % m;
  }
  return static_cast<std::int64_t>(total);
}

Polynomial Polynomial::rescaled(std::int64_t p0, int h) const {
  unsigned d = degree();
  std::vector<Monomial> out;
  for (const auto& t : terms_) {
    unsigned s = 0;
    for (auto e : t.exponents) s += e;
    std::int64_t factor = checked_pow(p0, static_cast<unsigned>(h) * (d - s));
    out.push_back(Monomial{t.exponents, checked_mul(t.coeff, factor)});
  }
  return Polynomial(nvars_, std::move(out));
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& t : terms_) {
    std::int64_t c = t.coeff;
    bool constant = std::all_of(t.exponents.begin(), t.exponents.end(), [](unsigned e) { return e == 0; });
    if (!first) out << (c < 0 ? " - " : " + ");
    else if (c < 0) out << "-";
    std::int64_t mag = c < 0 ? -c : c;
    if (constant || mag != 1) out << mag;
    bool need_star = !constant && mag != 1;
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (t.exponents[i] == 0) continue;
      if (need_star) out << "*";
      out << "x" << (i + 1);
      if (t.exponents[i] > 1) out << "^" << t.exponents[i];
      need_star = true;
    }
    first = false;
  }
  return out.str();
}

Polynomial Polynomial::parse(const std::string& text, std::size_t nvars) {
  auto bad = [&](const std::string& why) -> void {
    fail(ErrorCode::InvalidArgument, "polynomial '" + text + "': " + why);
  };
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto number = [&]() -> std::int64_t {
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (start == pos) bad("expected a number at offset " + std::to_string(start));
    try {
      return std::stoll(text.substr(start, pos - start));
    } catch (const std::out_of_range&) {
      bad("number out of range");
    }
    return 0;
  };

  // Terms as (coeff, index -> exponent) until nvars is known.
  std::vector<std::pair<std::int64_t, std::map<std::size_t, unsigned>>> raw;
  std::size_t max_index = 0;
  skip();
  if (pos == text.size()) bad("empty");
  bool first = true;
  while (true) {
    skip();
    if (pos == text.size()) break;
    std::int64_t sign = 1;
    if (text[pos] == '+' || text[pos] == '-') {
      sign = text[pos] == '-' ? -1 : 1;
      ++pos;
      skip();
    } else if (!first) {
      bad("expected + or - at offset " + std::to_string(pos));
    }
    first = false;
    std::int64_t coeff = 1;
    bool has_factor = false;
    std::map<std::size_t, unsigned> exps;
    while (true) {
      skip();
      bool numeric = false;
      if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        coeff = checked_mul(coeff, number());
        numeric = true;
      } else if (pos < text.size() && text[pos] == 'x') {
        ++pos;
        auto idx = number();
        if (idx < 1) bad("variables start at x1");
        unsigned e = 1;
        skip();
        if (pos < text.size() && text[pos] == '^') {
          ++pos;
          skip();
          e = static_cast<unsigned>(number());
        }
        exps[static_cast<std::size_t>(idx)] += e;
        max_index = std::max(max_index, static_cast<std::size_t>(idx));
      } else {
        bad("expected a number or variable at offset " + std::to_string(pos));
      }
      has_factor = true;
      skip();
      if (pos < text.size() && text[pos] == '*') {
        ++pos;
        continue;
      }
      if (numeric && pos < text.size() && text[pos] == 'x') continue;  // "2x1"
      break;
    }
    if (!has_factor) bad("empty term");
    raw.emplace_back(sign * coeff, std::move(exps));
  }
  if (nvars == 0) nvars = std::max<std::size_t>(max_index, 1);
  if (max_index > nvars) bad("uses x" + std::to_string(max_index) + " but only " + std::to_string(nvars) + " variables");
  std::vector<Monomial> terms;
  for (auto& [c, exps] : raw) {
    std::vector<unsigned> e(nvars, 0);
    for (auto [i, k] : exps) e[i - 1] = k;
    terms.push_back(Monomial{e, c});
  }
  return Polynomial(nvars, std::move(terms));
}

}  // namespace aquad
