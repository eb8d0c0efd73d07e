#pragma once

// Sparse integer polynomials in n variables.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aquad/numtheory.hpp"

namespace aquad {

struct Monomial {
  std::vector<unsigned> exponents;
  std::int64_t coeff = 0;
  bool operator==(const Monomial&) const = default;
};

class Polynomial {
 public:
  Polynomial() = default;
  // Like terms are merged and zero terms dropped.
  Polynomial(std::size_t nvars, std::vector<Monomial> terms);
  static Polynomial constant(std::size_t nvars, std::int64_t c);
  // sum coeffs[i] * x_i + c
  static Polynomial linear(std::span<const std::int64_t> coeffs, std::int64_t c = 0);

  std::size_t nvars() const { return nvars_; }
  const std::vector<Monomial>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  // Total degree; 0 for constants and for the zero polynomial.
  unsigned degree() const;

  // Overflow in the 128-bit path throws Error{Overflow}.
  i128 eval(std::span<const std::int64_t> x) const;
  Integer eval(std::span<const Integer> x) const;
  Rational eval(std::span<const Rational> x) const;
  // Residues in [0, modulus).
  std::int64_t eval_mod(std::span<const std::int64_t> x, std::int64_t modulus) const;

  // f_h(y) = p0^(h deg f) f(y / p0^h): integral, and f_h(p0^h x) = p0^(h deg f) f(x).
  Polynomial rescaled(std::int64_t p0, int h) const;

  std::string to_string() const;
  // Inverse of to_string: "x1^2 - 3*x2*x3 + 5". Variables are x1..x<nvars>;
  // nvars = 0 takes the largest index used (at least 1).
  static Polynomial parse(const std::string& text, std::size_t nvars = 0);

  bool operator==(const Polynomial&) const = default;

 private:
  std::size_t nvars_ = 0;
  std::vector<Monomial> terms_;
};

}  // namespace aquad
