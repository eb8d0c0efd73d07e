#pragma once

// Exact quadratic-form algebra over Q: Gram data, rational diagonalization and
// the local invariants deciding isotropy and representability at each place.
//
// Gram convention: q(x) = x^T G x with G integral and symmetric, so G_ii is
// the coefficient of x_i^2 and 2*G_ij the coefficient of x_i*x_j. A form with
// an odd cross coefficient (such as xy) has no integral Gram matrix; model it
// by 2q instead, which has the same isotropy and the same solution sets up to
// doubling the target.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aquad/numtheory.hpp"

namespace aquad::forms {

struct RationalMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Rational> data;  // row-major

  static RationalMatrix identity(std::size_t n);
  Rational& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  const Rational& at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  RationalMatrix transpose() const;
  RationalMatrix operator*(const RationalMatrix& rhs) const;
  bool operator==(const RationalMatrix&) const = default;
  Rational determinant() const;
};

struct DiagonalModel {
  std::vector<Rational> diagonal;  // a_1..a_n, all nonzero
  RationalMatrix basis;            // T with T^T G T = diag(a)
};

class QuadraticForm {
 public:
  // gram is row-major n x n; must be symmetric with nonzero determinant.
  QuadraticForm(std::size_t n, std::vector<std::int64_t> gram);
  static QuadraticForm diagonal(std::span<const std::int64_t> coefficients);

  std::size_t dim() const { return n_; }
  std::int64_t entry(std::size_t i, std::size_t j) const { return gram_[i * n_ + j]; }
  const std::vector<std::int64_t>& gram() const { return gram_; }
  const Integer& det() const { return det_; }
  const DiagonalModel& diagonal_model() const { return model_; }
  bool is_diagonal() const { return diagonal_; }
  // Diagonal coefficients when is_diagonal().
  std::vector<std::int64_t> diagonal_coefficients() const;

  Integer eval(std::span<const Integer> x) const;
  Rational eval(std::span<const Rational> x) const;
  // Exact in 128-bit arithmetic; throws Overflow if the value leaves int64.
  std::int64_t eval(std::span<const std::int64_t> x) const;
  // q(x) mod modulus for residues in [0, modulus).
  std::int64_t eval_mod(std::span<const std::int64_t> x, std::int64_t modulus) const;

  // Literal syntax: diagonal shorthand "1,1,1,-1" or JSON row-major matrix
  // "[[1,1,0],[1,3,0],[0,0,1]]".
  static QuadraticForm parse(const std::string& text);
  std::string to_string() const;

  bool operator==(const QuadraticForm& other) const { return n_ == other.n_ && gram_ == other.gram_; }

 private:
  std::size_t n_;
  std::vector<std::int64_t> gram_;
  Integer det_;
  bool diagonal_;
  DiagonalModel model_;
};

// Symmetric elimination over Q. Postcondition: T^T G T = diag exactly and
// det(T) != 0.
DiagonalModel diagonalize(const QuadraticForm& q);

class Place {
 public:
  static Place real() { return Place(0); }
  static Place prime(std::int64_t p);

  bool is_real() const { return p_ == 0; }
  std::int64_t prime() const { return p_; }
  std::string to_string() const;
  bool operator==(const Place&) const = default;

 private:
  explicit Place(std::int64_t p) : p_(p) {}
  std::int64_t p_;
};

// Axis-aligned box with rational corners, lower < upper on every axis.
struct Box {
  std::vector<Rational> lower;
  std::vector<Rational> upper;

  std::size_t dim() const { return lower.size(); }
  bool contains(std::span<const Rational> x) const;
  // "-2:2,-1.5:1.5,...". A single interval is broadcast to `dim` axes when dim > 0.
  static Box parse(const std::string& text, std::size_t dim = 0);
  static Box cube(std::size_t dim, const Rational& half_width);
  std::string to_string() const;
};

struct SData {
  std::int64_t p0;
  int h;
};

struct QuadricInstance {
  QuadricInstance(QuadraticForm form, std::int64_t m, std::optional<SData> s_data = std::nullopt,
                  std::optional<Box> region = std::nullopt);

  QuadraticForm form;
  std::int64_t m;
  std::optional<SData> s_data;
  std::optional<Box> region;

  std::size_t dim() const { return form.dim(); }
};

// Hilbert symbol (a,b)_v in {+1,-1}; a, b nonzero.
int hilbert_symbol(const Rational& a, const Rational& b, Place v);

// Product of (a_i, a_j)_v over i < j of the diagonal model.
int hasse_invariant(const QuadraticForm& q, Place v);
int hasse_invariant(std::span<const Rational> diagonal, Place v);

bool is_isotropic_local(const QuadraticForm& q, Place v);
bool is_isotropic_local(std::span<const Rational> diagonal, Place v);

// Whether q(x) = m has a solution over Q_v (m != 0).
bool represents_local(const QuadraticForm& q, std::int64_t m, Place v);

// Hasse-Minkowski: local solvability at R and at every p | 2*m*det(q).
bool represents_global(const QuadraticForm& q, std::int64_t m);

// Primes dividing 2*m*det(q): the finite places checked by represents_global.
std::vector<std::int64_t> critical_primes(const QuadraticForm& q, std::int64_t m);

// Whether a nonzero rational is a square in Q_v.
bool is_local_square(const Rational& a, Place v);

}  // namespace aquad::forms

namespace aquad {
using forms::Box;
using forms::Place;
using forms::QuadraticForm;
using forms::QuadricInstance;
using forms::SData;
}  // namespace aquad
