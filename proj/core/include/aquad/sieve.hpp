#pragma once

// Combinatorial sieve over Z_S': weighted sequences indexed by positive
// integers coprime to S', exact sifting functions, multiplicative density
// tables, Mertens products, the remainder ledger and the almost-prime search.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aquad/enumerate.hpp"
#include "aquad/forms.hpp"
#include "aquad/polynomial.hpp"

namespace aquad::sieve {

using aquad::factorize;

// Ideals of Z_S' are represented by their positive generators coprime to S'.
class SieveSequence {
 public:
  explicit SieveSequence(std::vector<std::int64_t> excluded = {});

  // InvalidArgument if index is 0 or shares a prime with S'.
  void add(std::uint64_t index, std::uint64_t weight = 1);
  void add_zero(std::uint64_t weight = 1);

  const std::vector<std::int64_t>& excluded() const { return excluded_; }
  const std::map<std::uint64_t, std::uint64_t>& entries() const { return entries_; }
  std::uint64_t zero_bucket() const { return zero_; }
  // Sum of weights outside the zero bucket.
  std::uint64_t total() const { return total_; }
  bool empty() const { return entries_.empty(); }

  // Unit weights on {lo, ..., hi} (no exclusions).
  static SieveSequence range(std::uint64_t lo, std::uint64_t hi);

 private:
  std::vector<std::int64_t> excluded_;
  std::map<std::uint64_t, std::uint64_t> entries_;
  std::uint64_t zero_ = 0;
  std::uint64_t total_ = 0;
};

// |value| with every prime of S' removed; 0 stays 0.
std::uint64_t strip(i128 value, const std::vector<std::int64_t>& excluded);

// Streams points into a sequence: index of x is |f(x)| stripped of S'.
// Points with scale h > 0 use f_h(y) = p0^(h deg f) f(x), so p0 must be in S'.
class SequenceBuilder {
 public:
  SequenceBuilder(Polynomial f, std::vector<std::int64_t> excluded);
  void add(const IntegralPoint& x);
  std::uint64_t points() const { return points_; }
  SieveSequence finish() &&;

 private:
  Polynomial f_;
  std::map<int, Polynomial> rescaled_;
  SieveSequence seq_;
  std::uint64_t points_ = 0;
};

SieveSequence build_sequence(const std::vector<IntegralPoint>& points, const Polynomial& f,
                             const std::vector<std::int64_t>& excluded);

// Which primes sift. Default: every prime outside S'.
using PrimeFilter = std::function<bool(std::int64_t)>;
PrimeFilter primes_outside(const std::vector<std::int64_t>& excluded);

// Sifting primes p < z, ascending.
std::vector<std::int64_t> sifting_primes(const PrimeFilter& filter, std::int64_t z);

struct SiftResult {
  std::uint64_t sifted = 0;  // S(A, P, z)
  std::vector<std::uint64_t> survivors;
};

SiftResult sift(const SieveSequence& a, const PrimeFilter& filter, std::int64_t z);

// #A_d; NotSquarefree unless d is squarefree, InvalidArgument if gcd(d, S') > 1.
std::uint64_t subsequence_count(const SieveSequence& a, std::uint64_t d);

class DensityTable {
 public:
  // InvalidDensity naming p unless 0 <= omega(p)/p < 1.
  explicit DensityTable(std::map<std::int64_t, Rational> omega, std::string provenance = "user");
  static DensityTable constant(const Rational& omega, std::int64_t lo, std::int64_t hi);

  const std::map<std::int64_t, Rational>& values() const { return omega_; }
  const std::string& provenance() const { return provenance_; }
  bool contains(std::int64_t p) const { return omega_.count(p) != 0; }
  // MissingPrime when p is absent.
  const Rational& omega(std::int64_t p) const;
  // Multiplicative extension to squarefree d.
  Rational omega_of(std::uint64_t d) const;

 private:
  std::map<std::int64_t, Rational> omega_;
  std::string provenance_;
};

// omega(p) = p #{x in F_p^n : q = m, f = 0} / #{x : q = m}. ZeroDenominator
// when the quadric has no F_p-point.
DensityTable density_from_counts(const QuadraticForm& q, std::int64_t m, const Polynomial& f,
                                 const std::vector<std::int64_t>& primes);

// prod_{p < z, p sifting} (1 - omega(p)/p); MissingPrime if uncovered.
Rational mertens_product(const DensityTable& table, const PrimeFilter& filter, std::int64_t z);

struct DimensionCheck {
  bool holds = false;
  double kappa2 = 0;  // smallest constant valid over the whole grid
  std::int64_t worst_w1 = 0, worst_w2 = 0;
};

// Grid over table primes w1 <= a <= b <= w2 of
// prod_{a <= p <= b} (1 - omega/p)^-1 / (log b / log a)^kappa1.
DimensionCheck dimension_check(const DensityTable& table, std::int64_t w1, std::int64_t w2, double kappa1);

struct LedgerEntry {
  std::uint64_t d;
  std::uint64_t count;   // #A_d
  double expected;       // omega(d)/d X
  double deviation;      // |count - expected|
};

struct RemainderLedger {
  double total = 0;
  std::vector<LedgerEntry> entries;  // ascending d
};

// Sum over squarefree d | P(z), d <= y, of |#A_d - omega(d)/d X|.
RemainderLedger remainder_ledger(const SieveSequence& a, const DensityTable& table, const PrimeFilter& filter,
                                 double X, std::uint64_t y, std::int64_t z);

struct SieveReport {
  std::int64_t z = 0;
  std::uint64_t y = 0;
  std::uint64_t sifted = 0;
  Rational V;
  double X = 0;
  double main = 0;  // X V(z)
  RemainderLedger ledger;
  double tau_hat = 0;
  bool degenerate = false;
  std::vector<std::uint64_t> survivors;
};

SieveReport fundamental_lemma_report(const SieveSequence& a, const DensityTable& table, const PrimeFilter& filter,
                                     double X, std::uint64_t y, std::int64_t z);

struct AlmostPrimeQuery {
  Polynomial f;
  std::vector<std::int64_t> excluded;  // S'
  std::int64_t M = 0;                  // every qualifying prime must exceed M
  int r = 0;                           // at most r distinct qualifying primes
  std::uint64_t budget = 10'000'000;   // points examined
};

struct AlmostPrimeResult {
  bool found = false;
  std::optional<IntegralPoint> point;
  Integer value;                          // f(x) numerator after clearing p0 powers
  std::vector<std::uint64_t> factors;     // primes outside S', with multiplicity
  int distinct = 0;
  int multiplicity = 0;
  std::uint64_t examined = 0;
  std::uint64_t zero_values = 0;
  std::map<int, std::uint64_t> histogram;  // distinct-prime count outside S' -> points
};

// Walks points in enumeration order; N gives the integral Euclidean ball,
// otherwise the instance's S-data and region are used.
AlmostPrimeResult almost_prime_search(const QuadricInstance& inst, std::optional<std::int64_t> N,
                                      const AlmostPrimeQuery& query, unsigned threads = 1);

struct Certificate {
  bool valid = false;
  std::vector<std::uint64_t> factors;
  std::string reason;
};

// Independent re-check by exact rational evaluation and plain trial division.
Certificate verify_almost_prime(const IntegralPoint& x, const AlmostPrimeQuery& query);
// Also re-checks q(x) = m exactly and membership in the region.
Certificate verify_almost_prime(const QuadricInstance& inst, const IntegralPoint& x, const AlmostPrimeQuery& query);

}  // namespace aquad::sieve
