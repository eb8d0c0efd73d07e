#pragma once

// Geometric sieve on S-integral points: points whose reduction at some prime
// in (N1, N2] lies on the codimension-two locus Z = X n (f_1 = ... = 0),
// bound-shape fits, the congruence-class rewrite for a single medium prime,
// Ekedahl-type gcd counts and the half-dimensional representability count.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aquad/enumerate.hpp"
#include "aquad/forms.hpp"
#include "aquad/modular.hpp"

namespace aquad::geomsieve {

using modular::SubvarietySpec;

struct BadPointRecord {
  IntegralPoint point;
  std::vector<std::uint64_t> witnesses;  // ascending; empty when generic_bad
  bool generic_bad = false;              // every f_i vanishes exactly
  bool verified = false;
};

struct BadPointOptions {
  unsigned threads = 1;
  bool keep_records = true;
};

struct BadPointResult {
  std::int64_t N1 = 0;
  std::optional<std::int64_t> N2;  // nullopt means infinity
  std::uint64_t points = 0;        // all points of X_h in the region
  std::uint64_t bad = 0;
  std::uint64_t generic_bad = 0;
  std::uint64_t verified = 0;      // records whose witnesses all re-checked
  std::vector<BadPointRecord> records;
};

// V(N1, N2) over the instance's S-integral points (p0, h and region
// required). Witnesses are the primes in (N1, N2] dividing gcd_i f_{i,h}(y)
// for y = p0^h x; each one is re-checked by reduction of x mod p.
// InvalidArgument unless N1 >= p0 and N2 > N1.
BadPointResult bad_point_count(const QuadricInstance& inst, const SubvarietySpec& spec, std::int64_t N1,
                               std::optional<std::int64_t> N2, const BadPointOptions& options = {});

// Reduce x mod p and test q = m and every f_i = 0 there.
bool verify_witness(const QuadricInstance& inst, const SubvarietySpec& spec, const IntegralPoint& x, std::int64_t p);

enum class ShapeTerm {
  Constant,       // 1
  InvMLogM,       // 1 / (M log M), parameter M
  InvSqrtHLogP0,  // 1 / sqrt(h log p0), parameter h
};

std::string to_string(ShapeTerm t);

struct ShapePoint {
  double parameter = 0;
  double ratio = 0;
};

struct BoundShapeFit {
  std::vector<ShapePoint> series;
  std::vector<ShapeTerm> terms;
  std::vector<double> coefficients;  // >= 0, aligned with terms
  double residual = 0;               // root mean square
  bool nonincreasing = false;        // ratios in parameter order
};

// Nonnegative least squares of ratio against the model terms. DegenerateFit
// with fewer than 4 points or when no term subset is solvable.
BoundShapeFit bound_shape_check(std::vector<ShapePoint> series, const std::vector<ShapeTerm>& terms,
                                std::int64_t p0 = 2);

struct MediumPrimeResult {
  std::int64_t p = 0;
  std::uint64_t classes = 0;  // #Z(F_p)
  std::uint64_t count = 0;
};

// Points of X_h in the region whose reduction mod p lies on Z(F_p), counted
// class by class over y = p0^h lambda (mod p). Requires p prime, p != p0 and
// p <= p0^h. CapExceeded when Z(F_p) cannot be scanned.
MediumPrimeResult medium_prime_count(const QuadricInstance& inst, const SubvarietySpec& spec, std::int64_t p,
                                     std::uint64_t cap = modular::kScanCap);

struct EkedahlResult {
  std::uint64_t total = 0;     // (2B+1)^d
  std::uint64_t count = 0;     // some prime >= M divides every value
  std::uint64_t zero_gcd = 0;  // all values vanish; included in count
};

// Y in [-B, B]^d. BoxTooLarge past the naive cap.
EkedahlResult ekedahl_count(const std::vector<Polynomial>& polys, std::int64_t B, std::int64_t M);

struct HalfdimResult {
  std::uint64_t total = 0;
  std::uint64_t count = 0;
  double fraction = 0;
  bool negative_target_only = false;  // c - sum a_i Y_i^2 < 0 for every Y
};

// #{Y in [-B, B]^d : c - sum a_i Y_i^2 = u^2 + a v^2 for some integers u, v}.
HalfdimResult halfdim_count(std::int64_t a, const std::vector<std::int64_t>& tail, std::int64_t c, std::int64_t B);

// Single-value test: t = u^2 + a v^2 solvable (t < 0 never is).
bool represented_by_binary(std::int64_t a, std::int64_t t);

}  // namespace aquad::geomsieve
