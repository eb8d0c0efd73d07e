#pragma once

// Reductions mod p^k and exact point counts of q = m over F_p and Z/p^k,
// including the codimension-two locus cut out by extra polynomials.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aquad/enumerate.hpp"
#include "aquad/forms.hpp"
#include "aquad/polynomial.hpp"

namespace aquad::modular {

inline constexpr std::uint64_t kScanCap = 100'000'000ULL;
// Largest modulus p^k handled by class convolution for diagonal forms.
inline constexpr std::int64_t kConvolutionCap = std::int64_t{1} << 16;

struct ResiduePoint {
  std::int64_t modulus = 1;
  std::vector<std::int64_t> coords;  // in [0, modulus)
  std::optional<bool> on_quadric;    // set when checked against (q, m)
  bool operator==(const ResiduePoint& o) const { return modulus == o.modulus && coords == o.coords; }
};

// Throws DenominatorDivisibleByP when p divides a coordinate denominator.
ResiduePoint reduce_point(const IntegralPoint& x, std::int64_t p, int k);
// Same, and tags on_quadric by testing q(r) == m mod p^k.
ResiduePoint reduce_point(const IntegralPoint& x, std::int64_t p, int k, const QuadraticForm& q, std::int64_t m);

// Extra equations f_1 = ... = f_r = 0 on the quadric. Construction rejects
// zero polynomials and pairs that are scalar multiples of each other; true
// coprimality over Q is the caller's responsibility.
class SubvarietySpec {
 public:
  explicit SubvarietySpec(std::vector<Polynomial> polys);
  const std::vector<Polynomial>& polys() const { return polys_; }
  std::size_t nvars() const { return polys_.front().nvars(); }
  bool vanishes_mod(std::span<const std::int64_t> x, std::int64_t modulus) const;
  // Human-readable notes about checks that were not performed.
  std::vector<std::string> advisories() const;

 private:
  std::vector<Polynomial> polys_;
};

// hist[t] = #{x in F_p^n : q(x) = t}, by full scan. CapExceeded if p^n > cap.
std::vector<std::uint64_t> value_histogram_ffield(const QuadraticForm& q, std::int64_t p, std::uint64_t cap = kScanCap);

std::uint64_t count_quadric_ffield_brute(const QuadraticForm& q, std::int64_t m, std::int64_t p,
                                         std::uint64_t cap = kScanCap);

// Closed form via quadratic characters; BadPrime if p = 2 or p | det(q).
Integer count_quadric_ffield_exact(const QuadraticForm& q, std::int64_t m, std::int64_t p);

std::uint64_t count_subvariety_ffield(const SubvarietySpec& spec, const QuadraticForm& q, std::int64_t m,
                                      std::int64_t p, std::uint64_t cap = kScanCap);

// All x in F_p^n on q = m and the subvariety, lexicographic.
std::vector<std::vector<std::int64_t>> subvariety_points_ffield(const SubvarietySpec& spec, const QuadraticForm& q,
                                                                std::int64_t m, std::int64_t p,
                                                                std::uint64_t cap = kScanCap);

struct PrimePowerOptions {
  std::uint64_t scan_cap = kScanCap;
  std::int64_t convolution_cap = kConvolutionCap;
};

// #{x in (Z/p^k)^n : q(x) = m mod p^k}. Diagonal forms with p^k within the
// convolution cap are counted exactly by value-class convolution, otherwise
// by full scan, otherwise by the primitive/imprimitive lifting recursion
// whose stabilization is checked by direct counts (NotStabilized if the
// check fails, CapExceeded if no direct count is feasible).
Integer count_prime_power(const QuadraticForm& q, std::int64_t m, std::int64_t p, int k,
                          const PrimePowerOptions& options = {});

// Full scan of (Z/p^k)^n; CapExceeded if p^(kn) > cap.
Integer count_prime_power_scan(const QuadraticForm& q, std::int64_t m, std::int64_t p, int k,
                               std::uint64_t cap = kScanCap);

// Value distribution of a diagonal form mod p^k, indexed by residue.
std::vector<u128> diagonal_value_distribution(std::span<const std::int64_t> coefficients, std::int64_t p, int k);

}  // namespace aquad::modular
