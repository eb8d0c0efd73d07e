#pragma once

// Point counts inside congruence neighbourhoods against the Tamagawa main
// term, and the measured discrepancy exponent.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aquad/density.hpp"
#include "aquad/enumerate.hpp"
#include "aquad/modular.hpp"

namespace aquad::equidist {

// Points x with x == xi (mod l), l coprime to p0. The residue is stored
// mod l; each prime-power component is its reduction.
class CongruenceNeighborhood {
 public:
  // Validates q(xi) == m mod l and gcd(l, p0) = 1 (pass p0 = 1 if unused).
  CongruenceNeighborhood(const QuadraticForm& q, std::int64_t m, std::int64_t modulus,
                         std::vector<std::int64_t> residue, std::int64_t p0 = 1);
  static CongruenceNeighborhood trivial(std::size_t n);

  std::int64_t modulus() const { return modulus_; }
  const std::vector<std::int64_t>& residue() const { return residue_; }
  // (p, e) with p^e || l, ascending.
  const std::vector<std::pair<std::int64_t, int>>& factors() const { return factors_; }
  modular::ResiduePoint component(std::int64_t p) const;
  bool contains(const IntegralPoint& x) const;
  std::string to_string() const;

 private:
  CongruenceNeighborhood() = default;
  std::int64_t modulus_ = 1;
  std::vector<std::int64_t> residue_;
  std::vector<std::pair<std::int64_t, int>> factors_;
};

// Height data: the Euclidean integral ball of radius N, or (when N is
// absent) the instance's p0-adic ball B_p0(h) inside its region.
struct Heights {
  std::optional<std::int64_t> N;
  std::string to_string() const;
};

// Counts points in the neighbourhood by scanning only the matching
// residue class of the rescaled coordinates.
std::uint64_t count_in_neighborhood(const QuadricInstance& inst, const Heights& heights,
                                    const CongruenceNeighborhood& nbhd,
                                    const enumeration::EnumerateOptions& options = {});

// Counts of every residue class mod l met by the points, one enumeration.
std::map<std::vector<std::int64_t>, std::uint64_t> class_counts(const QuadricInstance& inst, const Heights& heights,
                                                                std::int64_t modulus,
                                                                const enumeration::EnumerateOptions& options = {});

// All xi mod l with q(xi) == m, optionally only those whose gradient is a
// unit at every p | l.
std::vector<std::vector<std::int64_t>> residues_on_quadric(const QuadraticForm& q, std::int64_t m,
                                                           std::int64_t modulus, bool smooth_only,
                                                           std::uint64_t cap = modular::kScanCap);

// p-adic measure of {x in X(Z_p) : x == xi mod p^e}, from lifting counts at
// k* = max(2t+1, e+t) and k*+1 (t = gradient valuation, capped at e), which
// must agree exactly.
Rational class_measure(const QuadraticForm& q, std::int64_t m, const modular::ResiduePoint& xi, std::int64_t p,
                       std::uint64_t cap = modular::kScanCap);

// Pieces of the main term that do not depend on the neighbourhood.
struct MainTermContext {
  QuadraticForm form;
  std::int64_t m;
  density::RealDensity sigma_inf;
  std::optional<Rational> padic_volume;
  density::FiniteProduct product;
  std::int64_t p_cut;
  std::int64_t p0;  // 0 in real-ball mode
};

MainTermContext prepare_main_term(const QuadricInstance& inst, const Heights& heights,
                                  const density::HLOptions& options = {});
double main_term(const MainTermContext& context, const CongruenceNeighborhood& nbhd);
double main_term(const QuadricInstance& inst, const Heights& heights, const CongruenceNeighborhood& nbhd,
                 const density::HLOptions& options = {});

struct DiscrepancyRecord {
  std::string height;  // "N=64" or "h=3"
  double parameter = 0;
  std::uint64_t count = 0;
  double main = 0;
  double abs_err = 0;
  double rel_err = 0;
  std::int64_t modulus = 1;
};

struct DiscrepancyFit {
  double slope = 0;       // of log|count - main| against log(main)
  double delta_hat = 0;   // 1 - slope
  double r_squared = 0;
  std::size_t points_used = 0;
  bool low_confidence = false;
};

// DegenerateFit with fewer than 2 records of nonzero error or equal mains.
DiscrepancyFit fit_discrepancy(const std::vector<DiscrepancyRecord>& records);

struct DiscrepancySeries {
  std::vector<DiscrepancyRecord> records;
  DiscrepancyFit fit;
};

// The instance supplies the region and p0 when the schedule is p-adic; each
// schedule entry is either an N or (N absent) an h overriding inst.s_data.
struct ScheduleEntry {
  std::optional<std::int64_t> N;
  int h = 0;
};

DiscrepancySeries discrepancy_series(const QuadricInstance& inst, const CongruenceNeighborhood& nbhd,
                                     const std::vector<ScheduleEntry>& schedule,
                                     const density::HLOptions& hl_options = {},
                                     const enumeration::EnumerateOptions& options = {});

}  // namespace aquad::equidist
