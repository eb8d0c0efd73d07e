#pragma once

// Local densities, archimedean density over a region, p0-adic height-ball
// volumes and the assembled Hardy-Littlewood main term.

#include <cstdint>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "aquad/forms.hpp"
#include "aquad/modular.hpp"

namespace aquad::density {

struct LocalDensity {
  std::int64_t p = 0;
  Rational value;  // count(k) / p^(k(n-1)) at k = k_used
  int k_used = 0;
  bool stabilized = false;
};

// Counts at k0+1 and k0+2, k0 = 2 v_p(2 det m) + 1, must agree exactly;
// otherwise NotStabilized.
LocalDensity local_density(const QuadraticForm& q, std::int64_t m, std::int64_t p,
                           const modular::PrimePowerOptions& options = {});

// Measure of {x in X(Q_p0) : |x|_p0 <= p0^h} = p0^(h(n-2)) sigma_p0(q, p0^(2h) m).
Rational padic_ball_volume(const QuadraticForm& q, std::int64_t m, std::int64_t p0, int h,
                           const modular::PrimePowerOptions& options = {});

struct Ball {
  double radius;
};
using RealRegion = std::variant<Box, Ball>;

struct RealDensityOptions {
  int base_cells = 16;                      // cells per axis on the coarsest grid
  int max_levels = 12;                      // dyadic refinements after the coarsest grid
  std::uint64_t max_cells = 1ULL << 21;     // per chart on the finest grid
};

struct RealDensity {
  double value = 0;
  double error = 0;   // |I(finest) - I(previous)|
  int cells_per_axis = 0;
  std::vector<double> history;  // one estimate per level, coarse to fine
};

// Gauge-form measure of {q = m} inside the region, by chartwise midpoint
// quadrature. ChartDegenerate if m = 0 and the region contains the origin.
RealDensity real_density(const QuadraticForm& q, std::int64_t m, const RealRegion& region,
                         const RealDensityOptions& options = {});

struct HLOptions {
  std::int64_t p_cut = 997;
  RealDensityOptions quadrature;
  modular::PrimePowerOptions counting;
  // Replacement p-adic factors (a congruence-class measure in place of sigma_p).
  std::map<std::int64_t, Rational> factor_overrides;
};

struct HLPrediction {
  RealDensity sigma_inf;
  std::optional<Rational> padic_volume;  // set when S-data is present
  std::vector<LocalDensity> factors;      // p <= p_cut, p != p0
  double finite_product = 1;
  std::int64_t p_cut = 0;
  double envelope_constant = 0;  // C in |sigma_p - 1| <= C/p^2, fitted on good primes
  double tail_log_bound = 0;     // |log(tail)| <= 2C/p_cut
  double total = 0;
};

// Requires n >= 4 and global solvability. With S-data, the p0 factor is the
// ball volume at exponent h; without, every prime up to p_cut contributes.
HLPrediction hl_prediction(const QuadraticForm& q, std::int64_t m, const RealRegion& region,
                           std::optional<SData> s_data, const HLOptions& options = {});

// Factors and envelope for p <= p_cut, p != skip; reusable across regions and h.
struct FiniteProduct {
  std::vector<LocalDensity> factors;
  double product = 1;
  double envelope_constant = 0;
};
FiniteProduct finite_product(const QuadraticForm& q, std::int64_t m, std::int64_t p_cut, std::int64_t skip,
                             const HLOptions& options = {});

// Combines precomputed pieces into a prediction.
HLPrediction assemble_prediction(const RealDensity& sigma_inf, std::optional<Rational> padic_volume,
                                 const FiniteProduct& product, std::int64_t p_cut);

// Rejects n < 4 and insoluble instances.
void require_prediction_domain(const QuadraticForm& q, std::int64_t m);

struct ExponentFit {
  double slope = 0;
  double intercept = 0;
  double residual = 0;  // root-mean-square of the log residuals
};

// Least squares of log(volume) against h log(p0). DegenerateFit with fewer
// than 3 points, a nonpositive volume or a single distinct h.
ExponentFit volume_exponent_fit(const std::vector<std::pair<int, double>>& series, std::int64_t p0);

}  // namespace aquad::density
