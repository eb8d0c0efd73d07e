#pragma once

// Integral and p0-integral points of q(x) = m in height balls.
//
// Points are produced by a scan engine that walks the first n-2 coordinates
// and solves the remaining binary equation exactly. Output is in
// lexicographic order of the (rescaled) integer coordinates regardless of
// the thread count.

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aquad/forms.hpp"

namespace aquad::enumeration {

enum class Provenance { Scan, Naive };
std::string_view to_string(Provenance p);

// x_i = numerators[i] / p0^scale. Integral points carry p0 = 1, scale = 0.
struct IntegralPoint {
  std::vector<std::int64_t> numerators;
  std::int64_t p0 = 1;
  int scale = 0;
  Provenance provenance = Provenance::Scan;

  std::size_t dim() const { return numerators.size(); }
  Rational coord(std::size_t i) const;
  std::vector<Rational> coords() const;
  bool operator==(const IntegralPoint& o) const {
    return numerators == o.numerators && p0 == o.p0 && scale == o.scale;
  }
};

double height_real(std::span<const Rational> x);
double height_real(const IntegralPoint& x);

// max_i(-v_p0(x_i)); nullopt for the zero vector. Throws
// DenominatorNotPPower if some denominator has a prime other than p0.
std::optional<int> height_padic(std::span<const Rational> x, std::int64_t p0);
std::optional<int> height_padic(const IntegralPoint& x);

// Integer search domain for q(y) = target.
struct ScanBounds {
  std::vector<std::int64_t> lower;  // inclusive, per axis
  std::vector<std::int64_t> upper;
  std::optional<std::int64_t> radius_sq;  // additionally sum y_i^2 <= radius_sq
  // Restrict to y_i == residue[i] (mod modulus) on every axis when modulus > 1.
  std::int64_t modulus = 1;
  std::vector<std::int64_t> residue;
};

// Return false to stop the scan early.
using PointSink = std::function<bool(std::span<const std::int64_t>)>;

struct ScanStats {
  std::uint64_t prefixes = 0;
  std::uint64_t points = 0;
  bool stopped_early = false;
};

struct ScanOptions {
  unsigned threads = 1;
  std::optional<std::chrono::steady_clock::time_point> deadline;  // CapExceeded when passed
};

// Calls sink on every y with q(y) = target inside bounds, in lexicographic
// order. Each emitted y is re-checked exactly before delivery.
ScanStats scan_quadric(const QuadraticForm& q, std::int64_t target, const ScanBounds& bounds, const PointSink& sink,
                       const ScanOptions& options = {});

struct EnumerateOptions {
  bool sup_norm = false;  // height ball is max|x_i| <= N instead of Euclidean
  unsigned threads = 1;
  std::optional<std::uint64_t> max_points;  // CapExceeded beyond this many points
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

using Visitor = std::function<bool(const IntegralPoint&)>;

// x in Z^n with q(x) = m and height_real(x) <= N (or max|x_i| <= N with
// sup_norm); intersected with inst.region when present.
ScanStats enumerate_integral(const QuadricInstance& inst, std::int64_t N, const Visitor& visit,
                             const EnumerateOptions& options = {});
std::vector<IntegralPoint> enumerate_integral(const QuadricInstance& inst, std::int64_t N,
                                              const EnumerateOptions& options = {});

// x in Z[1/p0]^n with q(x) = m, |x|_p0 <= p0^h and x in region, via
// y = p0^h x on q(y) = p0^(2h) m inside p0^h * region.
ScanStats enumerate_s_integral(const QuadricInstance& inst, const Visitor& visit, const EnumerateOptions& options = {});
std::vector<IntegralPoint> enumerate_s_integral(const QuadricInstance& inst, const EnumerateOptions& options = {});

// Integer box p0^h * region (outward-exact: ceil of lower, floor of upper).
ScanBounds scaled_box(const Box& region, std::int64_t p0, int h);

// Reference scan over every integer vector in the bounds, checking q exactly.
// BoxTooLarge when the candidate count exceeds cap.
inline constexpr std::uint64_t kNaiveCap = 1'000'000'000ULL;
std::vector<IntegralPoint> naive_oracle(const QuadraticForm& q, std::int64_t target, const ScanBounds& bounds,
                                        std::uint64_t cap = kNaiveCap);

// Bounds for the Euclidean or sup-norm ball of radius N.
ScanBounds ball_bounds(std::size_t n, std::int64_t N, bool sup_norm);

}  // namespace aquad::enumeration

namespace aquad {
using enumeration::IntegralPoint;
}
