#include "aquad/enumerate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "aquad/error.hpp"

namespace aquad::enumeration {

std::string_view to_string(Provenance p) { return p == Provenance::Scan ? "scan" : "naive"; }

Rational IntegralPoint::coord(std::size_t i) const {
  Rational value(Integer(static_cast<long>(numerators[i])), Integer(1));
  if (scale > 0) {
    Integer den;
    mpz_ui_pow_ui(den.get_mpz_t(), static_cast<unsigned long>(p0), static_cast<unsigned long>(scale));
    value /= den;
  }
  value.canonicalize();
  return value;
}

std::vector<Rational> IntegralPoint::coords() const {
  std::vector<Rational> out;
  out.reserve(dim());
  for (std::size_t i = 0; i < dim(); ++i) out.push_back(coord(i));
  return out;
}

double height_real(std::span<const Rational> x) {
  double sum = 0;
  for (const auto& c : x) {
    double v = c.get_d();
    sum += v * v;
  }
  return std::sqrt(sum);
}

double height_real(const IntegralPoint& x) {
  double sum = 0;
  for (auto v : x.numerators) sum += static_cast<double>(v) * static_cast<double>(v);
  return std::sqrt(sum) / std::pow(static_cast<double>(x.p0), x.scale);
}

std::optional<int> height_padic(std::span<const Rational> x, std::int64_t p0) {
  require(p0 >= 2 && is_prime(static_cast<std::uint64_t>(p0)), ErrorCode::InvalidArgument, "p0 must be prime");
  std::optional<int> best;
  for (const auto& c : x) {
    Integer den = c.get_den();
    int e = valuation(den, p0);
    Integer rest = den;
    for (int i = 0; i < e; ++i) rest /= p0;
    if (rest != 1)
      fail(ErrorCode::DenominatorNotPPower, "denominator " + den.get_str() + " is not a power of " + std::to_string(p0));
    if (c == 0) continue;
    int exponent = e > 0 ? e : -valuation(Integer(c.get_num()), p0);
    if (!best || exponent > *best) best = exponent;
  }
  return best;
}

std::optional<int> height_padic(const IntegralPoint& x) {
  require(x.p0 >= 2, ErrorCode::InvalidArgument, "point carries no p0; use the (coords, p0) overload");
  auto coords = x.coords();
  return height_padic(coords, x.p0);
}

namespace {

// Smallest-prime-factor table shared by every divisor-path scan.
const std::vector<std::uint32_t>& spf_table() {
  static const std::vector<std::uint32_t> table = [] {
    constexpr std::uint32_t limit = 1u << 22;
    std::vector<std::uint32_t> spf(limit, 0);
    for (std::uint32_t i = 2; i < limit; ++i) {
      if (spf[i] != 0) continue;
      for (std::uint64_t j = i; j < limit; j += i)
        if (spf[j] == 0) spf[j] = i;
    }
    return spf;
  }();
  return table;
}

void positive_divisors(std::uint64_t value, std::vector<std::int64_t>& out) {
  out.clear();
  out.push_back(1);
  auto add_prime = [&](std::uint64_t p, int e) {
    std::size_t base = out.size();
    std::int64_t pk = 1;
    for (int k = 1; k <= e; ++k) {
      pk *= static_cast<std::int64_t>(p);
      for (std::size_t i = 0; i < base; ++i) out.push_back(out[i] * pk);
    }
  };
  const auto& spf = spf_table();
  if (value < spf.size()) {
    while (value > 1) {
      std::uint64_t p = spf[value];
      int e = 0;
      while (value % p == 0) {
        value /= p;
        ++e;
      }
      add_prime(p, e);
    }
    return;
  }
  auto factors = factorize(value);
  for (std::size_t i = 0; i < factors.size();) {
    std::size_t j = i;
    while (j < factors.size() && factors[j] == factors[i]) ++j;
    add_prime(factors[i], static_cast<int>(j - i));
    i = j;
  }
}

std::int64_t first_in_class(std::int64_t lo, std::int64_t modulus, std::int64_t residue) {
  return lo + mod_floor(residue - lo, modulus);
}

class Engine {
 public:
  Engine(const QuadraticForm& q, std::int64_t target, const ScanBounds& b)
      : q_(q), n_(q.dim()), target_(target), b_(b) {
    require(b.lower.size() == n_ && b.upper.size() == n_, ErrorCode::InvalidArgument, "scan bounds dimension mismatch");
    require(b.modulus >= 1, ErrorCode::InvalidArgument, "modulus must be positive");
    if (b.modulus > 1) require(b.residue.size() == n_, ErrorCode::InvalidArgument, "residue dimension mismatch");
    if (n_ >= 2) {
      iu_ = n_ - 2;
      iv_ = n_ - 1;
      A_ = q.entry(iu_, iu_);
      B_ = q.entry(iu_, iv_);
      C_ = q.entry(iv_, iv_);
      bool decoupled = true;
      for (std::size_t i = 0; i < iu_; ++i)
        if (q.entry(iu_, i) != 0 || q.entry(iv_, i) != 0) decoupled = false;
      decoupled_ = decoupled && B_ == 0;
      divisor_path_ = decoupled_ && A_ == -C_;
      definite_tail_ = decoupled_ && ((A_ > 0 && C_ > 0) || (A_ < 0 && C_ < 0));
    }
  }

  std::size_t dim() const { return n_; }

  // Scans prefixes whose leading coordinate lies in [lead_lo, lead_hi];
  // only meaningful for n >= 3. Emission stops when emit returns false.
  template <class Emit>
  bool scan_leading(std::int64_t lead_lo, std::int64_t lead_hi, Emit&& emit, ScanStats& stats) {
    std::vector<std::int64_t> x(n_, 0);
    std::vector<i128> lin(n_, 0);
    return recurse(0, lead_lo, lead_hi, 0, 0, lin, x, emit, stats);
  }

  template <class Emit>
  bool scan_all(Emit&& emit, ScanStats& stats) {
    std::vector<std::int64_t> x(n_, 0);
    if (n_ == 1) return scan_unary(x, emit, stats);
    if (n_ == 2) {
      std::vector<i128> lin(n_, 0);
      ++stats.prefixes;
      return solve_tail(0, 0, lin, x, emit, stats);
    }
    return scan_leading(b_.lower[0], b_.upper[0], emit, stats);
  }

  std::int64_t radius_bound(std::int64_t used) const {
    if (!b_.radius_sq) return -1;
    std::int64_t rem = *b_.radius_sq - used;
    return rem < 0 ? -2 : isqrt(rem);
  }

 private:
  template <class Emit>
  bool scan_unary(std::vector<std::int64_t>& x, Emit& emit, ScanStats& stats) {
    std::int64_t a = q_.entry(0, 0);
    ++stats.prefixes;
    if (target_ % a != 0) return true;
    std::int64_t root = 0;
    if (!is_square(target_ / a, &root)) return true;
    std::vector<std::int64_t> candidates = root == 0 ? std::vector<std::int64_t>{0} : std::vector<std::int64_t>{-root, root};
    for (auto c : candidates) {
      x[0] = c;
      if (!admissible(0, c)) continue;
      if (b_.radius_sq && c * c > *b_.radius_sq) continue;
      if (!emit(std::span<const std::int64_t>(x))) return false;
    }
    return true;
  }

  bool admissible(std::size_t i, std::int64_t v) const {
    if (v < b_.lower[i] || v > b_.upper[i]) return false;
    return b_.modulus == 1 || mod_floor(v - b_.residue[i], b_.modulus) == 0;
  }

  template <class Emit>
  bool recurse(std::size_t depth, std::int64_t lo, std::int64_t hi, i128 val, std::int64_t sumsq,
               const std::vector<i128>& lin, std::vector<std::int64_t>& x, Emit& emit, ScanStats& stats) {
    if (depth == iu_) {
      ++stats.prefixes;
      return solve_tail(val, sumsq, lin, x, emit, stats);
    }
    std::int64_t r = radius_bound(sumsq);
    if (r == -2) return true;
    if (r >= 0) {
      lo = std::max(lo, -r);
      hi = std::min(hi, r);
    }
    if (b_.modulus > 1) lo = first_in_class(lo, b_.modulus, b_.residue[depth]);
    std::vector<i128> next(lin.size());
    const std::int64_t g = q_.entry(depth, depth);
    for (std::int64_t v = lo; v <= hi; v += b_.modulus) {
      x[depth] = v;
      i128 nval = val + static_cast<i128>(g) * v * v + 2 * static_cast<i128>(v) * lin[depth];
      for (std::size_t j = depth + 1; j < n_; ++j) next[j] = lin[j] + static_cast<i128>(q_.entry(j, depth)) * v;
      std::size_t d1 = depth + 1;
      if (!recurse(d1, b_.lower[d1], b_.upper[d1], nval, sumsq + v * v, next, x, emit, stats)) return false;
    }
    return true;
  }

  template <class Emit>
  bool solve_tail(i128 val, std::int64_t sumsq, const std::vector<i128>& lin, std::vector<std::int64_t>& x, Emit& emit,
                  ScanStats& stats) {
    (void)stats;
    i128 t = static_cast<i128>(target_) - val;
    std::int64_t rem = -1;
    if (b_.radius_sq) {
      rem = *b_.radius_sq - sumsq;
      if (rem < 0) return true;
    }
    std::int64_t vlo = b_.lower[iv_], vhi = b_.upper[iv_];
    if (rem >= 0) {
      std::int64_t r = isqrt(rem);
      vlo = std::max(vlo, -r);
      vhi = std::min(vhi, r);
    }
    if (vlo > vhi) return true;
    pairs_.clear();
    auto accept = [&](i128 u, i128 v) {
      if (u < b_.lower[iu_] || u > b_.upper[iu_]) return;
      if (v < vlo || v > vhi) return;
      if (rem >= 0 && u * u + v * v > rem) return;
      if (b_.modulus > 1) {
        if (mod_floor(static_cast<std::int64_t>(u) - b_.residue[iu_], b_.modulus) != 0) return;
        if (mod_floor(static_cast<std::int64_t>(v) - b_.residue[iv_], b_.modulus) != 0) return;
      }
      pairs_.emplace_back(static_cast<std::int64_t>(u), static_cast<std::int64_t>(v));
    };
    if (divisor_path_) {
      divisor_tail(t, vlo, vhi, accept);
    } else {
      general_tail(t, lin, vlo, vhi, accept);
    }
    if (pairs_.empty()) return true;
    std::sort(pairs_.begin(), pairs_.end());
    for (auto [u, v] : pairs_) {
      x[iu_] = u;
      x[iv_] = v;
      if (!emit(std::span<const std::int64_t>(x))) return false;
    }
    return true;
  }

  // A (u^2 - v^2) = t.
  template <class Accept>
  void divisor_tail(i128 t, std::int64_t vlo, std::int64_t vhi, Accept& accept) {
    if (t % A_ != 0) return;
    i128 s = t / A_;
    if (s == 0) {
      for (std::int64_t v = vlo; v <= vhi; ++v) {
        accept(v, v);
        if (v != 0) accept(-static_cast<i128>(v), v);
      }
      return;
    }
    u128 mag = s < 0 ? static_cast<u128>(-s) : static_cast<u128>(s);
    if (mag > static_cast<u128>(std::numeric_limits<std::int64_t>::max())) return;
    positive_divisors(static_cast<std::uint64_t>(mag), divisors_);
    for (auto d : divisors_) {
      for (int sign : {1, -1}) {
        i128 a = static_cast<i128>(sign) * d;  // u - v
        i128 b = s / a;                         // u + v
        if (((a ^ b) & 1) != 0) continue;
        accept((a + b) / 2, (b - a) / 2);
      }
    }
  }

  template <class Accept>
  void general_tail(i128 t, const std::vector<i128>& lin, std::int64_t vlo, std::int64_t vhi, Accept& accept) {
    const i128 Lu = lin[iu_], Lv = lin[iv_];
    if (definite_tail_) {
      // A u^2 + C v^2 = t with A, C of one sign.
      if ((C_ > 0 && t < 0) || (C_ < 0 && t > 0)) return;
      std::int64_t r = static_cast<std::int64_t>(isqrt_u128(static_cast<u128>(t / C_)));
      vlo = std::max(vlo, -r);
      vhi = std::min(vhi, r);
    }
    for (std::int64_t v = vlo; v <= vhi; ++v) {
      i128 bq = static_cast<i128>(B_) * v + Lu;
      i128 c0 = static_cast<i128>(C_) * v * v + 2 * Lv * v - t;
      if (A_ != 0) {
        i128 disc = bq * bq - static_cast<i128>(A_) * c0;
        if (disc < 0) continue;
        i128 root = static_cast<i128>(isqrt_u128(static_cast<u128>(disc)));
        if (root * root != disc) continue;
        i128 n1 = -bq + root;
        if (n1 % A_ == 0) accept(n1 / A_, v);
        if (root != 0) {
          i128 n2 = -bq - root;
          if (n2 % A_ == 0) accept(n2 / A_, v);
        }
      } else if (bq != 0) {
        if (c0 % (2 * bq) == 0) accept(-c0 / (2 * bq), v);
      } else if (c0 == 0) {
        for (std::int64_t u = b_.lower[iu_]; u <= b_.upper[iu_]; ++u) accept(u, v);
      }
    }
  }

  const QuadraticForm& q_;
  std::size_t n_;
  std::int64_t target_;
  const ScanBounds& b_;
  std::size_t iu_ = 0, iv_ = 0;
  std::int64_t A_ = 0, B_ = 0, C_ = 0;
  bool decoupled_ = false;
  bool divisor_path_ = false;
  bool definite_tail_ = false;
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs_;
  std::vector<std::int64_t> divisors_;
};

void check_deadline(const std::optional<std::chrono::steady_clock::time_point>& deadline) {
  if (deadline && std::chrono::steady_clock::now() > *deadline)
    fail(ErrorCode::CapExceeded, "time cap exceeded during enumeration");
}

i128 exact_value(const QuadraticForm& q, std::span<const std::int64_t> y) {
  i128 total = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    i128 row = 0;
    for (std::size_t j = 0; j < y.size(); ++j) row += static_cast<i128>(q.entry(i, j)) * y[j];
    total += row * y[i];
  }
  return total;
}

}  // namespace

ScanStats scan_quadric(const QuadraticForm& q, std::int64_t target, const ScanBounds& bounds, const PointSink& sink,
                       const ScanOptions& options) {
  Engine engine(q, target, bounds);
  ScanStats stats;
  for (std::size_t i = 0; i < q.dim(); ++i)
    if (bounds.lower[i] > bounds.upper[i]) return stats;
  auto checked_emit = [&](std::span<const std::int64_t> y) {
    if (exact_value(q, y) != target)
      fail(ErrorCode::InvariantViolation, "scan produced a point off the quadric");
    ++stats.points;
    if (!sink(y)) {
      stats.stopped_early = true;
      return false;
    }
    return true;
  };

  std::size_t n = q.dim();
  if (n <= 2) {
    check_deadline(options.deadline);
    engine.scan_all(checked_emit, stats);
    return stats;
  }

  // Leading coordinate values, split into slabs.
  std::int64_t lo = bounds.lower[0], hi = bounds.upper[0];
  std::int64_t r = engine.radius_bound(0);
  if (r >= 0) {
    lo = std::max(lo, -r);
    hi = std::min(hi, r);
  }
  if (bounds.modulus > 1) lo = first_in_class(lo, bounds.modulus, bounds.residue[0]);
  const std::int64_t step = bounds.modulus;
  std::vector<std::int64_t> leads;
  for (std::int64_t v = lo; v <= hi; v += step) leads.push_back(v);

  unsigned threads = std::max(1u, options.threads);
  if (threads == 1 || leads.size() < 2) {
    for (auto v : leads) {
      check_deadline(options.deadline);
      if (!engine.scan_leading(v, v, checked_emit, stats)) break;
    }
    return stats;
  }

  // Ordered waves: each worker fills a buffer for one leading value; buffers
  // are flushed in leading-value order.
  std::size_t next = 0;
  while (next < leads.size()) {
    check_deadline(options.deadline);
    std::size_t wave = std::min<std::size_t>(threads * 4, leads.size() - next);
    std::vector<std::vector<std::int64_t>> buffers(wave);
    std::vector<ScanStats> wave_stats(wave);
    std::vector<std::thread> pool;
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    for (unsigned t = 0; t < std::min<std::size_t>(threads, wave); ++t) {
      pool.emplace_back([&] {
        Engine local(q, target, bounds);
        while (true) {
          std::size_t i = cursor.fetch_add(1);
          if (i >= wave) break;
          try {
            auto& buf = buffers[i];
            local.scan_leading(leads[next + i], leads[next + i],
                               [&](std::span<const std::int64_t> y) {
                                 buf.insert(buf.end(), y.begin(), y.end());
                                 return true;
                               },
                               wave_stats[i]);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    for (std::size_t i = 0; i < wave; ++i) {
      stats.prefixes += wave_stats[i].prefixes;
      const auto& buf = buffers[i];
      for (std::size_t off = 0; off < buf.size(); off += n)
        if (!checked_emit(std::span<const std::int64_t>(buf.data() + off, n))) return stats;
    }
    next += wave;
  }
  return stats;
}

ScanBounds ball_bounds(std::size_t n, std::int64_t N, bool sup_norm) {
  require(N >= 0, ErrorCode::InvalidArgument, "height bound must be nonnegative");
  ScanBounds b;
  b.lower.assign(n, -N);
  b.upper.assign(n, N);
  if (!sup_norm) b.radius_sq = checked_mul(N, N);
  return b;
}

ScanBounds scaled_box(const Box& region, std::int64_t p0, int h) {
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), static_cast<unsigned long>(p0), static_cast<unsigned long>(h));
  ScanBounds b;
  for (std::size_t i = 0; i < region.dim(); ++i) {
    Rational lo = region.lower[i] * scale, hi = region.upper[i] * scale;
    Integer lo_int, hi_int;
    mpz_cdiv_q(lo_int.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
    mpz_fdiv_q(hi_int.get_mpz_t(), hi.get_num_mpz_t(), hi.get_den_mpz_t());
    b.lower.push_back(narrow(lo_int));
    b.upper.push_back(narrow(hi_int));
  }
  return b;
}

namespace {

void intersect_region(ScanBounds& b, const Box& region) {
  ScanBounds r = scaled_box(region, 2, 0);
  for (std::size_t i = 0; i < b.lower.size(); ++i) {
    b.lower[i] = std::max(b.lower[i], r.lower[i]);
    b.upper[i] = std::min(b.upper[i], r.upper[i]);
  }
}

ScanStats drive(const QuadraticForm& q, std::int64_t target, const ScanBounds& bounds, std::int64_t p0, int scale,
                const Visitor& visit, const EnumerateOptions& options) {
  IntegralPoint point;
  point.p0 = p0;
  point.scale = scale;
  point.provenance = Provenance::Scan;
  std::uint64_t count = 0;
  ScanOptions scan_options{options.threads, options.deadline};
  return scan_quadric(
      q, target, bounds,
      [&](std::span<const std::int64_t> y) {
        if (options.max_points && ++count > *options.max_points)
          fail(ErrorCode::CapExceeded, "point cap " + std::to_string(*options.max_points) + " exceeded");
        point.numerators.assign(y.begin(), y.end());
        return visit(point);
      },
      scan_options);
}

}  // namespace

ScanStats enumerate_integral(const QuadricInstance& inst, std::int64_t N, const Visitor& visit,
                             const EnumerateOptions& options) {
  ScanBounds bounds = ball_bounds(inst.dim(), N, options.sup_norm);
  if (inst.region) intersect_region(bounds, *inst.region);
  return drive(inst.form, inst.m, bounds, 1, 0, visit, options);
}

std::vector<IntegralPoint> enumerate_integral(const QuadricInstance& inst, std::int64_t N,
                                              const EnumerateOptions& options) {
  std::vector<IntegralPoint> out;
  enumerate_integral(inst, N, [&](const IntegralPoint& p) { out.push_back(p); return true; }, options);
  return out;
}

ScanStats enumerate_s_integral(const QuadricInstance& inst, const Visitor& visit, const EnumerateOptions& options) {
  require(inst.s_data.has_value(), ErrorCode::InvalidArgument, "S-integral enumeration needs p0 and h");
  require(inst.region.has_value(), ErrorCode::InvalidArgument, "S-integral enumeration needs a bounded region");
  const auto [p0, h] = *inst.s_data;
  std::int64_t target = checked_mul(checked_pow(p0, static_cast<unsigned>(2 * h)), inst.m);
  ScanBounds bounds = scaled_box(*inst.region, p0, h);
  return drive(inst.form, target, bounds, p0, h, visit, options);
}

std::vector<IntegralPoint> enumerate_s_integral(const QuadricInstance& inst, const EnumerateOptions& options) {
  std::vector<IntegralPoint> out;
  enumerate_s_integral(inst, [&](const IntegralPoint& p) { out.push_back(p); return true; }, options);
  return out;
}

std::vector<IntegralPoint> naive_oracle(const QuadraticForm& q, std::int64_t target, const ScanBounds& bounds,
                                        std::uint64_t cap) {
  std::size_t n = q.dim();
  require(bounds.lower.size() == n && bounds.upper.size() == n, ErrorCode::InvalidArgument, "bounds dimension mismatch");
  double candidates = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (bounds.lower[i] > bounds.upper[i]) return {};
    candidates *= static_cast<double>(bounds.upper[i] - bounds.lower[i] + 1);
  }
  if (candidates > static_cast<double>(cap))
    fail(ErrorCode::BoxTooLarge, "naive box has " + std::to_string(candidates) + " candidates, cap " + std::to_string(cap));
  std::vector<IntegralPoint> out;
  std::vector<std::int64_t> y(bounds.lower);
  while (true) {
    bool ok = true;
    if (bounds.radius_sq) {
      i128 s = 0;
      for (auto v : y) s += static_cast<i128>(v) * v;
      ok = s <= *bounds.radius_sq;
    }
    if (ok && bounds.modulus > 1)
      for (std::size_t i = 0; i < n && ok; ++i) ok = mod_floor(y[i] - bounds.residue[i], bounds.modulus) == 0;
    if (ok && exact_value(q, y) == target) {
      IntegralPoint p;
      p.numerators = y;
      p.provenance = Provenance::Naive;
      out.push_back(std::move(p));
    }
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (y[i] < bounds.upper[i]) {
        ++y[i];
        break;
      }
      y[i] = bounds.lower[i];
      if (i == 0) return out;
    }
    if (n == 0) return out;
  }
}

}  // namespace aquad::enumeration
