#include "aquad/modular.hpp"

#include <algorithm>
#include <cmath>

#include "aquad/error.hpp"

namespace aquad::modular {

namespace {

std::int64_t power_of(std::int64_t p, int k) { return checked_pow(p, static_cast<unsigned>(k)); }

// p^e as a double-free overflow-aware check against a cap.
bool power_within(std::int64_t base, std::uint64_t exponent, std::uint64_t cap) {
  long double v = 1;
  for (std::uint64_t i = 0; i < exponent; ++i) {
    v *= static_cast<long double>(base);
    if (v > static_cast<long double>(cap)) return false;
  }
  return true;
}

void require_prime(std::int64_t p) {
  require(p >= 2 && is_prime(static_cast<std::uint64_t>(p)), ErrorCode::InvalidArgument,
          "modulus prime must be prime, got " + std::to_string(p));
}

// Histogram of q(x) mod M over all x in (Z/M)^n.
std::vector<std::uint64_t> scan_histogram(const QuadraticForm& q, std::uint64_t M) {
  const std::size_t n = q.dim();
  std::vector<std::uint64_t> hist(M, 0);
  std::vector<std::uint64_t> g(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g[i * n + j] = static_cast<std::uint64_t>(mod_floor(q.entry(i, j), M));
  std::vector<std::uint64_t> sq(M);
  for (std::uint64_t x = 0; x < M; ++x) sq[x] = static_cast<std::uint64_t>(static_cast<u128>(x) * x % M);
  // lin[d][j]: sum over fixed coords i < d of 2 g_ji x_i, for j >= d.
  std::vector<std::vector<std::uint64_t>> lin(n + 1, std::vector<std::uint64_t>(n, 0));
  std::vector<std::uint64_t> val(n + 1, 0);
  std::vector<std::uint64_t> x(n, 0);
  auto enter = [&](std::size_t d) {
    std::uint64_t v = x[d];
    val[d + 1] = (val[d] + g[d * n + d] * sq[v] % M + lin[d][d] * v % M) % M;
    for (std::size_t j = d + 1; j < n; ++j) lin[d + 1][j] = (lin[d][j] + 2 * g[j * n + d] % M * v) % M;
  };
  const std::size_t last = n - 1;
  if (n == 1) {
    for (std::uint64_t v = 0; v < M; ++v) ++hist[g[0] * sq[v] % M];
    return hist;
  }
  for (std::size_t e = 0; e < last; ++e) enter(e);
  while (true) {
    {
      const std::uint64_t base = val[last], a = g[last * n + last], l = lin[last][last];
      for (std::uint64_t v = 0; v < M; ++v) ++hist[(base + a * sq[v] % M + l * v % M) % M];
      // advance the odometer on the prefix
      std::size_t d = last;
      while (d > 0) {
        --d;
        if (++x[d] < M) break;
        x[d] = 0;
        if (d == 0) return hist;
      }
      for (std::size_t e = d; e < last; ++e) {
        if (e > d) x[e] = 0;
        enter(e);
      }
    }
  }
}

// Class convolution for diagonal forms mod M = p^k. Distributions of
// a*x^2 and their convolutions are invariant under multiplication by unit
// squares, so they are stored per orbit.
struct ClassTable {
  std::int64_t p;
  int k;
  std::uint64_t M;
  std::vector<std::uint16_t> cls;  // orbit id per residue
  std::vector<std::uint64_t> rep;  // one residue per orbit

  ClassTable(std::int64_t p_, int k_) : p(p_), k(k_), M(static_cast<std::uint64_t>(power_of(p_, k_))) {
    cls.assign(M, 0);
    const int per_level = p == 2 ? 4 : 2;
    std::vector<std::int64_t> first(1 + static_cast<std::size_t>(per_level * k), -1);
    first[0] = 0;
    for (std::uint64_t t = 1; t < M; ++t) {
      std::uint64_t u = t;
      int j = 0;
      while (u % static_cast<std::uint64_t>(p) == 0) {
        u /= static_cast<std::uint64_t>(p);
        ++j;
      }
      int sub;
      if (p == 2) {
        int r = k - j;
        std::uint64_t window = r >= 3 ? 8 : (std::uint64_t{1} << r);
        sub = static_cast<int>((u % window) >> 1);
      } else {
        sub = legendre(static_cast<std::int64_t>(u % static_cast<std::uint64_t>(p)), p) == 1 ? 0 : 1;
      }
      std::size_t c = 1 + static_cast<std::size_t>(per_level * j + sub);
      cls[t] = static_cast<std::uint16_t>(c);
      if (first[c] < 0) first[c] = static_cast<std::int64_t>(t);
    }
    for (auto f : first) rep.push_back(f < 0 ? M : static_cast<std::uint64_t>(f));  // M marks an empty orbit
  }

  std::vector<u128> single(std::int64_t a) const {
    std::vector<u128> counts(rep.size(), 0);
    const std::uint64_t am = static_cast<std::uint64_t>(mod_floor(a, static_cast<std::int64_t>(M)));
    for (std::uint64_t x = 0; x < M; ++x) {
      std::uint64_t t = static_cast<std::uint64_t>(static_cast<u128>(am) * (static_cast<u128>(x) * x % M) % M);
      if (t == rep[cls[t]]) ++counts[cls[t]];
    }
    return counts;
  }

  std::vector<u128> convolve(const std::vector<u128>& f, const std::vector<u128>& g) const {
    std::vector<u128> out(rep.size(), 0);
    for (std::size_t c = 0; c < rep.size(); ++c) {
      if (rep[c] == M) continue;
      const std::uint64_t r = rep[c];
      u128 total = 0;
      for (std::uint64_t s = 0; s < M; ++s) {
        const u128 fs = f[cls[s]];
        if (fs == 0) continue;
        std::uint64_t diff = r >= s ? r - s : r + M - s;
        total += fs * g[cls[diff]];
      }
      out[c] = total;
    }
    return out;
  }
};

bool convolution_fits(std::size_t n, std::int64_t M) {
  return static_cast<double>(n) * std::log2(static_cast<double>(M)) < 126.0;
}

Integer to_integer(u128 v) {
  Integer hi = static_cast<unsigned long>(static_cast<std::uint64_t>(v >> 64));
  Integer lo = static_cast<unsigned long>(static_cast<std::uint64_t>(v));
  return (hi << 64) + lo;
}

Integer pow_integer(std::int64_t p, std::uint64_t e) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(e));
  return r;
}

bool convolution_applies(const QuadraticForm& q, std::int64_t p, int k, const PrimePowerOptions& o) {
  if (!q.is_diagonal()) return false;
  if (!power_within(p, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(o.convolution_cap))) return false;
  return convolution_fits(q.dim(), power_of(p, k));
}

bool scan_applies(const QuadraticForm& q, std::int64_t p, int k, const PrimePowerOptions& o) {
  return power_within(p, static_cast<std::uint64_t>(k) * q.dim(), o.scan_cap);
}

Integer count_convolution(const QuadraticForm& q, std::int64_t m, std::int64_t p, int k) {
  ClassTable table(p, k);
  auto coeffs = q.diagonal_coefficients();
  std::vector<u128> acc = table.single(coeffs[0]);
  for (std::size_t i = 1; i < coeffs.size(); ++i) acc = table.convolve(acc, table.single(coeffs[i]));
  std::uint64_t t = static_cast<std::uint64_t>(mod_floor(m, static_cast<std::int64_t>(table.M)));
  return to_integer(acc[table.cls[t]]);
}

bool direct_possible(const QuadraticForm& q, std::int64_t p, int k, const PrimePowerOptions& o) {
  return k == 0 || convolution_applies(q, p, k, o) || scan_applies(q, p, k, o);
}

Integer count_direct(const QuadraticForm& q, std::int64_t m, std::int64_t p, int k, const PrimePowerOptions& o) {
  if (k == 0) return 1;
  if (convolution_applies(q, p, k, o)) return count_convolution(q, m, p, k);
  return count_prime_power_scan(q, m, p, k, o.scan_cap);
}

Integer imprimitive_count(const QuadraticForm& q, std::int64_t m, std::int64_t p, int k, const PrimePowerOptions& o) {
  if (k == 1) return m % p == 0 ? 1 : 0;
  const std::int64_t p2 = p * p;
  if (m % p2 != 0) return 0;
  return pow_integer(p, q.dim()) * count_prime_power(q, m / p2, p, k - 2, o);
}

}  // namespace

ResiduePoint reduce_point(const IntegralPoint& x, std::int64_t p, int k) {
  require_prime(p);
  require(k >= 1, ErrorCode::InvalidArgument, "reduction exponent must be positive");
  const std::int64_t M = power_of(p, k);
  ResiduePoint r;
  r.modulus = M;
  r.coords.reserve(x.dim());
  if (x.scale == 0 || x.p0 != p) {
    std::int64_t inv = 1;
    if (x.scale > 0) inv = inv_mod(mod_floor(checked_pow(x.p0, static_cast<unsigned>(x.scale)) % M, M), M);
    for (auto y : x.numerators)
      r.coords.push_back(static_cast<std::int64_t>(mul_mod(static_cast<std::uint64_t>(mod_floor(y, M)),
                                                           static_cast<std::uint64_t>(inv),
                                                           static_cast<std::uint64_t>(M))));
    return r;
  }
  const std::int64_t den = checked_pow(p, static_cast<unsigned>(x.scale));
  for (std::size_t i = 0; i < x.dim(); ++i) {
    std::int64_t y = x.numerators[i];
    if (y % den != 0)
      fail(ErrorCode::DenominatorDivisibleByP,
           "coordinate " + std::to_string(i + 1) + " has a denominator divisible by " + std::to_string(p));
    r.coords.push_back(mod_floor(y / den, M));
  }
  return r;
}

ResiduePoint reduce_point(const IntegralPoint& x, std::int64_t p, int k, const QuadraticForm& q, std::int64_t m) {
  ResiduePoint r = reduce_point(x, p, k);
  r.on_quadric = q.eval_mod(r.coords, r.modulus) == mod_floor(m, r.modulus);
  return r;
}

SubvarietySpec::SubvarietySpec(std::vector<Polynomial> polys) : polys_(std::move(polys)) {
  require(!polys_.empty(), ErrorCode::InvalidArgument, "subvariety needs at least one polynomial");
  for (std::size_t i = 0; i < polys_.size(); ++i) {
    require(!polys_[i].is_zero(), ErrorCode::InvalidArgument, "subvariety polynomial " + std::to_string(i + 1) + " is zero");
    require(polys_[i].nvars() == polys_[0].nvars(), ErrorCode::InvalidArgument, "subvariety polynomials differ in arity");
  }
  // Scalar multiples share every factor.
  for (std::size_t i = 0; i < polys_.size(); ++i)
    for (std::size_t j = i + 1; j < polys_.size(); ++j) {
      const auto& a = polys_[i].terms();
      const auto& b = polys_[j].terms();
      if (a.size() != b.size()) continue;
      bool proportional = true;
      for (std::size_t t = 0; t < a.size() && proportional; ++t) {
        proportional = a[t].exponents == b[t].exponents &&
                       Integer(static_cast<long>(a[t].coeff)) * b[0].coeff == Integer(static_cast<long>(b[t].coeff)) * a[0].coeff;
      }
      if (proportional)
        fail(ErrorCode::InvalidArgument, "subvariety polynomials " + std::to_string(i + 1) + " and " +
                                             std::to_string(j + 1) + " are proportional (not coprime)");
    }
}

bool SubvarietySpec::vanishes_mod(std::span<const std::int64_t> x, std::int64_t modulus) const {
  for (const auto& f : polys_)
    if (f.eval_mod(x, modulus) != 0) return false;
  return true;
}

std::vector<std::string> SubvarietySpec::advisories() const {
  return {"coprimality over Q checked only up to scalar multiples"};
}

std::vector<std::uint64_t> value_histogram_ffield(const QuadraticForm& q, std::int64_t p, std::uint64_t cap) {
  require_prime(p);
  if (!power_within(p, q.dim(), cap))
    fail(ErrorCode::CapExceeded, "scan of " + std::to_string(p) + "^" + std::to_string(q.dim()) +
                                     " points exceeds cap " + std::to_string(cap));
  return scan_histogram(q, static_cast<std::uint64_t>(p));
}

std::uint64_t count_quadric_ffield_brute(const QuadraticForm& q, std::int64_t m, std::int64_t p, std::uint64_t cap) {
  return value_histogram_ffield(q, p, cap)[static_cast<std::size_t>(mod_floor(m, p))];
}

Integer count_quadric_ffield_exact(const QuadraticForm& q, std::int64_t m, std::int64_t p) {
  require_prime(p);
  if (p == 2) fail(ErrorCode::BadPrime, "closed form needs an odd prime");
  if (q.det() % p == 0) fail(ErrorCode::BadPrime, std::to_string(p) + " divides det(q)");
  const std::size_t n = q.dim();
  const Integer d = q.det();
  const bool m_zero = m % p == 0;
  Integer result = pow_integer(p, n - 1);
  if (n % 2 == 1) {
    if (m_zero) return result;
    Integer arg = d * Integer(static_cast<long>(m));
    if (((n - 1) / 2) % 2 == 1) arg = -arg;
    return result + legendre(arg, p) * pow_integer(p, (n - 1) / 2);
  }
  Integer arg = d;
  if ((n / 2) % 2 == 1) arg = -arg;
  int chi = legendre(arg, p);
  if (!m_zero) return result - chi * pow_integer(p, n / 2 - 1);
  return result + chi * (pow_integer(p, n / 2) - pow_integer(p, n / 2 - 1));
}

std::vector<std::vector<std::int64_t>> subvariety_points_ffield(const SubvarietySpec& spec, const QuadraticForm& q,
                                                                std::int64_t m, std::int64_t p, std::uint64_t cap) {
  require_prime(p);
  const std::size_t n = q.dim();
  require(spec.nvars() == n, ErrorCode::InvalidArgument, "subvariety arity differs from the form");
  if (!power_within(p, n, cap))
    fail(ErrorCode::CapExceeded, "scan of " + std::to_string(p) + "^" + std::to_string(n) + " points exceeds cap " +
                                     std::to_string(cap));
  std::vector<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> x(n, 0);
  const std::int64_t target = mod_floor(m, p);
  while (true) {
    if (spec.vanishes_mod(x, p) && q.eval_mod(x, p) == target) out.push_back(x);
    std::size_t i = n;
    while (true) {
      if (i == 0) return out;
      --i;
      if (++x[i] < p) break;
      x[i] = 0;
    }
  }
}

std::uint64_t count_subvariety_ffield(const SubvarietySpec& spec, const QuadraticForm& q, std::int64_t m,
                                      std::int64_t p, std::uint64_t cap) {
  return subvariety_points_ffield(spec, q, m, p, cap).size();
}

Integer count_prime_power_scan(const QuadraticForm& q, std::int64_t m, std::int64_t p, int k, std::uint64_t cap) {
  require_prime(p);
  require(k >= 1, ErrorCode::InvalidArgument, "exponent k must be positive");
  if (!power_within(p, static_cast<std::uint64_t>(k) * q.dim(), cap))
    fail(ErrorCode::CapExceeded, "scan of (Z/" + std::to_string(p) + "^" + std::to_string(k) + ")^" +
                                     std::to_string(q.dim()) + " exceeds cap " + std::to_string(cap));
  const std::int64_t M = power_of(p, k);
  auto hist = scan_histogram(q, static_cast<std::uint64_t>(M));
  return Integer(static_cast<unsigned long>(hist[static_cast<std::size_t>(mod_floor(m, M))]));
}

std::vector<u128> diagonal_value_distribution(std::span<const std::int64_t> coefficients, std::int64_t p, int k) {
  require_prime(p);
  require(!coefficients.empty(), ErrorCode::InvalidArgument, "empty form");
  ClassTable table(p, k);
  std::vector<u128> acc = table.single(coefficients[0]);
  for (std::size_t i = 1; i < coefficients.size(); ++i) acc = table.convolve(acc, table.single(coefficients[i]));
  std::vector<u128> out(table.M);
  for (std::uint64_t t = 0; t < table.M; ++t) out[t] = acc[table.cls[t]];
  return out;
}

Integer count_prime_power(const QuadraticForm& q, std::int64_t m, std::int64_t p, int k,
                          const PrimePowerOptions& options) {
  require_prime(p);
  require(k >= 0, ErrorCode::InvalidArgument, "exponent k must be nonnegative");
  if (direct_possible(q, p, k, options)) return count_direct(q, m, p, k, options);

  const std::size_t n = q.dim();
  const Integer nonprimitive = imprimitive_count(q, m, p, k, options);
  const bool smooth_prime = p != 2 && q.det() % p != 0;
  if (smooth_prime) {
    // Every primitive zero of q - m mod p has a unit gradient: exact Hensel.
    Integer n1 = count_quadric_ffield_exact(q, m, p);
    Integer primitive1 = n1 - (m % p == 0 ? 1 : 0);
    return pow_integer(p, (n - 1) * static_cast<std::uint64_t>(k - 1)) * primitive1 + nonprimitive;
  }
  const int ks = 2 * valuation(Integer(2) * q.det(), p) + 1;
  if (k <= ks + 1 || !direct_possible(q, p, ks + 1, options))
    fail(ErrorCode::CapExceeded, "no direct count of q = m mod " + std::to_string(p) + "^" +
                                     std::to_string(std::max(k, ks + 1)) + " within caps");
  Integer prim_s = count_direct(q, m, p, ks, options) - imprimitive_count(q, m, p, ks, options);
  Integer prim_s1 = count_direct(q, m, p, ks + 1, options) - imprimitive_count(q, m, p, ks + 1, options);
  if (prim_s1 != pow_integer(p, n - 1) * prim_s)
    fail(ErrorCode::NotStabilized, "primitive counts at p=" + std::to_string(p) + " do not stabilize at k=" +
                                       std::to_string(ks));
  return pow_integer(p, (n - 1) * static_cast<std::uint64_t>(k - ks)) * prim_s + nonprimitive;
}

}  // namespace aquad::modular
