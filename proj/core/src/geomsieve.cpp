#include "aquad/geomsieve.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "aquad/error.hpp"

namespace aquad::geomsieve {

namespace {

u128 gcd_u128(u128 a, u128 b) {
  while (b != 0) {
    u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

u128 magnitude(i128 v) { return v < 0 ? static_cast<u128>(-v) : static_cast<u128>(v); }

std::vector<std::uint64_t> distinct_primes(u128 value) {
  std::vector<std::uint64_t> f;
  if (value <= std::numeric_limits<std::uint64_t>::max())
    f = factorize(static_cast<std::uint64_t>(value));
  else
    f = factorize(to_integer(value));
  return distinct(f);
}

void require_s_instance(const QuadricInstance& inst, const SubvarietySpec& spec) {
  require(inst.s_data.has_value(), ErrorCode::InvalidArgument, "geometric sieve needs p0 and h");
  require(inst.region.has_value(), ErrorCode::InvalidArgument, "geometric sieve needs a bounded region");
  require(spec.nvars() == inst.dim(), ErrorCode::InvalidArgument, "subvariety arity differs from the form");
}

}  // namespace

bool verify_witness(const QuadricInstance& inst, const SubvarietySpec& spec, const IntegralPoint& x, std::int64_t p) {
  auto r = modular::reduce_point(x, p, 1, inst.form, inst.m);
  return r.on_quadric.value_or(false) && spec.vanishes_mod(r.coords, p);
}

BadPointResult bad_point_count(const QuadricInstance& inst, const SubvarietySpec& spec, std::int64_t N1,
                               std::optional<std::int64_t> N2, const BadPointOptions& options) {
  require_s_instance(inst, spec);
  const auto [p0, h] = *inst.s_data;
  require(N1 >= p0, ErrorCode::InvalidArgument, "need N1 >= p0");
  require(!N2 || *N2 > N1, ErrorCode::InvalidArgument, "need N2 > N1");

  std::vector<Polynomial> cleared;
  for (const auto& f : spec.polys()) cleared.push_back(f.rescaled(p0, h));

  BadPointResult out;
  out.N1 = N1;
  out.N2 = N2;
  enumeration::EnumerateOptions eopts;
  eopts.threads = options.threads;
  enumeration::enumerate_s_integral(
      inst,
      [&](const IntegralPoint& x) {
        ++out.points;
        u128 g = 0;
        for (const auto& f : cleared) g = gcd_u128(g, magnitude(f.eval(x.numerators)));
        BadPointRecord rec;
        if (g == 0) {
          rec.generic_bad = true;
          auto coords = x.coords();
          rec.verified = std::all_of(spec.polys().begin(), spec.polys().end(),
                                     [&](const Polynomial& f) { return f.eval(std::span<const Rational>(coords)) == 0; });
        } else {
          if (g <= static_cast<u128>(N1)) return true;
          for (auto p : distinct_primes(g)) {
            auto sp = static_cast<std::int64_t>(p);
            if (sp > N1 && (!N2 || sp <= *N2)) rec.witnesses.push_back(p);
          }
          if (rec.witnesses.empty()) return true;
          rec.verified = std::all_of(rec.witnesses.begin(), rec.witnesses.end(), [&](std::uint64_t p) {
            return verify_witness(inst, spec, x, static_cast<std::int64_t>(p));
          });
        }
        ++out.bad;
        if (rec.generic_bad) ++out.generic_bad;
        if (rec.verified) ++out.verified;
        if (options.keep_records) {
          rec.point = x;
          out.records.push_back(std::move(rec));
        }
        return true;
      },
      eopts);
  return out;
}

std::string to_string(ShapeTerm t) {
  switch (t) {
    case ShapeTerm::Constant: return "1";
    case ShapeTerm::InvMLogM: return "1/(M log M)";
    case ShapeTerm::InvSqrtHLogP0: return "1/sqrt(h log p0)";
  }
  return "?";
}

namespace {

double term_value(ShapeTerm t, double parameter, std::int64_t p0) {
  switch (t) {
    case ShapeTerm::Constant: return 1.0;
    case ShapeTerm::InvMLogM:
      require(parameter > 1, ErrorCode::InvalidArgument, "1/(M log M) needs M > 1");
      return 1.0 / (parameter * std::log(parameter));
    case ShapeTerm::InvSqrtHLogP0:
      require(parameter > 0, ErrorCode::InvalidArgument, "1/sqrt(h log p0) needs h > 0");
      return 1.0 / std::sqrt(parameter * std::log(static_cast<double>(p0)));
  }
  return 0;
}

// Least squares on the chosen columns via normal equations; false if singular.
bool solve_subset(const std::vector<std::vector<double>>& cols, const std::vector<double>& y,
                  const std::vector<std::size_t>& subset, std::vector<double>& coef) {
  const std::size_t k = subset.size();
  std::vector<std::vector<double>> a(k, std::vector<double>(k + 1, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t r = 0; r < y.size(); ++r) a[i][j] += cols[subset[i]][r] * cols[subset[j]][r];
    for (std::size_t r = 0; r < y.size(); ++r) a[i][k] += cols[subset[i]][r] * y[r];
  }
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < k; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    if (std::fabs(a[piv][c]) < 1e-12 * std::max(1.0, std::fabs(a[c][c]))) return false;
    std::swap(a[c], a[piv]);
    for (std::size_t r = 0; r < k; ++r) {
      if (r == c) continue;
      double f = a[r][c] / a[c][c];
      for (std::size_t j = c; j <= k; ++j) a[r][j] -= f * a[c][j];
    }
  }
  coef.assign(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) coef[i] = a[i][k] / a[i][i];
  return true;
}

}  // namespace

BoundShapeFit bound_shape_check(std::vector<ShapePoint> series, const std::vector<ShapeTerm>& terms,
                                std::int64_t p0) {
  if (series.size() < 4) fail(ErrorCode::DegenerateFit, "bound-shape fit needs at least 4 points");
  require(!terms.empty() && terms.size() <= 8, ErrorCode::InvalidArgument, "need 1 to 8 model terms");
  for (const auto& s : series)
    require(s.ratio >= 0 && std::isfinite(s.ratio), ErrorCode::InvalidArgument, "ratios must be finite and >= 0");
  std::sort(series.begin(), series.end(), [](const auto& a, const auto& b) { return a.parameter < b.parameter; });

  std::vector<std::vector<double>> cols(terms.size());
  std::vector<double> y;
  for (const auto& s : series) y.push_back(s.ratio);
  for (std::size_t j = 0; j < terms.size(); ++j)
    for (const auto& s : series) cols[j].push_back(term_value(terms[j], s.parameter, p0));

  // Active-set enumeration: the NNLS optimum is the unconstrained least-squares
  // solution on some subset with all coefficients positive.
  double best_rss = 0;
  for (double v : y) best_rss += v * v;
  std::vector<double> best(terms.size(), 0.0);
  bool solved = false;
  for (unsigned mask = 1; mask < (1u << terms.size()); ++mask) {
    std::vector<std::size_t> subset;
    for (std::size_t j = 0; j < terms.size(); ++j)
      if (mask & (1u << j)) subset.push_back(j);
    std::vector<double> coef;
    if (!solve_subset(cols, y, subset, coef)) continue;
    solved = true;
    if (std::any_of(coef.begin(), coef.end(), [](double c) { return c < 0; })) continue;
    double rss = 0;
    for (std::size_t r = 0; r < y.size(); ++r) {
      double fit = 0;
      for (std::size_t i = 0; i < subset.size(); ++i) fit += coef[i] * cols[subset[i]][r];
      rss += (y[r] - fit) * (y[r] - fit);
    }
    if (rss < best_rss) {
      best_rss = rss;
      std::fill(best.begin(), best.end(), 0.0);
      for (std::size_t i = 0; i < subset.size(); ++i) best[subset[i]] = coef[i];
    }
  }
  if (!solved) fail(ErrorCode::DegenerateFit, "no term subset gives a solvable least-squares system");

  BoundShapeFit fit;
  fit.terms = terms;
  fit.coefficients = best;
  fit.residual = std::sqrt(best_rss / static_cast<double>(y.size()));
  fit.nonincreasing = true;
  for (std::size_t i = 1; i < series.size(); ++i)
    if (series[i].ratio > series[i - 1].ratio) fit.nonincreasing = false;
  fit.series = std::move(series);
  return fit;
}

MediumPrimeResult medium_prime_count(const QuadricInstance& inst, const SubvarietySpec& spec, std::int64_t p,
                                     std::uint64_t cap) {
  require_s_instance(inst, spec);
  const auto [p0, h] = *inst.s_data;
  require(p >= 2 && is_prime(static_cast<std::uint64_t>(p)), ErrorCode::InvalidArgument, "p must be prime");
  require(p != p0, ErrorCode::InvalidArgument, "p must differ from p0");
  require(static_cast<double>(p) <= std::pow(static_cast<double>(p0), h), ErrorCode::InvalidArgument,
          "medium primes satisfy p <= p0^h");

  const auto& q = inst.form;
  const std::size_t n = q.dim();
  const std::int64_t target = checked_mul(checked_pow(p0, static_cast<unsigned>(2 * h)), inst.m);
  const auto scale = static_cast<std::int64_t>(pow_mod(static_cast<std::uint64_t>(p0), static_cast<std::uint64_t>(h),
                                                       static_cast<std::uint64_t>(p)));
  MediumPrimeResult out;
  out.p = p;
  auto lambdas = modular::subvariety_points_ffield(spec, q, inst.m, p, cap);
  out.classes = lambdas.size();
  for (const auto& lambda : lambdas) {
    auto bounds = enumeration::scaled_box(*inst.region, p0, h);
    bounds.modulus = p;
    bounds.residue.resize(n);
    for (std::size_t i = 0; i < n; ++i) bounds.residue[i] = static_cast<std::int64_t>(
          mul_mod(static_cast<std::uint64_t>(scale), static_cast<std::uint64_t>(lambda[i]), static_cast<std::uint64_t>(p)));
    const auto& base = bounds.residue;
    const i128 q_base = q.eval(std::span<const std::int64_t>(base));
    enumeration::scan_quadric(q, target, bounds, [&](std::span<const std::int64_t> y) {
      // y = base + p z must satisfy q(base) + 2p base^T G z + p^2 q(z) = target.
      std::vector<std::int64_t> z(n);
      for (std::size_t i = 0; i < n; ++i) z[i] = (y[i] - base[i]) / p;
      i128 cross = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) cross += static_cast<i128>(base[i]) * q.entry(i, j) * z[j];
      i128 qz = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) qz += static_cast<i128>(z[i]) * q.entry(i, j) * z[j];
      if (q_base + 2 * static_cast<i128>(p) * cross + static_cast<i128>(p) * p * qz != target)
        fail(ErrorCode::InvariantViolation, "lattice relation failed for a medium-prime class");
      ++out.count;
      return true;
    });
  }
  return out;
}

EkedahlResult ekedahl_count(const std::vector<Polynomial>& polys, std::int64_t B, std::int64_t M) {
  require(!polys.empty(), ErrorCode::InvalidArgument, "need at least one polynomial");
  require(B > 0 && M > 0, ErrorCode::InvalidArgument, "B and M must be positive");
  const std::size_t d = polys.front().nvars();
  for (const auto& f : polys) require(f.nvars() == d, ErrorCode::InvalidArgument, "polynomials differ in arity");
  const double total = std::pow(static_cast<double>(2 * B + 1), static_cast<double>(d));
  if (total > static_cast<double>(enumeration::kNaiveCap))
    fail(ErrorCode::BoxTooLarge, "Ekedahl box has " + std::to_string(total) + " points");

  EkedahlResult out;
  std::vector<std::int64_t> y(d, -B);
  while (true) {
    ++out.total;
    u128 g = 0;
    for (const auto& f : polys) {
      g = gcd_u128(g, magnitude(f.eval(y)));
      if (g == 1) break;
    }
    if (g == 0) {
      ++out.zero_gcd;
      ++out.count;
    } else if (g >= static_cast<u128>(M)) {
      auto primes = distinct_primes(g);
      if (!primes.empty() && static_cast<std::int64_t>(primes.back()) >= M) ++out.count;
    }
    std::size_t i = d;
    while (i > 0 && y[i - 1] == B) y[--i] = -B;
    if (i == 0) break;
    ++y[i - 1];
  }
  return out;
}

bool represented_by_binary(std::int64_t a, std::int64_t t) {
  require(a >= 1, ErrorCode::InvalidArgument, "a must be positive");
  if (t < 0) return false;
  for (std::int64_t v = 0; a * v * v <= t; ++v)
    if (is_square(t - a * v * v)) return true;
  return false;
}

HalfdimResult halfdim_count(std::int64_t a, const std::vector<std::int64_t>& tail, std::int64_t c, std::int64_t B) {
  require(a >= 1, ErrorCode::InvalidArgument, "a must be positive");
  require(B >= 1, ErrorCode::InvalidArgument, "B must be positive");
  require(!tail.empty(), ErrorCode::InvalidArgument, "tail must be nonempty");
  const std::size_t d = tail.size();
  const double boxes = std::pow(static_cast<double>(2 * B + 1), static_cast<double>(d));
  if (boxes > static_cast<double>(enumeration::kNaiveCap))
    fail(ErrorCode::BoxTooLarge, "half-dimensional box has " + std::to_string(boxes) + " points");

  i128 tmax = c;
  for (auto ai : tail)
    if (ai < 0) tmax -= static_cast<i128>(ai) * B * B;

  HalfdimResult out;
  out.total = static_cast<std::uint64_t>(boxes);
  if (tmax < 0) {
    out.negative_target_only = true;
    return out;
  }

  constexpr i128 kTableLimit = i128{1} << 31;
  std::vector<bool> table;
  if (tmax <= kTableLimit) {
    const auto top = static_cast<std::int64_t>(tmax);
    table.assign(static_cast<std::size_t>(top) + 1, false);
    for (std::int64_t v = 0; a * v * v <= top; ++v)
      for (std::int64_t u = 0; u * u + a * v * v <= top; ++u) table[static_cast<std::size_t>(u * u + a * v * v)] = true;
  }

  std::vector<std::int64_t> y(d, -B);
  while (true) {
    i128 t = c;
    for (std::size_t i = 0; i < d; ++i) t -= static_cast<i128>(tail[i]) * y[i] * y[i];
    if (t >= 0) {
      bool hit = table.empty() ? represented_by_binary(a, narrow(t)) : table[static_cast<std::size_t>(t)];
      if (hit) ++out.count;
    }
    std::size_t i = d;
    while (i > 0 && y[i - 1] == B) y[--i] = -B;
    if (i == 0) break;
    ++y[i - 1];
  }
  out.fraction = static_cast<double>(out.count) / static_cast<double>(out.total);
  return out;
}

}  // namespace aquad::geomsieve
