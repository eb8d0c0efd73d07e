#include "aquad/density.hpp"

#include <algorithm>
#include <cmath>

#include "aquad/error.hpp"

namespace aquad::density {

namespace {

Rational p_power(std::int64_t p, std::uint64_t e) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(e));
  return Rational(r);
}

}  // namespace

LocalDensity local_density(const QuadraticForm& q, std::int64_t m, std::int64_t p,
                           const modular::PrimePowerOptions& options) {
  require(m != 0, ErrorCode::InvalidArgument, "local density needs m != 0");
  require(p >= 2 && is_prime(static_cast<std::uint64_t>(p)), ErrorCode::InvalidArgument, "p must be prime");
  const std::uint64_t n = q.dim();
  const Integer scale = Integer(2) * q.det() * Integer(static_cast<long>(m));
  const int k0 = 2 * valuation(scale, p) + 1;
  Rational a(modular::count_prime_power(q, m, p, k0 + 1, options), Integer(1));
  a /= p_power(p, static_cast<std::uint64_t>(k0 + 1) * (n - 1));
  Rational b(modular::count_prime_power(q, m, p, k0 + 2, options), Integer(1));
  b /= p_power(p, static_cast<std::uint64_t>(k0 + 2) * (n - 1));
  a.canonicalize();
  b.canonicalize();
  if (a != b)
    fail(ErrorCode::NotStabilized, "local density at p=" + std::to_string(p) + " differs between k=" +
                                       std::to_string(k0 + 1) + " and k=" + std::to_string(k0 + 2));
  return LocalDensity{p, b, k0 + 2, true};
}

Rational padic_ball_volume(const QuadraticForm& q, std::int64_t m, std::int64_t p0, int h,
                           const modular::PrimePowerOptions& options) {
  require(h >= 0, ErrorCode::InvalidArgument, "h must be nonnegative");
  std::int64_t target = checked_mul(checked_pow(p0, static_cast<unsigned>(2 * h)), m);
  LocalDensity sigma = local_density(q, target, p0, options);
  Rational out = sigma.value * p_power(p0, static_cast<std::uint64_t>(h) * (q.dim() - 2));
  out.canonicalize();
  return out;
}

namespace {

struct Domain {
  std::vector<double> lo, hi;  // per axis, parameter ranges
  std::optional<double> radius_sq;
  bool inside_axis(std::size_t i, double v) const { return v >= lo[i] && v <= hi[i]; }
};

Domain make_domain(std::size_t n, const RealRegion& region) {
  Domain d;
  if (const auto* box = std::get_if<Box>(&region)) {
    require(box->dim() == n, ErrorCode::InvalidArgument, "region dimension differs from form");
    for (std::size_t i = 0; i < n; ++i) {
      d.lo.push_back(box->lower[i].get_d());
      d.hi.push_back(box->upper[i].get_d());
    }
  } else {
    double r = std::get<Ball>(region).radius;
    require(r > 0, ErrorCode::InvalidArgument, "ball radius must be positive");
    d.lo.assign(n, -r);
    d.hi.assign(n, r);
    d.radius_sq = r * r;
  }
  return d;
}

double integrate(const QuadraticForm& q, double m, const Domain& dom, int cells) {
  const std::size_t n = q.dim();
  std::vector<double> g(n * n);
  for (std::size_t i = 0; i < n * n; ++i) g[i] = static_cast<double>(q.gram()[i]);
  double total = 0;
  std::vector<double> x(n), gx(n);
  std::vector<int> idx(n - 1 == 0 ? 1 : n - 1, 0);
  for (std::size_t chart = 0; chart < n; ++chart) {
    std::vector<std::size_t> axes;
    for (std::size_t j = 0; j < n; ++j)
      if (j != chart) axes.push_back(j);
    double cell_volume = 1;
    std::vector<double> step(axes.size());
    for (std::size_t a = 0; a < axes.size(); ++a) {
      step[a] = (dom.hi[axes[a]] - dom.lo[axes[a]]) / cells;
      cell_volume *= step[a];
    }
    std::fill(idx.begin(), idx.end(), 0);
    const double a2 = g[chart * n + chart];
    while (true) {
      for (std::size_t a = 0; a < axes.size(); ++a) x[axes[a]] = dom.lo[axes[a]] + (idx[a] + 0.5) * step[a];
      double rest_sq = 0;
      if (dom.radius_sq)
        for (auto j : axes) rest_sq += x[j] * x[j];
      if (!dom.radius_sq || rest_sq <= *dom.radius_sq) {
        // a2 t^2 + b t + c = 0 in the chart coordinate t.
        double b = 0, c = -m;
        for (auto j : axes) {
          b += 2 * g[chart * n + j] * x[j];
          for (auto k : axes) c += g[j * n + k] * x[j] * x[k];
        }
        double roots[2];
        int nroots = 0;
        if (a2 != 0) {
          double disc = b * b - 4 * a2 * c;
          if (disc >= 0) {
            double s = std::sqrt(disc);
            double qq = -0.5 * (b + (b >= 0 ? s : -s));
            if (qq != 0) {
              roots[nroots++] = qq / a2;
              if (disc > 0) roots[nroots++] = c / qq;
            } else {
              roots[nroots++] = 0;
            }
          }
        } else if (b != 0) {
          roots[nroots++] = -c / b;
        }
        for (int r = 0; r < nroots; ++r) {
          double t = roots[r];
          if (!dom.inside_axis(chart, t)) continue;
          if (dom.radius_sq && rest_sq + t * t > *dom.radius_sq) continue;
          x[chart] = t;
          for (std::size_t i = 0; i < n; ++i) {
            double s = 0;
            for (std::size_t j = 0; j < n; ++j) s += g[i * n + j] * x[j];
            gx[i] = std::fabs(s);
          }
          bool owns = true;
          for (std::size_t j = 0; j < n && owns; ++j) {
            if (j < chart) owns = gx[chart] > gx[j];
            else if (j > chart) owns = gx[chart] >= gx[j];
          }
          if (!owns || gx[chart] == 0) continue;
          total += cell_volume / (2 * gx[chart]);
        }
      }
      std::size_t a = 0;
      while (a < axes.size()) {
        if (++idx[a] < cells) break;
        idx[a] = 0;
        ++a;
      }
      if (a == axes.size()) break;
    }
  }
  return total;
}

}  // namespace

RealDensity real_density(const QuadraticForm& q, std::int64_t m, const RealRegion& region,
                         const RealDensityOptions& options) {
  const std::size_t n = q.dim();
  require(n >= 2, ErrorCode::InvalidArgument, "real density needs n >= 2");
  require(options.base_cells >= 1 && options.max_levels >= 1, ErrorCode::InvalidArgument,
          "quadrature grid must be nonempty");
  Domain dom = make_domain(n, region);
  if (m == 0) {
    bool origin = true;
    for (std::size_t i = 0; i < n; ++i) origin = origin && dom.lo[i] <= 0 && dom.hi[i] >= 0;
    if (origin) fail(ErrorCode::ChartDegenerate, "region contains the singular point x = 0 of q = 0");
  }
  RealDensity out;
  const double cell_cap = static_cast<double>(options.max_cells);
  int cells = options.base_cells;
  for (int level = 0; level <= options.max_levels; ++level) {
    if (level > 0 && std::pow(static_cast<double>(cells) * 2, static_cast<double>(n - 1)) > cell_cap) break;
    if (level > 0) cells *= 2;
    out.history.push_back(integrate(q, static_cast<double>(m), dom, cells));
    out.cells_per_axis = cells;
  }
  out.value = out.history.back();
  out.error = out.history.size() >= 2 ? std::fabs(out.history.back() - out.history[out.history.size() - 2]) : out.value;
  return out;
}

void require_prediction_domain(const QuadraticForm& q, std::int64_t m) {
  if (q.dim() < 4)
    fail(ErrorCode::InvalidArgument,
         "density predictions need n >= 4: for n = 3 the density function takes values in {0,2} and is not modelled");
  if (!forms::represents_global(q, m))
    fail(ErrorCode::InvalidArgument, "q = " + std::to_string(m) + " has no rational solution; prediction refused");
}

FiniteProduct finite_product(const QuadraticForm& q, std::int64_t m, std::int64_t p_cut, std::int64_t skip,
                             const HLOptions& options) {
  FiniteProduct out;
  const Integer bad = Integer(2) * q.det() * Integer(static_cast<long>(m));
  for (auto [p, value] : options.factor_overrides) {
    require(p <= p_cut && p != skip && is_prime(static_cast<std::uint64_t>(p)), ErrorCode::InvalidArgument,
            "factor override at p=" + std::to_string(p) + " is outside the product");
    (void)value;
  }
  for (auto up : primes_up_to(static_cast<std::uint64_t>(std::max<std::int64_t>(p_cut, 1)))) {
    const auto p = static_cast<std::int64_t>(up);
    if (p == skip) continue;
    LocalDensity f;
    auto it = options.factor_overrides.find(p);
    if (it != options.factor_overrides.end()) {
      f = LocalDensity{p, it->second, 0, true};
    } else {
      f = local_density(q, m, p, options.counting);
      if (bad % p != 0) {
        double dev = std::fabs(f.value.get_d() - 1) * static_cast<double>(p) * static_cast<double>(p);
        out.envelope_constant = std::max(out.envelope_constant, dev);
      }
    }
    out.product *= f.value.get_d();
    out.factors.push_back(std::move(f));
  }
  return out;
}

HLPrediction assemble_prediction(const RealDensity& sigma_inf, std::optional<Rational> padic_volume,
                                 const FiniteProduct& product, std::int64_t p_cut) {
  HLPrediction out;
  out.sigma_inf = sigma_inf;
  out.padic_volume = std::move(padic_volume);
  out.factors = product.factors;
  out.finite_product = product.product;
  out.p_cut = p_cut;
  out.envelope_constant = product.envelope_constant;
  out.tail_log_bound = 2 * product.envelope_constant / static_cast<double>(p_cut);
  out.total = sigma_inf.value * product.product * (out.padic_volume ? out.padic_volume->get_d() : 1.0);
  return out;
}

HLPrediction hl_prediction(const QuadraticForm& q, std::int64_t m, const RealRegion& region,
                           std::optional<SData> s_data, const HLOptions& options) {
  require_prediction_domain(q, m);
  require(options.p_cut >= 2, ErrorCode::InvalidArgument, "P_cut must be at least 2");
  RealDensity sigma = real_density(q, m, region, options.quadrature);
  std::optional<Rational> volume;
  std::int64_t skip = 0;
  if (s_data) {
    volume = padic_ball_volume(q, m, s_data->p0, s_data->h, options.counting);
    skip = s_data->p0;
  }
  FiniteProduct product = finite_product(q, m, options.p_cut, skip, options);
  return assemble_prediction(sigma, volume, product, options.p_cut);
}

ExponentFit volume_exponent_fit(const std::vector<std::pair<int, double>>& series, std::int64_t p0) {
  if (series.size() < 3) fail(ErrorCode::DegenerateFit, "exponent fit needs at least 3 points");
  require(p0 >= 2, ErrorCode::InvalidArgument, "p0 must be at least 2");
  const double lp = std::log(static_cast<double>(p0));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [h, v] : series) {
    if (!(v > 0)) fail(ErrorCode::DegenerateFit, "volume must be positive");
    double x = h * lp, y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(series.size());
  const double den = k * sxx - sx * sx;
  if (std::fabs(den) < 1e-12) fail(ErrorCode::DegenerateFit, "all heights coincide");
  ExponentFit fit;
  fit.slope = (k * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / k;
  double rss = 0;
  for (auto [h, v] : series) {
    double r = std::log(v) - (fit.intercept + fit.slope * h * lp);
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / k);
  return fit;
}

}  // namespace aquad::density
