#include "aquad/equidist.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "aquad/error.hpp"

namespace aquad::equidist {

namespace {

std::vector<std::pair<std::int64_t, int>> prime_powers(std::int64_t l) {
  std::vector<std::pair<std::int64_t, int>> out;
  auto f = factorize(static_cast<std::uint64_t>(l));
  for (std::size_t i = 0; i < f.size();) {
    std::size_t j = i;
    while (j < f.size() && f[j] == f[i]) ++j;
    out.emplace_back(static_cast<std::int64_t>(f[i]), static_cast<int>(j - i));
    i = j;
  }
  return out;
}

// v_p of the gradient 2 G x, capped at cap.
int gradient_valuation(const QuadraticForm& q, std::span<const std::int64_t> x, std::int64_t p, int cap) {
  const std::size_t n = q.dim();
  int best = cap;
  for (std::size_t i = 0; i < n; ++i) {
    i128 s = 0;
    for (std::size_t j = 0; j < n; ++j) s += static_cast<i128>(q.entry(i, j)) * x[j];
    s *= 2;
    if (s == 0) continue;
    int v = 0;
    while (v < best && s % p == 0) {
      s /= p;
      ++v;
    }
    best = std::min(best, v);
  }
  return best;
}

}  // namespace

CongruenceNeighborhood::CongruenceNeighborhood(const QuadraticForm& q, std::int64_t m, std::int64_t modulus,
                                               std::vector<std::int64_t> residue, std::int64_t p0)
    : modulus_(modulus), residue_(std::move(residue)) {
  require(modulus_ >= 1, ErrorCode::InvalidArgument, "modulus must be positive");
  require(residue_.size() == q.dim(), ErrorCode::InvalidArgument,
          "residue has " + std::to_string(residue_.size()) + " coordinates, form has " + std::to_string(q.dim()));
  require(std::gcd(modulus_, p0) == 1, ErrorCode::InvalidArgument, "modulus must be coprime to p0");
  for (auto& r : residue_) r = mod_floor(r, modulus_);
  if (modulus_ > 1)
    require(q.eval_mod(residue_, modulus_) == mod_floor(m, modulus_), ErrorCode::InvalidArgument,
            "residue " + to_string() + " is not on the quadric");
  factors_ = modulus_ > 1 ? prime_powers(modulus_) : std::vector<std::pair<std::int64_t, int>>{};
}

CongruenceNeighborhood CongruenceNeighborhood::trivial(std::size_t n) {
  CongruenceNeighborhood c;
  c.residue_.assign(n, 0);
  return c;
}

modular::ResiduePoint CongruenceNeighborhood::component(std::int64_t p) const {
  for (auto [q, e] : factors_)
    if (q == p) {
      modular::ResiduePoint r;
      r.modulus = checked_pow(p, static_cast<unsigned>(e));
      for (auto v : residue_) r.coords.push_back(mod_floor(v, r.modulus));
      r.on_quadric = true;
      return r;
    }
  fail(ErrorCode::InvalidArgument, std::to_string(p) + " does not divide the modulus");
}

bool CongruenceNeighborhood::contains(const IntegralPoint& x) const {
  if (modulus_ == 1) return true;
  for (auto [p, e] : factors_) {
    auto r = modular::reduce_point(x, p, e);
    auto c = component(p);
    if (r.coords != c.coords) return false;
  }
  return true;
}

std::string CongruenceNeighborhood::to_string() const {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < residue_.size(); ++i) out << (i ? "," : "") << residue_[i];
  out << ") mod " << modulus_;
  return out.str();
}

std::string Heights::to_string() const { return N ? "N=" + std::to_string(*N) : "ball"; }

namespace {

struct Setup {
  enumeration::ScanBounds bounds;
  std::int64_t target;
  std::int64_t p0 = 1;
  int h = 0;
};

Setup make_setup(const QuadricInstance& inst, const Heights& heights) {
  Setup s;
  if (heights.N) {
    s.bounds = enumeration::ball_bounds(inst.dim(), *heights.N, false);
    s.target = inst.m;
    return s;
  }
  require(inst.s_data && inst.region, ErrorCode::InvalidArgument, "p-adic heights need p0, h and a region");
  s.p0 = inst.s_data->p0;
  s.h = inst.s_data->h;
  s.bounds = enumeration::scaled_box(*inst.region, s.p0, s.h);
  s.target = checked_mul(checked_pow(s.p0, static_cast<unsigned>(2 * s.h)), inst.m);
  return s;
}

}  // namespace

std::uint64_t count_in_neighborhood(const QuadricInstance& inst, const Heights& heights,
                                    const CongruenceNeighborhood& nbhd, const enumeration::EnumerateOptions& options) {
  Setup s = make_setup(inst, heights);
  const std::int64_t l = nbhd.modulus();
  if (l > 1) {
    // x = y / p0^h == xi  <=>  y == p0^h xi (mod l).
    const std::int64_t scale = static_cast<std::int64_t>(
        pow_mod(static_cast<std::uint64_t>(s.p0), static_cast<std::uint64_t>(s.h), static_cast<std::uint64_t>(l)));
    s.bounds.modulus = l;
    for (auto r : nbhd.residue())
      s.bounds.residue.push_back(static_cast<std::int64_t>(
          mul_mod(static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(scale), static_cast<std::uint64_t>(l))));
  }
  std::uint64_t count = 0;
  enumeration::scan_quadric(inst.form, s.target, s.bounds,
                            [&](std::span<const std::int64_t>) {
                              if (options.max_points && count >= *options.max_points)
                                fail(ErrorCode::CapExceeded,
                                     "point cap " + std::to_string(*options.max_points) + " exceeded");
                              ++count;
                              return true;
                            },
                            enumeration::ScanOptions{options.threads, options.deadline});
  return count;
}

std::map<std::vector<std::int64_t>, std::uint64_t> class_counts(const QuadricInstance& inst, const Heights& heights,
                                                                std::int64_t modulus,
                                                                const enumeration::EnumerateOptions& options) {
  require(modulus >= 1, ErrorCode::InvalidArgument, "modulus must be positive");
  Setup s = make_setup(inst, heights);
  require(std::gcd(modulus, s.p0) == 1, ErrorCode::InvalidArgument, "modulus must be coprime to p0");
  const auto l = static_cast<std::uint64_t>(modulus);
  const std::uint64_t inv =
      modulus == 1 ? 0
                   : static_cast<std::uint64_t>(inv_mod(
                         static_cast<std::int64_t>(pow_mod(static_cast<std::uint64_t>(s.p0), static_cast<std::uint64_t>(s.h), l)),
                         modulus));
  std::map<std::vector<std::int64_t>, std::uint64_t> out;
  std::vector<std::int64_t> key(inst.dim());
  std::uint64_t count = 0;
  enumeration::scan_quadric(inst.form, s.target, s.bounds,
                            [&](std::span<const std::int64_t> y) {
                              if (options.max_points && count >= *options.max_points)
                                fail(ErrorCode::CapExceeded,
                                     "point cap " + std::to_string(*options.max_points) + " exceeded");
                              ++count;
                              for (std::size_t i = 0; i < y.size(); ++i)
                                key[i] = modulus == 1 ? 0
                                                      : static_cast<std::int64_t>(mul_mod(
                                                            static_cast<std::uint64_t>(mod_floor(y[i], modulus)), inv, l));
                              ++out[key];
                              return true;
                            },
                            enumeration::ScanOptions{options.threads, options.deadline});
  return out;
}

std::vector<std::vector<std::int64_t>> residues_on_quadric(const QuadraticForm& q, std::int64_t m,
                                                           std::int64_t modulus, bool smooth_only, std::uint64_t cap) {
  require(modulus >= 1, ErrorCode::InvalidArgument, "modulus must be positive");
  const std::size_t n = q.dim();
  long double total = std::pow(static_cast<long double>(modulus), static_cast<long double>(n));
  if (total > static_cast<long double>(cap))
    fail(ErrorCode::CapExceeded, "residue scan mod " + std::to_string(modulus) + " exceeds cap " + std::to_string(cap));
  auto primes = modulus > 1 ? prime_powers(modulus) : std::vector<std::pair<std::int64_t, int>>{};
  std::vector<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> x(n, 0);
  const std::int64_t target = mod_floor(m, modulus);
  while (true) {
    if (q.eval_mod(x, modulus) == target) {
      bool keep = true;
      if (smooth_only)
        for (auto [p, e] : primes)
          if (gradient_valuation(q, x, p, 1) > 0) keep = false;
      if (keep) out.push_back(x);
    }
    std::size_t i = n;
    while (true) {
      if (i == 0) return out;
      --i;
      if (++x[i] < modulus) break;
      x[i] = 0;
    }
  }
}

Rational class_measure(const QuadraticForm& q, std::int64_t m, const modular::ResiduePoint& xi, std::int64_t p,
                       std::uint64_t cap) {
  const std::size_t n = q.dim();
  const std::int64_t pe = xi.modulus;
  int e = 0;
  for (std::int64_t t = pe; t > 1; t /= p) {
    require(t % p == 0, ErrorCode::InvalidArgument, "residue modulus is not a power of p");
    ++e;
  }
  require(e >= 1, ErrorCode::InvalidArgument, "residue modulus must be a positive power of p");
  if (q.eval_mod(xi.coords, pe) != mod_floor(m, pe)) return Rational(0);
  const int t = gradient_valuation(q, xi.coords, p, e);
  const int kstar = std::max(2 * t + 1, e + t);
  auto measure_at = [&](int k) {
    const std::int64_t pk = checked_pow(p, static_cast<unsigned>(k));
    const std::int64_t lifts = checked_pow(p, static_cast<unsigned>(k - e));
    long double total = std::pow(static_cast<long double>(lifts), static_cast<long double>(n));
    if (total > static_cast<long double>(cap))
      fail(ErrorCode::CapExceeded, "lifting scan mod " + std::to_string(p) + "^" + std::to_string(k) + " exceeds cap");
    const std::int64_t target = mod_floor(m, pk);
    std::vector<std::int64_t> z(n, 0), x(n);
    std::uint64_t count = 0;
    while (true) {
      for (std::size_t i = 0; i < n; ++i) x[i] = mod_floor(xi.coords[i] + pe * z[i], pk);
      if (q.eval_mod(x, pk) == target) ++count;
      std::size_t i = n;
      bool done = false;
      while (true) {
        if (i == 0) {
          done = true;
          break;
        }
        --i;
        if (++z[i] < lifts) break;
        z[i] = 0;
      }
      if (done) break;
    }
    Integer den;
    mpz_ui_pow_ui(den.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k) * (n - 1));
    Rational r(Integer(static_cast<unsigned long>(count)), den);
    r.canonicalize();
    return r;
  };
  Rational a = measure_at(kstar), b = measure_at(kstar + 1);
  if (a != b)
    fail(ErrorCode::NotStabilized, "class measure at p=" + std::to_string(p) + " not stable at k=" + std::to_string(kstar));
  return b;
}

MainTermContext prepare_main_term(const QuadricInstance& inst, const Heights& heights,
                                  const density::HLOptions& options) {
  density::require_prediction_domain(inst.form, inst.m);
  MainTermContext ctx{inst.form, inst.m, {}, std::nullopt, {}, options.p_cut, 0};
  if (heights.N) {
    ctx.sigma_inf = density::real_density(inst.form, inst.m, density::Ball{static_cast<double>(*heights.N)},
                                          options.quadrature);
  } else {
    require(inst.s_data && inst.region, ErrorCode::InvalidArgument, "p-adic heights need p0, h and a region");
    ctx.p0 = inst.s_data->p0;
    ctx.sigma_inf = density::real_density(inst.form, inst.m, *inst.region, options.quadrature);
    ctx.padic_volume = density::padic_ball_volume(inst.form, inst.m, ctx.p0, inst.s_data->h, options.counting);
  }
  ctx.product = density::finite_product(inst.form, inst.m, options.p_cut, ctx.p0, options);
  return ctx;
}

double main_term(const MainTermContext& ctx, const CongruenceNeighborhood& nbhd) {
  double product = ctx.product.product;
  for (auto [p, e] : nbhd.factors()) {
    require(p <= ctx.p_cut && p != ctx.p0, ErrorCode::InvalidArgument,
            "modulus prime " + std::to_string(p) + " lies outside the local product");
    auto it = std::find_if(ctx.product.factors.begin(), ctx.product.factors.end(),
                           [p = p](const density::LocalDensity& f) { return f.p == p; });
    const double sigma = it->value.get_d();
    const double mu = class_measure(ctx.form, ctx.m, nbhd.component(p), p).get_d();
    product = product / sigma * mu;
  }
  return ctx.sigma_inf.value * product * (ctx.padic_volume ? ctx.padic_volume->get_d() : 1.0);
}

double main_term(const QuadricInstance& inst, const Heights& heights, const CongruenceNeighborhood& nbhd,
                 const density::HLOptions& options) {
  return main_term(prepare_main_term(inst, heights, options), nbhd);
}

DiscrepancyFit fit_discrepancy(const std::vector<DiscrepancyRecord>& records) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : records)
    if (r.abs_err > 0 && r.main > 0) pts.emplace_back(std::log(r.main), std::log(r.abs_err));
  if (pts.size() < 2) fail(ErrorCode::DegenerateFit, "discrepancy fit needs two records with nonzero error");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double k = static_cast<double>(pts.size());
  const double vx = k * sxx - sx * sx, vy = k * syy - sy * sy, cxy = k * sxy - sx * sy;
  if (vx <= 1e-12 * std::max(1.0, k * sxx)) fail(ErrorCode::DegenerateFit, "main terms do not vary");
  DiscrepancyFit fit;
  fit.slope = cxy / vx;
  fit.delta_hat = 1 - fit.slope;
  fit.points_used = pts.size();
  fit.r_squared = vy > 1e-12 * std::max(1.0, k * syy) ? (cxy * cxy) / (vx * vy) : 0.0;
  fit.low_confidence = fit.points_used < 4 || fit.r_squared < 0.5 || fit.delta_hat <= 0 || fit.delta_hat >= 1;
  return fit;
}

DiscrepancySeries discrepancy_series(const QuadricInstance& inst, const CongruenceNeighborhood& nbhd,
                                     const std::vector<ScheduleEntry>& schedule, const density::HLOptions& hl_options,
                                     const enumeration::EnumerateOptions& options) {
  if (schedule.size() < 4) fail(ErrorCode::DegenerateFit, "discrepancy series needs at least 4 schedule points");
  DiscrepancySeries out;
  std::optional<MainTermContext> padic_ctx;
  for (const auto& entry : schedule) {
    DiscrepancyRecord rec;
    rec.modulus = nbhd.modulus();
    double main;
    if (entry.N) {
      Heights heights{entry.N};
      rec.height = "N=" + std::to_string(*entry.N);
      rec.parameter = static_cast<double>(*entry.N);
      rec.count = count_in_neighborhood(inst, heights, nbhd, options);
      main = main_term(inst, heights, nbhd, hl_options);
    } else {
      require(inst.s_data && inst.region, ErrorCode::InvalidArgument, "p-adic schedule needs p0 and a region");
      QuadricInstance at(inst.form, inst.m, SData{inst.s_data->p0, entry.h}, inst.region);
      rec.height = "h=" + std::to_string(entry.h);
      rec.parameter = entry.h;
      rec.count = count_in_neighborhood(at, Heights{}, nbhd, options);
      if (!padic_ctx) {
        padic_ctx = prepare_main_term(at, Heights{}, hl_options);
      } else {
        padic_ctx->padic_volume =
            density::padic_ball_volume(inst.form, inst.m, inst.s_data->p0, entry.h, hl_options.counting);
      }
      main = main_term(*padic_ctx, nbhd);
    }
    rec.main = main;
    rec.abs_err = std::fabs(static_cast<double>(rec.count) - main);
    rec.rel_err = rec.abs_err / main;
    out.records.push_back(rec);
  }
  out.fit = fit_discrepancy(out.records);
  return out;
}

}  // namespace aquad::equidist
