#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "aquad/density.hpp"
#include "aquad/enumerate.hpp"
#include "aquad/equidist.hpp"
#include "aquad/forms.hpp"
#include "aquad/geomsieve.hpp"
#include "aquad/harness.hpp"
#include "aquad/modular.hpp"
#include "aquad/sieve.hpp"

namespace aquad::harness {

namespace {

using Clock = std::chrono::steady_clock;
using forms::Box;
using forms::QuadraticForm;

struct Context {
  const ExperimentConfig& cfg;
  Report& report;
  std::uint64_t points = 0;

  void warn(WarningCode code, std::string detail) { report.warnings.push_back({code, std::move(detail)}); }
};

QuadraticForm form_of(const ExperimentConfig& cfg) { return QuadraticForm::parse(cfg.get_string("form")); }

std::optional<SData> s_data_of(const ExperimentConfig& cfg) {
  if (cfg.has("p0") != cfg.has("h"))
    fail(ErrorCode::ConfigInvalid, std::string("field '") + (cfg.has("p0") ? "h" : "p0") + "': p0 and h go together");
  if (!cfg.has("p0")) return std::nullopt;
  return SData{cfg.get_int("p0"), static_cast<int>(cfg.get_int("h"))};
}

QuadricInstance instance_of(const ExperimentConfig& cfg) {
  auto q = form_of(cfg);
  std::optional<Box> region;
  if (cfg.has("region")) region = Box::parse(cfg.get_string("region"), q.dim());
  return QuadricInstance(q, cfg.get_int("m"), s_data_of(cfg), region);
}

enumeration::EnumerateOptions enum_options(const ExperimentConfig& cfg) {
  enumeration::EnumerateOptions o;
  o.threads = cfg.threads;
  o.sup_norm = cfg.get_bool("sup_norm", false);
  if (cfg.has("point_cap")) o.max_points = static_cast<std::uint64_t>(cfg.get_int("point_cap"));
  if (cfg.has("time_cap"))
    o.deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                    std::chrono::duration<double>(cfg.get_number("time_cap", 0)));
  return o;
}

std::uint64_t scan_cap(const ExperimentConfig& cfg) {
  return cfg.has("scan_cap") ? static_cast<std::uint64_t>(cfg.get_int("scan_cap")) : modular::kScanCap;
}

std::vector<std::int64_t> primes_of(const ExperimentConfig& cfg, std::int64_t default_max) {
  if (cfg.has("primes")) {
    auto ps = cfg.get_list("primes");
    for (auto p : ps)
      if (p < 2 || !is_prime(static_cast<std::uint64_t>(p)))
        fail(ErrorCode::ConfigInvalid, "field 'primes': " + std::to_string(p) + " is not prime");
    return ps;
  }
  std::vector<std::int64_t> out;
  for (auto p : primes_up_to(static_cast<std::uint64_t>(std::max<std::int64_t>(cfg.get_int("p_max", default_max), 0))))
    out.push_back(static_cast<std::int64_t>(p));
  return out;
}

json coord_cell(const IntegralPoint& x, std::size_t i) {
  if (x.scale == 0) return x.numerators[i];
  return aquad::to_string(x.coord(i));
}

json point_json(const IntegralPoint& x) {
  json out = json::array();
  for (std::size_t i = 0; i < x.dim(); ++i) out.push_back(aquad::to_string(x.coord(i)));
  return out;
}

std::string residue_string(const std::vector<std::int64_t>& r) {
  std::string s;
  for (std::size_t i = 0; i < r.size(); ++i) s += (i ? " " : "") + std::to_string(r[i]);
  return s;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ---------------------------------------------------------------- enumerate

void run_enumerate(Context& ctx) {
  const auto& cfg = ctx.cfg;
  auto inst = instance_of(cfg);
  const std::size_t n = inst.dim();
  for (std::size_t i = 0; i < n; ++i) ctx.report.columns.push_back("x" + std::to_string(i + 1));
  ctx.report.columns.push_back("height_real");
  const bool padic = !cfg.has("height");
  if (padic) ctx.report.columns.push_back("height_padic");
  auto visit = [&](const IntegralPoint& x) {
    std::vector<json> row;
    for (std::size_t i = 0; i < n; ++i) row.push_back(coord_cell(x, i));
    row.push_back(enumeration::height_real(x));
    if (padic) {
      auto hp = enumeration::height_padic(x);
      row.push_back(hp ? json(*hp) : json(nullptr));
    }
    ctx.report.rows.push_back(std::move(row));
    ++ctx.points;
    return true;
  };
  if (padic) {
    if (!inst.s_data) fail(ErrorCode::ConfigInvalid, "field 'height': required unless p0, h and region are given");
    enumeration::enumerate_s_integral(inst, visit, enum_options(cfg));
  } else {
    enumeration::enumerate_integral(inst, cfg.get_int("height"), visit, enum_options(cfg));
  }
  ctx.report.summary["count"] = ctx.report.rows.size();
}

// ---------------------------------------------------------------- count-mod

void run_count_mod(Context& ctx) {
  const auto& cfg = ctx.cfg;
  auto q = form_of(cfg);
  const auto m = cfg.get_int("m");
  const int k = static_cast<int>(cfg.get_int("k", 1));
  if (k < 1) fail(ErrorCode::ConfigInvalid, "field 'k': must be at least 1");
  modular::PrimePowerOptions opts;
  opts.scan_cap = scan_cap(cfg);
  std::optional<modular::SubvarietySpec> sub;
  if (cfg.has("sub")) {
    std::vector<Polynomial> polys;
    for (const auto& p : cfg.doc.at("sub")) polys.push_back(poly_from_json(p, q.dim()));
    sub.emplace(polys);
    for (const auto& a : sub->advisories()) ctx.warn(WarningCode::AdvisoryCoprimality, a);
  }
  ctx.report.columns = {"p", "k", "count", "formula"};
  if (sub) ctx.report.columns.push_back("subvariety_count");
  for (auto p : primes_of(cfg, 31)) {
    Integer count = modular::count_prime_power(q, m, p, k, opts);
    json formula = nullptr;
    if (k == 1 && p != 2 && q.det() % p != 0) formula = modular::count_quadric_ffield_exact(q, m, p).get_str();
    std::vector<json> row{p, k, count.get_str(), formula};
    if (sub) row.push_back(modular::count_subvariety_ffield(*sub, q, m, p, opts.scan_cap));
    ctx.report.rows.push_back(std::move(row));
  }
}

// ---------------------------------------------------------------- density

void run_density(Context& ctx) {
  const auto& cfg = ctx.cfg;
  auto q = form_of(cfg);
  const auto m = cfg.get_int("m");
  modular::PrimePowerOptions opts;
  opts.scan_cap = scan_cap(cfg);
  ctx.report.columns = {"p", "sigma_p", "sigma_p_float", "k_used", "stabilized"};
  for (auto p : primes_of(cfg, 100)) {
    try {
      auto d = density::local_density(q, m, p, opts);
      ctx.report.rows.push_back({p, aquad::to_string(d.value), d.value.get_d(), d.k_used, d.stabilized});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotStabilized) throw;
      ctx.warn(WarningCode::NotStabilized, "p=" + std::to_string(p));
      ctx.report.rows.push_back({p, nullptr, nullptr, nullptr, false});
    }
  }
  const auto s_data = s_data_of(cfg);
  if (cfg.get_bool("ball", false)) {
    if (!s_data) fail(ErrorCode::ConfigInvalid, "field 'ball': needs p0 and h");
    ctx.report.summary["padic_ball_volume"] = aquad::to_string(density::padic_ball_volume(q, m, s_data->p0, s_data->h, opts));
  }
  if (!cfg.has("region") && !cfg.has("height")) {
    if (cfg.get_bool("real", false)) fail(ErrorCode::ConfigInvalid, "field 'real': needs region or height");
    return;
  }
  density::RealRegion region = cfg.has("region")
                                   ? density::RealRegion(Box::parse(cfg.get_string("region"), q.dim()))
                                   : density::RealRegion(density::Ball{static_cast<double>(cfg.get_int("height"))});
  if (cfg.get_bool("real", false)) {
    auto rd = density::real_density(q, m, region);
    ctx.report.summary["real_density"] = {{"value", rd.value}, {"error", rd.error}, {"cells_per_axis", rd.cells_per_axis}};
  }
  try {
    density::require_prediction_domain(q, m);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InvalidArgument) throw;
    ctx.warn(WarningCode::PredictionSkipped, e.what());
    return;
  }
  density::HLOptions hl;
  hl.p_cut = cfg.get_int("p_cut", 997);
  hl.counting = opts;
  auto pred = density::hl_prediction(q, m, region, s_data, hl);
  json s;
  s["sigma_inf"] = pred.sigma_inf.value;
  s["sigma_inf_error"] = pred.sigma_inf.error;
  s["padic_volume"] = pred.padic_volume ? json(aquad::to_string(*pred.padic_volume)) : json(nullptr);
  s["finite_product"] = pred.finite_product;
  s["p_cut"] = pred.p_cut;
  s["envelope_constant"] = pred.envelope_constant;
  s["tail_log_bound"] = pred.tail_log_bound;
  s["prediction"] = pred.total;
  ctx.report.summary["hardy_littlewood"] = s;
}

// ---------------------------------------------------------------- equidist

void run_equidist(Context& ctx) {
  const auto& cfg = ctx.cfg;
  auto q = form_of(cfg);
  const auto m = cfg.get_int("m");
  const auto moduli = cfg.has("moduli") ? cfg.get_list("moduli") : std::vector<std::int64_t>{3};
  std::optional<Box> region;
  if (cfg.has("region")) region = Box::parse(cfg.get_string("region"), q.dim());

  struct Step {
    std::string label;
    double parameter;
    QuadricInstance inst;
    equidist::Heights heights;
  };
  std::vector<Step> steps;
  if (cfg.has("h_grid")) {
    const auto p0 = cfg.get_int("p0");
    for (auto h : cfg.get_list("h_grid"))
      steps.push_back({"h=" + std::to_string(h), static_cast<double>(h),
                       QuadricInstance(q, m, SData{p0, static_cast<int>(h)}, region), {}});
  } else if (cfg.has("height_grid")) {
    for (auto N : cfg.get_list("height_grid"))
      steps.push_back({"N=" + std::to_string(N), static_cast<double>(N), QuadricInstance(q, m, std::nullopt, region),
                       equidist::Heights{N}});
  } else {
    fail(ErrorCode::ConfigInvalid, "field 'h_grid': equidist needs h_grid or height_grid");
  }

  density::HLOptions hl;
  hl.p_cut = cfg.get_int("p_cut", 997);
  hl.counting.scan_cap = scan_cap(cfg);
  auto eopts = enum_options(cfg);

  ctx.report.columns = {"schedule", "parameter", "modulus", "residue", "smooth", "count", "main", "abs_err", "rel_err"};
  std::map<std::int64_t, std::vector<equidist::DiscrepancyRecord>> records;
  std::map<std::int64_t, double> worst_last;
  bool partition_exact = true;
  std::map<std::int64_t, std::vector<std::vector<std::int64_t>>> smooth;
  for (auto l : moduli) smooth[l] = equidist::residues_on_quadric(q, m, l, true, scan_cap(cfg));
  std::optional<std::vector<std::int64_t>> only;
  if (cfg.has("residue")) {
    if (moduli.size() != 1) fail(ErrorCode::ConfigInvalid, "field 'residue': needs exactly one modulus");
    only = cfg.get_list("residue");
    if (only->size() != q.dim()) fail(ErrorCode::ConfigInvalid, "field 'residue': length differs from the form");
    for (auto& v : *only) v = mod_floor(v, moduli.front());
    equidist::CongruenceNeighborhood(q, m, moduli.front(), *only, cfg.has("p0") ? cfg.get_int("p0") : 1);
  }

  for (std::size_t si = 0; si < steps.size(); ++si) {
    const auto& step = steps[si];
    std::uint64_t total = 0;
    auto count_all = [&](const IntegralPoint&) {
      ++total;
      return true;
    };
    if (step.heights.N)
      enumeration::enumerate_integral(step.inst, *step.heights.N, count_all, eopts);
    else
      enumeration::enumerate_s_integral(step.inst, count_all, eopts);
    ctx.points += total;
    auto main_ctx = equidist::prepare_main_term(step.inst, step.heights, hl);
    for (auto l : moduli) {
      auto counts = equidist::class_counts(step.inst, step.heights, l, eopts);
      std::uint64_t sum = 0;
      for (const auto& [r, c] : counts) sum += c;
      if (sum != total) partition_exact = false;
      std::set<std::vector<std::int64_t>> smooth_set(smooth[l].begin(), smooth[l].end());
      std::set<std::vector<std::int64_t>> keys(smooth_set);
      for (const auto& [r, c] : counts) keys.insert(r);
      if (only) keys = {*only};
      double worst = 0;
      for (const auto& r : keys) {
        auto it = counts.find(r);
        const std::uint64_t c = it == counts.end() ? 0 : it->second;
        const bool is_smooth = smooth_set.count(r) != 0;
        json main = nullptr, abs_err = nullptr, rel = nullptr;
        if (is_smooth || only) {
          const auto p0 = step.inst.s_data ? step.inst.s_data->p0 : 1;
          equidist::CongruenceNeighborhood nb(q, m, l, r, p0);
          double mt = equidist::main_term(main_ctx, nb);
          double err = std::fabs(static_cast<double>(c) - mt);
          main = mt;
          abs_err = err;
          rel = finite_or_null(err / mt);
          worst = std::max(worst, err / mt);
          records[l].push_back({step.label, step.parameter, c, mt, err, err / mt, l});
        }
        ctx.report.rows.push_back(
            {step.label, step.parameter, l, residue_string(r), is_smooth, c, main, abs_err, rel});
      }
      if (si + 1 == steps.size()) worst_last[l] = worst;
    }
  }
  json fits = json::object();
  for (auto l : moduli) {
    json f;
    f["max_rel_err_last"] = worst_last[l];
    try {
      auto fit = equidist::fit_discrepancy(records[l]);
      f["slope"] = fit.slope;
      f["delta_hat"] = fit.delta_hat;
      f["r_squared"] = fit.r_squared;
      f["points_used"] = fit.points_used;
      if (fit.low_confidence) ctx.warn(WarningCode::LowConfidence, "modulus " + std::to_string(l));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateFit) throw;
      ctx.warn(WarningCode::Degenerate, "modulus " + std::to_string(l) + ": " + e.what());
    }
    fits[std::to_string(l)] = f;
  }
  ctx.report.summary["partition_exact"] = partition_exact;
  ctx.report.summary["moduli"] = fits;
}

// ---------------------------------------------------------------- sieve

std::vector<std::int64_t> excluded_of(const ExperimentConfig& cfg) {
  return cfg.has("Sprime") ? cfg.get_list("Sprime") : std::vector<std::int64_t>{};
}

template <class Visit>
void walk_points(Context& ctx, const QuadricInstance& inst, const Visit& visit) {
  const auto& cfg = ctx.cfg;
  if (cfg.has("height"))
    enumeration::enumerate_integral(inst, cfg.get_int("height"), visit, enum_options(cfg));
  else if (inst.s_data && inst.region)
    enumeration::enumerate_s_integral(inst, visit, enum_options(cfg));
  else
    fail(ErrorCode::ConfigInvalid, "field 'height': required unless p0, h and region are given");
}

void run_sieve(Context& ctx) {
  const auto& cfg = ctx.cfg;
  auto inst = instance_of(cfg);
  auto f = cfg.get_poly("f", inst.dim());
  auto excluded = excluded_of(cfg);
  const auto z = cfg.get_int("z");
  const auto y = cfg.get_int("y");
  if (z < 2) fail(ErrorCode::ConfigInvalid, "field 'z': must be at least 2");
  if (y < 1) fail(ErrorCode::ConfigInvalid, "field 'y': must be positive");

  sieve::SequenceBuilder builder(f, excluded);
  walk_points(ctx, inst, [&](const IntegralPoint& x) {
    builder.add(x);
    return true;
  });
  ctx.points = builder.points();
  auto seq = std::move(builder).finish();

  auto filter = sieve::primes_outside(excluded);
  auto table = sieve::density_from_counts(inst.form, inst.m, f, sieve::sifting_primes(filter, z));
  const double X = cfg.has("X") ? cfg.get_number("X", 0) : static_cast<double>(seq.total());
  auto rep = sieve::fundamental_lemma_report(seq, table, filter, X, static_cast<std::uint64_t>(y), z);

  ctx.report.columns = {"d", "count", "expected", "deviation"};
  for (const auto& e : rep.ledger.entries) ctx.report.rows.push_back({e.d, e.count, e.expected, e.deviation});

  json s;
  s["points"] = builder.points();
  s["zero_bucket"] = seq.zero_bucket();
  s["total"] = seq.total();
  s["z"] = rep.z;
  s["y"] = rep.y;
  s["S"] = rep.sifted;
  s["V"] = aquad::to_string(rep.V);
  s["V_float"] = rep.V.get_d();
  s["X"] = rep.X;
  s["main"] = rep.main;
  s["R"] = rep.ledger.total;
  s["R_over_main"] = rep.main > 0 ? json(rep.ledger.total / rep.main) : json(nullptr);
  s["tau_hat"] = rep.tau_hat;
  s["degenerate"] = rep.degenerate;
  s["survivor_indices"] = rep.survivors.size();
  json omega = json::object();
  for (const auto& [p, w] : table.values()) omega[std::to_string(p)] = aquad::to_string(w);
  s["omega"] = omega;
  s["omega_provenance"] = table.provenance();
  ctx.report.summary = s;
  if (rep.degenerate) ctx.warn(WarningCode::Degenerate, "empty sequence or zero main term");
}

// ---------------------------------------------------------------- almost-prime

void run_almost_prime(Context& ctx) {
  const auto& cfg = ctx.cfg;
  auto inst = instance_of(cfg);
  sieve::AlmostPrimeQuery query;
  query.f = cfg.get_poly("f", inst.dim());
  query.excluded = excluded_of(cfg);
  query.M = cfg.get_int("M");
  query.r = static_cast<int>(cfg.get_int("r"));
  query.budget = static_cast<std::uint64_t>(cfg.get_int("budget", 10'000'000));
  if (cfg.has("point_cap")) query.budget = std::min(query.budget, static_cast<std::uint64_t>(cfg.get_int("point_cap")));

  std::optional<std::int64_t> N;
  if (cfg.has("height")) N = cfg.get_int("height");
  else if (!inst.s_data || !inst.region)
    fail(ErrorCode::ConfigInvalid, "field 'height': required unless p0, h and region are given");
  auto res = sieve::almost_prime_search(inst, N, query, cfg.threads);
  ctx.points = res.examined;

  ctx.report.columns = {"distinct_primes", "points"};
  for (const auto& [k, c] : res.histogram) ctx.report.rows.push_back({k, c});
  json s;
  s["found"] = res.found;
  s["examined"] = res.examined;
  s["zero_values"] = res.zero_values;
  s["budget"] = query.budget;
  if (res.found) {
    s["point"] = point_json(*res.point);
    s["value"] = res.value.get_str();
    s["factors"] = res.factors;
    s["distinct"] = res.distinct;
    s["multiplicity"] = res.multiplicity;
    auto cert = sieve::verify_almost_prime(inst, *res.point, query);
    s["certificate"] = {{"valid", cert.valid}, {"factors", cert.factors}, {"reason", cert.reason}};
    if (!cert.valid) fail(ErrorCode::InvariantViolation, "almost-prime certificate rejected: " + cert.reason);
  } else {
    ctx.warn(WarningCode::Exhausted, "no qualifying point within " + std::to_string(query.budget) + " points");
  }
  ctx.report.summary = s;
}

// ---------------------------------------------------------------- geom-sieve

void run_geom_sieve(Context& ctx) {
  const auto& cfg = ctx.cfg;
  auto inst = instance_of(cfg);
  if (!inst.s_data || !inst.region) fail(ErrorCode::ConfigInvalid, "field 'p0': geom-sieve needs p0, h and region");
  std::vector<Polynomial> polys;
  if (cfg.has("polys")) {
    for (const auto& p : cfg.doc.at("polys")) polys.push_back(poly_from_json(p, inst.dim()));
  } else {
    polys.push_back(cfg.get_poly("f", inst.dim()));
    polys.push_back(cfg.get_poly("g", inst.dim()));
  }
  modular::SubvarietySpec spec(polys);
  for (const auto& a : spec.advisories()) ctx.warn(WarningCode::AdvisoryCoprimality, a);

  auto grid = cfg.has("M_grid") ? cfg.get_list("M_grid") : std::vector<std::int64_t>{10, 30, 100, 300};
  std::sort(grid.begin(), grid.end());
  std::optional<std::int64_t> N2;
  if (cfg.has("N2")) N2 = cfg.get_int("N2");

  geomsieve::BadPointOptions bopts;
  bopts.threads = cfg.threads;
  auto base = geomsieve::bad_point_count(inst, spec, grid.front(), N2, bopts);
  ctx.points = base.points;
  const auto [p0, h] = *inst.s_data;
  const double volume = std::pow(static_cast<double>(p0), static_cast<double>(h) * (static_cast<double>(inst.dim()) - 2));

  ctx.report.columns = {"M", "points", "bad", "generic_bad", "verified", "ratio", "bad_over_volume"};
  std::vector<geomsieve::ShapePoint> series;
  std::uint64_t previous = std::numeric_limits<std::uint64_t>::max();
  bool nested = true;
  for (auto M : grid) {
    std::uint64_t bad = 0, generic = 0, verified = 0;
    for (const auto& rec : base.records) {
      bool hit = rec.generic_bad ||
                 std::any_of(rec.witnesses.begin(), rec.witnesses.end(),
                             [&](std::uint64_t p) { return static_cast<std::int64_t>(p) > M; });
      if (!hit) continue;
      ++bad;
      if (rec.generic_bad) ++generic;
      if (rec.verified) ++verified;
    }
    if (bad > previous) nested = false;
    previous = bad;
    const double ratio = base.points ? static_cast<double>(bad) / static_cast<double>(base.points) : 0.0;
    ctx.report.rows.push_back({M, base.points, bad, generic, verified, ratio, static_cast<double>(bad) / volume});
    series.push_back({static_cast<double>(M), static_cast<double>(bad) / volume});
  }
  json s;
  s["nonincreasing"] = nested;
  s["records"] = base.records.size();
  s["all_verified"] = base.verified == base.records.size();
  s["generic_bad"] = base.generic_bad;
  try {
    auto fit = geomsieve::bound_shape_check(series, {geomsieve::ShapeTerm::Constant, geomsieve::ShapeTerm::InvMLogM}, p0);
    json coef = json::object();
    for (std::size_t i = 0; i < fit.terms.size(); ++i) coef[geomsieve::to_string(fit.terms[i])] = fit.coefficients[i];
    s["fit"] = {{"coefficients", coef}, {"residual", fit.residual}};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateFit) throw;
    ctx.warn(WarningCode::Degenerate, e.what());
  }
  ctx.report.summary = s;
  if (!nested) fail(ErrorCode::InvariantViolation, "bad-point counts are not nested in M");
}

// ---------------------------------------------------------------- halfdim

void run_halfdim(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto a = cfg.get_int("a", 1);
  const auto tail = cfg.get_list("tail");
  const auto grid = cfg.get_list("B_grid");
  if (cfg.has("c") == cfg.has("c_per_B2")) fail(ErrorCode::ConfigInvalid, "field 'c': give exactly one of c, c_per_B2");
  ctx.report.columns = {"B", "c", "total", "count", "fraction"};
  double previous = -1;
  double worst_increase = 0;
  for (auto B : grid) {
    const std::int64_t c = cfg.has("c") ? cfg.get_int("c") : checked_mul(cfg.get_int("c_per_B2"), checked_mul(B, B));
    auto r = geomsieve::halfdim_count(a, tail, c, B);
    ctx.points += r.total;
    if (r.negative_target_only) ctx.warn(WarningCode::NegativeTarget, "B=" + std::to_string(B));
    ctx.report.rows.push_back({B, c, r.total, r.count, r.fraction});
    if (previous > 0) worst_increase = std::max(worst_increase, r.fraction / previous - 1);
    previous = r.fraction;
  }
  ctx.report.summary["worst_relative_increase"] = worst_increase;
}

}  // namespace

Report run(const ExperimentConfig& cfg) {
  Report report;
  report.schema = to_string(cfg.kind) + "/v" + std::to_string(kSchemaVersion);
  report.config = cfg.doc;
  report.config_hash = config_hash(cfg.doc);
  Context ctx{cfg, report};
  const auto start = Clock::now();
  try {
    switch (cfg.kind) {
      case Kind::Enumerate: run_enumerate(ctx); break;
      case Kind::CountMod: run_count_mod(ctx); break;
      case Kind::Density: run_density(ctx); break;
      case Kind::Equidist: run_equidist(ctx); break;
      case Kind::Sieve: run_sieve(ctx); break;
      case Kind::AlmostPrime: run_almost_prime(ctx); break;
      case Kind::GeomSieve: run_geom_sieve(ctx); break;
      case Kind::Halfdim: run_halfdim(ctx); break;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CapExceeded || e.code() == ErrorCode::BoxTooLarge) {
      std::ostringstream caps;
      for (const char* k : {"point_cap", "scan_cap", "time_cap"})
        if (cfg.has(k)) caps << " " << k << "=" << cfg.doc.at(k).dump();
      throw Error(e.code(), std::string(to_string(cfg.kind)) + " budget exceeded (" +
                                (caps.str().empty() ? std::string("built-in caps") : caps.str().substr(1)) + "): " +
                                e.what());
    }
    throw;
  }
  report.timing.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  report.timing.points = ctx.points;
  report.timing.points_per_second =
      report.timing.wall_seconds > 0 ? static_cast<double>(ctx.points) / report.timing.wall_seconds : 0;
  return report;
}

}  // namespace aquad::harness
