// Acceptance suite: one [PASS]/[FAIL] line per criterion.
//
//   aquad_acceptance [--only 1,5,13] [--configs DIR]

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "aquad/density.hpp"
#include "aquad/enumerate.hpp"
#include "aquad/equidist.hpp"
#include "aquad/error.hpp"
#include "aquad/forms.hpp"
#include "aquad/geomsieve.hpp"
#include "aquad/harness.hpp"
#include "aquad/modular.hpp"
#include "aquad/sieve.hpp"
#include "oracles/brute.hpp"

using namespace aquad;
namespace h = aquad::harness;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream o;
  o << std::setprecision(digits) << v;
  return o.str();
}

std::string configs_dir = AQUAD_ACCEPTANCE_CONFIGS;

// First run of each config, reused by the determinism check.
std::map<std::string, h::Report> first_runs;
const std::vector<std::pair<std::string, h::Kind>> kConfigs{
    {"c06_m1", h::Kind::Equidist}, {"c06_m2", h::Kind::Equidist}, {"c07", h::Kind::Equidist},
    {"c09", h::Kind::Sieve},       {"c10", h::Kind::AlmostPrime}, {"c11", h::Kind::GeomSieve},
    {"c12", h::Kind::Halfdim}};

h::Report run_config(const std::string& name, bool fresh = false) {
  if (!fresh) {
    auto it = first_runs.find(name);
    if (it != first_runs.end()) return it->second;
  }
  auto kind = std::find_if(kConfigs.begin(), kConfigs.end(), [&](const auto& c) { return c.first == name; })->second;
  auto cfg = h::make_config(kind, h::load_json_file(configs_dir + "/" + name + ".json"), configs_dir);
  cfg.threads = 1;
  auto r = h::run(cfg);
  if (!fresh) first_runs.emplace(name, r);
  return r;
}

std::size_t column(const h::Report& r, const std::string& name) {
  auto it = std::find(r.columns.begin(), r.columns.end(), name);
  if (it == r.columns.end()) fail(ErrorCode::InvariantViolation, "report lacks column " + name);
  return static_cast<std::size_t>(it - r.columns.begin());
}

// ---------------------------------------------------------------- 1

// Every x with q(x) in [-20, 20] and |x|^2 <= N^2, from one scan of the
// nonnegative orthant and explicit sign expansion.
struct OrthantPoint {
  oracle::Vec x;
  std::int64_t q;
  std::int64_t r2;
};

std::vector<OrthantPoint> orthant_oracle(const oracle::Vec& a, std::int64_t N) {
  std::vector<OrthantPoint> out;
  const std::size_t n = a.size();
  oracle::for_box(n, 0, N, [&](const oracle::Vec& x) {
    std::int64_t r2 = 0, q = 0;
    for (std::size_t i = 0; i < n; ++i) {
      r2 += x[i] * x[i];
      q += a[i] * x[i] * x[i];
    }
    if (r2 > N * N || q < -20 || q > 20) return;
    std::vector<std::size_t> nz;
    for (std::size_t i = 0; i < n; ++i)
      if (x[i] != 0) nz.push_back(i);
    for (std::uint64_t mask = 0; mask < (1ULL << nz.size()); ++mask) {
      oracle::Vec y = x;
      for (std::size_t b = 0; b < nz.size(); ++b)
        if (mask & (1ULL << b)) y[nz[b]] = -y[nz[b]];
      out.push_back({y, q, r2});
    }
  });
  std::sort(out.begin(), out.end(), [](const OrthantPoint& u, const OrthantPoint& v) { return u.x < v.x; });
  return out;
}

Outcome criterion1() {
  const std::vector<std::int64_t> coeffs{-5, -4, -3, -2, -1, 1, 2, 3, 4, 5};
  std::mt19937_64 rng(1);
  std::vector<oracle::Vec> forms3, forms4;
  for (auto a : coeffs)
    for (auto b : coeffs)
      for (auto c : coeffs) forms3.push_back({a, b, c});
  // n = 4: each coefficient multiset once, in a seeded random order.
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    for (std::size_t j = i; j < coeffs.size(); ++j)
      for (std::size_t k = j; k < coeffs.size(); ++k)
        for (std::size_t l = k; l < coeffs.size(); ++l) {
          oracle::Vec f{coeffs[i], coeffs[j], coeffs[k], coeffs[l]};
          std::shuffle(f.begin(), f.end(), rng);
          forms4.push_back(f);
        }

  std::uint64_t instances = 0, points = 0, mismatches = 0;
  std::string first_bad;
  auto check_form = [&](const oracle::Vec& a, const std::vector<std::int64_t>& heights) {
    auto q = QuadraticForm::diagonal(a);
    auto all = orthant_oracle(a, heights.back());
    for (std::int64_t m = -20; m <= 20; ++m) {
      if (m == 0) continue;  // not a valid target
      for (auto N : heights) {
        std::vector<oracle::Vec> expect;
        for (const auto& p : all)
          if (p.q == m && p.r2 <= N * N) expect.push_back(p.x);
        std::size_t i = 0;
        bool same = true;
        enumeration::enumerate_integral(QuadricInstance(q, m), N, [&](const IntegralPoint& x) {
          if (i >= expect.size() || x.numerators != expect[i]) same = false;
          ++i;
          return same;
        });
        if (i != expect.size()) same = false;
        ++instances;
        points += expect.size();
        if (!same) {
          ++mismatches;
          if (first_bad.empty()) first_bad = q.to_string() + " m=" + std::to_string(m) + " N=" + std::to_string(N);
        }
      }
    }
  };
  std::vector<std::int64_t> upto30, upto13;
  for (std::int64_t N = 1; N <= 30; ++N) upto30.push_back(N);
  for (std::int64_t N = 1; N <= 13; ++N) upto13.push_back(N);
  for (const auto& a : forms3) check_form(a, upto30);
  for (const auto& a : forms4) check_form(a, upto13);
  for (const auto& a : forms4) check_form(a, {20, 30});
  std::ostringstream d;
  d << instances << " instances (" << forms3.size() << " ternary forms x N<=30, " << forms4.size()
    << " quaternary forms x N<=13 and N in {20,30}, 0<|m|<=20), " << points << " points, " << mismatches << " mismatches";
  if (!first_bad.empty()) d << ", first: " << first_bad;
  return {mismatches == 0, d.str()};
}

// ---------------------------------------------------------------- 2

// hist[t] = #{x in F_p^n : q(x) = t} by direct enumeration.
std::vector<std::uint64_t> brute_histogram(const oracle::Vec& gram, std::size_t n, std::int64_t p) {
  std::vector<std::uint64_t> hist(static_cast<std::size_t>(p), 0);
  oracle::for_box(n, 0, p - 1, [&](const oracle::Vec& x) { ++hist[static_cast<std::size_t>(oracle::mod(oracle::qeval(gram, x), p))]; });
  return hist;
}

Outcome criterion2() {
  const std::vector<std::int64_t> coeffs{-5, -4, -3, -2, -1, 1, 2, 3, 4, 5};
  const std::vector<std::int64_t> primes{3, 5, 7, 11, 13, 17, 19, 23, 29, 31};
  std::mt19937_64 rng(2);
  auto pick = [&] { return coeffs[rng() % coeffs.size()]; };
  std::vector<std::pair<std::size_t, oracle::Vec>> grams;  // (n, gram)
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    for (std::size_t j = i; j < coeffs.size(); ++j)
      for (std::size_t k = j; k < coeffs.size(); ++k) grams.emplace_back(3, oracle::diag_gram({coeffs[i], coeffs[j], coeffs[k]}));
  for (int t = 0; t < 60; ++t) grams.emplace_back(4, oracle::diag_gram({pick(), pick(), pick(), pick()}));
  for (int t = 0; t < 6; ++t) grams.emplace_back(5, oracle::diag_gram({pick(), pick(), pick(), pick(), pick()}));
  // Non-diagonal forms with small entries.
  for (std::size_t n : {3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 5, 5}) {
    oracle::Vec g(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) g[i * n + j] = g[j * n + i] = static_cast<std::int64_t>(rng() % 7) - 3;
    grams.emplace_back(n, g);
  }

  std::uint64_t comparisons = 0, mismatches = 0, skipped_forms = 0;
  std::string first_bad;
  for (const auto& [n, gram] : grams) {
    std::optional<QuadraticForm> q;
    try {
      q.emplace(n, gram);
    } catch (const Error&) {
      ++skipped_forms;  // singular
      continue;
    }
    for (auto p : primes) {
      if (q->det() % p == 0) continue;
      auto hist = brute_histogram(gram, n, p);
      for (std::int64_t m = -10; m <= 10; ++m) {
        auto exact = modular::count_quadric_ffield_exact(*q, m, p);
        ++comparisons;
        if (exact != Integer(static_cast<unsigned long>(hist[static_cast<std::size_t>(oracle::mod(m, p))])) ) {
          ++mismatches;
          if (first_bad.empty()) first_bad = q->to_string() + " m=" + std::to_string(m) + " p=" + std::to_string(p);
        }
      }
    }
  }
  std::ostringstream d;
  d << comparisons << " (form, p, m) comparisons over " << grams.size() - skipped_forms << " forms with n in {3,4,5}, "
    << mismatches << " mismatches";
  if (!first_bad.empty()) d << ", first: " << first_bad;
  return {mismatches == 0 && comparisons > 0, d.str()};
}

// ---------------------------------------------------------------- 3

Outcome criterion3() {
  modular::PrimePowerOptions exact;
  exact.convolution_cap = std::int64_t{1} << 22;  // p^5 <= 13^5 counted by convolution
  exact.scan_cap = 0;
  std::mt19937_64 rng(3);
  const std::vector<std::int64_t> coeffs{-5, -4, -3, -2, -1, 1, 2, 3, 4, 5};
  std::vector<oracle::Vec> forms{{1, 1, 1}, {1, 1, 1, 1}, {1, 1, 1, -1}, {1, 2, 3}, {1, -1, 5, 7}};
  for (int t = 0; t < 10; ++t) {
    oracle::Vec a(3 + rng() % 2);
    for (auto& v : a) v = coeffs[rng() % coeffs.size()];
    forms.push_back(a);
  }
  std::uint64_t checks = 0, failures = 0;
  std::string first_bad;
  for (const auto& a : forms) {
    auto q = QuadraticForm::diagonal(a);
    for (std::int64_t p : {3, 5, 7, 11, 13}) {
      for (std::int64_t m : {1, 2, -3, 7}) {
        if ((Integer(2) * q.det() * m) % p == 0) continue;
        Integer prev = modular::count_prime_power(q, m, p, 1, exact);
        Integer mult = 1;
        for (std::size_t i = 1; i < a.size(); ++i) mult *= p;
        for (int k = 1; k <= 4; ++k) {
          Integer next = modular::count_prime_power(q, m, p, k + 1, exact);
          ++checks;
          if (next != mult * prev) {
            ++failures;
            if (first_bad.empty())
              first_bad = q.to_string() + " m=" + std::to_string(m) + " p=" + std::to_string(p) + " k=" + std::to_string(k);
          }
          prev = next;
        }
      }
    }
  }
  std::ostringstream d;
  d << checks << " lifts k -> k+1 (k = 1..4, p <= 13, " << forms.size() << " forms, exact counts), " << failures
    << " failures";
  if (!first_bad.empty()) d << ", first: " << first_bad;
  return {failures == 0 && checks > 0, d.str()};
}

// ---------------------------------------------------------------- 4

Outcome criterion4() {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::int64_t> num(-1'000'000, 1'000'000), den(1, 1000);
  int failures = 0, minus_places = 0;
  for (int t = 0; t < 500; ++t) {
    Rational a(num(rng), den(rng)), b(num(rng), den(rng));
    if (a == 0) a = 1;
    if (b == 0) b = -1;
    a.canonicalize();
    b.canonicalize();
    std::set<std::uint64_t> places{2};
    for (const Integer* part : {&a.get_num(), &a.get_den(), &b.get_num(), &b.get_den()})
      for (auto p : factorize(*part)) places.insert(p);
    int prod = forms::hilbert_symbol(a, b, Place::real());
    if (prod < 0) ++minus_places;
    for (auto p : places) {
      int s = forms::hilbert_symbol(a, b, Place::prime(static_cast<std::int64_t>(p)));
      if (s < 0) ++minus_places;
      prod *= s;
    }
    if (prod != 1) ++failures;
  }
  return {failures == 0, "500 random rational pairs, " + std::to_string(minus_places) + " local symbols equal to -1, " +
                             std::to_string(failures) + " violations"};
}

// ---------------------------------------------------------------- 5

Outcome criterion5() {
  auto q = QuadraticForm::parse("1,1,1,-1");
  bool pass = true;
  std::ostringstream d;
  for (std::int64_t p0 : {2, 3}) {
    std::vector<std::pair<int, double>> series;
    double lo = INFINITY, hi = 0;
    for (int hh = 0; hh <= 6; ++hh) {
      auto v = density::padic_ball_volume(q, 1, p0, hh).get_d();
      series.emplace_back(hh, v);
      double normalized = v / std::pow(static_cast<double>(p0), 2.0 * hh);
      lo = std::min(lo, normalized);
      hi = std::max(hi, normalized);
    }
    auto fit = density::volume_exponent_fit(series, p0);
    bool ok = std::abs(fit.slope - 2) <= 0.2 && hi / lo <= 10;
    pass = pass && ok;
    d << "p0=" << p0 << ": slope " << fmt(fit.slope, 5) << ", band " << fmt(hi / lo, 4) << "; ";
  }
  d << "need |slope-2| <= 0.2 and band <= 10";
  return {pass, d.str()};
}

// ---------------------------------------------------------------- 6

Outcome criterion6() {
  bool pass = true;
  std::ostringstream d;
  for (const char* name : {"c06_m1", "c06_m2"}) {
    auto r = run_config(name);
    const auto ci = column(r, "count"), mi = column(r, "main"), ri = column(r, "rel_err"), si = column(r, "schedule");
    double rel1 = NAN, rel_last = NAN, ratio_last = NAN;
    for (const auto& row : r.rows) {
      if (row[si] == "h=1") rel1 = row[ri].get<double>();
      rel_last = row[ri].get<double>();
      ratio_last = row[ci].get<double>() / row[mi].get<double>();
    }
    bool ok = std::abs(ratio_last - 1) <= 0.15 && rel_last <= rel1;
    pass = pass && ok;
    d << (name == std::string("c06_m1") ? "m=1" : "m=2") << ": count/prediction at h=4 " << fmt(ratio_last, 5)
      << ", rel err h=4 " << fmt(rel_last, 3) << " vs h=1 " << fmt(rel1, 3) << "; ";
  }
  d << "need |ratio-1| <= 0.15 and err(h=4) <= err(h=1)";
  return {pass, d.str()};
}

// ---------------------------------------------------------------- 7

Outcome criterion7() {
  auto r = run_config("c07");
  const auto si = column(r, "schedule"), li = column(r, "modulus"), smi = column(r, "smooth"), ri = column(r, "rel_err"),
             ci = column(r, "count");
  bool partition = r.summary.at("partition_exact").get<bool>();
  // Independent partition check from the rows: class counts per (h, l) add
  // up to the same total for every modulus.
  std::map<std::string, std::map<std::int64_t, std::uint64_t>> sums;
  for (const auto& row : r.rows) sums[row[si].get<std::string>()][row[li].get<std::int64_t>()] += row[ci].get<std::uint64_t>();
  for (const auto& [step, per] : sums) {
    std::set<std::uint64_t> totals;
    for (auto [l, s] : per) totals.insert(s);
    if (totals.size() != 1) partition = false;
  }
  std::map<std::int64_t, double> worst_last, worst_h4;
  std::map<std::int64_t, int> classes;
  for (const auto& row : r.rows) {
    if (!row[smi].get<bool>()) continue;
    auto l = row[li].get<std::int64_t>();
    double rel = row[ri].is_null() ? INFINITY : row[ri].get<double>();
    if (row[si] == "h=8") {
      worst_last[l] = std::max(worst_last[l], rel);
      ++classes[l];
    }
    if (row[si] == "h=4") worst_h4[l] = std::max(worst_h4[l], rel);
  }
  bool pass = partition;
  std::ostringstream d;
  d << "partition " << (partition ? "exact" : "BROKEN") << "; max class rel err at h=8:";
  for (auto [l, w] : worst_last) {
    pass = pass && w <= 0.25;
    d << " l=" << l << " " << fmt(w, 3) << " (" << classes[l] << " classes)";
  }
  d << "; delta_hat:";
  for (const auto& [l, f] : r.summary.at("moduli").items())
    d << " l=" << l << " " << (f.contains("delta_hat") ? fmt(f["delta_hat"].get<double>(), 3) : "n/a");
  d << "; at h=4 (reported):";
  for (auto [l, w] : worst_h4) d << " l=" << l << " " << fmt(w, 3);
  return {pass, d.str()};
}

// ---------------------------------------------------------------- 8

Outcome criterion8() {
  std::mt19937_64 rng(8);
  int failures = 0;
  std::uint64_t entries = 0;
  for (int t = 0; t < 200; ++t) {
    sieve::SieveSequence a;
    std::map<std::uint64_t, std::uint64_t> raw;
    const int len = 1 + static_cast<int>(rng() % 200);
    for (int i = 0; i < len; ++i) {
      std::uint64_t b = 1 + rng() % 100000, w = 1 + rng() % 5;
      a.add(b, w);
      raw[b] += w;
    }
    entries += raw.size();
    const auto z = static_cast<std::int64_t>(2 + rng() % 40);
    auto s = sieve::sift(a, sieve::primes_outside({}), z).sifted;
    if (static_cast<std::int64_t>(s) != oracle::legendre_sum(raw, oracle::primes_below(z))) ++failures;
  }
  return {failures == 0,
          "200 random sequences (" + std::to_string(entries) + " entries, z <= 41), " + std::to_string(failures) + " mismatches"};
}

// ---------------------------------------------------------------- 9

Outcome criterion9() {
  auto r = run_config("c09");
  const auto& s = r.summary;
  double S = s.at("S").get<double>(), R = s.at("R").get<double>(), main = s.at("main").get<double>(),
         tau = s.at("tau_hat").get<double>();
  bool pass = S > 0 && R <= 0.2 * main && tau >= 0.3 && tau <= 3;
  std::ostringstream d;
  d << "S=" << s.at("S") << ", X=" << s.at("X") << ", V(z)=" << fmt(s.at("V_float").get<double>(), 6) << ", R/(X V)="
    << fmt(R / main, 4) << " (<= 0.2), tau_hat=" << fmt(tau, 4) << " (in [0.3, 3])";
  return {pass, d.str()};
}

// ---------------------------------------------------------------- 10

Outcome criterion10() {
  auto r = run_config("c10");
  const auto& s = r.summary;
  if (!s.at("found").get<bool>()) return {false, "no qualifying point within the budget"};
  // Independent re-check: exact evaluation, S' stripping, trial division.
  std::vector<Integer> x;
  for (const auto& c : s.at("point")) x.emplace_back(c.get<std::string>());
  Integer qx = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - x[3] * x[3];
  Integer v = abs(x[0] + x[1] + 3);
  bool ok = qx == 1 && v != 0;
  for (long p : {2L, 3L})
    while (v != 0 && v % p == 0) v /= p;
  std::vector<std::uint64_t> factors;
  if (ok && v.fits_ulong_p()) factors = oracle::trial_factor(v.get_ui());
  std::set<std::uint64_t> distinct(factors.begin(), factors.end());
  for (auto p : distinct) ok = ok && p > 100;
  ok = ok && distinct.size() <= 3 && s.at("certificate").at("valid").get<bool>();
  std::ostringstream d;
  d << "point (" << x[0] << "," << x[1] << "," << x[2] << "," << x[3] << ") after " << s.at("examined")
    << " points, f stripped of {2,3} = " << v << " with " << distinct.size()
    << " distinct primes > 100; library certificate " << (s.at("certificate").at("valid").get<bool>() ? "valid" : "invalid")
    << ", independent check " << (ok ? "agrees" : "DISAGREES");
  return {ok, d.str()};
}

// ---------------------------------------------------------------- 11

Outcome criterion11() {
  auto r = run_config("c11");
  const auto Mi = column(r, "M"), ri = column(r, "ratio"), bi = column(r, "bad"), vi = column(r, "verified");
  bool nonincreasing = true, all_verified = true;
  double prev = INFINITY, last = NAN;
  std::ostringstream d;
  d << "V(M,inf)/count:";
  for (const auto& row : r.rows) {
    double ratio = row[ri].get<double>();
    if (ratio > prev) nonincreasing = false;
    prev = ratio;
    last = ratio;
    if (row[vi].get<std::uint64_t>() != row[bi].get<std::uint64_t>()) all_verified = false;
    d << " M=" << row[Mi] << " " << fmt(ratio, 4);
  }
  d << "; nonincreasing " << (nonincreasing ? "yes" : "NO") << ", ratio at M=300 " << fmt(last, 4)
    << " (<= 0.5), witnesses verified " << (all_verified ? "100%" : "INCOMPLETE");
  return {nonincreasing && all_verified && last <= 0.5, d.str()};
}

// ---------------------------------------------------------------- 12

Outcome criterion12() {
  auto r = run_config("c12");
  const auto Bi = column(r, "B"), fi = column(r, "fraction");
  bool pass = true;
  double prev = INFINITY;
  std::ostringstream d;
  d << "fraction:";
  for (const auto& row : r.rows) {
    double f = row[fi].get<double>();
    if (f > prev * 1.02) pass = false;
    prev = f;
    d << " B=" << row[Bi] << " " << fmt(f, 4);
  }
  // c = 3 B^2 is 3 * 4^k on this grid, a degenerate target; the shifted
  // c = 3 B^2 + 1 is printed alongside and not asserted.
  d << "; c=3B^2+1 (reported):";
  for (std::int64_t B = 64; B <= 1024; B *= 2) d << " B=" << B << " " << fmt(geomsieve::halfdim_count(1, {1, 1}, 3 * B * B + 1, B).fraction, 4);
  return {pass, d.str()};
}

// ---------------------------------------------------------------- 13

Outcome criterion13() {
  int differing = 0;
  std::ostringstream d;
  for (const auto& [name, kind] : kConfigs) {
    auto a = run_config(name);
    auto b = run_config(name, true);
    if (h::data_fingerprint(a) != h::data_fingerprint(b) || h::to_csv(a) != h::to_csv(b)) {
      ++differing;
      d << name << " differs; ";
    }
  }
  d << kConfigs.size() << " configs run twice, " << differing << " with differing data";
  return {differing == 0, d.str()};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

const std::vector<Criterion> kCriteria{
    {1, "enumeration oracle equivalence", criterion1},
    {2, "finite-field formula vs brute force", criterion2},
    {3, "Hensel stabilization", criterion3},
    {4, "Hilbert product formula", criterion4},
    {5, "p-adic volume exponent", criterion5},
    {6, "Hardy-Littlewood consistency", criterion6},
    {7, "equidistribution in congruence classes", criterion7},
    {8, "Legendre sieve identity", criterion8},
    {9, "fundamental lemma report", criterion9},
    {10, "almost-prime existence", criterion10},
    {11, "geometric sieve shape", criterion11},
    {12, "half-dimensional thinning", criterion12},
    {13, "determinism", criterion13},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  app.add_option("--only", only, "criterion numbers to run")->delimiter(',');
  app.add_option("--configs", configs_dir, "directory of acceptance configs");
  CLI11_PARSE(app, argc, argv);

  int failed = 0;
  for (const auto& c : kCriteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.pass) ++failed;
    std::cout << (out.pass ? "[PASS] " : "[FAIL] ") << c.id << ". " << c.name << ": " << out.detail << " ["
              << fmt(secs, 3) << " s]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
