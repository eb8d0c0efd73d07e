#include "aquad/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aquad/error.hpp"
#include "aquad/modular.hpp"

namespace aquad::sieve {

SieveSequence::SieveSequence(std::vector<std::int64_t> excluded) : excluded_(std::move(excluded)) {
  for (auto p : excluded_)
    require(p >= 2 && is_prime(static_cast<std::uint64_t>(p)), ErrorCode::InvalidArgument,
            "S' must contain primes, got " + std::to_string(p));
  std::sort(excluded_.begin(), excluded_.end());
  excluded_.erase(std::unique(excluded_.begin(), excluded_.end()), excluded_.end());
}

void SieveSequence::add(std::uint64_t index, std::uint64_t weight) {
  require(index >= 1, ErrorCode::InvalidArgument, "sequence indices are positive");
  for (auto p : excluded_)
    require(index % static_cast<std::uint64_t>(p) != 0, ErrorCode::InvalidArgument,
            "index " + std::to_string(index) + " is divisible by excluded prime " + std::to_string(p));
  if (weight == 0) return;
  entries_[index] += weight;
  total_ += weight;
}

void SieveSequence::add_zero(std::uint64_t weight) { zero_ += weight; }

SieveSequence SieveSequence::range(std::uint64_t lo, std::uint64_t hi) {
  SieveSequence s;
  for (std::uint64_t i = std::max<std::uint64_t>(lo, 1); i <= hi; ++i) s.add(i);
  return s;
}

std::uint64_t strip(i128 value, const std::vector<std::int64_t>& excluded) {
  if (value == 0) return 0;
  u128 v = value < 0 ? static_cast<u128>(-value) : static_cast<u128>(value);
  for (auto p : excluded)
    while (v % static_cast<u128>(p) == 0) v /= static_cast<u128>(p);
  if (v > static_cast<u128>(std::numeric_limits<std::uint64_t>::max()))
    fail(ErrorCode::Overflow, "sequence index exceeds 64 bits");
  return static_cast<std::uint64_t>(v);
}

SequenceBuilder::SequenceBuilder(Polynomial f, std::vector<std::int64_t> excluded)
    : f_(std::move(f)), seq_(std::move(excluded)) {}

void SequenceBuilder::add(const IntegralPoint& x) {
  i128 value;
  if (x.scale == 0) {
    value = f_.eval(x.numerators);
  } else {
    const auto& ex = seq_.excluded();
    require(std::binary_search(ex.begin(), ex.end(), x.p0), ErrorCode::InvalidArgument,
            "p0 = " + std::to_string(x.p0) + " must belong to S' for p0-integral points");
    auto it = rescaled_.find(x.scale);
    if (it == rescaled_.end()) it = rescaled_.emplace(x.scale, f_.rescaled(x.p0, x.scale)).first;
    value = it->second.eval(x.numerators);
  }
  ++points_;
  if (value == 0) {
    seq_.add_zero();
    return;
  }
  seq_.add(strip(value, seq_.excluded()));
}

SieveSequence SequenceBuilder::finish() && { return std::move(seq_); }

SieveSequence build_sequence(const std::vector<IntegralPoint>& points, const Polynomial& f,
                             const std::vector<std::int64_t>& excluded) {
  SequenceBuilder b(f, excluded);
  for (const auto& x : points) b.add(x);
  return std::move(b).finish();
}

PrimeFilter primes_outside(const std::vector<std::int64_t>& excluded) {
  return [excluded](std::int64_t p) { return std::find(excluded.begin(), excluded.end(), p) == excluded.end(); };
}

std::vector<std::int64_t> sifting_primes(const PrimeFilter& filter, std::int64_t z) {
  std::vector<std::int64_t> out;
  if (z <= 2) return out;
  for (auto p : primes_up_to(static_cast<std::uint64_t>(z - 1)))
    if (filter(static_cast<std::int64_t>(p))) out.push_back(static_cast<std::int64_t>(p));
  return out;
}

SiftResult sift(const SieveSequence& a, const PrimeFilter& filter, std::int64_t z) {
  require(z >= 2, ErrorCode::InvalidArgument, "sifting level z must be at least 2");
  const auto primes = sifting_primes(filter, z);
  SiftResult out;
  for (auto [index, weight] : a.entries()) {
    bool coprime = true;
    for (auto p : primes)
      if (index % static_cast<std::uint64_t>(p) == 0) {
        coprime = false;
        break;
      }
    if (coprime) {
      out.sifted += weight;
      out.survivors.push_back(index);
    }
  }
  return out;
}

namespace {

bool squarefree(std::uint64_t d) {
  auto f = factorize(d);
  return std::adjacent_find(f.begin(), f.end()) == f.end();
}

}  // namespace

std::uint64_t subsequence_count(const SieveSequence& a, std::uint64_t d) {
  require(d >= 1, ErrorCode::InvalidArgument, "d must be positive");
  if (!squarefree(d)) fail(ErrorCode::NotSquarefree, std::to_string(d) + " is not squarefree");
  for (auto p : a.excluded())
    require(d % static_cast<std::uint64_t>(p) != 0, ErrorCode::InvalidArgument,
            "d shares the excluded prime " + std::to_string(p));
  std::uint64_t count = 0;
  for (auto [index, weight] : a.entries())
    if (index % d == 0) count += weight;
  return count;
}

DensityTable::DensityTable(std::map<std::int64_t, Rational> omega, std::string provenance)
    : omega_(std::move(omega)), provenance_(std::move(provenance)) {
  for (auto& [p, w] : omega_) {
    require(p >= 2 && is_prime(static_cast<std::uint64_t>(p)), ErrorCode::InvalidArgument,
            "density table key " + std::to_string(p) + " is not prime");
    w.canonicalize();
    if (w < 0 || w >= p)
      fail(ErrorCode::InvalidDensity, "omega(" + std::to_string(p) + ") = " + aquad::to_string(w) +
                                          " violates 0 <= omega(p)/p < 1");
  }
}

DensityTable DensityTable::constant(const Rational& omega, std::int64_t lo, std::int64_t hi) {
  std::map<std::int64_t, Rational> table;
  for (auto p : primes_up_to(static_cast<std::uint64_t>(std::max<std::int64_t>(hi, 1))))
    if (static_cast<std::int64_t>(p) >= lo) table[static_cast<std::int64_t>(p)] = omega;
  return DensityTable(std::move(table), "constant");
}

const Rational& DensityTable::omega(std::int64_t p) const {
  auto it = omega_.find(p);
  if (it == omega_.end()) fail(ErrorCode::MissingPrime, "density table has no entry for p = " + std::to_string(p));
  return it->second;
}

Rational DensityTable::omega_of(std::uint64_t d) const {
  require(d >= 1, ErrorCode::InvalidArgument, "d must be positive");
  auto f = factorize(d);
  if (std::adjacent_find(f.begin(), f.end()) != f.end())
    fail(ErrorCode::NotSquarefree, std::to_string(d) + " is not squarefree");
  Rational r = 1;
  for (auto p : f) r *= omega(static_cast<std::int64_t>(p));
  return r;
}

DensityTable density_from_counts(const QuadraticForm& q, std::int64_t m, const Polynomial& f,
                                 const std::vector<std::int64_t>& primes) {
  require(f.nvars() == q.dim(), ErrorCode::InvalidArgument, "f arity differs from the form");
  std::map<std::int64_t, Rational> table;
  for (auto p : primes) {
    const auto total = modular::count_quadric_ffield_brute(q, m, p);
    if (total == 0) fail(ErrorCode::ZeroDenominator, "quadric has no F_" + std::to_string(p) + "-points");
    std::uint64_t on_f = 0;
    if (f.degree() == 0) {
      on_f = f.eval_mod(std::vector<std::int64_t>(q.dim(), 0), p) == 0 ? total : 0;
    } else {
      on_f = modular::count_subvariety_ffield(modular::SubvarietySpec({f}), q, m, p);
    }
    Rational w(Integer(static_cast<long>(p)) * Integer(static_cast<unsigned long>(on_f)),
               Integer(static_cast<unsigned long>(total)));
    w.canonicalize();
    table[p] = w;
  }
  return DensityTable(std::move(table), "finite-field counts");
}

Rational mertens_product(const DensityTable& table, const PrimeFilter& filter, std::int64_t z) {
  Rational v = 1;
  for (auto p : sifting_primes(filter, z)) v *= 1 - table.omega(p) / Rational(static_cast<long>(p));
  v.canonicalize();
  return v;
}

DimensionCheck dimension_check(const DensityTable& table, std::int64_t w1, std::int64_t w2, double kappa1) {
  require(w1 >= 2 && w1 <= w2, ErrorCode::InvalidArgument, "need 2 <= w1 <= w2");
  std::vector<std::int64_t> primes;
  std::vector<double> log_factor;  // log (1 - omega/p)^-1
  for (auto up : primes_up_to(static_cast<std::uint64_t>(w2))) {
    auto p = static_cast<std::int64_t>(up);
    if (p < w1) continue;
    primes.push_back(p);
    Rational ratio = table.omega(p) / Rational(static_cast<long>(p));
    log_factor.push_back(-std::log1p(-ratio.get_d()));
  }
  DimensionCheck out;
  out.holds = true;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    double acc = 0;
    const double la = std::log(static_cast<double>(primes[i]));
    for (std::size_t j = i; j < primes.size(); ++j) {
      acc += log_factor[j];
      const double lb = std::log(static_cast<double>(primes[j]));
      const double ratio = std::exp(acc) / std::pow(lb / la, kappa1);
      if (ratio > out.kappa2) {
        out.kappa2 = ratio;
        out.worst_w1 = primes[i];
        out.worst_w2 = primes[j];
      }
    }
  }
  if (primes.empty()) out.kappa2 = 1;
  out.holds = std::isfinite(out.kappa2);
  return out;
}

RemainderLedger remainder_ledger(const SieveSequence& a, const DensityTable& table, const PrimeFilter& filter,
                                 double X, std::uint64_t y, std::int64_t z) {
  const auto primes = sifting_primes(filter, z);
  for (auto p : primes) (void)table.omega(p);
  RemainderLedger out;
  // Depth-first over squarefree products of sifting primes, d <= y.
  std::vector<std::pair<std::uint64_t, Rational>> divisors{{1, Rational(1)}};
  std::function<void(std::size_t, std::uint64_t, const Rational&)> walk = [&](std::size_t start, std::uint64_t d,
                                                                               const Rational& omega_d) {
    for (std::size_t i = start; i < primes.size(); ++i) {
      auto p = static_cast<std::uint64_t>(primes[i]);
      if (d > y / p) break;
      Rational w = omega_d * table.omega(primes[i]);
      divisors.emplace_back(d * p, w);
      walk(i + 1, d * p, w);
    }
  };
  if (y >= 1) walk(0, 1, Rational(1));
  else divisors.clear();
  std::sort(divisors.begin(), divisors.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
  for (const auto& [d, omega_d] : divisors) {
    LedgerEntry e;
    e.d = d;
    e.count = subsequence_count(a, d);
    Rational density = omega_d / Rational(Integer(static_cast<unsigned long>(d)));
    e.expected = density.get_d() * X;
    e.deviation = std::fabs(static_cast<double>(e.count) - e.expected);
    out.total += e.deviation;
    out.entries.push_back(e);
  }
  return out;
}

SieveReport fundamental_lemma_report(const SieveSequence& a, const DensityTable& table, const PrimeFilter& filter,
                                     double X, std::uint64_t y, std::int64_t z) {
  SieveReport r;
  r.z = z;
  r.y = y;
  auto s = sift(a, filter, z);
  r.sifted = s.sifted;
  r.survivors = std::move(s.survivors);
  r.V = mertens_product(table, filter, z);
  r.X = X;
  r.main = X * r.V.get_d();
  r.ledger = remainder_ledger(a, table, filter, X, y, z);
  r.degenerate = a.empty() || r.main <= 0;
  r.tau_hat = r.degenerate ? 0 : static_cast<double>(r.sifted) / r.main;
  return r;
}

namespace {

int distinct_count(const std::vector<std::uint64_t>& f) {
  int c = 0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (i == 0 || f[i] != f[i - 1]) ++c;
  return c;
}

}  // namespace

AlmostPrimeResult almost_prime_search(const QuadricInstance& inst, std::optional<std::int64_t> N,
                                      const AlmostPrimeQuery& query, unsigned threads) {
  require(query.f.nvars() == inst.dim(), ErrorCode::InvalidArgument, "f arity differs from the form");
  require(query.r >= 0 && query.M >= 0, ErrorCode::InvalidArgument, "M and r must be nonnegative");
  std::vector<std::int64_t> excluded = query.excluded;
  std::sort(excluded.begin(), excluded.end());
  AlmostPrimeResult out;
  std::map<int, Polynomial> rescaled;
  auto visit = [&](const IntegralPoint& x) {
    if (out.examined >= query.budget) return false;
    ++out.examined;
    i128 value;
    if (x.scale == 0) {
      value = query.f.eval(x.numerators);
    } else {
      require(std::binary_search(excluded.begin(), excluded.end(), x.p0), ErrorCode::InvalidArgument,
              "p0 must belong to S'");
      auto it = rescaled.find(x.scale);
      if (it == rescaled.end()) it = rescaled.emplace(x.scale, query.f.rescaled(x.p0, x.scale)).first;
      value = it->second.eval(x.numerators);
    }
    if (value == 0) {
      ++out.zero_values;
      return true;
    }
    auto factors = factorize(strip(value, excluded));
    const int distinct = distinct_count(factors);
    ++out.histogram[distinct];
    const bool large = factors.empty() || static_cast<std::int64_t>(factors.front()) > query.M;
    if (large && distinct <= query.r) {
      out.found = true;
      out.point = x;
      out.value = to_integer(value);
      out.factors = factors;
      out.distinct = distinct;
      out.multiplicity = static_cast<int>(factors.size());
      return false;
    }
    return true;
  };
  enumeration::EnumerateOptions options;
  options.threads = threads;
  if (N) {
    enumeration::enumerate_integral(inst, *N, visit, options);
  } else {
    enumeration::enumerate_s_integral(inst, visit, options);
  }
  return out;
}

Certificate verify_almost_prime(const IntegralPoint& x, const AlmostPrimeQuery& query) {
  Certificate c;
  auto coords = x.coords();
  Rational v = query.f.eval(std::span<const Rational>(coords));
  if (v == 0) {
    c.reason = "f vanishes at the point";
    return c;
  }
  Integer num = abs(v.get_num());
  Integer den = v.get_den();
  for (auto p : query.excluded) {
    Integer pp(static_cast<long>(p));
    while (mpz_divisible_p(num.get_mpz_t(), pp.get_mpz_t())) num /= pp;
    while (mpz_divisible_p(den.get_mpz_t(), pp.get_mpz_t())) den /= pp;
  }
  if (den != 1) {
    c.reason = "denominator has primes outside S'";
    return c;
  }
  // Plain trial division, kept independent of the search's factorizer.
  for (Integer d = 2; d * d <= num; ++d) {
    if (d > Integer(10'000'000)) {
      c.reason = "value too large for trial-division verification";
      return c;
    }
    while (mpz_divisible_p(num.get_mpz_t(), d.get_mpz_t())) {
      c.factors.push_back(d.get_ui());
      num /= d;
    }
  }
  if (num > 1) {
    if (!num.fits_ulong_p()) {
      c.reason = "cofactor exceeds 64 bits";
      return c;
    }
    c.factors.push_back(num.get_ui());
  }
  for (auto p : c.factors)
    if (static_cast<std::int64_t>(p) <= query.M) {
      c.reason = "prime " + std::to_string(p) + " does not exceed M";
      return c;
    }
  if (distinct_count(c.factors) > query.r) {
    c.reason = "more than r distinct primes";
    return c;
  }
  c.valid = true;
  return c;
}

Certificate verify_almost_prime(const QuadricInstance& inst, const IntegralPoint& x, const AlmostPrimeQuery& query) {
  auto coords = x.coords();
  if (coords.size() != inst.dim() || inst.form.eval(std::span<const Rational>(coords)) != inst.m) {
    Certificate c;
    c.reason = "point is not on the quadric";
    return c;
  }
  if (inst.region && !inst.region->contains(coords)) {
    Certificate c;
    c.reason = "point lies outside the region";
    return c;
  }
  return verify_almost_prime(x, query);
}

}  // namespace aquad::sieve
