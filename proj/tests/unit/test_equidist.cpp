#include <doctest.h>

#include <cmath>

#include "aquad/equidist.hpp"
#include "aquad/error.hpp"
#include "oracles/brute.hpp"

using namespace aquad;
using namespace aquad::equidist;

namespace {

const QuadraticForm& split() {
  static const QuadraticForm q = QuadraticForm::parse("1,1,1,-1");
  return q;
}

}  // namespace

TEST_CASE("neighbourhood validation") {
  CongruenceNeighborhood nb(split(), 1, 45, {1, 0, 0, 0});
  CHECK(nb.factors() == std::vector<std::pair<std::int64_t, int>>{{3, 2}, {5, 1}});
  CHECK(nb.component(3).coords == std::vector<std::int64_t>{1, 0, 0, 0});
  CHECK(nb.component(3).modulus == 9);
  CHECK_THROWS_AS(CongruenceNeighborhood(split(), 1, 3, {1, 1, 0, 0}), Error);
  CHECK_THROWS_AS(CongruenceNeighborhood(split(), 1, 6, {1, 0, 0, 0}, 2), Error);
  CHECK_THROWS_AS(CongruenceNeighborhood(split(), 1, 3, {1, 0, 0}), Error);
  CHECK(CongruenceNeighborhood::trivial(4).contains(IntegralPoint{{5, 1, 2, 3}}));
  CHECK(nb.contains(IntegralPoint{{46, 45, -90, 0}}));
  CHECK_FALSE(nb.contains(IntegralPoint{{1, 0, 3, 3}}));
}

TEST_CASE("counts in a neighbourhood match a filter of the full list") {
  QuadricInstance inst(split(), 1);
  auto all = enumeration::enumerate_integral(inst, 60);
  for (std::int64_t l : {3, 4, 5, 6}) {
    for (const auto& xi : residues_on_quadric(split(), 1, l, false)) {
      CongruenceNeighborhood nb(split(), 1, l, xi);
      std::uint64_t expect = 0;
      for (const auto& p : all)
        if (nb.contains(p)) ++expect;
      CHECK(count_in_neighborhood(inst, Heights{60}, nb) == expect);
    }
  }
}

TEST_CASE("class counts partition the point set") {
  auto inst = QuadricInstance(split(), 1, SData{2, 4}, Box::parse("-1.5:1.5", 4));
  auto total = enumeration::enumerate_s_integral(inst).size();
  for (std::int64_t l : {3, 5, 9}) {
    auto classes = class_counts(inst, Heights{}, l);
    std::uint64_t sum = 0;
    for (const auto& [xi, c] : classes) {
      sum += c;
      CHECK(count_in_neighborhood(inst, Heights{}, CongruenceNeighborhood(split(), 1, l, xi, 2)) == c);
    }
    CHECK(sum == total);
  }
}

TEST_CASE("residues on the quadric") {
  for (std::int64_t l : {3, 5, 8, 9}) {
    auto r = residues_on_quadric(split(), 1, l, false);
    CHECK(r.size() == oracle::count_mod(oracle::diag_gram({1, 1, 1, -1}), 4, 1, l));
    auto smooth = residues_on_quadric(split(), 1, l, true);
    CHECK(smooth.size() <= r.size());
  }
  // Over F_3 every point of x^2+y^2+z^2-w^2 = 1 is smooth.
  CHECK(residues_on_quadric(split(), 1, 3, true).size() == 30);
}

TEST_CASE("class measures are additive") {
  auto q = split();
  for (std::int64_t p : {2, 3, 5}) {
    Rational sum = 0;
    for (const auto& xi : residues_on_quadric(q, 1, p, false)) {
      modular::ResiduePoint r{p, xi, true};
      auto mu = class_measure(q, 1, r, p);
      sum += mu;
      if (p == 5) continue;
      // Lifts to p^2 refine the class.
      Rational lifted = 0;
      for (const auto& y : residues_on_quadric(q, 1, p * p, false)) {
        bool over = true;
        for (std::size_t i = 0; i < 4; ++i)
          if (y[i] % p != xi[i]) over = false;
        if (over) lifted += class_measure(q, 1, modular::ResiduePoint{p * p, y, true}, p);
      }
      CHECK(lifted == mu);
    }
    CHECK(sum == density::local_density(q, 1, p).value);
  }
}

TEST_CASE("main terms are additive over classes") {
  density::HLOptions opt;
  opt.p_cut = 30;
  QuadricInstance inst(split(), 1, SData{2, 3}, Box::parse("-1.5:1.5", 4));
  auto ctx = prepare_main_term(inst, Heights{}, opt);
  double whole = main_term(ctx, CongruenceNeighborhood::trivial(4));
  for (std::int64_t l : {3, 5, 9}) {
    double sum = 0;
    for (const auto& xi : residues_on_quadric(split(), 1, l, false))
      sum += main_term(ctx, CongruenceNeighborhood(split(), 1, l, xi, 2));
    CHECK(sum == doctest::Approx(whole).epsilon(1e-9));
  }
  CHECK(main_term(inst, Heights{}, CongruenceNeighborhood::trivial(4), opt) == doctest::Approx(whole));
}

TEST_CASE("discrepancy fit self-tests") {
  std::vector<DiscrepancyRecord> synth;
  for (int i = 5; i <= 11; ++i) {
    DiscrepancyRecord r;
    r.main = std::pow(2.0, 2 * i);
    r.abs_err = std::pow(r.main, 0.8);
    synth.push_back(r);
  }
  auto fit = fit_discrepancy(synth);
  CHECK(fit.delta_hat == doctest::Approx(0.2));
  CHECK(fit.r_squared == doctest::Approx(1.0));
  CHECK_FALSE(fit.low_confidence);

  for (auto& r : synth) r.abs_err = 3.0;
  auto flat = fit_discrepancy(synth);
  CHECK(flat.delta_hat == doctest::Approx(1.0));
  CHECK(flat.low_confidence);

  CHECK_THROWS_AS(fit_discrepancy({synth[0]}), Error);
  auto same = synth;
  for (auto& r : same) r.main = 10;
  CHECK_THROWS_AS(fit_discrepancy(same), Error);
}

TEST_CASE("discrepancy series over an h schedule") {
  density::HLOptions opt;
  opt.p_cut = 30;
  QuadricInstance inst(split(), 1, SData{2, 0}, Box::parse("-1.5:1.5", 4));
  std::vector<ScheduleEntry> schedule;
  for (int h = 1; h <= 5; ++h) schedule.push_back({std::nullopt, h});
  auto series = discrepancy_series(inst, CongruenceNeighborhood::trivial(4), schedule, opt);
  REQUIRE(series.records.size() == 5);
  for (std::size_t i = 0; i < series.records.size(); ++i) {
    const auto& r = series.records[i];
    CHECK(r.height == "h=" + std::to_string(i + 1));
    CHECK(r.count > 0);
    CHECK(r.abs_err == doctest::Approx(std::abs(static_cast<double>(r.count) - r.main)));
  }
  CHECK(series.records.back().rel_err < series.records.front().rel_err);
}
