#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <numbers>
#include <random>

#include "supertail/bounds.hpp"
#include "supertail/comparison.hpp"
#include "supertail/oracle.hpp"

using namespace supertail;

namespace {

SupermartingaleSpec figure_spec() { return SupermartingaleSpec::canonical(30, Probability::from_ratio(3, 100)); }

// ln Q^Lin(x + 1/2) straight from the 50-digit tails.
double exact_lin_shifted(const std::vector<oracle::HighPrecision>& tails, std::int64_t n, double x) {
  const double s = x + 0.5;
  if (s <= 0.0) return 0.0;
  if (s >= static_cast<double>(n + 1)) return -std::numeric_limits<double>::infinity();
  const auto j = static_cast<std::size_t>(std::floor(s));
  const oracle::HighPrecision t = s - std::floor(s);
  const oracle::HighPrecision v = (1 - t) * tails[j] + t * tails[j + 1];
  return static_cast<double>(log(v));
}

}  // namespace

TEST_CASE("spec validation and derived quantities") {
  CHECK_THROWS_AS(SupermartingaleSpec(0, 1.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(SupermartingaleSpec(3, 0.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(SupermartingaleSpec(3, 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(SupermartingaleSpec(3, 1.0, std::vector<double>{0.1, 0.2}), std::domain_error);
  const SupermartingaleSpec s(2, 1.0, std::vector<double>{0.1, 0.2});
  CHECK(s.sigma2() == doctest::Approx(0.025));
  CHECK(s.p() == doctest::Approx(0.025 / 1.025));
  CHECK(s.p() + s.q() == doctest::Approx(1.0));
  CHECK(s.h() == doctest::Approx(1.025));
  CHECK(s.h() > s.d());
}

TEST_CASE("rescale") {
  const SupermartingaleSpec s(30, 1.0, std::sqrt(3.0 / 97.0));
  CHECK(s.p() == doctest::Approx(0.03).epsilon(1e-14));
  CHECK(rescale(s, 0.0) == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(rescale(s, 30.0) == doctest::Approx(30.0).epsilon(1e-14));
  CHECK(rescale(s, (4.0 - 0.9) / 0.97) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(unrescale(s, rescale(s, 1.7)) == doctest::Approx(1.7).epsilon(1e-14));
}

TEST_CASE("c_alpha") {
  CHECK(c_alpha(2.0) == doctest::Approx(std::exp(2.0) / 2.0).epsilon(1e-14));
  CHECK(c_alpha(3.0) == doctest::Approx(2.0 * std::exp(3.0) / 9.0).epsilon(1e-14));
  CHECK(c_alpha(1.0) == doctest::Approx(std::numbers::e).epsilon(1e-14));
  CHECK(c_alpha(2.5) == doctest::Approx(std::tgamma(3.5) * std::pow(std::numbers::e / 2.5, 2.5)).epsilon(1e-12));
  CHECK(std::abs(c2() - 3.69452) < 1e-5);
  CHECK(std::abs(c3() - 4.46345) < 1e-5);
  CHECK_THROWS_AS(c_alpha(0.0), std::domain_error);
  CHECK_THROWS_AS(c_alpha(-1.0), std::domain_error);
}

TEST_CASE("new bound") {
  const auto s = figure_spec();
  CHECK(std::abs(theorem23_bound(s, unrescale(s, 4.0)) - 0.026) < 1e-3);
  CHECK(std::abs(theorem23_bound(s, unrescale(s, 25.0)) / 3.44e-33 - 1.0) < 0.02);
  CHECK(theorem23_bound(s, -100.0) == 1.0);
  CHECK(theorem23_bound(s, unrescale(s, 30.5)) == 0.0);
}

TEST_CASE("old bound") {
  const auto s = figure_spec();
  const BoundEvaluator ev(s);
  const auto table = build_tail_table(s.binomial());
  for (std::int64_t j = 0; j <= 30; ++j) {
    const double expect = std::min(1.0, c2() * table.tail(j).linear());
    CHECK(ev.old_bound_at_x(static_cast<double>(j)).value() == doctest::Approx(expect).epsilon(1e-13));
  }
  const double ratio = ev.new_bound_at_x(4.0).value() / ev.old_bound_at_x(4.0).value();
  CHECK(std::abs(ratio - 0.58) < 0.01);
  CHECK(ev.old_bound_at_x(30.01).value() == 0.0);
}

TEST_CASE("truncation bound") {
  const auto s = figure_spec();
  const BoundEvaluator ev(s);
  const double y = unrescale(s, 4.0);
  const std::vector<double> zeros(30, 0.0);
  CHECK(ev.truncation_bound(y, zeros) == ev.new_bound(y).value());
  const std::vector<double> big(30, 0.05);
  CHECK(ev.truncation_bound(y, big) == 1.0);
  CHECK(ev.truncation_bound_from_sum(y, 0.01) == doctest::Approx(0.01 + ev.new_bound(y).value()).epsilon(1e-15));
  const std::vector<double> bad = {0.1, -0.01};
  CHECK_THROWS_AS(ev.truncation_bound(y, bad), std::domain_error);
  const std::vector<double> bad2 = {1.5};
  CHECK_THROWS_AS(ev.truncation_bound(y, bad2), std::domain_error);
  CHECK_THROWS_AS(ev.truncation_bound_from_sum(y, -0.1), std::domain_error);
}

TEST_CASE("rademacher bound") {
  const RademacherSpec r(std::vector<double>(20, 1.0), std::vector<double>(20, 1.0));
  CHECK(r.b() == doctest::Approx(std::sqrt(20.0)));
  CHECK(rademacher_coordinate(r, 0.0) == doctest::Approx(10.0));
  CHECK(rademacher_coordinate(r, 4.0) == doctest::Approx(12.0));
  CHECK(rademacher_bound(r, 21.0) == 0.0);  // x = 20.5

  // c_3 times the hull of the exact linear interpolation, at x = 12
  const BinomialSpec half(20, Probability::from_ratio(1, 2));
  const auto tails = oracle::exact_tails(half);
  const auto lattice = build_knot_lattice(build_tail_table(half));
  std::vector<double> xs;
  for (int i = 0; i <= 21500; ++i) xs.push_back(-1.0 + 1e-3 * i);
  for (const Knot& k : lattice.knots) {
    xs.push_back(k.y);
    xs.push_back(k.x);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<oracle::HullPoint> pts;
  for (double x : xs) pts.push_back({x, exact_lin_shifted(tails, 20, x)});
  const auto hull = oracle::concave_hull_majorant(pts);
  const double expect = c3() * std::exp(hull(12.0));
  CHECK(rademacher_bound(r, 4.0) == doctest::Approx(expect).epsilon(1e-9));

  // with d_i = sigma_i = 1 this is the p = 1/2 lattice evaluation with c_3
  const LinLcMajorant m(half);
  for (double y : {-3.0, 0.0, 1.0, 2.5, 7.0, 13.0}) {
    const double x = y / 2.0 + 10.0;
    CHECK(rademacher_bound(r, y) == doctest::Approx(std::min(1.0, c3() * m.shifted(x).linear())).epsilon(1e-14));
  }
  CHECK_THROWS_AS(RademacherSpec({1.0}, {1.0, 2.0}), std::domain_error);
  const RademacherSpec mixed({1.0, 2.0}, {3.0, 0.5});
  CHECK(mixed.b() == doctest::Approx(std::sqrt(13.0)));
}

TEST_CASE("gaussian bound and hoeffding baseline") {
  CHECK(gaussian_bound(1.0, 0.0) == 1.0);
  CHECK(gaussian_bound(2.0, 6.0) == doctest::Approx(c3() * 0.0013498980316300945267).epsilon(1e-13));
  CHECK(gaussian_bound(1.0, std::numeric_limits<double>::infinity()) == 0.0);
  CHECK_THROWS_AS(gaussian_bound(0.0, 1.0), std::domain_error);
  CHECK(hoeffding_baseline(0.0) == 1.0);
  CHECK(hoeffding_baseline(-2.0) == 1.0);
  CHECK(hoeffding_baseline(2.0) == doctest::Approx(0.1353352832366127).epsilon(1e-15));
  const double cross = gaussian_hoeffding_crossover();
  CHECK(cross >= 1.3123);
  CHECK(cross <= 1.3125);
  // 50-digit root of the same equation
  CHECK(std::abs(cross - 1.3124002056075350557) < 1e-12);
  CHECK(c3() * normal_tail(cross + 1e-6) < hoeffding_baseline(cross + 1e-6));
  CHECK(c3() * normal_tail(cross - 1e-6) > hoeffding_baseline(cross - 1e-6));
}

TEST_CASE("bound report") {
  const auto s = figure_spec();
  const BoundEvaluator ev(s);
  const auto r = bound_report_at_x(ev, 4.0);
  REQUIRE(r.ratio.has_value());
  CHECK(std::abs(*r.ratio - 0.58) < 0.01);
  CHECK(r.y == doctest::Approx(unrescale(s, 4.0)));
  CHECK(r.log10_new_bound == doctest::Approx(std::log10(r.new_bound)));

  const auto left = bound_report_at_x(ev, -0.75);
  CHECK(left.new_bound == 1.0);
  CHECK(left.old_bound == 1.0);
  CHECK(left.clipped_new);
  CHECK(left.clipped_old);
  CHECK(left.log10_new_bound == 0.0);

  const auto beyond = bound_report_at_x(ev, 31.0);
  CHECK(beyond.new_bound == 0.0);
  CHECK(beyond.old_bound == 0.0);
  CHECK(!beyond.ratio.has_value());
  CHECK(!beyond.underflow_new);

  const BoundEvaluator deep(SupermartingaleSpec::canonical(1000, Probability::from_ratio(1, 100)));
  const auto tiny = bound_report_at_x(deep, 999.0);
  CHECK(tiny.new_bound == 0.0);
  CHECK(tiny.underflow_new);
  CHECK(tiny.underflow_old);
  CHECK(std::isfinite(tiny.log10_new_bound));
  CHECK(tiny.log10_new_bound < -1000.0);
}

TEST_CASE("bound properties on random specs") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::int64_t> n_dist(1, 60);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const auto n = n_dist(rng);
    const double d = 0.1 + 3.0 * unit(rng);
    std::vector<double> sig(static_cast<std::size_t>(n));
    for (auto& v : sig) v = 0.05 + 2.0 * unit(rng);
    const SupermartingaleSpec spec(n, d, sig);
    const BoundEvaluator ev(spec);
    const auto jss = j_double_star(n, spec.p());

    double prev_new = 2.0, prev_old = 2.0;
    for (double x = -1.0; x <= static_cast<double>(n) + 1.0; x += 0.05) {
      const double y = unrescale(spec, x);
      const auto r = bound_report(ev, y);
      CHECK(r.new_bound >= 0.0);
      CHECK(r.new_bound <= 1.0);
      CHECK(r.new_bound <= prev_new);
      CHECK(r.old_bound <= prev_old);
      prev_new = r.new_bound;
      prev_old = r.old_bound;
      if (x <= static_cast<double>(jss)) CHECK(r.new_bound <= r.old_bound * (1.0 + 1e-12));
    }

    // joint rescaling of (d, sigma_i, y) leaves the bound unchanged
    const double lambda = 0.2 + 5.0 * unit(rng);
    std::vector<double> scaled_sig = sig;
    for (auto& v : scaled_sig) v *= lambda;
    const SupermartingaleSpec scaled(n, lambda * d, scaled_sig);
    const double y = unrescale(spec, unit(rng) * static_cast<double>(n));
    CHECK(theorem23_bound(scaled, lambda * y) == doctest::Approx(theorem23_bound(spec, y)).epsilon(1e-9));
  }
}
