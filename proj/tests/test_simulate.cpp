#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "supertail/simulate.hpp"

using namespace supertail;

namespace {

const FamilyKind kFamilies[] = {FamilyKind::two_point_extremal, FamilyKind::truncated_shifted,
                                FamilyKind::bounded_uniform};

}  // namespace

TEST_CASE("family names") {
  for (auto k : kFamilies) CHECK(parse_family(to_string(k)) == k);
  CHECK_THROWS_AS(parse_family("gaussian"), std::invalid_argument);
}

TEST_CASE("tilt_to_martingale") {
  CHECK(tilt_to_martingale(-0.3, 0.0, 1.0) == -0.3);
  CHECK(tilt_to_martingale(2.0, -0.7, 2.0) == 2.0);
  // gamma = (-1/2)/(-1/2 - 1) = 1/3
  CHECK(tilt_to_martingale(0.0, -0.5, 1.0) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(tilt_to_martingale(1.5, -0.1, 1.0), std::domain_error);
  CHECK_THROWS_AS(tilt_to_martingale(0.5, 0.1, 1.0), std::domain_error);
  CHECK_THROWS_AS(tilt_to_martingale(0.5, -0.1, 0.0), std::domain_error);
  for (double x : {-5.0, -1.0, 0.0, 0.7, 1.0}) {
    const double t = tilt_to_martingale(x, -0.4, 1.0);
    CHECK(x <= t);
    CHECK(t <= 1.0);
  }
}

TEST_CASE("SplitMix64 streams") {
  SplitMix64 a(42, 7), b(42, 7), c(42, 8);
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next();
    CHECK(va == b.next());
    CHECK(va != c.next());
  }
  SplitMix64 u(1, 0);
  for (int i = 0; i < 100000; ++i) {
    const double v = u.uniform();
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("step law moments and support") {
  const double d = 1.5;
  for (auto kind : kFamilies)
    for (bool martingale : {false, true})
      for (double sigma : {0.3, 1.0, 4.0}) {
        const IncrementFamily fam{kind, 0.2, martingale};
        const StepLaw law(fam, d, sigma);
        CHECK(law.upper() <= d);
        CHECK(law.mean() <= 1e-15);
        if (martingale || kind != FamilyKind::truncated_shifted) CHECK(std::abs(law.mean()) < 1e-12);
        CHECK(law.variance() <= sigma * sigma * (1.0 + 1e-12));

        SplitMix64 rng(99, static_cast<std::uint64_t>(kind) * 10 + martingale);
        const int draws = 1'000'000;
        double s1 = 0.0, s2 = 0.0, s4 = 0.0, top = -1e300;
        for (int i = 0; i < draws; ++i) {
          const double x = law.sample(rng);
          s1 += x;
          s2 += x * x;
          top = std::max(top, x);
          const double c = x - law.mean();
          s4 += c * c * c * c;
        }
        const double mean = s1 / draws;
        const double var = s2 / draws - mean * mean;
        CHECK(top <= law.upper());
        CHECK(std::abs(mean - law.mean()) < 4.0 * std::sqrt(law.variance() / draws));
        const double var_se = std::sqrt((s4 / draws - law.variance() * law.variance()) / draws);
        CHECK(std::abs(var - law.variance()) < 4.0 * var_se + 1e-12);
      }
  CHECK_THROWS_AS(StepLaw({}, 0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(StepLaw({}, 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(StepLaw({FamilyKind::truncated_shifted, -0.1, false}, 1.0, 1.0), std::domain_error);
}

TEST_CASE("exceedance probabilities") {
  const SupermartingaleSpec spec(4, 1.0, std::vector<double>{0.1, 0.2, 0.3, 0.4});
  double expect = 0.0;
  for (double s : spec.sigmas()) expect += s * s / (1.0 + s * s);
  CHECK(exceedance_sum(spec, {FamilyKind::two_point_extremal}, 1.0) == doctest::Approx(expect));
  CHECK(exceedance_sum(spec, {FamilyKind::truncated_shifted}, 1.0) == 0.0);
  CHECK(exceedance_sum(spec, {FamilyKind::bounded_uniform}, 1.0) == 0.0);
  const StepLaw u({FamilyKind::bounded_uniform}, 1.0, 0.5);
  CHECK(u.exceedance(0.0) == doctest::Approx(0.5));
  const StepLaw t({FamilyKind::truncated_shifted, 0.1, false}, 1.0, 0.5);
  CHECK(t.exceedance(t.upper() + 1e-9) == 0.0);
  CHECK(t.exceedance(-100.0) == doctest::Approx(1.0));
}

TEST_CASE("sample paths") {
  const SupermartingaleSpec spec(10, 1.0, 0.4);
  for (auto kind : kFamilies) {
    const IncrementFamily fam{kind};
    const auto a = sample_path(spec, fam, 5, 3);
    const auto b = sample_path(spec, fam, 5, 3);
    CHECK(a.terminal == b.terminal);
    CHECK(a.maximum == b.maximum);
    CHECK(a.maximum >= a.terminal);
    CHECK(a.maximum >= 0.0);
  }
  const SupermartingaleSpec one(1, 0.8, 2.0);
  for (std::uint64_t i = 0; i < 10000; ++i) CHECK(sample_path(one, {FamilyKind::bounded_uniform}, 1, i).terminal <= 0.8);
}

TEST_CASE("wilson interval") {
  const auto e = wilson_estimate(30, 100);
  CHECK(e.point == 0.3);
  CHECK(e.ci_low < 0.3);
  CHECK(e.ci_high > 0.3);
  CHECK(e.standard_error() == doctest::Approx(std::sqrt(0.21 / 100)));
  const auto zero = wilson_estimate(0, 1000);
  CHECK(zero.ci_low == 0.0);
  CHECK(zero.ci_high > 0.0);
  const auto all = wilson_estimate(1000, 1000);
  CHECK(all.ci_high == 1.0);
  CHECK(all.ci_low < 1.0);
  CHECK_THROWS_AS(wilson_estimate(0, 0), std::domain_error);
}

TEST_CASE("two-point paths reproduce the binomial tails") {
  const auto spec = SupermartingaleSpec::canonical(20, Probability::from_ratio(1, 5));
  const auto table = build_tail_table(spec.binomial());
  std::vector<double> ys;
  for (std::int64_t j = 2; j <= 9; ++j) ys.push_back(unrescale(spec, static_cast<double>(j)) - 1e-9);
  const auto est = estimate_tails(spec, {FamilyKind::two_point_extremal}, ys, 400'000, 2024, 4);
  for (std::size_t k = 0; k < ys.size(); ++k) {
    const double exact = table.tail(static_cast<std::int64_t>(k) + 2).linear();
    const auto wide = wilson_estimate(est.terminal[k].successes, est.terminal[k].trials, 3.5);
    CHECK(exact >= wide.ci_low);
    CHECK(exact <= wide.ci_high);
  }
  CHECK(estimate_tail(spec, {FamilyKind::two_point_extremal}, -1e6, 1000, 1, false).point == 1.0);
  CHECK(estimate_tail(spec, {FamilyKind::truncated_shifted}, -1e6, 1000, 1, true).point == 1.0);
}

TEST_CASE("estimates do not depend on the thread count") {
  const SupermartingaleSpec spec(12, 1.0, 0.5);
  const std::vector<double> ys = {-1.0, 0.0, 0.5, 2.0};
  for (auto kind : kFamilies) {
    const auto one = estimate_tails(spec, {kind}, ys, 30'001, 77, 1);
    for (unsigned threads : {2u, 3u, 8u, 0u}) {
      const auto many = estimate_tails(spec, {kind}, ys, 30'001, 77, threads);
      for (std::size_t k = 0; k < ys.size(); ++k) {
        CHECK(one.terminal[k].successes == many.terminal[k].successes);
        CHECK(one.maximum[k].successes == many.maximum[k].successes);
      }
    }
  }
}

TEST_CASE("exact moment comparison") {
  const double sig[] = {0.3, 1.2, 0.7, 2.0, 0.5, 0.9};
  for (std::size_t n = 1; n <= 6; ++n)
    for (int i = 0; i < 50; ++i) {
      const double t = -3.0 + 0.16 * i;
      const auto r = moment_comparison_exact(1.0, std::span(sig, n), t);
      CHECK(r.heterogeneous <= r.binomial + 1e-12);
    }
  const double same[] = {0.5, 0.5, 0.5};
  const auto eq = moment_comparison_exact(1.0, same, 0.2);
  CHECK(eq.heterogeneous == doctest::Approx(eq.binomial).epsilon(1e-13));
  const std::vector<double> many(21, 1.0);
  CHECK_THROWS_AS(moment_comparison_exact(1.0, many, 0.0), std::domain_error);
}
