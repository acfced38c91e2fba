#include "supertail/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace supertail {

namespace {

double mean_square(const std::vector<double>& sigmas) {
  double acc = 0.0;
  for (double s : sigmas) acc += s * s;
  return acc / static_cast<double>(sigmas.size());
}

Probability lattice_probability(double d, double sigma2) {
  return Probability::from_double(sigma2 / (d * d + sigma2));
}

Bound scaled(double constant, LogValue majorant) {
  if (majorant.is_zero()) return Bound{LogValue::zero()};
  return Bound{LogValue(std::log(constant) + majorant.log())};
}

}  // namespace

SupermartingaleSpec::SupermartingaleSpec(std::int64_t n, double d, std::vector<double> sigmas,
                                         std::optional<Probability> p)
    : n_(n),
      d_(d),
      sigmas_(std::move(sigmas)),
      sigma2_(sigmas_.empty() ? 0.0 : mean_square(sigmas_)),
      binomial_([&] {
        if (n_ < 1) throw std::domain_error("problem: n must be >= 1");
        if (!(d_ > 0.0) || !std::isfinite(d_)) throw std::domain_error("problem: d must be positive and finite");
        if (static_cast<std::int64_t>(sigmas_.size()) != n_)
          throw std::domain_error("problem: expected " + std::to_string(n_) + " sigma values, got " +
                                  std::to_string(sigmas_.size()));
        for (double s : sigmas_)
          if (!(s > 0.0) || !std::isfinite(s)) throw std::domain_error("problem: every sigma_i must be positive");
        return BinomialSpec(n_, p.value_or(lattice_probability(d_, sigma2_)));
      }()) {}

SupermartingaleSpec::SupermartingaleSpec(std::int64_t n, double d, std::vector<double> sigmas)
    : SupermartingaleSpec(n, d, std::move(sigmas), std::nullopt) {}

SupermartingaleSpec::SupermartingaleSpec(std::int64_t n, double d, double sigma)
    : SupermartingaleSpec(n, d, std::vector<double>(static_cast<std::size_t>(std::max<std::int64_t>(n, 0)), sigma)) {}

SupermartingaleSpec SupermartingaleSpec::canonical(std::int64_t n, Probability p) {
  if (!(p.value > 0.0 && p.value < 1.0)) throw std::domain_error("problem: p must lie in (0, 1)");
  const double sigma = std::sqrt(p.value / (1.0 - p.value));
  return SupermartingaleSpec(n, 1.0, std::vector<double>(static_cast<std::size_t>(std::max<std::int64_t>(n, 0)), sigma),
                             p);
}

RademacherSpec::RademacherSpec(std::vector<double> d_list, std::vector<double> sigma_list)
    : d_list_(std::move(d_list)), sigma_list_(std::move(sigma_list)), b_(0.0) {
  if (d_list_.empty()) throw std::domain_error("rademacher: need at least one step");
  if (d_list_.size() != sigma_list_.size()) throw std::domain_error("rademacher: d and sigma lists differ in length");
  double acc = 0.0;
  for (std::size_t i = 0; i < d_list_.size(); ++i) {
    if (!(d_list_[i] > 0.0) || !(sigma_list_[i] > 0.0))
      throw std::domain_error("rademacher: d_i and sigma_i must be positive");
    const double bi = std::max(d_list_[i], sigma_list_[i]);
    acc += bi * bi;
  }
  b_ = std::sqrt(acc);
}

double c_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::domain_error("c_alpha: alpha must be positive");
  double log_gamma = 0.0;
  if (alpha == std::floor(alpha) && alpha <= 170.0) {
    log_gamma = log_factorial(static_cast<std::int64_t>(alpha));
  } else {
    log_gamma = std::lgamma(alpha + 1.0);
  }
  return std::exp(log_gamma + alpha * (1.0 - std::log(alpha)));
}

double c2() {
  static const double value = c_alpha(2.0);
  return value;
}

double c3() {
  static const double value = c_alpha(3.0);
  return value;
}

double rescale(const SupermartingaleSpec& spec, double y) {
  return spec.q() / spec.d() * y + static_cast<double>(spec.n()) * spec.p();
}

double unrescale(const SupermartingaleSpec& spec, double x) {
  return (x - static_cast<double>(spec.n()) * spec.p()) * spec.d() / spec.q();
}

double Bound::value() const { return clipped() ? 1.0 : unclipped.linear(); }

double Bound::log10() const { return clipped() ? 0.0 : unclipped.log10(); }

BoundEvaluator::BoundEvaluator(SupermartingaleSpec spec) : spec_(std::move(spec)), majorant_(spec_.binomial()) {}

Bound BoundEvaluator::new_bound_at_x(double x) const { return scaled(c2(), majorant_.shifted(x)); }

Bound BoundEvaluator::old_bound_at_x(double x) const { return scaled(c2(), majorant_.lc(x)); }

double BoundEvaluator::truncation_bound(double y, std::span<const double> exceedance) const {
  double sum = 0.0;
  for (double e : exceedance) {
    if (!(e >= 0.0 && e <= 1.0)) throw std::domain_error("truncation_bound: exceedance probabilities must lie in [0, 1]");
    sum += e;
  }
  return truncation_bound_from_sum(y, sum);
}

double BoundEvaluator::truncation_bound_from_sum(double y, double exceedance_sum) const {
  if (!(exceedance_sum >= 0.0 && exceedance_sum <= static_cast<double>(spec_.n())))
    throw std::domain_error("truncation_bound: exceedance sum must lie in [0, n]");
  const Bound main = new_bound(y);
  return std::min(1.0, exceedance_sum + main.unclipped.linear());
}

double theorem23_bound(const SupermartingaleSpec& spec, double y) { return BoundEvaluator(spec).new_bound(y).value(); }

double old_bound(const SupermartingaleSpec& spec, double y) { return BoundEvaluator(spec).old_bound(y).value(); }

double truncation_bound(const SupermartingaleSpec& spec, double y, std::span<const double> exceedance) {
  return BoundEvaluator(spec).truncation_bound(y, exceedance);
}

double truncation_bound_from_sum(const SupermartingaleSpec& spec, double y, double exceedance_sum) {
  return BoundEvaluator(spec).truncation_bound_from_sum(y, exceedance_sum);
}

double rademacher_coordinate(const RademacherSpec& spec, double y) {
  const double n = static_cast<double>(spec.n());
  return y * std::sqrt(n) / (2.0 * spec.b()) + n / 2.0;
}

Bound rademacher_bound_detail(const RademacherSpec& spec, double y) {
  const LinLcMajorant majorant(BinomialSpec(spec.n(), Probability::from_ratio(1, 2)));
  return scaled(c3(), majorant.shifted(rademacher_coordinate(spec, y)));
}

double rademacher_bound(const RademacherSpec& spec, double y) { return rademacher_bound_detail(spec, y).value(); }

double gaussian_bound(double b, double y) {
  if (!(b > 0.0)) throw std::domain_error("gaussian_bound: b must be positive");
  return std::min(1.0, c3() * normal_tail(y / b));
}

double hoeffding_baseline(double x) { return x >= 0.0 ? std::exp(-0.5 * x * x) : 1.0; }

double gaussian_hoeffding_crossover() {
  // c_3 P(Z >= x) - exp(-x^2/2) is positive at 0 and negative at 3.
  auto f = [](double x) { return c3() * normal_tail(x) - std::exp(-0.5 * x * x); };
  double lo = 0.0, hi = 3.0;
  while (hi - lo > 1e-15) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

BoundReport bound_report_at_x(const BoundEvaluator& evaluator, double x) {
  const auto& spec = evaluator.spec();
  BoundReport r;
  r.x = x;
  r.y = unrescale(spec, x);
  const Bound nb = evaluator.new_bound_at_x(x);
  const Bound ob = evaluator.old_bound_at_x(x);
  r.new_bound = nb.value();
  r.old_bound = ob.value();
  r.log10_new_bound = nb.log10();
  r.log10_old_bound = ob.log10();
  r.clipped_new = nb.clipped();
  r.clipped_old = ob.clipped();
  r.underflow_new = !nb.unclipped.is_zero() && r.new_bound == 0.0;
  r.underflow_old = !ob.unclipped.is_zero() && r.old_bound == 0.0;
  if (!ob.unclipped.is_zero()) r.ratio = std::exp(nb.unclipped.log() - ob.unclipped.log());

  double b2 = 0.0;
  for (double s : spec.sigmas()) b2 += std::pow(std::max(spec.d(), s), 2);
  const double b = std::sqrt(b2);
  r.gaussian_bound = gaussian_bound(b, r.y);
  r.hoeffding_baseline = hoeffding_baseline(r.y / b);
  r.log10_gaussian_bound = std::log10(r.gaussian_bound);
  r.log10_hoeffding_baseline = r.y >= 0.0 ? -0.5 * (r.y / b) * (r.y / b) / std::numbers::ln10 : 0.0;
  return r;
}

BoundReport bound_report(const BoundEvaluator& evaluator, double y) {
  BoundReport r = bound_report_at_x(evaluator, rescale(evaluator.spec(), y));
  r.y = y;
  return r;
}

BoundReport bound_report(const SupermartingaleSpec& spec, double y) { return bound_report(BoundEvaluator(spec), y); }

}  // namespace supertail
