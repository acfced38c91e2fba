#include "supertail/comparison.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace supertail {

namespace {

template <typename F>
double bisect(F&& f, double lo, double hi, double tol) {
  const bool lo_positive = f(lo) > 0.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    ((f(mid) > 0.0) == lo_positive ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double compute_u_star() {
  // h decreases from +inf, dips below zero and climbs back to 0 at 1-.
  // Scan decades from both ends for the sign change.
  std::vector<double> probes;
  for (int k = 15; k >= 1; --k) probes.push_back(std::pow(10.0, -k));
  for (int k = 1; k <= 12; ++k) probes.push_back(1.0 - std::pow(10.0, -k));
  for (std::size_t i = 0; i + 1 < probes.size(); ++i) {
    if (h_function(probes[i]) > 0.0 && h_function(probes[i + 1]) < 0.0)
      return bisect(h_function, probes[i], probes[i + 1], 1e-16);
  }
  throw std::logic_error("u_star: no sign change of h located");
}

// Numerator of d/da [ln(1/2 - a) / (-a)], scaled by a^2.
double r_derivative_sign(double a) { return a / (0.5 - a) + std::log(0.5 - a); }

double r_of_alpha(double a) { return std::log(0.5 - a) / -a; }

}  // namespace

double h_function(double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("h_function: u must lie in (0, 1)");
  const double e = 1.0 - u;
  // ln u loses relative accuracy as log(u) near 1; log1p(-e) does not.
  const double log_u = u < 0.5 ? std::log(u) : std::log1p(-e);
  return std::log(e / -log_u) - 1.0 - 0.5 * (1.0 + u) * log_u / e;
}

double u_star() {
  static const double value = compute_u_star();
  return value;
}

double u_double_star_from(double u_star_value) { return u_star_value / (1.0 - u_star_value); }

double u_double_star() { return u_double_star_from(u_star()); }

std::int64_t j_double_star(std::int64_t n, double p) {
  if (n < 1) throw std::domain_error("j_double_star: n must be >= 1");
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("j_double_star: p must lie in (0, 1)");
  const double q = 1.0 - p;
  const double uc = u_double_star() * q / p;
  const double v = (static_cast<double>(n) - uc) / (1.0 + uc);
  const double nearest = std::round(v);
  if (std::abs(v - nearest) < 1e-9) {
    // j <= v  <=>  p_{j+1}/p_j = (n-j) p / ((j+1) q) >= u**
    const auto j = static_cast<std::int64_t>(nearest);
    const double ratio = static_cast<double>(n - j) * p / (static_cast<double>(j + 1) * q);
    return ratio >= u_double_star() ? j : j - 1;
  }
  return static_cast<std::int64_t>(std::floor(v));
}

bool dominance_all_x(std::int64_t n, double p) {
  if (n < 1) throw std::domain_error("dominance_all_x: n must be >= 1");
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("dominance_all_x: p must lie in (0, 1)");
  return static_cast<double>(n) <= p / (1.0 - p) / u_double_star();
}

double ratio_r(const TailTable& table, const KnotLattice& lattice, double x) {
  if (x > static_cast<double>(table.n())) throw std::domain_error("ratio_r: x > n, the old bound vanishes");
  const LogValue num = q_linlc_shifted(table, lattice, x);
  const LogValue den = q_lc(table, x);
  return std::exp(num.log() - den.log());
}

Lemma36Constants lemma36_constants() {
  Lemma36Constants c;
  c.alpha_star = bisect(r_derivative_sign, 1e-9, 0.5 - 1e-9, 1e-15);
  c.r_alpha_star = r_of_alpha(c.alpha_star);
  c.exp_r_minus_one = std::expm1(c.r_alpha_star);
  return c;
}

const ComparisonConstants& comparison_constants() {
  static const ComparisonConstants constants = [] {
    const auto lemma = lemma36_constants();
    return ComparisonConstants{u_star(), u_double_star(), lemma.alpha_star, lemma.r_alpha_star,
                               lemma.exp_r_minus_one};
  }();
  return constants;
}

}  // namespace supertail
