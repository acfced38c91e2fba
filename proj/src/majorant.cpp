#include "supertail/majorant.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace supertail {

namespace {

// (L - 1 + e^{-L}) / L, computed without cancellation for small L.
double knot_offset_factor(double L) {
  if (L < 0.5) {
    // sum_{k>=1} (-1)^{k+1} L^k / (k+1)!
    double term = L / 2.0;
    double sum = 0.0;
    for (int k = 1; k < 30; ++k) {
      sum += term;
      term *= -L / static_cast<double>(k + 2);
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return (L + std::expm1(-L)) / L;
}

}  // namespace

const Knot* KnotLattice::find(std::int64_t j) const {
  if (j < j_star || j > n + 1) return nullptr;
  return &knots[static_cast<std::size_t>(j - j_star)];
}

LogValue q_lin(const TailTable& table, double x) {
  if (std::isnan(x)) throw std::domain_error("q_lin: NaN argument");
  const auto n = table.n();
  if (x <= 0.0) return LogValue::one();
  if (x >= static_cast<double>(n + 1)) return LogValue::zero();
  const auto j = static_cast<std::int64_t>(std::floor(x));
  const double t = x - static_cast<double>(j);
  if (t == 0.0) return table.tail(j);
  // ln q_j + ln(1 - t (1 - q_{j+1}/q_j)) keeps full accuracy when both tails are near one
  const LogValue a = table.tail(j);
  const LogValue b = table.tail(j + 1);
  return LogValue(a.log() + std::log1p(t * std::expm1(b.log() - a.log())));
}

LogValue q_lc(const TailTable& table, double x) {
  if (std::isnan(x)) throw std::domain_error("q_lc: NaN argument");
  const auto n = table.n();
  if (x <= 0.0) return LogValue::one();
  if (x > static_cast<double>(n)) return LogValue::zero();
  const auto j = static_cast<std::int64_t>(std::floor(x));
  const double t = x - static_cast<double>(j);
  if (t == 0.0) return table.tail(j);
  return LogValue((1.0 - t) * table.tail(j).log() + t * table.tail(j + 1).log());
}

KnotLattice build_knot_lattice(const TailTable& table) {
  const auto n = table.n();
  KnotLattice lattice{n, table.j_star, {}};
  lattice.knots.reserve(static_cast<std::size_t>(n + 2 - table.j_star));
  for (std::int64_t j = table.j_star; j <= n; ++j) {
    const LogValue prev = table.pmf(j - 1);
    const LogValue cur = table.pmf(j);
    if (prev.is_zero() || cur.is_zero())
      throw std::domain_error("build_knot_lattice: zero pmf value at knot " + std::to_string(j));
    // ln(p_{j-1}/p_j) from the closed form; the log difference of the table
    // entries loses digits when the two are nearly equal.
    const double L = log_pmf_ratio(table.spec, j);
    assert(std::abs(L - (prev.log() - cur.log())) < 1e-9 * std::max(1.0, std::abs(L)));
    const double tail_over_pmf = std::exp(table.tail(j).log() - cur.log());  // q_j / p_j
    Knot k;
    k.j = j;
    k.x = static_cast<double>(j) - 0.5 + tail_over_pmf * knot_offset_factor(L);
    k.y = k.x + tail_over_pmf * std::expm1(-L);  // x_j - q_j (1/p_j - 1/p_{j-1})
    lattice.knots.push_back(k);
  }
  lattice.knots.push_back(Knot{n + 1, static_cast<double>(n) + 0.5, static_cast<double>(n) + 1.5, {}, {}});
  for (auto& k : lattice.knots) {
    k.lin_at_y = q_lin(table, k.y + 0.5);
    k.lin_at_x = q_lin(table, k.x + 0.5);
  }
  return lattice;
}

LogValue q_interp(const TailTable& table, const Knot& knot, double x) {
  (void)table;
  if (!(x >= knot.y && x <= knot.x))
    throw std::domain_error("q_interp: x outside the knot interval [y_j, x_j]");
  const double delta = (x - knot.y) / (knot.x - knot.y);
  if (delta == 0.0) return knot.lin_at_y;
  if (delta == 1.0) return knot.lin_at_x;
  if (knot.lin_at_y.is_zero() || knot.lin_at_x.is_zero()) return LogValue::zero();
  return LogValue((1.0 - delta) * knot.lin_at_y.log() + delta * knot.lin_at_x.log());
}

LogValue q_linlc_shifted(const TailTable& table, const KnotLattice& lattice, double x) {
  if (std::isnan(x)) throw std::domain_error("q_linlc_shifted: NaN argument");
  const auto n = table.n();
  if (x >= static_cast<double>(n) + 0.5) return LogValue::zero();
  if (x <= -0.5) return LogValue::one();
  const auto k = static_cast<std::int64_t>(std::floor(x));
  for (std::int64_t j = k; j <= k + 1; ++j) {
    if (j < lattice.j_star || j > n) continue;
    const Knot& knot = *lattice.find(j);
    if (knot.y < x && x < knot.x) return q_interp(table, knot, x);
  }
  return q_lin(table, x + 0.5);
}

LinLcMajorant::LinLcMajorant(const BinomialSpec& spec)
    : table_(build_tail_table(spec)), lattice_(build_knot_lattice(table_)) {}

}  // namespace supertail
