#include "supertail/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace supertail::oracle {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

HighPrecision exact_p(const BinomialSpec& spec) {
  if (const auto& r = spec.probability().ratio)
    return HighPrecision(r->first) / HighPrecision(r->second);
  return HighPrecision(spec.p());
}

// (b - a) x (c - b) >= 0: b is on or below the chord from a to c.
bool not_above_chord(const HullPoint& a, const HullPoint& b, const HullPoint& c) {
  const long double cross = static_cast<long double>(b.x - a.x) * (static_cast<long double>(c.logv) - b.logv) -
                            static_cast<long double>(b.logv - a.logv) * (static_cast<long double>(c.x) - b.x);
  return cross >= 0.0L;
}

}  // namespace

std::vector<HighPrecision> exact_tails(const BinomialSpec& spec) {
  const auto n = spec.n();
  if (n > kMaxOracleN) throw std::domain_error("oracle: n exceeds the oracle scale limit");
  const HighPrecision p = exact_p(spec);
  const HighPrecision q = HighPrecision(1) - p;

  std::vector<HighPrecision> pmf(static_cast<std::size_t>(n + 1));
  HighPrecision choose = 1;
  for (std::int64_t j = 0; j <= n; ++j) {
    pmf[static_cast<std::size_t>(j)] = choose * boost::multiprecision::pow(p, static_cast<int>(j)) *
                                       boost::multiprecision::pow(q, static_cast<int>(n - j));
    choose = choose * (n - j) / (j + 1);
  }
  std::vector<HighPrecision> tails(static_cast<std::size_t>(n + 2), HighPrecision(0));
  for (std::int64_t j = n; j >= 0; --j)
    tails[static_cast<std::size_t>(j)] = tails[static_cast<std::size_t>(j + 1)] + pmf[static_cast<std::size_t>(j)];
  tails[0] = 1;
  return tails;
}

HighPrecision exact_tail(const BinomialSpec& spec, std::int64_t j) {
  if (spec.n() > kMaxOracleN) throw std::domain_error("oracle: n exceeds the oracle scale limit");
  if (j <= 0) return HighPrecision(1);
  if (j > spec.n()) return HighPrecision(0);
  return exact_tails(spec)[static_cast<std::size_t>(j)];
}

HullFunction::HullFunction(std::vector<HullPoint> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.empty()) throw std::domain_error("hull: no vertices");
}

double HullFunction::operator()(double x) const {
  if (x < vertices_.front().x || x > vertices_.back().x) throw std::domain_error("hull: query outside the sampled range");
  auto it = std::lower_bound(vertices_.begin(), vertices_.end(), x,
                             [](const HullPoint& v, double value) { return v.x < value; });
  if (it->x == x) return it->logv;
  const HullPoint& right = *it;
  const HullPoint& left = *(it - 1);
  if (right.logv == kNegInf || left.logv == kNegInf) return kNegInf;
  const double t = (x - left.x) / (right.x - left.x);
  return (1.0 - t) * left.logv + t * right.logv;
}

HullFunction concave_hull_majorant(std::span<const HullPoint> samples) {
  if (samples.size() < 2) throw std::domain_error("hull: need at least two samples");
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (!(samples[i].x > samples[i - 1].x)) throw std::domain_error("hull: sample abscissae must increase strictly");

  std::vector<HullPoint> chain;
  std::optional<HullPoint> terminal;
  for (const auto& s : samples) {
    if (std::isnan(s.logv)) throw std::domain_error("hull: NaN sample");
    if (s.logv == kNegInf) {
      if (!terminal) terminal = s;
      continue;
    }
    terminal.reset();
    while (chain.size() >= 2 && not_above_chord(chain[chain.size() - 2], chain.back(), s)) chain.pop_back();
    chain.push_back(s);
  }
  if (terminal && !chain.empty()) chain.push_back(*terminal);
  if (chain.empty()) chain.push_back(samples.front());
  return HullFunction(std::move(chain));
}

HullFunction lc_majorant_on_integers(const TailTable& table) {
  std::vector<HullPoint> samples;
  for (std::int64_t j = 0; j <= table.n() + 1; ++j)
    samples.push_back({static_cast<double>(j), table.tail(j).log()});
  return concave_hull_majorant(samples);
}

DiscreteDistribution::DiscreteDistribution(std::vector<Atom> atoms) {
  if (atoms.empty()) throw std::domain_error("distribution: no atoms");
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!(a.prob >= 0.0) || !std::isfinite(a.value)) throw std::domain_error("distribution: invalid atom");
    total += a.prob;
    if (!atoms_.empty() && atoms_.back().value == a.value) {
      atoms_.back().prob += a.prob;
    } else {
      atoms_.push_back(a);
    }
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::domain_error("distribution: probabilities do not sum to 1");
}

double DiscreteDistribution::mean() const {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.prob * a.value;
  return m;
}

double DiscreteDistribution::variance() const {
  const double m = mean();
  double v = 0.0;
  for (const auto& a : atoms_) v += a.prob * (a.value - m) * (a.value - m);
  return v;
}

double DiscreteDistribution::excess_square(double t) const {
  double acc = 0.0;
  for (const auto& a : atoms_) {
    const double e = std::max(0.0, a.value - t);
    acc += a.prob * e * e;
  }
  return acc;
}

DiscreteDistribution extremal_two_point(double d, double sigma) {
  if (!(d > 0.0) || !(sigma > 0.0)) throw std::domain_error("extremal_two_point: d and sigma must be positive");
  const double a = sigma * sigma / (d * d);
  return DiscreteDistribution({{-a * d, 1.0 / (1.0 + a)}, {d, a / (1.0 + a)}});
}

Lemma32Result lemma32_check(const DiscreteDistribution& dist, double d, double sigma, double t) {
  if (!(d > 0.0) || !(sigma > 0.0)) throw std::domain_error("lemma32_check: d and sigma must be positive");
  if (dist.max_value() > d) throw std::domain_error("lemma32_check: support exceeds d");
  if (std::abs(dist.mean()) > 1e-12) throw std::domain_error("lemma32_check: mean is not zero");
  if (dist.variance() > sigma * sigma + 1e-12) throw std::domain_error("lemma32_check: variance exceeds sigma^2");
  Lemma32Result r;
  r.lhs = dist.excess_square(t);
  r.rhs = extremal_two_point(d, sigma).excess_square(t);
  r.holds = r.lhs <= r.rhs + 1e-12;
  return r;
}

}  // namespace supertail::oracle

namespace supertail::oracle {

namespace {

// ln((1 - t) q_j + t q_{j+1}) with q given by its logs; no shared code with
// the majorant module.
double lin_interp_log(const std::vector<double>& log_q, double x) {
  const auto last = static_cast<double>(log_q.size() - 1);  // n + 1
  if (x <= 0.0) return 0.0;
  if (x >= last) return kNegInf;
  const double j = std::floor(x);
  const double t = x - j;
  const double a = log_q[static_cast<std::size_t>(j)];
  const double b = log_q[static_cast<std::size_t>(j) + 1];
  if (t == 0.0) return a;
  if (b == kNegInf) return a + std::log1p(-t);
  // a >= b since tails are nonincreasing
  return a + std::log1p(-t + t * std::exp(b - a));
}

}  // namespace

HullCheck check_majorant_against_hull(const TailTable& table, const KnotLattice& lattice, double grid_step,
                                      std::span<const double> extra_queries) {
  if (!(grid_step > 0.0)) throw std::domain_error("hull check: grid step must be positive");
  const auto n = table.n();
  const auto exact = exact_tails(table.spec);
  std::vector<double> log_q;
  HullCheck result;
  for (std::int64_t j = 0; j <= n + 1; ++j) {
    const auto& e = exact[static_cast<std::size_t>(j)];
    log_q.push_back(e == 0 ? kNegInf : static_cast<double>(boost::multiprecision::log(e)));
    if (j <= n) {
      const double fast = table.tail(j).linear();
      const double rel = static_cast<double>(abs(HighPrecision(fast) - e) / e);
      result.max_tail_rel_error = std::max(result.max_tail_rel_error, rel);
    }
  }

  const double lo = -1.0;
  const double hi = static_cast<double>(n) + 0.5;
  std::vector<double> xs;
  const auto steps = static_cast<std::int64_t>(std::floor((hi - lo) / grid_step + 1e-9));
  for (std::int64_t k = 0; k <= steps; ++k) xs.push_back(lo + static_cast<double>(k) * grid_step);
  xs.push_back(hi);
  for (const auto& knot : lattice.knots) {
    if (knot.j > n) continue;
    xs.push_back(knot.y);
    xs.push_back(knot.x);
  }
  for (double x : extra_queries)
    if (x >= lo && x <= hi) xs.push_back(x);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  std::vector<HullPoint> samples;
  samples.reserve(xs.size());
  for (double x : xs) samples.push_back({x, lin_interp_log(log_q, x + 0.5)});
  const HullFunction hull = concave_hull_majorant(samples);

  for (double x : xs) {
    const double expected = hull(x);
    const double got = q_linlc_shifted(table, lattice, x).log();
    double diff = 0.0;
    if (expected == kNegInf || got == kNegInf) {
      diff = (expected == got) ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
      diff = std::abs(expected - got);
    }
    if (diff > result.max_log_discrepancy) {
      result.max_log_discrepancy = diff;
      result.worst_x = x;
    }
  }
  result.samples = xs.size();
  return result;
}

}  // namespace supertail::oracle
