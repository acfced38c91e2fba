#include "supertail/binomial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace supertail {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::int64_t kFactorialTableSize = 256;

const std::array<double, kFactorialTableSize>& factorial_table() {
  static const auto table = [] {
    std::array<double, kFactorialTableSize> t{};
    long double acc = 0.0L;
    t[0] = 0.0;
    for (std::int64_t k = 1; k < kFactorialTableSize; ++k) {
      acc += std::log(static_cast<long double>(k));
      t[k] = static_cast<double>(acc);
    }
    return t;
  }();
  return table;
}

// Stirling series for ln k!; the truncation error at k >= 256 is below 1e-25.
double stirling_log_factorial(double k) {
  const double inv = 1.0 / k;
  const double inv2 = inv * inv;
  const double series =
      inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
  return k * std::log(k) - k + 0.5 * std::log(2.0 * std::numbers::pi * k) + series;
}

}  // namespace

LogValue::LogValue(double log_value) : log_(log_value) {
  if (std::isnan(log_value)) throw std::domain_error("LogValue: NaN");
  if (log_value == std::numeric_limits<double>::infinity())
    throw std::domain_error("LogValue: +inf is not the log of a finite value");
}

LogValue LogValue::from_linear(double value) {
  if (!(value >= 0.0)) throw std::domain_error("LogValue: negative or NaN linear value");
  if (value == 0.0) return zero();
  return LogValue(std::log(value));
}

double LogValue::linear() const { return is_zero() ? 0.0 : std::exp(log_); }

double LogValue::log10() const { return is_zero() ? kNegInf : log_ / std::numbers::ln10; }

LogValue log_sum_exp(LogValue a, LogValue b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const double hi = std::max(a.log(), b.log());
  const double lo = std::min(a.log(), b.log());
  return LogValue(hi + std::log1p(std::exp(lo - hi)));
}

LogValue log_sum_exp(std::span<const LogValue> values) {
  double hi = kNegInf;
  for (auto v : values) hi = std::max(hi, v.log());
  if (hi == kNegInf) return LogValue::zero();
  double acc = 0.0;
  for (auto v : values)
    if (!v.is_zero()) acc += std::exp(v.log() - hi);
  return LogValue(hi + std::log(acc));
}

LogValue weighted_log_sum_exp(double log_wa, LogValue a, double log_wb, LogValue b) {
  const LogValue wa = (log_wa == kNegInf || a.is_zero()) ? LogValue::zero() : LogValue(log_wa + a.log());
  const LogValue wb = (log_wb == kNegInf || b.is_zero()) ? LogValue::zero() : LogValue(log_wb + b.log());
  return log_sum_exp(wa, wb);
}

double log_factorial(std::int64_t k) {
  if (k < 0) throw std::domain_error("log_factorial: negative argument");
  if (k < kFactorialTableSize) return factorial_table()[static_cast<std::size_t>(k)];
  return stirling_log_factorial(static_cast<double>(k));
}

Probability Probability::from_double(double p) { return Probability{p, std::nullopt}; }

Probability Probability::from_ratio(std::int64_t num, std::int64_t den) {
  if (den <= 0 || num <= 0 || num >= den)
    throw std::domain_error("probability ratio must satisfy 0 < num < den");
  return Probability{static_cast<double>(num) / static_cast<double>(den), std::make_pair(num, den)};
}

BinomialSpec::BinomialSpec(std::int64_t n, double p) : BinomialSpec(n, Probability::from_double(p)) {}

BinomialSpec::BinomialSpec(std::int64_t n, Probability p) : n_(n), p_(std::move(p)) {
  if (n_ < 1) throw std::domain_error("binomial: n must be >= 1, got " + std::to_string(n_));
  if (!(p_.value > 0.0 && p_.value < 1.0))
    throw std::domain_error("binomial: p must lie in (0, 1)");
  if (p_.ratio) {
    const auto [num, den] = *p_.ratio;
    q_ = static_cast<double>(den - num) / static_cast<double>(den);
  } else {
    q_ = 1.0 - p_.value;
  }
  log_p_ = std::log(p_.value);
  log_q_ = std::log1p(-p_.value);
}

LogValue log_pmf(const BinomialSpec& spec, std::int64_t j) {
  const auto n = spec.n();
  if (j < 0 || j > n) throw std::domain_error("log_pmf: j outside [0, n]");
  const double log_choose = log_factorial(n) - log_factorial(j) - log_factorial(n - j);
  return LogValue(log_choose + static_cast<double>(j) * spec.log_p() +
                  static_cast<double>(n - j) * spec.log_q());
}

double log_pmf_ratio(const BinomialSpec& spec, std::int64_t j) {
  const double jd = static_cast<double>(j);
  const double rest = static_cast<double>(spec.n() - j + 1);
  return std::log(jd / rest) + (spec.log_q() - spec.log_p());
}

std::int64_t j_star(const BinomialSpec& spec) {
  const auto n = spec.n();
  const double scaled = static_cast<double>(n + 1) * spec.p();
  std::int64_t j = static_cast<std::int64_t>(std::floor(scaled)) + 1;
  if (spec.probability().ratio && std::abs(scaled - std::round(scaled)) < 1e-9) {
    const auto [num, den] = *spec.probability().ratio;
    j = ((n + 1) * num) / den + 1;
  }
  // A float tie p_{j-1} == p_j must not leave a knot with a non-positive
  // log ratio; the pmf is numerically flat there, so move past it.
  while (j <= n && log_pmf_ratio(spec, j) <= 0.0) ++j;
  return std::clamp<std::int64_t>(j, 1, n + 1);
}

LogValue TailTable::tail(std::int64_t j) const {
  if (j <= 0) return LogValue::one();
  if (j > n()) return LogValue::zero();
  return log_tail[static_cast<std::size_t>(j)];
}

LogValue TailTable::pmf(std::int64_t j) const {
  if (j < 0 || j > n()) return LogValue::zero();
  return log_pmf[static_cast<std::size_t>(j)];
}

TailTable build_tail_table(const BinomialSpec& spec) {
  const auto n = spec.n();
  TailTable table{spec, {}, {}, j_star(spec)};
  table.log_pmf.reserve(static_cast<std::size_t>(n + 1));
  for (std::int64_t j = 0; j <= n; ++j) table.log_pmf.push_back(log_pmf(spec, j));

  table.log_tail.assign(static_cast<std::size_t>(n + 2), LogValue::zero());
  LogValue acc = LogValue::zero();
  for (std::int64_t j = n; j >= 1; --j) {
    acc = log_sum_exp(acc, table.log_pmf[static_cast<std::size_t>(j)]);
    table.log_tail[static_cast<std::size_t>(j)] = acc.log() > 0.0 ? LogValue::one() : acc;
  }
  table.log_tail[0] = LogValue::one();
  return table;
}

double normal_tail(double x) {
  if (std::isnan(x)) throw std::domain_error("normal_tail: NaN argument");
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

}  // namespace supertail
