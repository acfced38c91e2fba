#pragma once

// Log-domain binomial distribution: pmf, upper tails, and the index where
// the pmf starts to decrease strictly. Everything downstream (majorants,
// bounds, comparisons) is built on the TailTable defined here.

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace supertail {

// Logarithm of a nonnegative real. Exact zero is carried as -infinity and
// never as an underflowed finite log. NaN is rejected at construction.
class LogValue {
 public:
  constexpr LogValue() = default;
  explicit LogValue(double log_value);

  static constexpr LogValue zero() { return LogValue(Tag{}, -kInf); }
  static constexpr LogValue one() { return LogValue(Tag{}, 0.0); }
  static LogValue from_linear(double value);

  constexpr double log() const { return log_; }
  double linear() const;
  double log10() const;
  constexpr bool is_zero() const { return log_ == -kInf; }

  friend constexpr bool operator==(LogValue, LogValue) = default;
  friend constexpr auto operator<=>(LogValue a, LogValue b) { return a.log_ <=> b.log_; }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  struct Tag {};
  constexpr LogValue(Tag, double v) : log_(v) {}

  double log_ = -kInf;
};

// ln(e^a + e^b) without overflow; -inf inputs are neutral.
LogValue log_sum_exp(LogValue a, LogValue b);
LogValue log_sum_exp(std::span<const LogValue> values);

// ln(w_a e^a + w_b e^b) for nonnegative weights given as logs.
LogValue weighted_log_sum_exp(double log_wa, LogValue a, double log_wb, LogValue b);

// ln(k!) accurate to about 1e-15 relative for all k >= 0.
double log_factorial(std::int64_t k);

// Success probability with an optional exact rational form num/den. The
// rational form only matters where floor((n+1)p) is sensitive to rounding.
struct Probability {
  double value = 0.5;
  std::optional<std::pair<std::int64_t, std::int64_t>> ratio;

  static Probability from_double(double p);
  static Probability from_ratio(std::int64_t num, std::int64_t den);
};

class BinomialSpec {
 public:
  // Throws std::domain_error unless n >= 1 and 0 < p < 1.
  BinomialSpec(std::int64_t n, double p);
  BinomialSpec(std::int64_t n, Probability p);

  std::int64_t n() const { return n_; }
  double p() const { return p_.value; }
  double q() const { return q_; }
  const Probability& probability() const { return p_; }
  double log_p() const { return log_p_; }
  double log_q() const { return log_q_; }

 private:
  std::int64_t n_;
  Probability p_;
  double q_;
  double log_p_;
  double log_q_;
};

// ln P(B = j) for B ~ Bin(n, p). Throws std::domain_error for j outside [0, n].
LogValue log_pmf(const BinomialSpec& spec, std::int64_t j);

// floor((n+1)p) + 1, the first index with p_{j-1} > p_j.
std::int64_t j_star(const BinomialSpec& spec);

// ln(j q / ((n - j + 1) p)) = ln(p_{j-1}/p_j), exact for the binomial pmf.
double log_pmf_ratio(const BinomialSpec& spec, std::int64_t j);

struct TailTable {
  BinomialSpec spec;
  std::vector<LogValue> log_pmf;   // index 0..n
  std::vector<LogValue> log_tail;  // index 0..n+1, log_tail[j] = ln P(B >= j)
  std::int64_t j_star = 1;

  std::int64_t n() const { return spec.n(); }
  // ln q_j for any integer j: 0 below the support, -inf above it.
  LogValue tail(std::int64_t j) const;
  LogValue pmf(std::int64_t j) const;
};

TailTable build_tail_table(const BinomialSpec& spec);

// P(Z >= x) for standard normal Z.
double normal_tail(double x);

}  // namespace supertail
