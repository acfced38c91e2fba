#pragma once

// Monte Carlo ground truth for the tail bounds.
//
// Paths are sums of n independent increments X_i <= d with Var X_i <= sigma_i^2
// and E X_i <= 0. Each path draws from its own SplitMix64 stream keyed by
// (seed, path index), so estimates do not depend on how paths are split
// across worker threads.
//
// Increment families:
//   two_point_extremal  d w.p. sigma^2/(d^2+sigma^2), else -sigma^2/d
//   bounded_uniform     uniform on [-a, a], a = min(d, sqrt(3) sigma)
//   truncated_shifted   s W - drift * sigma with W standard Laplace
//                       conditioned on W <= 1 and s = min(d, sigma / sd(W)),
//                       so the mean is strictly negative; in martingale mode
//                       the increment is tilted towards d to mean zero.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "supertail/bounds.hpp"

namespace supertail {

enum class FamilyKind { two_point_extremal, truncated_shifted, bounded_uniform };

std::string_view to_string(FamilyKind kind);
// Throws std::invalid_argument for an unknown name.
FamilyKind parse_family(std::string_view name);

struct IncrementFamily {
  FamilyKind kind = FamilyKind::two_point_extremal;
  double drift = 0.1;             // truncated_shifted only, in units of sigma_i, >= 0
  bool martingale_mode = false;   // apply the zero-mean tilt after drawing
};

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}
  SplitMix64(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next();
  // Uniform on the open interval (0, 1).
  double uniform();

 private:
  std::uint64_t state_;
};

// Law of one increment given (family, d, sigma_i).
class StepLaw {
 public:
  // Throws std::domain_error for d <= 0, sigma <= 0 or a negative drift.
  StepLaw(const IncrementFamily& family, double d, double sigma);

  double sample(SplitMix64& rng) const;
  double mean() const;
  double variance() const;
  double upper() const;  // sup of the support, <= d
  // P(X >= level)
  double exceedance(double level) const;

 private:
  double raw_to_increment(double raw) const;

  FamilyKind kind_;
  double d_;
  double sigma_;
  double scale_ = 1.0;   // truncated_shifted: multiplier of W; uniform: half-width
  double shift_ = 0.0;   // truncated_shifted: subtracted drift
  double gamma_ = 0.0;   // tilt weight, 0 unless martingale mode
};

// gamma = m / (m - d); returns (1 - gamma) x + gamma d. Throws
// std::domain_error if x > d, cond_mean > 0 or d <= 0.
double tilt_to_martingale(double x, double cond_mean, double d);

struct PathOutcome {
  double terminal = 0.0;  // S_n
  double maximum = 0.0;   // M_n = max_{0<=k<=n} S_k, with S_0 = 0
};

PathOutcome sample_path(const SupermartingaleSpec& spec, const IncrementFamily& family, std::uint64_t seed,
                        std::uint64_t path_index = 0);

struct McEstimate {
  double point = 0.0;
  double ci_low = 0.0;   // Wilson score interval
  double ci_high = 0.0;
  std::int64_t successes = 0;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;

  double standard_error() const;
};

// Wilson score interval for successes/trials at normal quantile z.
McEstimate wilson_estimate(std::int64_t successes, std::int64_t trials, double z = 1.959963984540054);

struct TailEstimates {
  std::vector<double> thresholds;
  std::vector<McEstimate> terminal;  // P(S_n >= y)
  std::vector<McEstimate> maximum;   // P(M_n >= y)
};

// One pass of `trials` paths shared by all thresholds. threads == 0 means
// hardware concurrency.
TailEstimates estimate_tails(const SupermartingaleSpec& spec, const IncrementFamily& family,
                             std::span<const double> thresholds, std::int64_t trials, std::uint64_t seed,
                             unsigned threads = 1);

McEstimate estimate_tail(const SupermartingaleSpec& spec, const IncrementFamily& family, double y,
                         std::int64_t trials, std::uint64_t seed, bool use_max, unsigned threads = 1);

// Sum over steps of P(X_i >= level) for the family's increments.
double exceedance_sum(const SupermartingaleSpec& spec, const IncrementFamily& family, double level);

struct MomentComparison {
  double heterogeneous = 0.0;  // E (S_n - t)_+^2, S_n a sum of two-point steps with sigma_i
  double binomial = 0.0;       // E (T_n - t)_+^2, T_n i.i.d. two-point steps with mean sigma^2
};

// Exact enumeration over all 2^n outcomes; n <= 20.
MomentComparison moment_comparison_exact(double d, std::span<const double> sigmas, double t);

}  // namespace supertail
