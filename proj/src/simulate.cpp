#include "supertail/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace supertail {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Standard Laplace conditioned on W <= 1.
struct TruncatedLaplace {
  static double cdf(double w) { return w < 0.0 ? 0.5 * std::exp(w) : 1.0 - 0.5 * std::exp(-w); }
  static double mass() { return cdf(1.0); }
  static double mean() { return -std::exp(-1.0) / mass(); }
  static double second_moment() { return (2.0 - 2.5 * std::exp(-1.0)) / mass(); }
  static double variance() { return second_moment() - mean() * mean(); }
  static double quantile(double u) { return u < 0.5 ? std::log(2.0 * u) : -std::log(2.0 * (1.0 - u)); }
  static double sample(SplitMix64& rng) { return quantile(rng.uniform() * mass()); }
  static double survival(double w) {
    if (w > 1.0) return 0.0;
    return std::clamp((mass() - cdf(w)) / mass(), 0.0, 1.0);
  }
};

}  // namespace

std::string_view to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::two_point_extremal: return "two_point_extremal";
    case FamilyKind::truncated_shifted: return "truncated_shifted";
    case FamilyKind::bounded_uniform: return "bounded_uniform";
  }
  return "unknown";
}

FamilyKind parse_family(std::string_view name) {
  for (auto kind : {FamilyKind::two_point_extremal, FamilyKind::truncated_shifted, FamilyKind::bounded_uniform})
    if (name == to_string(kind)) return kind;
  throw std::invalid_argument("unknown increment family: " + std::string(name));
}

SplitMix64::SplitMix64(std::uint64_t seed, std::uint64_t stream) : state_(mix64(seed ^ mix64(stream + kGolden))) {}

std::uint64_t SplitMix64::next() { return mix64(state_ += kGolden); }

double SplitMix64::uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

StepLaw::StepLaw(const IncrementFamily& family, double d, double sigma) : kind_(family.kind), d_(d), sigma_(sigma) {
  if (!(d > 0.0) || !(sigma > 0.0)) throw std::domain_error("increment family: d and sigma must be positive");
  if (!(family.drift >= 0.0) || !std::isfinite(family.drift))
    throw std::domain_error("increment family: drift must be finite and >= 0");
  switch (kind_) {
    case FamilyKind::two_point_extremal:
      break;
    case FamilyKind::bounded_uniform:
      scale_ = std::min(d, std::sqrt(3.0) * sigma);
      break;
    case FamilyKind::truncated_shifted: {
      scale_ = std::min(d, sigma / std::sqrt(TruncatedLaplace::variance()));
      shift_ = family.drift * sigma;
      if (family.martingale_mode) {
        const double m = scale_ * TruncatedLaplace::mean() - shift_;
        gamma_ = m / (m - d);
      }
      break;
    }
  }
}

double StepLaw::raw_to_increment(double raw) const { return (1.0 - gamma_) * (scale_ * raw - shift_) + gamma_ * d_; }

double StepLaw::sample(SplitMix64& rng) const {
  switch (kind_) {
    case FamilyKind::two_point_extremal: {
      const double s2 = sigma_ * sigma_;
      return rng.uniform() < s2 / (d_ * d_ + s2) ? d_ : -s2 / d_;
    }
    case FamilyKind::bounded_uniform:
      return scale_ * (2.0 * rng.uniform() - 1.0);
    case FamilyKind::truncated_shifted:
      return raw_to_increment(TruncatedLaplace::sample(rng));
  }
  return 0.0;
}

double StepLaw::mean() const {
  if (kind_ != FamilyKind::truncated_shifted) return 0.0;
  return raw_to_increment(TruncatedLaplace::mean());
}

double StepLaw::variance() const {
  switch (kind_) {
    case FamilyKind::two_point_extremal: return sigma_ * sigma_;
    case FamilyKind::bounded_uniform: return scale_ * scale_ / 3.0;
    case FamilyKind::truncated_shifted:
      return std::pow((1.0 - gamma_) * scale_, 2) * TruncatedLaplace::variance();
  }
  return 0.0;
}

double StepLaw::upper() const {
  switch (kind_) {
    case FamilyKind::two_point_extremal: return d_;
    case FamilyKind::bounded_uniform: return scale_;
    case FamilyKind::truncated_shifted: return raw_to_increment(1.0);
  }
  return d_;
}

double StepLaw::exceedance(double level) const {
  switch (kind_) {
    case FamilyKind::two_point_extremal: {
      const double s2 = sigma_ * sigma_;
      if (level > d_) return 0.0;
      if (level <= -s2 / d_) return 1.0;
      return s2 / (d_ * d_ + s2);
    }
    case FamilyKind::bounded_uniform:
      return std::clamp((scale_ - level) / (2.0 * scale_), 0.0, 1.0);
    case FamilyKind::truncated_shifted: {
      // increment is increasing and affine in W
      const double w = ((level - gamma_ * d_) / (1.0 - gamma_) + shift_) / scale_;
      return TruncatedLaplace::survival(w);
    }
  }
  return 0.0;
}

double tilt_to_martingale(double x, double cond_mean, double d) {
  if (!(d > 0.0)) throw std::domain_error("tilt: d must be positive");
  if (x > d) throw std::domain_error("tilt: increment exceeds d");
  if (cond_mean > 0.0) throw std::domain_error("tilt: conditional mean must be <= 0");
  const double gamma = cond_mean / (cond_mean - d);
  return (1.0 - gamma) * x + gamma * d;
}

namespace {

std::vector<StepLaw> step_laws(const SupermartingaleSpec& spec, const IncrementFamily& family) {
  std::vector<StepLaw> laws;
  laws.reserve(spec.sigmas().size());
  for (double s : spec.sigmas()) laws.emplace_back(family, spec.d(), s);
  return laws;
}

PathOutcome run_path(std::span<const StepLaw> laws, std::uint64_t seed, std::uint64_t index) {
  SplitMix64 rng(seed, index);
  PathOutcome out;
  double s = 0.0;
  for (const auto& law : laws) {
    s += law.sample(rng);
    out.maximum = std::max(out.maximum, s);
  }
  out.terminal = s;
  return out;
}

}  // namespace

PathOutcome sample_path(const SupermartingaleSpec& spec, const IncrementFamily& family, std::uint64_t seed,
                        std::uint64_t path_index) {
  const auto laws = step_laws(spec, family);
  return run_path(laws, seed, path_index);
}

double McEstimate::standard_error() const {
  if (trials <= 0) return 0.0;
  return std::sqrt(point * (1.0 - point) / static_cast<double>(trials));
}

McEstimate wilson_estimate(std::int64_t successes, std::int64_t trials, double z) {
  if (trials < 1) throw std::domain_error("estimate: trials must be >= 1");
  McEstimate e;
  e.successes = successes;
  e.trials = trials;
  const double nt = static_cast<double>(trials);
  const double ph = static_cast<double>(successes) / nt;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nt;
  const double center = (ph + z2 / (2.0 * nt)) / denom;
  const double half = z * std::sqrt(ph * (1.0 - ph) / nt + z2 / (4.0 * nt * nt)) / denom;
  e.point = ph;
  e.ci_low = std::clamp(center - half, 0.0, ph);
  e.ci_high = std::clamp(center + half, ph, 1.0);
  return e;
}

TailEstimates estimate_tails(const SupermartingaleSpec& spec, const IncrementFamily& family,
                             std::span<const double> thresholds, std::int64_t trials, std::uint64_t seed,
                             unsigned threads) {
  if (trials < 1) throw std::domain_error("estimate: trials must be >= 1");
  const auto laws = step_laws(spec, family);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::int64_t>(threads, trials));

  const std::size_t m = thresholds.size();
  std::vector<std::vector<std::int64_t>> terminal_hits(threads, std::vector<std::int64_t>(m, 0));
  std::vector<std::vector<std::int64_t>> maximum_hits(threads, std::vector<std::int64_t>(m, 0));

  auto work = [&](unsigned w) {
    const std::int64_t begin = trials * w / threads;
    const std::int64_t end = trials * (w + 1) / threads;
    auto& th = terminal_hits[w];
    auto& mh = maximum_hits[w];
    for (std::int64_t i = begin; i < end; ++i) {
      const PathOutcome path = run_path(laws, seed, static_cast<std::uint64_t>(i));
      for (std::size_t k = 0; k < m; ++k) {
        th[k] += path.terminal >= thresholds[k];
        mh[k] += path.maximum >= thresholds[k];
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }

  TailEstimates out;
  out.thresholds.assign(thresholds.begin(), thresholds.end());
  for (std::size_t k = 0; k < m; ++k) {
    std::int64_t t = 0, mx = 0;
    for (unsigned w = 0; w < threads; ++w) {
      t += terminal_hits[w][k];
      mx += maximum_hits[w][k];
    }
    out.terminal.push_back(wilson_estimate(t, trials));
    out.maximum.push_back(wilson_estimate(mx, trials));
    out.terminal.back().seed = seed;
    out.maximum.back().seed = seed;
  }
  return out;
}

McEstimate estimate_tail(const SupermartingaleSpec& spec, const IncrementFamily& family, double y,
                         std::int64_t trials, std::uint64_t seed, bool use_max, unsigned threads) {
  const double ys[] = {y};
  auto all = estimate_tails(spec, family, ys, trials, seed, threads);
  return use_max ? all.maximum.front() : all.terminal.front();
}

double exceedance_sum(const SupermartingaleSpec& spec, const IncrementFamily& family, double level) {
  double acc = 0.0;
  for (const auto& law : step_laws(spec, family)) acc += law.exceedance(level);
  return acc;
}

MomentComparison moment_comparison_exact(double d, std::span<const double> sigmas, double t) {
  const std::size_t n = sigmas.size();
  if (n == 0 || n > 20) throw std::domain_error("moment comparison: need 1 <= n <= 20");
  if (!(d > 0.0)) throw std::domain_error("moment comparison: d must be positive");
  auto f = [t](double s) {
    const double e = std::max(0.0, s - t);
    return e * e;
  };

  MomentComparison out;
  double sigma2 = 0.0;
  for (double s : sigmas) {
    if (!(s > 0.0)) throw std::domain_error("moment comparison: sigma_i must be positive");
    sigma2 += s * s;
  }
  sigma2 /= static_cast<double>(n);

  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double prob = 1.0, sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s2 = sigmas[i] * sigmas[i];
      const double up = s2 / (d * d + s2);
      if (mask >> i & 1U) {
        prob *= up;
        sum += d;
      } else {
        prob *= 1.0 - up;
        sum -= s2 / d;
      }
    }
    out.heterogeneous += prob * f(sum);
  }

  const double p = sigma2 / (d * d + sigma2);
  const double low = sigma2 / d;
  for (std::size_t k = 0; k <= n; ++k) {
    const double weight =
        std::exp(log_factorial(static_cast<std::int64_t>(n)) - log_factorial(static_cast<std::int64_t>(k)) -
                 log_factorial(static_cast<std::int64_t>(n - k)) + static_cast<double>(k) * std::log(p) +
                 static_cast<double>(n - k) * std::log1p(-p));
    out.binomial += weight * f(static_cast<double>(k) * d - static_cast<double>(n - k) * low);
  }
  return out;
}

}  // namespace supertail
