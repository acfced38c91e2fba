#pragma once

// Tail bounds for supermartingales whose differences are bounded from above.
//
// A problem (n, d, sigma_1..sigma_n) is mapped onto the binomial lattice via
//
//     sigma^2 = mean(sigma_i^2),  p = sigma^2 / (d^2 + sigma^2),  x = (q/d) y + n p,
//
// and the bounds are evaluated on Bin(n, p):
//
//     new bound          min(1, c_2 Q^{Lin,LC}(x + 1/2))
//     old bound          min(1, c_2 Q^{LC}(x))
//     truncation bound   min(1, sum_i P(X_i >= d) + c_2 Q^{Lin,LC}(x + 1/2))
//     Rademacher bound   min(1, c_3 Q^{Lin,LC}(x + 1/2)) on Bin(n, 1/2)
//     Gaussian bound     min(1, c_3 P(Z >= y/b))
//
// The new, old and truncation bounds also hold with the running maximum of
// the path in place of its terminal value.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "supertail/binomial.hpp"
#include "supertail/majorant.hpp"

namespace supertail {

class SupermartingaleSpec {
 public:
  // Throws std::domain_error unless d > 0, sigmas.size() == n and all sigma_i > 0.
  SupermartingaleSpec(std::int64_t n, double d, std::vector<double> sigmas);
  // Homogeneous sigma_i == sigma.
  SupermartingaleSpec(std::int64_t n, double d, double sigma);
  // Unit d with sigma^2 = p/q, so the problem is Bin(n, p) in lattice units.
  static SupermartingaleSpec canonical(std::int64_t n, Probability p);

  std::int64_t n() const { return n_; }
  double d() const { return d_; }
  const std::vector<double>& sigmas() const { return sigmas_; }
  double sigma2() const { return sigma2_; }
  double h() const { return d_ + sigma2_ / d_; }
  double p() const { return binomial_.p(); }
  double q() const { return binomial_.q(); }
  const BinomialSpec& binomial() const { return binomial_; }

 private:
  SupermartingaleSpec(std::int64_t n, double d, std::vector<double> sigmas, std::optional<Probability> p);

  std::int64_t n_;
  double d_;
  std::vector<double> sigmas_;
  double sigma2_;
  BinomialSpec binomial_;
};

class RademacherSpec {
 public:
  RademacherSpec(std::vector<double> d_list, std::vector<double> sigma_list);

  std::int64_t n() const { return static_cast<std::int64_t>(d_list_.size()); }
  const std::vector<double>& d_list() const { return d_list_; }
  const std::vector<double>& sigma_list() const { return sigma_list_; }
  double b() const { return b_; }

 private:
  std::vector<double> d_list_;
  std::vector<double> sigma_list_;
  double b_;
};

// Gamma(alpha + 1) (e/alpha)^alpha. Throws std::domain_error for alpha <= 0.
double c_alpha(double alpha);
double c2();
double c3();

// x = (q/d) y + n p, and its inverse.
double rescale(const SupermartingaleSpec& spec, double y);
double unrescale(const SupermartingaleSpec& spec, double x);

struct Bound {
  LogValue unclipped;  // ln of c * (majorant value), before min(1, .)
  double value() const;   // min(1, exp(unclipped))
  bool clipped() const { return unclipped.log() > 0.0; }
  double log10() const;   // log10 of value()
};

// Cached table and lattice for one problem; the free functions below build
// one on every call.
class BoundEvaluator {
 public:
  explicit BoundEvaluator(SupermartingaleSpec spec);

  const SupermartingaleSpec& spec() const { return spec_; }
  const LinLcMajorant& majorant() const { return majorant_; }

  Bound new_bound_at_x(double x) const;
  Bound old_bound_at_x(double x) const;
  Bound new_bound(double y) const { return new_bound_at_x(rescale(spec_, y)); }
  Bound old_bound(double y) const { return old_bound_at_x(rescale(spec_, y)); }

  // Exceedance probabilities P(X_i >= d), each in [0, 1].
  double truncation_bound(double y, std::span<const double> exceedance) const;
  // Precomputed sum of the exceedance probabilities, in [0, n].
  double truncation_bound_from_sum(double y, double exceedance_sum) const;

 private:
  SupermartingaleSpec spec_;
  LinLcMajorant majorant_;
};

double theorem23_bound(const SupermartingaleSpec& spec, double y);
double old_bound(const SupermartingaleSpec& spec, double y);
double truncation_bound(const SupermartingaleSpec& spec, double y, std::span<const double> exceedance);
double truncation_bound_from_sum(const SupermartingaleSpec& spec, double y, double exceedance_sum);

// Lattice coordinate x = y sqrt(n) / (2b) + n/2 for the symmetric binomial.
double rademacher_coordinate(const RademacherSpec& spec, double y);
Bound rademacher_bound_detail(const RademacherSpec& spec, double y);
double rademacher_bound(const RademacherSpec& spec, double y);

// min(1, c_3 P(Z >= y/b)). Throws std::domain_error for b <= 0.
double gaussian_bound(double b, double y);

// exp(-x^2/2) for x >= 0, 1 otherwise.
double hoeffding_baseline(double x);

// Root of c_3 P(Z >= x) = exp(-x^2/2) on (0, 3).
double gaussian_hoeffding_crossover();

struct BoundReport {
  double y = 0.0;
  double x = 0.0;
  double new_bound = 1.0;
  double old_bound = 1.0;
  double gaussian_bound = 1.0;
  double hoeffding_baseline = 1.0;
  double log10_new_bound = 0.0;
  double log10_old_bound = 0.0;
  double log10_gaussian_bound = 0.0;
  double log10_hoeffding_baseline = 0.0;
  // new/old before clipping; empty where the old bound vanishes (x > n).
  std::optional<double> ratio;
  bool clipped_new = false;
  bool clipped_old = false;
  // Linear value underflowed to 0 while the log is finite.
  bool underflow_new = false;
  bool underflow_old = false;
};

BoundReport bound_report(const BoundEvaluator& evaluator, double y);
BoundReport bound_report_at_x(const BoundEvaluator& evaluator, double x);
BoundReport bound_report(const SupermartingaleSpec& spec, double y);

}  // namespace supertail
