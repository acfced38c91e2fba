#pragma once

// Brute-force references used to check the fast paths. None of these share
// code with the majorant construction: tails are summed in 50-digit
// arithmetic and majorants come from a generic upper concave hull.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "supertail/binomial.hpp"
#include "supertail/majorant.hpp"

namespace supertail::oracle {

using HighPrecision = boost::multiprecision::cpp_bin_float_50;

inline constexpr std::int64_t kMaxOracleN = 1000;

// P(B >= j) summed term by term in 50-digit arithmetic. Throws
// std::domain_error when n exceeds kMaxOracleN.
HighPrecision exact_tail(const BinomialSpec& spec, std::int64_t j);
// All tails q_0..q_{n+1} at once.
std::vector<HighPrecision> exact_tails(const BinomialSpec& spec);

struct HullPoint {
  double x = 0.0;
  double logv = 0.0;  // may be -inf
};

// Piecewise-affine concave function through its vertices. A trailing
// vertex with logv == -inf marks where the function drops to zero.
class HullFunction {
 public:
  explicit HullFunction(std::vector<HullPoint> vertices);

  const std::vector<HullPoint>& vertices() const { return vertices_; }
  // Throws std::domain_error left of the first vertex or right of the last.
  double operator()(double x) const;

 private:
  std::vector<HullPoint> vertices_;
};

// Upper concave hull of (x, logv) samples with x strictly increasing.
// Samples at -inf are left out of the chain; the first of them after the
// last finite sample is kept as a terminal vertex. Throws
// std::domain_error for unsorted input or fewer than two samples.
HullFunction concave_hull_majorant(std::span<const HullPoint> samples);

// Hull of (j, ln q_j), 0 <= j <= n + 1.
HullFunction lc_majorant_on_integers(const TailTable& table);

struct HullCheck {
  double max_log_discrepancy = 0.0;
  double worst_x = 0.0;
  std::size_t samples = 0;
  double max_tail_rel_error = 0.0;  // fast log tails vs exact tails
};

// Builds the hull of ln Q^Lin(x + 1/2) from exact tails on a grid of the
// given step over [-1, n + 1/2], with every knot endpoint and every extra
// query abscissa injected, and compares it with the majorant at all of
// those abscissae.
HullCheck check_majorant_against_hull(const TailTable& table, const KnotLattice& lattice, double grid_step,
                                      std::span<const double> extra_queries = {});

struct Atom {
  double value = 0.0;
  double prob = 0.0;
};

class DiscreteDistribution {
 public:
  // Atoms are sorted and merged; throws std::domain_error for negative
  // probabilities or a total differing from 1 by more than 1e-12.
  explicit DiscreteDistribution(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const { return atoms_; }
  double mean() const;
  double variance() const;
  double max_value() const { return atoms_.back().value; }
  // E (X - t)_+^2
  double excess_square(double t) const;

 private:
  std::vector<Atom> atoms_;
};

// Two-point law of d * X_a with a = sigma^2 / d^2: values -a d and d with
// probabilities 1/(1+a) and a/(1+a).
DiscreteDistribution extremal_two_point(double d, double sigma);

struct Lemma32Result {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// Compares E (X - t)_+^2 with E (d X_a - t)_+^2. Throws std::domain_error
// unless X <= d, |E X| <= 1e-12 and Var X <= sigma^2 + 1e-12.
Lemma32Result lemma32_check(const DiscreteDistribution& dist, double d, double sigma, double t);

}  // namespace supertail::oracle
