#pragma once

// Interpolants of the binomial tail q_j = P(B >= j) and the explicit least
// log-concave majorant of its linear interpolation.
//
// All functions of x below work on the binomial lattice coordinate. The
// majorant is evaluated in its shifted form
//
//     Q(x) = Q^{Lin,LC}(x + 1/2),
//
// which is what the tail bound consumes. Q coincides with Q^Lin(x + 1/2)
// except on the open intervals (y_j, x_j), j in [j_star, n], where it is the
// geometric interpolation between the values of Q^Lin(. + 1/2) at the two
// knot endpoints. Q vanishes exactly for x >= n + 1/2.

#include <cstdint>
#include <optional>
#include <vector>

#include "supertail/binomial.hpp"

namespace supertail {

struct Knot {
  std::int64_t j = 0;
  double y = 0.0;  // left endpoint y_j
  double x = 0.0;  // right endpoint x_j
  // ln Q^Lin(y_j + 1/2) and ln Q^Lin(x_j + 1/2), cached at construction.
  LogValue lin_at_y;
  LogValue lin_at_x;
};

// Knots for j in [j_star, n + 1]; the last one is (n + 1/2, n + 3/2).
struct KnotLattice {
  std::int64_t n = 0;
  std::int64_t j_star = 1;
  std::vector<Knot> knots;

  // Knot with index j, or nullopt if j is outside [j_star, n + 1].
  const Knot* find(std::int64_t j) const;
};

// ln Q^Lin(x): linear interpolation of q over the integers.
LogValue q_lin(const TailTable& table, double x);

// ln Q^LC(x): geometric interpolation of q over the integers (0^0 := 1).
LogValue q_lc(const TailTable& table, double x);

// Throws std::domain_error if a required pmf value is zero.
KnotLattice build_knot_lattice(const TailTable& table);

// Geometric interpolation on [y_j, x_j]. Throws std::domain_error for x
// outside the knot interval.
LogValue q_interp(const TailTable& table, const Knot& knot, double x);

// ln Q(x) = ln Q^{Lin,LC}(x + 1/2).
LogValue q_linlc_shifted(const TailTable& table, const KnotLattice& lattice, double x);

// Owns a tail table and its knot lattice so queries cannot outlive them.
class LinLcMajorant {
 public:
  explicit LinLcMajorant(const BinomialSpec& spec);

  const TailTable& table() const { return table_; }
  const KnotLattice& lattice() const { return lattice_; }
  std::int64_t n() const { return table_.n(); }

  LogValue shifted(double x) const { return q_linlc_shifted(table_, lattice_, x); }
  LogValue lin(double x) const { return q_lin(table_, x); }
  LogValue lc(double x) const { return q_lc(table_, x); }

 private:
  TailTable table_;
  KnotLattice lattice_;
};

}  // namespace supertail
