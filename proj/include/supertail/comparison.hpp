#pragma once

// When is the new bound no larger than the old one?
//
// The new bound is at most the old one for every x <= j**(n, p), where
//
//     j** = floor((n - u** q/p) / (1 + u** q/p)),   u** = u* / (1 - u*),
//
// and u* is the unique root in (0, 1) of
//
//     h(u) = ln((1 - u) / (-ln u)) - 1 - (1/2) (1 + u) ln u / (1 - u).
//
// If n <= (p/q) / u** the comparison holds for all x <= n.

#include <cstdint>

#include "supertail/binomial.hpp"
#include "supertail/majorant.hpp"

namespace supertail {

struct ComparisonConstants {
  double u_star = 0.0;
  double u_double_star = 0.0;
  double alpha_star = 0.0;      // minimiser of ln(1/2 - a) / (-a) on (0, 1/2)
  double r_alpha_star = 0.0;
  double exp_r_minus_one = 0.0;
};

// Throws std::domain_error for u outside (0, 1).
double h_function(double u);

// Cached after the first call.
double u_star();
double u_double_star();
double u_double_star_from(double u_star_value);

std::int64_t j_double_star(std::int64_t n, double p);
bool dominance_all_x(std::int64_t n, double p);

// Q^{Lin,LC}(x + 1/2) / Q^{LC}(x). Throws std::domain_error for x > n.
double ratio_r(const TailTable& table, const KnotLattice& lattice, double x);

struct Lemma36Constants {
  double alpha_star = 0.0;
  double r_alpha_star = 0.0;
  double exp_r_minus_one = 0.0;
};
Lemma36Constants lemma36_constants();

const ComparisonConstants& comparison_constants();

}  // namespace supertail
