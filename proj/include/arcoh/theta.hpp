#pragma once

// Gaussian lattice sums sum_x exp(-pi Q(x)) with rigorous truncation bounds,
// and the numerical cohomology built from them.

#include "arcoh/lattice.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace arcoh {

inline constexpr long long kDefaultEnumerationCap = 100'000'000;

struct LllResult {
  Eigen::MatrixXd basis;  // reduced rows, = unimodular * input
  IntMatrix unimodular;
};

/// LLL reduction of the rows of `basis` with Lovasz parameter delta.
LllResult lll_reduce(const Eigen::MatrixXd& basis, double delta = 0.99);

struct ShortVector {
  IntRowVector coords;  // coordinates in the lattice's own basis
  double norm = 0.0;    // Q(x)
};

/// All nonzero x with Q(x) <= bound, one representative per +-pair (first
/// nonzero coordinate positive), sorted lexicographically by coordinates.
std::vector<ShortVector> short_vectors(const MetrizedLattice& lattice, double bound,
                                       long long cap = kDefaultEnumerationCap);

/// Predicted number of lattice points with Q(x) <= bound (Gaussian heuristic,
/// floored by the trivially present short reduced basis vectors).
double predicted_point_count(const MetrizedLattice& lattice, double bound);

struct ThetaValue {
  double value = 1.0;          // full sum including the zero vector
  double nonzero_mass = 0.0;   // value - 1, kept separately to survive rounding
  double radius = 0.0;         // enumeration cutoff on Q(x)
  long long enumerated = 1;    // lattice points with Q(x) <= radius
  double tail_bound = 0.0;     // certified bound on the omitted mass
  double rounding_bound = 0.0; // floating-point error estimate of the enumerated part
  double h0 = 0.0;             // log(value)
  double h0_error = 0.0;       // bound on |h0 - log(true value)|
  bool via_dual = false;       // evaluated through Poisson summation on the dual
};

/// Certified tail bound on sum_{Q(x) > radius} exp(-pi Q(x)).
double theta_tail_bound(const MetrizedLattice& lattice, double radius);

/// Smallest cutoff whose tail bound is <= target.
double theta_radius_for(const MetrizedLattice& lattice, double target);

/// Sum with a fixed cutoff.
ThetaValue theta_sum(const MetrizedLattice& lattice, double radius, long long cap = kDefaultEnumerationCap);

struct ThetaOptions {
  double tol = 1e-12;
  long long cap = kDefaultEnumerationCap;
  /// Evaluate value(L) as value(L^dual) / covol(L) when L is denser than its
  /// dual. The Riemann-Roch probe never uses this.
  bool allow_dual_route = false;
};

ThetaValue h0(const MetrizedLattice& lattice, const ThetaOptions& options);
ThetaValue h0(const MetrizedLattice& lattice, double tol);
/// h1(L) = h0(omega_twist(L)).
ThetaValue h1(const MetrizedLattice& lattice, const ThetaOptions& options);
ThetaValue h1(const MetrizedLattice& lattice, double tol);

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

/// h0 - h1 - deg + (n/2) log|disc|, which vanishes identically.
Estimate rr_residual(const MetrizedLattice& lattice, double tol);

/// exp(h0), the weighted count of global sections.
Estimate effectivity_count(const MetrizedLattice& lattice, double tol);

}  // namespace arcoh
