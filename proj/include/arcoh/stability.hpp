#pragma once

// Slopes, maximal destabilizing sublattices and Harder-Narasimhan polygons.

#include "arcoh/lattice.hpp"
#include "arcoh/theta.hpp"

#include <utility>
#include <vector>

namespace arcoh {

struct HNPolygon {
  std::vector<std::pair<int, double>> vertices;  // (rank, cumulative degree), from (0, 0)
  std::vector<double> slopes;
  FieldSpec base_field;

  int rank() const { return vertices.back().first; }
  double degree() const { return vertices.back().second; }
  /// Piecewise-linear height at rank x in [0, rank()].
  double height_at(double x) const;
};

struct StabilityOptions {
  double margin = 1.0;  // multiplier on the destabilizer search radius, >= 1
  int max_z_rank = 4;   // largest Z-rank handled
  long long cap = kDefaultEnumerationCap;
};

inline constexpr double kSlopeTieTolerance = 1e-9;

double slope(const MetrizedLattice& lattice);
double slope(const SublatticeHandle& handle);

/// Upper bound for the Hermite constant gamma_k (exact for k <= 8).
double hermite_constant(int k);

/// Maximal-slope saturated O_F-sublattice; among maximizers the one of highest
/// rank, then the lexicographically smallest Hermite form.
SublatticeHandle max_slope_sublattice(const MetrizedLattice& lattice, const StabilityOptions& options = {});

bool is_semistable(const MetrizedLattice& lattice, double tol = kSlopeTieTolerance,
                   const StabilityOptions& options = {});

HNPolygon hn_filtration(const MetrizedLattice& lattice, const StabilityOptions& options = {});

/// HN polygon of the lattice viewed as a Z-lattice.
HNPolygon canonical_polygon_over_Q(const MetrizedLattice& lattice, const StabilityOptions& options = {});

/// True iff p lies on or below g at every integer rank.
bool polygon_leq(const HNPolygon& p, const HNPolygon& g);

}  // namespace arcoh
