#pragma once

// Effective vanishing bounds, decay of h1 under positive twists, and sampled
// extremal values of h0 on moduli of semistable lattices.

#include "arcoh/lattice.hpp"
#include "arcoh/parallel.hpp"
#include "arcoh/stability.hpp"
#include "arcoh/theta.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace arcoh {

struct VanishingOptions {
  bool assume_semistable = false;
  StabilityOptions stability;
};

/// 3^{nd} / (1 - log 3 / pi)
double vanishing_constant(int of_rank, int field_degree);

/// Degree thresholds of the two bounds.
double h0_bound_threshold(const MetrizedLattice& lattice);
double h1_bound_threshold(const MetrizedLattice& lattice);

/// Upper bound on h0 for semistable lattices of very negative degree;
/// nullopt when the degree hypothesis fails.  Unstable input raises
/// hypothesis_violated unless assume_semistable is set.
std::optional<double> effective_h0_bound(const MetrizedLattice& lattice, const VanishingOptions& options = {});
/// Upper bound on h1 for semistable lattices of large degree.
std::optional<double> effective_h1_bound(const MetrizedLattice& lattice, const VanishingOptions& options = {});

struct DecayStep {
  int m = 0;
  double degree = 0.0;
  double h1 = 0.0;
  double error = 0.0;
  std::optional<double> bound;
};

struct DecayProbe {
  double twist_degree = 0.0;
  std::vector<DecayStep> steps;
  /// First step from which h1 never increases (-1 if none).
  int monotone_from = -1;
  bool reached_tolerance = false;
  double final_h1 = 0.0;
};

/// h1 of the lattice scaled by exp(-m twist_degree / d), m = 0..m_max.
DecayProbe scaling_decay_probe(const MetrizedLattice& lattice, double twist_degree, int m_max, double tol,
                               const VanishingOptions& options = {});

struct ModuliSample {
  std::uint64_t index = 0;
  double degree = 0.0;
  bool semistable = false;
  std::optional<double> h0;
};

struct ExtremalOptions {
  double spread = 1.0;
  double tol = 1e-12;
  StabilityOptions stability;
};

struct ExtremalEstimate {
  NumberField field = NumberField::rationals();
  int of_rank = 1;
  double degree = 0.0;
  int sample_count = 0;
  double min_h0 = 0.0;
  double max_h0 = 0.0;
  double spread_h0 = 0.0;  // max - min
  std::vector<MetrizedLattice> accepted;
  std::vector<double> accepted_h0;
  std::vector<ModuliSample> attempts;
};

/// Rejection-samples semistable lattices of the given degree.  Per-sample
/// seeds are derived from (seed, index).
ExtremalEstimate extremal_values_estimate(const NumberField& field, int of_rank, double degree, int samples,
                                          std::uint64_t seed, const ExtremalOptions& options = {});

struct DualityResidual {
  double max_residual = 0.0;
  double min_residual = 0.0;
  /// Largest samplewise |h0(omega_twist(L)) - h0(L) + deg - (n/2) log|disc||.
  double worst_samplewise = 0.0;
};

DualityResidual extremal_duality_residual(const ExtremalEstimate& estimate, double tol = 1e-12);

}  // namespace arcoh
