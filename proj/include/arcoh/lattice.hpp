#pragma once

// Metrized O_F-lattices realized as full-rank Z-lattices in Minkowski space.
//
// A lattice of O_F-rank n lives in R^N, N = n * [F:Q].  Basis rows are the
// realized Z-basis; the counting form is their Gram matrix, so the Gaussian
// weight of a lattice point is exp(-pi * x^T Q x).  Every lattice also carries
// the ambient action of the non-trivial integral basis element w, and duals,
// twists and quotients transport it.

#include "arcoh/field.hpp"
#include "arcoh/integer_matrix.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>

namespace arcoh {

class MetrizedLattice {
 public:
  /// Validating constructor: checks full rank, conditioning (<= 1e12) and,
  /// over quadratic fields, stability of the lattice under the w-action.
  static MetrizedLattice create(NumberField field, int of_rank, Eigen::MatrixXd basis,
                                Eigen::MatrixXd ambient_action, std::string label = {});

  const NumberField& field() const { return field_; }
  int of_rank() const { return of_rank_; }
  int z_rank() const { return static_cast<int>(basis_.rows()); }
  const Eigen::MatrixXd& basis() const { return basis_; }
  const Eigen::MatrixXd& counting_form() const { return gram_; }
  const Eigen::MatrixXd& ambient_action() const { return action_; }
  /// w-action in lattice coordinates: coords(w x) = coords(x) * of_action().
  const IntMatrix& of_action() const { return of_action_; }
  const std::string& label() const { return label_; }

  double log_covolume() const { return log_covolume_; }
  double covolume() const;
  /// chi = -log covolume
  double chi() const { return -log_covolume_; }
  /// deg = chi + (n/2) log |disc|
  double degree() const;

  MetrizedLattice with_label(std::string label) const;

 private:
  MetrizedLattice() = default;

  NumberField field_ = NumberField::rationals();
  int of_rank_ = 1;
  Eigen::MatrixXd basis_;
  Eigen::MatrixXd gram_;
  Eigen::MatrixXd action_;
  IntMatrix of_action_;
  double log_covolume_ = 0.0;
  std::string label_;
};

struct SublatticeHandle {
  MetrizedLattice parent;
  IntMatrix generators;  // saturated basis, row Hermite form, parent coordinates
  int saturated_rank = 0;
  double degree = 0.0;
  double slope = 0.0;

  /// O_F-rank, i.e. Z-rank / [F:Q] of the parent field.
  double base_rank() const;
};

MetrizedLattice standard_lattice(const NumberField& field, int n);
MetrizedLattice from_basis(const NumberField& field, int n, const Eigen::MatrixXd& basis);

double degree(const MetrizedLattice& lattice);
double chi(const MetrizedLattice& lattice);

/// Dual basis under the Euclidean pairing of the calibrated coordinates.
MetrizedLattice dual_lattice(const MetrizedLattice& lattice);
/// Hom_{O_F}(L, O_F): the dual twisted back by the different.
MetrizedLattice of_dual(const MetrizedLattice& lattice);
/// omega_F (x) L^dual, the lattice whose h0 is h1(L).
MetrizedLattice omega_twist(const MetrizedLattice& lattice);
/// Multiplication by a field element given in integral-basis coordinates.
MetrizedLattice multiply_by_element(const MetrizedLattice& lattice, std::span<const Rational> element);

MetrizedLattice scale(const MetrizedLattice& lattice, double c);
MetrizedLattice direct_sum(const MetrizedLattice& a, const MetrizedLattice& b);
MetrizedLattice restrict_scalars(const MetrizedLattice& lattice);

SublatticeHandle saturate_sublattice(const MetrizedLattice& lattice, const IntMatrix& generators);
/// Quotient by a saturated sublattice with the orthogonal-projection metric.
MetrizedLattice quotient_lattice(const SublatticeHandle& sub);

/// Reproducible random O_F-lattice: per-place transforms D*U of O_F^n with
/// log-normal diagonal and uniform unipotent part (both of size `spread`),
/// then a global rescale to the requested degree.
MetrizedLattice random_lattice(const NumberField& field, int n, double degree_target, double spread,
                               std::uint64_t seed);

/// Integer lattice over Q from an integer basis (used by the HN corpus).
MetrizedLattice integer_lattice(const IntMatrix& basis);

}  // namespace arcoh
