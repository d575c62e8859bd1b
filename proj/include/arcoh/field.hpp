#pragma once

// Base number fields: the rationals and quadratic fields Q(sqrt D).
//
// An element is a rational coordinate vector in the integral basis
// {1} (rational field) or {1, w} with w = (1+sqrt D)/2 when D = 1 mod 4 and
// w = sqrt D otherwise.  The Minkowski realization lists real places first;
// a complex place contributes sqrt(2) * (Re, Im), which makes the squared
// Euclidean norm equal to sum_v N_v |x|_v^2 and covol(O_F) = sqrt(|disc|).

#include <boost/rational.hpp>

#include <Eigen/Dense>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace arcoh {

using Rational = boost::rational<long long>;
using RationalVector = std::vector<Rational>;
using RationalMatrix = std::vector<RationalVector>;

struct FieldSpec {
  enum class Kind { rational, quadratic };

  Kind kind = Kind::rational;
  long long D = 1;  // only meaningful for quadratic fields

  static FieldSpec rational() { return {}; }
  static FieldSpec quadratic(long long D) { return {Kind::quadratic, D}; }

  /// Accepts "Q", "Q(sqrt D)", "Q(sqrt(D))", "Q(i)".
  static FieldSpec parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const FieldSpec&, const FieldSpec&) = default;
};

class NumberField {
 public:
  /// Throws Error{invalid_field_spec} for D non-squarefree, 0 or 1.
  static NumberField make(const FieldSpec& spec);
  static NumberField rationals() { return make(FieldSpec::rational()); }
  static NumberField quadratic(long long D) { return make(FieldSpec::quadratic(D)); }

  const FieldSpec& spec() const { return spec_; }
  int degree() const { return degree_; }
  int real_places() const { return r1_; }
  int complex_places() const { return r2_; }
  long long abs_disc() const { return abs_disc_; }
  double log_disc() const { return log_disc_; }
  bool is_rational() const { return spec_.kind == FieldSpec::Kind::rational; }

  /// Rows are the Minkowski images of the integral basis.
  const Eigen::MatrixXd& integral_basis_embedding() const { return embedding_; }

  /// Rows express the trace-dual basis of the codifferent in integral-basis
  /// coordinates.
  const RationalMatrix& codifferent_coords() const { return codifferent_; }

  /// Exact trace form Tr(e_i e_j) on the integral basis.
  RationalMatrix trace_gram() const;

  RationalVector multiply(std::span<const Rational> a, std::span<const Rational> b) const;
  Rational trace(std::span<const Rational> a) const;

  /// Generator of the different ideal (principal for quadratic fields).
  RationalVector different_generator() const;
  RationalVector inverse(std::span<const Rational> a) const;

  Eigen::VectorXd minkowski_image(std::span<const Rational> element) const;

  /// Real d x d matrix M with image(x * a) = image(x) * M (row vectors).
  Eigen::MatrixXd multiplication_matrix(std::span<const Rational> a) const;

  /// Multiplication by the non-trivial integral basis element (identity over Q).
  Eigen::MatrixXd generator_action() const;

  friend bool operator==(const NumberField& a, const NumberField& b) { return a.spec_ == b.spec_; }

 private:
  FieldSpec spec_;
  int degree_ = 1;
  int r1_ = 1;
  int r2_ = 0;
  long long abs_disc_ = 1;
  double log_disc_ = 0.0;
  Rational w_trace_{0};  // Tr(w)
  Rational w_norm_{0};   // w^2 = Tr(w) w - N(w)
  Eigen::MatrixXd embedding_;
  RationalMatrix codifferent_;
};

/// Free-function form used by the CLI and tests.
inline NumberField make_field(const FieldSpec& spec) { return NumberField::make(spec); }
Eigen::VectorXd minkowski_image(const NumberField& field, std::span<const Rational> element);
RationalMatrix codifferent_lattice_data(const NumberField& field);

/// Exact inverse of a small nonsingular rational matrix (Gauss-Jordan).
RationalMatrix invert(const RationalMatrix& m);
Rational determinant(const RationalMatrix& m);

}  // namespace arcoh
