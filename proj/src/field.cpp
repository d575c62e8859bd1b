#include "arcoh/field.hpp"

#include "arcoh/error.hpp"

#include <cmath>
#include <regex>
#include <sstream>

namespace arcoh {

namespace {

bool is_squarefree(long long value) {
  unsigned long long m = value < 0 ? static_cast<unsigned long long>(-value) : value;
  for (unsigned long long p = 2; p * p <= m; ++p) {
    if (m % (p * p) == 0) return false;
    while (m % p == 0) m /= p;
  }
  return true;
}

void require_length(std::span<const Rational> a, int d) {
  if (static_cast<int>(a.size()) != d)
    throw Error(ErrorCode::dimension_mismatch,
                "element has " + std::to_string(a.size()) + " coordinates, field degree is " +
                    std::to_string(d));
}

}  // namespace

FieldSpec FieldSpec::parse(std::string_view text) {
  static const std::regex rational_re(R"(^\s*Q\s*$)");
  static const std::regex gauss_re(R"(^\s*Q\s*\(\s*i\s*\)\s*$)");
  static const std::regex quad_re(R"(^\s*Q\s*\(\s*sqrt\s*\(?\s*([+-]?\d+)\s*\)?\s*\)\s*$)");
  const std::string s(text);
  std::smatch m;
  if (std::regex_match(s, rational_re)) return rational();
  if (std::regex_match(s, gauss_re)) return quadratic(-1);
  if (std::regex_match(s, m, quad_re)) {
    try {
      return quadratic(std::stoll(m[1].str()));
    } catch (const std::out_of_range&) {
      throw Error(ErrorCode::invalid_field_spec, "discriminant out of range: " + s);
    }
  }
  throw Error(ErrorCode::invalid_field_spec, "cannot parse field spec '" + s + "'");
}

std::string FieldSpec::to_string() const {
  if (kind == Kind::rational) return "Q";
  std::ostringstream os;
  os << "Q(sqrt " << D << ")";
  return os.str();
}

NumberField NumberField::make(const FieldSpec& spec) {
  NumberField f;
  f.spec_ = spec;
  if (spec.kind == FieldSpec::Kind::rational) {
    f.embedding_ = Eigen::MatrixXd::Identity(1, 1);
    f.codifferent_ = {{Rational(1)}};
    return f;
  }

  const long long D = spec.D;
  if (D == 0 || D == 1 || !is_squarefree(D))
    throw Error(ErrorCode::invalid_field_spec,
                "Q(sqrt " + std::to_string(D) + ") requires D squarefree and D != 0, 1");
  if (D > (1LL << 40) || D < -(1LL << 40))
    throw Error(ErrorCode::invalid_field_spec, "|D| too large for exact 64-bit arithmetic");

  f.degree_ = 2;
  const bool one_mod_four = ((D % 4) + 4) % 4 == 1;
  if (one_mod_four) {
    f.w_trace_ = Rational(1);
    f.w_norm_ = Rational(1 - D, 4);
  } else {
    f.w_trace_ = Rational(0);
    f.w_norm_ = Rational(-D);
  }

  const RationalMatrix gram = f.trace_gram();
  const Rational disc = determinant(gram);
  f.abs_disc_ = std::abs(boost::rational_cast<long long>(disc));
  f.log_disc_ = std::log(static_cast<double>(f.abs_disc_));
  f.codifferent_ = invert(gram);

  const double root = std::sqrt(static_cast<double>(std::llabs(D)));
  const double shift = one_mod_four ? 0.5 : 0.0;
  const double half = one_mod_four ? 0.5 : 1.0;
  f.embedding_.resize(2, 2);
  if (D > 0) {
    f.r1_ = 2;
    f.r2_ = 0;
    f.embedding_ << 1.0, 1.0, shift + half * root, shift - half * root;
  } else {
    f.r1_ = 0;
    f.r2_ = 1;
    const double s2 = std::sqrt(2.0);
    f.embedding_ << s2, 0.0, s2 * shift, s2 * half * root;
  }
  return f;
}

RationalMatrix NumberField::trace_gram() const {
  RationalMatrix g(degree_, RationalVector(degree_));
  for (int i = 0; i < degree_; ++i) {
    for (int j = 0; j < degree_; ++j) {
      RationalVector ei(degree_, Rational(0)), ej(degree_, Rational(0));
      ei[i] = 1;
      ej[j] = 1;
      g[i][j] = trace(multiply(ei, ej));
    }
  }
  return g;
}

RationalVector NumberField::multiply(std::span<const Rational> a, std::span<const Rational> b) const {
  require_length(a, degree_);
  require_length(b, degree_);
  if (degree_ == 1) return {a[0] * b[0]};
  // (a0 + a1 w)(b0 + b1 w) with w^2 = Tr(w) w - N(w)
  const Rational hi = a[1] * b[1];
  return {a[0] * b[0] - hi * w_norm_, a[0] * b[1] + a[1] * b[0] + hi * w_trace_};
}

Rational NumberField::trace(std::span<const Rational> a) const {
  require_length(a, degree_);
  if (degree_ == 1) return a[0];
  return Rational(2) * a[0] + a[1] * w_trace_;
}

RationalVector NumberField::different_generator() const {
  if (degree_ == 1) return {Rational(1)};
  // sqrt D = 2w - 1 when D = 1 mod 4; the different is (sqrt D), else (2 sqrt D) = (2w).
  if (w_trace_ == Rational(1)) return {Rational(-1), Rational(2)};
  return {Rational(0), Rational(2)};
}

RationalVector NumberField::inverse(std::span<const Rational> a) const {
  require_length(a, degree_);
  if (degree_ == 1) {
    if (a[0] == Rational(0)) throw Error(ErrorCode::invalid_argument, "inverse of zero");
    return {Rational(1) / a[0]};
  }
  const Rational norm = a[0] * a[0] + a[0] * a[1] * w_trace_ + a[1] * a[1] * w_norm_;
  if (norm == Rational(0)) throw Error(ErrorCode::invalid_argument, "inverse of zero");
  return {(a[0] + a[1] * w_trace_) / norm, -a[1] / norm};
}

Eigen::VectorXd NumberField::minkowski_image(std::span<const Rational> element) const {
  require_length(element, degree_);
  Eigen::RowVectorXd x(degree_);
  for (int i = 0; i < degree_; ++i) x[i] = boost::rational_cast<double>(element[i]);
  return (x * embedding_).transpose();
}

Eigen::MatrixXd NumberField::multiplication_matrix(std::span<const Rational> a) const {
  require_length(a, degree_);
  if (degree_ == 1) return Eigen::MatrixXd::Constant(1, 1, boost::rational_cast<double>(a[0]));
  const Eigen::VectorXd img = minkowski_image(a);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  if (r1_ == 2) {
    m(0, 0) = img[0];
    m(1, 1) = img[1];
  } else {
    const double re = img[0] / std::sqrt(2.0);
    const double im = img[1] / std::sqrt(2.0);
    m << re, im, -im, re;
  }
  return m;
}

Eigen::MatrixXd NumberField::generator_action() const {
  if (degree_ == 1) return Eigen::MatrixXd::Identity(1, 1);
  const RationalVector w{Rational(0), Rational(1)};
  return multiplication_matrix(w);
}

Eigen::VectorXd minkowski_image(const NumberField& field, std::span<const Rational> element) {
  return field.minkowski_image(element);
}

RationalMatrix codifferent_lattice_data(const NumberField& field) { return field.codifferent_coords(); }

RationalMatrix invert(const RationalMatrix& m) {
  const std::size_t n = m.size();
  RationalMatrix a = m;
  RationalMatrix inv(n, RationalVector(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].size() != n) throw Error(ErrorCode::dimension_mismatch, "matrix is not square");
    inv[i][i] = 1;
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col] == Rational(0)) ++pivot;
    if (pivot == n) throw Error(ErrorCode::invalid_argument, "singular rational matrix");
    std::swap(a[pivot], a[col]);
    std::swap(inv[pivot], inv[col]);
    const Rational p = a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] /= p;
      inv[col][j] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == Rational(0)) continue;
      const Rational f = a[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

Rational determinant(const RationalMatrix& m) {
  const std::size_t n = m.size();
  RationalMatrix a = m;
  Rational det(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col] == Rational(0)) ++pivot;
    if (pivot == n) return Rational(0);
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      det = -det;
    }
    det *= a[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const Rational f = a[r][col] / a[col][col];
      for (std::size_t j = col; j < n; ++j) a[r][j] -= f * a[col][j];
    }
  }
  return det;
}

}  // namespace arcoh
