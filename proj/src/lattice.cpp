#include "arcoh/lattice.hpp"

#include "arcoh/error.hpp"

#include <cmath>
#include <complex>
#include <random>

namespace arcoh {

namespace {

constexpr double kMaxCondition = 1e12;

Eigen::MatrixXd block_diagonal(const Eigen::MatrixXd& block, int copies) {
  const Eigen::Index d = block.rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d * copies, d * copies);
  for (int j = 0; j < copies; ++j) out.block(j * d, j * d, d, d) = block;
  return out;
}

Eigen::MatrixXd standard_action(const NumberField& field, int n) {
  return block_diagonal(field.generator_action(), n);
}

// Element a + b w acting on the ambient space.
Eigen::MatrixXd element_action(const MetrizedLattice& lattice, std::span<const Rational> element) {
  const NumberField& f = lattice.field();
  if (static_cast<int>(element.size()) != f.degree())
    throw Error(ErrorCode::dimension_mismatch, "element length does not match field degree");
  const Eigen::Index N = lattice.z_rank();
  Eigen::MatrixXd m = boost::rational_cast<double>(element[0]) * Eigen::MatrixXd::Identity(N, N);
  if (f.degree() == 2) m += boost::rational_cast<double>(element[1]) * lattice.ambient_action();
  return m;
}

}  // namespace

MetrizedLattice MetrizedLattice::create(NumberField field, int of_rank, Eigen::MatrixXd basis,
                                        Eigen::MatrixXd ambient_action, std::string label) {
  if (of_rank < 1) throw Error(ErrorCode::invalid_rank, "O_F-rank must be >= 1");
  const Eigen::Index N = static_cast<Eigen::Index>(of_rank) * field.degree();
  if (basis.rows() != N || basis.cols() != N)
    throw Error(ErrorCode::dimension_mismatch,
                "basis must be " + std::to_string(N) + "x" + std::to_string(N));
  if (ambient_action.rows() != N || ambient_action.cols() != N)
    throw Error(ErrorCode::dimension_mismatch, "ambient action has wrong shape");
  if (!basis.allFinite()) throw Error(ErrorCode::degenerate_basis, "basis has non-finite entries");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis);
  const auto& sv = svd.singularValues();
  const double smax = sv(0), smin = sv(sv.size() - 1);
  if (!(smin > 0.0) || smax / smin > kMaxCondition)
    throw Error(ErrorCode::degenerate_basis, "basis is singular or ill-conditioned (cond > 1e12)");

  MetrizedLattice out;
  out.field_ = std::move(field);
  out.of_rank_ = of_rank;
  out.gram_ = basis * basis.transpose();
  out.gram_ = 0.5 * (out.gram_ + out.gram_.transpose()).eval();
  out.log_covolume_ = sv.array().log().sum();
  out.label_ = std::move(label);

  if (out.field_.degree() == 1) {
    out.of_action_ = IntMatrix::Identity(N, N);
  } else {
    const Eigen::MatrixXd a = basis * ambient_action * basis.inverse();
    const Eigen::MatrixXd rounded = a.array().round().matrix();
    const double dev = (a - rounded).cwiseAbs().maxCoeff();
    if (dev > 1e-6 * (1.0 + a.cwiseAbs().maxCoeff()))
      throw Error(ErrorCode::not_of_lattice, "basis does not span an O_F-stable lattice");
    out.of_action_ = rounded.cast<long long>();
  }
  out.basis_ = std::move(basis);
  out.action_ = std::move(ambient_action);
  return out;
}

double MetrizedLattice::covolume() const { return std::exp(log_covolume_); }

double MetrizedLattice::degree() const { return chi() + 0.5 * of_rank_ * field_.log_disc(); }

MetrizedLattice MetrizedLattice::with_label(std::string label) const {
  MetrizedLattice out = *this;
  out.label_ = std::move(label);
  return out;
}

double SublatticeHandle::base_rank() const {
  return static_cast<double>(saturated_rank) / parent.field().degree();
}

MetrizedLattice standard_lattice(const NumberField& field, int n) {
  if (n < 1) throw Error(ErrorCode::invalid_rank, "rank must be >= 1");
  return MetrizedLattice::create(field, n, block_diagonal(field.integral_basis_embedding(), n),
                                 standard_action(field, n));
}

MetrizedLattice from_basis(const NumberField& field, int n, const Eigen::MatrixXd& basis) {
  if (n < 1) throw Error(ErrorCode::invalid_rank, "rank must be >= 1");
  return MetrizedLattice::create(field, n, basis, standard_action(field, n));
}

double degree(const MetrizedLattice& lattice) { return lattice.degree(); }
double chi(const MetrizedLattice& lattice) { return lattice.chi(); }

MetrizedLattice dual_lattice(const MetrizedLattice& lattice) {
  Eigen::MatrixXd dual = lattice.basis().inverse().transpose();
  return MetrizedLattice::create(lattice.field(), lattice.of_rank(), std::move(dual), lattice.ambient_action());
}

MetrizedLattice multiply_by_element(const MetrizedLattice& lattice, std::span<const Rational> element) {
  return MetrizedLattice::create(lattice.field(), lattice.of_rank(),
                                 lattice.basis() * element_action(lattice, element), lattice.ambient_action());
}

MetrizedLattice of_dual(const MetrizedLattice& lattice) {
  const RationalVector delta = lattice.field().different_generator();
  return multiply_by_element(dual_lattice(lattice), delta);
}

MetrizedLattice omega_twist(const MetrizedLattice& lattice) {
  const NumberField& f = lattice.field();
  const RationalVector codiff = f.inverse(f.different_generator());
  return multiply_by_element(of_dual(lattice), codiff);
}

MetrizedLattice scale(const MetrizedLattice& lattice, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorCode::invalid_scale, "scale factor must be > 0");
  return MetrizedLattice::create(lattice.field(), lattice.of_rank(), lattice.basis() * c, lattice.ambient_action(),
                                 lattice.label());
}

MetrizedLattice direct_sum(const MetrizedLattice& a, const MetrizedLattice& b) {
  if (!(a.field() == b.field())) throw Error(ErrorCode::field_mismatch, "direct sum over different fields");
  const Eigen::Index na = a.z_rank(), nb = b.z_rank();
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(na + nb, na + nb);
  Eigen::MatrixXd action = Eigen::MatrixXd::Zero(na + nb, na + nb);
  basis.topLeftCorner(na, na) = a.basis();
  basis.bottomRightCorner(nb, nb) = b.basis();
  action.topLeftCorner(na, na) = a.ambient_action();
  action.bottomRightCorner(nb, nb) = b.ambient_action();
  return MetrizedLattice::create(a.field(), a.of_rank() + b.of_rank(), std::move(basis), std::move(action));
}

MetrizedLattice restrict_scalars(const MetrizedLattice& lattice) {
  const Eigen::Index N = lattice.z_rank();
  return MetrizedLattice::create(NumberField::rationals(), static_cast<int>(N), lattice.basis(),
                                 Eigen::MatrixXd::Identity(N, N), lattice.label());
}

SublatticeHandle saturate_sublattice(const MetrizedLattice& lattice, const IntMatrix& generators) {
  if (generators.cols() != lattice.z_rank())
    throw Error(ErrorCode::dimension_mismatch, "generator rows must have one entry per basis vector");
  IntMatrix sat = saturate(generators);
  if (sat.rows() == 0) throw Error(ErrorCode::empty_sublattice, "generators span the zero sublattice");

  SublatticeHandle h{lattice, std::move(sat)};
  h.saturated_rank = static_cast<int>(h.generators.rows());
  const Eigen::MatrixXd c = h.generators.cast<double>();
  const Eigen::MatrixXd gram = c * lattice.counting_form() * c.transpose();
  const double log_det = Eigen::LDLT<Eigen::MatrixXd>(gram).vectorD().array().log().sum();
  const double of_rank = h.base_rank();
  h.degree = -0.5 * log_det + 0.5 * of_rank * lattice.field().log_disc();
  h.slope = h.degree / of_rank;
  return h;
}

MetrizedLattice quotient_lattice(const SublatticeHandle& sub) {
  const MetrizedLattice& parent = sub.parent;
  const Eigen::Index N = parent.z_rank();
  const Eigen::Index k = sub.saturated_rank;
  const int d = parent.field().degree();
  if (k >= N) throw Error(ErrorCode::invalid_rank, "quotient by the whole lattice is zero");
  if (k % d != 0) throw Error(ErrorCode::not_of_lattice, "sublattice is not an O_F-submodule");

  const IntMatrix w = complete_to_basis(sub.generators);
  const Eigen::MatrixXd realized = w.cast<double>() * parent.basis();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(realized.topRows(k).transpose());
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(N, N);
  const Eigen::MatrixXd complement = q.rightCols(N - k);
  Eigen::MatrixXd basis = realized.bottomRows(N - k) * complement;
  Eigen::MatrixXd action = complement.transpose() * parent.ambient_action() * complement;
  return MetrizedLattice::create(parent.field(), parent.of_rank() - static_cast<int>(k / d), std::move(basis),
                                 std::move(action));
}

MetrizedLattice random_lattice(const NumberField& field, int n, double degree_target, double spread,
                               std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::invalid_rank, "rank must be >= 1");
  if (!(spread > 0.0)) throw Error(ErrorCode::invalid_argument, "spread must be > 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);

  const int d = field.degree();
  const MetrizedLattice base = standard_lattice(field, n);
  Eigen::MatrixXd basis = base.basis();

  // Upper-unipotent times diagonal, per place; the identity as spread -> 0.
  const auto real_transform = [&] {
    Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) g(i, j) = spread * uniform(rng);
    for (int i = 0; i < n; ++i) g.row(i) *= std::exp(spread * normal(rng));
    return g;
  };
  const auto complex_transform = [&] {
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Identity(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) g(i, j) = spread * std::complex<double>(uniform(rng), uniform(rng));
    for (int i = 0; i < n; ++i) {
      const std::complex<double> z(spread * normal(rng), spread * normal(rng));
      g.row(i) *= std::exp(z);
    }
    return g;
  };

  for (int place = 0; place < field.real_places(); ++place) {
    const Eigen::MatrixXd g = real_transform();
    for (Eigen::Index r = 0; r < basis.rows(); ++r) {
      Eigen::RowVectorXd y(n);
      for (int j = 0; j < n; ++j) y[j] = basis(r, j * d + place);
      y = y * g;
      for (int j = 0; j < n; ++j) basis(r, j * d + place) = y[j];
    }
  }
  for (int place = 0; place < field.complex_places(); ++place) {
    const Eigen::MatrixXcd g = complex_transform();
    const int off = field.real_places() + 2 * place;
    for (Eigen::Index r = 0; r < basis.rows(); ++r) {
      Eigen::RowVectorXcd z(n);
      for (int j = 0; j < n; ++j) z[j] = {basis(r, j * d + off), basis(r, j * d + off + 1)};
      z = z * g;
      for (int j = 0; j < n; ++j) {
        basis(r, j * d + off) = z[j].real();
        basis(r, j * d + off + 1) = z[j].imag();
      }
    }
  }

  MetrizedLattice raw = MetrizedLattice::create(field, n, std::move(basis), base.ambient_action());
  const double c = std::exp((raw.degree() - degree_target) / raw.z_rank());
  return scale(raw, c);
}

MetrizedLattice integer_lattice(const IntMatrix& basis) {
  const Eigen::Index N = basis.rows();
  if (basis.cols() != N) throw Error(ErrorCode::dimension_mismatch, "integer basis must be square");
  return MetrizedLattice::create(NumberField::rationals(), static_cast<int>(N), basis.cast<double>(),
                                 Eigen::MatrixXd::Identity(N, N));
}

}  // namespace arcoh
