#include "arcoh/theta.hpp"

#include "arcoh/error.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>

namespace arcoh {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kUnitRoundoff = DBL_EPSILON / 2;

struct GramSchmidt {
  Eigen::VectorXd norms;  // |b*_i|^2
  Eigen::MatrixXd mu;     // mu(i, j) = <b_i, b*_j> / |b*_j|^2, j < i
};

GramSchmidt gram_schmidt(const Eigen::MatrixXd& basis) {
  const Eigen::Index n = basis.rows();
  GramSchmidt gs{Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n)};
  Eigen::MatrixXd star = basis;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      gs.mu(i, j) = basis.row(i).dot(star.row(j)) / gs.norms[j];
      star.row(i) -= gs.mu(i, j) * star.row(j);
    }
    gs.norms[i] = star.row(i).squaredNorm();
  }
  return gs;
}

struct Reduced {
  Eigen::MatrixXd basis;
  IntMatrix unimodular;
  GramSchmidt gs;
};

Reduced reduce(const MetrizedLattice& lattice) {
  LllResult lll = lll_reduce(lattice.basis());
  GramSchmidt gs = gram_schmidt(lll.basis);
  return {std::move(lll.basis), std::move(lll.unimodular), std::move(gs)};
}

void require_tolerance(double tol) {
  if (!(tol > 0.0) || !std::isfinite(tol)) throw Error(ErrorCode::invalid_tolerance, "tolerance must be > 0");
}

// sum_{m >= 1} exp(-a m^2), bounded above.
double half_theta_upper(double a) {
  const double integral = 0.5 * std::sqrt(kPi / a);
  if (a < 1e-3) return integral;
  double sum = 0.0;
  for (int m = 1; m <= 4000; ++m) {
    const double term = std::exp(-a * m * m);
    sum += term;
    const double next_ratio = std::exp(-a * (2.0 * m + 1.0));
    if (term * next_ratio < 1e-18 * sum) {
      const double rest = std::exp(-a * (m + 1.0) * (m + 1.0)) / (1.0 - std::exp(-a * (2.0 * m + 3.0)));
      return std::min(integral, sum * (1.0 + 4 * kUnitRoundoff) + rest);
    }
  }
  return integral;
}

double tail_product(const GramSchmidt& gs) {
  double prod = 1.0;
  for (Eigen::Index i = 0; i < gs.norms.size(); ++i)
    prod *= 1.0 + 2.0 * half_theta_upper(0.5 * kPi * gs.norms[i]);
  return prod;
}

double tail_bound_from(const GramSchmidt& gs, double radius) {
  return std::exp(-0.5 * kPi * radius) * tail_product(gs);
}

double radius_from(const GramSchmidt& gs, double target) {
  const double p = tail_product(gs);
  if (p <= target) return 0.0;
  return (2.0 / kPi) * std::log(p / target) * (1.0 + 1e-12);
}

double log_ball_volume(int dim, double radius_sq) {
  return 0.5 * dim * std::log(kPi * radius_sq) - std::lgamma(0.5 * dim + 1.0);
}

double predicted_count(const GramSchmidt& gs, double bound) {
  if (!(bound > 0.0)) return 1.0;
  double best = 1.0;
  double log_covol = 0.0;
  for (Eigen::Index k = 0; k < gs.norms.size(); ++k) {
    log_covol += 0.5 * std::log(gs.norms[k]);
    best = std::max(best, std::exp(log_ball_volume(static_cast<int>(k + 1), bound) - log_covol));
  }
  return best;
}

// Schnorr-Euchner-free Fincke-Pohst over the half-space: visits every
// nonzero x with Q(x) <= bound once per +-pair, in a fixed order.
template <class Visit>
void enumerate_half_space(const Reduced& red, double bound, long long cap, Visit&& visit) {
  const int n = static_cast<int>(red.gs.norms.size());
  const auto& mu = red.gs.mu;
  const auto& norms = red.gs.norms;
  const double slack_bound = bound * (1.0 + 1e-10) + 1e-300;
  const double accept_bound = bound * (1.0 + (n + 4) * DBL_EPSILON);

  std::vector<long long> x(n, 0);
  std::vector<double> partial(n + 1, 0.0);
  std::vector<long long> hi(n, 0);
  std::vector<double> center(n, 0.0);
  long long nodes = 0;
  const long long node_cap = 20 * cap;

  const auto setup_level = [&](int i, bool higher_zero) {
    double c = 0.0;
    for (int j = i + 1; j < n; ++j) c -= mu(j, i) * static_cast<double>(x[j]);
    center[i] = c;
    const double rem = slack_bound - partial[i + 1];
    if (rem < 0.0) {
      x[i] = 1;
      hi[i] = 0;
      return;
    }
    const double r = std::sqrt(rem / norms[i]);
    long long lo = static_cast<long long>(std::ceil(c - r));
    hi[i] = static_cast<long long>(std::floor(c + r));
    if (higher_zero) lo = std::max<long long>(lo, 0);
    x[i] = lo;
  };
  const auto higher_all_zero = [&](int i) {
    for (int j = i + 1; j < n; ++j)
      if (x[j] != 0) return false;
    return true;
  };

  int level = n - 1;
  setup_level(level, true);
  while (level < n) {
    if (x[level] > hi[level]) {
      ++level;
      if (level < n) ++x[level];
      continue;
    }
    if (++nodes > node_cap)
      throw Error(ErrorCode::enumeration_too_large, "enumeration exceeded its node budget");
    const double diff = static_cast<double>(x[level]) - center[level];
    partial[level] = partial[level + 1] + norms[level] * diff * diff;
    if (partial[level] > slack_bound) {
      ++x[level];
      continue;
    }
    if (level == 0) {
      if (!(x[0] == 0 && higher_all_zero(0)) && partial[0] <= accept_bound) visit(x, partial[0]);
      ++x[0];
      continue;
    }
    const bool zero_above = x[level] == 0 && higher_all_zero(level);
    --level;
    setup_level(level, zero_above);
  }
}

void check_cap(const Reduced& red, double bound, long long cap) {
  const double predicted = predicted_count(red.gs, bound);
  if (predicted > static_cast<double>(cap))
    throw Error(ErrorCode::enumeration_too_large,
                "predicted " + std::to_string(predicted) + " lattice points exceeds cap " + std::to_string(cap));
}

ThetaValue sum_with(const Reduced& red, double radius, long long cap) {
  check_cap(red, radius, cap);
  const int n = static_cast<int>(red.gs.norms.size());
  double sum = 0.0, carry = 0.0, rounding = 0.0;
  long long pairs = 0;
  enumerate_half_space(red, radius, cap, [&](const std::vector<long long>&, double q) {
    const double term = 2.0 * std::exp(-kPi * q);
    const double y = term - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
    rounding += term * kUnitRoundoff * (kPi * q * (n + 3) + 2.0);
    ++pairs;
  });
  if (pairs > cap) throw Error(ErrorCode::enumeration_too_large, "enumerated point count exceeds cap");

  ThetaValue out;
  out.nonzero_mass = sum;
  out.value = 1.0 + sum;
  out.radius = radius;
  out.enumerated = 1 + 2 * pairs;
  out.tail_bound = tail_bound_from(red.gs, radius);
  out.rounding_bound = rounding + 2 * kUnitRoundoff * sum;
  out.h0 = std::log1p(sum);
  out.h0_error = (out.tail_bound + out.rounding_bound) / out.value;
  return out;
}

ThetaValue direct_h0(const MetrizedLattice& lattice, double tol, long long cap) {
  const Reduced red = reduce(lattice);
  const double radius = radius_from(red.gs, 0.5 * tol);
  ThetaValue out = sum_with(red, radius, cap);
  if (out.rounding_bound > 0.5 * tol)
    throw Error(ErrorCode::tolerance_unreachable,
                "floating-point error estimate " + std::to_string(out.rounding_bound) + " exceeds tol/2");
  return out;
}

}  // namespace

LllResult lll_reduce(const Eigen::MatrixXd& basis, double delta) {
  const Eigen::Index n = basis.rows();
  LllResult out{basis, IntMatrix::Identity(n, n)};
  if (n <= 1) return out;
  Eigen::MatrixXd& b = out.basis;
  IntMatrix& u = out.unimodular;
  GramSchmidt gs = gram_schmidt(b);
  Eigen::Index k = 1;
  long long iterations = 0;
  while (k < n) {
    if (++iterations > 1'000'000) throw Error(ErrorCode::degenerate_basis, "LLL failed to terminate");
    for (Eigen::Index j = k - 1; j >= 0; --j) {
      const double q = std::round(gs.mu(k, j));
      if (q == 0.0) continue;
      if (std::abs(q) > 1e15) throw Error(ErrorCode::integer_overflow, "LLL transform entries too large");
      const auto qi = static_cast<long long>(q);
      b.row(k) -= q * b.row(j);
      u.row(k) -= qi * u.row(j);
      for (Eigen::Index l = 0; l < j; ++l) gs.mu(k, l) -= q * gs.mu(j, l);
      gs.mu(k, j) -= q;
    }
    if (gs.norms[k] >= (delta - gs.mu(k, k - 1) * gs.mu(k, k - 1)) * gs.norms[k - 1]) {
      ++k;
    } else {
      b.row(k).swap(b.row(k - 1));
      u.row(k).swap(u.row(k - 1));
      gs = gram_schmidt(b);
      k = std::max<Eigen::Index>(k - 1, 1);
    }
  }
  return out;
}

std::vector<ShortVector> short_vectors(const MetrizedLattice& lattice, double bound, long long cap) {
  if (!(bound > 0.0)) throw Error(ErrorCode::invalid_argument, "bound must be > 0");
  const Reduced red = reduce(lattice);
  check_cap(red, bound, cap);
  const Eigen::Index n = lattice.z_rank();
  const Eigen::MatrixXd& gram = lattice.counting_form();
  std::vector<ShortVector> out;
  enumerate_half_space(red, bound, cap, [&](const std::vector<long long>& x, double) {
    IntRowVector coords = IntRowVector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i)
      if (x[i] != 0) coords += x[i] * red.unimodular.row(i);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (coords[i] == 0) continue;
      if (coords[i] < 0) coords = -coords;
      break;
    }
    const Eigen::RowVectorXd xd = coords.cast<double>();
    out.push_back({std::move(coords), xd * gram * xd.transpose()});
    if (static_cast<long long>(out.size()) > cap)
      throw Error(ErrorCode::enumeration_too_large, "short vector count exceeds cap");
  });
  std::sort(out.begin(), out.end(), [](const ShortVector& a, const ShortVector& b) {
    return std::lexicographical_compare(a.coords.data(), a.coords.data() + a.coords.size(), b.coords.data(),
                                        b.coords.data() + b.coords.size());
  });
  return out;
}

double predicted_point_count(const MetrizedLattice& lattice, double bound) {
  return predicted_count(reduce(lattice).gs, bound);
}

double theta_tail_bound(const MetrizedLattice& lattice, double radius) {
  return tail_bound_from(reduce(lattice).gs, radius);
}

double theta_radius_for(const MetrizedLattice& lattice, double target) {
  require_tolerance(target);
  return radius_from(reduce(lattice).gs, target);
}

ThetaValue theta_sum(const MetrizedLattice& lattice, double radius, long long cap) {
  if (!(radius >= 0.0)) throw Error(ErrorCode::invalid_argument, "radius must be >= 0");
  return sum_with(reduce(lattice), radius, cap);
}

ThetaValue h0(const MetrizedLattice& lattice, const ThetaOptions& options) {
  require_tolerance(options.tol);
  if (!options.allow_dual_route || lattice.log_covolume() >= 0.0)
    return direct_h0(lattice, options.tol, options.cap);

  // value(L) = value(L^dual) / covol(L)
  const double covol = lattice.covolume();
  ThetaValue dual = direct_h0(dual_lattice(lattice), options.tol * covol, options.cap);
  ThetaValue out = dual;
  out.via_dual = true;
  out.h0 = dual.h0 - lattice.log_covolume();
  out.value = std::exp(out.h0);
  out.nonzero_mass = std::expm1(out.h0);
  out.tail_bound = dual.tail_bound / covol;
  out.rounding_bound = dual.rounding_bound / covol + 4 * kUnitRoundoff * out.value;
  out.h0_error = dual.h0_error + 2 * kUnitRoundoff * std::abs(out.h0);
  return out;
}

ThetaValue h0(const MetrizedLattice& lattice, double tol) { return h0(lattice, ThetaOptions{tol}); }

ThetaValue h1(const MetrizedLattice& lattice, const ThetaOptions& options) {
  return h0(omega_twist(lattice), options);
}

ThetaValue h1(const MetrizedLattice& lattice, double tol) { return h1(lattice, ThetaOptions{tol}); }

Estimate rr_residual(const MetrizedLattice& lattice, double tol) {
  const ThetaValue zero = h0(lattice, tol);
  const ThetaValue one = h1(lattice, tol);
  const double expected = lattice.degree() - 0.5 * lattice.of_rank() * lattice.field().log_disc();
  const double value = zero.h0 - one.h0 - expected;
  const double fp = 8 * kUnitRoundoff * (std::abs(zero.h0) + std::abs(one.h0) + std::abs(expected));
  return {value, zero.h0_error + one.h0_error + fp};
}

Estimate effectivity_count(const MetrizedLattice& lattice, double tol) {
  const ThetaValue t = h0(lattice, tol);
  return {t.value, t.tail_bound + t.rounding_bound};
}

}  // namespace arcoh
