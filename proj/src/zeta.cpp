#include "arcoh/zeta.hpp"

#include "arcoh/error.hpp"
#include "arcoh/lattice.hpp"
#include "arcoh/parallel.hpp"
#include "arcoh/theta.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_gamma.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>

namespace arcoh {

namespace {

constexpr double kPi = std::numbers::pi;

struct Node {
  double x;
  double w;
};

// Gauss-Legendre nodes on [a, b].
std::vector<Node> gauss_legendre(int order, double a, double b) {
  static std::mutex mutex;
  static std::map<int, gsl_integration_glfixed_table*> tables;
  gsl_integration_glfixed_table* table = nullptr;
  {
    std::lock_guard lock(mutex);
    auto it = tables.find(order);
    if (it == tables.end()) {
      gsl_set_error_handler_off();
      table = gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(order));
      if (table == nullptr) throw Error(ErrorCode::invalid_argument, "cannot build Gauss-Legendre rule");
      tables.emplace(order, table);
    } else {
      table = it->second;
    }
  }
  std::vector<Node> nodes(static_cast<std::size_t>(order));
  for (int i = 0; i < order; ++i)
    gsl_integration_glfixed_point(a, b, static_cast<std::size_t>(i), &nodes[i].x, &nodes[i].w, table);
  return nodes;
}

std::vector<Node> composite_rule(int panels, int order, double a, double b) {
  std::vector<Node> out;
  out.reserve(static_cast<std::size_t>(panels * order));
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const auto nodes = gauss_legendre(order, a + p * h, a + (p + 1) * h);
    out.insert(out.end(), nodes.begin(), nodes.end());
  }
  return out;
}

void require_regular(Complex s) {
  if (s == Complex(0.0) || s == Complex(1.0))
    throw Error(ErrorCode::pole_argument, "s = 0 and s = 1 are poles");
}

Complex polar_part(Complex s, double volume) { return volume * (1.0 / (s - 1.0) - 1.0 / s); }

struct Mass {
  double value = 0.0;
  double error = 0.0;
};

// theta(L) - 1 with absolute error about `target`.
Mass theta_mass(const MetrizedLattice& lattice, double target) {
  const double radius = theta_radius_for(lattice, target);
  const ThetaValue t = theta_sum(lattice, radius);
  return {t.nonzero_mass, t.tail_bound + t.rounding_bound};
}

const NumberField& rationals() {
  static const NumberField field = NumberField::rationals();
  return field;
}

// ---- rank 1 ----

Mass rank1_mass(double t, double target) {
  return theta_mass(scale(standard_lattice(rationals(), 1), t), target);
}

// int_{t_max}^inf 2.01 e^{-pi T^2} T^a dT
double rank1_truncation(double t_max, double a) {
  const double rate = 2.0 * kPi * t_max - std::max(a, 0.0) / t_max;
  return 2.01 * std::exp(-kPi * t_max * t_max) * std::pow(t_max, a) / std::max(rate, 1.0);
}

double rank1_t_max(Complex s, double tol) {
  const double a = std::max(s.real(), 1.0 - s.real()) - 1.0;
  double t = 1.5;
  while (2.0 * rank1_truncation(t, a) > tol / 10 && t < 64) t += 0.25;
  return t;
}

struct QuadratureResult {
  Complex value;
  double error = 0.0;
  long long evaluations = 0;
};

// int over [a, b] of g(u) mass(T(u)) via composite GL, refined until the
// order-20 and order-10 panel rules agree.
QuadratureResult refine(double a, double b, double tol, const std::function<double(double)>& t_of_u,
                        const std::function<Complex(double, double)>& weight_of, double mass_target) {
  QuadratureResult out;
  for (int panels = 4; panels <= 512; panels *= 2) {
    const auto fine = composite_rule(panels, 20, a, b);
    const auto coarse = composite_rule(panels, 10, a, b);
    Complex qf = 0.0, qc = 0.0;
    double mass_err = 0.0;
    for (const auto& node : fine) {
      const double t = t_of_u(node.x);
      const Mass m = rank1_mass(t, mass_target);
      const Complex w = weight_of(node.x, t);
      qf += node.w * m.value * w;
      mass_err += node.w * m.error * std::abs(w);
    }
    for (const auto& node : coarse) {
      const double t = t_of_u(node.x);
      qc += node.w * rank1_mass(t, mass_target).value * weight_of(node.x, t);
    }
    out.evaluations += static_cast<long long>(fine.size() + coarse.size());
    out.value = qf;
    out.error = std::abs(qf - qc) + mass_err;
    if (std::abs(qf - qc) < tol / 4) return out;
  }
  return out;
}

QuadratureResult rank1_integral(Complex s, double t_max, double tol) {
  return refine(
      1.0, t_max, tol, [](double u) { return u; },
      [s](double, double t) { return std::pow(Complex(t), s - 1.0); }, tol * 1e-3);
}

// ---- rank 2 ----

double arc(double x) { return std::sqrt(1.0 - x * x); }

MetrizedLattice rank2_lattice(Complex tau, double covolume) {
  const std::vector<double> b = rank2_basis(tau, covolume);
  Eigen::MatrixXd basis(2, 2);
  basis << b[0], b[1], b[2], b[3];
  return from_basis(rationals(), 2, basis);
}

struct FibreRule {
  std::vector<Complex> tau;
  std::vector<double> weight;  // includes dx dy / y^2, the Jacobian and the x-symmetry factor 2
};

FibreRule fibre_rule(int x_order, int v_order) {
  FibreRule rule;
  const auto xs = gauss_legendre(x_order, 0.0, 0.5);
  const auto vs = gauss_legendre(v_order, 0.0, 1.0);
  for (const auto& xn : xs) {
    const double b = arc(xn.x);
    for (const auto& vn : vs) {
      const double y = b + (1.0 - b) * vn.x;
      rule.tau.emplace_back(xn.x, y);
      rule.weight.push_back(2.0 * xn.w * vn.w * (1.0 - b) / (y * y));
    }
  }
  return rule;
}

// F(T) = int_semistable (theta_T(tau) - 1) dx dy / y^2
Mass fibre_integral(const FibreRule& rule, double t, double target) {
  Mass out;
  for (std::size_t i = 0; i < rule.tau.size(); ++i) {
    const Mass m = theta_mass(rank2_lattice(rule.tau[i], t), target);
    out.value += rule.weight[i] * m.value;
    out.error += rule.weight[i] * m.error;
  }
  return out;
}

constexpr double kRank2Constant = 9.0 / (1.0 - 1.0986122886681098 / kPi);

// Bound on int_{t_max}^inf Vol (theta - 1) T^a dT for the semistable locus.
double rank2_truncation(double t_max, double a, double volume) {
  const double h0_bound = kRank2Constant * std::exp(-kPi * t_max);
  const double factor = kRank2Constant * std::exp(h0_bound);
  const double rate = kPi - std::max(a, 0.0) / t_max;
  return volume * factor * std::exp(-kPi * t_max) * std::pow(t_max, a) / std::max(rate, 0.5);
}

int panels_for(int nodes, int order) { return std::max(1, (nodes + order - 1) / order); }

}  // namespace

std::string to_string(ZetaMethod method) {
  switch (method) {
    case ZetaMethod::quadrature: return "quadrature";
    case ZetaMethod::monte_carlo: return "monte-carlo";
    case ZetaMethod::direct: return "direct";
  }
  return "unknown";
}

Complex riemann_zeta_right(Complex s) {
  require_regular(s);
  if (s == Complex(1.0)) throw Error(ErrorCode::pole_argument, "zeta has a pole at s = 1");
  constexpr int n = 100;
  std::vector<double> d(n + 1);
  double term = 1.0, sum = 1.0;
  d[0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    term *= 4.0 * (n + i - 1.0) * (n - i + 1.0) / ((2.0 * i) * (2.0 * i - 1.0));
    sum += term;
    d[i] = sum;
  }
  Complex eta = 0.0;
  for (int k = 0; k < n; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    eta += sign * (d[k] - d[n]) * std::exp(-s * std::log(k + 1.0));
  }
  eta /= -d[n];
  return eta / (1.0 - std::exp((1.0 - s) * std::numbers::ln2));
}

Complex xi_reference(Complex s) {
  require_regular(s);
  const Complex z = s.real() < 0.5 ? 1.0 - s : s;
  gsl_set_error_handler_off();
  gsl_sf_result log_mod, arg;
  const Complex half = 0.5 * z;
  if (gsl_sf_lngamma_complex_e(half.real(), half.imag(), &log_mod, &arg) != GSL_SUCCESS)
    throw Error(ErrorCode::invalid_argument, "log-gamma evaluation failed");
  const Complex log_gamma(log_mod.val, arg.val);
  return std::exp(-half * std::log(kPi) + log_gamma) * riemann_zeta_right(z);
}

ZetaEval rank1_zeta(Complex s, const Rank1Options& options) {
  require_regular(s);
  if (!(options.tol > 0.0)) throw Error(ErrorCode::invalid_tolerance, "tolerance must be > 0");
  const double t_max = options.t_max > 0.0 ? options.t_max : rank1_t_max(s, options.tol);
  const QuadratureResult a = rank1_integral(s, t_max, options.tol / 4);
  const QuadratureResult b = rank1_integral(1.0 - s, t_max, options.tol / 4);
  ZetaEval out;
  out.s = s;
  out.integral_s = a.value;
  out.integral_1ms = b.value;
  out.volume = 1.0;
  out.polar = polar_part(s, 1.0);
  out.value = (out.integral_s + out.integral_1ms) + out.polar;
  out.t_max = t_max;
  out.method = ZetaMethod::quadrature;
  out.sample_count = a.evaluations + b.evaluations;
  out.abs_error = a.error + b.error + rank1_truncation(t_max, s.real() - 1.0) +
                  rank1_truncation(t_max, -s.real());
  if (out.abs_error > options.tol)
    throw Error(ErrorCode::tolerance_unreachable,
                "rank-1 quadrature error " + std::to_string(out.abs_error) + " exceeds tolerance");
  return out;
}

ZetaEval rank1_zeta_direct(Complex s, const Rank1Options& options) {
  require_regular(s);
  if (!(s.real() > 1.0)) throw Error(ErrorCode::invalid_argument, "direct integration needs Re s > 1");
  const double t_max = options.t_max > 0.0 ? options.t_max : rank1_t_max(s, options.tol);
  constexpr double t_min = 1.0 / 16;
  const QuadratureResult q = refine(
      std::log(t_min), std::log(t_max), options.tol / 2, [](double u) { return std::exp(u); },
      [s](double, double t) { return std::pow(Complex(t), s); }, options.tol * 1e-3);
  // below t_min, theta(T) - 1 = 1/T - 1 + (theta(1/T) - 1)/T
  const Complex sliver = std::pow(Complex(t_min), s - 1.0) / (s - 1.0) - std::pow(Complex(t_min), s) / s;
  const double sliver_error =
      2.01 * std::exp(-kPi / (t_min * t_min)) * std::pow(t_min, s.real() - 1.0) / (s.real() - 1.0);
  ZetaEval out;
  out.s = s;
  out.value = q.value + sliver;
  out.volume = 1.0;
  out.t_max = t_max;
  out.method = ZetaMethod::direct;
  out.sample_count = q.evaluations;
  out.abs_error = q.error + sliver_error + rank1_truncation(t_max, s.real() - 1.0);
  return out;
}

AreaEstimate hyperbolic_area(HyperbolicRegion region, int order) {
  // y = map(x, v) with v in [0, 1]; returns dy/y^2 per dv
  const auto density = [region](double x, double v) {
    const double b = arc(x);
    switch (region) {
      case HyperbolicRegion::semistable: {
        const double y = b + (1.0 - b) * v;
        return (1.0 - b) / (y * y);
      }
      case HyperbolicRegion::full: return 1.0 / b;  // y = b / v
      case HyperbolicRegion::cusp: return 1.0;      // y = 1 / v
    }
    return 0.0;
  };
  const auto integrate = [&](int n) {
    double sum = 0.0;
    for (const auto& xn : gauss_legendre(n, 0.0, 0.5))
      for (const auto& vn : gauss_legendre(n, 0.0, 1.0)) sum += 2.0 * xn.w * vn.w * density(xn.x, vn.x);
    return sum;
  };
  const double fine = integrate(order);
  const double coarse = integrate(std::max(2, order / 2));
  return {fine, std::abs(fine - coarse) + 1e-15};
}

AreaEstimate moduli_volume_rank2() { return hyperbolic_area(HyperbolicRegion::semistable); }

std::vector<double> rank2_basis(Complex tau, double covolume) {
  if (!(tau.imag() > 0.0)) throw Error(ErrorCode::invalid_argument, "tau must lie in the upper half plane");
  if (!(covolume > 0.0)) throw Error(ErrorCode::invalid_scale, "covolume must be > 0");
  const double c = std::sqrt(covolume / tau.imag());
  return {c, 0.0, c * tau.real(), c * tau.imag()};
}

double rank2_t_max(Complex s, double tol) {
  const double a = std::max(s.real() - 1.0, -s.real());
  const double volume = kPi / 3.0 - 1.0;
  double t = 2.0;
  while (2.0 * rank2_truncation(t, a, volume) > tol / 10 && t < 200) t += 0.5;
  return std::ceil(t);
}

Rank2Integrator::Rank2Integrator(const Rank2Options& options, double t_max)
    : options_(options), t_max_(t_max), volume_(moduli_volume_rank2()) {
  if (options.x_nodes < 2 || options.y_nodes < 2 || options.t_nodes < 2)
    throw Error(ErrorCode::invalid_argument, "grid needs at least 2 nodes per axis");
  if (!(t_max > 1.0)) throw Error(ErrorCode::invalid_argument, "t_max must exceed 1");
  constexpr int order = 16;
  const int panels = panels_for(options.t_nodes, order);
  const double target = std::max(options.tol * 1e-4, 1e-15);

  const auto build = [&](int x_order, int v_order, int t_order, Rule& rule, double& error) {
    const FibreRule fibre = fibre_rule(x_order, v_order);
    const auto nodes = composite_rule(panels, t_order, 1.0, t_max_);
    rule.t.resize(nodes.size());
    rule.weight.resize(nodes.size());
    rule.fibre.resize(nodes.size());
    std::vector<double> errors(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t i) {
      const Mass m = fibre_integral(fibre, nodes[i].x, target);
      rule.t[i] = nodes[i].x;
      rule.weight[i] = nodes[i].w;
      rule.fibre[i] = m.value;
      errors[i] = nodes[i].w * m.error;
    });
    for (double e : errors) error += e;
    evaluations_ += static_cast<long long>(nodes.size() * fibre.tau.size());
  };
  double unused = 0.0;
  build(options.x_nodes, options.y_nodes, std::min(order, options.t_nodes), fine_, fibre_error_);
  build(std::max(2, options.x_nodes / 2), std::max(2, options.y_nodes / 2), std::max(2, std::min(order, options.t_nodes) / 2),
        coarse_, unused);
}

Complex Rank2Integrator::integral(const Rule& rule, Complex s) const {
  Complex sum = 0.0;
  for (std::size_t i = 0; i < rule.t.size(); ++i)
    sum += rule.weight[i] * rule.fibre[i] * std::pow(Complex(rule.t[i]), s - 1.0);
  return sum;
}

ZetaEval Rank2Integrator::evaluate(Complex s) const {
  require_regular(s);
  ZetaEval out;
  out.s = s;
  out.method = ZetaMethod::quadrature;
  out.t_max = t_max_;
  out.volume = volume_.value;
  out.integral_s = integral(fine_, s);
  out.integral_1ms = integral(fine_, 1.0 - s);
  out.polar = polar_part(s, volume_.value);
  out.value = (out.integral_s + out.integral_1ms) + out.polar;
  const double quad_error =
      std::abs(out.integral_s - integral(coarse_, s)) + std::abs(out.integral_1ms - integral(coarse_, 1.0 - s));
  const double weight_bound = std::pow(t_max_, std::max(std::abs(s.real() - 1.0), std::abs(s.real())));
  out.abs_error = quad_error + 2.0 * fibre_error_ * weight_bound +
                  rank2_truncation(t_max_, s.real() - 1.0, volume_.value) +
                  rank2_truncation(t_max_, -s.real(), volume_.value) +
                  volume_.error * std::abs(1.0 / (s - 1.0) - 1.0 / s);
  out.sample_count = evaluations_;
  return out;
}

namespace {

ZetaEval rank2_monte_carlo(Complex s, const Rank2Options& options, double t_max) {
  if (options.samples < 2) throw Error(ErrorCode::invalid_argument, "Monte Carlo needs at least 2 samples");
  const AreaEstimate volume = moduli_volume_rank2();
  const std::size_t n = static_cast<std::size_t>(options.samples);
  std::vector<Complex> fs(n), fr(n);
  parallel_for(n, [&](std::size_t i) {
    std::mt19937_64 rng(derived_seed(options.seed, i));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double x = 0.5 * unit(rng);
    const double v = unit(rng);
    const double t = 1.0 + (t_max - 1.0) * unit(rng);
    const double b = arc(x);
    const double y = b + (1.0 - b) * v;
    const double mass = theta_mass(rank2_lattice({x, y}, t), 1e-15).value;
    // box volume (1/2)(1)(t_max - 1), symmetry factor 2
    const double w = (t_max - 1.0) * (1.0 - b) / (y * y) * mass;
    fs[i] = w * std::pow(Complex(t), s - 1.0);
    fr[i] = w * std::pow(Complex(t), -s);
  });
  const auto stats = [n](const std::vector<Complex>& f) {
    Complex mean = 0.0;
    for (const auto& v : f) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& v : f) var += std::norm(v - mean);
    var /= static_cast<double>(n - 1);
    return std::pair{mean, 3.0 * std::sqrt(var / static_cast<double>(n))};
  };
  const auto [is, es] = stats(fs);
  const auto [ir, er] = stats(fr);
  ZetaEval out;
  out.s = s;
  out.method = ZetaMethod::monte_carlo;
  out.t_max = t_max;
  out.volume = volume.value;
  out.integral_s = is;
  out.integral_1ms = ir;
  out.polar = polar_part(s, volume.value);
  out.value = (is + ir) + out.polar;
  out.abs_error = es + er + rank2_truncation(t_max, s.real() - 1.0, volume.value) +
                  rank2_truncation(t_max, -s.real(), volume.value);
  out.sample_count = options.samples;
  return out;
}

}  // namespace

ZetaEval rank2_zeta(Complex s, const Rank2Options& options) {
  require_regular(s);
  if (!(options.tol > 0.0)) throw Error(ErrorCode::invalid_tolerance, "tolerance must be > 0");
  const double t_max = options.t_max > 0.0 ? options.t_max : rank2_t_max(s, options.tol);
  if (options.method == ZetaMethod::monte_carlo) return rank2_monte_carlo(s, options, t_max);
  return Rank2Integrator(options, t_max).evaluate(s);
}

ZetaEval rank2_zeta_direct(Complex s, const Rank2Options& options) {
  require_regular(s);
  if (!(s.real() > 1.0)) throw Error(ErrorCode::invalid_argument, "direct integration needs Re s > 1");
  const double t_max = options.t_max > 0.0 ? options.t_max : rank2_t_max(s, options.tol);
  constexpr double t_min = 1.0 / 16;
  constexpr int order = 16;
  const int panels = panels_for(options.t_nodes, order);
  const AreaEstimate volume = moduli_volume_rank2();

  const auto run = [&](int x_order, int v_order, int t_order, double& theta_error, long long& evals) {
    const FibreRule fibre = fibre_rule(x_order, v_order);
    const auto nodes = composite_rule(panels, t_order, std::log(t_min), std::log(t_max));
    std::vector<Complex> terms(nodes.size());
    std::vector<double> errors(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t i) {
      const double t = std::exp(nodes[i].x);
      const double target = std::max(options.tol * 1e-4 * std::min(1.0, t), 1e-15);
      const Mass m = fibre_integral(fibre, t, target);
      const Complex w = nodes[i].w * std::pow(Complex(t), s);
      terms[i] = w * m.value;
      errors[i] = std::abs(w) * m.error;
    });
    Complex sum = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      sum += terms[i];
      theta_error += errors[i];
    }
    evals += static_cast<long long>(nodes.size() * fibre.tau.size());
    return sum;
  };
  double theta_error = 0.0, unused = 0.0;
  long long evals = 0;
  const Complex fine = run(options.x_nodes, options.y_nodes, std::min(order, options.t_nodes), theta_error, evals);
  const Complex coarse = run(std::max(2, options.x_nodes / 2), std::max(2, options.y_nodes / 2),
                             std::max(2, std::min(order, options.t_nodes) / 2), unused, evals);

  // below t_min, theta_T - 1 = 1/T - 1 + (theta_{1/T} - 1)/T on the semistable locus
  const Complex sliver = volume.value * (std::pow(Complex(t_min), s - 1.0) / (s - 1.0) -
                                         std::pow(Complex(t_min), s) / s);
  const double sliver_error =
      volume.value * kRank2Constant * 2.0 * std::exp(-kPi / t_min) * std::pow(t_min, s.real() - 1.0) /
          (s.real() - 1.0) +
      volume.error * std::abs(std::pow(Complex(t_min), s - 1.0) / (s - 1.0));

  ZetaEval out;
  out.s = s;
  out.method = ZetaMethod::direct;
  out.t_max = t_max;
  out.volume = volume.value;
  out.value = fine + sliver;
  out.abs_error = std::abs(fine - coarse) + theta_error + sliver_error +
                  rank2_truncation(t_max, s.real() - 1.0, volume.value);
  out.sample_count = evals;
  return out;
}

std::vector<ModuliPointRank2> rank2_moduli_samples(int count, std::uint64_t seed) {
  if (count < 1) throw Error(ErrorCode::invalid_argument, "count must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ModuliPointRank2> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double x = unit(rng) - 0.5;
    const double b = arc(x);
    const double y = b + (1.0 - b) * unit(rng);
    const double t = std::exp(4.0 * unit(rng) - 2.0);
    out.push_back({{x, y}, t, 1.0 / (y * y)});
  }
  return out;
}

ResidueEstimate pole_check(const std::function<ZetaEval(Complex)>& zeta, int pole, double h0, int levels) {
  if (pole != 0 && pole != 1) throw Error(ErrorCode::invalid_argument, "pole must be 0 or 1");
  if (!(h0 > 0.0) || levels < 2) throw Error(ErrorCode::invalid_argument, "need h0 > 0 and at least 2 levels");
  std::vector<std::vector<Complex>> table(static_cast<std::size_t>(levels));
  for (int k = 0; k < levels; ++k) {
    const double h = h0 * std::ldexp(1.0, -k);
    table[k].push_back(h * zeta(Complex(pole + h)).value);
    for (int j = 1; j <= k; ++j) {
      const double f = std::ldexp(1.0, j);
      table[k].push_back((f * table[k][j - 1] - table[k - 1][j - 1]) / (f - 1.0));
    }
  }
  const Complex last = table[levels - 1][levels - 1];
  const Complex prev = table[levels - 2][levels - 2];
  ResidueEstimate out;
  out.residue = last.real();
  out.error = std::abs(last - prev);
  out.converged = out.error <= 1e-4 * std::max(1.0, std::abs(last)) && std::abs(last.imag()) <= 1e-8;
  return out;
}

}  // namespace arcoh
