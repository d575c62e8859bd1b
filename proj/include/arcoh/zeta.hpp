#pragma once

// Rank-1 and rank-2 non-abelian zeta functions over Q, assembled as
// I(s) + I(1-s) + Vol * (1/(s-1) - 1/s), plus the completed Riemann zeta.

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace arcoh {

using Complex = std::complex<double>;

enum class ZetaMethod { quadrature, monte_carlo, direct };

std::string to_string(ZetaMethod method);

struct ZetaEval {
  Complex s;
  Complex value;
  Complex integral_s;    // I(s)
  Complex integral_1ms;  // I(1 - s)
  Complex polar;         // Vol * (1/(s-1) - 1/s)
  double volume = 1.0;
  double abs_error = 0.0;
  double t_max = 0.0;
  ZetaMethod method = ZetaMethod::quadrature;
  long long sample_count = 0;  // integrand evaluations
};

/// pi^{-s/2} Gamma(s/2) zeta(s).
Complex xi_reference(Complex s);
/// Riemann zeta via the alternating eta series, valid for Re s >= 1/2, s != 1.
Complex riemann_zeta_right(Complex s);

// ---- rank 1 ----

struct Rank1Options {
  double tol = 1e-12;
  double t_max = 0.0;  // 0: choose from the decay of the integrand
};

ZetaEval rank1_zeta(Complex s, const Rank1Options& options = {});
/// Integral over all covolumes without the symmetric split; needs Re s > 1.
ZetaEval rank1_zeta_direct(Complex s, const Rank1Options& options = {});

// ---- rank 2 ----

enum class HyperbolicRegion {
  semistable,  // |x| <= 1/2, |tau| >= 1, y <= 1
  full,        // the whole fundamental domain
  cusp,        // |x| <= 1/2, y > 1
};

struct AreaEstimate {
  double value = 0.0;
  double error = 0.0;
};

/// Hyperbolic area dx dy / y^2 of a region of the fundamental domain.
AreaEstimate hyperbolic_area(HyperbolicRegion region, int order = 20);
/// Area of the semistable locus, the residue magnitude of the rank-2 zeta.
AreaEstimate moduli_volume_rank2();

struct ModuliPointRank2 {
  Complex tau;
  double covolume = 1.0;
  double weight = 1.0;  // 1 / y^2
};

/// Realized rank-2 lattice basis {(1,0), (x,y)} * sqrt(T/y), rows.
std::vector<double> rank2_basis(Complex tau, double covolume);

struct Rank2Options {
  int x_nodes = 16;
  int y_nodes = 16;
  int t_nodes = 96;
  double tol = 1e-8;
  double t_max = 0.0;  // 0: from the effective vanishing bound
  ZetaMethod method = ZetaMethod::quadrature;
  long long samples = 100000;  // Monte Carlo only
  std::uint64_t seed = 1;
};

/// Truncation point with the mass beyond it below tol / 10.
double rank2_t_max(Complex s, double tol);

/// Holds the per-covolume fibre integrals F(T) = int (theta_T(tau) - 1) dmu_T
/// on a fixed node set, so I(s) is a cheap weighted sum for every s.
class Rank2Integrator {
 public:
  Rank2Integrator(const Rank2Options& options, double t_max);

  double t_max() const { return t_max_; }
  ZetaEval evaluate(Complex s) const;
  long long evaluations() const { return evaluations_; }

 private:
  struct Rule {
    std::vector<double> t, weight, fibre;
  };
  Complex integral(const Rule& rule, Complex s) const;

  Rank2Options options_;
  double t_max_;
  AreaEstimate volume_;
  Rule fine_, coarse_;
  double fibre_error_ = 0.0;
  long long evaluations_ = 0;
};

ZetaEval rank2_zeta(Complex s, const Rank2Options& options = {});
/// Direct integration over covolumes below and above 1; needs Re s > 1.
ZetaEval rank2_zeta_direct(Complex s, const Rank2Options& options = {});

/// Samples of the semistable locus on a tensor grid.
std::vector<ModuliPointRank2> rank2_moduli_samples(int count, std::uint64_t seed);

// ---- poles ----

struct ResidueEstimate {
  double residue = 0.0;
  double error = 0.0;
  bool converged = false;
};

/// Residue at s = pole (0 or 1) from h * f(pole + h), h = h0 2^{-k}, with
/// Richardson extrapolation.
ResidueEstimate pole_check(const std::function<ZetaEval(Complex)>& zeta, int pole, double h0 = 0.25,
                           int levels = 6);

}  // namespace arcoh
