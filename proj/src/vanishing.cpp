#include "arcoh/vanishing.hpp"

#include "arcoh/error.hpp"
#include "arcoh/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace arcoh {

namespace {

constexpr double kPi = std::numbers::pi;

void require_semistable(const MetrizedLattice& lattice, const VanishingOptions& options) {
  if (options.assume_semistable) return;
  if (!is_semistable(lattice, kSlopeTieTolerance, options.stability))
    throw Error(ErrorCode::hypothesis_violated, "lattice is not semistable");
}

}  // namespace

double vanishing_constant(int of_rank, int field_degree) {
  return std::pow(3.0, of_rank * field_degree) / (1.0 - std::log(3.0) / kPi);
}

double h0_bound_threshold(const MetrizedLattice& lattice) {
  const double n = lattice.of_rank();
  return -lattice.field().degree() * n * std::log(n) / 2.0;
}

double h1_bound_threshold(const MetrizedLattice& lattice) {
  const double n = lattice.of_rank();
  return lattice.field().degree() * n * std::log(n) / 2.0 + n * lattice.field().log_disc();
}

std::optional<double> effective_h0_bound(const MetrizedLattice& lattice, const VanishingOptions& options) {
  require_semistable(lattice, options);
  const double deg = lattice.degree();
  if (deg > h0_bound_threshold(lattice) + 1e-12) return std::nullopt;
  const int n = lattice.of_rank();
  const int d = lattice.field().degree();
  const double exponent = std::exp(-2.0 * deg / (n * d));
  return vanishing_constant(n, d) * std::exp(-kPi * d * exponent);
}

std::optional<double> effective_h1_bound(const MetrizedLattice& lattice, const VanishingOptions& options) {
  require_semistable(lattice, options);
  const double deg = lattice.degree();
  if (deg < h1_bound_threshold(lattice) - 1e-12) return std::nullopt;
  const int n = lattice.of_rank();
  const int d = lattice.field().degree();
  const double base = kPi * d * std::exp(-2.0 * lattice.field().log_disc() / d);
  return vanishing_constant(n, d) * std::exp(-base * std::exp(2.0 * deg / (n * d)));
}

DecayProbe scaling_decay_probe(const MetrizedLattice& lattice, double twist_degree, int m_max, double tol,
                               const VanishingOptions& options) {
  if (!(twist_degree > 0.0)) throw Error(ErrorCode::invalid_argument, "twist degree must be > 0");
  if (m_max < 1) throw Error(ErrorCode::invalid_argument, "m_max must be >= 1");
  if (!(tol > 0.0)) throw Error(ErrorCode::invalid_tolerance, "tolerance must be > 0");

  bool semistable = options.assume_semistable;
  if (!semistable) {
    try {
      semistable = is_semistable(lattice, kSlopeTieTolerance, options.stability);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::rank_cap_exceeded) throw;
    }
  }

  DecayProbe probe;
  probe.twist_degree = twist_degree;
  probe.steps.resize(static_cast<std::size_t>(m_max) + 1);
  const double d = lattice.field().degree();
  ThetaOptions theta{tol * 1e-3};
  theta.allow_dual_route = true;
  theta.cap = options.stability.cap;
  parallel_for(probe.steps.size(), [&](std::size_t m) {
    const MetrizedLattice twisted = scale(lattice, std::exp(-static_cast<double>(m) * twist_degree / d));
    ThetaOptions step_theta = theta;
    ThetaValue t;
    while (true) {
      try {
        t = h1(twisted, step_theta);
        break;
      } catch (const Error& e) {
        // large h1 at early steps cannot be resolved to the absolute target
        if (e.code() != ErrorCode::tolerance_unreachable || step_theta.tol > 1e-3) throw;
        step_theta.tol *= 10.0;
      }
    }
    DecayStep& step = probe.steps[m];
    step.m = static_cast<int>(m);
    step.degree = twisted.degree();
    step.h1 = t.h0;
    step.error = t.h0_error;
    if (semistable) {
      VanishingOptions assumed = options;
      assumed.assume_semistable = true;
      step.bound = effective_h1_bound(twisted, assumed);
    }
  });

  std::size_t from = probe.steps.size() - 1;
  while (from > 0) {
    const double prev = probe.steps[from - 1].h1, cur = probe.steps[from].h1;
    if (!(cur < prev || (cur == 0.0 && prev == 0.0))) break;
    --from;
  }
  probe.monotone_from = static_cast<int>(from);
  probe.final_h1 = probe.steps.back().h1;
  probe.reached_tolerance = probe.final_h1 + probe.steps.back().error < tol;
  return probe;
}

ExtremalEstimate extremal_values_estimate(const NumberField& field, int of_rank, double degree, int samples,
                                          std::uint64_t seed, const ExtremalOptions& options) {
  if (samples < 1) throw Error(ErrorCode::invalid_argument, "samples must be >= 1");
  ExtremalEstimate est;
  est.field = field;
  est.of_rank = of_rank;
  est.degree = degree;

  ThetaOptions theta{options.tol};
  theta.allow_dual_route = true;
  theta.cap = options.stability.cap;

  struct Draw {
    std::optional<MetrizedLattice> lattice;
    ModuliSample record;
  };
  const std::uint64_t attempt_limit = 1000ULL * static_cast<std::uint64_t>(samples);
  const std::size_t batch = std::max<std::size_t>(64, static_cast<std::size_t>(samples) / 4);
  std::uint64_t next_index = 0;
  while (est.sample_count < samples) {
    if (next_index >= attempt_limit)
      throw Error(ErrorCode::sampling_starved, "fewer than 0.1% of draws were semistable");
    const std::size_t count = static_cast<std::size_t>(std::min<std::uint64_t>(batch, attempt_limit - next_index));
    std::vector<Draw> draws(count);
    parallel_for(count, [&](std::size_t i) {
      const std::uint64_t index = next_index + i;
      MetrizedLattice lat = random_lattice(field, of_rank, degree, options.spread, derived_seed(seed, index));
      Draw& draw = draws[i];
      draw.record.index = index;
      draw.record.degree = lat.degree();
      draw.record.semistable = is_semistable(lat, kSlopeTieTolerance, options.stability);
      if (draw.record.semistable) draw.record.h0 = h0(lat, theta).h0;
      draw.lattice = std::move(lat);
    });
    for (Draw& draw : draws) {
      if (est.sample_count == samples) break;
      est.attempts.push_back(draw.record);
      if (!draw.record.semistable) continue;
      est.accepted.push_back(std::move(*draw.lattice));
      est.accepted_h0.push_back(*draw.record.h0);
      ++est.sample_count;
    }
    next_index += count;
  }
  const auto [lo, hi] = std::minmax_element(est.accepted_h0.begin(), est.accepted_h0.end());
  est.min_h0 = *lo;
  est.max_h0 = *hi;
  est.spread_h0 = est.max_h0 - est.min_h0;
  return est;
}

DualityResidual extremal_duality_residual(const ExtremalEstimate& estimate, double tol) {
  if (estimate.accepted.empty()) throw Error(ErrorCode::invalid_argument, "estimate has no stored samples");
  ThetaOptions theta{tol};
  theta.allow_dual_route = true;
  const std::size_t count = estimate.accepted.size();
  std::vector<double> mapped(count), samplewise(count);
  const double half_n_log_disc = 0.5 * estimate.of_rank * estimate.field.log_disc();
  parallel_for(count, [&](std::size_t i) {
    const MetrizedLattice& lat = estimate.accepted[i];
    mapped[i] = h0(omega_twist(lat), theta).h0;
    samplewise[i] = std::abs(mapped[i] - estimate.accepted_h0[i] + lat.degree() - half_n_log_disc);
  });
  const double shift = half_n_log_disc - estimate.degree;
  const auto [lo, hi] = std::minmax_element(mapped.begin(), mapped.end());
  DualityResidual out;
  out.max_residual = std::abs(*hi - estimate.max_h0 - shift);
  out.min_residual = std::abs(*lo - estimate.min_h0 - shift);
  out.worst_samplewise = *std::max_element(samplewise.begin(), samplewise.end());
  return out;
}

}  // namespace arcoh
