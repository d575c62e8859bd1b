#include "arcoh/stability.hpp"

#include "arcoh/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace arcoh {

namespace {

using HnfKey = std::vector<long long>;

HnfKey key_of(const IntMatrix& m) {
  HnfKey key;
  key.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) key.push_back(m(i, j));
  return key;
}

double log_covolume_of(const MetrizedLattice& lattice, const IntMatrix& rows) {
  const Eigen::MatrixXd c = rows.cast<double>();
  const Eigen::MatrixXd gram = c * lattice.counting_form() * c.transpose();
  return 0.5 * Eigen::LDLT<Eigen::MatrixXd>(gram).vectorD().array().log().sum();
}

IntMatrix closure(const MetrizedLattice& lattice, const IntMatrix& rows) {
  if (lattice.field().degree() == 1) return rows;
  IntMatrix out(rows.rows() * 2, rows.cols());
  out << rows, rows * lattice.of_action();
  return out;
}

double shortest_norm(const MetrizedLattice& lattice, long long cap) {
  const LllResult lll = lll_reduce(lattice.basis());
  const double first = lll.basis.row(0).squaredNorm();
  const auto vecs = short_vectors(lattice, first * (1.0 + 1e-9), cap);
  double best = first;
  for (const auto& v : vecs) best = std::min(best, v.norm);
  return std::sqrt(best);
}

// Saturated O_F-sublattices of O_F-rank k with log covolume <= log_vmax, keyed
// by Hermite form.  Completeness: the O_F-span of k independent vectors picked
// greedily from the successive minima of such a sublattice has norm product
// <= gamma_K^{K/2} covol / lambda_1^{K-k}, K = k d.
std::map<HnfKey, IntMatrix> low_covolume_sublattices(const MetrizedLattice& lattice, int k, double log_vmax,
                                                     const StabilityOptions& options) {
  std::map<HnfKey, IntMatrix> found;
  const int d = lattice.field().degree();
  const int big_k = k * d;
  const double log_lambda1 = std::log(shortest_norm(lattice, options.cap));
  const double log_product = std::log(options.margin) + 0.5 * big_k * std::log(hermite_constant(big_k)) + log_vmax -
                             (big_k - k) * log_lambda1;
  const double log_radius = log_product - (k - 1) * log_lambda1;
  if (log_radius < log_lambda1 - 1e-12) return found;

  std::vector<ShortVector> vecs = short_vectors(lattice, std::exp(2.0 * log_radius) * (1.0 + 1e-9), options.cap);
  std::stable_sort(vecs.begin(), vecs.end(),
                   [](const ShortVector& a, const ShortVector& b) { return a.norm < b.norm; });
  std::vector<double> log_norms(vecs.size());
  for (std::size_t i = 0; i < vecs.size(); ++i) log_norms[i] = 0.5 * std::log(vecs[i].norm);

  const double slack = 1e-9;
  const double accept = log_vmax + k * kSlopeTieTolerance + 1e-12;
  const Eigen::Index n_cols = lattice.z_rank();
  long long tuples = 0;

  std::vector<std::size_t> chosen;
  const auto recurse = [&](auto&& self, std::size_t start, double log_prod, const IntMatrix& acc) -> void {
    const int depth = static_cast<int>(chosen.size());
    if (depth == k) {
      const IntMatrix sat = saturate(acc);
      HnfKey key = key_of(sat);
      if (found.count(key)) return;
      if (log_covolume_of(lattice, sat) <= accept) found.emplace(std::move(key), sat);
      return;
    }
    const int remaining = k - depth;
    for (std::size_t i = start; i < vecs.size(); ++i) {
      if (log_prod + remaining * log_norms[i] > log_product + slack) break;
      if (++tuples > options.cap)
        throw Error(ErrorCode::enumeration_too_large, "destabilizer search exceeded its tuple budget");
      IntMatrix next(acc.rows() + 1, n_cols);
      next << acc, vecs[i].coords;
      const IntMatrix closed = closure(lattice, next);
      if (integer_rank(closed) != (depth + 1) * d) continue;
      chosen.push_back(i);
      self(self, i + 1, log_prod + log_norms[i], closed);
      chosen.pop_back();
    }
  };
  recurse(recurse, 0, 0.0, IntMatrix(0, n_cols));
  return found;
}

// Integer kernel {a : rows * a^T = 0}, as a saturated row basis.
IntMatrix annihilator(const IntMatrix& rows) {
  const ColumnReduction cr = column_reduce(rows);
  const Eigen::Index n = rows.cols();
  return row_hermite_form(cr.unimodular.rightCols(n - cr.rank).transpose());
}

bool better(const SublatticeHandle& a, const SublatticeHandle& b) {
  if (a.slope > b.slope + kSlopeTieTolerance) return true;
  if (b.slope > a.slope + kSlopeTieTolerance) return false;
  if (a.saturated_rank != b.saturated_rank) return a.saturated_rank > b.saturated_rank;
  return lexicographically_less(a.generators, b.generators);
}

void require_options(const MetrizedLattice& lattice, const StabilityOptions& options) {
  if (!(options.margin >= 1.0)) throw Error(ErrorCode::invalid_argument, "search margin must be >= 1");
  if (lattice.z_rank() > options.max_z_rank)
    throw Error(ErrorCode::rank_cap_exceeded, "Z-rank " + std::to_string(lattice.z_rank()) +
                                                  " exceeds the configured cap " +
                                                  std::to_string(options.max_z_rank));
}

}  // namespace

double HNPolygon::height_at(double x) const {
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    const auto [r0, d0] = vertices[i - 1];
    const auto [r1, d1] = vertices[i];
    if (x <= r1 + 1e-12) return d0 + (d1 - d0) * (x - r0) / (r1 - r0);
  }
  return vertices.back().second;
}

double slope(const MetrizedLattice& lattice) { return lattice.degree() / lattice.of_rank(); }

double slope(const SublatticeHandle& handle) {
  if (handle.saturated_rank == 0) throw Error(ErrorCode::zero_rank, "slope of a zero-rank sublattice");
  return handle.degree / handle.base_rank();
}

double hermite_constant(int k) {
  static constexpr double table[] = {1.0,
                                     1.0,
                                     1.1547005383792515,   // (4/3)^(1/2)
                                     1.2599210498948732,   // 2^(1/3)
                                     1.4142135623730951,   // 2^(1/2)
                                     1.5157165665103982,   // 8^(1/5)
                                     1.6653663553112185,   // (64/3)^(1/6)
                                     1.8114473285278132,   // 64^(1/7)
                                     2.0};
  if (k < 1) throw Error(ErrorCode::invalid_rank, "Hermite constant of rank < 1");
  if (k <= 8) return table[k];
  return 1.0 + k / 4.0;
}

SublatticeHandle max_slope_sublattice(const MetrizedLattice& lattice, const StabilityOptions& options) {
  require_options(lattice, options);
  const int n = lattice.of_rank();
  const int N = lattice.z_rank();
  SublatticeHandle best = saturate_sublattice(lattice, IntMatrix::Identity(N, N));
  if (n == 1) return best;

  const double mu = slope(lattice);
  const double half_log_disc = 0.5 * lattice.field().log_disc();
  std::map<HnfKey, IntMatrix> candidates;
  for (int k = 1; k < n; ++k) {
    // slope(L') >= mu  <=>  log covol(L') <= k (log|disc|/2 - mu)
    const double log_vmax = k * (half_log_disc - mu);
    if (2 * k <= n) {
      candidates.merge(low_covolume_sublattices(lattice, k, log_vmax, options));
    } else {
      // L' <-> its annihilator in the dual, of rank n - k and covolume covol(L') / covol(L).
      const MetrizedLattice dual = dual_lattice(lattice);
      const auto found = low_covolume_sublattices(dual, n - k, log_vmax - lattice.log_covolume(), options);
      for (const auto& [key, rows] : found) {
        IntMatrix ann = annihilator(rows);
        candidates.emplace(key_of(ann), std::move(ann));
      }
    }
  }
  for (const auto& [key, rows] : candidates) {
    SublatticeHandle h = saturate_sublattice(lattice, rows);
    if (better(h, best)) best = std::move(h);
  }
  return best;
}

bool is_semistable(const MetrizedLattice& lattice, double tol, const StabilityOptions& options) {
  if (!(tol > 0.0)) throw Error(ErrorCode::invalid_tolerance, "tolerance must be > 0");
  return max_slope_sublattice(lattice, options).slope <= slope(lattice) + tol;
}

HNPolygon hn_filtration(const MetrizedLattice& lattice, const StabilityOptions& options) {
  require_options(lattice, options);
  HNPolygon poly;
  poly.base_field = lattice.field().spec();
  poly.vertices.emplace_back(0, 0.0);
  const int d = lattice.field().degree();

  MetrizedLattice current = lattice;
  int rank = 0;
  double deg = 0.0;
  while (true) {
    const SublatticeHandle h = max_slope_sublattice(current, options);
    const int step_rank = h.saturated_rank / d;
    const double step_slope = h.degree / step_rank;
    rank += step_rank;
    deg += h.degree;
    if (!poly.slopes.empty() && step_slope >= poly.slopes.back() - kSlopeTieTolerance) {
      poly.vertices.pop_back();
      poly.slopes.pop_back();
    }
    const auto [r0, d0] = poly.vertices.back();
    poly.vertices.emplace_back(rank, deg);
    poly.slopes.push_back((deg - d0) / (rank - r0));
    if (step_rank == current.of_rank()) break;
    current = quotient_lattice(h);
  }
  // The last vertex carries the exact degree of the whole lattice.
  poly.vertices.back().second = lattice.degree();
  const auto [r0, d0] = poly.vertices[poly.vertices.size() - 2];
  poly.slopes.back() = (lattice.degree() - d0) / (poly.vertices.back().first - r0);
  return poly;
}

HNPolygon canonical_polygon_over_Q(const MetrizedLattice& lattice, const StabilityOptions& options) {
  return hn_filtration(restrict_scalars(lattice), options);
}

bool polygon_leq(const HNPolygon& p, const HNPolygon& g) {
  if (p.rank() != g.rank() || std::abs(p.degree() - g.degree()) > 1e-9)
    throw Error(ErrorCode::endpoint_mismatch, "polygons have different endpoints");
  for (int x = 0; x <= p.rank(); ++x)
    if (p.height_at(x) > g.height_at(x) + 1e-9) return false;
  return true;
}

}  // namespace arcoh
