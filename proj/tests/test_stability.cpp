#include "doctest.h"
#include "oracles.hpp"

#include "arcoh/error.hpp"
#include "arcoh/stability.hpp"

#include <cmath>
#include <random>

using namespace arcoh;

namespace {

const NumberField kQ = NumberField::rationals();
const NumberField kGauss = NumberField::quadratic(-1);
const NumberField kGolden = NumberField::quadratic(5);

MetrizedLattice diag(std::initializer_list<double> entries) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (double e : entries) v[i++] = e;
  return from_basis(kQ, static_cast<int>(v.size()), v.asDiagonal().toDenseMatrix());
}

HNPolygon polygon(std::vector<std::pair<int, double>> vertices) {
  HNPolygon p;
  p.vertices = std::move(vertices);
  for (std::size_t i = 1; i < p.vertices.size(); ++i)
    p.slopes.push_back((p.vertices[i].second - p.vertices[i - 1].second) /
                       (p.vertices[i].first - p.vertices[i - 1].first));
  return p;
}

void check_vertices(const HNPolygon& got, const std::vector<std::pair<int, double>>& expected, double tol = 1e-9) {
  REQUIRE(got.vertices.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(got.vertices[i].first == expected[i].first);
    CHECK(std::abs(got.vertices[i].second - expected[i].second) <= tol);
  }
}

IntMatrix random_integer_basis(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> entry(-3, 3);
  while (true) {
    IntMatrix b(n, n);
    std::vector<std::vector<long long>> rows(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        b(i, j) = entry(rng);
        rows[static_cast<std::size_t>(i)].push_back(b(i, j));
      }
    if (oracle::integer_rank(rows) == n) return b;
  }
}

void check_polygon_invariants(const HNPolygon& p, const MetrizedLattice& l) {
  REQUIRE(!p.vertices.empty());
  CHECK(p.vertices.front().first == 0);
  CHECK(p.vertices.front().second == 0.0);
  CHECK(std::abs(p.degree() - l.degree()) <= 1e-9);
  for (std::size_t i = 1; i < p.slopes.size(); ++i) CHECK(p.slopes[i] < p.slopes[i - 1] - 1e-9);
}

}  // namespace

TEST_CASE("slopes") {
  CHECK(slope(standard_lattice(kQ, 2)) == doctest::Approx(0.0));
  CHECK(std::abs(slope(standard_lattice(kGauss, 1))) < 1e-12);
  IntMatrix second(1, 2);
  second << 0, 1;
  CHECK(slope(saturate_sublattice(diag({2.0, 0.5}), second)) == doctest::Approx(std::log(2.0)));
  SublatticeHandle empty = saturate_sublattice(diag({2.0, 0.5}), second);
  empty.saturated_rank = 0;
  CHECK_THROWS_AS(slope(empty), Error);
}

TEST_CASE("maximal destabilizing sublattices") {
  const SublatticeHandle whole = max_slope_sublattice(standard_lattice(kQ, 2));
  CHECK(whole.saturated_rank == 2);
  CHECK(std::abs(whole.slope) < 1e-12);

  const SublatticeHandle d = max_slope_sublattice(diag({2.0, 0.5}));
  CHECK(d.saturated_rank == 1);
  CHECK(d.slope == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(d.generators(0, 0) == 0);
  CHECK(d.generators(0, 1) == 1);

  const SublatticeHandle three = max_slope_sublattice(diag({0.5, 1.0, 2.0}));
  CHECK(three.saturated_rank == 1);
  CHECK(three.slope == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("semistability verdicts") {
  for (int n = 1; n <= 4; ++n) CHECK(is_semistable(standard_lattice(kQ, n)));
  CHECK(!is_semistable(diag({2.0, 0.5})));
  Eigen::MatrixXd hex(2, 2);
  hex << 1.0, 0.0, 0.5, std::sqrt(3.0) / 2.0;
  const MetrizedLattice h = from_basis(kQ, 2, hex);
  CHECK(is_semistable(scale(h, std::exp(-0.5 * h.log_covolume()))));
  CHECK(is_semistable(standard_lattice(kGauss, 2)));
}

TEST_CASE("Harder-Narasimhan polygons") {
  check_vertices(hn_filtration(standard_lattice(kQ, 2)), {{0, 0.0}, {2, 0.0}});
  check_vertices(hn_filtration(diag({2.0, 0.5})), {{0, 0.0}, {1, std::log(2.0)}, {2, 0.0}});
  check_vertices(hn_filtration(diag({0.25, 1.0, 4.0})), {{0, 0.0}, {1, std::log(4.0)}, {2, std::log(4.0)}, {3, 0.0}});
}

TEST_CASE("canonical polygons over Q") {
  check_vertices(canonical_polygon_over_Q(standard_lattice(kQ, 3)), {{0, 0.0}, {3, 0.0}});
  for (const NumberField& f : {kGauss, kGolden}) {
    const MetrizedLattice l = standard_lattice(f, 1);
    const HNPolygon p = canonical_polygon_over_Q(l);
    CHECK(p.base_field == FieldSpec::rational());
    CHECK(p.rank() == 2);
    const auto expected = oracle::hn_polygon(restrict_scalars(l).basis());
    check_vertices(p, expected);
  }
  CHECK(canonical_polygon_over_Q(standard_lattice(kGauss, 1)).degree() == doctest::Approx(-std::log(2.0)));
  CHECK(canonical_polygon_over_Q(standard_lattice(kGolden, 1)).degree() == doctest::Approx(-0.5 * std::log(5.0)));
}

TEST_CASE("polygon comparison") {
  const HNPolygon d = hn_filtration(diag({2.0, 0.5}));
  const HNPolygon flat = polygon({{0, 0.0}, {2, 0.0}});
  CHECK(polygon_leq(d, d));
  CHECK(polygon_leq(flat, d));
  CHECK(!polygon_leq(d, flat));
  CHECK_THROWS_AS(polygon_leq(flat, polygon({{0, 0.0}, {2, 1.0}})), Error);
  try {
    polygon_leq(flat, polygon({{0, 0.0}, {3, 0.0}}));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::endpoint_mismatch);
  }
  CHECK(d.height_at(0.5) == doctest::Approx(0.5 * std::log(2.0)));
  CHECK(d.height_at(1.5) == doctest::Approx(0.5 * std::log(2.0)));
}

TEST_CASE("hn filtration agrees with the exhaustive oracle") {
  std::mt19937_64 rng(2024);
  StabilityOptions wide;
  wide.margin = 2.0;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 3;
    const IntMatrix b = random_integer_basis(rng, n);
    const MetrizedLattice l = integer_lattice(b);
    const HNPolygon p = hn_filtration(l);
    check_polygon_invariants(p, l);
    check_vertices(p, oracle::hn_polygon(b.cast<double>()));
    check_vertices(hn_filtration(l, wide), p.vertices, 1e-12);
  }
}

TEST_CASE("twisting shifts slopes") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 6; ++trial) {
    const MetrizedLattice l = integer_lattice(random_integer_basis(rng, 3));
    const double c = 0.7;
    const HNPolygon p = hn_filtration(l);
    const HNPolygon q = hn_filtration(scale(l, c));
    REQUIRE(p.slopes.size() == q.slopes.size());
    for (std::size_t i = 0; i < p.slopes.size(); ++i)
      CHECK(q.slopes[i] == doctest::Approx(p.slopes[i] - std::log(c)).epsilon(1e-10));
  }
}

TEST_CASE("semistability is preserved by the canonical twist") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const NumberField& f = seed % 3 == 0 ? kQ : (seed % 3 == 1 ? kGauss : kGolden);
    const MetrizedLattice l = random_lattice(f, 2, 0.0, 0.5, seed);
    CHECK(is_semistable(l) == is_semistable(omega_twist(l)));
  }
}

TEST_CASE("rank cap") {
  StabilityOptions small;
  small.max_z_rank = 2;
  CHECK_THROWS_AS(hn_filtration(standard_lattice(kQ, 3), small), Error);
}
