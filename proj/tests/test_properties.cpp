#include "doctest.h"

#include "arcoh/parallel.hpp"
#include "arcoh/stability.hpp"
#include "arcoh/theta.hpp"
#include "arcoh/vanishing.hpp"

#include <cmath>
#include <random>

using namespace arcoh;

namespace {

const NumberField& field_for(std::uint64_t i) {
  static const NumberField fields[] = {NumberField::rationals(), NumberField::quadratic(-1), NumberField::quadratic(5),
                                       NumberField::quadratic(2), NumberField::quadratic(-3)};
  return fields[i % 5];
}

// Random lattice with Z-rank <= 6.
MetrizedLattice draw(std::uint64_t i) {
  const NumberField& f = field_for(i);
  const int max_n = 6 / f.degree();
  const int n = 1 + static_cast<int>((i / 5) % static_cast<std::uint64_t>(max_n));
  const double d = 0.25 * (static_cast<double>(i % 9) - 4.0);
  return random_lattice(f, n, d, 0.4, derived_seed(77, i));
}

}  // namespace

TEST_CASE("degree is additive under direct sums") {
  for (std::uint64_t i = 0; i < 30; ++i) {
    const MetrizedLattice a = draw(i), b = draw(i + 5);
    if (a.z_rank() + b.z_rank() > 8) continue;
    CHECK(degree(direct_sum(a, b)) == doctest::Approx(degree(a) + degree(b)).epsilon(1e-10));
  }
}

TEST_CASE("scaling shifts the degree") {
  for (std::uint64_t i = 0; i < 30; ++i) {
    const MetrizedLattice l = draw(i);
    const double c = 0.5 + 0.1 * static_cast<double>(i % 11);
    CHECK(std::abs(degree(scale(l, c)) - (degree(l) - l.z_rank() * std::log(c))) < 1e-10);
  }
}

TEST_CASE("dual covolumes are reciprocal") {
  for (std::uint64_t i = 0; i < 30; ++i) {
    const MetrizedLattice l = draw(i);
    CHECK(std::abs(l.covolume() * dual_lattice(l).covolume() - 1.0) < 1e-10);
  }
}

TEST_CASE("canonical twist reflects the degree") {
  for (std::uint64_t i = 0; i < 30; ++i) {
    const MetrizedLattice l = draw(i);
    const double expected = l.of_rank() * l.field().log_disc();
    CHECK(std::abs(degree(omega_twist(l)) + degree(l) - expected) < 1e-10);
  }
}

TEST_CASE("restriction of scalars preserves chi") {
  for (std::uint64_t i = 0; i < 30; ++i) {
    const MetrizedLattice l = draw(i);
    CHECK(chi(restrict_scalars(l)) == chi(l));
  }
}

TEST_CASE("Poisson identity") {
  for (std::uint64_t i = 0; i < 60; ++i) {
    const MetrizedLattice l = draw(i);
    const ThetaValue a = h0(l, 1e-12), b = h0(dual_lattice(l), 1e-12);
    const double slack = l.covolume() * (a.tail_bound + a.rounding_bound) + b.tail_bound + b.rounding_bound;
    CHECK(std::abs(a.value * l.covolume() - b.value) <= slack + 1e-15 * b.value);
  }
}

TEST_CASE("Riemann-Roch residual vanishes") {
  for (std::uint64_t i = 0; i < 200; ++i) {
    CAPTURE(i);
    const Estimate r = rr_residual(draw(i), 1e-12);
    CHECK(std::abs(r.value) <= r.error + 1e-12);
    CHECK(std::abs(r.value) < 1e-9);
  }
}

TEST_CASE("h0 - h1 - deg depends only on the field and rank") {
  for (std::uint64_t f = 0; f < 5; ++f) {
    const NumberField& field = field_for(f);
    const double expected = -0.5 * field.log_disc();
    for (std::uint64_t k = 0; k < 8; ++k) {
      const MetrizedLattice l = random_lattice(field, 1, 0.3 * static_cast<double>(k) - 1.0, 0.8, derived_seed(f, k));
      CHECK(std::abs(h0(l, 1e-12).h0 - h1(l, 1e-12).h0 - degree(l) - expected) < 1e-9);
    }
  }
}

TEST_CASE("superlattices have larger counts") {
  const NumberField q = NumberField::rationals();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 4;
    Eigen::MatrixXd b = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) b(i, j) += u(rng);
    Eigen::MatrixXd sub = b;
    sub.row(trial % n) *= 2.0 + trial % 2;
    if (n > 1) sub.row((trial + 1) % n) += b.row(trial % n);
    const ThetaValue big = h0(from_basis(q, n, b), 1e-12);
    const ThetaValue small = h0(from_basis(q, n, sub), 1e-12);
    CHECK(big.value >= small.value - big.tail_bound - small.tail_bound);
  }
}

TEST_CASE("theta values do not depend on the worker count") {
  std::vector<double> serial, threaded;
  set_thread_count(1);
  for (std::uint64_t i = 0; i < 20; ++i) serial.push_back(h0(draw(i), 1e-12).value);
  set_thread_count(4);
  for (std::uint64_t i = 0; i < 20; ++i) threaded.push_back(h0(draw(i), 1e-12).value);
  set_thread_count(0);
  CHECK(serial == threaded);
}

TEST_CASE("polygons are concave with exact endpoints") {
  for (std::uint64_t i = 0; i < 40; ++i) {
    const MetrizedLattice l = draw(i);
    if (l.z_rank() > 4) continue;
    const HNPolygon p = hn_filtration(l);
    CHECK(p.vertices.front() == std::pair<int, double>{0, 0.0});
    CHECK(p.rank() == l.of_rank());
    CHECK(std::abs(p.degree() - l.degree()) < 1e-9);
    for (std::size_t k = 1; k < p.slopes.size(); ++k) CHECK(p.slopes[k] < p.slopes[k - 1] - 1e-9);
    const HNPolygon flat{{{0, 0.0}, {p.rank(), p.degree()}}, {p.degree() / p.rank()}, p.base_field};
    CHECK(polygon_leq(flat, p));
    CHECK(is_semistable(l) == (p.slopes.size() == 1));
  }
}

TEST_CASE("samplewise duality identity on semistable lattices") {
  for (std::uint64_t i = 0; i < 40; ++i) {
    const MetrizedLattice l = draw(i);
    if (l.z_rank() > 4 || !is_semistable(l)) continue;
    const double expected = h0(l, 1e-12).h0 - l.degree() + 0.5 * l.of_rank() * l.field().log_disc();
    CHECK(std::abs(h0(omega_twist(l), 1e-12).h0 - expected) < 1e-8);
  }
}
