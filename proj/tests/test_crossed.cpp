#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "xprod/crossed.hpp"
#include "xprod/scenarios.hpp"

using namespace xprod;

namespace {

SpacePtr disk3() { return PeriodicSpace::create(disk_rotation(3, 6, 3)); }
SpacePtr circle16() { return PeriodicSpace::create(circle_conjugation(16)); }

double max_dev(const std::vector<ScalarField>& a, const std::vector<ScalarField>& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j)
    for (std::size_t x = 0; x < a[j].size(); ++x) d = std::max(d, std::abs(a[j][x] - b[j][x]));
  return d;
}

}  // namespace

TEST_CASE("twisted circulant realization and product follow the convolution formula") {
  std::mt19937_64 rng(1);
  for (SpacePtr sp : {circle16(), disk3(), PeriodicSpace::create(disk_rotation(2, 10, 5))}) {
    const auto& s = sp->system();
    auto a = random_element(sp, rng);
    auto b = random_element(sp, rng);
    for (PointId x = 0; x < sp->size(); ++x) {
      CMatrix m = a.matrix_at(x);
      for (int k = 0; k < sp->period(); ++k)
        for (int j = 0; j < sp->period(); ++j) CHECK(m(k, j) == oracle::circulant_entry(s, a.components(), x, k, j));
    }
    auto ab = multiply(a, b);
    CHECK(max_dev(ab.components(), oracle::convolve(s, a.components(), b.components())) <= 1e-12);
    CHECK(closure_defect(a, b) <= 1e-12);
  }
}

TEST_CASE("adjoint is the pointwise conjugate transpose") {
  std::mt19937_64 rng(2);
  auto sp = disk3();
  auto a = random_element(sp, rng);
  auto as = adjoint(a);
  for (PointId x = 0; x < sp->size(); ++x) CHECK((as.matrix_at(x) - a.matrix_at(x).adjoint()).norm() <= 1e-14);
  CHECK(distance(adjoint(as), a) == 0.0);
}

TEST_CASE("identity and unit laws") {
  std::mt19937_64 rng(3);
  auto sp = circle16();
  auto a = random_element(sp, rng);
  auto one = CrossedElement::identity(sp);
  CHECK(distance(multiply(one, a), a) <= 1e-14);
  CHECK(distance(multiply(a, one), a) <= 1e-14);
  CHECK(distance(multiply(a, CrossedElement::zero(sp)), CrossedElement::zero(sp)) == 0.0);
  for (PointId x = 0; x < sp->size(); ++x) CHECK(one.matrix_at(x) == CMatrix::Identity(2, 2));
}

TEST_CASE("boundary map slots match the weighted sums") {
  std::mt19937_64 rng(4);
  for (SpacePtr sp : {circle16(), disk3()}) {
    auto a = random_element(sp, rng);
    auto t = pi_boundary(a);
    CHECK(t.fixed_ids == sp->fixed_ids());
    for (int s = 0; s < sp->period(); ++s)
      for (std::size_t i = 0; i < t.fixed_ids.size(); ++i)
        CHECK(std::abs(t.slots[s][i] - oracle::boundary_slot(a.components(), t.fixed_ids[i], s)) <= 1e-13);
  }
}

TEST_CASE("p = 2: boundary slots are the eigenvalues a - b and a + b of the circulant") {
  std::mt19937_64 rng(5);
  auto sp = circle16();
  auto a = random_element(sp, rng);
  auto t = pi_boundary(a);
  for (std::size_t i = 0; i < t.fixed_ids.size(); ++i) {
    PointId x = t.fixed_ids[i];
    auto [plus, minus] = oracle::circulant2_eigenvalues(a.component(0)[x], a.component(1)[x]);
    CHECK(std::abs(t.slots[0][i] - minus) <= 1e-14);
    CHECK(std::abs(t.slots[1][i] - plus) <= 1e-14);
  }
}

TEST_CASE("boundary map is a *-homomorphism that kills the ideal") {
  std::mt19937_64 rng(6);
  for (SpacePtr sp : {circle16(), disk3()}) {
    for (int trial = 0; trial < 10; ++trial) {
      auto a = random_element(sp, rng);
      auto b = random_element(sp, rng);
      CHECK(tuple_distance(pi_boundary(multiply(a, b)), pointwise_product(pi_boundary(a), pi_boundary(b))) <= 1e-12);
      auto pa = pi_boundary(a);
      auto pas = pi_boundary(adjoint(a));
      for (std::size_t s = 0; s < pa.slots.size(); ++s)
        for (std::size_t i = 0; i < pa.fixed_ids.size(); ++i)
          CHECK(std::abs(pas.slots[s][i] - std::conj(pa.slots[s][i])) <= 1e-12);
      auto c = random_ideal_element(sp, rng);
      CHECK(vanishes_on_fixed(c, 0.0));
      CHECK(tuple_norm(pi_boundary(c)) == 0.0);
      CHECK(tuple_norm(pi_boundary(multiply(a, c))) <= 1e-12);
    }
  }
}

TEST_CASE("orbit intertwiners relate the realizations along an orbit") {
  std::mt19937_64 rng(7);
  auto sp = disk3();
  auto a = random_element(sp, rng);
  for (ClassId q : sp->free_classes()) {
    PointId x = sp->representative(q);
    for (int j = 0; j < 3; ++j) {
      CMatrix u = orbit_intertwiner(*sp, x, j);
      CHECK(is_unitary(u, 1e-14));
      CHECK((a.matrix_at(x) - u * a.matrix_at(sp->theta(x, j)) * u.adjoint()).norm() <= 1e-12);
    }
  }
  try {
    orbit_intertwiner(*sp, 0, 1);
    FAIL("expected FixedPointGiven");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FixedPointGiven);
  }
}

TEST_CASE("pure states at fixed points") {
  std::mt19937_64 rng(8);
  auto sp = disk3();
  CMatrix omega = fourier_unitary(3);
  auto a = random_element(sp, rng);
  auto b = random_element(sp, rng);
  const PointId x0 = 0;
  CMatrix diag = omega * a.matrix_at(x0) * omega.adjoint();
  for (int k = 0; k < 3; ++k) {
    Complex expect = 0.0;
    for (int j = 0; j < 3; ++j) expect += oracle::omega(3, j * k) * a.component(j)[x0];
    CHECK(std::abs(pure_state(a, x0, k) - expect) <= 1e-13);
    CHECK(std::abs(pure_state(multiply(a, b), x0, k) - pure_state(a, x0, k) * pure_state(b, x0, k)) <= 1e-12);
    CHECK(std::abs(diag(2 - k, 2 - k) - pure_state(a, x0, k)) <= 1e-12);
  }
  CHECK(off_diagonal_norm(diag) <= 1e-12);
  CHECK(std::abs(pure_state(CrossedElement::identity(sp), x0, 1) - 1.0) <= 1e-15);
  try {
    pure_state(a, 1, 0);
    FAIL("expected NotFixedPoint");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotFixedPoint);
  }
}

TEST_CASE("ideal elements realize every matrix unit at a free point") {
  for (SpacePtr sp : {circle16(), disk3()}) {
    PointId x = sp->representative(sp->free_classes().front());
    auto r = evaluation_span_check(sp, x);
    const int p = sp->period();
    CHECK(r.units == p * p);
    CHECK(r.rank == p * p);
    CHECK(r.max_residual <= 1e-10);
    CHECK(r.max_fixed_leak == 0.0);
    auto w = span_witness(sp, x, matrix_unit(p, 0, p - 1));
    CHECK(vanishes_on_fixed(w, 0.0));
    CHECK((w.matrix_at(x) - matrix_unit(p, 0, p - 1)).norm() <= 1e-10);
  }
  CHECK_THROWS_AS(evaluation_span_check(circle16(), 0), Error);
}

TEST_CASE("essential ideal: nonzero elements do not annihilate the ideal") {
  std::mt19937_64 rng(9);
  auto sp = circle16();
  auto a = random_element(sp, rng);
  auto r = essential_ideal_check(sp, a, 10, rng);
  CHECK(r.essential_ok);
  CHECK_FALSE(r.annihilates);
  CHECK(r.witness_point.has_value());

  auto zero = essential_ideal_check(sp, CrossedElement::zero(sp), 5, rng);
  CHECK(zero.annihilates);
  CHECK(zero.element_zero);
  CHECK(zero.essential_ok);

  // Supported only at fixed points that have free neighbours.
  ScalarField f(sp->size(), 0.0);
  f[0] = 1.0;
  auto spike = essential_ideal_check(sp, CrossedElement::single(sp, 0, f), 5, rng);
  CHECK(spike.annihilates);
  CHECK(spike.discontinuous_annihilator);
  CHECK(spike.essential_ok);
}

TEST_CASE("essential ideal fails when a fixed point is isolated from the free part") {
  std::mt19937_64 rng(10);
  auto s = circle_conjugation(8);
  s.points.push_back({8, {2.0, 0.0}});
  s.theta.push_back(8);
  s.edges.push_back({0, 8});
  auto sp = PeriodicSpace::create(s);
  ScalarField f(sp->size(), 0.0);
  f[8] = 1.0;
  auto a = CrossedElement::single(sp, 0, f);
  auto r = essential_ideal_check(sp, a, 5, rng);
  CHECK_FALSE(r.density_ok);
  CHECK(r.annihilates);
  CHECK_FALSE(r.essential_ok);
  CHECK(r.isolated_support == std::vector<PointId>{8});
  try {
    essential_ideal_check(sp, a, 5, rng, 1e-9, true);
    FAIL("expected DensityViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DensityViolation);
  }
}

TEST_CASE("elements over different systems do not mix") {
  std::mt19937_64 rng(11);
  auto a = random_element(circle16(), rng);
  auto b = random_element(circle16(), rng);
  try {
    multiply(a, b);
    FAIL("expected BaseMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BaseMismatch);
  }
  CHECK_THROWS_AS(CrossedElement(a.space(), {ScalarField(16, 0.0)}), Error);
}
