#include <doctest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "xprod/classify.hpp"
#include "xprod/scenarios.hpp"

using namespace xprod;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::MalformedInput;
}

bool close(Complex a, Complex b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

Complex unit(double angle) { return std::polar(1.0, angle); }

}  // namespace

TEST_CASE("generated systems: sizes, fixed sets and orbit counts") {
  auto circle = PeriodicSpace::create(circle_conjugation(12));
  CHECK(circle->size() == 12);
  CHECK(circle->fixed_ids() == std::vector<PointId>{0, 6});
  CHECK(circle->class_count() == 7);

  auto torus = PeriodicSpace::create(torus_swap(7));
  CHECK(torus->size() == 49);
  CHECK(torus->fixed_ids().size() == 7);
  for (PointId x : torus->fixed_ids()) CHECK(x / 7 == x % 7);
  CHECK(torus->class_count() == 7 + 21);

  auto cyl = PeriodicSpace::create(cylinder_reflection(5, 6));
  CHECK(cyl->size() == 30);
  CHECK(cyl->fixed_ids().size() == 6);
  for (PointId x : cyl->fixed_ids()) CHECK(cyl->system().points[x].coords[0] == doctest::Approx(1.0));
  CHECK(cyl->class_count() == 6 + 2 * 6);

  auto disk = PeriodicSpace::create(disk_rotation(4, 10, 5));
  CHECK(disk->size() == 41);
  CHECK(disk->fixed_ids() == std::vector<PointId>{0});
  CHECK(disk->class_count() == 1 + 8);
}

TEST_CASE("generated systems are valid and pass the density diagnostic") {
  for (auto s : {circle_conjugation(64), torus_swap(8), cylinder_reflection(33, 16), disk_rotation(8, 9, 3),
                 disk_rotation(3, 14, 7), disk_rotation(2, 4, 2)}) {
    auto r = validate(s);
    CHECK(r.ok());
    CHECK(r.density_ok);
    CHECK(oracle::orbit_sets(s).size() == PeriodicSpace::create(s)->class_count());
  }
}

TEST_CASE("generator parameter errors") {
  CHECK(code_of([] { circle_conjugation(9); }) == ErrorCode::OddResolution);
  CHECK(code_of([] { circle_conjugation(2); }) == ErrorCode::InvalidParams);
  CHECK(code_of([] { cylinder_reflection(4, 8); }) == ErrorCode::EvenTResolution);
  CHECK(code_of([] { disk_rotation(3, 10, 3); }) == ErrorCode::IndivisibleAngles);
  CHECK(code_of([] { disk_rotation(3, 12, 4); }) == ErrorCode::NonPrimePeriod);
  CHECK(code_of([] { torus_swap(2); }) == ErrorCode::InvalidParams);
}

TEST_CASE("gamma sends the conjugation quotient onto [0, 1]") {
  CHECK(gamma_map(1.0) == 1.0);
  CHECK(gamma_map(-1.0) == 0.0);
  CHECK(gamma_map(Complex(0.0, 1.0)) == doctest::Approx(0.5));
  CHECK(gamma_map(unit(0.7)) == doctest::Approx(gamma_map(unit(-0.7))));
  CHECK(code_of([] { gamma_map(2.0); }) == ErrorCode::OutOfDomain);
}

TEST_CASE("xi, beta and delta at the base point") {
  auto [s, pr] = xi_map(1.0, 1.0);
  CHECK(close(s, 2.0));
  CHECK(close(pr, 1.0));
  auto [u, w] = beta_map(1.0, 1.0);
  CHECK(close(u, 2.0));
  CHECK(close(w, 1.0));
  auto [t, z] = delta_map(1.0, 1.0);
  CHECK(t == doctest::Approx(1.0));
  CHECK(close(z, 1.0));
}

TEST_CASE("delta sends the diagonal to t = 1 and delta' fixes t = 1") {
  for (double a : {0.3, 1.9, 3.0, -2.2}) {
    auto [t, z] = delta_map(unit(a), unit(a));
    CHECK(t == doctest::Approx(1.0));
    CHECK(close(z, unit(a)));
    auto [t2, z2] = delta_prime_map(1.0, unit(a));
    CHECK(t2 == 1.0);
    CHECK(z2 == unit(a));
  }
  CHECK(delta_prime_map(0.25, 1.0).first == doctest::Approx(0.25));
  CHECK(delta_prime_map(1.75, 1.0).first == doctest::Approx(0.25));
  CHECK(code_of([] { delta_prime_map(2.5, 1.0); }) == ErrorCode::OutOfDomain);
}

TEST_CASE("beta after delta is xi") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  for (int trial = 0; trial < 200; ++trial) {
    Complex z1 = unit(angle(rng)), z2 = unit(angle(rng));
    auto [t, z] = delta_map(z1, z2);
    CHECK(t >= 0.0);
    CHECK(t <= 1.0);
    auto [u, w] = beta_map(t, z);
    auto [s, pr] = xi_map(z1, z2);
    CHECK(close(u, s, 1e-10));
    CHECK(close(w, pr, 1e-10));
    auto [t_swapped, z_swapped] = delta_map(z2, z1);
    CHECK(t_swapped == doctest::Approx(t));
    CHECK(close(z_swapped, z, 1e-10));
  }
}

TEST_CASE("beta inverse at t = 0 needs a hint") {
  Complex w = unit(1.0);
  CHECK(code_of([&] { beta_inverse(0.0, w); }) == ErrorCode::InverseAmbiguity);
  auto [t, z] = beta_inverse(0.0, w, unit(0.5));
  CHECK(t == 0.0);
  CHECK(close(z, unit(0.5)));
  auto [t2, z2] = beta_inverse(0.0, w, unit(0.5 + std::numbers::pi));
  CHECK(close(z2, -unit(0.5)));
  (void)t2;
  CHECK(code_of([&] { beta_inverse(Complex(5.0, 0.0), 1.0); }) == ErrorCode::OutOfDomain);
  CHECK(code_of([&] { beta_map(1.5, 1.0); }) == ErrorCode::OutOfDomain);
}

TEST_CASE("example_map dispatch") {
  CHECK(parse_map_kind("delta_prime") == MapKind::DeltaPrime);
  CHECK(code_of([] { parse_map_kind("zeta"); }) == ErrorCode::InvalidParams);
  auto out = example_map(MapKind::Xi, {1.0, -1.0});
  CHECK(close(out[0], 0.0));
  CHECK(close(out[1], -1.0));
  CHECK(code_of([] { example_map(MapKind::Beta, {Complex(0.5, 0.1), 1.0}); }) == ErrorCode::OutOfDomain);
  CHECK(code_of([] { example_map(MapKind::Gamma, {}); }) == ErrorCode::OutOfDomain);
}

TEST_CASE("delta is injective on the torus quotient") {
  auto torus = PeriodicSpace::create(torus_swap(9));
  auto values = delta_on_classes(*torus);
  REQUIRE(values.size() == torus->class_count());
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      double gap = std::abs(values[i].first - values[j].first) + std::abs(values[i].second - values[j].second);
      CHECK(gap > 1e-9);
    }
  for (ClassId q : torus->fixed_classes()) CHECK(values[q].first == doctest::Approx(1.0));
}

TEST_CASE("sample-level delta'^-1 delta from the torus quotient to the cylinder quotient") {
  auto torus = PeriodicSpace::create(torus_swap(15));
  auto cyl = PeriodicSpace::create(cylinder_reflection(15, 15));
  auto f = delta_sample_map(*torus, *cyl);
  auto flags = verify_quotient_homeo(*torus, *cyl, f);
  CHECK(flags.bijective);
  CHECK(flags.preserves_fixed);
  // The torus-swap quotient is a Moebius band and the cylinder quotient an
  // annulus, so no bijection of the two grids can match adjacency.
  CHECK_FALSE(flags.preserves_edges);

  CHECK(code_of([&] { delta_sample_map(*torus, *PeriodicSpace::create(cylinder_reflection(15, 13))); }) ==
        ErrorCode::SizeMismatch);
}

TEST_CASE("cylinder rotation commutes with theta") {
  auto s = cylinder_reflection(7, 10);
  auto rot = cylinder_rotation(7, 10, 3);
  for (PointId x = 0; x < s.points.size(); ++x) CHECK(rot[s.theta[x]] == s.theta[rot[x]]);
}
