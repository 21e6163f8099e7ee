#include <doctest.h>

#include <algorithm>
#include <numeric>
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

/// Two disjoint copies of the n-point circle.
SampledSystem two_circles(int n) {
  auto c = circle_conjugation(n);
  SampledSystem s = c;
  for (const auto& pt : c.points) s.points.push_back({pt.id + n, pt.coords});
  for (PointId t : c.theta) s.theta.push_back(t + n);
  for (auto [a, b] : c.edges) s.edges.push_back({a + n, b + n});
  return s;
}

/// Half-turn z -> -z of the circle, which commutes with conjugation.
std::vector<PointId> half_turn(int n) {
  std::vector<PointId> out(n);
  for (int k = 0; k < n; ++k) out[k] = static_cast<PointId>((k + n / 2) % n);
  return out;
}

/// Random class bijection of the circle quotient carrying fixed classes to
/// fixed classes.
std::vector<ClassId> random_fixed_preserving(const PeriodicSpace& sp, std::mt19937_64& rng) {
  auto fixed = sp.fixed_classes();
  auto free = sp.free_classes();
  auto fixed_img = fixed, free_img = free;
  std::shuffle(fixed_img.begin(), fixed_img.end(), rng);
  std::shuffle(free_img.begin(), free_img.end(), rng);
  std::vector<ClassId> f(sp.class_count());
  for (std::size_t i = 0; i < fixed.size(); ++i) f[fixed[i]] = fixed_img[i];
  for (std::size_t i = 0; i < free.size(); ++i) f[free[i]] = free_img[i];
  return f;
}

}  // namespace

TEST_CASE("quotient map flags") {
  auto sp = PeriodicSpace::create(circle_conjugation(32));
  auto id = identity_quotient_map(*sp);
  CHECK(id.bijective);
  CHECK(id.preserves_edges);
  CHECK(id.preserves_fixed);

  auto eq = orbit_equivalence_check(*sp, *sp, half_turn(32));
  REQUIRE(eq.induced);
  CHECK(eq.induced->bijective);
  CHECK(eq.induced->preserves_edges);
  CHECK(eq.induced->preserves_fixed);
  CHECK(eq.induced->forward[sp->class_of(0)] == sp->class_of(16));

  // Swap a fixed class with a free one.
  auto f = id.forward;
  ClassId fx = sp->fixed_classes().front(), fr = sp->free_classes().front();
  std::swap(f[fx], f[fr]);
  auto swapped = verify_quotient_homeo(*sp, *sp, f);
  CHECK(swapped.bijective);
  CHECK_FALSE(swapped.preserves_fixed);

  f = id.forward;
  f[0] = f[1];
  CHECK_FALSE(verify_quotient_homeo(*sp, *sp, f).bijective);

  auto small = PeriodicSpace::create(circle_conjugation(16));
  CHECK(code_of([&] { verify_quotient_homeo(*sp, *small, id.forward); }) == ErrorCode::SizeMismatch);
  f = id.forward;
  f[0] = 1000;
  CHECK(code_of([&] { verify_quotient_homeo(*sp, *sp, f); }) == ErrorCode::MalformedInput);
}

TEST_CASE("induced isomorphism is composition with the class map") {
  std::mt19937_64 rng(1);
  auto sp = PeriodicSpace::create(circle_conjugation(32));
  auto map = *orbit_equivalence_check(*sp, *sp, half_turn(32)).induced;
  auto a = random_a_element(sp, rng);
  auto b = random_a_element(sp, rng);
  auto pa = induced_isomorphism(map, sp, a);
  for (ClassId q = 0; q < sp->class_count(); ++q) CHECK(pa.at(q) == a.at(map.forward[q]));
  CHECK(distance(induced_isomorphism(map, sp, a * b), pa * induced_isomorphism(map, sp, b)) == 0.0);
  CHECK(distance(induced_isomorphism(map, sp, a.adjoint()), pa.adjoint()) == 0.0);
  CHECK(distance(induced_isomorphism(map, sp, a.scaled({0.0, 2.0})), pa.scaled({0.0, 2.0})) == 0.0);
  CHECK(pa.is_valid(0.0));
}

TEST_CASE("induced isomorphism rejects bad class maps") {
  std::mt19937_64 rng(2);
  auto sp = PeriodicSpace::create(circle_conjugation(32));
  auto b = random_a_element(sp, rng);
  auto f = identity_quotient_map(*sp).forward;
  std::swap(f[sp->free_classes()[0]], f[sp->free_classes()[5]]);
  auto scrambled = verify_quotient_homeo(*sp, *sp, f);
  CHECK(code_of([&] { induced_isomorphism(scrambled, sp, b); }) == ErrorCode::NotHomeo);
  InducedOptions relaxed{false, true};
  CHECK_NOTHROW(induced_isomorphism(scrambled, sp, b, relaxed));

  f = identity_quotient_map(*sp).forward;
  std::swap(f[sp->fixed_classes()[0]], f[sp->free_classes()[0]]);
  auto unfixed = verify_quotient_homeo(*sp, *sp, f);
  CHECK(code_of([&] { induced_isomorphism(unfixed, sp, b, relaxed); }) == ErrorCode::NotFixedPreserving);

  f[0] = f[1];
  CHECK(code_of([&] { induced_isomorphism(verify_quotient_homeo(*sp, *sp, f), sp, b, relaxed); }) ==
        ErrorCode::NotHomeo);
}

TEST_CASE("algebra basis coordinates round-trip") {
  std::mt19937_64 rng(3);
  auto sp = PeriodicSpace::create(disk_rotation(2, 6, 3));
  AlgebraBasis basis(sp);
  CHECK(basis.dimension() == 3 + 9 * (sp->class_count() - 1));
  auto a = random_a_element(sp, rng);
  CHECK(distance(basis.from_coordinates(basis.coordinates(a)), a) == 0.0);
  for (std::size_t k = 0; k < basis.dimension(); ++k) CHECK(basis.coordinates(basis.element(k))(k) == Complex(1.0));
  CHECK(code_of([&] { basis.from_coordinates(CVector::Zero(3)); }) == ErrorCode::SizeMismatch);
}

TEST_CASE("orbit equivalence of point maps") {
  SUBCASE("theta itself") {
    auto sp = PeriodicSpace::create(disk_rotation(3, 6, 3));
    auto eq = orbit_equivalence_check(*sp, *sp, sp->system().theta);
    CHECK(eq.equivalent);
    CHECK(eq.point_homeomorphism);
    CHECK(eq.induced->forward == identity_quotient_map(*sp).forward);
  }
  SUBCASE("cylinder rotations") {
    auto sp = PeriodicSpace::create(cylinder_reflection(7, 8));
    for (int shift = 1; shift < 8; ++shift) {
      auto eq = orbit_equivalence_check(*sp, *sp, cylinder_rotation(7, 8, shift));
      CHECK(eq.equivalent);
      CHECK(eq.point_homeomorphism);
      CHECK(eq.induced->bijective);
      CHECK(eq.induced->preserves_edges);
      CHECK(eq.induced->preserves_fixed);
    }
  }
  SUBCASE("a bijection that splits an orbit") {
    auto sp = PeriodicSpace::create(circle_conjugation(8));
    std::vector<PointId> pts(8);
    std::iota(pts.begin(), pts.end(), 0);
    std::swap(pts[1], pts[2]);
    auto eq = orbit_equivalence_check(*sp, *sp, pts);
    CHECK_FALSE(eq.orbits_preserved);
    CHECK_FALSE(eq.equivalent);
    CHECK_FALSE(eq.induced);
    CHECK_FALSE(eq.issues.empty());
  }
}

TEST_CASE("center dimensions: p at fixed classes, 1 at free classes") {
  auto sp = PeriodicSpace::create(disk_rotation(2, 5, 5));
  auto dims = center_dimensions(*sp);
  for (ClassId q = 0; q < sp->class_count(); ++q) CHECK(dims[q] == (sp->is_fixed_class(q) ? 5 : 1));
}

TEST_CASE("recovering the class map from an induced isomorphism") {
  std::mt19937_64 rng(4);
  auto sp = PeriodicSpace::create(circle_conjugation(32));

  auto id = recover_quotient_map(sp, sp, CMatrix::Identity(64, 64));
  CHECK(id.ok);
  CHECK(id.map.forward == identity_quotient_map(*sp).forward);
  CHECK(id.center_domain == 19);

  for (int trial = 0; trial < 20; ++trial) {
    auto map = verify_quotient_homeo(*sp, *sp, random_fixed_preserving(*sp, rng));
    InducedOptions relaxed{false, true};
    CMatrix theta = induced_matrix(map, sp, sp, relaxed);
    auto rec = recover_quotient_map(sp, sp, theta);
    CHECK(rec.ok);
    CHECK(rec.map.forward == map.forward);
    CHECK(rec.homomorphism_defect == 0.0);
    CHECK(rec.fixed_correspondence.size() == 2);
  }
}

TEST_CASE("recovery sees permuted slots at a fixed class") {
  auto sp = PeriodicSpace::create(circle_conjugation(16));
  AlgebraBasis basis(sp);
  CMatrix theta = CMatrix::Identity(basis.dimension(), basis.dimension());
  // Swap the two diagonal units of the first fixed class.
  const ClassId q = sp->fixed_classes().front();
  std::vector<Eigen::Index> at;
  for (std::size_t k = 0; k < basis.dimension(); ++k)
    if (basis.units()[k].cls == q) at.push_back(static_cast<Eigen::Index>(k));
  REQUIRE(at.size() == 2);
  theta.col(at[0]).swap(theta.col(at[1]));
  auto rec = recover_quotient_map(sp, sp, theta);
  CHECK(rec.ok);
  REQUIRE(rec.slot_permutations.size() == 2);
  auto it = std::find_if(rec.fixed_correspondence.begin(), rec.fixed_correspondence.end(),
                         [&](auto pr) { return pr.first == q; });
  REQUIRE(it != rec.fixed_correspondence.end());
  CHECK(rec.slot_permutations[it - rec.fixed_correspondence.begin()] == std::vector<int>{1, 0});
}

TEST_CASE("recovery rejects non-isomorphic algebras and non-homomorphisms") {
  auto one = PeriodicSpace::create(circle_conjugation(32));
  auto two = PeriodicSpace::create(two_circles(16));
  CHECK(AlgebraBasis(two).dimension() == 64);
  CHECK(code_of([&] { recover_quotient_map(one, two, CMatrix::Identity(64, 64)); }) == ErrorCode::CenterMismatch);
  CHECK(code_of([&] { recover_quotient_map(one, one, CMatrix::Identity(63, 64)); }) == ErrorCode::SizeMismatch);

  CMatrix scaled = 2.0 * CMatrix::Identity(64, 64);
  CHECK(code_of([&] { recover_quotient_map(one, one, scaled); }) == ErrorCode::NotIsomorphism);
  CMatrix singular = CMatrix::Identity(64, 64);
  singular(5, 5) = 0.0;
  CHECK(code_of([&] { recover_quotient_map(one, one, singular); }) == ErrorCode::NotIsomorphism);
}

TEST_CASE("property: orbit equivalences induce fixed-preserving quotient homeomorphisms") {
  std::mt19937_64 rng(5);
  auto sp = PeriodicSpace::create(cylinder_reflection(9, 12));
  std::uniform_int_distribution<int> shift(0, 11);
  for (int trial = 0; trial < 10; ++trial) {
    auto pts = cylinder_rotation(9, 12, shift(rng));
    // Compose with theta on a random subset of orbits.
    std::bernoulli_distribution flip(0.5);
    std::vector<PointId> twisted = pts;
    for (const auto& cls : sp->orbit_space().classes)
      if (flip(rng))
        for (PointId x : cls) twisted[x] = pts[sp->theta(x)];
    auto eq = orbit_equivalence_check(*sp, *sp, twisted);
    CHECK(eq.equivalent);
    REQUIRE(eq.induced);
    CHECK(eq.induced->bijective);
    CHECK(eq.induced->preserves_fixed);
    CHECK(eq.induced->preserves_edges);
    CHECK(eq.induced->forward == orbit_equivalence_check(*sp, *sp, pts).induced->forward);
  }
}
