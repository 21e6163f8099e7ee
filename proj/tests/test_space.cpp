#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "oracles.hpp"
#include "xprod/scenarios.hpp"
#include "xprod/space.hpp"

using namespace xprod;

namespace {

ErrorCode first_error(const SampledSystem& s) {
  auto r = validate(s);
  REQUIRE_FALSE(r.ok());
  return r.errors.front().code;
}

SampledSystem two_point_swap() {
  SampledSystem s;
  s.period = 2;
  s.points = {{0, {0.0}}, {1, {1.0}}};
  s.edges = {{0, 1}};
  s.theta = {1, 0};
  return s;
}

/// Random system of prime period p: `fixed` fixed points and `orbits`
/// free orbits on shuffled ids, plus random edges.
SampledSystem random_system(int p, int fixed, int orbits, std::mt19937_64& rng) {
  const int n = fixed + orbits * p;
  std::vector<PointId> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), rng);
  SampledSystem s;
  s.period = p;
  s.theta.resize(n);
  for (int i = 0; i < n; ++i) s.points.push_back({static_cast<PointId>(i), {static_cast<double>(i)}});
  int k = 0;
  for (; k < fixed; ++k) s.theta[ids[k]] = ids[k];
  for (int o = 0; o < orbits; ++o, k += p)
    for (int j = 0; j < p; ++j) s.theta[ids[k + j]] = ids[k + (j + 1) % p];
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int e = 0; e < 2 * n; ++e) {
    int a = pick(rng), b = pick(rng);
    if (a != b) s.edges.push_back({static_cast<PointId>(a), static_cast<PointId>(b)});
  }
  return s;
}

}  // namespace

TEST_CASE("circle samples: fixed points at +1 and -1") {
  auto s = circle_conjugation(8);
  auto r = validate(s);
  CHECK(r.ok());
  CHECK(r.density_ok);
  CHECK(r.fixed_ids == std::vector<PointId>{0, 4});
  CHECK(s.points[0].coords[0] == doctest::Approx(1.0));
  CHECK(s.points[4].coords[0] == doctest::Approx(-1.0));
}

TEST_CASE("orbits: fixed points are singletons, free orbits follow theta from the smallest id") {
  auto sp = PeriodicSpace::create(circle_conjugation(8));
  const auto& cls = sp->orbit_space().classes;
  CHECK(cls.size() == 5);
  CHECK(cls[0] == std::vector<PointId>{0});
  // z = i sits at k = 2, its conjugate at k = 6.
  CHECK(cls[sp->class_of(2)] == std::vector<PointId>{2, 6});
  CHECK(sp->is_fixed_class(sp->class_of(4)));

  auto disk = PeriodicSpace::create(disk_rotation(2, 9, 3));
  for (ClassId q : disk->free_classes()) {
    const auto& c = disk->orbit_space().classes[q];
    CHECK(c.size() == 3);
    CHECK(c[0] == *std::min_element(c.begin(), c.end()));
    for (int j = 0; j < 3; ++j) CHECK(c[j] == oracle::walk(disk->system(), c[0], j));
  }
}

TEST_CASE("validation errors") {
  SUBCASE("identity theta has period 1") {
    auto s = two_point_swap();
    s.theta = {0, 1};
    CHECK(first_error(s) == ErrorCode::WrongPeriod);
  }
  SUBCASE("composite period") {
    auto s = two_point_swap();
    s.period = 4;
    CHECK(first_error(s) == ErrorCode::NonPrimePeriod);
  }
  SUBCASE("theta not a permutation") {
    auto s = two_point_swap();
    s.theta = {1, 1};
    CHECK(first_error(s) == ErrorCode::NonBijectiveTheta);
  }
  SUBCASE("theta of order 3 declared as period 2") {
    SampledSystem s;
    s.period = 2;
    for (PointId i = 0; i < 3; ++i) s.points.push_back({i, {}});
    s.theta = {1, 2, 0};
    CHECK(first_error(s) == ErrorCode::WrongPeriod);
  }
  SUBCASE("edge to a missing point") {
    auto s = two_point_swap();
    s.edges.push_back({1, 7});
    CHECK(first_error(s) == ErrorCode::DanglingEdge);
  }
  SUBCASE("ids must be dense") {
    auto s = two_point_swap();
    s.points[1].id = 5;
    CHECK(first_error(s) == ErrorCode::MalformedInput);
  }
  SUBCASE("create throws the first error") {
    auto s = two_point_swap();
    s.period = 6;
    try {
      PeriodicSpace::create(s);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonPrimePeriod);
    }
  }
}

TEST_CASE("density is a warning") {
  auto s = circle_conjugation(8);
  // A fixed point attached only to another fixed point.
  s.points.push_back({8, {2.0, 0.0}});
  s.theta.push_back(8);
  s.edges.push_back({0, 8});
  auto r = validate(s);
  CHECK(r.ok());
  CHECK_FALSE(r.density_ok);
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0].code == ErrorCode::DensityViolation);
  auto sp = PeriodicSpace::create(s);
  CHECK_FALSE(sp->density_ok());
}

TEST_CASE("frontier band and distances agree with breadth-first search") {
  auto sp = PeriodicSpace::create(cylinder_reflection(9, 5));
  auto oracle_dist = oracle::bfs(sp->system(), oracle::fixed_points(sp->system()));
  auto dist = distance_to_fixed(*sp);
  for (ClassId q = 0; q < sp->class_count(); ++q) CHECK(dist[q] == oracle_dist[sp->representative(q)]);
  CHECK(point_distances(*sp, sp->fixed_ids()) == oracle_dist);

  auto band = frontier_band(*sp, 2);
  for (ClassId q = 0; q < sp->class_count(); ++q) {
    bool in = std::find(band.begin(), band.end(), q) != band.end();
    CHECK(in == (dist[q] >= 1 && dist[q] <= 2));
  }
}

TEST_CASE("systems without fixed points are allowed") {
  auto sp = PeriodicSpace::create(two_point_swap());
  CHECK(sp->fixed_ids().empty());
  CHECK(sp->class_count() == 1);
  CHECK(distance_to_fixed(*sp) == std::vector<int>{-1});
}

TEST_CASE("property: orbit data of random periodic systems") {
  std::mt19937_64 rng(11);
  for (int p : {2, 3, 5, 7}) {
    for (int trial = 0; trial < 20; ++trial) {
      std::uniform_int_distribution<int> small(0, 6);
      int fixed = small(rng), orbits = 1 + small(rng);
      auto s = random_system(p, fixed, orbits, rng);
      auto sp = PeriodicSpace::create(s);
      const auto& os = sp->orbit_space();

      std::set<std::set<PointId>> got;
      for (const auto& c : os.classes) got.insert(std::set<PointId>(c.begin(), c.end()));
      CHECK(got == oracle::orbit_sets(s));
      CHECK(sp->fixed_ids() == oracle::fixed_points(s));
      CHECK(sp->class_count() == static_cast<std::size_t>(fixed + orbits));

      for (PointId x = 0; x < s.points.size(); ++x) {
        CHECK(sp->class_of(s.theta[x]) == sp->class_of(x));
        CHECK(sp->theta(x, p) == x);
        CHECK(sp->theta(x, -1) == oracle::walk(s, x, p - 1));
        const auto& c = os.classes[sp->class_of(x)];
        CHECK(sp->representative(sp->class_of(x)) == *std::min_element(c.begin(), c.end()));
        CHECK(sp->theta(sp->representative(sp->class_of(x)), sp->orbit_offset(x)) == x);
      }
      for (auto [a, b] : os.edges) CHECK(a < b);
    }
  }
}
