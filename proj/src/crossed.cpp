#include "xprod/crossed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace xprod {

ScalarField pushforward(const PeriodicSpace& space, const ScalarField& f, int k) {
  ScalarField out(f.size());
  for (PointId x = 0; x < f.size(); ++x) out[x] = f[space.theta(x, k)];
  return out;
}

CrossedElement::CrossedElement(SpacePtr space, std::vector<ScalarField> components)
    : space_(std::move(space)), components_(std::move(components)) {
  if (!space_) throw Error(ErrorCode::BaseMismatch, "element without a base space");
  if (static_cast<int>(components_.size()) != space_->period())
    throw Error(ErrorCode::MalformedInput, "expected " + std::to_string(space_->period()) + " components, got " +
                                               std::to_string(components_.size()));
  for (const auto& f : components_)
    if (f.size() != space_->size())
      throw Error(ErrorCode::MalformedInput, "component defined on " + std::to_string(f.size()) + " of " +
                                                 std::to_string(space_->size()) + " points");
}

CrossedElement CrossedElement::zero(SpacePtr space) {
  const int p = space->period();
  const std::size_t n = space->size();
  return CrossedElement(std::move(space), std::vector<ScalarField>(p, ScalarField(n, Complex(0.0))));
}

CrossedElement CrossedElement::identity(SpacePtr space) {
  const std::size_t n = space->size();
  return single(std::move(space), 0, ScalarField(n, Complex(1.0)));
}

CrossedElement CrossedElement::single(SpacePtr space, int j, ScalarField f) {
  const int p = space->period();
  const std::size_t n = space->size();
  std::vector<ScalarField> comps(p, ScalarField(n, Complex(0.0)));
  comps.at(j) = std::move(f);
  return CrossedElement(std::move(space), std::move(comps));
}

CMatrix CrossedElement::matrix_at(PointId x) const {
  space_->require_point(x);
  const int p = period();
  CMatrix m(p, p);
  for (int k = 0; k < p; ++k) {
    const PointId y = space_->theta(x, k);
    for (int j = 0; j < p; ++j) m(k, j) = components_[((j - k) % p + p) % p][y];
  }
  return m;
}

CrossedElement CrossedElement::operator+(const CrossedElement& other) const {
  require_same_base(*this, other);
  auto comps = components_;
  for (int j = 0; j < period(); ++j)
    for (std::size_t x = 0; x < comps[j].size(); ++x) comps[j][x] += other.components_[j][x];
  return CrossedElement(space_, std::move(comps));
}

CrossedElement CrossedElement::operator-(const CrossedElement& other) const { return *this + other.scaled(-1.0); }

CrossedElement CrossedElement::scaled(Complex s) const {
  auto comps = components_;
  for (auto& f : comps)
    for (auto& v : f) v *= s;
  return CrossedElement(space_, std::move(comps));
}

CrossedElement CrossedElement::times_invariant(const ScalarField& h) const {
  auto comps = components_;
  for (auto& f : comps)
    for (std::size_t x = 0; x < f.size(); ++x) f[x] *= h[x];
  return CrossedElement(space_, std::move(comps));
}

double CrossedElement::sup_norm() const {
  double out = 0.0;
  for (PointId x = 0; x < space_->size(); ++x) out = std::max(out, matrix_at(x).norm());
  return out;
}

void require_same_base(const CrossedElement& a, const CrossedElement& b) {
  if (a.space() != b.space()) throw Error(ErrorCode::BaseMismatch, "elements live over different systems");
}

CrossedElement multiply(const CrossedElement& a, const CrossedElement& b) {
  require_same_base(a, b);
  const auto& space = *a.space();
  const int p = a.period();
  const std::size_t n = space.size();
  std::vector<ScalarField> comps(p, ScalarField(n));
  for (PointId x = 0; x < n; ++x) {
    CMatrix prod = a.matrix_at(x) * b.matrix_at(x);
    for (int j = 0; j < p; ++j) comps[j][x] = prod(0, j);
  }
  CrossedElement c(a.space(), std::move(comps));

  const double scale = std::max(1.0, a.sup_norm() * b.sup_norm());
  for (PointId x = 0; x < n; ++x) {
    double defect = (c.matrix_at(x) - a.matrix_at(x) * b.matrix_at(x)).norm();
    if (defect > 1e-10 * scale)
      throw Error(ErrorCode::ClosureFailure, "product is not twisted circulant at point " + std::to_string(x) +
                                                 " (defect " + std::to_string(defect) + ")");
  }
  return c;
}

CrossedElement adjoint(const CrossedElement& a) {
  const auto& space = *a.space();
  const int p = a.period();
  const std::size_t n = space.size();
  std::vector<ScalarField> comps(p, ScalarField(n));
  for (int j = 0; j < p; ++j) {
    const ScalarField& src = a.component((p - j) % p);
    for (PointId x = 0; x < n; ++x) comps[j][x] = std::conj(src[space.theta(x, j)]);
  }
  return CrossedElement(a.space(), std::move(comps));
}

double distance(const CrossedElement& a, const CrossedElement& b) {
  require_same_base(a, b);
  double out = 0.0;
  for (PointId x = 0; x < a.space()->size(); ++x)
    out = std::max(out, (a.matrix_at(x) - b.matrix_at(x)).norm());
  return out;
}

double closure_defect(const CrossedElement& a, const CrossedElement& b) {
  CrossedElement c = multiply(a, b);
  double out = 0.0;
  for (PointId x = 0; x < a.space()->size(); ++x)
    out = std::max(out, (c.matrix_at(x) - a.matrix_at(x) * b.matrix_at(x)).norm());
  return out;
}

bool vanishes_on_fixed(const CrossedElement& a, double tol) {
  for (PointId x : a.space()->fixed_ids())
    for (const auto& f : a.components())
      if (std::abs(f[x]) > tol) return false;
  return true;
}

BoundaryTuple pi_boundary(const CrossedElement& a) {
  const auto& space = *a.space();
  const int p = a.period();
  BoundaryTuple out;
  out.fixed_ids = space.fixed_ids();
  out.slots.assign(p, ScalarField(out.fixed_ids.size()));
  for (int s = 0; s < p; ++s) {
    for (std::size_t i = 0; i < out.fixed_ids.size(); ++i) {
      const PointId x = out.fixed_ids[i];
      Complex acc = 0.0;
      for (int j = 0; j < p; ++j)
        acc += root_of_unity(p, static_cast<long long>(j) * (p - 1 - s)) * a.component(j)[x];
      out.slots[s][i] = acc;
    }
  }
  return out;
}

BoundaryTuple pointwise_product(const BoundaryTuple& a, const BoundaryTuple& b) {
  if (a.fixed_ids != b.fixed_ids || a.slots.size() != b.slots.size())
    throw Error(ErrorCode::BaseMismatch, "boundary tuples over different fixed sets");
  BoundaryTuple out = a;
  for (std::size_t s = 0; s < out.slots.size(); ++s)
    for (std::size_t i = 0; i < out.fixed_ids.size(); ++i) out.slots[s][i] *= b.slots[s][i];
  return out;
}

double tuple_distance(const BoundaryTuple& a, const BoundaryTuple& b) {
  if (a.fixed_ids != b.fixed_ids || a.slots.size() != b.slots.size())
    throw Error(ErrorCode::BaseMismatch, "boundary tuples over different fixed sets");
  double out = 0.0;
  for (std::size_t s = 0; s < a.slots.size(); ++s)
    for (std::size_t i = 0; i < a.fixed_ids.size(); ++i) out = std::max(out, std::abs(a.slots[s][i] - b.slots[s][i]));
  return out;
}

double tuple_norm(const BoundaryTuple& a) {
  double out = 0.0;
  for (const auto& slot : a.slots)
    for (auto v : slot) out = std::max(out, std::abs(v));
  return out;
}

CMatrix orbit_intertwiner(const PeriodicSpace& space, PointId x, int j) {
  space.require_point(x);
  if (space.is_fixed(x))
    throw Error(ErrorCode::FixedPointGiven, "intertwiners are defined for non-fixed points; " + std::to_string(x) +
                                                " is fixed");
  const int p = space.period();
  if (j < 0 || j >= p) throw Error(ErrorCode::InvalidParams, "shift index must lie in [0, p)");
  CMatrix u = CMatrix::Zero(p, p);
  for (int k = 0; k < p; ++k) u((k + j) % p, k) = 1.0;
  return u;
}

Complex pure_state(const CrossedElement& a, PointId x0, int k) {
  const auto& space = *a.space();
  space.require_point(x0);
  if (!space.is_fixed(x0)) throw Error(ErrorCode::NotFixedPoint, "point " + std::to_string(x0) + " is not fixed");
  const int p = a.period();
  Complex acc = 0.0;
  for (int j = 0; j < p; ++j) acc += root_of_unity(p, static_cast<long long>(j) * k) * a.component(j)[x0];
  return acc;
}

namespace {

struct OrbitSolve {
  std::vector<PointId> distinct;    // distinct orbit points, theta order
  std::vector<std::size_t> slot;    // slot[k] = index of theta^k(x) in distinct
  Eigen::FullPivLU<CMatrix> lu;
  int rank = 0;
};

OrbitSolve orbit_system(const PeriodicSpace& space, PointId x) {
  const int p = space.period();
  OrbitSolve out;
  for (int k = 0; k < p; ++k) {
    PointId y = space.theta(x, k);
    auto it = std::find(out.distinct.begin(), out.distinct.end(), y);
    if (it == out.distinct.end()) {
      out.slot.push_back(out.distinct.size());
      out.distinct.push_back(y);
    } else {
      out.slot.push_back(static_cast<std::size_t>(it - out.distinct.begin()));
    }
  }
  // Row (k, j) reads the unknown f_{(j-k) mod p} at theta^k(x).
  const int unknowns = p * static_cast<int>(out.distinct.size());
  CMatrix sys = CMatrix::Zero(p * p, unknowns);
  for (int k = 0; k < p; ++k)
    for (int j = 0; j < p; ++j) {
      int m = ((j - k) % p + p) % p;
      sys(k * p + j, m * static_cast<int>(out.distinct.size()) + static_cast<int>(out.slot[k])) = 1.0;
    }
  out.lu.compute(sys);
  out.rank = static_cast<int>(out.lu.rank());
  return out;
}

int bump_radius(const PeriodicSpace& space, const std::vector<PointId>& orbit,
                const std::vector<std::vector<int>>& dist_from) {
  int radius = std::numeric_limits<int>::max();
  auto to_fixed = point_distances(space, space.fixed_ids());
  for (PointId y : orbit)
    if (to_fixed[y] > 0) radius = std::min(radius, to_fixed[y]);
  for (std::size_t a = 0; a < orbit.size(); ++a)
    for (std::size_t b = 0; b < orbit.size(); ++b)
      if (a != b && dist_from[a][orbit[b]] > 0) radius = std::min(radius, dist_from[a][orbit[b]]);
  return radius == std::numeric_limits<int>::max() ? 1 : radius;
}

}  // namespace

CrossedElement span_witness(SpacePtr space, PointId x, const CMatrix& target) {
  space->require_point(x);
  if (space->is_fixed(x))
    throw Error(ErrorCode::FixedPointGiven, "point " + std::to_string(x) + " is fixed; span check needs a non-fixed point");
  const int p = space->period();
  if (target.rows() != p || target.cols() != p) throw Error(ErrorCode::InvalidParams, "target must be p x p");

  OrbitSolve sol = orbit_system(*space, x);
  if (sol.rank < p * p)
    throw Error(ErrorCode::SingularSystem, "orbit of " + std::to_string(x) + " collapses (rank " +
                                               std::to_string(sol.rank) + ")");
  CVector rhs(p * p);
  for (int k = 0; k < p; ++k)
    for (int j = 0; j < p; ++j) rhs(k * p + j) = target(k, j);
  CVector values = sol.lu.solve(rhs);

  const std::size_t orbit_size = sol.distinct.size();
  std::vector<std::vector<int>> dist_from;
  dist_from.reserve(orbit_size);
  for (PointId y : sol.distinct) dist_from.push_back(point_distances(*space, {y}));
  const int radius = bump_radius(*space, sol.distinct, dist_from);

  const std::size_t n = space->size();
  std::vector<ScalarField> comps(p, ScalarField(n, Complex(0.0)));
  for (PointId z = 0; z < n; ++z) {
    if (space->is_fixed(z)) continue;
    for (std::size_t u = 0; u < orbit_size; ++u) {
      int d = dist_from[u][z];
      if (d < 0 || d >= radius) continue;
      double w = 1.0 - static_cast<double>(d) / radius;
      for (int m = 0; m < p; ++m) comps[m][z] += w * values(m * static_cast<int>(orbit_size) + static_cast<int>(u));
    }
  }
  return CrossedElement(std::move(space), std::move(comps));
}

SpanCheckReport evaluation_span_check(SpacePtr space, PointId x) {
  space->require_point(x);
  if (space->is_fixed(x))
    throw Error(ErrorCode::FixedPointGiven, "point " + std::to_string(x) + " is fixed; span check needs a non-fixed point");
  const int p = space->period();
  SpanCheckReport report;
  report.point = x;
  OrbitSolve sol = orbit_system(*space, x);
  report.rank = sol.rank;
  {
    std::vector<std::vector<int>> dist_from;
    for (PointId y : sol.distinct) dist_from.push_back(point_distances(*space, {y}));
    report.bump_radius = bump_radius(*space, sol.distinct, dist_from);
  }
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      CMatrix unit = matrix_unit(p, i, j);
      CrossedElement w = span_witness(space, x, unit);
      report.max_residual = std::max(report.max_residual, (w.matrix_at(x) - unit).norm());
      for (PointId f : space->fixed_ids())
        for (const auto& comp : w.components()) report.max_fixed_leak = std::max(report.max_fixed_leak, std::abs(comp[f]));
      ++report.units;
    }
  return report;
}

EssentialReport essential_ideal_check(SpacePtr space, const CrossedElement& a, int trials, std::mt19937_64& rng,
                                      double tol, bool strict) {
  if (a.space() != space) throw Error(ErrorCode::BaseMismatch, "element does not live over the given system");
  EssentialReport report;
  report.density_ok = space->density_ok();
  if (strict && !report.density_ok)
    throw Error(ErrorCode::DensityViolation, "some fixed point has no non-fixed neighbour");

  const int p = space->period();
  const std::size_t n = space->size();

  // Localized adjoint: c = a^* restricted to the orbit of x, so (a c)(x) = a(x) a(x)^*.
  for (ClassId q : space->free_classes()) {
    PointId x = space->representative(q);
    if (a.matrix_at(x).norm() <= tol) continue;
    ScalarField indicator(n, Complex(0.0));
    for (PointId y : space->orbit_space().classes[q]) indicator[y] = 1.0;
    CrossedElement c = adjoint(a).times_invariant(indicator);
    CrossedElement ac = multiply(a, c);
    ++report.products_checked;
    double nrm = ac.sup_norm();
    report.max_product_norm = std::max(report.max_product_norm, nrm);
    if (nrm > tol) {
      report.witness_point = x;
      break;
    }
  }

  if (!report.witness_point) {
    for (PointId y = 0; y < n && !report.witness_point; ++y) {
      if (space->is_fixed(y)) continue;
      for (int m = 0; m < p; ++m) {
        ScalarField delta(n, Complex(0.0));
        delta[y] = 1.0;
        CrossedElement ac = multiply(a, CrossedElement::single(space, m, std::move(delta)));
        ++report.products_checked;
        double nrm = ac.sup_norm();
        report.max_product_norm = std::max(report.max_product_norm, nrm);
        if (nrm > tol) {
          report.witness_point = y;
          break;
        }
      }
    }
    for (int t = 0; t < trials && !report.witness_point; ++t) {
      CrossedElement ac = multiply(a, random_ideal_element(space, rng));
      ++report.products_checked;
      double nrm = ac.sup_norm();
      report.max_product_norm = std::max(report.max_product_norm, nrm);
    }
  }

  report.annihilates = !report.witness_point && report.max_product_norm <= tol;
  report.element_zero = a.sup_norm() <= tol;

  if (report.annihilates && !report.element_zero) {
    std::vector<PointId> support;
    for (PointId x : space->fixed_ids())
      if (a.matrix_at(x).norm() > tol) support.push_back(x);
    for (PointId x : support) {
      bool touches_free = false;
      for (PointId y : space->neighbors()[x]) touches_free = touches_free || !space->is_fixed(y);
      if (!touches_free) report.isolated_support.push_back(x);
    }
    if (report.isolated_support.empty()) {
      report.discontinuous_annihilator = true;
      report.essential_ok = true;
      report.note = "annihilator lives on fixed points next to non-fixed points and cannot be continuous";
    } else {
      report.essential_ok = false;
      report.note = "nonzero annihilator supported on fixed points without non-fixed neighbours";
    }
  } else {
    report.essential_ok = true;
  }
  return report;
}

CrossedElement random_element(SpacePtr space, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int p = space->period();
  const std::size_t n = space->size();
  std::vector<ScalarField> comps(p, ScalarField(n));
  for (auto& f : comps)
    for (auto& v : f) {
      double re = gauss(rng);
      double im = gauss(rng);
      v = Complex(re, im);
    }
  return CrossedElement(std::move(space), std::move(comps));
}

CrossedElement random_ideal_element(SpacePtr space, std::mt19937_64& rng) {
  CrossedElement a = random_element(space, rng);
  auto comps = a.components();
  for (PointId x : space->fixed_ids())
    for (auto& f : comps) f[x] = 0.0;
  return CrossedElement(std::move(space), std::move(comps));
}

CrossedElement smooth_random_element(SpacePtr space, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int p = space->period();
  const std::size_t n = space->size();
  std::size_t dim = 0;
  for (const auto& pt : space->system().points) dim = std::max(dim, pt.coords.size());
  const std::size_t monomials = 1 + dim + dim * (dim + 1) / 2;
  const double scale = 1.0 / std::sqrt(static_cast<double>(monomials));

  std::vector<ScalarField> comps(p, ScalarField(n, Complex(0.0)));
  for (int j = 0; j < p; ++j) {
    std::vector<Complex> coeff(monomials);
    for (auto& c : coeff) {
      double re = gauss(rng);
      double im = gauss(rng);
      c = Complex(re, im) * scale;
    }
    for (PointId x = 0; x < n; ++x) {
      const auto& u = space->system().points[x].coords;
      auto coord = [&](std::size_t i) { return i < u.size() ? u[i] : 0.0; };
      std::size_t m = 0;
      Complex acc = coeff[m++];
      for (std::size_t i = 0; i < dim; ++i) acc += coeff[m++] * coord(i);
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t k = i; k < dim; ++k) acc += coeff[m++] * coord(i) * coord(k);
      comps[j][x] = acc;
    }
  }
  return CrossedElement(std::move(space), std::move(comps));
}

}  // namespace xprod
