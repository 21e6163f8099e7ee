#pragma once

// The twisted-circulant model of the crossed product. An element is a
// p-tuple of scalar fields (f_0, ..., f_{p-1}); at a point x it is realized
// as the p x p matrix whose (k, j) entry is f_{(j-k) mod p}(theta^k(x)).

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "xprod/matalg.hpp"
#include "xprod/space.hpp"

namespace xprod {

/// Complex values indexed by point id.
using ScalarField = std::vector<Complex>;

/// theta(f)(x) = f(theta(x)), applied k times.
ScalarField pushforward(const PeriodicSpace& space, const ScalarField& f, int k = 1);

class CrossedElement {
 public:
  CrossedElement(SpacePtr space, std::vector<ScalarField> components);

  static CrossedElement zero(SpacePtr space);
  /// f_0 = 1, other components 0.
  static CrossedElement identity(SpacePtr space);
  /// Element with f_j given and all other components zero.
  static CrossedElement single(SpacePtr space, int j, ScalarField f);

  const SpacePtr& space() const { return space_; }
  int period() const { return static_cast<int>(components_.size()); }
  const std::vector<ScalarField>& components() const { return components_; }
  const ScalarField& component(int j) const { return components_[j]; }

  CMatrix matrix_at(PointId x) const;

  CrossedElement operator+(const CrossedElement& other) const;
  CrossedElement operator-(const CrossedElement& other) const;
  CrossedElement scaled(Complex s) const;
  /// Pointwise product of every component with a field. The result stays a
  /// realization of the same algebra only when h is theta-invariant.
  CrossedElement times_invariant(const ScalarField& h) const;

  /// max_x ||matrix_at(x)||
  double sup_norm() const;

 private:
  SpacePtr space_;
  std::vector<ScalarField> components_;
};

void require_same_base(const CrossedElement& a, const CrossedElement& b);

/// Components are read off row 0 of the pointwise product; the twisted
/// circulant form is then re-checked at every point (ClosureFailure).
CrossedElement multiply(const CrossedElement& a, const CrossedElement& b);

/// g_j = conj(theta^j(f_{(p-j) mod p})).
CrossedElement adjoint(const CrossedElement& a);

/// max_x ||matrix_at(a, x) - matrix_at(b, x)||
double distance(const CrossedElement& a, const CrossedElement& b);

/// max over x of the distance between the realization of multiply(a, b) and
/// the pointwise matrix product.
double closure_defect(const CrossedElement& a, const CrossedElement& b);

bool vanishes_on_fixed(const CrossedElement& a, double tol);

/// Values of the boundary map on the fixed set. slots[s][i] is the value
/// of slot s (0-based) at fixed_ids[i]. Slot s carries the weights
/// omega^{j (p - 1 - s)}: the first slot pairs with omega^{j(p-1)}, the
/// last slot is the plain sum of the components.
struct BoundaryTuple {
  std::vector<PointId> fixed_ids;
  std::vector<ScalarField> slots;
};

BoundaryTuple pi_boundary(const CrossedElement& a);
BoundaryTuple pointwise_product(const BoundaryTuple& a, const BoundaryTuple& b);
double tuple_distance(const BoundaryTuple& a, const BoundaryTuple& b);
double tuple_norm(const BoundaryTuple& a);

/// Shift permutation U with matrix_at(a, x) = U matrix_at(a, theta^j(x)) U^*.
CMatrix orbit_intertwiner(const PeriodicSpace& space, PointId x, int j);

/// sigma_{x0,k}(a) = sum_j omega^{jk} f_j(x0) for fixed x0.
Complex pure_state(const CrossedElement& a, PointId x0, int k);

/// An element that vanishes on the fixed set and realizes `target` at the
/// non-fixed point x. Values on the orbit of x come from solving the
/// p^2 x p^2 system for f_m(theta^k(x)); elsewhere the values fall off as
/// graph-distance bumps that are zero on the fixed set.
CrossedElement span_witness(SpacePtr space, PointId x, const CMatrix& target);

struct SpanCheckReport {
  PointId point = 0;
  int units = 0;
  int rank = 0;
  double max_residual = 0.0;
  double max_fixed_leak = 0.0;
  int bump_radius = 0;
};

/// Realizes all p^2 matrix units at x by elements vanishing on the fixed set.
SpanCheckReport evaluation_span_check(SpacePtr space, PointId x);

struct EssentialReport {
  bool density_ok = true;
  bool annihilates = false;
  bool element_zero = false;
  /// Nonzero annihilator whose support lies on fixed points that all have
  /// non-fixed neighbours, so it cannot be continuous.
  bool discontinuous_annihilator = false;
  bool essential_ok = true;
  std::optional<PointId> witness_point;
  double max_product_norm = 0.0;
  std::size_t products_checked = 0;
  std::vector<PointId> isolated_support;
  std::string note;
};

/// Looks for an ideal element c (components vanishing on the fixed set)
/// with a c != 0. The first candidate at a non-fixed x is the adjoint of a
/// restricted to the orbit of x, which gives a(x) a(x)^* there. If none is
/// found the matrix units of the ideal and `trials` random ideal elements
/// are multiplied. With strict set, a system failing the density
/// diagnostic raises DensityViolation instead of producing a report.
EssentialReport essential_ideal_check(SpacePtr space, const CrossedElement& a, int trials, std::mt19937_64& rng,
                                      double tol = 1e-9, bool strict = false);

/// Independent complex Gaussian values at every point.
CrossedElement random_element(SpacePtr space, std::mt19937_64& rng);
/// Like random_element but every component vanishes on the fixed set.
CrossedElement random_ideal_element(SpacePtr space, std::mt19937_64& rng);
/// Components are random quadratic polynomials in the point coordinates.
CrossedElement smooth_random_element(SpacePtr space, std::mt19937_64& rng);

}  // namespace xprod
