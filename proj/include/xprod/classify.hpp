#pragma once

// Classification layer: quotient maps between orbit spaces, the algebra
// isomorphism they induce, orbit equivalence of point maps, and recovery
// of the quotient map from a linear isomorphism given in matrix form.

#include <optional>
#include <string>
#include <vector>

#include "xprod/structure.hpp"

namespace xprod {

/// Class map from one orbit space into another. The flags are always
/// recomputed by verify_quotient_homeo.
struct QuotientMap {
  std::vector<ClassId> forward;
  bool bijective = false;
  bool preserves_edges = false;
  bool preserves_fixed = false;
};

/// Recomputes the flags of `forward` as a map from the classes of `from`
/// onto the classes of `to`. Edges are preserved when q ~ q' iff
/// F(q) ~ F(q'), which needs a bijection.
QuotientMap verify_quotient_homeo(const PeriodicSpace& from, const PeriodicSpace& to, std::vector<ClassId> forward);

QuotientMap identity_quotient_map(const PeriodicSpace& space);

struct InducedOptions {
  bool require_edges = true;
  bool require_fixed = true;
};

/// Psi(b)(q) = b(F(q)) for b over the target of F; the result lives over
/// the source. Requires matching periods and a bijective F.
AElement induced_isomorphism(const QuotientMap& map, SpacePtr source, const AElement& b,
                             const InducedOptions& options = {});

/// Coordinates of the finite algebra A: p^2 matrix units at each free
/// class, p diagonal units at each fixed class, in class order.
class AlgebraBasis {
 public:
  explicit AlgebraBasis(SpacePtr space);

  struct Unit {
    ClassId cls;
    int row;
    int col;
  };

  const SpacePtr& space() const { return space_; }
  std::size_t dimension() const { return units_.size(); }
  const std::vector<Unit>& units() const { return units_; }
  AElement element(std::size_t k) const;
  /// Drops off-diagonal entries at fixed classes.
  CVector coordinates(const AElement& a) const;
  AElement from_coordinates(const CVector& v) const;

 private:
  SpacePtr space_;
  std::vector<Unit> units_;
};

/// Matrix of the linear map induced by a quotient map, from the basis of
/// the target algebra to the basis of the source algebra.
CMatrix induced_matrix(const QuotientMap& map, SpacePtr source, SpacePtr target, const InducedOptions& options = {});

struct OrbitEquivalence {
  bool orbits_preserved = false;
  /// Bijective and edge-preserving in both directions on sample points.
  bool point_homeomorphism = false;
  bool equivalent = false;
  std::optional<QuotientMap> induced;
  std::vector<std::string> issues;
};

/// Checks that a point bijection from `a` to `b` carries orbits onto
/// orbits and builds the induced class map.
OrbitEquivalence orbit_equivalence_check(const PeriodicSpace& a, const PeriodicSpace& b,
                                         const std::vector<PointId>& points);

/// Dimension of the center of each class block, from the commutant of its
/// matrix units.
std::vector<int> center_dimensions(const PeriodicSpace& space);

struct Recovery {
  bool ok = false;
  /// Class map from the codomain of theta onto its domain, so that
  /// theta(chi_{F(q)} 1) = chi_q 1.
  QuotientMap map;
  /// Fixed class of the codomain -> fixed class of the domain.
  std::vector<std::pair<ClassId, ClassId>> fixed_correspondence;
  /// For each fixed codomain class: slot i receives domain slot perm[i].
  std::vector<std::vector<int>> slot_permutations;
  int center_domain = 0;
  int center_codomain = 0;
  double homomorphism_defect = 0.0;
  double adjoint_defect = 0.0;
  std::vector<std::string> issues;
};

/// theta is dim(codomain) x dim(domain) over the AlgebraBasis coordinates.
/// Throws CenterMismatch when the centers differ in dimension and
/// NotIsomorphism when theta is not an invertible *-homomorphism. A
/// recovered class map that fails to match fixed classes with fixed classes
/// is returned with ok = false and the mismatch in issues.
Recovery recover_quotient_map(SpacePtr domain, SpacePtr codomain, const CMatrix& theta, double tol = 1e-9);

}  // namespace xprod
