#pragma once

// The matrix-function algebra over the orbit space whose values at fixed
// classes are diagonal, and the explicit map from the crossed product onto
// it: Fourier diagonalization at fixed classes, gauge-fixed unitary frames
// at free classes.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "xprod/crossed.hpp"
#include "xprod/matalg.hpp"
#include "xprod/space.hpp"

namespace xprod {

/// p x p matrix per quotient class. Valid elements are diagonal at every
/// fixed class.
class AElement {
 public:
  AElement(SpacePtr space, std::vector<CMatrix> values);

  static AElement zero(SpacePtr space);
  static AElement identity(SpacePtr space);
  /// h(q) * 1_p.
  static AElement scalar(SpacePtr space, const std::vector<Complex>& h);

  const SpacePtr& space() const { return space_; }
  const std::vector<CMatrix>& values() const { return values_; }
  const CMatrix& at(ClassId q) const { return values_.at(q); }

  /// Largest off-diagonal norm over the fixed classes.
  double diagonality_defect() const;
  bool is_valid(double tol) const { return diagonality_defect() <= tol; }

  AElement operator*(const AElement& other) const;
  AElement operator+(const AElement& other) const;
  AElement scaled(Complex s) const;
  AElement adjoint() const;

 private:
  SpacePtr space_;
  std::vector<CMatrix> values_;
};

/// max_q ||a(q) - b(q)||
double distance(const AElement& a, const AElement& b);

/// Gaussian entries; off-diagonal entries at fixed classes are zero.
AElement random_a_element(SpacePtr space, std::mt19937_64& rng);

/// Graph-harmonic function equal to `boundary` on the fixed set (values in
/// fixed_ids() order). Components without fixed points get the boundary mean.
ScalarField harmonic_extension(const PeriodicSpace& space, const ScalarField& boundary);

/// Harmonic extension averaged over orbits: theta-invariant exactly and equal
/// to `boundary` exactly on the fixed set.
ScalarField average_extension(const PeriodicSpace& space, const ScalarField& boundary);

/// sum_j P_{j+1} h_j with h_j the averaged extension of slot j; its boundary
/// tuple reproduces `target`.
CrossedElement boundary_preimage(SpacePtr space, const BoundaryTuple& target);

struct EdgeDefect {
  ClassId a = 0;
  ClassId b = 0;
  double defect = 0.0;
  bool tree = false;
};

/// Unitary frames over the free classes. frames.at(q) acts in the
/// coordinates of representative(q); frame_at(y) transports it to another
/// orbit member.
struct Trivialization {
  SpacePtr space;
  UnitaryField frames;
  SpanningForest forest;
  /// Shift-eigenvalue exponent e_c of column c (shift acts as omega^{e_c}),
  /// lifted to (-p/2, p/2].
  std::vector<int> frequencies;
  std::vector<EdgeDefect> edge_defects;
  double max_tree_defect = 0.0;
  double max_edge_defect = 0.0;
  /// Holonomy of the tree-fixed frames was spread over the cycles.
  bool holonomy_spread = false;
  int sync_sweeps = 0;
  double tolerance = 1.0;
  bool ok = true;

  CMatrix frame_at(PointId y) const;
};

struct TrivializationOptions {
  /// Largest admissible transported-frame jump across a quotient edge.
  double tolerance = 1.0;
  bool spread_holonomy = true;
  int max_sweeps = 20000;
  bool throw_on_failure = true;
};

/// Frames start as the eigenbasis of the orbit shift at each
/// representative, are gauge-fixed along a spanning forest of the free
/// classes (rooted nearest the fixed set), and the remaining cycle
/// holonomy is spread by phase synchronization.
Trivialization build_trivialization(SpacePtr space, const TrivializationOptions& options = {});

/// The map a -> AElement.
class StructureMap {
 public:
  explicit StructureMap(Trivialization triv);

  const SpacePtr& space() const { return triv_.space; }
  const Trivialization& trivialization() const { return triv_; }

  CMatrix value_at(const CrossedElement& a, ClassId q) const;
  AElement apply(const CrossedElement& a) const;

  /// Exact inverse on valid AElements; off-diagonal parts at fixed classes
  /// are dropped.
  CrossedElement inverse(const AElement& b) const;

  /// Smallest singular value of the per-class linear map from the local
  /// component values to the class value; the minimum over classes.
  double injectivity_margin() const;
  /// Largest ||apply(inverse(E)) - E|| over the basis of the finite target.
  double surjectivity_residual() const;

  /// Copy with one frame replaced (fault injection in tests).
  StructureMap with_frame(ClassId q, CMatrix frame) const;

 private:
  CMatrix local_block(ClassId q) const;

  Trivialization triv_;
  CMatrix omega_;
};

struct IsoOptions {
  Tolerances tol;
  int trials = 200;
  int frontier_radius = 2;
  /// Frontier mating defect may not exceed this multiple of the raw sample
  /// variation across the same edges.
  double frontier_factor = 10.0;
  double trivialization_tol = 1.0;
  std::uint64_t seed = 0;
};

struct DefectReport {
  int trials = 0;
  double homomorphism = 0.0;
  double adjoint = 0.0;
  double injectivity_margin = 0.0;
  double surjectivity_residual = 0.0;
};

struct IsoCertificate {
  bool pass = false;
  std::vector<std::string> failures;
  std::vector<std::string> notes;

  bool density_ok = true;
  bool trivialization_ok = true;
  double max_tree_defect = 0.0;
  double max_edge_defect = 0.0;
  double trivialization_tol = 1.0;
  bool holonomy_spread = false;
  std::vector<std::size_t> roots;
  std::vector<std::pair<ClassId, ClassId>> tree_edges;

  DefectReport defects;
  double diagonality_defect = 0.0;
  double well_definedness_defect = 0.0;

  int frontier_radius = 0;
  std::vector<ClassId> frontier_classes;
  /// min over diagonal phases D of ||frame - Omega^* D|| on band classes.
  double frontier_frame_coherence = 0.0;
  double frontier_mating_defect = 0.0;
  double frontier_raw_variation = 0.0;
  double frontier_factor = 10.0;

  /// Informational: largest jump of the image across free quotient edges
  /// for smooth elements, against the raw variation on sample edges.
  double continuity_defect = 0.0;
  double raw_variation = 0.0;

  Tolerances tol;
};

struct StructureResult {
  StructureMap map;
  IsoCertificate certificate;
};

/// Builds the trivialization and the map and certifies it. Trivialization
/// failure and frontier incoherence are recorded in the certificate; the
/// map is still returned.
StructureResult structure_isomorphism(SpacePtr space, const IsoOptions& options = {});

DefectReport verify_isomorphism(const StructureMap& map, int trials, std::mt19937_64& rng);

/// For random elements: well-definedness on the quotient, i.e. the image at
/// a class computed from any orbit member after transport agrees.
double well_definedness_defect(const StructureMap& map, int trials, std::mt19937_64& rng);

struct ExactnessReport {
  /// Kernel of the boundary map goes to elements vanishing at fixed classes.
  double kernel_to_vanishing = 0.0;
  /// Elements vanishing at fixed classes pull back into the kernel.
  double vanishing_to_kernel = 0.0;
};

ExactnessReport sequence_exactness(const StructureMap& map, int trials, std::mt19937_64& rng);

}  // namespace xprod
