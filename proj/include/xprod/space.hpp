#pragma once

// Finite discretizations of a compact space carrying a homeomorphism of
// prime period p: the sample graph, the periodic permutation, orbits,
// the fixed-point set and the orbit space.

#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include "xprod/error.hpp"

namespace xprod {

using PointId = std::size_t;
using ClassId = std::size_t;
using Edge = std::pair<std::size_t, std::size_t>;

struct Point {
  PointId id = 0;
  std::vector<double> coords;
};

/// Raw system data as read from a file or produced by a scenario generator.
/// Ids are dense: points[i].id == i and theta[i] is the image of point i.
struct SampledSystem {
  int period = 2;
  std::vector<Point> points;
  std::vector<Edge> edges;
  std::vector<PointId> theta;
};

struct ValidationIssue {
  ErrorCode code;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> errors;
  /// Warning-level issues; DensityViolation is the only one at present.
  std::vector<ValidationIssue> warnings;
  std::vector<PointId> fixed_ids;
  /// Every fixed point has at least one non-fixed graph neighbour.
  bool density_ok = true;
  std::size_t components = 0;

  bool ok() const { return errors.empty(); }
};

bool is_prime(int n);

ValidationReport validate(const SampledSystem& system);

/// Orbits of theta. Class order follows the smallest id of each orbit, and
/// each class lists rep, theta(rep), theta^2(rep), ... with rep = min id.
struct OrbitSpace {
  std::vector<std::vector<PointId>> classes;
  std::vector<ClassId> projection;
  /// Images of the sample edges with self-loops removed, sorted, unique.
  std::vector<Edge> edges;
};

/// Requires a system whose theta is a permutation.
OrbitSpace orbits(const SampledSystem& system);

/// Validated, immutable system with its derived orbit data. Elements of
/// the algebras hold a shared pointer to one of these.
class PeriodicSpace {
 public:
  /// Throws the first validation error. Density problems are kept as
  /// warnings and exposed through density_ok().
  static std::shared_ptr<const PeriodicSpace> create(SampledSystem system);

  const SampledSystem& system() const { return system_; }
  const ValidationReport& validation() const { return report_; }
  const OrbitSpace& orbit_space() const { return orbits_; }

  int period() const { return system_.period; }
  std::size_t size() const { return system_.points.size(); }
  std::size_t class_count() const { return orbits_.classes.size(); }

  /// theta^k(x) for any integer k.
  PointId theta(PointId x, int k = 1) const;

  bool is_fixed(PointId x) const { return fixed_flag_[x]; }
  const std::vector<PointId>& fixed_ids() const { return report_.fixed_ids; }
  /// Position of a fixed id inside fixed_ids().
  std::size_t fixed_index(PointId x) const;
  bool density_ok() const { return report_.density_ok; }

  ClassId class_of(PointId x) const { return orbits_.projection[x]; }
  PointId representative(ClassId q) const { return orbits_.classes[q].front(); }
  bool is_fixed_class(ClassId q) const { return orbits_.classes[q].size() == 1; }
  /// The j with x == theta^j(representative(class_of(x))).
  int orbit_offset(PointId x) const { return offset_[x]; }

  std::vector<ClassId> fixed_classes() const;
  std::vector<ClassId> free_classes() const;

  const std::vector<std::vector<PointId>>& neighbors() const { return point_adj_; }
  const std::vector<std::vector<ClassId>>& class_neighbors() const { return class_adj_; }

  void require_point(PointId x) const;

 private:
  PeriodicSpace() = default;

  SampledSystem system_;
  ValidationReport report_;
  OrbitSpace orbits_;
  std::vector<std::vector<PointId>> powers_;  // powers_[k][x] = theta^k(x)
  std::vector<bool> fixed_flag_;
  std::vector<std::size_t> fixed_pos_;
  std::vector<int> offset_;
  std::vector<std::vector<PointId>> point_adj_;
  std::vector<std::vector<ClassId>> class_adj_;
};

using SpacePtr = std::shared_ptr<const PeriodicSpace>;

/// Quotient-graph distance of every class to the nearest fixed class;
/// -1 where no fixed class is reachable.
std::vector<int> distance_to_fixed(const PeriodicSpace& space);

/// Non-fixed classes within graph distance <= radius of a fixed class.
std::vector<ClassId> frontier_band(const PeriodicSpace& space, int radius);

/// Breadth-first distances from a point set over the sample graph
/// (-1 when unreachable).
std::vector<int> point_distances(const PeriodicSpace& space, const std::vector<PointId>& sources);

}  // namespace xprod
