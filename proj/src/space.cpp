#include "xprod/space.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <string>

namespace xprod {

bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

namespace {

std::size_t count_components(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t comps = n;
  for (auto [a, b] : edges) {
    auto ra = find(a), rb = find(b);
    if (ra != rb) {
      parent[ra] = rb;
      --comps;
    }
  }
  return comps;
}

}  // namespace

ValidationReport validate(const SampledSystem& system) {
  ValidationReport report;
  const std::size_t n = system.points.size();
  const int p = system.period;

  for (std::size_t i = 0; i < n; ++i) {
    if (system.points[i].id != i) {
      report.errors.push_back({ErrorCode::MalformedInput,
                               "point ids must be dense 0..n-1 in order; index " + std::to_string(i) +
                                   " carries id " + std::to_string(system.points[i].id)});
      return report;
    }
  }

  if (!is_prime(p)) {
    report.errors.push_back({ErrorCode::NonPrimePeriod, "period " + std::to_string(p) + " is not prime"});
    return report;
  }

  if (system.theta.size() != n) {
    report.errors.push_back({ErrorCode::NonBijectiveTheta, "theta has " + std::to_string(system.theta.size()) +
                                                                " entries for " + std::to_string(n) + " points"});
    return report;
  }
  std::vector<bool> hit(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    PointId y = system.theta[i];
    if (y >= n || hit[y]) {
      report.errors.push_back({ErrorCode::NonBijectiveTheta,
                               "theta is not a permutation (image of " + std::to_string(i) + " is " +
                                   std::to_string(y) + ")"});
      return report;
    }
    hit[y] = true;
  }

  // theta^p == id, theta != id, and free points have exact orbit length p.
  bool any_moved = false;
  for (std::size_t x = 0; x < n; ++x) {
    PointId y = x;
    int first_return = 0;
    for (int k = 1; k <= p; ++k) {
      y = system.theta[y];
      if (y == x && first_return == 0) first_return = k;
    }
    if (y != x) {
      report.errors.push_back({ErrorCode::WrongPeriod, "theta^" + std::to_string(p) + " moves point " +
                                                           std::to_string(x)});
      return report;
    }
    if (first_return != 1 && first_return != p) {
      report.errors.push_back({ErrorCode::WrongPeriod, "point " + std::to_string(x) + " has orbit length " +
                                                           std::to_string(first_return)});
      return report;
    }
    if (first_return == 1)
      report.fixed_ids.push_back(x);
    else
      any_moved = true;
  }
  if (n > 0 && !any_moved) {
    report.errors.push_back({ErrorCode::WrongPeriod, "theta is the identity, so its period is 1, not " +
                                                         std::to_string(p)});
    return report;
  }

  for (auto [a, b] : system.edges) {
    if (a >= n || b >= n) {
      report.errors.push_back({ErrorCode::DanglingEdge, "edge (" + std::to_string(a) + "," + std::to_string(b) +
                                                            ") references a missing id"});
      return report;
    }
  }

  report.components = count_components(n, system.edges);

  std::vector<bool> fixed(n, false);
  for (auto x : report.fixed_ids) fixed[x] = true;
  std::vector<bool> touches_free(n, false);
  for (auto [a, b] : system.edges) {
    if (fixed[a] && !fixed[b]) touches_free[a] = true;
    if (fixed[b] && !fixed[a]) touches_free[b] = true;
  }
  for (auto x : report.fixed_ids) {
    if (!touches_free[x]) {
      report.density_ok = false;
      report.warnings.push_back({ErrorCode::DensityViolation,
                                 "fixed point " + std::to_string(x) + " has no non-fixed neighbour"});
    }
  }
  return report;
}

OrbitSpace orbits(const SampledSystem& system) {
  const std::size_t n = system.points.size();
  OrbitSpace out;
  constexpr ClassId unset = static_cast<ClassId>(-1);
  out.projection.assign(n, unset);
  for (PointId x = 0; x < n; ++x) {
    if (out.projection[x] != unset) continue;
    const ClassId q = out.classes.size();
    std::vector<PointId> cls;
    PointId y = x;
    do {
      cls.push_back(y);
      out.projection[y] = q;
      y = system.theta[y];
    } while (y != x);
    out.classes.push_back(std::move(cls));
  }
  std::set<Edge> qedges;
  for (auto [a, b] : system.edges) {
    ClassId qa = out.projection[a], qb = out.projection[b];
    if (qa == qb) continue;
    qedges.insert({std::min(qa, qb), std::max(qa, qb)});
  }
  out.edges.assign(qedges.begin(), qedges.end());
  return out;
}

std::shared_ptr<const PeriodicSpace> PeriodicSpace::create(SampledSystem system) {
  ValidationReport report = validate(system);
  if (!report.ok()) throw Error(report.errors.front().code, report.errors.front().message);

  std::shared_ptr<PeriodicSpace> s(new PeriodicSpace());
  s->report_ = std::move(report);
  s->system_ = std::move(system);
  const auto& sys = s->system_;
  const std::size_t n = sys.points.size();
  const int p = sys.period;

  s->orbits_ = orbits(sys);
  s->powers_.assign(p, std::vector<PointId>(n));
  std::iota(s->powers_[0].begin(), s->powers_[0].end(), 0);
  for (int k = 1; k < p; ++k)
    for (PointId x = 0; x < n; ++x) s->powers_[k][x] = sys.theta[s->powers_[k - 1][x]];

  s->fixed_flag_.assign(n, false);
  s->fixed_pos_.assign(n, static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < s->report_.fixed_ids.size(); ++i) {
    s->fixed_flag_[s->report_.fixed_ids[i]] = true;
    s->fixed_pos_[s->report_.fixed_ids[i]] = i;
  }

  s->offset_.assign(n, 0);
  for (const auto& cls : s->orbits_.classes)
    for (std::size_t j = 0; j < cls.size(); ++j) s->offset_[cls[j]] = static_cast<int>(j);

  s->point_adj_.assign(n, {});
  for (auto [a, b] : sys.edges) {
    if (a == b) continue;
    s->point_adj_[a].push_back(b);
    s->point_adj_[b].push_back(a);
  }
  for (auto& adj : s->point_adj_) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
  s->class_adj_.assign(s->orbits_.classes.size(), {});
  for (auto [a, b] : s->orbits_.edges) {
    s->class_adj_[a].push_back(b);
    s->class_adj_[b].push_back(a);
  }
  for (auto& adj : s->class_adj_) std::sort(adj.begin(), adj.end());
  return s;
}

PointId PeriodicSpace::theta(PointId x, int k) const {
  const int p = period();
  int r = ((k % p) + p) % p;
  return powers_[r][x];
}

std::size_t PeriodicSpace::fixed_index(PointId x) const {
  require_point(x);
  if (!fixed_flag_[x]) throw Error(ErrorCode::NotFixedPoint, "point " + std::to_string(x) + " is not fixed");
  return fixed_pos_[x];
}

std::vector<ClassId> PeriodicSpace::fixed_classes() const {
  std::vector<ClassId> out;
  for (ClassId q = 0; q < class_count(); ++q)
    if (is_fixed_class(q)) out.push_back(q);
  return out;
}

std::vector<ClassId> PeriodicSpace::free_classes() const {
  std::vector<ClassId> out;
  for (ClassId q = 0; q < class_count(); ++q)
    if (!is_fixed_class(q)) out.push_back(q);
  return out;
}

void PeriodicSpace::require_point(PointId x) const {
  if (x >= size()) throw Error(ErrorCode::UnknownPoint, "no point with id " + std::to_string(x));
}

std::vector<int> distance_to_fixed(const PeriodicSpace& space) {
  std::vector<int> dist(space.class_count(), -1);
  std::deque<ClassId> queue;
  for (ClassId q : space.fixed_classes()) {
    dist[q] = 0;
    queue.push_back(q);
  }
  while (!queue.empty()) {
    ClassId q = queue.front();
    queue.pop_front();
    for (ClassId r : space.class_neighbors()[q]) {
      if (dist[r] >= 0) continue;
      dist[r] = dist[q] + 1;
      queue.push_back(r);
    }
  }
  return dist;
}

std::vector<ClassId> frontier_band(const PeriodicSpace& space, int radius) {
  std::vector<ClassId> band;
  if (radius <= 0) return band;
  auto dist = distance_to_fixed(space);
  for (ClassId q = 0; q < dist.size(); ++q)
    if (dist[q] >= 1 && dist[q] <= radius) band.push_back(q);
  return band;
}

std::vector<int> point_distances(const PeriodicSpace& space, const std::vector<PointId>& sources) {
  std::vector<int> dist(space.size(), -1);
  std::deque<PointId> queue;
  for (PointId s : sources) {
    if (dist[s] == 0) continue;
    dist[s] = 0;
    queue.push_back(s);
  }
  while (!queue.empty()) {
    PointId x = queue.front();
    queue.pop_front();
    for (PointId y : space.neighbors()[x]) {
      if (dist[y] >= 0) continue;
      dist[y] = dist[x] + 1;
      queue.push_back(y);
    }
  }
  return dist;
}

}  // namespace xprod
