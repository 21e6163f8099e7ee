#include "xprod/classify.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace xprod {

namespace {

std::set<Edge> edge_set(const std::vector<Edge>& edges) {
  std::set<Edge> out;
  for (auto [a, b] : edges) out.insert({std::min(a, b), std::max(a, b)});
  return out;
}

bool is_bijection(const std::vector<std::size_t>& f, std::size_t n) {
  if (f.size() != n) return false;
  std::vector<bool> hit(n, false);
  for (auto v : f) {
    if (v >= n || hit[v]) return false;
    hit[v] = true;
  }
  return true;
}

using SparseImage = std::map<ClassId, CMatrix>;

SparseImage sparse(const AElement& a, double tol) {
  SparseImage out;
  for (ClassId q = 0; q < a.values().size(); ++q)
    if (a.at(q).norm() > tol) out.emplace(q, a.at(q));
  return out;
}

double sparse_distance(const SparseImage& a, const SparseImage& b) {
  double worst = 0.0;
  for (const auto& [q, m] : a) {
    auto it = b.find(q);
    worst = std::max(worst, it == b.end() ? m.norm() : (m - it->second).norm());
  }
  for (const auto& [q, m] : b)
    if (!a.count(q)) worst = std::max(worst, m.norm());
  return worst;
}

SparseImage sparse_product(const SparseImage& a, const SparseImage& b) {
  SparseImage out;
  for (const auto& [q, m] : a) {
    auto it = b.find(q);
    if (it != b.end()) out.emplace(q, m * it->second);
  }
  return out;
}

}  // namespace

QuotientMap verify_quotient_homeo(const PeriodicSpace& from, const PeriodicSpace& to, std::vector<ClassId> forward) {
  const std::size_t n = from.class_count();
  if (to.class_count() != n || forward.size() != n)
    throw Error(ErrorCode::SizeMismatch, "quotient maps need equal class counts (" + std::to_string(n) + " vs " +
                                             std::to_string(to.class_count()) + ", map of length " +
                                             std::to_string(forward.size()) + ")");
  for (auto v : forward)
    if (v >= n) throw Error(ErrorCode::MalformedInput, "class index " + std::to_string(v) + " out of range");

  QuotientMap out;
  out.forward = std::move(forward);
  out.bijective = is_bijection(out.forward, n);

  out.preserves_fixed = true;
  for (ClassId q = 0; q < n; ++q)
    if (from.is_fixed_class(q) != to.is_fixed_class(out.forward[q])) out.preserves_fixed = false;

  if (out.bijective) {
    const auto target = edge_set(to.orbit_space().edges);
    std::set<Edge> image;
    for (auto [a, b] : from.orbit_space().edges) {
      ClassId fa = out.forward[a], fb = out.forward[b];
      image.insert({std::min(fa, fb), std::max(fa, fb)});
    }
    out.preserves_edges = image == target;
  }
  return out;
}

QuotientMap identity_quotient_map(const PeriodicSpace& space) {
  std::vector<ClassId> id(space.class_count());
  for (ClassId q = 0; q < id.size(); ++q) id[q] = q;
  return verify_quotient_homeo(space, space, std::move(id));
}

AElement induced_isomorphism(const QuotientMap& map, SpacePtr source, const AElement& b,
                             const InducedOptions& options) {
  const auto& target = *b.space();
  if (source->period() != target.period())
    throw Error(ErrorCode::SizeMismatch, "systems have different periods");
  QuotientMap checked = verify_quotient_homeo(*source, target, map.forward);
  if (!checked.bijective) throw Error(ErrorCode::NotHomeo, "class map is not a bijection");
  if (options.require_edges && !checked.preserves_edges)
    throw Error(ErrorCode::NotHomeo, "class map does not preserve quotient adjacency");
  if (options.require_fixed && !checked.preserves_fixed)
    throw Error(ErrorCode::NotFixedPreserving, "class map does not carry fixed classes onto fixed classes");

  std::vector<CMatrix> values(source->class_count());
  for (ClassId q = 0; q < values.size(); ++q) values[q] = b.at(checked.forward[q]);
  return AElement(std::move(source), std::move(values));
}

AlgebraBasis::AlgebraBasis(SpacePtr space) : space_(std::move(space)) {
  const int p = space_->period();
  for (ClassId q = 0; q < space_->class_count(); ++q) {
    if (space_->is_fixed_class(q)) {
      for (int i = 0; i < p; ++i) units_.push_back({q, i, i});
    } else {
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) units_.push_back({q, i, j});
    }
  }
}

AElement AlgebraBasis::element(std::size_t k) const {
  AElement out = AElement::zero(space_);
  std::vector<CMatrix> values = out.values();
  const Unit& u = units_.at(k);
  values[u.cls](u.row, u.col) = 1.0;
  return AElement(space_, std::move(values));
}

CVector AlgebraBasis::coordinates(const AElement& a) const {
  CVector v(static_cast<Eigen::Index>(units_.size()));
  for (std::size_t k = 0; k < units_.size(); ++k) v(static_cast<Eigen::Index>(k)) = a.at(units_[k].cls)(units_[k].row, units_[k].col);
  return v;
}

AElement AlgebraBasis::from_coordinates(const CVector& v) const {
  if (static_cast<std::size_t>(v.size()) != units_.size())
    throw Error(ErrorCode::SizeMismatch, "coordinate vector has the wrong length");
  const int p = space_->period();
  std::vector<CMatrix> values(space_->class_count(), CMatrix::Zero(p, p));
  for (std::size_t k = 0; k < units_.size(); ++k) values[units_[k].cls](units_[k].row, units_[k].col) = v(static_cast<Eigen::Index>(k));
  return AElement(space_, std::move(values));
}

CMatrix induced_matrix(const QuotientMap& map, SpacePtr source, SpacePtr target, const InducedOptions& options) {
  AlgebraBasis in(target), out(source);
  CMatrix m(static_cast<Eigen::Index>(out.dimension()), static_cast<Eigen::Index>(in.dimension()));
  for (std::size_t k = 0; k < in.dimension(); ++k)
    m.col(static_cast<Eigen::Index>(k)) = out.coordinates(induced_isomorphism(map, source, in.element(k), options));
  return m;
}

OrbitEquivalence orbit_equivalence_check(const PeriodicSpace& a, const PeriodicSpace& b,
                                         const std::vector<PointId>& points) {
  if (a.period() != b.period()) throw Error(ErrorCode::SizeMismatch, "systems have different periods");
  if (a.size() != b.size() || points.size() != a.size())
    throw Error(ErrorCode::SizeMismatch, "point map must be defined on every point of equally sized systems");

  OrbitEquivalence out;
  if (!is_bijection(points, b.size())) {
    out.issues.push_back("point map is not a bijection");
    return out;
  }

  out.orbits_preserved = true;
  for (const auto& cls : a.orbit_space().classes) {
    const ClassId target = b.class_of(points[cls.front()]);
    bool same = b.orbit_space().classes[target].size() == cls.size();
    for (PointId x : cls) same = same && b.class_of(points[x]) == target;
    if (!same) {
      out.orbits_preserved = false;
      out.issues.push_back("orbit of point " + std::to_string(cls.front()) + " is not carried onto an orbit");
    }
  }

  std::set<Edge> image;
  for (auto [x, y] : a.system().edges) image.insert({std::min(points[x], points[y]), std::max(points[x], points[y])});
  out.point_homeomorphism = image == edge_set(b.system().edges);
  if (!out.point_homeomorphism) out.issues.push_back("point map does not preserve sample adjacency");

  out.equivalent = out.orbits_preserved;
  if (out.equivalent) {
    std::vector<ClassId> forward(a.class_count());
    for (ClassId q = 0; q < forward.size(); ++q) forward[q] = b.class_of(points[a.representative(q)]);
    out.induced = verify_quotient_homeo(a, b, std::move(forward));
  }
  return out;
}

std::vector<int> center_dimensions(const PeriodicSpace& space) {
  const int p = space.period();
  std::vector<int> out;
  out.reserve(space.class_count());
  for (ClassId q = 0; q < space.class_count(); ++q) {
    std::vector<CMatrix> units;
    if (space.is_fixed_class(q)) {
      for (int i = 0; i < p; ++i) units.push_back(matrix_unit(p, i, i));
    } else {
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) units.push_back(matrix_unit(p, i, j));
    }
    const auto n = static_cast<Eigen::Index>(units.size());
    // Rows: entries of [X, E_k] for every unit E_k; columns: coordinates of X.
    CMatrix system(n * p * p, n);
    for (Eigen::Index l = 0; l < n; ++l)
      for (Eigen::Index k = 0; k < n; ++k) {
        CMatrix c = units[l] * units[k] - units[k] * units[l];
        system.block(k * p * p, l, p * p, 1) = Eigen::Map<CVector>(c.data(), p * p);
      }
    Eigen::FullPivLU<CMatrix> lu(system);
    out.push_back(static_cast<int>(n - lu.rank()));
  }
  return out;
}

Recovery recover_quotient_map(SpacePtr domain, SpacePtr codomain, const CMatrix& theta, double tol) {
  AlgebraBasis in(domain), out(codomain);
  if (static_cast<std::size_t>(theta.cols()) != in.dimension() ||
      static_cast<std::size_t>(theta.rows()) != out.dimension())
    throw Error(ErrorCode::SizeMismatch, "theta is " + std::to_string(theta.rows()) + "x" +
                                             std::to_string(theta.cols()) + ", expected " +
                                             std::to_string(out.dimension()) + "x" + std::to_string(in.dimension()));
  if (domain->period() != codomain->period()) throw Error(ErrorCode::NotIsomorphism, "periods differ");

  Recovery rec;
  for (int d : center_dimensions(*domain)) rec.center_domain += d;
  for (int d : center_dimensions(*codomain)) rec.center_codomain += d;
  if (rec.center_domain != rec.center_codomain)
    throw Error(ErrorCode::CenterMismatch, "center dimensions " + std::to_string(rec.center_domain) + " and " +
                                               std::to_string(rec.center_codomain) + " differ");
  if (in.dimension() != out.dimension())
    throw Error(ErrorCode::NotIsomorphism, "algebra dimensions differ");
  Eigen::FullPivLU<CMatrix> lu(theta);
  if (static_cast<std::size_t>(lu.rank()) != in.dimension())
    throw Error(ErrorCode::NotIsomorphism, "theta is not invertible");

  // *-homomorphism on all pairs of basis units.
  const std::size_t dim = in.dimension();
  std::map<std::tuple<ClassId, int, int>, std::size_t> index;
  for (std::size_t k = 0; k < dim; ++k) index[{in.units()[k].cls, in.units()[k].row, in.units()[k].col}] = k;
  std::vector<SparseImage> images(dim);
  for (std::size_t k = 0; k < dim; ++k)
    images[k] = sparse(out.from_coordinates(theta.col(static_cast<Eigen::Index>(k))), 0.0);
  const SparseImage empty;
  for (std::size_t k = 0; k < dim; ++k) {
    const auto& u = in.units()[k];
    auto adj = index.find({u.cls, u.col, u.row});
    SparseImage star;
    for (const auto& [q, m] : images[k]) star.emplace(q, m.adjoint());
    rec.adjoint_defect = std::max(rec.adjoint_defect, sparse_distance(star, images[adj->second]));
    for (std::size_t l = 0; l < dim; ++l) {
      const auto& v = in.units()[l];
      const SparseImage* expected = &empty;
      if (u.cls == v.cls && u.col == v.row) expected = &images[index.at({u.cls, u.row, v.col})];
      rec.homomorphism_defect =
          std::max(rec.homomorphism_defect, sparse_distance(sparse_product(images[k], images[l]), *expected));
    }
  }
  if (rec.homomorphism_defect > tol || rec.adjoint_defect > tol)
    throw Error(ErrorCode::NotIsomorphism, "theta is not a *-homomorphism (defects " +
                                               std::to_string(rec.homomorphism_defect) + ", " +
                                               std::to_string(rec.adjoint_defect) + ")");

  // Central indicators chi_{q'} 1 of the domain land on single classes.
  const int p = domain->period();
  const std::size_t n = codomain->class_count();
  std::vector<long> forward(n, -1);
  for (ClassId qd = 0; qd < domain->class_count(); ++qd) {
    CVector chi = CVector::Zero(static_cast<Eigen::Index>(dim));
    for (int i = 0; i < p; ++i) chi(static_cast<Eigen::Index>(index.at({qd, i, i}))) = 1.0;
    SparseImage img = sparse(out.from_coordinates(theta * chi), tol);
    if (img.size() != 1 || (img.begin()->second - CMatrix::Identity(p, p)).norm() > tol) {
      rec.issues.push_back("domain class " + std::to_string(qd) + " is not carried onto a single class");
      continue;
    }
    ClassId qc = img.begin()->first;
    if (forward[qc] >= 0) {
      rec.issues.push_back("codomain class " + std::to_string(qc) + " is hit twice");
      continue;
    }
    forward[qc] = static_cast<long>(qd);
  }
  if (!rec.issues.empty()) {
    rec.issues.push_back("fixed-set mismatch: central projections are not matched class by class");
    return rec;
  }

  std::vector<ClassId> f(n);
  for (ClassId q = 0; q < n; ++q) f[q] = static_cast<ClassId>(forward[q]);
  rec.map = verify_quotient_homeo(*codomain, *domain, std::move(f));
  if (!rec.map.preserves_fixed) rec.issues.push_back("fixed-set mismatch: a fixed class is matched with a free class");

  for (ClassId qc : codomain->fixed_classes()) {
    const ClassId qd = rec.map.forward[qc];
    if (!domain->is_fixed_class(qd)) continue;
    rec.fixed_correspondence.push_back({qc, qd});
    std::vector<int> perm(p, -1);
    for (int i = 0; i < p; ++i) {
      SparseImage img = images[index.at({qd, i, i})];
      for (int j = 0; j < p; ++j)
        if (img.size() == 1 && img.begin()->first == qc && (img.begin()->second - matrix_unit(p, j, j)).norm() <= tol)
          perm[j] = i;
    }
    rec.slot_permutations.push_back(perm);
  }
  rec.ok = rec.issues.empty() && rec.map.bijective && rec.map.preserves_fixed;
  return rec;
}

}  // namespace xprod
