#include "xprod/structure.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numbers>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

namespace xprod {

// ---------------------------------------------------------------------------
// AElement

AElement::AElement(SpacePtr space, std::vector<CMatrix> values) : space_(std::move(space)), values_(std::move(values)) {
  if (!space_) throw Error(ErrorCode::BaseMismatch, "element without a base space");
  if (values_.size() != space_->class_count())
    throw Error(ErrorCode::MalformedInput, "expected one matrix per quotient class");
  const int p = space_->period();
  for (const auto& m : values_)
    if (m.rows() != p || m.cols() != p) throw Error(ErrorCode::MalformedInput, "class values must be p x p");
}

AElement AElement::zero(SpacePtr space) {
  const int p = space->period();
  const std::size_t nc = space->class_count();
  return AElement(std::move(space), std::vector<CMatrix>(nc, CMatrix::Zero(p, p)));
}

AElement AElement::identity(SpacePtr space) {
  const int p = space->period();
  const std::size_t nc = space->class_count();
  return AElement(std::move(space), std::vector<CMatrix>(nc, CMatrix::Identity(p, p)));
}

AElement AElement::scalar(SpacePtr space, const std::vector<Complex>& h) {
  const int p = space->period();
  std::vector<CMatrix> values;
  values.reserve(h.size());
  for (auto v : h) values.push_back(CMatrix::Identity(p, p) * v);
  return AElement(std::move(space), std::move(values));
}

double AElement::diagonality_defect() const {
  double out = 0.0;
  for (ClassId q : space_->fixed_classes()) out = std::max(out, off_diagonal_norm(values_[q]));
  return out;
}

AElement AElement::operator*(const AElement& other) const {
  if (space_ != other.space_) throw Error(ErrorCode::BaseMismatch, "elements over different systems");
  std::vector<CMatrix> out(values_.size());
  for (std::size_t q = 0; q < values_.size(); ++q) out[q] = values_[q] * other.values_[q];
  return AElement(space_, std::move(out));
}

AElement AElement::operator+(const AElement& other) const {
  if (space_ != other.space_) throw Error(ErrorCode::BaseMismatch, "elements over different systems");
  std::vector<CMatrix> out(values_.size());
  for (std::size_t q = 0; q < values_.size(); ++q) out[q] = values_[q] + other.values_[q];
  return AElement(space_, std::move(out));
}

AElement AElement::scaled(Complex s) const {
  std::vector<CMatrix> out = values_;
  for (auto& m : out) m *= s;
  return AElement(space_, std::move(out));
}

AElement AElement::adjoint() const {
  std::vector<CMatrix> out(values_.size());
  for (std::size_t q = 0; q < values_.size(); ++q) out[q] = values_[q].adjoint();
  return AElement(space_, std::move(out));
}

double distance(const AElement& a, const AElement& b) {
  if (a.space() != b.space()) throw Error(ErrorCode::BaseMismatch, "elements over different systems");
  double out = 0.0;
  for (std::size_t q = 0; q < a.values().size(); ++q) out = std::max(out, (a.at(q) - b.at(q)).norm());
  return out;
}

AElement random_a_element(SpacePtr space, std::mt19937_64& rng) {
  const int p = space->period();
  std::vector<CMatrix> values(space->class_count());
  for (ClassId q = 0; q < values.size(); ++q) {
    values[q] = random_gaussian(p, p, rng);
    if (space->is_fixed_class(q)) values[q] = CMatrix(values[q].diagonal().asDiagonal());
  }
  return AElement(std::move(space), std::move(values));
}

// ---------------------------------------------------------------------------
// Averaging extension

ScalarField harmonic_extension(const PeriodicSpace& space, const ScalarField& boundary) {
  const auto& fixed = space.fixed_ids();
  if (fixed.empty()) throw Error(ErrorCode::EmptyFixedSet, "no fixed points to extend from");
  if (boundary.size() != fixed.size())
    throw Error(ErrorCode::MalformedInput, "boundary data must have one value per fixed point");

  const std::size_t n = space.size();
  ScalarField out(n, Complex(0.0));
  for (std::size_t i = 0; i < fixed.size(); ++i) out[fixed[i]] = boundary[i];

  // Interior unknowns: free points that can reach the fixed set.
  auto reach = point_distances(space, fixed);
  std::vector<long> index(n, -1);
  std::vector<PointId> interior;
  for (PointId x = 0; x < n; ++x)
    if (!space.is_fixed(x) && reach[x] > 0) {
      index[x] = static_cast<long>(interior.size());
      interior.push_back(x);
    }

  if (!interior.empty()) {
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs_re = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(interior.size()));
    Eigen::VectorXd rhs_im = rhs_re;
    for (std::size_t r = 0; r < interior.size(); ++r) {
      const PointId x = interior[r];
      const auto& adj = space.neighbors()[x];
      trip.emplace_back(static_cast<int>(r), static_cast<int>(r), static_cast<double>(adj.size()));
      for (PointId y : adj) {
        if (space.is_fixed(y)) {
          rhs_re(static_cast<Eigen::Index>(r)) += out[y].real();
          rhs_im(static_cast<Eigen::Index>(r)) += out[y].imag();
        } else {
          trip.emplace_back(static_cast<int>(r), static_cast<int>(index[y]), -1.0);
        }
      }
    }
    Eigen::SparseMatrix<double> lap(static_cast<Eigen::Index>(interior.size()),
                                    static_cast<Eigen::Index>(interior.size()));
    lap.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(lap);
    if (solver.info() != Eigen::Success)
      throw Error(ErrorCode::SingularSystem, "graph Laplacian factorization failed");
    Eigen::VectorXd re = solver.solve(rhs_re);
    Eigen::VectorXd im = solver.solve(rhs_im);
    for (std::size_t r = 0; r < interior.size(); ++r)
      out[interior[r]] = Complex(re(static_cast<Eigen::Index>(r)), im(static_cast<Eigen::Index>(r)));
  }

  Complex mean = 0.0;
  for (auto v : boundary) mean += v;
  mean /= static_cast<double>(boundary.size());
  for (PointId x = 0; x < n; ++x)
    if (!space.is_fixed(x) && reach[x] < 0) out[x] = mean;
  return out;
}

ScalarField average_extension(const PeriodicSpace& space, const ScalarField& boundary) {
  ScalarField g = harmonic_extension(space, boundary);
  const double p = static_cast<double>(space.period());
  ScalarField out(g.size());
  for (const auto& cls : space.orbit_space().classes) {
    if (cls.size() == 1) {
      out[cls[0]] = boundary[space.fixed_index(cls[0])];
      continue;
    }
    Complex acc = 0.0;
    for (PointId y : cls) acc += g[y];
    acc /= p;
    for (PointId y : cls) out[y] = acc;
  }
  return out;
}

CrossedElement boundary_preimage(SpacePtr space, const BoundaryTuple& target) {
  const int p = space->period();
  if (static_cast<int>(target.slots.size()) != p || target.fixed_ids != space->fixed_ids())
    throw Error(ErrorCode::BaseMismatch, "boundary tuple does not match the system's fixed set");
  const auto proj = canonical_projections(p);
  const std::size_t n = space->size();
  std::vector<ScalarField> comps(p, ScalarField(n, Complex(0.0)));
  for (int j = 0; j < p; ++j) {
    ScalarField h = average_extension(*space, target.slots[j]);
    for (int m = 0; m < p; ++m) {
      const Complex w = proj[j](0, m);
      for (PointId x = 0; x < n; ++x) comps[m][x] += w * h[x];
    }
  }
  return CrossedElement(std::move(space), std::move(comps));
}

// ---------------------------------------------------------------------------
// Trivialization

namespace {

CMatrix shift(int p, int m) {
  CMatrix s = CMatrix::Zero(p, p);
  for (int k = 0; k < p; ++k) s(((k + m) % p + p) % p, k) = 1.0;
  return s;
}

int lift(int e, int p) {
  e = ((e % p) + p) % p;
  return 2 * e > p ? e - p : e;
}

/// Oriented sample edges (y in the lower class, y' in the higher class)
/// behind every quotient edge between free classes.
std::map<Edge, std::vector<Edge>> free_witnesses(const PeriodicSpace& space) {
  std::map<Edge, std::vector<Edge>> out;
  for (auto [a, b] : space.system().edges) {
    ClassId qa = space.class_of(a), qb = space.class_of(b);
    if (qa == qb || space.is_fixed_class(qa) || space.is_fixed_class(qb)) continue;
    if (qa < qb)
      out[{qa, qb}].push_back({a, b});
    else
      out[{qb, qa}].push_back({b, a});
  }
  for (auto& [key, list] : out) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return out;
}

/// Link such that frame(from-class) ~ link * frame(to-class) across the
/// sample edge (y, y').
CMatrix edge_link(const PeriodicSpace& space, PointId y, PointId y_prime) {
  return shift(space.period(), space.orbit_offset(y) - space.orbit_offset(y_prime));
}

double transported_jump(const PeriodicSpace& space, const UnitaryField& frames, PointId y, PointId y_prime) {
  const int p = space.period();
  CMatrix fy = shift(p, space.orbit_offset(y)).adjoint() * frames.at(space.class_of(y));
  CMatrix fyp = shift(p, space.orbit_offset(y_prime)).adjoint() * frames.at(space.class_of(y_prime));
  return (fy - fyp).norm();
}

/// Eigenbasis of the unit shift, column c carrying eigenvalue omega^{c+1}.
CMatrix shift_eigenframe(int p, std::vector<int>& exponents) {
  CMatrix s = shift(p, 1);
  Eigen::ComplexEigenSolver<CMatrix> es(s);
  CMatrix frame = CMatrix::Zero(p, p);
  exponents.assign(p, 0);
  std::vector<bool> used(p, false);
  for (int i = 0; i < p; ++i) {
    Complex lambda = es.eigenvalues()(i);
    double turns = std::arg(lambda) * p / (2.0 * std::numbers::pi);
    int e = static_cast<int>(std::lround(turns));
    e = ((e % p) + p) % p;
    int col = ((e - 1) % p + p) % p;
    if (used[col]) throw Error(ErrorCode::SingularSystem, "degenerate shift spectrum");
    used[col] = true;
    CVector v = es.eigenvectors().col(i);
    frame.col(col) = v / v.norm();
    exponents[col] = e;
  }
  return frame;
}

std::vector<Complex> synchronize(const std::vector<ClassId>& nodes, const std::vector<std::pair<Edge, Complex>>& links,
                                 int max_sweeps, int& sweeps_used) {
  const std::size_t nf = nodes.size();
  std::map<ClassId, std::size_t> local;
  for (std::size_t i = 0; i < nf; ++i) local[nodes[i]] = i;

  // Adjacency with the convention z[b] ~ rho * z[a] for a link (a, b, rho).
  std::vector<std::vector<std::pair<std::size_t, Complex>>> adj(nf);
  for (const auto& [e, rho] : links) {
    std::size_t a = local.at(e.first), b = local.at(e.second);
    adj[b].push_back({a, rho});
    adj[a].push_back({b, std::conj(rho)});
  }

  std::vector<Complex> z(nf, Complex(1.0));
  if (nf <= 2000) {
    CMatrix lap = CMatrix::Zero(static_cast<Eigen::Index>(nf), static_cast<Eigen::Index>(nf));
    for (std::size_t i = 0; i < nf; ++i) {
      lap(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = static_cast<double>(adj[i].size());
      for (auto [j, w] : adj[i]) lap(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -= w;
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(lap);
    CVector v = es.eigenvectors().col(0);
    double rms = v.norm() / std::sqrt(static_cast<double>(nf));
    double smallest = v.cwiseAbs().minCoeff();
    const auto& ev = es.eigenvalues();
    bool degenerate = nf >= 2 && ev(1) - ev(0) <= 1e-8 * std::max(1.0, std::abs(ev(nf - 1)));
    if (nf >= 2 && (smallest < 0.25 * rms || degenerate)) {
      // Real phases (p = 2) give real modes whose rounding is a saddle of the
      // sweeps below; pair the lowest mode with the next one.
      CVector w = es.eigenvectors().col(1);
      v = v + Complex(0.0, 1.0) * w * (v.norm() / w.norm());
    }
    for (std::size_t i = 0; i < nf; ++i) {
      Complex c = v(static_cast<Eigen::Index>(i));
      z[i] = std::abs(c) > 1e-14 ? c / std::abs(c) : Complex(1.0);
    }
  }

  sweeps_used = 0;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double change = 0.0;
    for (std::size_t i = 0; i < nf; ++i) {
      Complex acc = 0.0;
      for (auto [j, w] : adj[i]) acc += w * z[j];
      if (std::abs(acc) <= 1e-14) continue;
      Complex next = acc / std::abs(acc);
      change = std::max(change, std::abs(next - z[i]));
      z[i] = next;
    }
    sweeps_used = sweep + 1;
    if (change < 1e-13) break;
  }
  // Fix the global phase at the first node.
  if (nf > 0) {
    Complex g = std::conj(z[0]);
    for (auto& v : z) v *= g;
  }
  return z;
}

}  // namespace

CMatrix Trivialization::frame_at(PointId y) const {
  const int p = space->period();
  return shift(p, space->orbit_offset(y)).adjoint() * frames.at(space->class_of(y));
}

Trivialization build_trivialization(SpacePtr space, const TrivializationOptions& options) {
  Trivialization triv;
  triv.space = space;
  triv.tolerance = options.tolerance;
  const int p = space->period();
  const auto free = space->free_classes();
  if (free.empty()) return triv;

  std::vector<int> exponents;
  // The orbit intertwiner is the same shift permutation at every representative.
  const CMatrix base = shift_eigenframe(p, exponents);
  triv.frequencies.resize(p);
  for (int c = 0; c < p; ++c) triv.frequencies[c] = lift(exponents[c], p);
  for (ClassId q : free) triv.frames[q] = base;

  // Spanning forest over the free subgraph, each component rooted at the
  // class nearest the fixed set.
  const auto witnesses = free_witnesses(*space);
  const auto dist = distance_to_fixed(*space);
  std::vector<bool> seen(space->class_count(), false);
  auto rank = [&](ClassId q) { return dist[q] < 0 ? std::numeric_limits<int>::max() : dist[q]; };
  for (ClassId start : free) {
    if (seen[start]) continue;
    // Collect the component, then choose its root.
    std::vector<ClassId> comp;
    std::deque<ClassId> queue{start};
    seen[start] = true;
    while (!queue.empty()) {
      ClassId q = queue.front();
      queue.pop_front();
      comp.push_back(q);
      for (ClassId r : space->class_neighbors()[q])
        if (!seen[r] && !space->is_fixed_class(r)) {
          seen[r] = true;
          queue.push_back(r);
        }
    }
    ClassId root = *std::min_element(comp.begin(), comp.end(), [&](ClassId a, ClassId b) {
      return rank(a) != rank(b) ? rank(a) < rank(b) : a < b;
    });
    triv.forest.roots.push_back(root);
    std::map<ClassId, bool> in_tree{{root, true}};
    queue.assign(1, root);
    while (!queue.empty()) {
      ClassId q = queue.front();
      queue.pop_front();
      for (ClassId r : space->class_neighbors()[q]) {
        if (space->is_fixed_class(r) || in_tree.count(r)) continue;
        in_tree[r] = true;
        const auto& list = witnesses.at({std::min(q, r), std::max(q, r)});
        Edge w = list.front();
        PointId y = q < r ? w.first : w.second;   // in q
        PointId yp = q < r ? w.second : w.first;  // in r
        triv.forest.edges.push_back({q, r, edge_link(*space, y, yp)});
        queue.push_back(r);
      }
    }
  }

  triv.frames = gauge_fix(triv.frames, triv.forest);

  // Remaining holonomy on the non-tree edges, read off the column whose
  // shift exponent is 1.
  const int c1 = 0;
  std::vector<std::pair<Edge, Complex>> links;
  bool nontrivial = false;
  // shift exponent is 1. Every sample witness of a quotient edge counts:
  // coarse grids can join two classes by edges of different holonomy.
  for (const auto& [key, list] : witnesses)
    for (auto [y, yp] : list) {
      CMatrix link = edge_link(*space, y, yp);
      CVector lhs = triv.frames.at(key.first).col(c1);
      CVector rhs = link * triv.frames.at(key.second).col(c1);
      Complex rho = rhs.dot(lhs);  // frame(a) ~ rho * link * frame(b)
      rho = std::abs(rho) > 1e-14 ? rho / std::abs(rho) : Complex(1.0);
      if (std::abs(rho - 1.0) > 1e-9) nontrivial = true;
      // z[b] ~ rho * z[a]
      links.push_back({key, rho});
    }

  if (options.spread_holonomy && nontrivial) {
    std::vector<Complex> z = synchronize(free, links, options.max_sweeps, triv.sync_sweeps);
    for (std::size_t i = 0; i < free.size(); ++i) {
      CMatrix& f = triv.frames.at(free[i]);
      for (int c = 0; c < p; ++c) f.col(c) *= std::pow(z[i], triv.frequencies[c]);
    }
    triv.holonomy_spread = true;
  }

  std::map<Edge, bool> tree_keys;
  for (const auto& e : triv.forest.edges) tree_keys[{std::min(e.parent, e.child), std::max(e.parent, e.child)}] = true;
  for (const auto& [key, list] : witnesses) {
    double worst = 0.0;
    for (auto [y, yp] : list) worst = std::max(worst, transported_jump(*space, triv.frames, y, yp));
    bool tree = tree_keys.count(key) > 0;
    triv.edge_defects.push_back({key.first, key.second, worst, tree});
    triv.max_edge_defect = std::max(triv.max_edge_defect, worst);
  }
  for (double d : tree_defects(triv.frames, triv.forest)) triv.max_tree_defect = std::max(triv.max_tree_defect, d);

  triv.ok = triv.max_edge_defect <= options.tolerance;
  if (!triv.ok && options.throw_on_failure)
    throw Error(ErrorCode::TrivializationFailure, "largest frame jump " + std::to_string(triv.max_edge_defect) +
                                                      " exceeds " + std::to_string(options.tolerance));
  return triv;
}

// ---------------------------------------------------------------------------
// StructureMap

StructureMap::StructureMap(Trivialization triv) : triv_(std::move(triv)), omega_(fourier_unitary(triv_.space->period())) {}

CMatrix StructureMap::value_at(const CrossedElement& a, ClassId q) const {
  const auto& space = *triv_.space;
  const PointId rep = space.representative(q);
  if (space.is_fixed_class(q)) return omega_ * a.matrix_at(rep) * omega_.adjoint();
  const CMatrix& f = triv_.frames.at(q);
  return f.adjoint() * a.matrix_at(rep) * f;
}

AElement StructureMap::apply(const CrossedElement& a) const {
  if (a.space() != triv_.space) throw Error(ErrorCode::BaseMismatch, "element over a different system");
  std::vector<CMatrix> values(triv_.space->class_count());
  for (ClassId q = 0; q < values.size(); ++q) values[q] = value_at(a, q);
  return AElement(triv_.space, std::move(values));
}

CrossedElement StructureMap::inverse(const AElement& b) const {
  const auto& space = *triv_.space;
  if (b.space() != triv_.space) throw Error(ErrorCode::BaseMismatch, "element over a different system");
  const int p = space.period();
  std::vector<ScalarField> comps(p, ScalarField(space.size(), Complex(0.0)));
  for (ClassId q = 0; q < space.class_count(); ++q) {
    const PointId rep = space.representative(q);
    if (space.is_fixed_class(q)) {
      CMatrix diag = CMatrix::Zero(p, p);
      diag.diagonal() = b.at(q).diagonal();
      CMatrix c = omega_.adjoint() * diag * omega_;
      for (int m = 0; m < p; ++m) {
        Complex acc = 0.0;
        for (int k = 0; k < p; ++k) acc += c(k, (k + m) % p);
        comps[m][rep] = acc / static_cast<double>(p);
      }
    } else {
      const CMatrix& f = triv_.frames.at(q);
      CMatrix m_rep = f * b.at(q) * f.adjoint();
      for (int k = 0; k < p; ++k) {
        const PointId y = space.theta(rep, k);
        for (int m = 0; m < p; ++m) comps[m][y] = m_rep(k, (k + m) % p);
      }
    }
  }
  return CrossedElement(triv_.space, std::move(comps));
}

CMatrix StructureMap::local_block(ClassId q) const {
  const auto& space = *triv_.space;
  const int p = space.period();
  if (space.is_fixed_class(q)) {
    CMatrix block(p * p, p);
    for (int m = 0; m < p; ++m) {
      CMatrix c = CMatrix::Zero(p, p);
      for (int k = 0; k < p; ++k) c(k, (k + m) % p) = 1.0;
      CMatrix img = omega_ * c * omega_.adjoint();
      block.col(m) = Eigen::Map<CVector>(img.data(), p * p);
    }
    return block;
  }
  const CMatrix& f = triv_.frames.at(q);
  CMatrix block(p * p, p * p);
  for (int m = 0; m < p; ++m)
    for (int k = 0; k < p; ++k) {
      CMatrix a = CMatrix::Zero(p, p);
      a(k, (k + m) % p) = 1.0;
      CMatrix img = f.adjoint() * a * f;
      block.col(m * p + k) = Eigen::Map<CVector>(img.data(), p * p);
    }
  return block;
}

double StructureMap::injectivity_margin() const {
  double margin = std::numeric_limits<double>::infinity();
  for (ClassId q = 0; q < triv_.space->class_count(); ++q) {
    Eigen::JacobiSVD<CMatrix> svd(local_block(q));
    margin = std::min(margin, svd.singularValues().minCoeff());
  }
  return std::isfinite(margin) ? margin : 0.0;
}

double StructureMap::surjectivity_residual() const {
  const auto& space = *triv_.space;
  const int p = space.period();
  double worst = 0.0;
  for (ClassId q = 0; q < space.class_count(); ++q) {
    CMatrix block = local_block(q);
    Eigen::ColPivHouseholderQR<CMatrix> qr(block);
    const bool fixed = space.is_fixed_class(q);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) {
        if (fixed && i != j) continue;
        CMatrix unit = matrix_unit(p, i, j);
        CVector target = Eigen::Map<CVector>(unit.data(), p * p);
        CVector pre = qr.solve(target);
        worst = std::max(worst, (block * pre - target).norm());
      }
  }
  return worst;
}

StructureMap StructureMap::with_frame(ClassId q, CMatrix frame) const {
  Trivialization t = triv_;
  t.frames.at(q) = std::move(frame);
  return StructureMap(std::move(t));
}

// ---------------------------------------------------------------------------
// Certification

DefectReport verify_isomorphism(const StructureMap& map, int trials, std::mt19937_64& rng) {
  DefectReport report;
  report.trials = trials;
  if (trials <= 0) return report;
  for (int t = 0; t < trials; ++t) {
    CrossedElement a = random_element(map.space(), rng);
    CrossedElement b = random_element(map.space(), rng);
    AElement fa = map.apply(a);
    AElement fb = map.apply(b);
    report.homomorphism = std::max(report.homomorphism, distance(map.apply(multiply(a, b)), fa * fb));
    report.adjoint = std::max(report.adjoint, distance(map.apply(adjoint(a)), fa.adjoint()));
  }
  report.injectivity_margin = map.injectivity_margin();
  report.surjectivity_residual = map.surjectivity_residual();
  return report;
}

double well_definedness_defect(const StructureMap& map, int trials, std::mt19937_64& rng) {
  const auto& space = *map.space();
  const auto& triv = map.trivialization();
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    CrossedElement a = random_element(map.space(), rng);
    for (ClassId q : space.free_classes()) {
      CMatrix ref = map.value_at(a, q);
      for (PointId y : space.orbit_space().classes[q]) {
        CMatrix f = triv.frame_at(y);
        worst = std::max(worst, (f.adjoint() * a.matrix_at(y) * f - ref).norm());
      }
    }
  }
  return worst;
}

ExactnessReport sequence_exactness(const StructureMap& map, int trials, std::mt19937_64& rng) {
  const auto& space = *map.space();
  const int p = space.period();
  ExactnessReport report;
  for (int t = 0; t < trials; ++t) {
    AElement img = map.apply(random_ideal_element(map.space(), rng));
    for (ClassId q : space.fixed_classes()) report.kernel_to_vanishing = std::max(report.kernel_to_vanishing, img.at(q).norm());

    std::vector<CMatrix> values(space.class_count(), CMatrix::Zero(p, p));
    for (ClassId q : space.free_classes()) values[q] = random_gaussian(p, p, rng);
    AElement b(map.space(), std::move(values));
    CrossedElement pre = map.inverse(b);
    for (PointId x : space.fixed_ids())
      for (const auto& f : pre.components())
        report.vanishing_to_kernel = std::max(report.vanishing_to_kernel, std::abs(f[x]));
    report.vanishing_to_kernel = std::max(report.vanishing_to_kernel, distance(map.apply(pre), b));
  }
  return report;
}

StructureResult structure_isomorphism(SpacePtr space, const IsoOptions& options) {
  TrivializationOptions topt;
  topt.tolerance = options.trivialization_tol;
  topt.throw_on_failure = false;
  StructureMap map(build_trivialization(space, topt));
  const auto& triv = map.trivialization();
  const int p = space->period();

  IsoCertificate cert;
  cert.tol = options.tol;
  cert.density_ok = space->density_ok();
  cert.trivialization_ok = triv.ok;
  cert.max_tree_defect = triv.max_tree_defect;
  cert.max_edge_defect = triv.max_edge_defect;
  cert.trivialization_tol = triv.tolerance;
  cert.holonomy_spread = triv.holonomy_spread;
  cert.roots = triv.forest.roots;
  for (const auto& e : triv.forest.edges) cert.tree_edges.push_back({e.parent, e.child});
  cert.frontier_radius = options.frontier_radius;
  cert.frontier_factor = options.frontier_factor;

  std::mt19937_64 rng(options.seed);
  cert.defects = verify_isomorphism(map, options.trials, rng);

  const int diag_trials = std::max(1, std::min(options.trials, 50));
  for (int t = 0; t < diag_trials; ++t) {
    AElement img = map.apply(random_element(space, rng));
    cert.diagonality_defect = std::max(cert.diagonality_defect, img.diagonality_defect());
  }
  cert.well_definedness_defect = well_definedness_defect(map, std::min(diag_trials, 10), rng);

  // Frontier: frames against Omega^* up to diagonal phases, and the jump of
  // the image from band classes into the adjacent fixed classes.
  const CMatrix omega_star = fourier_unitary(p).adjoint();
  cert.frontier_classes = frontier_band(*space, options.frontier_radius);
  for (ClassId q : cert.frontier_classes) {
    const CMatrix& f = triv.frames.at(q);
    double sq = 0.0;
    for (int c = 0; c < p; ++c) sq += 2.0 - 2.0 * std::abs(omega_star.col(c).dot(f.col(c)));
    cert.frontier_frame_coherence = std::max(cert.frontier_frame_coherence, std::sqrt(std::max(0.0, sq)));
  }
  std::vector<Edge> mating_edges;
  std::vector<bool> in_band(space->class_count(), false);
  for (ClassId q : cert.frontier_classes) in_band[q] = true;
  for (auto [a, b] : space->system().edges) {
    bool fa = space->is_fixed(a), fb = space->is_fixed(b);
    if (fa == fb) continue;
    PointId y = fa ? b : a, x = fa ? a : b;
    if (in_band[space->class_of(y)]) mating_edges.push_back({y, x});
  }
  std::vector<Edge> free_edges;
  for (auto [a, b] : space->system().edges)
    if (!space->is_fixed(a) && !space->is_fixed(b) && space->class_of(a) != space->class_of(b))
      free_edges.push_back({a, b});

  const int smooth_trials = std::max(1, std::min(options.trials, 20));
  for (int t = 0; t < smooth_trials; ++t) {
    CrossedElement a = smooth_random_element(space, rng);
    AElement img = map.apply(a);
    for (auto [y, x] : mating_edges) {
      cert.frontier_mating_defect =
          std::max(cert.frontier_mating_defect, (img.at(space->class_of(y)) - img.at(space->class_of(x))).norm());
      cert.frontier_raw_variation = std::max(cert.frontier_raw_variation, (a.matrix_at(y) - a.matrix_at(x)).norm());
    }
    for (auto [y, yp] : free_edges) {
      cert.continuity_defect =
          std::max(cert.continuity_defect, (img.at(space->class_of(y)) - img.at(space->class_of(yp))).norm());
      cert.raw_variation = std::max(cert.raw_variation, (a.matrix_at(y) - a.matrix_at(yp)).norm());
    }
  }

  const double acc = options.tol.acceptance;
  auto fail = [&](ErrorCode code, const std::string& what) {
    cert.failures.push_back(std::string(to_string(code)) + ": " + what);
  };
  if (!triv.ok)
    fail(ErrorCode::TrivializationFailure, "largest frame jump " + std::to_string(triv.max_edge_defect) +
                                               " exceeds " + std::to_string(triv.tolerance));
  if (cert.defects.homomorphism > acc) fail(ErrorCode::NotIsomorphism, "multiplicativity defect above tolerance");
  if (cert.defects.adjoint > acc) fail(ErrorCode::NotIsomorphism, "*-preservation defect above tolerance");
  if (!(cert.defects.injectivity_margin > 0.0)) fail(ErrorCode::NotIsomorphism, "map is not injective");
  if (cert.defects.surjectivity_residual > acc) fail(ErrorCode::NotIsomorphism, "map is not onto the target");
  if (cert.diagonality_defect > options.tol.algebraic)
    fail(ErrorCode::NotIsomorphism, "image is not diagonal at fixed classes");
  if (cert.well_definedness_defect > acc) fail(ErrorCode::NotIsomorphism, "image depends on the orbit member");
  if (cert.frontier_mating_defect > options.frontier_factor * cert.frontier_raw_variation + options.tol.algebraic)
    fail(ErrorCode::FrontierIncoherence, "image jumps at the fixed set by " +
                                             std::to_string(cert.frontier_mating_defect) + " against raw variation " +
                                             std::to_string(cert.frontier_raw_variation));
  if (!cert.density_ok)
    cert.notes.push_back("DensityViolation: some fixed point has no non-fixed neighbour; the structure claim is "
                         "downgraded");
  if (space->fixed_ids().empty()) cert.notes.push_back("no fixed points: the target is the full matrix algebra");
  cert.pass = cert.failures.empty();
  return {std::move(map), std::move(cert)};
}

}  // namespace xprod
