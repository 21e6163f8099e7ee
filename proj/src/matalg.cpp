#include "xprod/matalg.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <string>

namespace xprod {

Complex root_of_unity(int p, long long k) {
  long long r = ((k % p) + p) % p;
  if (r == 0) return {1.0, 0.0};
  if (2 * r == p) return {-1.0, 0.0};
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / p;
  return {std::cos(angle), std::sin(angle)};
}

double norm(const CMatrix& m) { return m.norm(); }

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double unitarity_defect(const CMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols())).norm();
}

bool is_unitary(const CMatrix& m, double tol) { return unitarity_defect(m) <= tol; }

bool is_projection(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).norm() <= tol && (m * m - m).norm() <= tol;
}

double off_diagonal_norm(const CMatrix& m) {
  CMatrix off = m;
  off.diagonal().setZero();
  return off.norm();
}

bool is_diagonal(const CMatrix& m, double tol) { return off_diagonal_norm(m) <= tol; }

CMatrix matrix_unit(int dim, int i, int j) {
  CMatrix e = CMatrix::Zero(dim, dim);
  e(i, j) = 1.0;
  return e;
}

CMatrix fourier_unitary(int p) {
  if (p < 1) throw Error(ErrorCode::NonPositiveDim, "Fourier unitary needs p >= 1, got " + std::to_string(p));
  const double scale = 1.0 / std::sqrt(static_cast<double>(p));
  CMatrix omega(p, p);
  for (int r = 0; r < p; ++r)
    for (int c = 0; c < p; ++c) omega(r, c) = root_of_unity(p, static_cast<long long>(r + 1) * c) * scale;
  return omega;
}

std::vector<CMatrix> canonical_projections(int p) {
  const CMatrix omega = fourier_unitary(p);
  std::vector<CMatrix> out;
  out.reserve(p);
  for (int j = 0; j < p; ++j) {
    // Omega^* e_j Omega is the outer product of row j with itself.
    CVector row = omega.row(j).transpose();
    out.push_back(row.conjugate() * row.transpose());
  }
  return out;
}

UnitaryFactor unitary_factor(const CMatrix& u, double tol) {
  if (!is_unitary(u, tol))
    throw Error(ErrorCode::NotUnitary, "unitarity defect " + std::to_string(unitarity_defect(u)));
  const Complex v = u.determinant();
  CMatrix u0 = u;
  u0.col(u.cols() - 1) *= std::conj(v);
  return {std::move(u0), v};
}

int projection_rank(const CMatrix& q) {
  CMatrix herm = 0.5 * (q + q.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
  int rank = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > 0.5) ++rank;
  return rank;
}

std::vector<CMatrix> rank_one_partial_isometries(const std::vector<CMatrix>& projections, double tol) {
  const int p = static_cast<int>(projections.size());
  if (p == 0) throw Error(ErrorCode::NotResolution, "empty family of projections");
  CMatrix sum = CMatrix::Zero(p, p);
  for (const auto& q : projections) {
    if (q.rows() != p || q.cols() != p)
      throw Error(ErrorCode::NotResolution, "projection size does not match the family size");
    sum += q;
  }
  if ((sum - CMatrix::Identity(p, p)).norm() > tol)
    throw Error(ErrorCode::NotResolution, "projections do not sum to the identity");
  for (int i = 0; i < p; ++i) {
    if ((projections[i] - projections[i].adjoint()).norm() > tol)
      throw Error(ErrorCode::NotResolution, "Q_" + std::to_string(i + 1) + " is not self-adjoint");
    int rank = projection_rank(projections[i]);
    if (rank != 1)
      throw Error(ErrorCode::RankNotOne, "Q_" + std::to_string(i + 1) + " has rank " + std::to_string(rank));
  }
  for (int i = 0; i < p; ++i) {
    if ((projections[i] * projections[i] - projections[i]).norm() > tol)
      throw Error(ErrorCode::NotResolution, "Q_" + std::to_string(i + 1) + " is not idempotent");
    for (int j = i + 1; j < p; ++j)
      if ((projections[i] * projections[j]).norm() > tol)
        throw Error(ErrorCode::NotResolution, "Q_" + std::to_string(i + 1) + " and Q_" + std::to_string(j + 1) +
                                                  " are not orthogonal");
  }

  std::vector<CMatrix> out;
  out.reserve(p);
  for (int j = 0; j < p; ++j) {
    CMatrix herm = 0.5 * (projections[j] + projections[j].adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(herm);
    CVector q = es.eigenvectors().col(p - 1);  // eigenvalue ~ 1
    // Make the largest entry real and positive; ties go to the lowest index.
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < q.size(); ++i)
      if (std::abs(q(i)) > std::abs(q(best)) + 1e-12) best = i;
    q *= std::conj(q(best)) / std::abs(q(best));
    CMatrix v = CMatrix::Zero(p, p);
    v.row(j) = q.adjoint();
    out.push_back(std::move(v));
  }
  return out;
}

CMatrix random_gaussian(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMatrix g(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) {
      double re = gauss(rng);
      double im = gauss(rng);
      g(r, c) = Complex(re, im);
    }
  return g;
}

CMatrix random_unitary(int dim, std::mt19937_64& rng) {
  CMatrix g = random_gaussian(dim, dim, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(dim, dim);
  CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < dim; ++i) {
    Complex d = r(i, i);
    if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
  }
  return q;
}

std::vector<double> tree_defects(const UnitaryField& field, const SpanningForest& forest) {
  std::vector<double> out;
  out.reserve(forest.edges.size());
  for (const auto& e : forest.edges) {
    const CMatrix& parent = field.at(e.parent);
    const CMatrix& child = field.at(e.child);
    CMatrix linked = e.link.size() == 0 ? child : CMatrix(e.link * child);
    out.push_back((parent - linked).norm());
  }
  return out;
}

UnitaryField gauge_fix(const UnitaryField& field, const SpanningForest& forest) {
  std::set<std::size_t> reached(forest.roots.begin(), forest.roots.end());
  for (const auto& e : forest.edges) {
    if (!reached.count(e.parent))
      throw Error(ErrorCode::DisconnectedTree,
                  "tree edge " + std::to_string(e.parent) + "->" + std::to_string(e.child) +
                      " appears before its parent is reached");
    reached.insert(e.child);
  }
  for (const auto& [node, value] : field) {
    (void)value;
    if (!reached.count(node))
      throw Error(ErrorCode::DisconnectedTree, "node " + std::to_string(node) + " is not spanned by the forest");
  }

  UnitaryField out = field;
  for (const auto& e : forest.edges) {
    const CMatrix& parent = out.at(e.parent);
    CMatrix& child = out.at(e.child);
    CMatrix linked = e.link.size() == 0 ? child : CMatrix(e.link * child);
    for (Eigen::Index c = 0; c < child.cols(); ++c) {
      Complex ip = linked.col(c).dot(parent.col(c));  // <linked_c, parent_c>
      double mag = std::abs(ip);
      if (mag <= 1e-14) continue;
      child.col(c) *= ip / mag;
    }
  }
  return out;
}

}  // namespace xprod
