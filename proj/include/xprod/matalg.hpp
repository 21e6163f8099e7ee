#pragma once

// Small dense complex matrices: the Fourier unitary, its rank-one
// projections, determinant factorization of unitaries, partial isometries
// for rank-one resolutions, and diagonal-phase gauge fixing of unitary
// frames along a spanning forest.

#include <complex>
#include <cstddef>
#include <map>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "xprod/error.hpp"

namespace xprod {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Tolerances used throughout. algebraic is for identities that hold up to
/// rounding; acceptance separates discretization effects from rounding.
struct Tolerances {
  double algebraic = 1e-12;
  double acceptance = 1e-9;
};

/// e^{2 pi i k / p}
Complex root_of_unity(int p, long long k);

/// Frobenius norm; all defects in this library are measured with it.
double norm(const CMatrix& m);
double max_abs(const CMatrix& m);

bool is_unitary(const CMatrix& m, double tol);
bool is_projection(const CMatrix& m, double tol);
bool is_diagonal(const CMatrix& m, double tol);
double off_diagonal_norm(const CMatrix& m);
double unitarity_defect(const CMatrix& m);

/// Matrix unit E_{ij} (0-based) of size dim.
CMatrix matrix_unit(int dim, int i, int j);

/// Rows 0..p-2 carry powers of omega^{r+1}; the last row is constant.
/// Entry (r, c) = omega^{(r+1) c} / sqrt(p).
CMatrix fourier_unitary(int p);

/// P_j = Omega^* e_j Omega for j = 1..p (returned 0-based).
std::vector<CMatrix> canonical_projections(int p);

struct UnitaryFactor {
  CMatrix u0;
  Complex v;
};

/// U = U0 diag(1, ..., 1, v) with v = det U and det U0 = 1.
UnitaryFactor unitary_factor(const CMatrix& u, double tol = 1e-9);

/// Rank of a self-adjoint projection candidate: eigenvalues above 0.5.
int projection_rank(const CMatrix& q);

/// Given a resolution of the identity by rank-one projections Q_j, returns
/// V_j with V_j^* V_j = Q_j and V_j V_j^* = e_j. Sum of the V_j is unitary.
std::vector<CMatrix> rank_one_partial_isometries(const std::vector<CMatrix>& projections, double tol = 1e-9);

/// Haar-like random unitary: QR of a complex Gaussian matrix with the
/// phases of R's diagonal pushed back into Q.
CMatrix random_unitary(int dim, std::mt19937_64& rng);
CMatrix random_gaussian(int rows, int cols, std::mt19937_64& rng);

using UnitaryField = std::map<std::size_t, CMatrix>;

/// One edge of a spanning forest. The frames are compared as
/// value(parent) ~ link * value(child); link is the identity when the two
/// nodes use the same coordinates.
struct TreeEdge {
  std::size_t parent = 0;
  std::size_t child = 0;
  CMatrix link;
};

struct SpanningForest {
  std::vector<std::size_t> roots;
  /// Edges in breadth-first order, so parents are fixed before children.
  std::vector<TreeEdge> edges;
};

/// ||value(parent) - link * value(child)|| for every tree edge, same order.
std::vector<double> tree_defects(const UnitaryField& field, const SpanningForest& forest);

/// Right-multiplies each child frame by the diagonal phase matrix that
/// aligns its (linked) columns with the parent's columns. Roots are left
/// as they are; zero inner products keep phase 1. Throws DisconnectedTree
/// when some node of the field is not reached by the forest.
UnitaryField gauge_fix(const UnitaryField& field, const SpanningForest& forest);

}  // namespace xprod
