#pragma once

#include <Eigen/Dense>

#include "nise/errors.hpp"

namespace nise {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Relative pivot threshold below which a column counts as dependent.
inline constexpr double kRankTolerance = 1e-12;

struct EigenSolution {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // column j pairs with eigenvalue j
};

// Lower-triangular L with L * L^T = A. Pivots are checked against
// kRankTolerance times the largest diagonal of A.
Matrix cholesky(const Matrix& a);

// argmin_b ||y - X b||_2 via column-pivoted Householder QR.
Vector least_squares(const Matrix& x, const Vector& y);

// Residuals of each column of Y after projecting onto the column span of X,
// i.e. M Y with M = I - X (X^T X)^{-1} X^T, without forming M.
Matrix residual_maker(const Matrix& x, const Matrix& y);

// Eigendecomposition of a symmetric matrix, eigenvalues ascending.
EigenSolution sym_eig(const Matrix& a);

// Eigenpairs of A v = lambda B v for symmetric A and symmetric
// positive-definite B, via the Cholesky reduction B = L L^T followed by a
// standard symmetric solve on L^{-1} A L^{-T}. Eigenvectors come back
// B-orthonormal, eigenvalues ascending.
EigenSolution gen_sym_eig(const Matrix& a, const Matrix& b);

// True when the matrix is square and symmetric to a relative tolerance.
bool is_symmetric(const Matrix& a, double tol = 1e-8);

// Throws Error if any entry is non-finite.
void require_finite(const Matrix& m, const char* name);

}  // namespace nise
