#include "nise/linalg.hpp"

#include <cmath>
#include <string>

namespace nise {

void require_finite(const Matrix& m, const char* name) {
  if (!m.allFinite()) {
    throw Error(std::string(name) + " contains a non-finite entry");
  }
}

bool is_symmetric(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return true;
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

Matrix cholesky(const Matrix& a) {
  if (!is_symmetric(a)) {
    throw Error("cholesky: input is not symmetric");
  }
  const Index n = a.rows();
  const double pivot_floor = kRankTolerance * a.diagonal().maxCoeff();

  Matrix l = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    double pivot = a(j, j) - l.row(j).head(j).squaredNorm();
    if (!(pivot > pivot_floor) || pivot_floor <= 0.0) {
      throw NotPositiveDefinite("cholesky: pivot " + std::to_string(pivot) +
                                " at column " + std::to_string(j) +
                                " is not positive");
    }
    l(j, j) = std::sqrt(pivot);
    for (Index i = j + 1; i < n; ++i) {
      l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
    }
  }
  return l;
}

namespace {

Eigen::ColPivHouseholderQR<Matrix> rank_checked_qr(const Matrix& x,
                                                   const char* where) {
  if (x.rows() < x.cols()) {
    throw Error(std::string(where) + ": fewer rows than columns");
  }
  Eigen::ColPivHouseholderQR<Matrix> qr;
  qr.setThreshold(kRankTolerance);
  qr.compute(x);
  if (qr.rank() < x.cols()) {
    throw RankDeficient(std::string(where) + ": design has rank " +
                        std::to_string(qr.rank()) + " but " +
                        std::to_string(x.cols()) + " columns");
  }
  return qr;
}

}  // namespace

Vector least_squares(const Matrix& x, const Vector& y) {
  if (x.rows() != y.rows()) {
    throw Error("least_squares: row count mismatch");
  }
  return rank_checked_qr(x, "least_squares").solve(y);
}

Matrix residual_maker(const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows()) {
    throw Error("residual_maker: row count mismatch");
  }
  const auto qr = rank_checked_qr(x, "residual_maker");
  return y - x * qr.solve(y);
}

EigenSolution sym_eig(const Matrix& a) {
  if (!is_symmetric(a)) {
    throw Error("sym_eig: input is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) {
    throw NoConvergence("sym_eig: iteration cap exceeded");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

EigenSolution gen_sym_eig(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error("gen_sym_eig: size mismatch between A and B");
  }
  if (!is_symmetric(a)) {
    throw Error("gen_sym_eig: A is not symmetric");
  }
  const Matrix l = cholesky(b);
  const auto lower = l.triangularView<Eigen::Lower>();

  // C = L^{-1} A L^{-T}, symmetrized against round-off.
  Matrix c = lower.solve(a);
  c = lower.solve(c.transpose().eval());
  c = 0.5 * (c + c.transpose()).eval();

  EigenSolution sol = sym_eig(c);
  sol.eigenvectors =
      l.transpose().triangularView<Eigen::Upper>().solve(sol.eigenvectors);
  return sol;
}

}  // namespace nise
