#include "optidesign/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "optidesign/errors.hpp"

namespace optidesign::linalg {

namespace {

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("symmetric matrix must be square, got " + shape(m));
  }
  if (m.rows() < 1) {
    throw DimensionMismatch("symmetric matrix must have dim >= 1");
  }
  if (!m.allFinite()) {
    throw InvalidArgument("symmetric matrix has non-finite entries");
  }
  const double asym = max_abs(m - m.transpose());
  if (asym > 1e-9 * std::max(1.0, max_abs(m))) {
    throw NotSymmetric("max |S_ij - S_ji| = " + std::to_string(asym));
  }
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::identity(Eigen::Index dim) {
  return SymMatrix(Matrix::Identity(dim, dim));
}

SymMatrix SymMatrix::scaled_identity(Eigen::Index dim, double scale) {
  return SymMatrix(scale * Matrix::Identity(dim, dim));
}

CholFactor cholesky(const SymMatrix& s) {
  const Eigen::Index n = s.dim();
  const Matrix& a = s.matrix();
  const double threshold =
      static_cast<double>(n) * 1e-14 * a.diagonal().cwiseAbs().maxCoeff();
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = a(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (!(pivot > threshold)) {
      throw NotPositiveDefinite("pivot " + std::to_string(j) + " = " +
                                std::to_string(pivot) + " <= " + std::to_string(threshold));
    }
    const double d = std::sqrt(pivot);
    l(j, j) = d;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double v = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / d;
    }
  }
  return CholFactor(std::move(l));
}

Matrix solve_psd(const CholFactor& f, const Matrix& b) {
  if (b.rows() != f.dim()) {
    throw DimensionMismatch("factor is " + std::to_string(f.dim()) + "x" +
                            std::to_string(f.dim()) + ", right-hand side is " + shape(b));
  }
  const auto l = f.lower().triangularView<Eigen::Lower>();
  Matrix y = l.solve(b);
  return l.transpose().solve(y);
}

SymMatrix inverse(const CholFactor& f) {
  return SymMatrix(solve_psd(f, Matrix::Identity(f.dim(), f.dim())));
}

EigRange extreme_eigs(const SymMatrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s.matrix(), Eigen::EigenvaluesOnly);
  const Vector& ev = solver.eigenvalues();  // ascending
  return {ev(0), ev(ev.size() - 1)};
}

double logdet(const CholFactor& f) {
  return 2.0 * f.lower().diagonal().array().log().sum();
}

Matrix woodbury_factor(const SymMatrix& y_inv, const Matrix& a_u, const SymMatrix& r_u) {
  if (a_u.cols() != y_inv.dim() || a_u.rows() != r_u.dim()) {
    throw DimensionMismatch("woodbury: Y^{-1} is " + shape(y_inv.matrix()) + ", A_u is " +
                            shape(a_u) + ", R_u is " + shape(r_u.matrix()));
  }
  const Matrix ay = a_u * y_inv.matrix();  // n_u x p
  const SymMatrix capacitance(r_u.matrix() + ay * a_u.transpose());
  CholFactor lc = [&] {
    try {
      return cholesky(capacitance);
    } catch (const NotPositiveDefinite& e) {
      throw NotPositiveDefinite(std::string("woodbury capacitance block (invalid R_u?): ") +
                                e.what());
    }
  }();
  return lc.lower().triangularView<Eigen::Lower>().solve(ay);
}

SymMatrix woodbury_update(const SymMatrix& y_inv, const Matrix& a_u, const SymMatrix& r_u) {
  const Matrix g = woodbury_factor(y_inv, a_u, r_u);
  return SymMatrix(y_inv.matrix() - g.transpose() * g);
}

bool is_psd(const SymMatrix& s) {
  const EigRange r = extreme_eigs(s);
  return r.min >= -1e-8 * std::max(1.0, r.max);
}

}  // namespace optidesign::linalg
