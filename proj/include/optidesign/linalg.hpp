#pragma once

// Dense symmetric / PSD matrix substrate. Storage and the symmetric
// eigensolver come from Eigen; the factorization, its pivot rule and the
// low-rank inverse update are implemented here.

#include <Eigen/Core>

namespace optidesign::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Square symmetric matrix. Construction rejects inputs whose asymmetry
/// exceeds 1e-9 * max(1, max|S|) and stores (S + S^T) / 2, so the stored
/// entries are exactly symmetric.
class SymMatrix {
 public:
  explicit SymMatrix(const Matrix& m);

  static SymMatrix identity(Eigen::Index dim);
  static SymMatrix scaled_identity(Eigen::Index dim, double scale);

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  double trace() const { return m_.trace(); }

 private:
  Matrix m_;
};

/// Lower-triangular L with S = L L^T and strictly positive diagonal.
class CholFactor {
 public:
  Eigen::Index dim() const { return l_.rows(); }
  const Matrix& lower() const { return l_; }

 private:
  friend CholFactor cholesky(const SymMatrix& s);
  explicit CholFactor(Matrix l) : l_(std::move(l)) {}
  Matrix l_;
};

struct EigRange {
  double min = 0.0;
  double max = 0.0;
};

/// Throws NotPositiveDefinite when a pivot is <= dim * 1e-14 * max diagonal.
CholFactor cholesky(const SymMatrix& s);

/// Solves S X = B for the S that produced `f`.
Matrix solve_psd(const CholFactor& f, const Matrix& b);

/// S^{-1} as a SymMatrix.
SymMatrix inverse(const CholFactor& f);

EigRange extreme_eigs(const SymMatrix& s);

/// 2 * sum(log(diag L)) = log det S.
double logdet(const CholFactor& f);

/// Left factor G of the Woodbury correction: with C = R_u + A_u Y^{-1} A_u^T
/// and C = L_C L_C^T, G = L_C^{-1} A_u Y^{-1}, so that
///   (Y + A_u^T R_u^{-1} A_u)^{-1} = Y^{-1} - G^T G.
/// Throws NotPositiveDefinite if C cannot be factored.
Matrix woodbury_factor(const SymMatrix& y_inv, const Matrix& a_u, const SymMatrix& r_u);

/// (Y + A_u^T R_u^{-1} A_u)^{-1} computed from Y^{-1}.
SymMatrix woodbury_update(const SymMatrix& y_inv, const Matrix& a_u, const SymMatrix& r_u);

/// True when every eigenvalue is >= -1e-8 * max(1, lambda_max).
bool is_psd(const SymMatrix& s);

/// Largest absolute entry, 0 for an empty matrix.
double max_abs(const Matrix& m);

}  // namespace optidesign::linalg
