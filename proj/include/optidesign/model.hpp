#pragma once

// Measurement model: experiments y_e = A_e theta + v_e, a pool of them with a
// Gaussian-style prior (mean, covariance) and a target map z = H theta,
// multiset designs over the pool, the information matrix
// Y(D) = R_theta^{-1} + sum_{e in D} M_e, and the optimal affine estimator
// with its error covariance K(D) = H Y(D)^{-1} H^T.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "optidesign/linalg.hpp"

namespace optidesign {

using linalg::Matrix;
using linalg::SymMatrix;
using linalg::Vector;
using ExperimentId = std::int64_t;

class Experiment {
 public:
  ExperimentId id() const { return id_; }
  const Matrix& A() const { return a_; }
  const SymMatrix& R() const { return r_; }
  /// Information increment M = A^T R^{-1} A.
  const SymMatrix& M() const { return m_; }
  /// SNR gamma = trace(M).
  double gamma() const { return gamma_; }
  /// lambda_max(M).
  double lambda_max() const { return lambda_max_; }
  /// W = L_R^{-1} A, so that M = W^T W and R^{-1} = L_R^{-T} L_R^{-1}.
  const Matrix& whitened() const { return w_; }
  Eigen::Index rows() const { return a_.rows(); }
  Eigen::Index params() const { return a_.cols(); }

 private:
  friend Experiment make_experiment(ExperimentId id, const Matrix& a, const Matrix& r);
  Experiment(ExperimentId id, Matrix a, SymMatrix r, SymMatrix m, Matrix w, double gamma,
             double lambda_max)
      : id_(id), a_(std::move(a)), r_(std::move(r)), m_(std::move(m)), w_(std::move(w)),
        gamma_(gamma), lambda_max_(lambda_max) {}

  ExperimentId id_;
  Matrix a_;
  SymMatrix r_;
  SymMatrix m_;
  Matrix w_;
  double gamma_;
  double lambda_max_;
};

/// Throws NotPositiveDefinite if R is not SPD, DimensionMismatch if A and R
/// disagree on the row count.
Experiment make_experiment(ExperimentId id, const Matrix& a, const Matrix& r);

/// Finite ground set of experiments plus the prior and the target map.
/// Experiments are kept sorted by id; "lowest id" tie-breaks everywhere rely
/// on that ordering.
class Pool {
 public:
  Pool(std::vector<Experiment> experiments, Vector prior_mean, const Matrix& prior_cov,
       Matrix target);

  Eigen::Index p() const { return prior_mean_.size(); }
  Eigen::Index m() const { return target_.rows(); }
  std::size_t size() const { return experiments_.size(); }
  bool empty() const { return experiments_.empty(); }

  std::span<const Experiment> experiments() const { return experiments_; }
  const Experiment& at(std::size_t index) const { return experiments_[index]; }
  const Experiment& experiment(ExperimentId id) const { return experiments_[index_of(id)]; }
  /// Throws UnknownExperimentId.
  std::size_t index_of(ExperimentId id) const;
  bool contains(ExperimentId id) const { return index_.count(id) != 0; }

  const Vector& prior_mean() const { return prior_mean_; }
  const SymMatrix& prior_cov() const { return prior_cov_; }
  /// R_theta^{-1}, computed once.
  const SymMatrix& prior_info() const { return prior_info_; }
  const Matrix& target() const { return target_; }
  /// H R_theta H^T, the error covariance of the empty design.
  const SymMatrix& prior_target_cov() const { return prior_target_cov_; }
  /// m <= p and H has full row rank, so log det K(D) exists.
  bool target_full_row_rank() const { return target_full_row_rank_; }
  /// max_e lambda_max(M_e); 0 for an empty pool.
  double ell_max() const { return ell_max_; }

  /// Same pool with H replaced.
  Pool with_target(Matrix target) const;

 private:
  std::vector<Experiment> experiments_;
  std::unordered_map<ExperimentId, std::size_t> index_;
  Vector prior_mean_;
  SymMatrix prior_cov_;
  SymMatrix prior_info_;
  Matrix target_;
  SymMatrix prior_target_cov_;
  bool target_full_row_rank_ = false;
  double ell_max_ = 0.0;
};

/// Multiset over experiment ids stored as positive multiplicities.
class Design {
 public:
  Design() = default;
  explicit Design(std::map<ExperimentId, int> counts);

  void add(ExperimentId id, int times = 1);
  int count(ExperimentId id) const;
  int size() const { return size_; }
  bool empty() const { return size_ == 0; }
  const std::map<ExperimentId, int>& counts() const { return counts_; }

  /// Count-wise domination: every multiplicity here is <= the one in `other`.
  bool is_subset_of(const Design& other) const;

  friend bool operator==(const Design&, const Design&) = default;

 private:
  std::map<ExperimentId, int> counts_;
  int size_ = 0;
};

/// Throws UnknownExperimentId if some id of `design` is not in `pool`.
void validate_design(const Pool& pool, const Design& design);

SymMatrix information_matrix(const Pool& pool, const Design& design);

/// K(D) = H Y(D)^{-1} H^T.
SymMatrix error_covariance(const Pool& pool, const Design& design);

/// Incremental solver state: Y(D), its inverse (updated with the Woodbury
/// identity on every addition) and the current normalized cost, which the
/// caller owns the meaning of.
class DesignState {
 public:
  static DesignState empty(const Pool& pool);
  static DesignState from_design(const Pool& pool, const Design& design);

  /// Adds one copy of pool.at(index).
  void add(const Pool& pool, std::size_t index);

  const Design& design() const { return design_; }
  const SymMatrix& info() const { return y_; }
  const SymMatrix& info_inverse() const { return y_inv_; }
  double cost() const { return cost_; }
  void set_cost(double c) { cost_ = c; }

 private:
  DesignState(Design d, SymMatrix y, SymMatrix y_inv)
      : design_(std::move(d)), y_(std::move(y)), y_inv_(std::move(y_inv)) {}

  Design design_;
  SymMatrix y_;
  SymMatrix y_inv_;
  double cost_ = 0.0;
};

/// One vector per occurrence of the id in the design.
using Observations = std::map<ExperimentId, std::vector<Vector>>;

struct EstimateResult {
  Vector z_hat;
  SymMatrix K;
};

/// z_hat = H Y^{-1} [sum A_e^T R_e^{-1} y_e + R_theta^{-1} theta_bar].
/// Throws MissingObservation when an occurrence has no vector and
/// DimensionMismatch for wrong lengths or surplus vectors.
EstimateResult estimate(const Pool& pool, const Design& design, const Observations& obs);

}  // namespace optidesign
