#include "optidesign/model.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <string>

#include "optidesign/errors.hpp"

namespace optidesign {

using linalg::cholesky;
using linalg::CholFactor;

Experiment make_experiment(ExperimentId id, const Matrix& a, const Matrix& r) {
  if (a.rows() < 1 || a.cols() < 1) {
    throw DimensionMismatch("experiment " + std::to_string(id) + ": A must be non-empty");
  }
  if (r.rows() != a.rows() || r.cols() != a.rows()) {
    throw DimensionMismatch("experiment " + std::to_string(id) + ": A has " +
                            std::to_string(a.rows()) + " rows but R is " +
                            std::to_string(r.rows()) + "x" + std::to_string(r.cols()));
  }
  if (!a.allFinite()) {
    throw InvalidArgument("experiment " + std::to_string(id) + ": A has non-finite entries");
  }
  SymMatrix rs(r);
  CholFactor lr = [&] {
    try {
      return cholesky(rs);
    } catch (const NotPositiveDefinite& e) {
      throw NotPositiveDefinite("noise covariance of experiment " + std::to_string(id) +
                                " is not SPD (" + e.what() + ")");
    }
  }();
  Matrix w = lr.lower().triangularView<Eigen::Lower>().solve(a);
  SymMatrix m(w.transpose() * w);
  const double gamma = m.trace();
  const double lmax = std::max(0.0, linalg::extreme_eigs(m).max);
  return Experiment(id, a, std::move(rs), std::move(m), std::move(w), gamma, lmax);
}

namespace {

SymMatrix checked_prior(const Matrix& prior_cov) {
  SymMatrix s(prior_cov);
  try {
    (void)cholesky(s);
  } catch (const NotPositiveDefinite& e) {
    throw NotPositiveDefinite(std::string("prior covariance is not SPD (") + e.what() + ")");
  }
  return s;
}

SymMatrix prior_inverse(const SymMatrix& prior_cov) {
  return linalg::inverse(cholesky(prior_cov));
}

bool full_row_rank(const Matrix& h) {
  if (h.rows() > h.cols()) return false;
  Eigen::JacobiSVD<Matrix> svd(h);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s(0) <= 0.0) return false;
  return s(s.size() - 1) > 1e-12 * s(0);
}

}  // namespace

Pool::Pool(std::vector<Experiment> experiments, Vector prior_mean, const Matrix& prior_cov,
           Matrix target)
    : experiments_(std::move(experiments)),
      prior_mean_(std::move(prior_mean)),
      prior_cov_(checked_prior(prior_cov)),
      prior_info_(prior_inverse(prior_cov_)),
      target_(std::move(target)),
      prior_target_cov_(SymMatrix::identity(1)) {
  const Eigen::Index p = prior_mean_.size();
  if (p < 1) throw DimensionMismatch("pool: parameter dimension p must be >= 1");
  if (prior_cov_.dim() != p) {
    throw DimensionMismatch("pool: prior_cov is " + std::to_string(prior_cov_.dim()) +
                            "x" + std::to_string(prior_cov_.dim()) + " but p = " +
                            std::to_string(p));
  }
  if (target_.cols() != p || target_.rows() < 1) {
    throw DimensionMismatch("pool: target must be m x " + std::to_string(p) + " with m >= 1");
  }
  if (!target_.allFinite() || !prior_mean_.allFinite()) {
    throw InvalidArgument("pool: non-finite prior mean or target");
  }
  std::stable_sort(experiments_.begin(), experiments_.end(),
                   [](const Experiment& a, const Experiment& b) { return a.id() < b.id(); });
  for (std::size_t i = 0; i < experiments_.size(); ++i) {
    const Experiment& e = experiments_[i];
    if (e.params() != p) {
      throw DimensionMismatch("experiment " + std::to_string(e.id()) + " has " +
                              std::to_string(e.params()) + " columns, pool has p = " +
                              std::to_string(p));
    }
    if (!index_.emplace(e.id(), i).second) {
      throw InvalidArgument("duplicate experiment id " + std::to_string(e.id()));
    }
    ell_max_ = std::max(ell_max_, e.lambda_max());
  }
  prior_target_cov_ = SymMatrix(target_ * prior_cov_.matrix() * target_.transpose());
  target_full_row_rank_ = full_row_rank(target_);
}

std::size_t Pool::index_of(ExperimentId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw UnknownExperimentId("experiment id " + std::to_string(id) + " is not in the pool");
  }
  return it->second;
}

Pool Pool::with_target(Matrix target) const {
  return Pool(experiments_, prior_mean_, prior_cov_.matrix(), std::move(target));
}

Design::Design(std::map<ExperimentId, int> counts) {
  for (const auto& [id, c] : counts) add(id, c);
}

void Design::add(ExperimentId id, int times) {
  if (times < 0) throw InvalidArgument("design multiplicity must be positive");
  if (times == 0) return;
  counts_[id] += times;
  size_ += times;
}

int Design::count(ExperimentId id) const {
  auto it = counts_.find(id);
  return it == counts_.end() ? 0 : it->second;
}

bool Design::is_subset_of(const Design& other) const {
  return std::all_of(counts_.begin(), counts_.end(),
                     [&](const auto& kv) { return kv.second <= other.count(kv.first); });
}

void validate_design(const Pool& pool, const Design& design) {
  for (const auto& [id, c] : design.counts()) (void)pool.index_of(id);
}

SymMatrix information_matrix(const Pool& pool, const Design& design) {
  validate_design(pool, design);
  Matrix y = pool.prior_info().matrix();
  for (const auto& [id, c] : design.counts()) {
    y += static_cast<double>(c) * pool.experiment(id).M().matrix();
  }
  return SymMatrix(y);
}

SymMatrix error_covariance(const Pool& pool, const Design& design) {
  if (design.empty()) return pool.prior_target_cov();
  const CholFactor f = cholesky(information_matrix(pool, design));
  const Matrix& h = pool.target();
  const Matrix y_inv_ht = linalg::solve_psd(f, h.transpose());
  return SymMatrix(h * y_inv_ht);
}

DesignState DesignState::empty(const Pool& pool) {
  return DesignState(Design{}, pool.prior_info(), pool.prior_cov());
}

DesignState DesignState::from_design(const Pool& pool, const Design& design) {
  if (design.empty()) return empty(pool);
  SymMatrix y = information_matrix(pool, design);
  SymMatrix y_inv = linalg::inverse(cholesky(y));
  return DesignState(design, std::move(y), std::move(y_inv));
}

void DesignState::add(const Pool& pool, std::size_t index) {
  const Experiment& e = pool.at(index);
  const Eigen::Index n = e.rows();
  y_inv_ = linalg::woodbury_update(y_inv_, e.whitened(), SymMatrix::identity(n));
  y_ = SymMatrix(y_.matrix() + e.M().matrix());
  design_.add(e.id());
}

EstimateResult estimate(const Pool& pool, const Design& design, const Observations& obs) {
  validate_design(pool, design);
  for (const auto& [id, ys] : obs) {
    if (ys.size() > static_cast<std::size_t>(design.count(id))) {
      throw DimensionMismatch("experiment " + std::to_string(id) + " has " +
                              std::to_string(ys.size()) + " observations but occurs " +
                              std::to_string(design.count(id)) + " times in the design");
    }
  }
  Vector rhs = pool.prior_info().matrix() * pool.prior_mean();
  for (const auto& [id, c] : design.counts()) {
    const Experiment& e = pool.experiment(id);
    auto it = obs.find(id);
    const std::size_t have = it == obs.end() ? 0 : it->second.size();
    if (have < static_cast<std::size_t>(c)) {
      throw MissingObservation("experiment " + std::to_string(id) + " occurs " +
                               std::to_string(c) + " times but has " + std::to_string(have) +
                               " observation vectors");
    }
    // R^{-1} = L^{-T} L^{-1}, so A^T R^{-1} y = W^T (L^{-1} y).
    const CholFactor lr = cholesky(e.R());
    for (const Vector& y : it->second) {
      if (y.size() != e.rows()) {
        throw DimensionMismatch("observation for experiment " + std::to_string(id) +
                                " has length " + std::to_string(y.size()) + ", expected " +
                                std::to_string(e.rows()));
      }
      rhs += e.whitened().transpose() *
             lr.lower().triangularView<Eigen::Lower>().solve(y);
    }
  }
  const CholFactor f = cholesky(information_matrix(pool, design));
  Vector z_hat = pool.target() * linalg::solve_psd(f, rhs);
  return {std::move(z_hat), error_covariance(pool, design)};
}

}  // namespace optidesign
