#include <gtest/gtest.h>

#include <random>

#include "optidesign/errors.hpp"
#include "optidesign/model.hpp"
#include "optidesign/pool_io.hpp"
#include "oracles.hpp"

using namespace optidesign;

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

Pool p1() { return load_pool(OPTIDESIGN_FIXTURES "/p1.json"); }

Pool partial_2d() {
  Matrix a(1, 2);
  a << 1.0, 0.0;
  return Pool({make_experiment(7, a, scalar(1.0))}, Vector::Zero(2), Matrix::Identity(2, 2),
              Matrix::Identity(2, 2));
}

}  // namespace

TEST(Experiment, InformationAndSnr) {
  Matrix a(2, 2);
  a << 1.0, 2.0, 0.0, 1.0;
  Matrix r(2, 2);
  r << 2.0, 0.0, 0.0, 0.5;
  const Experiment e = make_experiment(3, a, r);
  const Matrix want = a.transpose() * oracle::to_eigen(oracle::inverse(oracle::to_dense(r))) * a;
  EXPECT_LT((e.M().matrix() - want).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_NEAR(e.gamma(), want.trace(), 1e-14);
  EXPECT_LT((e.whitened().transpose() * e.whitened() - want).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Experiment, RejectsBadNoiseAndShapes) {
  EXPECT_THROW(make_experiment(1, scalar(1.0), scalar(0.0)), NotPositiveDefinite);
  EXPECT_THROW(make_experiment(1, Matrix::Ones(2, 1), scalar(1.0)), DimensionMismatch);
}

TEST(Pool, SortsById) {
  const Pool pool({make_experiment(5, scalar(1.0), scalar(1.0)), make_experiment(2, scalar(2.0), scalar(1.0))},
                  Vector::Zero(1), scalar(1.0), scalar(1.0));
  EXPECT_EQ(pool.at(0).id(), 2);
  EXPECT_EQ(pool.at(1).id(), 5);
  EXPECT_EQ(pool.index_of(5), 1u);
  EXPECT_THROW(pool.index_of(3), UnknownExperimentId);
  EXPECT_DOUBLE_EQ(pool.ell_max(), 4.0);
}

TEST(Pool, ValidatesInputs) {
  EXPECT_THROW(Pool({make_experiment(1, scalar(1.0), scalar(1.0)), make_experiment(1, scalar(1.0), scalar(1.0))},
                    Vector::Zero(1), scalar(1.0), scalar(1.0)),
               InvalidArgument);
  EXPECT_THROW(Pool({}, Vector::Zero(1), scalar(-1.0), scalar(1.0)), NotPositiveDefinite);
  EXPECT_THROW(Pool({}, Vector::Zero(2), scalar(1.0), scalar(1.0)), DimensionMismatch);
  EXPECT_THROW(Pool({make_experiment(1, Matrix::Ones(1, 2), scalar(1.0))}, Vector::Zero(1), scalar(1.0),
                    scalar(1.0)),
               DimensionMismatch);
}

TEST(Design, MultisetOperations) {
  Design a, b;
  a.add(1);
  b.add(1, 2);
  b.add(4);
  EXPECT_EQ(b.size(), 3);
  EXPECT_EQ(b.count(1), 2);
  EXPECT_EQ(b.count(9), 0);
  EXPECT_TRUE(a.is_subset_of(b));
  EXPECT_FALSE(b.is_subset_of(a));
  a.add(1, 2);
  EXPECT_FALSE(a.is_subset_of(b));  // 3 copies vs 2
  EXPECT_THROW(a.add(1, -1), InvalidArgument);
}

TEST(ErrorCovariance, EmptyDesignIsPrior) {
  const Pool pool = oracle::random_pool(3);
  const SymMatrix k = error_covariance(pool, Design{});
  EXPECT_EQ(k.matrix(), pool.prior_target_cov().matrix());
}

TEST(ErrorCovariance, PartialObservation) {
  Design d;
  d.add(7);
  const SymMatrix k = error_covariance(partial_2d(), d);
  EXPECT_NEAR(k(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(k(1, 1), 1.0, 1e-15);
}

TEST(ErrorCovariance, MatchesNaiveAssembly) {
  std::mt19937_64 rng(2);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Pool pool = oracle::random_pool(seed);
    const Design d = oracle::random_multiset(pool, static_cast<int>(seed % 5), rng);
    const Matrix want = oracle::to_eigen(oracle::error_cov(pool, d));
    const Matrix got = error_covariance(pool, d).matrix();
    EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, want.norm())) << "seed " << seed;
  }
}

TEST(ErrorCovariance, UnknownIdRejected) {
  Design d;
  d.add(99);
  EXPECT_THROW(error_covariance(p1(), d), UnknownExperimentId);
}

TEST(DesignState, IncrementalMatchesFromScratch) {
  std::mt19937_64 rng(4);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Pool pool = oracle::random_pool(seed);
    DesignState s = DesignState::empty(pool);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (int step = 0; step < 6; ++step) s.add(pool, pick(rng));
    const DesignState fresh = DesignState::from_design(pool, s.design());
    EXPECT_LT((s.info_inverse().matrix() - fresh.info_inverse().matrix()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((s.info().matrix() - information_matrix(pool, s.design()).matrix()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Estimate, ScalarPosteriorMean) {
  const Pool pool = p1();
  Design d;
  d.add(1);
  const EstimateResult r = estimate(pool, d, {{1, {Vector::Constant(1, 1.0)}}});
  EXPECT_NEAR(r.z_hat(0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.K(0, 0), 1.0 / 3.0, 1e-15);

  d.add(2);
  const EstimateResult r2 =
      estimate(pool, d, {{1, {Vector::Constant(1, 1.0)}}, {2, {Vector::Constant(1, 2.0)}}});
  EXPECT_NEAR(r2.z_hat(0), 1.0, 1e-15);
}

TEST(Estimate, EmptyDesignReturnsPriorMeanImage) {
  const Pool pool = oracle::random_pool(8);
  const EstimateResult r = estimate(pool, Design{}, {});
  EXPECT_LT((r.z_hat - pool.target() * pool.prior_mean()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Estimate, ObservationCountsChecked) {
  const Pool pool = p1();
  Design d;
  d.add(1, 2);
  EXPECT_THROW(estimate(pool, d, {{1, {Vector::Constant(1, 1.0)}}}), MissingObservation);
  EXPECT_THROW(estimate(pool, d, {{1, {Vector::Constant(1, 1.0), Vector::Constant(1, 1.0),
                                        Vector::Constant(1, 1.0)}}}),
               DimensionMismatch);
  EXPECT_THROW(estimate(pool, d, {{1, {Vector::Constant(2, 1.0), Vector::Constant(2, 1.0)}}}),
               DimensionMismatch);
}
