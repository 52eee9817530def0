#include <gtest/gtest.h>

#include "optidesign/errors.hpp"
#include "optidesign/greedy.hpp"
#include "optidesign/pool_io.hpp"
#include "oracles.hpp"

using namespace optidesign;

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

Pool p1() { return load_pool(OPTIDESIGN_FIXTURES "/p1.json"); }

}  // namespace

TEST(Greedy, ScalarPoolWithReplacement) {
  const GreedyTrace t = greedy_design(p1(), Criterion::A, 2);
  ASSERT_EQ(t.steps.size(), 2u);
  EXPECT_EQ(t.steps[0].chosen, 1);
  EXPECT_EQ(t.steps[1].chosen, 1);
  EXPECT_EQ(t.steps[0].iteration, 1);
  EXPECT_NEAR(t.steps[0].gain, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(t.steps[1].gain, 2.0 / 15.0, 1e-15);
  EXPECT_NEAR(t.final_cost(), -0.8, 1e-15);
  EXPECT_EQ(t.final_design.count(1), 2);
}

TEST(Greedy, ScalarPoolWithoutReplacement) {
  const GreedyTrace t = greedy_design(p1(), Criterion::A, 2, false);
  ASSERT_EQ(t.steps.size(), 2u);
  EXPECT_EQ(t.steps[0].chosen, 1);
  EXPECT_EQ(t.steps[1].chosen, 2);
  EXPECT_NEAR(t.final_cost(), -0.75, 1e-15);
}

TEST(Greedy, EmptyAndExhausted) {
  EXPECT_TRUE(greedy_design(p1(), Criterion::A, 0).steps.empty());
  EXPECT_THROW(greedy_design(p1(), Criterion::A, 3, false), PoolExhausted);
  const Pool empty({}, Vector::Zero(1), scalar(1.0), scalar(1.0));
  EXPECT_THROW(greedy_design(empty, Criterion::A, 1), PoolExhausted);
}

TEST(Greedy, TiesGoToLowestId) {
  const Pool pool({make_experiment(9, scalar(1.0), scalar(1.0)), make_experiment(4, scalar(1.0), scalar(1.0)),
                   make_experiment(6, scalar(1.0), scalar(1.0))},
                  Vector::Zero(1), scalar(1.0), scalar(1.0));
  const GreedyTrace t = greedy_design(pool, Criterion::A, 3, false);
  EXPECT_EQ(t.steps[0].chosen, 4);
  EXPECT_EQ(t.steps[1].chosen, 6);
  EXPECT_EQ(t.steps[2].chosen, 9);
}

TEST(Greedy, SelectBestToleranceWindow) {
  std::vector<GainRecord> g{{1, 0.5}, {2, 0.5 + 0.5e-12}, {3, 0.4}};
  EXPECT_EQ(select_best(g), 0u);
  g[1].gain = 0.5 + 1e-9;
  EXPECT_EQ(select_best(g), 1u);
}

TEST(Greedy, CostAfterTracksRecomputedCost) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Pool pool = oracle::random_pool(seed);
    for (Criterion c : {Criterion::A, Criterion::E, Criterion::D}) {
      const GreedyTrace t = greedy_design(pool, c, 4);
      Design d;
      for (const GreedyStep& s : t.steps) {
        d.add(s.chosen);
        EXPECT_NEAR(s.cost_after, cost(c, pool, d), 1e-9 * std::max(1.0, std::abs(s.cost_after)));
      }
      EXPECT_EQ(d, t.final_design);
    }
  }
}

TEST(Greedy, StepIsArgmaxOfOracleGain) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const Pool pool = oracle::random_pool(seed);
    const GreedyTrace t = greedy_design(pool, Criterion::A, 3);
    Design d;
    for (const GreedyStep& s : t.steps) {
      long double best = -1.0L;
      for (std::size_t u = 0; u < pool.size(); ++u) best = std::max(best, oracle::reference_gain(Criterion::A, pool, d, pool.at(u).id()));
      EXPECT_NEAR(s.gain, static_cast<double>(best), 1e-9);
      d.add(s.chosen);
    }
  }
}

TEST(Greedy, SerialAndParallelIdentical) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Pool pool = oracle::random_pool(seed, {3, 8, 10, 30, 3});
    for (Criterion c : {Criterion::A, Criterion::E, Criterion::D}) {
      const GreedyTrace a = greedy_design(pool, c, 6, true, Execution::serial);
      const GreedyTrace b = greedy_design(pool, c, 6, true, Execution::parallel);
      ASSERT_EQ(a.steps.size(), b.steps.size());
      for (std::size_t i = 0; i < a.steps.size(); ++i) {
        EXPECT_EQ(a.steps[i].chosen, b.steps[i].chosen);
        EXPECT_EQ(a.steps[i].gain, b.steps[i].gain);
        EXPECT_EQ(a.steps[i].cost_after, b.steps[i].cost_after);
      }
    }
  }
}
