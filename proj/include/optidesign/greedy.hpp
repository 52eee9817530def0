#pragma once

#include <vector>

#include "optidesign/criteria.hpp"

namespace optidesign {

struct GreedyStep {
  int iteration = 0;  // 1-based h
  ExperimentId chosen = 0;
  double gain = 0.0;
  double cost_after = 0.0;
};

struct GreedyTrace {
  std::vector<GreedyStep> steps;
  Design final_design;
  Criterion criterion = Criterion::A;
  int ell = 0;
  bool with_replacement = true;

  double final_cost() const { return steps.empty() ? 0.0 : steps.back().cost_after; }
};

/// Gains closer than this are treated as equal and the lower id wins.
inline constexpr double kGainTieTolerance = 1e-12;

/// Index into `gains` of the winning candidate: largest gain, ties within
/// kGainTieTolerance resolved towards the earlier (lower id) entry.
std::size_t select_best(const std::vector<GainRecord>& gains);

/// Multiset greedy recursion G_h = G_{h-1} + argmax_u [f(G_{h-1}) - f(G_{h-1} + u)]
/// run for `ell` steps. Without replacement every experiment is used at most
/// once and ell > |pool| throws PoolExhausted. cost_after of a step is the
/// previous cost minus the chosen gain.
GreedyTrace greedy_design(const Pool& pool, Criterion criterion, int ell,
                          bool with_replacement = true, Execution exec = Execution::parallel);

}  // namespace optidesign
