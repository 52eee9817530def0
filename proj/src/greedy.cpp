#include "optidesign/greedy.hpp"

#include <numeric>
#include <string>

#include "optidesign/errors.hpp"

namespace optidesign {

std::size_t select_best(const std::vector<GainRecord>& gains) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < gains.size(); ++i) {
    if (gains[i].gain > gains[best].gain + kGainTieTolerance) best = i;
  }
  return best;
}

GreedyTrace greedy_design(const Pool& pool, Criterion criterion, int ell,
                          bool with_replacement, Execution exec) {
  if (ell < 0) throw InvalidArgument("ell must be >= 0");
  GreedyTrace trace;
  trace.criterion = criterion;
  trace.ell = ell;
  trace.with_replacement = with_replacement;
  if (ell == 0) return trace;
  if (pool.empty()) throw PoolExhausted("greedy design on an empty pool");
  if (!with_replacement && static_cast<std::size_t>(ell) > pool.size()) {
    throw PoolExhausted("ell = " + std::to_string(ell) + " exceeds the " +
                        std::to_string(pool.size()) + " experiments available without replacement");
  }

  std::vector<std::size_t> candidates(pool.size());
  std::iota(candidates.begin(), candidates.end(), std::size_t{0});

  DesignState state = DesignState::empty(pool);
  double current = 0.0;
  trace.steps.reserve(static_cast<std::size_t>(ell));
  for (int h = 1; h <= ell; ++h) {
    const std::vector<GainRecord> gains = evaluate_gains(criterion, pool, state, candidates, exec);
    const std::size_t pick = select_best(gains);
    const std::size_t index = candidates[pick];
    current -= gains[pick].gain;
    state.add(pool, index);
    state.set_cost(current);
    trace.steps.push_back({h, gains[pick].experiment_id, gains[pick].gain, current});
    if (!with_replacement) candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  trace.final_design = state.design();
  return trace;
}

}  // namespace optidesign
