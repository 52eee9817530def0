#pragma once

// SNR sweeps behind the equivalent-alpha (A criterion) and equivalent-epsilon
// (E criterion) figures: for each SNR on the grid and each seed, a synthetic
// pool is drawn, greedy and a uniformly random design are costed, and the
// pool-level bound is summarized as a single equivalent constant.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "optidesign/criteria.hpp"

namespace optidesign {

struct SweepConfig {
  Criterion criterion = Criterion::A;  // A -> alpha_hat, E -> eps_hat
  int p = 20;
  int n_e = 5;
  int pool_size = 200;
  int k = 40;
  int ell = 40;
  double prior_var = 1.0;
  std::vector<double> snr_db = default_grid();
  int seeds = 10;
  std::uint64_t base_seed = 0;
  bool tightened = false;

  static std::vector<double> default_grid();  // -20, -18, ..., 10
};

struct SweepRow {
  double snr_db = 0.0;
  std::uint64_t seed = 0;
  Criterion criterion = Criterion::A;
  int k = 0;
  double greedy_cost = 0.0;
  double random_cost = 0.0;
  std::optional<double> equiv_alpha;
  std::optional<double> equiv_epsilon;
};

/// Trial (grid point i, seed index s) uses pool seed base_seed + s, so every
/// SNR sees the same observation matrices. Rows come back ordered by grid
/// point, then seed. Trials run in parallel; results do not depend on the
/// thread count.
std::vector<SweepRow> run_sweep(const SweepConfig& cfg, Execution exec = Execution::parallel);

/// Header snr_db,seed,criterion,k,greedy_cost,random_cost,equiv_alpha,equiv_epsilon;
/// columns that do not apply to the criterion are left empty.
std::string sweep_csv(const std::vector<SweepRow>& rows);

struct SweepPoint {
  double snr_db = 0.0;
  double median = 0.0;
};

/// Median over seeds of equiv_alpha (A) or equiv_epsilon (E) per grid point;
/// missing values (degenerate factor) are ignored.
std::vector<SweepPoint> sweep_medians(const std::vector<SweepRow>& rows);

double median(std::vector<double> values);

}  // namespace optidesign
