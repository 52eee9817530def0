#pragma once

// Synthetic pools and the random-design baseline.
//
// SNR convention for the sweeps: SNR_dB = 10 log10(n_e / sigma_v^2), since
// E[gamma_e] = n_e / sigma_v^2 when A_e has i.i.d. N(0, 1/p) entries.
//
// All generators use std::mt19937_64 with std::normal_distribution or
// std::uniform_int_distribution; outputs are reproducible per seed within
// this implementation (libstdc++ distributions), not across languages.

#include <cstdint>
#include <optional>

#include "optidesign/model.hpp"

namespace optidesign {

struct SynthSpec {
  int p = 20;
  int n_e = 5;
  int pool_size = 200;
  double noise_var = 10.0;
  double prior_var = 1.0;
  std::uint64_t seed = 0;
  /// Target map; identity when unset.
  std::optional<Matrix> target;
};

/// Experiments get ids 0..pool_size-1. Throws InvalidArgument on a
/// non-positive field.
Pool synth_pool(const SynthSpec& spec);

/// sigma_v^2 = n_e * 10^(-snr_db / 10).
double snr_db_to_noise_var(double snr_db, int n_e);
double noise_var_to_snr_db(double noise_var, int n_e);

/// k i.i.d. uniform draws over the pool (with replacement).
Design random_design(const Pool& pool, int k, std::uint64_t seed);

}  // namespace optidesign
