#include "optidesign/datagen.hpp"

#include <cmath>
#include <random>
#include <string>

#include "optidesign/errors.hpp"

namespace optidesign {

Pool synth_pool(const SynthSpec& spec) {
  if (spec.p <= 0 || spec.n_e <= 0 || spec.pool_size <= 0) {
    throw InvalidArgument("synth spec needs p, n_e, pool_size > 0");
  }
  if (!(spec.noise_var > 0.0) || !(spec.prior_var > 0.0) || !std::isfinite(spec.noise_var) ||
      !std::isfinite(spec.prior_var)) {
    throw InvalidArgument("synth spec needs finite noise_var, prior_var > 0");
  }
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(spec.p)));
  const Matrix r = spec.noise_var * Matrix::Identity(spec.n_e, spec.n_e);
  std::vector<Experiment> experiments;
  experiments.reserve(static_cast<std::size_t>(spec.pool_size));
  for (int e = 0; e < spec.pool_size; ++e) {
    Matrix a(spec.n_e, spec.p);
    // Row-major fill so the draw order matches the JSON layout.
    for (int i = 0; i < spec.n_e; ++i) {
      for (int j = 0; j < spec.p; ++j) a(i, j) = normal(rng);
    }
    experiments.push_back(make_experiment(e, a, r));
  }
  Matrix target = spec.target ? *spec.target : Matrix::Identity(spec.p, spec.p);
  return Pool(std::move(experiments), Vector::Zero(spec.p),
              spec.prior_var * Matrix::Identity(spec.p, spec.p), std::move(target));
}

double snr_db_to_noise_var(double snr_db, int n_e) {
  return static_cast<double>(n_e) * std::pow(10.0, -snr_db / 10.0);
}

double noise_var_to_snr_db(double noise_var, int n_e) {
  return 10.0 * std::log10(static_cast<double>(n_e) / noise_var);
}

Design random_design(const Pool& pool, int k, std::uint64_t seed) {
  if (k < 0) throw InvalidArgument("k must be >= 0");
  if (pool.empty()) throw PoolExhausted("random design over an empty pool");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  Design d;
  for (int i = 0; i < k; ++i) d.add(pool.at(pick(rng)).id());
  return d;
}

}  // namespace optidesign
