#include "optidesign/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "optidesign/certificates.hpp"
#include "optidesign/datagen.hpp"
#include "optidesign/errors.hpp"
#include "optidesign/greedy.hpp"

namespace optidesign {

std::vector<double> SweepConfig::default_grid() {
  std::vector<double> g;
  for (int db = -20; db <= 10; db += 2) g.push_back(db);
  return g;
}

namespace {

SweepRow run_trial(const SweepConfig& cfg, double snr_db, std::uint64_t seed) {
  SynthSpec spec;
  spec.p = cfg.p;
  spec.n_e = cfg.n_e;
  spec.pool_size = cfg.pool_size;
  spec.noise_var = snr_db_to_noise_var(snr_db, cfg.n_e);
  spec.prior_var = cfg.prior_var;
  spec.seed = seed;
  const Pool pool = synth_pool(spec);

  SweepRow row;
  row.snr_db = snr_db;
  row.seed = seed;
  row.criterion = cfg.criterion;
  row.k = cfg.k;
  row.greedy_cost = greedy_design(pool, cfg.criterion, cfg.k, true, Execution::serial).final_cost();
  row.random_cost = cost(cfg.criterion, pool, random_design(pool, cfg.k, derive_seed(seed, 1)));
  if (cfg.criterion == Criterion::A) {
    try {
      row.equiv_alpha = equivalent_alpha(pool_alpha_fn(pool, cfg.tightened), cfg.k, cfg.ell);
    } catch (const DegenerateFactor&) {
    }
  } else if (cfg.criterion == Criterion::E) {
    row.equiv_epsilon = equivalent_epsilon(pool_epsilon_fn(pool), cfg.k, cfg.ell);
  }
  return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepConfig& cfg, Execution exec) {
  if (cfg.seeds < 1 || cfg.k < 1 || cfg.ell < 1) throw InvalidArgument("sweep needs seeds, k, ell >= 1");
  if (cfg.criterion == Criterion::D) throw InvalidArgument("sweeps cover the A and E criteria");
  const std::size_t per_point = static_cast<std::size_t>(cfg.seeds);
  const std::size_t total = cfg.snr_db.size() * per_point;
  std::vector<SweepRow> rows(total);
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(total);
#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel)
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    const auto i = static_cast<std::size_t>(t);
    try {
      rows[i] = run_trial(cfg, cfg.snr_db[i / per_point], cfg.base_seed + i % per_point);
    } catch (...) {
#pragma omp critical(optidesign_sweep_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

namespace {

void put(std::ostringstream& out, const std::optional<double>& v) {
  if (v) out << *v;
}

}  // namespace

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out.precision(12);
  out << "snr_db,seed,criterion,k,greedy_cost,random_cost,equiv_alpha,equiv_epsilon\n";
  for (const SweepRow& r : rows) {
    out << r.snr_db << ',' << r.seed << ',' << to_string(r.criterion) << ',' << r.k << ','
        << r.greedy_cost << ',' << r.random_cost << ',';
    put(out, r.equiv_alpha);
    out << ',';
    put(out, r.equiv_epsilon);
    out << '\n';
  }
  return out.str();
}

double median(std::vector<double> values) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<SweepPoint> sweep_medians(const std::vector<SweepRow>& rows) {
  std::vector<double> order;
  std::map<double, std::vector<double>> by_snr;
  for (const SweepRow& r : rows) {
    if (!by_snr.contains(r.snr_db)) order.push_back(r.snr_db);
    auto& bucket = by_snr[r.snr_db];
    const auto& v = r.criterion == Criterion::A ? r.equiv_alpha : r.equiv_epsilon;
    if (v) bucket.push_back(*v);
  }
  std::vector<SweepPoint> out;
  for (double snr : order) out.push_back({snr, median(by_snr[snr])});
  return out;
}

}  // namespace optidesign
