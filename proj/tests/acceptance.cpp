// Acceptance suite. `acceptance N` runs criterion N, `acceptance` runs all
// twelve. Each criterion prints exactly one PASS/FAIL line; the exit status is
// nonzero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "optidesign/certificates.hpp"
#include "optidesign/datagen.hpp"
#include "optidesign/greedy.hpp"
#include "optidesign/oracle.hpp"
#include "optidesign/recsys.hpp"
#include "optidesign/sweep.hpp"
#include "oracles.hpp"

using namespace optidesign;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Small instances shared by criteria 1-4: p <= 4, |pool| <= 5, n_e <= 2,
// k = ell in {1, 2, 3}.
struct Instance {
  Pool pool;
  int k;
};

std::vector<Instance> small_instances() {
  std::vector<Instance> out;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    out.push_back({oracle::random_pool(1000 + seed, {1, 4, 2, 5, 2}), 1 + static_cast<int>(seed % 3)});
  }
  return out;
}

constexpr double kSlack = 1e-9;

// Theorem 1 certificate for A, with exhaustive and with closed-form alpha.
Outcome criterion_1() {
  int pass_exh = 0, pass_bound = 0, total = 0;
  double worst = -INFINITY;
  for (const Instance& inst : small_instances()) {
    const int k = inst.k, ell = inst.k;
    const double f_star = optimal_design_bruteforce(inst.pool, Criterion::A, k).value;
    const double f_greedy = greedy_design(inst.pool, Criterion::A, ell).final_cost();
    const AuditTables t = audit_tables(inst.pool, Criterion::A, k, ell, true, false);
    const AlphaCertificate exh = alpha_guarantee([&](int a, int b) { return t.alpha_at(a, b); }, k, ell);
    const AlphaCertificate thm = alpha_guarantee(pool_alpha_fn(inst.pool), k, ell);
    const double m1 = f_greedy - (exh.factor_product * f_star + kSlack);
    const double m2 = f_greedy - (thm.factor_product * f_star + kSlack);
    worst = std::max({worst, m1, m2});
    pass_exh += m1 <= 0.0;
    pass_bound += m2 <= 0.0;
    ++total;
  }
  return {pass_exh == total && pass_bound == total,
          std::to_string(pass_exh) + "/" + std::to_string(total) + " (exhaustive alpha), " +
              std::to_string(pass_bound) + "/" + std::to_string(total) + " (closed-form alpha); worst margin " +
              fmt("%.3e", worst)};
}

// Theorem 2 certificate (first line) for E.
Outcome criterion_2() {
  int pass_exh = 0, pass_bound = 0, total = 0;
  double worst = -INFINITY;
  for (const Instance& inst : small_instances()) {
    const int k = inst.k, ell = inst.k;
    const double f_star = optimal_design_bruteforce(inst.pool, Criterion::E, k).value;
    const double f_greedy = greedy_design(inst.pool, Criterion::E, ell).final_cost();
    const AuditTables t = audit_tables(inst.pool, Criterion::E, k, ell, false, true);
    const EpsilonCertificate exh =
        epsilon_guarantee([&](int a, int b) { return t.epsilon_at(a, b); }, k, ell, f_star);
    const EpsilonCertificate thm = epsilon_guarantee(pool_epsilon_fn(inst.pool), k, ell, f_star);
    const double m1 = f_greedy - (exh.product_bound(f_star) + kSlack);
    const double m2 = f_greedy - (thm.product_bound(f_star) + kSlack);
    worst = std::max({worst, m1, m2});
    pass_exh += m1 <= 0.0;
    pass_bound += m2 <= 0.0;
    ++total;
  }
  return {pass_exh == total && pass_bound == total,
          std::to_string(pass_exh) + "/" + std::to_string(total) + " (exhaustive epsilon), " +
              std::to_string(pass_bound) + "/" + std::to_string(total) +
              " (closed-form epsilon); worst margin " + fmt("%.3e", worst)};
}

// Exhaustive values against the closed-form bounds on every (a, b).
Outcome criterion_3() {
  int pairs = 0, bad = 0;
  double worst_alpha = INFINITY, worst_eps = INFINITY;
  for (const Instance& inst : small_instances()) {
    const int k = inst.k, ell = inst.k;
    const AuditTables ta = audit_tables(inst.pool, Criterion::A, k, ell, true, false);
    const AuditTables te = audit_tables(inst.pool, Criterion::E, k, ell, false, true);
    for (const AuditEntry& e : ta.alpha) {
      const double gap = e.value - alpha_bound_a(inst.pool, e.a);
      worst_alpha = std::min(worst_alpha, gap);
      bad += gap < -kSlack;
      ++pairs;
    }
    for (const AuditEntry& e : te.epsilon) {
      const double gap = epsilon_bound_e(inst.pool, e.a, e.b) - e.value;
      worst_eps = std::min(worst_eps, gap);
      bad += gap < -kSlack;
      ++pairs;
    }
  }
  return {bad == 0, std::to_string(pairs - bad) + "/" + std::to_string(pairs) +
                        " (a, b) checks; min alpha slack " + fmt("%.3e", worst_alpha) + ", min epsilon slack " +
                        fmt("%.3e", worst_eps)};
}

// D criterion is supermodular: epsilon <= 0 and alpha >= 1 on every pair.
Outcome criterion_4() {
  int pairs = 0, bad = 0;
  double max_eps = -INFINITY, min_alpha = INFINITY;
  for (const Instance& inst : small_instances()) {
    const AuditTables t = audit_tables(inst.pool, Criterion::D, inst.k, inst.k, true, true);
    for (const AuditEntry& e : t.epsilon) {
      max_eps = std::max(max_eps, e.value);
      bad += e.value > kSlack;
      ++pairs;
    }
    for (const AuditEntry& e : t.alpha) {
      min_alpha = std::min(min_alpha, e.value);
      bad += e.value < 1.0 - kSlack;
      ++pairs;
    }
  }
  return {bad == 0, std::to_string(pairs - bad) + "/" + std::to_string(pairs) + " checks; max epsilon " +
                        fmt("%.3e", max_eps) + ", min alpha " + fmt("%.12f", min_alpha)};
}

std::string medians_text(const std::vector<SweepPoint>& pts) {
  std::ostringstream s;
  for (std::size_t i = 0; i < pts.size(); ++i) s << (i ? " " : "") << pts[i].snr_db << ":" << fmt("%.3f", pts[i].median);
  return s.str();
}

// Equivalent alpha sweep: band at -10 dB and monotone decrease.
Outcome criterion_5() {
  const auto start = std::chrono::steady_clock::now();
  SweepConfig cfg;  // p = 20, n_e = 5, |pool| = 200, k = ell = 40, sigma_theta^2 = 1, 10 seeds
  const std::vector<SweepPoint> pts = sweep_medians(run_sweep(cfg));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  double at_minus_10 = NAN;
  bool monotone = true;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].snr_db == -10.0) at_minus_10 = pts[i].median;
    if (i > 0 && pts[i].median > pts[i - 1].median) monotone = false;
  }
  const bool in_band = at_minus_10 >= 0.60 && at_minus_10 <= 0.90;
  return {in_band && monotone && secs < 300.0,
          "median alpha_hat at -10 dB = " + fmt("%.4f", at_minus_10) + " (band [0.60, 0.90]: " +
              (in_band ? "in" : "OUT") + "), nonincreasing: " + (monotone ? "yes" : "NO") + ", " +
              fmt("%.1f", secs) + " s; medians " + medians_text(pts)};
}

// Greedy against random designs at low SNR.
Outcome criterion_6() {
  const int trials = 20;
  int wins = 0;
  for (int t = 0; t < trials; ++t) {
    SynthSpec spec;  // p = 20, n_e = 5, |pool| = 200
    spec.noise_var = 10.0;
    spec.prior_var = 1.0;
    spec.seed = 600 + static_cast<std::uint64_t>(t);
    const Pool pool = synth_pool(spec);
    const GreedyTrace g = greedy_design(pool, Criterion::A, 40);
    bool all = true;
    for (int k : {10, 20, 30, 40}) {
      const double greedy_cost = g.steps[static_cast<std::size_t>(k - 1)].cost_after;
      const double random_cost = a_cost(pool, random_design(pool, k, derive_seed(spec.seed, k)));
      all = all && greedy_cost <= random_cost;
    }
    wins += all;
  }
  return {wins >= 19, std::to_string(wins) + "/" + std::to_string(trials) +
                          " trials with greedy <= random at every k in {10, 20, 30, 40} (need >= 95%)"};
}

// Equivalent epsilon sweep: monotone increase.
Outcome criterion_7() {
  SweepConfig cfg;
  cfg.criterion = Criterion::E;
  const std::vector<SweepPoint> pts = sweep_medians(run_sweep(cfg));
  bool monotone = true;
  for (std::size_t i = 1; i < pts.size(); ++i) monotone = monotone && pts[i].median >= pts[i - 1].median;
  return {monotone, std::string("median eps_hat nondecreasing: ") + (monotone ? "yes" : "NO") + "; medians " +
                        medians_text(pts)};
}

// Monte-Carlo MSE against trace K, and optimality of the affine estimator.
Outcome criterion_8() {
  int mc_ok = 0, opt_ok = 0, opt_total = 0;
  double worst_z = 0.0;
  std::mt19937_64 rng(808);
  for (int i = 0; i < 5; ++i) {
    const Pool pool = oracle::random_pool(800 + static_cast<std::uint64_t>(i));
    const Design d = oracle::random_multiset(pool, 3, rng);
    const MonteCarloResult mc = monte_carlo_mse(pool, d, 100000, 8000 + static_cast<std::uint64_t>(i));
    const double trace_k = error_covariance(pool, d).trace();
    const double z = std::abs(mc.mse - trace_k) / mc.std_error;
    worst_z = std::max(worst_z, z);
    mc_ok += z <= 3.0;
    const OptimalityReport r = estimator_optimality_check(pool, d, 50, 9000 + static_cast<std::uint64_t>(i));
    opt_ok += r.passed;
    opt_total += static_cast<int>(r.trials.size());
  }
  return {mc_ok == 5 && opt_ok == opt_total,
          "Monte-Carlo within 3 SE on " + std::to_string(mc_ok) + "/5 instances (max " + fmt("%.2f", worst_z) +
              " SE); optimality check " + std::to_string(opt_ok) + "/" + std::to_string(opt_total) + " perturbations"};
}

// Rank-update A gain against recomputed costs.
Outcome criterion_9() {
  std::mt19937_64 rng(909);
  double worst = 0.0;
  int cases = 0;
  for (std::uint64_t seed = 0; cases < 500; ++seed) {
    const Pool pool = oracle::random_pool(9000 + seed, {1, 6, 2, 6, 3});
    const Design d = oracle::random_multiset(pool, static_cast<int>(seed % 5), rng);
    const DesignState s = DesignState::from_design(pool, d);
    for (std::size_t u = 0; u < pool.size() && cases < 500; ++u, ++cases) {
      Design du = d;
      du.add(pool.at(u).id());
      const double direct = a_cost(pool, d) - a_cost(pool, du);
      const double fast = a_gain_fast(pool, s, pool.at(u)).gain;
      worst = std::max(worst, std::abs(fast - direct) / std::abs(direct));
    }
  }
  return {worst < 1e-8, "max relative error " + fmt("%.3e", worst) + " over " + std::to_string(cases) + " cases"};
}

// K(A) - K(B) is PSD for nested A, B.
Outcome criterion_10() {
  std::mt19937_64 rng(1010);
  int bad = 0;
  double worst = INFINITY;
  for (int i = 0; i < 200; ++i) {
    const Pool pool = oracle::random_pool(10000 + static_cast<std::uint64_t>(i));
    const Design a = oracle::random_multiset(pool, i % 4, rng);
    Design b = a;
    const Design extra = oracle::random_multiset(pool, 1 + i % 3, rng);
    for (const auto& [id, c] : extra.counts()) b.add(id, c);
    const SymMatrix ka = error_covariance(pool, a);
    const SymMatrix kb = error_covariance(pool, b);
    const double lmin = linalg::extreme_eigs(SymMatrix(ka.matrix() - kb.matrix())).min;
    const double tol = 1e-8 * std::max(1.0, linalg::extreme_eigs(ka).max);
    worst = std::min(worst, lmin / std::max(1.0, linalg::extreme_eigs(ka).max));
    bad += lmin < -tol;
  }
  return {bad == 0, std::to_string(200 - bad) + "/200 nested pairs; min scaled lambda_min " + fmt("%.3e", worst)};
}

// Spectral sandwich of the A gain.
Outcome criterion_11() {
  std::mt19937_64 rng(1111);
  int bad = 0;
  double worst = INFINITY;
  for (int i = 0; i < 200; ++i) {
    const Pool pool = oracle::random_pool(11000 + static_cast<std::uint64_t>(i));
    const Design d = oracle::random_multiset(pool, i % 4, rng);
    const Experiment& u = pool.at(static_cast<std::size_t>(i) % pool.size());
    const Matrix y = information_matrix(pool, d).matrix();
    const Matrix y_inv = y.inverse();
    const Matrix& m = u.M().matrix();
    const Matrix& h = pool.target();
    const double delta = (h * y_inv * m * (y + m).inverse() * h.transpose()).trace();
    const double t = (m * (y + m).inverse()).trace();
    const linalg::EigRange hh = linalg::extreme_eigs(SymMatrix(h * h.transpose()));
    const linalg::EigRange yi = linalg::extreme_eigs(SymMatrix(y_inv));
    const double lower = hh.min * yi.min * t, upper = hh.max * yi.max * t;
    const double slack = std::min(delta - lower, upper - delta);
    worst = std::min(worst, slack);
    bad += slack < -kSlack;
  }
  return {bad == 0, std::to_string(200 - bad) + "/200 cases; min slack " + fmt("%.3e", worst)};
}

// Cold-start recommender on synthetic low-rank ratings.
Outcome criterion_12() {
  LowRankSpec spec;
  spec.users = 140;
  spec.movies = 200;
  spec.seed = 1212;
  const RatingsTable table = synth_ratings(spec);
  int wins = 0;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t seed = 1200 + static_cast<std::uint64_t>(t);
    const UserSplit split = split_users(table, 100, 40, seed);
    const RecsysComparison cmp = compare_recsys(table, split, 20, derive_seed(seed, 1));
    wins += cmp.greedy.mae < cmp.random.mae;
  }

  LowRankSpec r1 = spec;
  r1.rank = 1;
  r1.genres = 1;
  r1.noise_sd = 0.0;
  r1.offset = 0.0;
  const RatingsTable exact = synth_ratings(r1);
  const UserSplit split = split_users(exact, 100, 40, 77);
  RecsysPoolOptions opts;
  opts.noise_var = 1e-6;
  const Pool pool = build_recsys_pool(exact, split.training, opts);
  const GreedyTrace g = greedy_design(pool, Criterion::A, static_cast<int>(pool.p()), false);
  const double mae = evaluate_recsys(pool, exact, split.test, g.final_design).mae;

  return {wins >= 16 && mae < 1e-3, "greedy MAE below random in " + std::to_string(wins) + "/" +
                                        std::to_string(trials) + " trials (need >= 80%); rank-1 noise-free MAE " +
                                        fmt("%.3e", mae) + " at k = p = " + std::to_string(pool.p())};
}

struct Criterion_ {
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  configure_threads_from_env();
  const std::vector<Criterion_> all = {
      {"Theorem 1 certificate (A) vs oracle optimum", criterion_1},
      {"Theorem 2 certificate (E) vs oracle optimum", criterion_2},
      {"exhaustive alpha/epsilon within closed-form bounds", criterion_3},
      {"D criterion supermodular", criterion_4},
      {"equivalent alpha sweep (band at -10 dB, nonincreasing)", criterion_5},
      {"greedy beats random at low SNR", criterion_6},
      {"equivalent epsilon sweep nondecreasing", criterion_7},
      {"estimator: Monte-Carlo MSE and optimality", criterion_8},
      {"fast A gain equals recomputation", criterion_9},
      {"monotonicity of K", criterion_10},
      {"spectral sandwich of the A gain", criterion_11},
      {"cold-start recommender", criterion_12},
  };
  std::vector<int> selected;
  if (argc > 1) {
    for (int i = 1; i < argc; ++i) {
      const int n = std::atoi(argv[i]);
      if (n < 1 || n > static_cast<int>(all.size())) {
        std::fprintf(stderr, "usage: acceptance [criterion 1..%zu ...]\n", all.size());
        return 2;
      }
      selected.push_back(n);
    }
  } else {
    for (int n = 1; n <= static_cast<int>(all.size()); ++n) selected.push_back(n);
  }
  int failures = 0;
  for (int n : selected) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = all[static_cast<std::size_t>(n - 1)].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2d %s  %s: %s [%.1f s]\n", n, o.pass ? "PASS" : "FAIL",
                all[static_cast<std::size_t>(n - 1)].name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
