#include "optidesign/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <string>

#include "optidesign/errors.hpp"

namespace optidesign {

std::uint64_t multiset_count(std::uint64_t n, std::uint64_t k) {
  if (n == 0) return k == 0 ? 1 : 0;
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - 1 + i) / i;  // exact: r is C(n-1+i, i) after this step
    if (r > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(r);
}

namespace {

void enumerate_rec(std::size_t pos, int remaining, const CountVector& cap, CountVector& cur,
                   std::vector<CountVector>& out) {
  if (pos + 1 == cur.size()) {
    if (remaining <= cap[pos]) {
      cur[pos] = remaining;
      out.push_back(cur);
    }
    return;
  }
  for (int c = 0; c <= std::min(remaining, cap[pos]); ++c) {
    cur[pos] = c;
    enumerate_rec(pos + 1, remaining - c, cap, cur, out);
  }
}

std::vector<CountVector> enumerate_bounded(const CountVector& cap, int size) {
  std::vector<CountVector> out;
  if (size < 0) return out;
  if (cap.empty()) {
    if (size == 0) out.emplace_back();
    return out;
  }
  CountVector cur(cap.size(), 0);
  enumerate_rec(0, size, cap, cur, out);
  return out;
}

template <class Body>
void run_indexed(std::size_t n, Execution exec, Body&& body) {
  const auto count = static_cast<std::ptrdiff_t>(n);
  if (exec == Execution::serial) {
    for (std::ptrdiff_t i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
    return;
  }
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(optidesign_oracle_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<CountVector> enumerate_multisets(std::size_t n, int size, bool with_replacement) {
  return enumerate_bounded(CountVector(n, with_replacement ? std::max(size, 0) : 1), size);
}

std::vector<CountVector> enumerate_submultisets(const CountVector& bound, int size) {
  return enumerate_bounded(bound, size);
}

Design to_design(const Pool& pool, const CountVector& counts) {
  Design d;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] > 0) d.add(pool.at(i).id(), counts[i]);
  }
  return d;
}

CountVector to_counts(const Pool& pool, const Design& design) {
  CountVector c(pool.size(), 0);
  for (const auto& [id, n] : design.counts()) c[pool.index_of(id)] = n;
  return c;
}

OptimalDesign optimal_design_bruteforce(const Pool& pool, Criterion c, int k,
                                        bool with_replacement, Execution exec) {
  if (k < 0) throw InvalidArgument("k must be >= 0");
  const std::uint64_t guard = multiset_count(pool.size(), static_cast<std::uint64_t>(k));
  if (guard > kMaxEnumeration) {
    throw TooLarge("C(|pool| + k - 1, k) = " + std::to_string(guard) + " exceeds " +
                   std::to_string(kMaxEnumeration));
  }
  std::vector<CountVector> all;
  const int top = with_replacement ? k : std::min<int>(k, static_cast<int>(pool.size()));
  for (int s = 0; s <= top; ++s) {
    auto level = enumerate_multisets(pool.size(), s, with_replacement);
    all.insert(all.end(), std::make_move_iterator(level.begin()), std::make_move_iterator(level.end()));
  }
  std::vector<double> values(all.size());
  run_indexed(all.size(), exec, [&](std::size_t i) { values[i] = cost(c, pool, to_design(pool, all[i])); });

  std::size_t best = 0;
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (values[i] < values[best] || (values[i] == values[best] && all[i] < all[best])) best = i;
  }
  return {to_design(pool, all[best]), values[best], all.size()};
}

namespace {

// Marginal gains Delta_u(X) of every multiset X of each size, for all u.
class GainCache {
 public:
  GainCache(const Pool& pool, Criterion c, int max_size, const AuditOptions& opts)
      : levels_(static_cast<std::size_t>(max_size) + 1) {
    std::uint64_t total = 0;
    for (int s = 0; s <= max_size; ++s) {
      total += multiset_count(pool.size(), static_cast<std::uint64_t>(s));
      if (total > kMaxEnumeration) {
        throw TooLarge("more than " + std::to_string(kMaxEnumeration) +
                       " multisets up to size " + std::to_string(max_size));
      }
    }
    for (int s = 0; s <= max_size; ++s) {
      Level& lv = levels_[static_cast<std::size_t>(s)];
      lv.sets = enumerate_multisets(pool.size(), s);
      for (std::size_t i = 0; i < lv.sets.size(); ++i) lv.index.emplace(lv.sets[i], i);
      lv.gains.assign(lv.sets.size(), {});
      run_indexed(lv.sets.size(), opts.exec, [&](std::size_t i) {
        lv.gains[i] = marginal_gains(pool, c, to_design(pool, lv.sets[i]), opts.path);
      });
    }
  }

  const std::vector<CountVector>& sets(int size) const { return levels_[static_cast<std::size_t>(size)].sets; }
  const std::vector<double>& gains(int size, std::size_t i) const {
    return levels_[static_cast<std::size_t>(size)].gains[i];
  }
  const std::vector<double>& gains(int size, const CountVector& x) const {
    const Level& lv = levels_[static_cast<std::size_t>(size)];
    return lv.gains[lv.index.at(x)];
  }

 private:
  static std::vector<double> marginal_gains(const Pool& pool, Criterion c, const Design& x,
                                            GainPath path) {
    std::vector<double> g(pool.size());
    if (path == GainPath::recompute) {
      const double base = cost(c, pool, x);
      for (std::size_t u = 0; u < pool.size(); ++u) {
        Design xu = x;
        xu.add(pool.at(u).id());
        g[u] = base - cost(c, pool, xu);
      }
    } else {
      const DesignState state = DesignState::from_design(pool, x);
      for (std::size_t u = 0; u < pool.size(); ++u) g[u] = gain(c, pool, state, pool.at(u)).gain;
    }
    return g;
  }

  struct Level {
    std::vector<CountVector> sets;
    std::map<CountVector, std::size_t> index;
    std::vector<std::vector<double>> gains;
  };
  std::vector<Level> levels_;
};

enum class AuditKind { alpha, epsilon };

AuditEntry audit_pair(const GainCache& cache, std::size_t n, AuditKind kind, int a, int b,
                      const AuditOptions& opts) {
  if (a < 0 || b < a) throw InvalidArgument("audit needs 0 <= a <= b");
  const auto& bsets = cache.sets(b);
  const std::uint64_t triples_bound = static_cast<std::uint64_t>(bsets.size()) *
                                      multiset_count(n, static_cast<std::uint64_t>(a)) * n;
  if (triples_bound > opts.max_triples) {
    throw TooLarge("audit (" + std::to_string(a) + "," + std::to_string(b) + ") needs up to " +
                   std::to_string(triples_bound) + " triples");
  }
  struct Partial {
    double value;
    std::uint64_t evaluated = 0;
    std::uint64_t skipped = 0;
  };
  const double init = kind == AuditKind::alpha ? std::numeric_limits<double>::infinity()
                                               : -std::numeric_limits<double>::infinity();
  std::vector<Partial> partial(bsets.size(), Partial{init});
  run_indexed(bsets.size(), opts.exec, [&](std::size_t ib) {
    Partial& pt = partial[ib];
    const std::vector<double>& gb = cache.gains(b, ib);
    for (const CountVector& asub : enumerate_submultisets(bsets[ib], a)) {
      const std::vector<double>& ga = cache.gains(a, asub);
      for (std::size_t u = 0; u < n; ++u) {
        if (kind == AuditKind::alpha) {
          if (gb[u] <= opts.degenerate_threshold) {
            ++pt.skipped;
            continue;
          }
          pt.value = std::min(pt.value, ga[u] / gb[u]);
        } else {
          pt.value = std::max(pt.value, gb[u] - ga[u]);
        }
        ++pt.evaluated;
      }
    }
  });
  AuditEntry out{a, b, init, 0, 0};
  for (const Partial& pt : partial) {
    out.value = kind == AuditKind::alpha ? std::min(out.value, pt.value) : std::max(out.value, pt.value);
    out.evaluated += pt.evaluated;
    out.skipped += pt.skipped;
  }
  if (out.evaluated == 0) {
    throw AllDegenerate("every (A, B, u) triple at (" + std::to_string(a) + "," +
                        std::to_string(b) + ") has Delta_u(B) <= " +
                        std::to_string(opts.degenerate_threshold));
  }
  return out;
}

}  // namespace

AuditEntry exhaustive_alpha(const Pool& pool, Criterion c, int a, int b, const AuditOptions& opts) {
  if (a < 0 || b < a) throw InvalidArgument("audit needs 0 <= a <= b");
  const GainCache cache(pool, c, b, opts);
  return audit_pair(cache, pool.size(), AuditKind::alpha, a, b, opts);
}

AuditEntry exhaustive_epsilon(const Pool& pool, Criterion c, int a, int b, const AuditOptions& opts) {
  if (a < 0 || b < a) throw InvalidArgument("audit needs 0 <= a <= b");
  const GainCache cache(pool, c, b, opts);
  return audit_pair(cache, pool.size(), AuditKind::epsilon, a, b, opts);
}

namespace {

double lookup(const std::vector<AuditEntry>& table, int a, int b, const char* what) {
  for (const AuditEntry& e : table) {
    if (e.a == a && e.b == b) return e.value;
  }
  throw InvalidArgument(std::string(what) + " table has no entry (" + std::to_string(a) + "," +
                        std::to_string(b) + ")");
}

}  // namespace

double AuditTables::alpha_at(int a, int b) const { return lookup(alpha, a, b, "alpha"); }
double AuditTables::epsilon_at(int a, int b) const { return lookup(epsilon, a, b, "epsilon"); }

AuditTables audit_tables(const Pool& pool, Criterion c, int k, int ell, bool want_alpha,
                         bool want_epsilon, const AuditOptions& opts) {
  if (k < 1 || ell < 1) throw InvalidArgument("audit tables need k >= 1 and ell >= 1");
  const GainCache cache(pool, c, ell + k - 1, opts);
  AuditTables t;
  for (int a = 0; a < ell; ++a) {
    for (int b = a; b < ell + k; ++b) {
      if (want_alpha) t.alpha.push_back(audit_pair(cache, pool.size(), AuditKind::alpha, a, b, opts));
      if (want_epsilon) t.epsilon.push_back(audit_pair(cache, pool.size(), AuditKind::epsilon, a, b, opts));
    }
  }
  return t;
}

nlohmann::json to_json(const OptimalDesign& o) {
  nlohmann::json d = nlohmann::json::array();
  for (const auto& [id, c] : o.design.counts()) d.push_back({{"id", id}, {"count", c}});
  return {{"optimal_design", d}, {"optimal_value", o.value}, {"enumerated", o.enumerated}};
}

nlohmann::json to_json(const AuditEntry& e, const char* value_name) {
  return {{"a", e.a}, {"b", e.b}, {value_name, e.value}, {"evaluated", e.evaluated}, {"skipped", e.skipped}};
}

StackedDesign stack_design(const Pool& pool, const Design& design) {
  validate_design(pool, design);
  Eigen::Index n = 0;
  StackedDesign s;
  for (const auto& [id, c] : design.counts()) {
    const std::size_t idx = pool.index_of(id);
    for (int r = 0; r < c; ++r) {
      s.slots.push_back(idx);
      n += pool.at(idx).rows();
    }
  }
  s.A = Matrix::Zero(n, pool.p());
  s.R = Matrix::Zero(n, n);
  Eigen::Index row = 0;
  for (std::size_t idx : s.slots) {
    const Experiment& e = pool.at(idx);
    s.A.middleRows(row, e.rows()) = e.A();
    s.R.block(row, row, e.rows(), e.rows()) = e.R().matrix();
    row += e.rows();
  }
  return s;
}

AffineEstimator optimal_affine_estimator(const Pool& pool, const Design& design) {
  const StackedDesign s = stack_design(pool, design);
  const linalg::CholFactor fy = linalg::cholesky(information_matrix(pool, design));
  const Matrix& h = pool.target();
  AffineEstimator est;
  if (s.slots.empty()) {
    est.L = Matrix::Zero(h.rows(), 0);
  } else {
    // L* = H Y^{-1} A^T R^{-1}
    const Matrix rinv_a = linalg::solve_psd(linalg::cholesky(SymMatrix(s.R)), s.A);  // n x p
    est.L = (linalg::solve_psd(fy, h.transpose())).transpose() * rinv_a.transpose();
  }
  const Matrix residual = s.slots.empty() ? h : Matrix(h - est.L * s.A);
  est.b = residual * pool.prior_mean();
  return est;
}

MonteCarloResult monte_carlo_mse(const Pool& pool, const Design& design, std::uint64_t n_draws,
                                 std::uint64_t seed, Execution exec) {
  if (n_draws < 1000) throw InvalidArgument("monte_carlo_mse needs at least 1000 draws");
  const StackedDesign s = stack_design(pool, design);
  const AffineEstimator est = optimal_affine_estimator(pool, design);
  const Matrix l_theta = linalg::cholesky(pool.prior_cov()).lower();
  std::vector<Matrix> l_noise;
  l_noise.reserve(s.slots.size());
  for (std::size_t idx : s.slots) l_noise.push_back(linalg::cholesky(pool.at(idx).R()).lower());
  const Eigen::Index p = pool.p();
  const Eigen::Index n = s.A.rows();

  constexpr std::uint64_t kChunk = 8192;
  const std::uint64_t chunks = (n_draws + kChunk - 1) / kChunk;
  std::vector<double> sum(chunks, 0.0), sum_sq(chunks, 0.0);
  run_indexed(chunks, exec, [&](std::size_t ci) {
    std::mt19937_64 rng(derive_seed(seed, ci));
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::uint64_t begin = ci * kChunk;
    const std::uint64_t end = std::min(n_draws, begin + kChunk);
    Vector xi(p), y(n);
    for (std::uint64_t d = begin; d < end; ++d) {
      for (Eigen::Index i = 0; i < p; ++i) xi(i) = normal(rng);
      const Vector theta = pool.prior_mean() + l_theta * xi;
      Eigen::Index row = 0;
      for (std::size_t slot = 0; slot < s.slots.size(); ++slot) {
        const Experiment& e = pool.at(s.slots[slot]);
        Vector eta(e.rows());
        for (Eigen::Index i = 0; i < e.rows(); ++i) eta(i) = normal(rng);
        y.segment(row, e.rows()) = e.A() * theta + l_noise[slot] * eta;
        row += e.rows();
      }
      const Vector z = pool.target() * theta;
      const Vector z_hat = n > 0 ? Vector(est.L * y + est.b) : est.b;
      const double err = (z - z_hat).squaredNorm();
      sum[ci] += err;
      sum_sq[ci] += err * err;
    }
  });
  double total = 0.0, total_sq = 0.0;
  for (std::uint64_t ci = 0; ci < chunks; ++ci) {
    total += sum[ci];
    total_sq += sum_sq[ci];
  }
  const double nd = static_cast<double>(n_draws);
  const double mean = total / nd;
  const double var = std::max(0.0, (total_sq - nd * mean * mean) / (nd - 1.0));
  return {mean, std::sqrt(var / nd), n_draws};
}

PerturbationExcess perturbation_excess(const Pool& pool, const Design& design, const Matrix& delta) {
  const StackedDesign s = stack_design(pool, design);
  const AffineEstimator est = optimal_affine_estimator(pool, design);
  if (delta.rows() != est.L.rows() || delta.cols() != est.L.cols()) {
    throw DimensionMismatch("perturbation must match L* (" + std::to_string(est.L.rows()) + "x" +
                            std::to_string(est.L.cols()) + ")");
  }
  const Matrix& h = pool.target();
  const Matrix& rt = pool.prior_cov().matrix();
  const Matrix l = est.L + delta;
  const Matrix bias = h - l * s.A;
  const double trace_kl = (bias * rt * bias.transpose() + l * s.R * l.transpose()).trace();
  PerturbationExcess out;
  out.direct = trace_kl - error_covariance(pool, design).trace();
  out.quadratic = (delta * (s.A * rt * s.A.transpose() + s.R) * delta.transpose()).trace();
  return out;
}

OptimalityReport estimator_optimality_check(const Pool& pool, const Design& design,
                                            int n_perturbations, std::uint64_t seed) {
  if (design.empty()) throw InvalidArgument("estimator optimality check needs a nonempty design");
  const StackedDesign s = stack_design(pool, design);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  OptimalityReport report;
  const double trace_k = error_covariance(pool, design).trace();
  for (int t = 0; t < n_perturbations; ++t) {
    Matrix delta(pool.m(), s.A.rows());
    for (Eigen::Index i = 0; i < delta.size(); ++i) delta.data()[i] = 0.1 * normal(rng);
    const PerturbationExcess ex = perturbation_excess(pool, design, delta);
    const double tol = 1e-8 * std::max({1.0, std::abs(ex.quadratic), trace_k});
    if (ex.direct > 0.0 && ex.quadratic > 0.0 && std::abs(ex.direct - ex.quadratic) <= tol) {
      ++report.passed;
    }
    report.trials.push_back(ex);
  }
  return report;
}

}  // namespace optidesign
