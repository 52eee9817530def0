#pragma once

// Brute-force ground truth for small instances: optimal designs by
// enumeration, exhaustive alpha(a, b) / epsilon(a, b) over all sub-multiset
// pairs, and Monte-Carlo / closed-form checks of the optimal estimator.
//
// A multiset over a pool of n experiments is a count vector of length n (in
// pool order, i.e. ascending id). A is a sub-multiset of B when A's counts are
// dominated entry-wise by B's. The element u ranges over the whole pool,
// including experiments already in B.

#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"
#include "optidesign/criteria.hpp"
#include "optidesign/parallel.hpp"

namespace optidesign {

using CountVector = std::vector<int>;

/// C(n + k - 1, k), saturating at UINT64_MAX.
std::uint64_t multiset_count(std::uint64_t n, std::uint64_t k);

/// All count vectors of length n with total `size`, each entry <= 1 when
/// `with_replacement` is false. Lexicographically ascending.
std::vector<CountVector> enumerate_multisets(std::size_t n, int size, bool with_replacement = true);

/// All count vectors c <= bound (entry-wise) with total `size`.
std::vector<CountVector> enumerate_submultisets(const CountVector& bound, int size);

Design to_design(const Pool& pool, const CountVector& counts);
CountVector to_counts(const Pool& pool, const Design& design);

struct OptimalDesign {
  Design design;
  double value = 0.0;
  std::uint64_t enumerated = 0;
};

/// Guard on C(|pool| + k - 1, k).
inline constexpr std::uint64_t kMaxEnumeration = 1'000'000;

/// Exact argmin of cost over every design with |D| <= k. Ties go to the
/// lexicographically smallest count vector. Throws TooLarge past the guard.
OptimalDesign optimal_design_bruteforce(const Pool& pool, Criterion c, int k,
                                        bool with_replacement = true,
                                        Execution exec = Execution::parallel);

/// How marginal gains are computed while auditing.
enum class GainPath {
  recompute,  // cost(X) - cost(X + u), each cost from a fresh factorization
  fast,       // gain() on a DesignState (rank-update formulas)
};

struct AuditOptions {
  GainPath path = GainPath::recompute;
  /// Guard on the number of (A, B, u) triples per (a, b) pair.
  std::uint64_t max_triples = 20'000'000;
  /// Denominators Delta_u(B) at or below this are skipped (alpha only).
  double degenerate_threshold = 1e-12;
  Execution exec = Execution::parallel;
};

struct AuditEntry {
  int a = 0;
  int b = 0;
  double value = 0.0;
  std::uint64_t evaluated = 0;
  std::uint64_t skipped = 0;
};

/// min over (A subset B, u) with |A| = a, |B| = b of Delta_u(A) / Delta_u(B).
/// Throws AllDegenerate if every triple was skipped, TooLarge past the guard.
AuditEntry exhaustive_alpha(const Pool& pool, Criterion c, int a, int b,
                            const AuditOptions& opts = {});

/// max over the same triples of Delta_u(B) - Delta_u(A).
AuditEntry exhaustive_epsilon(const Pool& pool, Criterion c, int a, int b,
                              const AuditOptions& opts = {});

/// Tables over a < ell, a <= b < ell + k. Marginal gains of every multiset up
/// to size ell + k - 1 are computed once and shared across the pairs.
struct AuditTables {
  std::vector<AuditEntry> alpha;    // empty if not requested / all degenerate
  std::vector<AuditEntry> epsilon;
  /// Value of the table at (a, b); throws InvalidArgument when absent.
  double alpha_at(int a, int b) const;
  double epsilon_at(int a, int b) const;
};

AuditTables audit_tables(const Pool& pool, Criterion c, int k, int ell, bool want_alpha,
                         bool want_epsilon, const AuditOptions& opts = {});

struct OracleReport {
  OptimalDesign optimum;
  std::optional<AuditTables> tables;
};

nlohmann::json to_json(const OptimalDesign& o);
nlohmann::json to_json(const AuditEntry& e, const char* value_name);

/// Linear part L and offset b of z_hat = L y_stacked + b, with the design's
/// occurrences stacked in id order (repeats adjacent).
struct AffineEstimator {
  Matrix L;
  Vector b;
};

/// Stacked observation model of a design: A_tilde (n x p), R_tilde
/// block-diagonal (n x n).
struct StackedDesign {
  Matrix A;
  Matrix R;
  std::vector<std::size_t> slots;  // pool index per stacked block
};

StackedDesign stack_design(const Pool& pool, const Design& design);

/// L* = H Y^{-1} A_tilde^T R_tilde^{-1}, b* = (H - L* A_tilde) theta_bar.
AffineEstimator optimal_affine_estimator(const Pool& pool, const Design& design);

struct MonteCarloResult {
  double mse = 0.0;
  double std_error = 0.0;
  std::uint64_t draws = 0;
};

/// Empirical mean of ||z - z_hat||^2 with theta ~ N(theta_bar, R_theta) and
/// v_e ~ N(0, R_e) drawn independently per occurrence. Draws are split into
/// fixed-size chunks with derived seeds, so the result does not depend on the
/// thread count.
MonteCarloResult monte_carlo_mse(const Pool& pool, const Design& design, std::uint64_t n_draws,
                                 std::uint64_t seed, Execution exec = Execution::parallel);

struct PerturbationExcess {
  /// trace K(L* + Delta) - trace K(D), K(L) evaluated from its definition.
  double direct = 0.0;
  /// trace[Delta (A R_theta A^T + R_tilde) Delta^T].
  double quadratic = 0.0;
};

PerturbationExcess perturbation_excess(const Pool& pool, const Design& design, const Matrix& delta);

struct OptimalityReport {
  std::vector<PerturbationExcess> trials;
  int passed = 0;
  bool ok() const { return passed == static_cast<int>(trials.size()); }
};

/// Random Gaussian perturbations of L*; a trial passes when both excess
/// forms are positive and agree to 1e-8 relative. Throws InvalidArgument on
/// an empty design.
OptimalityReport estimator_optimality_check(const Pool& pool, const Design& design,
                                            int n_perturbations, std::uint64_t seed);

}  // namespace optidesign
