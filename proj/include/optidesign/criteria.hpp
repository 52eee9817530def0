#pragma once

// Normalized alphabetical criteria on K(D) = H Y(D)^{-1} H^T:
//   A: trace K(D)      - trace(H R_theta H^T)
//   E: lambda_max K(D) - lambda_max(H R_theta H^T)
//   D: log det K(D)    - log det(H R_theta H^T)
// All three vanish on the empty design and are monotone decreasing.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "optidesign/model.hpp"
#include "optidesign/parallel.hpp"

namespace optidesign {

enum class Criterion { A, E, D };

std::string to_string(Criterion c);
/// Accepts "A"/"E"/"D" (case-insensitive); throws InvalidArgument.
Criterion parse_criterion(std::string_view s);

/// Unnormalized criterion value of an error covariance. D throws
/// NotPositiveDefinite when K is singular.
double raw_value(Criterion c, const SymMatrix& k);

double a_cost(const Pool& pool, const Design& design);
double e_cost(const Pool& pool, const Design& design);
/// Throws NotPositiveDefinite when H is not full row rank.
double d_cost(const Pool& pool, const Design& design);
double cost(Criterion c, const Pool& pool, const Design& design);

/// Cost at a solver state, from its cached inverse.
double cost_at(Criterion c, const Pool& pool, const DesignState& state);

struct GainRecord {
  ExperimentId experiment_id = 0;
  double gain = 0.0;  // cost(X) - cost(X + u)
};

/// A-gain via the rank-update identity
///   Delta_u(X) = trace[H Y^{-1} M_u (Y + M_u)^{-1} H^T] = ||G H^T||_F^2,
/// G the Woodbury factor of u at X. No refactorization of Y.
GainRecord a_gain_fast(const Pool& pool, const DesignState& state, const Experiment& u);

/// Cost decrease of adding u. Dispatches A to a_gain_fast; E and D compare
/// the criterion at K(X) and at K(X + u), the latter from a Woodbury-updated
/// inverse. Gains in [-tol, 0) are clamped to 0 with
/// tol = 1e-9 * max(1, |raw value at X|); anything lower throws
/// InternalConsistency.
GainRecord gain(Criterion c, const Pool& pool, const DesignState& state, const Experiment& u);

/// Gains of pool.at(i) for every i in `candidates`, in candidate order. The
/// parallel path splits the candidate loop across OpenMP threads.
std::vector<GainRecord> evaluate_gains(Criterion c, const Pool& pool, const DesignState& state,
                                       std::span<const std::size_t> candidates,
                                       Execution exec = Execution::parallel);

}  // namespace optidesign
