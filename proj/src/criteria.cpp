#include "optidesign/criteria.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "optidesign/errors.hpp"

namespace optidesign {

std::string to_string(Criterion c) {
  switch (c) {
    case Criterion::A: return "A";
    case Criterion::E: return "E";
    case Criterion::D: return "D";
  }
  return "?";
}

Criterion parse_criterion(std::string_view s) {
  if (s.size() == 1) {
    switch (std::toupper(static_cast<unsigned char>(s[0]))) {
      case 'A': return Criterion::A;
      case 'E': return Criterion::E;
      case 'D': return Criterion::D;
      default: break;
    }
  }
  throw InvalidArgument("unknown criterion '" + std::string(s) + "' (expected A, E or D)");
}

double raw_value(Criterion c, const SymMatrix& k) {
  switch (c) {
    case Criterion::A: return k.trace();
    case Criterion::E: return linalg::extreme_eigs(k).max;
    case Criterion::D: return linalg::logdet(linalg::cholesky(k));
  }
  return 0.0;
}

namespace {

void require_d_defined(Criterion c, const Pool& pool) {
  if (c == Criterion::D && !pool.target_full_row_rank()) {
    throw NotPositiveDefinite("D-criterion undefined: target H is not full row rank (m <= p required)");
  }
}

double normalized(Criterion c, const Pool& pool, const SymMatrix& k) {
  return raw_value(c, k) - raw_value(c, pool.prior_target_cov());
}

struct GainContext {
  Criterion criterion;
  const Pool& pool;
  const DesignState& state;
  Matrix k_current;
  double raw_current = 0.0;
  double tolerance = 1e-9;

  GainContext(Criterion c, const Pool& p, const DesignState& s)
      : criterion(c), pool(p), state(s) {
    require_d_defined(c, p);
    const Matrix& h = p.target();
    k_current = h * s.info_inverse().matrix() * h.transpose();
    if (c != Criterion::A) {
      raw_current = raw_value(c, SymMatrix(k_current));
    } else {
      raw_current = k_current.trace();
    }
    tolerance = 1e-9 * std::max(1.0, std::abs(raw_current));
  }

  GainRecord evaluate(const Experiment& u) const {
    const Matrix g = linalg::woodbury_factor(state.info_inverse(), u.whitened(),
                                             SymMatrix::identity(u.rows()));
    const Matrix gh = g * pool.target().transpose();  // n_u x m
    double delta;
    if (criterion == Criterion::A) {
      delta = gh.squaredNorm();
    } else {
      const SymMatrix k_next(k_current - gh.transpose() * gh);
      delta = raw_current - raw_value(criterion, k_next);
    }
    return {u.id(), clamp(delta, u)};
  }

  double clamp(double delta, const Experiment& u) const {
    if (delta >= 0.0) return delta;
    if (delta >= -tolerance) return 0.0;
    throw InternalConsistency("negative " + to_string(criterion) + "-gain " +
                              std::to_string(delta) + " for experiment " +
                              std::to_string(u.id()) + " (monotonicity violated)");
  }
};

}  // namespace

double cost(Criterion c, const Pool& pool, const Design& design) {
  require_d_defined(c, pool);
  validate_design(pool, design);
  if (design.empty()) return 0.0;
  return normalized(c, pool, error_covariance(pool, design));
}

double a_cost(const Pool& pool, const Design& design) { return cost(Criterion::A, pool, design); }
double e_cost(const Pool& pool, const Design& design) { return cost(Criterion::E, pool, design); }
double d_cost(const Pool& pool, const Design& design) { return cost(Criterion::D, pool, design); }

double cost_at(Criterion c, const Pool& pool, const DesignState& state) {
  require_d_defined(c, pool);
  if (state.design().empty()) return 0.0;
  const Matrix& h = pool.target();
  return normalized(c, pool, SymMatrix(h * state.info_inverse().matrix() * h.transpose()));
}

GainRecord a_gain_fast(const Pool& pool, const DesignState& state, const Experiment& u) {
  return GainContext(Criterion::A, pool, state).evaluate(u);
}

GainRecord gain(Criterion c, const Pool& pool, const DesignState& state, const Experiment& u) {
  return GainContext(c, pool, state).evaluate(u);
}

std::vector<GainRecord> evaluate_gains(Criterion c, const Pool& pool, const DesignState& state,
                                       std::span<const std::size_t> candidates,
                                       Execution exec) {
  const GainContext ctx(c, pool, state);
  std::vector<GainRecord> out(candidates.size());
  const auto n = static_cast<std::ptrdiff_t>(candidates.size());
  if (exec == Execution::serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = ctx.evaluate(pool.at(candidates[i]));
    return out;
  }
  // Exceptions cannot cross the OpenMP region; capture the first one.
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = ctx.evaluate(pool.at(candidates[i]));
    } catch (...) {
#pragma omp critical(optidesign_gain_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace optidesign
