#pragma once

// Closed-form worst-case guarantees for greedy designs.
//
// alpha-supermodularity (multiplicative): for A subset of B and any u,
//   Delta_u(A) >= alpha(|A|, |B|) * Delta_u(B).
// epsilon-supermodularity (additive):
//   Delta_u(A) >= Delta_u(B) - epsilon(|A|, |B|).
//
// For the A-criterion the pool-level bound is
//   alpha(a, .) >= kappa(H)^-2 lmin(R^-1) / (lmax(R^-1) + a * ell_max),
// and for the E-criterion
//   epsilon(a, b) <= (b - a) smax(H)^2 lmax(R)^2 ell_max,
// with ell_max = max_e lmax(M_e). Feeding either into the greedy guarantee
// gives the product/additive certificate and its exponential relaxation.
//
// Pairs (a, b) are only meaningful for b >= a (A is a sub-multiset of B), so
// every range below is a < ell, a <= b < ell + k.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "optidesign/criteria.hpp"

namespace optidesign {

struct BoundParams {
  double sigma_max_target = 0.0;
  double sigma_min_target = 0.0;
  double kappa_target = 0.0;  // +inf when sigma_min is 0
  double lambda_min_prior_info = 0.0;
  double lambda_max_prior_info = 0.0;
  double lambda_max_prior_cov = 0.0;
  double ell_max = 0.0;
  /// lambda_max(M_e) for every experiment, sorted descending.
  std::vector<double> lambda_max_sorted;
};

BoundParams bound_params(const Pool& pool);

/// Throws RankDeficientTarget if sigma_min(H) <= 1e-12 sigma_max(H).
double alpha_bound_a(const Pool& pool, int a);

/// Same bound with a * ell_max replaced by the sum of the a largest
/// lambda_max(M_e): repeats allowed with replacement, distinct experiments
/// without.
double alpha_bound_tightened(const Pool& pool, int a, bool with_replacement);

double epsilon_bound_e(const Pool& pool, int a, int b);

using AlphaFn = std::function<double(int a, int b)>;
using EpsilonFn = std::function<double(int a, int b)>;

/// alpha_bound_a (or the tightened variant) as a b-independent AlphaFn.
AlphaFn pool_alpha_fn(const Pool& pool, bool tightened = false, bool with_replacement = true);
EpsilonFn pool_epsilon_fn(const Pool& pool);

struct AlphaCertificate {
  int k = 0;
  int ell = 0;
  /// per_a[a] = min_{a <= b < ell + k} alpha(a, b), a < ell.
  std::vector<double> per_a;
  double alpha_bar = 0.0;
  /// 1 - prod_{h<ell} (1 - 1 / sum_{s<k} alpha(h, h+s)^-1)
  double factor_product = 0.0;
  /// 1 - exp(-alpha_bar * ell / k)
  double factor_exp = 0.0;
  /// Constant alpha reproducing factor_product; empty when factor_product >= 1.
  std::optional<double> equivalent_alpha;
};

/// Throws InvalidAlpha if a queried alpha is <= 0 or not finite.
AlphaCertificate alpha_guarantee(const AlphaFn& alpha, int k, int ell);

/// alpha_hat = k (1 - [prod_{h<ell} (1 - 1/alpha_t(h))]^(1/ell)),
/// alpha_t(h) = sum_{s<k} alpha(h, h+s)^-1. Throws DegenerateFactor when the
/// product vanishes (factor_product >= 1).
double equivalent_alpha(const AlphaFn& alpha, int k, int ell);

struct EpsilonEntry {
  int a = 0;
  int b = 0;
  double value = 0.0;
};

struct EpsilonCertificate {
  int k = 0;
  int ell = 0;
  std::vector<EpsilonEntry> per_ab;
  double epsilon_bar = 0.0;
  /// 1 - (1 - 1/k)^ell, the coefficient of f* in the first line.
  double multiplicative = 0.0;
  /// (1/k) sum_{s<k} sum_{h<ell} eps(h, h+s) (1 - 1/k)^(ell-1-h)
  double additive_product = 0.0;
  /// 1 - exp(-ell/k)
  double exp_coefficient = 0.0;
  /// (1 - exp(-ell/k)) k eps_bar
  double additive_exp = 0.0;
  std::optional<double> f_star;
  /// (1 - exp(-ell/k)) (f* + k eps_bar), when f* is known.
  std::optional<double> exp_bound;
  double equivalent_epsilon = 0.0;

  /// multiplicative * f_star + additive_product.
  double product_bound(double f_star_value) const {
    return multiplicative * f_star_value + additive_product;
  }
};

EpsilonCertificate epsilon_guarantee(const EpsilonFn& epsilon, int k, int ell,
                                     std::optional<double> f_star = std::nullopt);

/// eps_hat = additive_product / sum_{h<ell} (1 - 1/k)^(ell-1-h).
double equivalent_epsilon(const EpsilonFn& epsilon, int k, int ell);

struct DGuarantee {
  int k = 0;
  double finite = 0.0;       // 1 - (1 - 1/k)^k
  double exponential = 0.0;  // 1 - e^-1
};

DGuarantee d_guarantee(int k);

struct Provenance {
  std::string pool_hash;
  Criterion criterion = Criterion::A;
  int k = 0;
  int ell = 0;
};

nlohmann::json to_json(const BoundParams& p);
nlohmann::json to_json(const AlphaCertificate& c, const Provenance& prov);
nlohmann::json to_json(const EpsilonCertificate& c, const Provenance& prov);
nlohmann::json to_json(const DGuarantee& d, const Provenance& prov);

}  // namespace optidesign
