#include "optidesign/certificates.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "optidesign/errors.hpp"

namespace optidesign {

BoundParams bound_params(const Pool& pool) {
  BoundParams bp;
  Eigen::JacobiSVD<Matrix> svd(pool.target());
  const Vector& s = svd.singularValues();
  bp.sigma_max_target = s(0);
  bp.sigma_min_target = s(s.size() - 1);
  bp.kappa_target = bp.sigma_min_target > 0.0 ? bp.sigma_max_target / bp.sigma_min_target
                                              : std::numeric_limits<double>::infinity();
  const linalg::EigRange info = linalg::extreme_eigs(pool.prior_info());
  bp.lambda_min_prior_info = info.min;
  bp.lambda_max_prior_info = info.max;
  bp.lambda_max_prior_cov = linalg::extreme_eigs(pool.prior_cov()).max;
  bp.ell_max = pool.ell_max();
  bp.lambda_max_sorted.reserve(pool.size());
  for (const Experiment& e : pool.experiments()) bp.lambda_max_sorted.push_back(e.lambda_max());
  std::sort(bp.lambda_max_sorted.begin(), bp.lambda_max_sorted.end(), std::greater<>());
  return bp;
}

namespace {

void require_well_posed_target(const BoundParams& bp) {
  if (!(bp.sigma_min_target > 1e-12 * bp.sigma_max_target)) {
    throw RankDeficientTarget("sigma_min(H) = " + std::to_string(bp.sigma_min_target) +
                              " <= 1e-12 sigma_max(H); the alpha bound degenerates to 0");
  }
}

double alpha_from_denominator(const BoundParams& bp, double spectral_sum) {
  const double inv_kappa2 = 1.0 / (bp.kappa_target * bp.kappa_target);
  return inv_kappa2 * bp.lambda_min_prior_info / (bp.lambda_max_prior_info + spectral_sum);
}

void require_counts(int k, int ell) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (ell < 1) throw InvalidArgument("ell must be >= 1");
}

double checked_alpha(const AlphaFn& alpha, int a, int b) {
  const double v = alpha(a, b);
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidAlpha("alpha(" + std::to_string(a) + "," + std::to_string(b) + ") = " +
                       std::to_string(v) + " must be a positive finite number");
  }
  return v;
}

// prod_{h<ell} (1 - 1/alpha_t(h))
double alpha_product(const AlphaFn& alpha, int k, int ell) {
  double prod = 1.0;
  for (int h = 0; h < ell; ++h) {
    double t = 0.0;
    for (int s = 0; s < k; ++s) t += 1.0 / checked_alpha(alpha, h, h + s);
    prod *= 1.0 - 1.0 / t;
  }
  return prod;
}

double decay_weight(int k, int ell, int h) {
  return std::pow(1.0 - 1.0 / static_cast<double>(k), ell - 1 - h);
}

double additive_product(const EpsilonFn& eps, int k, int ell) {
  double sum = 0.0;
  for (int s = 0; s < k; ++s) {
    for (int h = 0; h < ell; ++h) sum += eps(h, h + s) * decay_weight(k, ell, h);
  }
  return sum / static_cast<double>(k);
}

double weight_sum(int k, int ell) {
  double w = 0.0;
  for (int h = 0; h < ell; ++h) w += decay_weight(k, ell, h);
  return w;
}

}  // namespace

double alpha_bound_a(const Pool& pool, int a) {
  if (a < 0) throw InvalidArgument("alpha bound needs a >= 0");
  const BoundParams bp = bound_params(pool);
  require_well_posed_target(bp);
  return alpha_from_denominator(bp, static_cast<double>(a) * bp.ell_max);
}

double alpha_bound_tightened(const Pool& pool, int a, bool with_replacement) {
  if (a < 0) throw InvalidArgument("alpha bound needs a >= 0");
  const BoundParams bp = bound_params(pool);
  require_well_posed_target(bp);
  double spectral = 0.0;
  if (with_replacement) {
    spectral = static_cast<double>(a) * bp.ell_max;
  } else {
    const auto take = std::min<std::size_t>(static_cast<std::size_t>(a), bp.lambda_max_sorted.size());
    spectral = std::accumulate(bp.lambda_max_sorted.begin(),
                               bp.lambda_max_sorted.begin() + static_cast<std::ptrdiff_t>(take), 0.0);
  }
  return alpha_from_denominator(bp, spectral);
}

double epsilon_bound_e(const Pool& pool, int a, int b) {
  if (a < 0 || b < a) throw InvalidArgument("epsilon bound needs 0 <= a <= b");
  const BoundParams bp = bound_params(pool);
  return static_cast<double>(b - a) * bp.sigma_max_target * bp.sigma_max_target *
         bp.lambda_max_prior_cov * bp.lambda_max_prior_cov * bp.ell_max;
}

AlphaFn pool_alpha_fn(const Pool& pool, bool tightened, bool with_replacement) {
  const BoundParams bp = bound_params(pool);
  require_well_posed_target(bp);
  // Prefix sums of the sorted spectra give the tightened denominators in O(1).
  std::vector<double> prefix(bp.lambda_max_sorted.size() + 1, 0.0);
  std::partial_sum(bp.lambda_max_sorted.begin(), bp.lambda_max_sorted.end(), prefix.begin() + 1);
  return [bp, prefix = std::move(prefix), tightened, with_replacement](int a, int) {
    double spectral = static_cast<double>(a) * bp.ell_max;
    if (tightened && !with_replacement) {
      spectral = prefix[std::min<std::size_t>(static_cast<std::size_t>(a), prefix.size() - 1)];
    }
    return alpha_from_denominator(bp, spectral);
  };
}

EpsilonFn pool_epsilon_fn(const Pool& pool) {
  const BoundParams bp = bound_params(pool);
  const double c = bp.sigma_max_target * bp.sigma_max_target * bp.lambda_max_prior_cov *
                   bp.lambda_max_prior_cov * bp.ell_max;
  return [c](int a, int b) { return static_cast<double>(b - a) * c; };
}

AlphaCertificate alpha_guarantee(const AlphaFn& alpha, int k, int ell) {
  require_counts(k, ell);
  AlphaCertificate cert;
  cert.k = k;
  cert.ell = ell;
  cert.per_a.assign(static_cast<std::size_t>(ell), std::numeric_limits<double>::infinity());
  for (int a = 0; a < ell; ++a) {
    for (int b = a; b < ell + k; ++b) {
      cert.per_a[a] = std::min(cert.per_a[a], checked_alpha(alpha, a, b));
    }
  }
  cert.alpha_bar = *std::min_element(cert.per_a.begin(), cert.per_a.end());
  const double prod = alpha_product(alpha, k, ell);
  cert.factor_product = 1.0 - prod;
  cert.factor_exp = 1.0 - std::exp(-cert.alpha_bar * ell / static_cast<double>(k));
  if (prod > 0.0) {
    cert.equivalent_alpha = static_cast<double>(k) * (1.0 - std::pow(prod, 1.0 / ell));
  }
  return cert;
}

double equivalent_alpha(const AlphaFn& alpha, int k, int ell) {
  require_counts(k, ell);
  const double prod = alpha_product(alpha, k, ell);
  if (!(prod > 0.0)) {
    throw DegenerateFactor("factor_product = " + std::to_string(1.0 - prod) +
                           " >= 1 has no equivalent constant alpha");
  }
  return static_cast<double>(k) * (1.0 - std::pow(prod, 1.0 / ell));
}

EpsilonCertificate epsilon_guarantee(const EpsilonFn& epsilon, int k, int ell,
                                     std::optional<double> f_star) {
  require_counts(k, ell);
  EpsilonCertificate cert;
  cert.k = k;
  cert.ell = ell;
  cert.epsilon_bar = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < ell; ++a) {
    for (int b = a; b < ell + k; ++b) {
      const double v = epsilon(a, b);
      cert.per_ab.push_back({a, b, v});
      cert.epsilon_bar = std::max(cert.epsilon_bar, v);
    }
  }
  const double kd = static_cast<double>(k);
  cert.multiplicative = 1.0 - std::pow(1.0 - 1.0 / kd, ell);
  cert.additive_product = additive_product(epsilon, k, ell);
  cert.exp_coefficient = 1.0 - std::exp(-static_cast<double>(ell) / kd);
  cert.additive_exp = cert.exp_coefficient * kd * cert.epsilon_bar;
  cert.f_star = f_star;
  if (f_star) cert.exp_bound = cert.exp_coefficient * (*f_star + kd * cert.epsilon_bar);
  cert.equivalent_epsilon = cert.additive_product / weight_sum(k, ell);
  return cert;
}

double equivalent_epsilon(const EpsilonFn& epsilon, int k, int ell) {
  require_counts(k, ell);
  return additive_product(epsilon, k, ell) / weight_sum(k, ell);
}

DGuarantee d_guarantee(int k) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  const double kd = static_cast<double>(k);
  return {k, 1.0 - std::pow(1.0 - 1.0 / kd, k), 1.0 - std::exp(-1.0)};
}

nlohmann::json to_json(const BoundParams& p) {
  return {{"sigma_max_target", p.sigma_max_target},
          {"sigma_min_target", p.sigma_min_target},
          {"kappa_target", p.kappa_target},
          {"lambda_min_prior_info", p.lambda_min_prior_info},
          {"lambda_max_prior_info", p.lambda_max_prior_info},
          {"lambda_max_prior_cov", p.lambda_max_prior_cov},
          {"ell_max", p.ell_max}};
}

namespace {

nlohmann::json provenance_json(const Provenance& prov) {
  return {{"pool_hash", prov.pool_hash},
          {"criterion", to_string(prov.criterion)},
          {"k", prov.k},
          {"ell", prov.ell}};
}

}  // namespace

nlohmann::json to_json(const AlphaCertificate& c, const Provenance& prov) {
  nlohmann::json j = {{"kind", "alpha"},
                      {"k", c.k},
                      {"ell", c.ell},
                      {"per_a", c.per_a},
                      {"alpha_bar", c.alpha_bar},
                      {"factor_product", c.factor_product},
                      {"factor_exp", c.factor_exp},
                      {"provenance", provenance_json(prov)}};
  j["equivalent_alpha"] = c.equivalent_alpha ? nlohmann::json(*c.equivalent_alpha) : nlohmann::json();
  return j;
}

nlohmann::json to_json(const EpsilonCertificate& c, const Provenance& prov) {
  nlohmann::json table = nlohmann::json::array();
  for (const EpsilonEntry& e : c.per_ab) table.push_back({{"a", e.a}, {"b", e.b}, {"epsilon", e.value}});
  nlohmann::json j = {{"kind", "epsilon"},
                      {"k", c.k},
                      {"ell", c.ell},
                      {"per_ab", std::move(table)},
                      {"epsilon_bar", c.epsilon_bar},
                      {"multiplicative", c.multiplicative},
                      {"additive_product", c.additive_product},
                      {"exp_coefficient", c.exp_coefficient},
                      {"additive_exp", c.additive_exp},
                      {"equivalent_epsilon", c.equivalent_epsilon},
                      {"provenance", provenance_json(prov)}};
  j["f_star"] = c.f_star ? nlohmann::json(*c.f_star) : nlohmann::json();
  j["exp_bound"] = c.exp_bound ? nlohmann::json(*c.exp_bound)
                               : nlohmann::json("(1-exp(-ell/k)) * (f_star + k * epsilon_bar)");
  return j;
}

nlohmann::json to_json(const DGuarantee& d, const Provenance& prov) {
  return {{"kind", "supermodular"},
          {"k", d.k},
          {"factor_finite", d.finite},
          {"factor_exp", d.exponential},
          {"provenance", provenance_json(prov)}};
}

}  // namespace optidesign
