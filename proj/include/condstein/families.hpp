#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "condstein/measures.hpp"
#include "condstein/quadrature.hpp"
#include "condstein/special.hpp"

namespace condstein {

/// Truncated working interval for a continuous family: Gaussian at
/// mean +- 12 sigma, Gamma between the 1e-14 and 1 - 1e-14 quantiles. The
/// truncation error sits far below the 1e-8 residual targets.
struct TruncatedDomain {
  double lo;
  double hi;
};

inline TruncatedDomain truncated_domain(const TargetFamily& family) {
  switch (family.kind()) {
    case FamilyKind::gaussian: {
      const auto& p = family.gaussian_params();
      const double sigma = std::sqrt(p.variance);
      return {p.mean - 12.0 * sigma, p.mean + 12.0 * sigma};
    }
    case FamilyKind::gamma: {
      const auto& p = family.gamma_params();
      return {gamma_quantile(p.shape, 1e-14) / p.rate,
              gamma_quantile(p.shape, 1.0 - 1e-14) / p.rate};
    }
    default:
      throw FamilyError("truncated_domain: continuous families only");
  }
}

inline double poisson_pmf(double lambda, std::size_t k) {
  return std::exp(-lambda + static_cast<double>(k) * std::log(lambda) -
                  std::lgamma(static_cast<double>(k) + 1.0));
}

/// Summation range where the Poisson pmf stays above 1e-16 of its mode.
struct PoissonRange {
  std::size_t lo;
  std::size_t hi;
  std::size_t mode;
};

inline PoissonRange poisson_range(double lambda) {
  const std::size_t mode = static_cast<std::size_t>(std::floor(lambda));
  const double cutoff_log = std::log(1e-16);
  // Walk down and up from the mode using pmf ratios; no pmf underflow.
  std::size_t lo = mode;
  double log_ratio = 0.0;
  while (lo > 0) {
    log_ratio += std::log(static_cast<double>(lo) / lambda);
    if (log_ratio < cutoff_log) break;
    --lo;
  }
  std::size_t hi = mode;
  log_ratio = 0.0;
  for (;;) {
    log_ratio += std::log(lambda / static_cast<double>(hi + 1));
    if (log_ratio < cutoff_log) break;
    ++hi;
    if (hi > mode + 100000) throw Error("poisson_range: runaway upper bound");
  }
  return {lo, hi, mode};
}

/// E_nu[g] for a Gaussian(mean, variance) target, integrated over the
/// truncated domain with splits at the declared discontinuities of g.
inline double gaussian_expectation(const std::function<double(double)>& g, double mean,
                                   double variance, std::span<const double> splits = {},
                                   QuadratureOptions opt = {}) {
  const double sigma = std::sqrt(variance);
  auto integrand = [&](double t) { return g(t) * normal_pdf((t - mean) / sigma) / sigma; };
  return integrate(integrand, mean - 12.0 * sigma, mean + 12.0 * sigma, opt, splits);
}

/// E_nu[g] for a Gamma(shape, rate) target over the truncated domain. Below
/// the mean the integral runs in u = (rate*t)^shape coordinates, which removes
/// the t^(shape-1) endpoint singularity for shape < 1; above the mean the
/// density is regular.
inline double gamma_expectation(const std::function<double(double)>& g, double shape, double rate,
                                std::span<const double> splits = {}, QuadratureOptions opt = {},
                                double hi_override = 0.0) {
  TruncatedDomain dom = truncated_domain(TargetFamily::gamma(shape, rate));
  if (hi_override > 0.0) dom.hi = hi_override;
  const double mean = shape / rate;
  const double mid = std::min(std::max(mean, dom.lo), dom.hi);
  double total = 0.0;
  if (dom.lo < mid && shape < 1.0) {
    // The density endpoint singularity t^(shape-1) vanishes under
    // u = (beta t)^shape: rho(t) dt = exp(-beta t) / (shape Gamma(shape)) du.
    auto integrand = [&](double u) {
      const double bt = std::pow(u, 1.0 / shape);
      return g(bt / rate) * std::exp(-bt - std::lgamma(shape) - std::log(shape));
    };
    std::vector<double> u_splits;
    for (double c : splits) {
      if (c > dom.lo && c < mid) u_splits.push_back(std::pow(rate * c, shape));
    }
    total += integrate(integrand, std::pow(rate * dom.lo, shape), std::pow(rate * mid, shape), opt,
                       u_splits);
  }
  const double t_lo = shape < 1.0 ? mid : dom.lo;
  if (t_lo < dom.hi) {
    auto integrand = [&](double t) {
      return g(t) * std::exp(shape * std::log(rate) + (shape - 1.0) * std::log(t) - rate * t -
                             std::lgamma(shape));
    };
    std::vector<double> t_splits;
    for (double c : splits) {
      if (c > t_lo && c < dom.hi) t_splits.push_back(c);
    }
    total += integrate(integrand, t_lo, dom.hi, opt, t_splits);
  }
  return total;
}

/// E_nu[g] for a Poisson(lambda) target over its truncated lattice.
inline double poisson_expectation(const std::function<double(double)>& g, double lambda) {
  const PoissonRange r = poisson_range(lambda);
  std::vector<double> terms;
  terms.reserve(r.hi - r.lo + 1);
  for (std::size_t k = r.lo; k <= r.hi; ++k) {
    terms.push_back(g(static_cast<double>(k)) * poisson_pmf(lambda, k));
  }
  return pairwise_sum(terms);
}

/// Expectation of g under any single target family (used for centering
/// source terms).
inline double family_expectation(const TargetFamily& family,
                                 const std::function<double(double)>& g,
                                 std::span<const double> splits = {}, QuadratureOptions opt = {}) {
  switch (family.kind()) {
    case FamilyKind::gaussian: {
      const auto& p = family.gaussian_params();
      return gaussian_expectation(g, p.mean, p.variance, splits, opt);
    }
    case FamilyKind::gamma: {
      const auto& p = family.gamma_params();
      return gamma_expectation(g, p.shape, p.rate, splits, opt);
    }
    case FamilyKind::poisson:
      return poisson_expectation(g, family.poisson_params().lambda);
    case FamilyKind::finite_discrete: {
      const FiniteLaw& law = family.law();
      std::vector<double> terms(law.size());
      for (std::size_t i = 0; i < law.size(); ++i) {
        terms[i] = g(law.support()[i]) * law.weights()[i];
      }
      return pairwise_sum(terms);
    }
  }
  throw FamilyError("family_expectation: unknown family kind");
}

}  // namespace condstein
