#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "condstein/measures.hpp"
#include "condstein/rng.hpp"
#include "condstein/special.hpp"

namespace condstein {

/// Sampler seed; identical seeds give bit-identical sample sets for
/// identical inputs on the same build.
struct Seed {
  std::uint64_t value = 0;
};

namespace detail {

inline double sample_finite_law(const FiniteLaw& law, double u) {
  double cum = 0.0;
  for (std::size_t i = 0; i < law.size(); ++i) {
    cum += law.weights()[i];
    if (u < cum) return law.support()[i];
  }
  return law.support().back();
}

/// Inverse-cdf draws so determinism never depends on rejection loops.
inline double sample_family(const TargetFamily& family, Rng& rng) {
  switch (family.kind()) {
    case FamilyKind::gaussian: {
      const auto& p = family.gaussian_params();
      return p.mean + std::sqrt(p.variance) * normal_quantile(rng.uniform_open01());
    }
    case FamilyKind::gamma: {
      const auto& p = family.gamma_params();
      return gamma_quantile(p.shape, rng.uniform_open01()) / p.rate;
    }
    case FamilyKind::poisson: {
      const double lambda = family.poisson_params().lambda;
      if (lambda > 700.0) {
        // exp(-lambda) underflows and the cdf scan would never accumulate.
        throw FamilyError("poisson sampling: lambda above 700 is not supported");
      }
      const double u = rng.uniform_open01();
      double cum = 0.0;
      double pmf = std::exp(-lambda);
      for (std::size_t k = 0;; ++k) {
        cum += pmf;
        if (u < cum) return static_cast<double>(k);
        pmf *= lambda / static_cast<double>(k + 1);
        if (k > 1000000) throw Error("poisson sampling: cdf scan failed to terminate");
      }
    }
    case FamilyKind::finite_discrete:
      return sample_finite_law(family.law(), rng.uniform01());
  }
  throw FamilyError("sample_family: unknown family kind");
}

}  // namespace detail

/// Draws n pairs as y ~ mu_Y then x ~ nu_y; deterministic per seed.
inline SampleSet sample_model(const ConditionalModel& model, std::size_t n, Seed seed) {
  if (n == 0) throw ValidationError("sample_model: n must be >= 1");
  Rng rng(seed.value, /*stream=*/0);
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = detail::sample_finite_law(model.y_weights(), rng.uniform01());
    const double x = detail::sample_family(model.family_at(y), rng);
    pairs.emplace_back(x, y);
  }
  return SampleSet(std::move(pairs), "sample_model seed=" + std::to_string(seed.value));
}

/// Draws x and y independently; equals sample_model on the constant-family
/// model in distribution.
inline SampleSet sample_independent(const TargetFamily& x_law, const FiniteLaw& y_law,
                                    std::size_t n, Seed seed) {
  if (n == 0) throw ValidationError("sample_independent: n must be >= 1");
  Rng rng(seed.value, /*stream=*/0);
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = detail::sample_finite_law(y_law, rng.uniform01());
    const double x = detail::sample_family(x_law, rng);
    pairs.emplace_back(x, y);
  }
  return SampleSet(std::move(pairs), "sample_independent seed=" + std::to_string(seed.value));
}

/// Mean shift by eps: Gaussian mean + eps, Poisson lambda + eps, Gamma mean
/// shifted through the rate (alpha/beta + eps), FiniteDiscrete support
/// translated by eps.
inline ConditionalModel mean_shift(const ConditionalModel& model, double eps) {
  if (!(eps >= 0.0)) throw ValidationError("mean_shift: eps must be nonnegative");
  std::vector<TargetFamily> families;
  families.reserve(model.size());
  for (const auto& fam : model.families()) {
    switch (fam.kind()) {
      case FamilyKind::gaussian: {
        const auto& p = fam.gaussian_params();
        families.push_back(TargetFamily::gaussian(p.mean + eps, p.variance));
        break;
      }
      case FamilyKind::poisson:
        families.push_back(TargetFamily::poisson(fam.poisson_params().lambda + eps));
        break;
      case FamilyKind::gamma: {
        const auto& p = fam.gamma_params();
        const double new_rate = p.shape * p.rate / (p.shape + eps * p.rate);
        families.push_back(TargetFamily::gamma(p.shape, new_rate));
        break;
      }
      case FamilyKind::finite_discrete: {
        const FiniteLaw& law = fam.law();
        std::vector<double> support(law.support());
        for (double& s : support) s += eps;
        families.push_back(
            TargetFamily::finite_discrete(FiniteLaw(std::move(support), law.weights())));
        break;
      }
    }
  }
  return ConditionalModel(model.y_weights(), std::move(families));
}

/// Mixes each conditional with `noise` at weight eps. FiniteDiscrete
/// families only: the mixture of a continuous family with a finite law has
/// no representation in the catalog.
inline ConditionalModel contaminate(const ConditionalModel& model, double eps,
                                    const FiniteLaw& noise) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw ValidationError("contaminate: eps must lie in [0,1]");
  std::vector<TargetFamily> families;
  families.reserve(model.size());
  for (const auto& fam : model.families()) {
    if (!fam.is_finite_discrete()) {
      throw FamilyError("contaminate: only FiniteDiscrete families can absorb a finite noise law");
    }
    const FiniteLaw& law = fam.law();
    std::vector<double> support = merge_grids(law.support(), noise.support());
    std::vector<double> weights(support.size(), 0.0);
    for (std::size_t i = 0; i < support.size(); ++i) {
      weights[i] = (1.0 - eps) * law.mass_at(support[i]) + eps * noise.mass_at(support[i]);
    }
    families.push_back(TargetFamily::finite_discrete(FiniteLaw(std::move(support), std::move(weights))));
  }
  return ConditionalModel(model.y_weights(), std::move(families));
}

/// Exchanges the families at y_a and y_b, leaving the y-weights fixed: the
/// dependence structure changes, the mixture marginal does not when the two
/// weights are equal.
inline ConditionalModel swap_conditionals(const ConditionalModel& model, double y_a, double y_b) {
  const std::size_t ia = model.index_of_y(y_a);
  const std::size_t ib = model.index_of_y(y_b);
  std::vector<TargetFamily> families(model.families());
  std::swap(families[ia], families[ib]);
  return ConditionalModel(model.y_weights(), std::move(families));
}

/// Perturbation selector for callers that take the kind at run time.
struct MeanShift {
  double eps;
};
struct Contaminate {
  double eps;
  FiniteLaw noise;
};
struct SwapConditionals {
  double y_a, y_b;
};
using Perturbation = std::variant<MeanShift, Contaminate, SwapConditionals>;

inline ConditionalModel perturb(const ConditionalModel& model, const Perturbation& kind) {
  if (const auto* ms = std::get_if<MeanShift>(&kind)) return mean_shift(model, ms->eps);
  if (const auto* ct = std::get_if<Contaminate>(&kind)) {
    return contaminate(model, ct->eps, ct->noise);
  }
  const auto& sw = std::get<SwapConditionals>(kind);
  return swap_conditionals(model, sw.y_a, sw.y_b);
}

}  // namespace condstein
