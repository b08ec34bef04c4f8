#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "condstein/condstein.hpp"
#include "condstein/scenarios.hpp"

namespace condstein {

/// One acceptance check: a named pass/fail with a short observation string.
struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

namespace validate_detail {

inline std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), pattern, a, b);
  return buf;
}

struct PolynomialEntry {
  TestFunction f;
  std::string label;
};

/// {1, x, x^2, x^3, x^4} with analytic derivatives; FiniteDiscrete entries
/// are shifted so the left support endpoint maps to zero.
inline std::vector<PolynomialEntry> polynomial_dictionary(const TargetFamily& family) {
  std::vector<PolynomialEntry> out;
  const bool discrete = family.kind() == FamilyKind::poisson ||
                        family.kind() == FamilyKind::finite_discrete;
  const DomainKind kind = discrete ? DomainKind::discrete : DomainKind::continuous;
  const double shift =
      family.kind() == FamilyKind::finite_discrete ? family.law().support().front() : 0.0;
  for (int degree = 0; degree <= 4; ++degree) {
    const bool needs_shift = family.kind() == FamilyKind::finite_discrete;
    auto eval = [degree, shift, needs_shift](double x) {
      const double v = std::pow(x, degree);
      return needs_shift ? v - std::pow(shift, degree) : v;
    };
    auto deriv = [degree](double x) {
      return degree == 0 ? 0.0 : degree * std::pow(x, degree - 1);
    };
    out.push_back({TestFunction(eval, deriv, kind), "x^" + std::to_string(degree)});
  }
  return out;
}

inline std::vector<TargetFamily> family_catalog(Rng& rng) {
  std::vector<TargetFamily> out;
  out.push_back(TargetFamily::gaussian(0.0, 1.0));
  out.push_back(TargetFamily::gaussian(1.5, 4.0));
  out.push_back(TargetFamily::poisson(1.0));
  out.push_back(TargetFamily::poisson(6.5));
  out.push_back(TargetFamily::gamma(2.0, 1.0));
  out.push_back(TargetFamily::gamma(0.5, 2.0));
  out.push_back(TargetFamily::gamma(8.0, 3.0));
  out.push_back(TargetFamily::finite_discrete(
      scenarios::random_law(rng, scenarios::jittered_grid(rng, 6, -1.0, 2.0))));
  return out;
}

/// At least 20 bounded source terms per family, indicators included.
inline std::vector<SourceFn> source_dictionary(const TargetFamily& family, Rng& rng) {
  std::vector<SourceFn> out;
  switch (family.kind()) {
    case FamilyKind::gaussian:
    case FamilyKind::gamma: {
      const TruncatedDomain dom = truncated_domain(family);
      const double span = dom.hi - dom.lo;
      for (int k = 1; k <= 7; ++k) {
        out.push_back(step_source(dom.lo + span * k / 8.0, "step_" + std::to_string(k)));
      }
      for (int k = 0; k < 3; ++k) {
        const double a = dom.lo + span * (0.15 + 0.2 * k);
        out.push_back(window_source(a, a + 0.2 * span, "window_" + std::to_string(k)));
      }
      for (int k = 0; k < 3; ++k) {
        const double c = dom.lo + span * (0.2 + 0.2 * k);
        const double w = 0.05 * span;
        out.push_back(SourceFn{[c, w](double x) { return std::clamp((x - c) / w, 0.0, 1.0); },
                               {c, c + w},
                               "ramp_" + std::to_string(k)});
      }
      const double mid = 0.5 * (dom.lo + dom.hi);
      out.push_back(SourceFn{[](double x) { return std::sin(x); }, {}, "sin"});
      out.push_back(SourceFn{[](double x) { return std::cos(0.5 * x); }, {}, "cos_half"});
      out.push_back(SourceFn{[](double x) { return std::sin(2.0 * x + 1.0); }, {}, "sin_2x"});
      out.push_back(SourceFn{[mid](double x) { return std::atan(x - mid); }, {}, "atan"});
      out.push_back(
          SourceFn{[mid](double x) { return std::atan(2.0 * (x - mid)) / 3.0; }, {}, "atan_2"});
      out.push_back(SourceFn{[mid, span](double x) {
                               const double z = (x - mid) / (0.2 * span);
                               return std::exp(-z * z);
                             },
                             {},
                             "bump_mid"});
      out.push_back(SourceFn{[dom, span](double x) {
                               const double z = (x - dom.lo - 0.3 * span) / (0.1 * span);
                               return std::exp(-z * z);
                             },
                             {},
                             "bump_left"});
      out.push_back(SourceFn{[](double) { return 1.0; }, {}, "const"});
      break;
    }
    case FamilyKind::poisson: {
      const double lambda = family.poisson_params().lambda;
      const double top = std::floor(lambda + 2.0 * std::sqrt(lambda));
      for (double c : {0.0, 1.0, 2.0, std::floor(lambda), top}) {
        out.push_back(SourceFn{[c](double k) { return k <= c ? 1.0 : 0.0; },
                               {},
                               "step_" + std::to_string(static_cast<int>(c))});
      }
      for (double j : {0.0, 1.0, 2.0, std::floor(lambda) + 1.0}) {
        out.push_back(SourceFn{[j](double k) { return k == j ? 1.0 : 0.0; },
                               {},
                               "point_" + std::to_string(static_cast<int>(j))});
      }
      for (double c : {1.0, std::floor(lambda) + 2.0}) {
        out.push_back(SourceFn{[c](double k) { return k >= c ? 1.0 : 0.0; },
                               {},
                               "upper_" + std::to_string(static_cast<int>(c))});
      }
      out.push_back(SourceFn{[](double k) { return std::fmod(k, 2.0) == 0.0 ? 1.0 : -1.0; },
                             {},
                             "alternating"});
      out.push_back(SourceFn{[](double k) { return std::sin(k); }, {}, "sin"});
      out.push_back(SourceFn{[](double k) { return std::cos(k); }, {}, "cos"});
      out.push_back(SourceFn{[](double k) { return 1.0 / (1.0 + k); }, {}, "inv"});
      out.push_back(SourceFn{[](double k) { return std::min(k, 5.0) / 5.0; }, {}, "clip5"});
      out.push_back(
          SourceFn{[lambda](double k) { return std::exp(-k / (lambda + 1.0)); }, {}, "expdecay"});
      out.push_back(SourceFn{[](double k) { return std::fmod(k, 3.0) == 0.0 ? 1.0 : 0.0; },
                             {},
                             "mod3"});
      out.push_back(SourceFn{[](double k) { return k / (1.0 + k); }, {}, "saturating"});
      out.push_back(SourceFn{[](double) { return 1.0; }, {}, "const"});
      break;
    }
    case FamilyKind::finite_discrete: {
      const FiniteLaw& law = family.law();
      for (std::size_t j = 0; j < law.size(); ++j) {
        const double point = law.support()[j];
        out.push_back(SourceFn{[point](double x) { return x == point ? 1.0 : 0.0; },
                               {},
                               "point_" + std::to_string(j)});
      }
      for (std::size_t j = 0; j + 1 < law.size(); ++j) {
        const double c = law.support()[j];
        out.push_back(SourceFn{[c](double x) { return x <= c ? 1.0 : 0.0; },
                               {},
                               "step_" + std::to_string(j)});
      }
      while (out.size() < 20) {
        std::vector<double> values(law.size());
        for (double& v : values) v = rng.uniform(-1.0, 1.0);
        auto support = law.support();
        out.push_back(SourceFn{[support, values](double x) {
                                 const auto idx = index_of_exact(support, x);
                                 return idx ? values[*idx] : 0.0;
                               },
                               {},
                               "random_" + std::to_string(out.size())});
      }
      break;
    }
  }
  return out;
}

struct PairCase {
  ConditionalModel model;
  JointTable joint;
};

/// The seeded (joint, model) pairs used by the identity / tv-tightness / W
/// consistency criteria: matched tables, random conditionals, and
/// within-column perturbations, all sharing the model's y-marginal.
inline std::vector<PairCase> identity_pairs(std::uint64_t seed, std::size_t count) {
  std::vector<PairCase> out;
  Rng rng(seed, 3);
  const std::size_t shapes[3][2] = {{3, 2}, {5, 3}, {8, 4}};
  for (std::size_t i = 0; i < count; ++i) {
    const auto& sh = shapes[i % 3];
    ConditionalModel model = scenarios::random_model(rng, sh[0], sh[1]);
    switch (i % 4) {
      case 0:
        out.push_back({model, joint_table(model)});
        break;
      case 1:
      case 2:
        out.push_back({model, scenarios::random_conditional_joint(rng, model)});
        break;
      default:
        out.push_back({model, scenarios::perturb_within_column(rng, joint_table(model), 1e-3)});
        break;
    }
  }
  return out;
}

}  // namespace validate_detail

/// 1. Operator zero-mean over the polynomial dictionary.
inline CheckResult acceptance_zero_mean(std::uint64_t seed) {
  using namespace validate_detail;
  Rng rng(seed, 10);
  double worst = 0.0;
  std::string worst_at;
  for (const auto& family : family_catalog(rng)) {
    for (const auto& entry : polynomial_dictionary(family)) {
      const double r = zero_mean_residual(family, entry.f);
      if (r > worst) {
        worst = r;
        worst_at = std::string(family_kind_name(family.kind())) + " " + entry.label;
      }
    }
  }
  return CheckResult{1, "operator zero-mean", worst <= 1e-8,
                     fmt("max residual %.3g (limit 1e-8) at ", worst) + worst_at};
}

/// 2. Equation residuals over >= 20 source terms per family.
inline CheckResult acceptance_equation_residuals(std::uint64_t seed) {
  using namespace validate_detail;
  Rng rng(seed, 11);
  double worst = 0.0;
  std::string worst_at;
  for (const auto& family : family_catalog(rng)) {
    const auto dict = source_dictionary(family, rng);
    for (const auto& h : dict) {
      const SteinSolution sol = solve(family, h);
      const double r = residual(family, sol, residual_grid(family, h, 512));
      if (r > worst) {
        worst = r;
        worst_at = std::string(family_kind_name(family.kind())) + " " + h.label;
      }
    }
  }
  return CheckResult{2, "stein equation residuals", worst <= 1e-8,
                     fmt("max residual %.3g (limit 1e-8) at ", worst) + worst_at};
}

/// 3 and 5. Identity between the discrepancy and the expectation gap over the
/// full TV dictionary, and tv-bound tightness against the exact oracle, over
/// the same seeded pairs.
inline std::vector<CheckResult> acceptance_identity_and_tv(std::uint64_t seed,
                                                           std::size_t pairs = 50) {
  using namespace validate_detail;
  double worst_gap = 0.0;
  double worst_tv = 0.0;
  const auto cases = identity_pairs(seed, pairs);
  for (const auto& pc : cases) {
    const JointTable model_table = joint_table(pc.model);
    const auto [a, b] = align_tables(pc.joint, model_table);
    std::vector<std::vector<double>> diff(a.nx(), std::vector<double>(a.ny(), 0.0));
    for (std::size_t i = 0; i < a.nx(); ++i) {
      for (std::size_t j = 0; j < a.ny(); ++j) diff[i][j] = a.mass(i, j) - b.mass(i, j);
    }
    const auto dict = detail::tv_dictionary(a.x_grid(), a.y_grid(), &diff, kDictionarySeed, 256);
    std::vector<double> gaps(dict.size(), 0.0);
    parallel_for(dict.size(), [&](std::size_t k) {
      const BivariateSourceFn h =
          detail::indicator_source(a.x_grid(), a.y_grid(), dict[k].second, dict[k].first);
      const IdentityCheck ic = stein_identity_check(a, pc.model, h);
      gaps[k] = std::fabs(ic.lhs - ic.rhs);
    });
    for (double g : gaps) worst_gap = std::max(worst_gap, g);
    const DiscrepancyReport tv = tv_bound(pc.joint, pc.model);
    worst_tv = std::max(worst_tv, std::fabs(tv.sup_value - tv_exact(pc.joint, model_table)));
  }
  return {CheckResult{3, "stein identity (full TV dictionary)", worst_gap <= 1e-8,
                      fmt("max |lhs - rhs| %.3g (limit 1e-8) over %g pairs", worst_gap,
                          static_cast<double>(cases.size()))},
          CheckResult{5, "tv bound tightness vs oracle", worst_tv <= 1e-8,
                      fmt("max |sup - tv_exact| %.3g (limit 1e-8)", worst_tv)}};
}

/// 4. Finite characterization agrees exactly with entrywise equality.
inline CheckResult acceptance_characterization(std::uint64_t seed) {
  using namespace validate_detail;
  Rng rng(seed, 12);
  const std::size_t shapes[3][2] = {{3, 2}, {5, 3}, {8, 4}};
  std::size_t disagreements = 0, total = 0;
  for (const auto& sh : shapes) {
    for (std::size_t rep = 0; rep < 100; ++rep) {
      ConditionalModel model = scenarios::random_model(rng, sh[0], sh[1]);
      JointTable matched = joint_table(model);
      JointTable joint = matched;
      switch (rep % 5) {
        case 0:
          break;  // matched
        case 1:
          joint = scenarios::random_conditional_joint(rng, model);
          break;
        case 2:
          joint = scenarios::perturb_within_column(rng, matched, 1e-3);
          break;
        case 3:
          joint = scenarios::cross_column_swap(rng, matched, 1e-3);
          break;
        default: {
          // Equal-weight swap: mixture marginal is unchanged, dependence is not.
          std::vector<double> w = model.y_weights().weights();
          const double shared = 0.5 * (w[0] + w[1]);
          w[0] = shared;
          w[1] = shared;
          double partial = 0.0;
          for (std::size_t i = 0; i + 1 < w.size(); ++i) partial += w[i];
          w.back() = 1.0 - partial;
          model = ConditionalModel(FiniteLaw(model.y_values(), w), model.families());
          const ConditionalModel swapped =
              swap_conditionals(model, model.y_values()[0], model.y_values()[1]);
          joint = joint_table(swapped);
          matched = joint_table(model);
          break;
        }
      }
      const bool equal = scenarios::max_entry_gap(joint, matched) <= 1e-10;
      const bool characterized = characterize_finite(joint, model);
      disagreements += (equal != characterized) ? 1 : 0;
      ++total;
    }
  }
  return CheckResult{4, "finite characterization vs entrywise equality", disagreements == 0,
                     fmt("%g disagreements over %g pairs", static_cast<double>(disagreements),
                         static_cast<double>(total))};
}

/// 6. W-bound consistency: dictionary below the transport oracle on the
/// identity pairs, and near-sharp on pure x-translations.
inline CheckResult acceptance_w_consistency(std::uint64_t seed) {
  using namespace validate_detail;
  double worst_excess = -1e300;
  const auto cases = identity_pairs(seed, 50);
  for (const auto& pc : cases) {
    const double dict_sup = w_bound(pc.joint, pc.model).sup_value;
    const double lp = wasserstein_exact(pc.joint, joint_table(pc.model));
    worst_excess = std::max(worst_excess, dict_sup - lp);
  }
  bool translations_ok = true;
  double worst_ratio = 1e300;
  {
    const std::vector<double> ys{-0.5, 0.6, 1.7};
    std::vector<double> yw{0.3, 0.45, 0.0};
    yw[2] = 1.0 - yw[0] - yw[1];
    std::vector<TargetFamily> fams;
    for (double y : ys) fams.push_back(TargetFamily::gaussian(y, 1.0));
    const ConditionalModel model(FiniteLaw(ys, yw), fams);
    const double stencil_w[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
    for (double eps : {0.1, 0.5, 1.0}) {
      std::vector<double> xs;
      for (double y : ys) {
        for (int k = -2; k <= 2; ++k) xs.push_back(y + eps + k);
      }
      std::sort(xs.begin(), xs.end());
      xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
      std::vector<double> mass(xs.size() * ys.size(), 0.0);
      for (std::size_t j = 0; j < ys.size(); ++j) {
        for (int k = -2; k <= 2; ++k) {
          const auto xi = index_of_exact(xs, ys[j] + eps + k);
          mass[*xi * ys.size() + j] += yw[j] * stencil_w[k + 2];
        }
      }
      const JointTable joint(xs, ys, mass);
      const double sup = w_bound(joint, model).sup_value;
      worst_ratio = std::min(worst_ratio, sup / eps);
      if (sup < 0.99 * eps) translations_ok = false;
    }
  }
  const bool pass = worst_excess <= 1e-8 && translations_ok;
  return CheckResult{6, "w bound consistency", pass,
                     fmt("max dict - oracle %.3g (limit 1e-8); min translation ratio %.6f "
                         "(limit 0.99)",
                         worst_excess, worst_ratio)};
}

/// 7. Independence reduction: the constant-family model against the
/// independent sampler; the empirical TV sweep stays within its noise band.
inline CheckResult acceptance_independence(std::uint64_t seed) {
  using validate_detail::fmt;
  Rng rng(seed, 13);
  const std::vector<double> xs = scenarios::jittered_grid(rng, 6, -1.5, 2.0);
  const FiniteLaw x_marginal = scenarios::random_law(rng, xs);
  const std::vector<double> ys = scenarios::jittered_grid(rng, 4, 0.0, 1.0);
  const FiniteLaw y_marginal = scenarios::random_law(rng, ys);
  std::vector<TargetFamily> fams(ys.size(), TargetFamily::finite_discrete(x_marginal));
  const ConditionalModel model(y_marginal, fams);

  int ok_seeds = 0;
  double worst_z = 0.0;
  for (std::uint64_t s = 0; s < 8; ++s) {
    const SampleSet samples =
        sample_independent(TargetFamily::finite_discrete(x_marginal), y_marginal, 100000,
                           Seed{seed + 1000 + s});
    const DiscrepancyReport rep = tv_bound(samples, model);
    double z = 0.0;
    for (const auto& fv : rep.per_function) {
      if (std::fabs(fv.value) == rep.sup_value && fv.std_error && *fv.std_error > 0.0) {
        z = std::fabs(fv.value) / *fv.std_error;
      }
    }
    worst_z = std::max(worst_z, z);
    if (z <= 4.0) ++ok_seeds;
  }
  return CheckResult{7, "independence reduction", ok_seeds >= 7,
                     fmt("%g of 8 seeds within 4 SE (worst sup/SE %.2f)",
                         static_cast<double>(ok_seeds), worst_z)};
}

/// 8. Sensitivity scaling: a mean shift of eps moves the discrepancy of the
/// constant test function to exactly -eps; the empirical estimate follows.
inline CheckResult acceptance_sensitivity(std::uint64_t seed) {
  using validate_detail::fmt;
  const std::vector<double> ys{-1.0, 0.5, 2.0};
  std::vector<double> yw{0.3, 0.45, 0.0};
  yw[2] = 1.0 - yw[0] - yw[1];
  std::vector<TargetFamily> fams;
  for (double y : ys) fams.push_back(TargetFamily::gaussian(y, 1.0));
  const ConditionalModel model(FiniteLaw(ys, yw), fams);
  const BivariateTestFunction one = BivariateTestFunction::constant_in_y(
      std::vector<double>(ys), TestFunction::constant(1.0));

  double worst_exact = 0.0, worst_z = 0.0;
  for (double eps : {0.02, 0.05, 0.1}) {
    std::vector<double> xs;
    for (double y : ys) {
      for (int k = -1; k <= 1; ++k) xs.push_back(y + eps + k);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    const double stencil_w[3] = {0.25, 0.5, 0.25};
    std::vector<double> mass(xs.size() * ys.size(), 0.0);
    for (std::size_t j = 0; j < ys.size(); ++j) {
      for (int k = -1; k <= 1; ++k) {
        const auto xi = index_of_exact(xs, ys[j] + eps + k);
        mass[*xi * ys.size() + j] += yw[j] * stencil_w[k + 1];
      }
    }
    const JointTable joint(xs, ys, mass);
    worst_exact = std::max(worst_exact, std::fabs(exact_stein(joint, model, one) + eps));

    const SampleSet samples = sample_model(mean_shift(model, eps), 100000,
                                           Seed{seed + static_cast<std::uint64_t>(eps * 1000)});
    const EmpiricalValue ev = empirical_stein(samples, model, one);
    worst_z = std::max(worst_z, std::fabs(ev.value + eps) / ev.std_error);
  }
  const bool pass = worst_exact <= 1e-10 && worst_z <= 5.0;
  return CheckResult{8, "sensitivity scaling", pass,
                     fmt("max |exact + eps| %.3g (limit 1e-10); worst |empirical + eps|/SE %.2f "
                         "(limit 5)",
                         worst_exact, worst_z)};
}

/// 9. Per-slice conditional expectations: zero for matched joints, and a
/// single-slice perturbation moves only the perturbed slice.
inline CheckResult acceptance_slicewise(std::uint64_t seed) {
  using validate_detail::fmt;
  (void)seed;
  const std::vector<double> ys{-1.0, 0.5, 2.0};
  std::vector<double> yw{0.25, 0.4, 0.0};
  yw[2] = 1.0 - yw[0] - yw[1];
  std::vector<TargetFamily> fams;
  for (double y : ys) fams.push_back(TargetFamily::gaussian(y, 1.0));
  const ConditionalModel model(FiniteLaw(ys, yw), fams);
  const BivariateTestFunction one = BivariateTestFunction::constant_in_y(
      std::vector<double>(ys), TestFunction::constant(1.0));

  auto build = [&](double shift, std::size_t shifted_slice) {
    std::vector<double> xs;
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const double mu = ys[j] + (j == shifted_slice ? shift : 0.0);
      for (int k = -1; k <= 1; ++k) xs.push_back(mu + k);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    const double stencil_w[3] = {0.25, 0.5, 0.25};
    std::vector<double> mass(xs.size() * ys.size(), 0.0);
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const double mu = ys[j] + (j == shifted_slice ? shift : 0.0);
      for (int k = -1; k <= 1; ++k) {
        mass[*index_of_exact(xs, mu + k) * ys.size() + j] += yw[j] * stencil_w[k + 1];
      }
    }
    return JointTable(xs, ys, mass);
  };

  double worst_matched = 0.0;
  for (const auto& [y, v] : conditional_expectation_check(build(0.0, 0), model, one)) {
    (void)y;
    worst_matched = std::max(worst_matched, std::fabs(v));
  }
  const double eps = 0.05;
  const std::size_t shifted = 1;
  double off_slice = 0.0, on_slice_gap = 1e300;
  for (const auto& [y, v] : conditional_expectation_check(build(eps, shifted), model, one)) {
    if (y == ys[shifted]) {
      on_slice_gap = std::fabs(v + eps);
    } else {
      off_slice = std::max(off_slice, std::fabs(v));
    }
  }
  const bool pass = worst_matched <= 1e-10 && off_slice <= 1e-10 && on_slice_gap <= 1e-10;
  return CheckResult{9, "per-slice conditional check", pass,
                     fmt("matched max %.3g; perturbed slice localization gap %.3g (limits 1e-10)",
                         std::max(worst_matched, off_slice), on_slice_gap)};
}

/// Runs a named suite; "all" runs the full ordered list. Wall time is
/// recorded per check.
inline std::vector<CheckResult> run_validation_suite(const std::string& suite,
                                                     std::uint64_t seed) {
  std::vector<CheckResult> out;
  auto timed = [&out](auto&& runner) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r = runner();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  };
  auto add_identity = [&] {
    const auto t0 = std::chrono::steady_clock::now();
    auto results = acceptance_identity_and_tv(seed);
    const double half =
        0.5 * std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (auto& r : results) {
      r.seconds = half;  // computed over the same pair sweep
      out.push_back(std::move(r));
    }
  };
  if (suite == "identity") {
    add_identity();
  } else if (suite == "characterization") {
    timed([&] { return acceptance_characterization(seed); });
    timed([&] { return acceptance_slicewise(seed); });
  } else if (suite == "bounds") {
    timed([&] { return acceptance_zero_mean(seed); });
    timed([&] { return acceptance_equation_residuals(seed); });
    timed([&] { return acceptance_w_consistency(seed); });
  } else if (suite == "independence") {
    timed([&] { return acceptance_independence(seed); });
    timed([&] { return acceptance_sensitivity(seed); });
  } else if (suite == "all") {
    timed([&] { return acceptance_zero_mean(seed); });
    timed([&] { return acceptance_equation_residuals(seed); });
    add_identity();
    timed([&] { return acceptance_characterization(seed); });
    timed([&] { return acceptance_w_consistency(seed); });
    timed([&] { return acceptance_independence(seed); });
    timed([&] { return acceptance_sensitivity(seed); });
    timed([&] { return acceptance_slicewise(seed); });
  } else {
    throw SpecParseError("unknown suite: " + suite +
                         " (expected identity, characterization, bounds, independence, all)");
  }
  return out;
}

/// Default base seed for the validation suites.
inline constexpr std::uint64_t kValidationSeed = 20240801;

}  // namespace condstein
