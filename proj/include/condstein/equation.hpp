#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "condstein/chebyshev.hpp"
#include "condstein/families.hpp"
#include "condstein/operators.hpp"

namespace condstein {

/// A source term h with its known discontinuities and kinks; the jump list
/// lets quadrature and interpolation split at the right places, which is what
/// keeps indicator sources inside the residual tolerance.
struct SourceFn {
  std::function<double(double)> eval;
  std::vector<double> jumps;
  std::string label;
};

inline SourceFn step_source(double c, std::string label = {}) {
  return SourceFn{[c](double x) { return x <= c ? 1.0 : 0.0; },
                  {c},
                  label.empty() ? "step" : std::move(label)};
}

inline SourceFn window_source(double a, double b, std::string label = {}) {
  return SourceFn{[a, b](double x) { return (x > a && x <= b) ? 1.0 : 0.0; },
                  {a, b},
                  label.empty() ? "window" : std::move(label)};
}

/// Solution of N f = h - E_nu[h] in the family's class. The residual of the
/// stored test function stays below 1e-8 at every point of the working grid.
struct SteinSolution {
  TestFunction f;
  SourceFn h;
  double centered_mean;
  TargetFamily family;
};

namespace detail {

// Quadrature tolerance for solution values at interpolation nodes. Tighter
// than the default 1e-10 because interpolation differentiation amplifies node
// noise by O(N^2 / length).
inline constexpr double kNodeTol = 1e-12;
inline constexpr double kMeanTol = 1e-13;
// exp(-46) ~ 1e-20: tail cut for the weight-ratio integrands.
inline constexpr double kLogTailCut = 46.0;

inline std::vector<double> jumps_in(const std::vector<double>& jumps, double lo, double hi) {
  std::vector<double> out;
  for (double c : jumps) {
    if (c > lo && c < hi) out.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Bounded solution of f' - ((x-m)/s^2) f = ht on the truncated domain,
// evaluated by integrating the weight-ratio form from the nearer tail. The
// exponent (x-t)(x+t-2m)/(2 s^2) is nonpositive on the chosen branch, so the
// integrand never exceeds the oscillation of ht.
inline double gaussian_solution_value(const std::function<double(double)>& ht, double m,
                                      double variance, const std::vector<double>& jumps,
                                      double x) {
  QuadratureOptions opt;
  opt.abs_tol = kNodeTol;
  auto ratio = [&](double t) { return std::exp((x - t) * (x + t - 2.0 * m) / (2.0 * variance)); };
  if (x <= m) {
    const double t_lo = m - std::sqrt((x - m) * (x - m) + 2.0 * kLogTailCut * variance);
    auto integrand = [&](double t) { return ht(t) * ratio(t); };
    return integrate(integrand, t_lo, x, opt, jumps_in(jumps, t_lo, x));
  }
  const double t_hi = m + std::sqrt((x - m) * (x - m) + 2.0 * kLogTailCut * variance);
  auto integrand = [&](double t) { return ht(t) * ratio(t); };
  return -integrate(integrand, x, t_hi, opt, jumps_in(jumps, x, t_hi));
}

// Bounded solution of x f' + (alpha - beta x) f = ht. Below the mean the
// integral is taken in v-coordinates (t = x v^(1/alpha)) when alpha < 1,
// removing the endpoint singularity; otherwise in t-coordinates against the
// log-weight L(t) = (alpha-1) ln t - beta t, whose ratio to L(x) stays
// bounded on the chosen branch.
inline double gamma_solution_value(const std::function<double(double)>& ht, double alpha,
                                   double beta, const std::vector<double>& jumps, double x) {
  QuadratureOptions opt;
  opt.abs_tol = kNodeTol;
  const double mean = alpha / beta;
  auto logw = [&](double t) { return (alpha - 1.0) * std::log(t) - beta * t; };
  if (x <= mean) {
    if (alpha < 1.0) {
      auto integrand = [&](double v) {
        const double t = x * std::pow(v, 1.0 / alpha);
        return ht(t) * std::exp(-beta * t);
      };
      std::vector<double> v_jumps;
      for (double c : jumps) {
        if (c > 0.0 && c < x) v_jumps.push_back(std::pow(c / x, alpha));
      }
      return std::exp(beta * x) / alpha * integrate(integrand, 0.0, 1.0, opt, v_jumps);
    }
    const double lx = logw(x);
    double t0 = 0.0;
    if (alpha > 1.0) {
      // Find where the weight falls kLogTailCut below its value at x.
      const double peak = std::min(x, (alpha - 1.0) / beta);
      double lo = peak * 1e-12, hi = peak;
      if (logw(lo) < lx - kLogTailCut) {
        for (int it = 0; it < 200 && hi - lo > 1e-14 * peak; ++it) {
          const double mid = 0.5 * (lo + hi);
          (logw(mid) < lx - kLogTailCut ? lo : hi) = mid;
        }
        t0 = lo;
      }
    }
    auto integrand = [&](double t) { return ht(t) * std::exp(logw(t) - lx); };
    return integrate(integrand, t0, x, opt, jumps_in(jumps, t0, x)) / x;
  }
  const double lx = logw(x);
  double t1 = x + kLogTailCut / beta;
  for (int it = 0; it < 64 && logw(t1) - lx > -kLogTailCut; ++it) t1 += kLogTailCut / beta;
  auto integrand = [&](double t) { return ht(t) * std::exp(logw(t) - lx); };
  return -integrate(integrand, x, t1, opt, jumps_in(jumps, x, t1)) / x;
}

struct PoissonSolutionTable {
  double lambda;
  std::function<double(double)> h;
  double centered_mean;
  std::size_t mode;
  std::vector<double> values;  // f(0) ... f(k_stored)

  double value_at(std::size_t k) const {
    if (k < values.size()) return values[k];
    return tail_value(k);
  }

  // f(k) = -sum_{j >= k} ht(j) p(j) / (lambda p(k-1)), via pmf ratio chains;
  // every ratio factor lambda/i is < 1 beyond the mode, so the chain decays.
  double tail_value(std::size_t k) const {
    double r = lambda / static_cast<double>(k);  // p(k)/p(k-1)
    double sum = 0.0;
    for (std::size_t j = k;; ++j) {
      sum += (h(static_cast<double>(j)) - centered_mean) * r;
      r *= lambda / static_cast<double>(j + 1);
      if (r < 1e-18 * (1.0 + std::fabs(sum)) && j > k + 2) break;
      if (j > k + 1000000) throw Error("poisson solve: tail chain failed to decay");
    }
    return -sum / lambda;
  }
};

// Standardized Gaussian solution as a single interpolant; the residual's
// derivative term is unamplified and the multiplier of the value term is
// bounded by the 12-unit z-domain.
inline TestFunction fit_gaussian_solution(const std::function<double(double)>& hz,
                                          const std::vector<double>& z_jumps,
                                          const TruncatedDomain& dom,
                                          const std::function<double(double)>& snapped_z,
                                          double f_scale, double x_scale, double tail_tol,
                                          double abs_tail) {
  auto value = [hz, z_jumps](double z) {
    return gaussian_solution_value(hz, 0.0, 1.0, z_jumps, z);
  };
  // The two integration branches meet at z = 0; making it a breakpoint keeps
  // the seam out of the interpolation pieces.
  std::vector<double> breaks = z_jumps;
  breaks.push_back(0.0);
  auto cheb = std::make_shared<ChebyshevInterpolant>(ChebyshevInterpolant::fit(
      value, dom.lo, dom.hi, breaks, tail_tol, abs_tail, /*max_points=*/65, /*max_depth=*/16));
  return TestFunction(
      [cheb, snapped_z, f_scale](double x) { return f_scale * cheb->eval(snapped_z(x)); },
      [cheb, snapped_z, f_scale, x_scale](double x) {
        return f_scale * x_scale * cheb->deriv(snapped_z(x));
      },
      DomainKind::continuous);
}

/// Standardized Gamma solution in a hybrid representation: F directly on the
/// inner region, G(z) = z F(z) on the outer region. The operator term z F'
/// evaluated through G is G' - G/z, so interpolation noise enters the
/// residual without the factor z that a direct outer fit would pick up; the
/// direct inner fit avoids dividing G by a vanishing z.
inline TestFunction fit_gamma_solution(const std::function<double(double)>& hz,
                                       const std::vector<double>& z_jumps, double shape,
                                       const TruncatedDomain& dom,
                                       const std::function<double(double)>& snapped_z,
                                       double x_scale, double tail_tol, double abs_tail) {
  auto value = [hz, z_jumps, shape](double z) {
    return gamma_solution_value(hz, shape, 1.0, z_jumps, z);
  };
  double z_mid = std::min(shape, 1.0);
  z_mid = std::min(std::max(z_mid, dom.lo), dom.hi);

  std::vector<double> breaks = z_jumps;
  breaks.push_back(shape);  // integration-branch seam

  std::shared_ptr<ChebyshevInterpolant> inner;
  if (dom.lo < z_mid) {
    inner = std::make_shared<ChebyshevInterpolant>(ChebyshevInterpolant::fit(
        value, dom.lo, z_mid, breaks, tail_tol, abs_tail, /*max_points=*/65,
        /*max_depth=*/16));
  }
  auto scaled = [value](double z) { return z * value(z); };
  auto outer = std::make_shared<ChebyshevInterpolant>(ChebyshevInterpolant::fit(
      scaled, z_mid, dom.hi, breaks, tail_tol, abs_tail, /*max_points=*/65, /*max_depth=*/16));

  auto eval = [inner, outer, snapped_z, z_mid](double x) {
    const double z = snapped_z(x);
    if (inner && z < z_mid) return inner->eval(z);
    return outer->eval(z) / z;
  };
  auto deriv = [inner, outer, snapped_z, z_mid, x_scale](double x) {
    const double z = snapped_z(x);
    if (inner && z < z_mid) return x_scale * inner->deriv(z);
    return x_scale * (outer->deriv(z) - outer->eval(z) / z) / z;
  };
  return TestFunction(eval, deriv, DomainKind::continuous);
}

}  // namespace detail

/// Residual of a solution over a grid:
/// max over grid of |N f(x) - (h(x) - centered_mean)|.
inline double residual(const TargetFamily& family, const SteinSolution& sol,
                       std::span<const double> grid) {
  double worst = 0.0;
  for (double x : grid) {
    const double r =
        std::fabs(apply(family, sol.f, x) - (sol.h.eval(x) - sol.centered_mean));
    worst = std::max(worst, r);
  }
  return worst;
}

/// Jump-avoiding evaluation grid: full truncated support for discrete
/// families, an n-point grid on the truncated domain otherwise, with points
/// nudged off declared jumps.
inline std::vector<double> residual_grid(const TargetFamily& family, const SourceFn& h,
                                         std::size_t n = 512) {
  switch (family.kind()) {
    case FamilyKind::finite_discrete:
      return family.law().support();
    case FamilyKind::poisson: {
      const auto r = poisson_range(family.poisson_params().lambda);
      std::vector<double> grid;
      for (std::size_t k = r.lo; k <= r.hi; ++k) grid.push_back(static_cast<double>(k));
      return grid;
    }
    default: {
      const TruncatedDomain dom = truncated_domain(family);
      std::vector<double> grid = linspace(dom.lo, dom.hi, n);
      const double nudge = (dom.hi - dom.lo) * 1e-7;
      for (double& x : grid) {
        for (double c : h.jumps) {
          if (std::fabs(x - c) < nudge) x += 2.0 * nudge;
        }
      }
      return grid;
    }
  }
}

/// Solves N f = h - E_nu[h] and returns the unique class solution:
/// f(s_0) = 0 for FiniteDiscrete, f(0) = 0 for Poisson, and the decaying
/// branch for Gaussian/Gamma. Continuous solutions are stored as piecewise
/// Chebyshev interpolants fitted on stable tail-integral values; their
/// residual is verified internally before returning.
inline SteinSolution solve(const TargetFamily& family, const SourceFn& h) {
  switch (family.kind()) {
    case FamilyKind::finite_discrete: {
      const FiniteLaw& law = family.law();
      const std::size_t n = law.size();
      std::vector<double> centered_terms(n);
      for (std::size_t i = 0; i < n; ++i) {
        centered_terms[i] = h.eval(law.support()[i]) * law.weights()[i];
      }
      const double mean = pairwise_sum(centered_terms);
      auto values = std::make_shared<std::vector<double>>(n, 0.0);
      for (std::size_t k = 0; k + 1 < n; ++k) {
        const double ht = h.eval(law.support()[k]) - mean;
        (*values)[k + 1] = law.weights()[k] / law.weights()[k + 1] * (ht + (*values)[k]);
        if (!std::isfinite((*values)[k + 1])) {
          throw OverflowGuardError("solve: FiniteDiscrete recursion left representable range");
        }
      }
      auto support = std::make_shared<std::vector<double>>(law.support());
      TestFunction f(
          [values, support](double x) {
            const auto idx = index_of_exact(*support, x);
            if (!idx) throw DomainError("stein solution: x outside the family support");
            return (*values)[*idx];
          },
          DomainKind::discrete);
      return SteinSolution{std::move(f), h, mean, family};
    }

    case FamilyKind::poisson: {
      const double lambda = family.poisson_params().lambda;
      const PoissonRange range = poisson_range(lambda);
      std::vector<double> mean_terms;
      for (std::size_t k = range.lo; k <= range.hi; ++k) {
        mean_terms.push_back(h.eval(static_cast<double>(k)) * poisson_pmf(lambda, k));
      }
      const double mean = pairwise_sum(mean_terms);

      auto table = std::make_shared<detail::PoissonSolutionTable>();
      table->lambda = lambda;
      table->h = h.eval;
      table->centered_mean = mean;
      table->mode = range.mode;
      table->values.assign(range.hi + 2, 0.0);
      // Prefix chain below the mode: A_{k+1} = A_k k/lambda + ht(k), f(k) = A_k/lambda.
      double acc = 0.0;
      for (std::size_t k = 1; k <= range.mode && k < table->values.size(); ++k) {
        acc = acc * (static_cast<double>(k) - 1.0) / lambda +
              (h.eval(static_cast<double>(k) - 1.0) - mean);
        table->values[k] = acc / lambda;
      }
      for (std::size_t k = std::max<std::size_t>(range.mode + 1, 1); k < table->values.size();
           ++k) {
        table->values[k] = table->tail_value(k);
      }
      TestFunction f(
          [table](double x) {
            const double k = std::round(x);
            if (std::fabs(x - k) > 1e-9 || k < 0.0) {
              throw DomainError("stein solution: Poisson solutions live on integers k >= 0");
            }
            return table->value_at(static_cast<std::size_t>(k));
          },
          DomainKind::discrete);
      return SteinSolution{std::move(f), h, mean, family};
    }

    case FamilyKind::gaussian:
    case FamilyKind::gamma: {
      // Solve in standardized coordinates (unit-variance Gaussian, unit-rate
      // Gamma): the residual term that multiplies the derivative is then
      // bounded by the intrinsic z-scale instead of the raw x-scale, so node
      // noise stays under the residual target uniformly in the parameters.
      const bool is_gauss = family.kind() == FamilyKind::gaussian;
      QuadratureOptions mean_opt;
      mean_opt.abs_tol = detail::kMeanTol;
      const double mean = family_expectation(family, h.eval, h.jumps, mean_opt);

      double x_scale = 1.0, x_offset = 0.0, f_scale = 1.0;
      if (is_gauss) {
        const auto& p = family.gaussian_params();
        const double sigma = std::sqrt(p.variance);
        x_scale = 1.0 / sigma;  // z = (x - m) / sigma
        x_offset = p.mean;
        f_scale = sigma;  // f(x) = sigma F(z) solves the x-space equation
      } else {
        x_scale = family.gamma_params().rate;  // z = rate * x
      }
      auto to_z = [x_scale, x_offset](double x) { return (x - x_offset) * x_scale; };
      auto to_x = [x_scale, x_offset](double z) { return z / x_scale + x_offset; };

      auto hz = [h, to_x, mean](double z) { return h.eval(to_x(z)) - mean; };
      std::vector<double> z_jumps;
      for (double c : h.jumps) z_jumps.push_back(to_z(c));
      std::sort(z_jumps.begin(), z_jumps.end());

      const TargetFamily standard =
          is_gauss ? TargetFamily::gaussian(0.0, 1.0)
                   : TargetFamily::gamma(family.gamma_params().shape, 1.0);
      const TruncatedDomain dom = truncated_domain(standard);

      // Rounding in the x -> z map may overshoot the fitted interval by an
      // ulp at the domain edges; snap those back, leave real overshoots to
      // the interpolant's own domain check.
      const double z_slack = 1e-9 * (dom.hi - dom.lo);
      auto snapped_z = [to_z, dom, z_slack](double x) {
        double z = to_z(x);
        if (z < dom.lo && z >= dom.lo - z_slack) z = dom.lo;
        if (z > dom.hi && z <= dom.hi + z_slack) z = dom.hi;
        return z;
      };

      // Moderate per-piece degrees with aggressive splitting keep the
      // derivative's noise amplification under the residual target.
      double tail_tol = 5e-13;
      double abs_tail = 3e-12;
      for (int attempt = 0;; ++attempt) {
        TestFunction f =
            is_gauss ? detail::fit_gaussian_solution(hz, z_jumps, dom, snapped_z, f_scale,
                                                     x_scale, tail_tol, abs_tail)
                     : detail::fit_gamma_solution(hz, z_jumps, family.gamma_params().shape,
                                                  dom, snapped_z, x_scale, tail_tol, abs_tail);
        SteinSolution sol{std::move(f), h, mean, family};
        const std::vector<double> probes = residual_grid(family, h, 257);
        if (residual(family, sol, probes) <= 5e-9) return sol;
        if (attempt >= 1) {
          throw QuadratureError("solve: residual verification failed after refinement");
        }
        tail_tol *= 1e-2;
        abs_tail *= 0.3;
      }
    }
  }
  throw FamilyError("solve: unknown family kind");
}

/// A source term on (x, y) given through its y-sections.
struct BivariateSourceFn {
  std::function<SourceFn(double y)> section;
  std::string label;
};

inline BivariateSourceFn constant_in_y_source(SourceFn h, std::string label = {}) {
  return BivariateSourceFn{[h](double) { return h; },
                           label.empty() ? h.label : std::move(label)};
}

/// Solves the per-y equations section by section and assembles the bivariate
/// solution, which is zero off the model's essential range. Solver errors are
/// rethrown tagged with the offending y.
inline BivariateTestFunction solve_conditional(const ConditionalModel& model,
                                               const BivariateSourceFn& h) {
  std::vector<TestFunction> sections;
  sections.reserve(model.size());
  for (std::size_t j = 0; j < model.size(); ++j) {
    const double y = model.y_values()[j];
    try {
      sections.push_back(solve(model.family(j), h.section(y)).f);
    } catch (const QuadratureError& e) {
      throw QuadratureError(std::string(e.what()) + " (at y = " + std::to_string(y) + ")");
    } catch (const OverflowGuardError& e) {
      throw OverflowGuardError(std::string(e.what()) + " (at y = " + std::to_string(y) + ")");
    }
  }
  return BivariateTestFunction(std::vector<double>(model.y_values()), std::move(sections));
}

}  // namespace condstein
