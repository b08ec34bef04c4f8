#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "condstein/equation.hpp"
#include "condstein/measures.hpp"
#include "condstein/operators.hpp"
#include "condstein/parallel.hpp"
#include "condstein/rng.hpp"

namespace condstein {

/// Seed of the randomized parts of the test-function dictionaries; recorded
/// in every report so sweeps are reproducible.
inline constexpr std::uint64_t kDictionarySeed = 0x5D1C7A11u;

enum class BoundKind { tv, w, raw };

struct FunctionValue {
  std::string label;
  double value = 0.0;
  std::optional<double> std_error;  // present iff empirical mode
};

/// Sweep result: per-function values and their sup. In W mode the dictionary
/// under-approximates the Lipschitz sup, so the sup is a lower estimate of
/// the corresponding distance bound.
struct DiscrepancyReport {
  std::vector<FunctionValue> per_function;
  double sup_value = 0.0;
  BoundKind bound_kind = BoundKind::raw;
  bool exact = false;
  std::size_t n_samples = 0;  // meaningful iff !exact
  std::uint64_t dictionary_seed = kDictionarySeed;
  bool dictionary_lower_bound = false;
};

namespace detail {

inline void check_joint_against_model(const JointTable& joint, const ConditionalModel& model) {
  for (double y : joint.y_grid()) {
    if (!index_of_exact(model.y_values(), y)) {
      throw EssentialRangeError("joint y-grid entry outside the model's essential range");
    }
  }
}

/// The identity between the discrepancy and the expectation gap presumes the
/// two joints share the auxiliary marginal; the operators act on x only and
/// cannot see a marginal change.
inline void check_marginal_match(const JointTable& joint, const ConditionalModel& model,
                                 double tol = 1e-9) {
  const std::vector<double> col = joint.y_marginal();
  for (std::size_t j = 0; j < joint.ny(); ++j) {
    const std::size_t k = model.index_of_y(joint.y_grid()[j]);
    if (std::fabs(col[j] - model.y_weights().weights()[k]) > tol) {
      throw MarginalMismatchError(
          "joint y-marginal differs from the model y-weights; the discrepancy bounds "
          "are stated for a shared auxiliary variable");
    }
  }
  // y values of the model missing from the joint grid carry zero joint mass.
  for (std::size_t k = 0; k < model.size(); ++k) {
    if (!index_of_exact(joint.y_grid(), model.y_values()[k]) &&
        model.y_weights().weights()[k] > tol) {
      throw MarginalMismatchError("model y value carries weight but is absent from the joint");
    }
  }
}

}  // namespace detail

/// E[N_Y f(X, Y)] under an exact joint table: sum of mass(x,y) N_y f(x,y).
inline double exact_stein(const JointTable& joint, const ConditionalModel& model,
                          const BivariateTestFunction& f) {
  detail::check_joint_against_model(joint, model);
  std::vector<double> terms;
  terms.reserve(joint.nx() * joint.ny());
  for (std::size_t i = 0; i < joint.nx(); ++i) {
    for (std::size_t j = 0; j < joint.ny(); ++j) {
      const double m = joint.mass(i, j);
      terms.push_back(
          m == 0.0 ? 0.0
                   : m * conditional_apply(model, f, joint.x_grid()[i], joint.y_grid()[j]));
    }
  }
  return pairwise_sum(terms);
}

struct EmpiricalValue {
  double value = 0.0;
  double std_error = 0.0;  // 0 when n = 1
};

/// Monte Carlo estimate (1/n) sum_i N_{y_i} f(x_i, y_i) with its standard
/// error. Pairwise summation keeps the result independent of evaluation
/// batching.
inline EmpiricalValue empirical_stein(const SampleSet& samples, const ConditionalModel& model,
                                      const BivariateTestFunction& f) {
  std::vector<std::size_t> offenders;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!index_of_exact(model.y_values(), samples.pairs[i].second)) {
      offenders.push_back(i);
      if (offenders.size() >= 8) break;
    }
  }
  if (!offenders.empty()) {
    std::string msg = "empirical_stein: sample y outside the essential range at indices";
    for (std::size_t i : offenders) msg += " " + std::to_string(i);
    throw EssentialRangeError(msg + " (bin samples first)");
  }
  std::vector<double> g(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    g[i] = conditional_apply(model, f, samples.pairs[i].first, samples.pairs[i].second);
  }
  const MeanStdErr ms = mean_and_stderr(g);
  return EmpiricalValue{ms.mean, ms.std_error};
}

struct IdentityCheck {
  double lhs = 0.0;  // discrepancy of the solved test function
  double rhs = 0.0;  // expectation gap between the joint and the model law
};

/// Both sides of the identity E[N_Y f_h(X,Y)] = E_joint[h] - E_model[h],
/// computed through independent code paths. Exact mode only; the joint must
/// share the model's y-marginal.
inline IdentityCheck stein_identity_check(const JointTable& joint, const ConditionalModel& model,
                                          const BivariateSourceFn& h) {
  detail::check_joint_against_model(joint, model);
  detail::check_marginal_match(joint, model);
  const BivariateTestFunction f = solve_conditional(model, h);
  IdentityCheck out;
  out.lhs = exact_stein(joint, model, f);

  const JointTable model_table = joint_table(model);
  auto h_eval = [&](double x, double y) { return h.section(y).eval(x); };
  out.rhs = joint.expectation(h_eval) - model_table.expectation(h_eval);
  return out;
}

namespace detail {

struct CellSet {
  // Included x indices per y column of a reference grid.
  std::vector<std::vector<std::size_t>> x_by_y;
};

inline BivariateSourceFn indicator_source(const std::vector<double>& xs,
                                          const std::vector<double>& ys, const CellSet& cells,
                                          std::string label) {
  auto section = [xs, ys, cells](double y) {
    const auto yj = index_of_exact(ys, y);
    std::vector<std::size_t> included = yj ? cells.x_by_y[*yj] : std::vector<std::size_t>{};
    std::vector<double> points;
    points.reserve(included.size());
    for (std::size_t i : included) points.push_back(xs[i]);
    return SourceFn{[xs, included](double x) {
                      const auto xi = index_of_exact(xs, x);
                      if (!xi) return 0.0;
                      return std::binary_search(included.begin(), included.end(), *xi) ? 1.0 : 0.0;
                    },
                    std::move(points), "cell indicator"};
  };
  return BivariateSourceFn{section, std::move(label)};
}

inline std::string indexed_label(const char* stem, std::size_t i) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%03zu", stem, i);
  return std::string(buf);
}

/// Indicator dictionary on a finite grid: the mass-difference optimal set
/// first (when a difference table is supplied; in empirical mode a
/// data-selected set would not be a mean-zero statistic and is left out),
/// then random subsets drawn from the dictionary seed.
inline std::vector<std::pair<std::string, CellSet>> tv_dictionary(
    const std::vector<double>& xs, const std::vector<double>& ys,
    const std::vector<std::vector<double>>* diff, std::uint64_t seed, std::size_t n_random) {
  std::vector<std::pair<std::string, CellSet>> out;
  if (diff != nullptr) {
    CellSet optimal;
    optimal.x_by_y.resize(ys.size());
    for (std::size_t j = 0; j < ys.size(); ++j) {
      for (std::size_t i = 0; i < xs.size(); ++i) {
        if ((*diff)[i][j] > 0.0) optimal.x_by_y[j].push_back(i);
      }
    }
    out.emplace_back("optimal_indicator", std::move(optimal));
  }
  Rng rng(seed, /*stream=*/1);
  for (std::size_t r = 0; r < n_random; ++r) {
    CellSet set;
    set.x_by_y.resize(ys.size());
    for (std::size_t j = 0; j < ys.size(); ++j) {
      for (std::size_t i = 0; i < xs.size(); ++i) {
        if (rng.coin()) set.x_by_y[j].push_back(i);
      }
    }
    out.emplace_back(indexed_label("subset", r), std::move(set));
  }
  return out;
}

struct BBox {
  double x_lo, x_hi, y_lo, y_hi;
};

/// Lipschitz-1 dictionary: coordinate projections, distances to a 5x5 anchor
/// grid spanning the data range, and 32 seeded random ramps
/// max(0, u . (x,y) + c) with |u| = 1.
inline std::vector<std::pair<std::string, BivariateSourceFn>> w_dictionary(const BBox& box,
                                                                           std::uint64_t seed) {
  std::vector<std::pair<std::string, BivariateSourceFn>> out;
  auto plain = [](std::function<double(double, double)> h, std::vector<double> jumps_at_all_y =
                                                               {}) {
    return [h = std::move(h), jumps = std::move(jumps_at_all_y)](double y) {
      return SourceFn{[h, y](double x) { return h(x, y); }, jumps, ""};
    };
  };
  out.push_back({"proj_x_pos", {plain([](double x, double) { return x; }), "proj_x_pos"}});
  out.push_back({"proj_x_neg", {plain([](double x, double) { return -x; }), "proj_x_neg"}});
  out.push_back({"proj_y_pos", {plain([](double, double y) { return y; }), "proj_y_pos"}});
  out.push_back({"proj_y_neg", {plain([](double, double y) { return -y; }), "proj_y_neg"}});

  const std::vector<double> ax = linspace(box.x_lo, box.x_hi, 5);
  const std::vector<double> ay = linspace(box.y_lo, box.y_hi, 5);
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t c = 0; c < 5; ++c) {
      const double a = ax[r], b = ay[c];
      char buf[32];
      std::snprintf(buf, sizeof(buf), "anchor_%zu_%zu", r, c);
      auto section = [a, b](double y) {
        return SourceFn{[a, b, y](double x) { return std::hypot(x - a, y - b); },
                        {a},  // kink of the section when y passes through b
                        ""};
      };
      out.push_back({buf, {section, buf}});
    }
  }

  Rng rng(seed, /*stream=*/2);
  for (std::size_t r = 0; r < 32; ++r) {
    const double theta = 2.0 * std::numbers::pi * rng.uniform01();
    const double ux = std::cos(theta), uy = std::sin(theta);
    const double x0 = rng.uniform(box.x_lo, box.x_hi);
    const double y0 = rng.uniform(box.y_lo, box.y_hi);
    const double c = -(ux * x0 + uy * y0);
    auto section = [ux, uy, c](double y) {
      std::vector<double> kinks;
      if (std::fabs(ux) > 1e-12) kinks.push_back(-(uy * y + c) / ux);
      return SourceFn{[ux, uy, c, y](double x) { return std::max(0.0, ux * x + uy * y + c); },
                      std::move(kinks), ""};
    };
    out.push_back({indexed_label("ramp", r), {section, indexed_label("ramp", r)}});
  }
  return out;
}

/// Samples grouped onto a finite grid (counts per cell). Requires every
/// sample to sit exactly on a grid point.
struct GroupedSamples {
  std::vector<double> xs, ys;
  std::vector<std::vector<double>> freq;  // [xi][yj], sums to 1
  std::size_t n = 0;
};

inline GroupedSamples group_samples(const SampleSet& samples, const std::vector<double>& xs,
                                    const std::vector<double>& ys) {
  GroupedSamples g;
  g.xs = xs;
  g.ys = ys;
  g.n = samples.size();
  g.freq.assign(xs.size(), std::vector<double>(ys.size(), 0.0));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto yj = index_of_exact(ys, samples.pairs[i].second);
    if (!yj) {
      throw EssentialRangeError("sample " + std::to_string(i) +
                                " has y outside the essential range (bin samples first)");
    }
    const auto xi = index_of_exact(xs, samples.pairs[i].first);
    if (!xi) {
      throw DomainError("sample " + std::to_string(i) +
                        " has x off the model support; discretize or adjust the model");
    }
    g.freq[*xi][*yj] += 1.0;
  }
  const double inv = 1.0 / static_cast<double>(g.n);
  for (auto& row : g.freq) {
    for (double& v : row) v *= inv;
  }
  return g;
}

/// Mean and standard error of g over grouped samples, using cell frequencies.
/// Identical to the per-sample average up to summation order.
inline EmpiricalValue grouped_value(const GroupedSamples& g,
                                    const std::function<double(double, double)>& fn) {
  std::vector<double> m1, m2;
  m1.reserve(g.xs.size() * g.ys.size());
  m2.reserve(m1.capacity());
  for (std::size_t i = 0; i < g.xs.size(); ++i) {
    for (std::size_t j = 0; j < g.ys.size(); ++j) {
      const double p = g.freq[i][j];
      if (p == 0.0) {
        m1.push_back(0.0);
        m2.push_back(0.0);
        continue;
      }
      const double v = fn(g.xs[i], g.ys[j]);
      m1.push_back(p * v);
      m2.push_back(p * v * v);
    }
  }
  const double mean = pairwise_sum(m1);
  EmpiricalValue out;
  out.value = mean;
  if (g.n > 1) {
    const double ex2 = pairwise_sum(m2);
    const double var = std::max(0.0, ex2 - mean * mean) * static_cast<double>(g.n) /
                       static_cast<double>(g.n - 1);
    out.std_error = std::sqrt(var / static_cast<double>(g.n));
  }
  return out;
}

inline DiscrepancyReport finish_report(std::vector<FunctionValue> values, BoundKind kind,
                                       bool exact, std::size_t n, std::uint64_t seed,
                                       bool lower_bound) {
  DiscrepancyReport rep;
  rep.per_function = std::move(values);
  rep.bound_kind = kind;
  rep.exact = exact;
  rep.n_samples = n;
  rep.dictionary_seed = seed;
  rep.dictionary_lower_bound = lower_bound;
  for (const auto& fv : rep.per_function) {
    rep.sup_value = std::max(rep.sup_value, std::fabs(fv.value));
  }
  return rep;
}

}  // namespace detail

/// Total-variation sweep in exact mode: the indicator of the positive part of
/// (joint - model) realizes the distance through the identity, and a seeded
/// random-subset sweep cross-checks that nothing exceeds it.
inline DiscrepancyReport tv_bound(const JointTable& joint, const ConditionalModel& model,
                                  std::uint64_t dict_seed = kDictionarySeed) {
  detail::check_joint_against_model(joint, model);
  detail::check_marginal_match(joint, model);
  const JointTable model_table = joint_table(model);
  auto [a, b] = align_tables(joint, model_table);
  // Mass-carrying cells must sit inside the operator domain of their column.
  for (std::size_t j = 0; j < a.ny(); ++j) {
    const FiniteLaw& law = model.family_at(a.y_grid()[j]).law();
    for (std::size_t i = 0; i < a.nx(); ++i) {
      if (a.mass(i, j) > 0.0 && !law.index_of(a.x_grid()[i])) {
        throw DomainError("tv_bound: joint mass outside the family support at its y");
      }
    }
  }
  std::vector<std::vector<double>> diff(a.nx(), std::vector<double>(a.ny(), 0.0));
  for (std::size_t i = 0; i < a.nx(); ++i) {
    for (std::size_t j = 0; j < a.ny(); ++j) diff[i][j] = a.mass(i, j) - b.mass(i, j);
  }
  const auto dict = detail::tv_dictionary(a.x_grid(), a.y_grid(), &diff, dict_seed, 256);
  std::vector<FunctionValue> values(dict.size());
  parallel_for(dict.size(), [&](std::size_t k) {
    const auto& [label, cells] = dict[k];
    const BivariateSourceFn h =
        detail::indicator_source(a.x_grid(), a.y_grid(), cells, label);
    const BivariateTestFunction f = solve_conditional(model, h);
    values[k] = FunctionValue{label, exact_stein(a, model, f), std::nullopt};
  });
  const double optimal = std::fabs(values.front().value);
  for (const auto& fv : values) {
    if (std::fabs(fv.value) > optimal + 1e-8) {
      throw ToleranceBreachError("tv_bound: a random indicator exceeded the optimal one");
    }
  }
  return detail::finish_report(std::move(values), BoundKind::tv, /*exact=*/true, 0, dict_seed,
                               /*lower_bound=*/false);
}

/// Empirical total-variation sweep: the same dictionary applied to the
/// empirical measure, with standard errors. Discrete-exact models only; the
/// empirical optimal indicator compares cell frequencies against model mass.
inline DiscrepancyReport tv_bound(const SampleSet& samples, const ConditionalModel& model,
                                  std::uint64_t dict_seed = kDictionarySeed) {
  const JointTable model_table = joint_table(model);
  const detail::GroupedSamples g =
      detail::group_samples(samples, model_table.x_grid(), model_table.y_grid());
  const auto dict = detail::tv_dictionary(g.xs, g.ys, nullptr, dict_seed, 256);
  std::vector<FunctionValue> values(dict.size());
  parallel_for(dict.size(), [&](std::size_t k) {
    const auto& [label, cells] = dict[k];
    const BivariateSourceFn h = detail::indicator_source(g.xs, g.ys, cells, label);
    const BivariateTestFunction f = solve_conditional(model, h);
    auto fn = [&](double x, double y) { return conditional_apply(model, f, x, y); };
    const EmpiricalValue ev = detail::grouped_value(g, fn);
    values[k] = FunctionValue{label, ev.value, ev.std_error};
  });
  return detail::finish_report(std::move(values), BoundKind::tv, /*exact=*/false, g.n, dict_seed,
                               /*lower_bound=*/false);
}

/// Lipschitz-1 sweep in exact mode. The dictionary under-approximates the
/// Lipschitz sup, so the result is a lower estimate of the distance bound.
inline DiscrepancyReport w_bound(const JointTable& joint, const ConditionalModel& model,
                                 std::uint64_t dict_seed = kDictionarySeed) {
  detail::check_joint_against_model(joint, model);
  detail::check_marginal_match(joint, model);
  detail::BBox box{joint.x_grid().front(), joint.x_grid().back(), joint.y_grid().front(),
                   joint.y_grid().back()};
  if (model.all_finite_discrete()) {
    const std::vector<double> support = detail::union_support(model);
    box.x_lo = std::min(box.x_lo, support.front());
    box.x_hi = std::max(box.x_hi, support.back());
  }
  box.y_lo = std::min(box.y_lo, model.y_values().front());
  box.y_hi = std::max(box.y_hi, model.y_values().back());
  const auto dict = detail::w_dictionary(box, dict_seed);
  std::vector<FunctionValue> values(dict.size());
  parallel_for(dict.size(), [&](std::size_t k) {
    const BivariateTestFunction f = solve_conditional(model, dict[k].second);
    values[k] = FunctionValue{dict[k].first, exact_stein(joint, model, f), std::nullopt};
  });
  return detail::finish_report(std::move(values), BoundKind::w, /*exact=*/true, 0, dict_seed,
                               /*lower_bound=*/true);
}

/// Empirical Lipschitz-1 sweep with standard errors.
inline DiscrepancyReport w_bound(const SampleSet& samples, const ConditionalModel& model,
                                 std::uint64_t dict_seed = kDictionarySeed) {
  detail::BBox box{samples.pairs[0].first, samples.pairs[0].first, samples.pairs[0].second,
                   samples.pairs[0].second};
  for (const auto& [x, y] : samples.pairs) {
    box.x_lo = std::min(box.x_lo, x);
    box.x_hi = std::max(box.x_hi, x);
    box.y_lo = std::min(box.y_lo, y);
    box.y_hi = std::max(box.y_hi, y);
  }
  const auto dict = detail::w_dictionary(box, dict_seed);
  std::vector<FunctionValue> values(dict.size());
  parallel_for(dict.size(), [&](std::size_t k) {
    const BivariateTestFunction f = solve_conditional(model, dict[k].second);
    const EmpiricalValue ev = empirical_stein(samples, model, f);
    values[k] = FunctionValue{dict[k].first, ev.value, ev.std_error};
  });
  return detail::finish_report(std::move(values), BoundKind::w, /*exact=*/false, samples.size(),
                               dict_seed, /*lower_bound=*/true);
}

}  // namespace condstein
