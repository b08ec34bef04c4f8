#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "condstein/errors.hpp"
#include "condstein/numeric.hpp"
#include "condstein/special.hpp"

namespace condstein {

/// A probability law with finite support on the reals. Support points are
/// strictly increasing and compared exactly; weights are nonnegative and sum
/// to one within kMassTol (inputs failing that are rejected, not
/// renormalized).
class FiniteLaw {
 public:
  FiniteLaw(std::vector<double> support, std::vector<double> weights)
      : support_(std::move(support)), weights_(std::move(weights)) {
    if (support_.empty() || support_.size() != weights_.size()) {
      throw ValidationError("FiniteLaw: support and weights must have equal, nonzero length");
    }
    if (!strictly_increasing(support_)) {
      throw ValidationError("FiniteLaw: support must be strictly increasing");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      if (!(weights_[i] >= 0.0) || !std::isfinite(support_[i])) {
        throw ValidationError("FiniteLaw: weights must be nonnegative and support finite");
      }
      total += weights_[i];
    }
    if (std::fabs(total - 1.0) > kMassTol) {
      throw ValidationError("FiniteLaw: weights must sum to 1 within 1e-12");
    }
  }

  const std::vector<double>& support() const { return support_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return support_.size(); }

  std::optional<std::size_t> index_of(double x) const { return index_of_exact(support_, x); }

  /// Point mass at x; zero when x is not a support point.
  double mass_at(double x) const {
    const auto idx = index_of(x);
    return idx ? weights_[*idx] : 0.0;
  }

  double mean() const {
    std::vector<double> terms(size());
    for (std::size_t i = 0; i < size(); ++i) terms[i] = support_[i] * weights_[i];
    return pairwise_sum(terms);
  }

 private:
  std::vector<double> support_;
  std::vector<double> weights_;
};

struct GaussianParams {
  double mean;
  double variance;
};

struct PoissonParams {
  double lambda;
};

struct GammaParams {
  double shape;
  double rate;
};

enum class FamilyKind { gaussian, poisson, gamma, finite_discrete };

/// One conditional target law together with the data its Stein operator
/// needs. FiniteDiscrete laws keep only positive-mass points; zero-mass
/// points are removed at construction.
class TargetFamily {
 public:
  static TargetFamily gaussian(double mean, double variance) {
    if (!(variance > 0.0)) throw ValidationError("TargetFamily: variance must be positive");
    return TargetFamily(GaussianParams{mean, variance});
  }
  static TargetFamily poisson(double lambda) {
    if (!(lambda > 0.0)) throw ValidationError("TargetFamily: lambda must be positive");
    return TargetFamily(PoissonParams{lambda});
  }
  static TargetFamily gamma(double shape, double rate) {
    if (!(shape > 0.0)) throw ValidationError("TargetFamily: shape must be positive");
    if (!(rate > 0.0)) throw ValidationError("TargetFamily: rate must be positive");
    return TargetFamily(GammaParams{shape, rate});
  }
  static TargetFamily finite_discrete(const FiniteLaw& law) {
    std::vector<double> support, weights;
    for (std::size_t i = 0; i < law.size(); ++i) {
      if (law.weights()[i] > 0.0) {
        support.push_back(law.support()[i]);
        weights.push_back(law.weights()[i]);
      }
    }
    return TargetFamily(FiniteLaw(std::move(support), std::move(weights)));
  }

  FamilyKind kind() const { return static_cast<FamilyKind>(storage_.index()); }

  const GaussianParams& gaussian_params() const { return expect<GaussianParams>("Gaussian"); }
  const PoissonParams& poisson_params() const { return expect<PoissonParams>("Poisson"); }
  const GammaParams& gamma_params() const { return expect<GammaParams>("Gamma"); }
  const FiniteLaw& law() const { return expect<FiniteLaw>("FiniteDiscrete"); }

  bool is_finite_discrete() const { return kind() == FamilyKind::finite_discrete; }

 private:
  using Storage = std::variant<GaussianParams, PoissonParams, GammaParams, FiniteLaw>;
  explicit TargetFamily(Storage s) : storage_(std::move(s)) {}

  template <typename T>
  const T& expect(const char* name) const {
    const T* p = std::get_if<T>(&storage_);
    if (p == nullptr) throw FamilyError(std::string("TargetFamily: not a ") + name + " family");
    return *p;
  }

  Storage storage_;
};

inline const char* family_kind_name(FamilyKind k) {
  switch (k) {
    case FamilyKind::gaussian: return "Gaussian";
    case FamilyKind::poisson: return "Poisson";
    case FamilyKind::gamma: return "Gamma";
    case FamilyKind::finite_discrete: return "FiniteDiscrete";
  }
  return "?";
}

/// The target object: the essential range of the auxiliary variable, its
/// weights, and one conditional target family per range point. Every y-weight
/// is strictly positive; a zero-weight y lies outside the essential range and
/// must not appear.
class ConditionalModel {
 public:
  ConditionalModel(FiniteLaw y_weights, std::vector<TargetFamily> families)
      : y_weights_(std::move(y_weights)), families_(std::move(families)) {
    if (families_.size() != y_weights_.size()) {
      throw ValidationError("ConditionalModel: one family per y value is required");
    }
    for (double w : y_weights_.weights()) {
      if (!(w > 0.0)) {
        throw ValidationError("ConditionalModel: every y weight must be strictly positive");
      }
    }
  }

  const std::vector<double>& y_values() const { return y_weights_.support(); }
  const FiniteLaw& y_weights() const { return y_weights_; }
  const std::vector<TargetFamily>& families() const { return families_; }
  std::size_t size() const { return families_.size(); }

  std::size_t index_of_y(double y) const {
    const auto idx = y_weights_.index_of(y);
    if (!idx) throw EssentialRangeError("ConditionalModel: y outside the essential range");
    return *idx;
  }

  const TargetFamily& family_at(double y) const { return families_[index_of_y(y)]; }
  const TargetFamily& family(std::size_t i) const { return families_.at(i); }

  bool all_finite_discrete() const {
    for (const auto& f : families_) {
      if (!f.is_finite_discrete()) return false;
    }
    return true;
  }

 private:
  FiniteLaw y_weights_;
  std::vector<TargetFamily> families_;
};

/// Exact finite joint pmf on an x-grid by y-grid, mass indexed (x, y).
class JointTable {
 public:
  JointTable(std::vector<double> x_grid, std::vector<double> y_grid, std::vector<double> mass)
      : x_grid_(std::move(x_grid)), y_grid_(std::move(y_grid)), mass_(std::move(mass)) {
    if (x_grid_.empty() || y_grid_.empty() || !strictly_increasing(x_grid_) ||
        !strictly_increasing(y_grid_)) {
      throw ValidationError("JointTable: grids must be nonempty and strictly increasing");
    }
    if (mass_.size() != x_grid_.size() * y_grid_.size()) {
      throw ValidationError("JointTable: mass matrix shape mismatch");
    }
    for (double m : mass_) {
      if (!(m >= 0.0)) throw ValidationError("JointTable: mass entries must be nonnegative");
    }
    if (std::fabs(pairwise_sum(mass_) - 1.0) > kMassTol) {
      throw ValidationError("JointTable: total mass must be 1 within 1e-12");
    }
  }

  const std::vector<double>& x_grid() const { return x_grid_; }
  const std::vector<double>& y_grid() const { return y_grid_; }
  std::size_t nx() const { return x_grid_.size(); }
  std::size_t ny() const { return y_grid_.size(); }

  double mass(std::size_t xi, std::size_t yj) const { return mass_[xi * ny() + yj]; }
  const std::vector<double>& raw_mass() const { return mass_; }

  std::vector<double> x_marginal() const {
    std::vector<double> out(nx(), 0.0);
    for (std::size_t i = 0; i < nx(); ++i) {
      std::vector<double> row(ny());
      for (std::size_t j = 0; j < ny(); ++j) row[j] = mass(i, j);
      out[i] = pairwise_sum(row);
    }
    return out;
  }

  std::vector<double> y_marginal() const {
    std::vector<double> out(ny(), 0.0);
    for (std::size_t j = 0; j < ny(); ++j) {
      std::vector<double> col(nx());
      for (std::size_t i = 0; i < nx(); ++i) col[i] = mass(i, j);
      out[j] = pairwise_sum(col);
    }
    return out;
  }

  /// Expectation of a pointwise function of (x, y) under this law.
  double expectation(const std::function<double(double, double)>& h) const {
    std::vector<double> terms;
    terms.reserve(mass_.size());
    for (std::size_t i = 0; i < nx(); ++i) {
      for (std::size_t j = 0; j < ny(); ++j) {
        const double m = mass(i, j);
        terms.push_back(m == 0.0 ? 0.0 : m * h(x_grid_[i], y_grid_[j]));
      }
    }
    return pairwise_sum(terms);
  }

 private:
  std::vector<double> x_grid_;
  std::vector<double> y_grid_;
  std::vector<double> mass_;
};

/// Observed (x, y) pairs for empirical estimation.
struct SampleSet {
  std::vector<std::pair<double, double>> pairs;
  std::string provenance;

  SampleSet(std::vector<std::pair<double, double>> p, std::string origin)
      : pairs(std::move(p)), provenance(std::move(origin)) {
    if (pairs.empty()) throw ValidationError("SampleSet: must be nonempty");
    for (const auto& [x, y] : pairs) {
      if (!std::isfinite(x) || !std::isfinite(y)) {
        throw ValidationError("SampleSet: all coordinates must be finite");
      }
    }
  }

  std::size_t size() const { return pairs.size(); }
};

namespace detail {

inline std::vector<double> union_support(const ConditionalModel& model) {
  std::vector<double> support;
  for (const auto& fam : model.families()) {
    if (!fam.is_finite_discrete()) {
      throw MixedModeError(
          "exact mode requires FiniteDiscrete families; discretize continuous families first");
    }
    support = merge_grids(support, fam.law().support());
  }
  return support;
}

}  // namespace detail

/// Marginal of the mixture: weight(x) = sum_y mu_Y(y) * nu_y({x}) over the
/// union of conditional supports.
inline FiniteLaw mixture_marginal(const ConditionalModel& model) {
  std::vector<double> support = detail::union_support(model);
  std::vector<double> weights(support.size(), 0.0);
  for (std::size_t i = 0; i < support.size(); ++i) {
    std::vector<double> terms(model.size());
    for (std::size_t j = 0; j < model.size(); ++j) {
      terms[j] = model.y_weights().weights()[j] * model.family(j).law().mass_at(support[i]);
    }
    weights[i] = pairwise_sum(terms);
  }
  return FiniteLaw(std::move(support), std::move(weights));
}

/// Exact joint pmf with mass(x, y) = mu_Y(y) * nu_y({x}).
inline JointTable joint_table(const ConditionalModel& model) {
  std::vector<double> x_grid = detail::union_support(model);
  const std::vector<double>& y_grid = model.y_values();
  std::vector<double> mass(x_grid.size() * y_grid.size(), 0.0);
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    for (std::size_t j = 0; j < y_grid.size(); ++j) {
      mass[i * y_grid.size() + j] =
          model.y_weights().weights()[j] * model.family(j).law().mass_at(x_grid[i]);
    }
  }
  return JointTable(std::move(x_grid), std::vector<double>(y_grid), std::move(mass));
}

/// Conditional decomposition of a joint table. Zero-mass y columns are
/// dropped (they lie outside the essential range); the count of dropped
/// columns is reported through `dropped_columns` when non-null.
inline ConditionalModel disintegrate(const JointTable& joint,
                                     std::size_t* dropped_columns = nullptr) {
  std::vector<double> kept_y, kept_w;
  std::vector<TargetFamily> families;
  const std::vector<double> col_mass = joint.y_marginal();
  std::size_t dropped = 0;
  for (std::size_t j = 0; j < joint.ny(); ++j) {
    if (col_mass[j] <= 0.0) {
      ++dropped;
      continue;
    }
    kept_y.push_back(joint.y_grid()[j]);
    kept_w.push_back(col_mass[j]);
    std::vector<double> support, weights;
    for (std::size_t i = 0; i < joint.nx(); ++i) {
      const double m = joint.mass(i, j);
      if (m > 0.0) {
        support.push_back(joint.x_grid()[i]);
        weights.push_back(m / col_mass[j]);
      }
    }
    families.push_back(TargetFamily::finite_discrete(FiniteLaw(std::move(support), std::move(weights))));
  }
  if (dropped_columns != nullptr) *dropped_columns = dropped;
  if (kept_y.empty()) throw ValidationError("disintegrate: no positive-mass y column");
  return ConditionalModel(FiniteLaw(std::move(kept_y), std::move(kept_w)), std::move(families));
}

/// Result of binning the auxiliary coordinate; empty bins are reported, not
/// fatal.
struct BinResult {
  SampleSet samples;
  std::size_t dropped = 0;                 // pairs outside the edge range
  std::vector<std::size_t> empty_bins;     // indices of bins with no occupancy
  std::vector<std::size_t> occupancy;      // per-bin counts
};

/// Replaces each y by the midpoint of its containing bin; x is unchanged.
/// Pairs outside [edges.front(), edges.back()] are dropped and counted.
inline BinResult bin_samples(const SampleSet& samples, std::span<const double> edges) {
  if (edges.size() < 2 || !strictly_increasing(edges)) {
    throw ValidationError("bin_samples: edges must be strictly increasing with >= 2 entries");
  }
  const std::size_t bins = edges.size() - 1;
  std::vector<std::size_t> occupancy(bins, 0);
  std::vector<std::pair<double, double>> out;
  out.reserve(samples.size());
  std::size_t dropped = 0;
  for (const auto& [x, y] : samples.pairs) {
    if (y < edges.front() || y > edges.back()) {
      ++dropped;
      continue;
    }
    std::size_t b = static_cast<std::size_t>(
        std::upper_bound(edges.begin(), edges.end(), y) - edges.begin());
    b = (b == 0) ? 0 : b - 1;
    if (b >= bins) b = bins - 1;  // y exactly on the top edge
    out.emplace_back(x, 0.5 * (edges[b] + edges[b + 1]));
    ++occupancy[b];
  }
  if (out.empty()) throw ValidationError("bin_samples: every pair fell outside the edges");
  std::vector<std::size_t> empty;
  for (std::size_t b = 0; b < bins; ++b) {
    if (occupancy[b] == 0) empty.push_back(b);
  }
  return BinResult{SampleSet(std::move(out), samples.provenance + " [binned]"), dropped,
                   std::move(empty), std::move(occupancy)};
}

/// Zero-fills two tables onto the union of their grids so they can be
/// compared entrywise.
inline std::pair<JointTable, JointTable> align_tables(const JointTable& a, const JointTable& b) {
  const std::vector<double> xs = merge_grids(a.x_grid(), b.x_grid());
  const std::vector<double> ys = merge_grids(a.y_grid(), b.y_grid());
  auto lift = [&](const JointTable& t) {
    std::vector<double> mass(xs.size() * ys.size(), 0.0);
    for (std::size_t i = 0; i < t.nx(); ++i) {
      const auto xi = index_of_exact(xs, t.x_grid()[i]);
      for (std::size_t j = 0; j < t.ny(); ++j) {
        const auto yj = index_of_exact(ys, t.y_grid()[j]);
        mass[*xi * ys.size() + *yj] = t.mass(i, j);
      }
    }
    return JointTable(std::vector<double>(xs), std::vector<double>(ys), std::move(mass));
  };
  return {lift(a), lift(b)};
}

/// Truncates continuous families onto a shared grid (cell masses from cdf
/// differences, renormalized over the truncation); FiniteDiscrete families
/// pass through unchanged; Poisson families require integer grid points.
inline ConditionalModel discretize_model(const ConditionalModel& model,
                                         std::span<const double> grid) {
  if (grid.size() < 2 || !strictly_increasing(grid)) {
    throw ValidationError("discretize_model: grid must be strictly increasing with >= 2 points");
  }
  std::vector<TargetFamily> families;
  families.reserve(model.size());
  for (const auto& fam : model.families()) {
    switch (fam.kind()) {
      case FamilyKind::finite_discrete:
        families.push_back(fam);
        break;
      case FamilyKind::gaussian:
      case FamilyKind::gamma: {
        auto cdf = [&](double x) {
          if (fam.kind() == FamilyKind::gaussian) {
            const auto& p = fam.gaussian_params();
            return normal_cdf((x - p.mean) / std::sqrt(p.variance));
          }
          const auto& p = fam.gamma_params();
          return x <= 0.0 ? 0.0 : lower_reg_gamma(p.shape, p.rate * x);
        };
        std::vector<double> w(grid.size(), 0.0);
        double total = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
          const double left = i == 0 ? -std::numeric_limits<double>::infinity()
                                     : 0.5 * (grid[i - 1] + grid[i]);
          const double right = i + 1 == grid.size() ? std::numeric_limits<double>::infinity()
                                                    : 0.5 * (grid[i] + grid[i + 1]);
          const double lo_cdf = std::isinf(left) ? 0.0 : cdf(left);
          const double hi_cdf = std::isinf(right) ? 1.0 : cdf(right);
          w[i] = std::max(0.0, hi_cdf - lo_cdf);
          total += w[i];
        }
        for (double& v : w) v /= total;
        families.push_back(
            TargetFamily::finite_discrete(FiniteLaw(std::vector<double>(grid.begin(), grid.end()), std::move(w))));
        break;
      }
      case FamilyKind::poisson: {
        const double lambda = fam.poisson_params().lambda;
        std::vector<double> w(grid.size(), 0.0);
        double total = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
          const double k = grid[i];
          if (std::fabs(k - std::round(k)) > 1e-9 || k < 0.0) {
            throw FamilyError("discretize_model: Poisson families need integer grid points");
          }
          w[i] = std::exp(-lambda + k * std::log(lambda) - std::lgamma(k + 1.0));
          total += w[i];
        }
        for (double& v : w) v /= total;
        families.push_back(
            TargetFamily::finite_discrete(FiniteLaw(std::vector<double>(grid.begin(), grid.end()), std::move(w))));
        break;
      }
    }
  }
  return ConditionalModel(model.y_weights(), std::move(families));
}


/// Mixture marginal of a model with continuous families, after truncation
/// onto the supplied shared grid.
inline FiniteLaw mixture_marginal(const ConditionalModel& model, std::span<const double> grid) {
  return mixture_marginal(discretize_model(model, grid));
}

/// Joint pmf of a model with continuous families, after truncation onto the
/// supplied shared grid.
inline JointTable joint_table(const ConditionalModel& model, std::span<const double> grid) {
  return joint_table(discretize_model(model, grid));
}

}  // namespace condstein
