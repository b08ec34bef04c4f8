#pragma once

#include <cstddef>
#include <vector>

#include "condstein/measures.hpp"
#include "condstein/rng.hpp"

namespace condstein::scenarios {

/// Jittered grid: strictly increasing, roughly even spacing.
inline std::vector<double> jittered_grid(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * (static_cast<double>(i) + 0.25 + 0.5 * rng.uniform01()) /
                      static_cast<double>(n);
  }
  return out;
}

/// Strictly positive weights with an exact unit sum. The floor keeps weight
/// ratios small so tolerance amplification through pmf ratios stays tame.
inline std::vector<double> random_weights(Rng& rng, std::size_t n, double floor = 0.2) {
  std::vector<double> w(n);
  double total = 0.0;
  for (double& v : w) {
    v = floor + rng.uniform01();
    total += v;
  }
  for (double& v : w) v /= total;
  double partial = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) partial += w[i];
  w[n - 1] = 1.0 - partial;
  return w;
}

inline FiniteLaw random_law(Rng& rng, const std::vector<double>& support, double floor = 0.2) {
  return FiniteLaw(support, random_weights(rng, support.size(), floor));
}

/// Random exact-mode model: common x support across families, positive
/// y-weights, random FiniteDiscrete conditionals.
inline ConditionalModel random_model(Rng& rng, std::size_t nx, std::size_t ny) {
  const std::vector<double> xs = jittered_grid(rng, nx, -2.0, 2.5);
  const std::vector<double> ys = jittered_grid(rng, ny, -1.0, 1.5);
  std::vector<TargetFamily> families;
  families.reserve(ny);
  for (std::size_t j = 0; j < ny; ++j) {
    families.push_back(TargetFamily::finite_discrete(random_law(rng, xs)));
  }
  return ConditionalModel(FiniteLaw(ys, random_weights(rng, ny)), std::move(families));
}

/// Random joint with the model's y-marginal and random conditionals on the
/// model grid (the setting of the identity: a shared auxiliary variable).
inline JointTable random_conditional_joint(Rng& rng, const ConditionalModel& model) {
  const JointTable base = joint_table(model);
  std::vector<double> mass(base.nx() * base.ny(), 0.0);
  for (std::size_t j = 0; j < base.ny(); ++j) {
    const std::vector<double> cond = random_weights(rng, base.nx(), 0.1);
    for (std::size_t i = 0; i < base.nx(); ++i) {
      mass[i * base.ny() + j] = model.y_weights().weights()[j] * cond[i];
    }
  }
  double total = 0.0;
  for (double v : mass) total += v;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (mass[i] > mass[arg]) arg = i;
  }
  mass[arg] += 1.0 - total;  // absorb rounding so the table gate holds exactly
  return JointTable(base.x_grid(), base.y_grid(), std::move(mass));
}

/// Moves delta of mass between two x cells inside one y column: conditional
/// structure changes, the y-marginal does not.
inline JointTable perturb_within_column(Rng& rng, const JointTable& joint, double delta) {
  std::vector<double> mass = joint.raw_mass();
  const std::size_t ny = joint.ny();
  const std::size_t j = static_cast<std::size_t>(rng.below(ny));
  std::size_t donor = 0;
  for (std::size_t i = 1; i < joint.nx(); ++i) {
    if (mass[i * ny + j] > mass[donor * ny + j]) donor = i;
  }
  std::size_t recipient = (donor + 1 + rng.below(joint.nx() - 1)) % joint.nx();
  mass[donor * ny + j] -= delta;
  mass[recipient * ny + j] += delta;
  return JointTable(joint.x_grid(), joint.y_grid(), std::move(mass));
}

/// Moves delta of mass from (x0, y0) to (x0, y1): the x-marginal is
/// preserved, the conditional structure and the y-marginal are not.
inline JointTable cross_column_swap(Rng& rng, const JointTable& joint, double delta) {
  std::vector<double> mass = joint.raw_mass();
  const std::size_t ny = joint.ny();
  std::size_t i0 = 0, j0 = 0;
  for (std::size_t i = 0; i < joint.nx(); ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      if (mass[i * ny + j] > mass[i0 * ny + j0]) {
        i0 = i;
        j0 = j;
      }
    }
  }
  const std::size_t j1 = (j0 + 1 + rng.below(ny - 1)) % ny;
  mass[i0 * ny + j0] -= delta;
  mass[i0 * ny + j1] += delta;
  return JointTable(joint.x_grid(), joint.y_grid(), std::move(mass));
}

inline double max_entry_gap(const JointTable& a, const JointTable& b) {
  const auto [aa, bb] = align_tables(a, b);
  double worst = 0.0;
  for (std::size_t i = 0; i < aa.raw_mass().size(); ++i) {
    worst = std::max(worst, std::fabs(aa.raw_mass()[i] - bb.raw_mass()[i]));
  }
  return worst;
}

}  // namespace condstein::scenarios
