#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "condstein/discrepancy.hpp"
#include "condstein/measures.hpp"

namespace condstein {

/// Exact total variation between two finite joint laws: half the entrywise
/// L1 distance on the union grid.
inline double tv_exact(const JointTable& a_in, const JointTable& b_in) {
  const auto [a, b] = align_tables(a_in, b_in);
  std::vector<double> terms(a.raw_mass().size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    terms[i] = std::fabs(a.raw_mass()[i] - b.raw_mass()[i]);
  }
  return 0.5 * pairwise_sum(terms);
}

namespace detail {

struct TransportPoint {
  double x, y, mass;
};

/// Successive-shortest-paths min-cost flow on the bipartite transport graph
/// between surplus and deficit points, Euclidean ground cost. Dense Dijkstra
/// with potentials; real-valued capacities (each augmentation zeroes at least
/// one residual exactly).
inline double min_cost_transport(const std::vector<TransportPoint>& surplus,
                                 const std::vector<TransportPoint>& deficit) {
  const std::size_t ns = surplus.size(), nd = deficit.size();
  if (ns == 0 || nd == 0) return 0.0;
  std::vector<std::vector<double>> cost(ns, std::vector<double>(nd));
  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t j = 0; j < nd; ++j) {
      cost[i][j] = std::hypot(surplus[i].x - deficit[j].x, surplus[i].y - deficit[j].y);
    }
  }
  std::vector<double> rs(ns), rd(nd);
  for (std::size_t i = 0; i < ns; ++i) rs[i] = surplus[i].mass;
  for (std::size_t j = 0; j < nd; ++j) rd[j] = deficit[j].mass;
  std::vector<std::vector<double>> flow(ns, std::vector<double>(nd, 0.0));
  std::vector<double> pot(ns + nd, 0.0);  // node potentials; deficits offset by ns

  double total_left = 0.0;
  for (double v : rs) total_left += v;
  const double eps_done = 1e-14 * std::max(1.0, total_left);

  const std::size_t guard = 16 * (ns + nd) * (ns + nd) + 64;
  for (std::size_t iter = 0; iter < guard; ++iter) {
    double remaining = 0.0;
    for (double v : rs) remaining += v;
    if (remaining <= eps_done) break;

    const std::size_t n_nodes = ns + nd;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(n_nodes, inf);
    std::vector<std::size_t> parent(n_nodes, n_nodes);
    std::vector<bool> done(n_nodes, false);
    for (std::size_t i = 0; i < ns; ++i) {
      if (rs[i] > eps_done) dist[i] = 0.0;
    }
    for (std::size_t round = 0; round < n_nodes; ++round) {
      std::size_t u = n_nodes;
      double best = inf;
      for (std::size_t v = 0; v < n_nodes; ++v) {
        if (!done[v] && dist[v] < best) {
          best = dist[v];
          u = v;
        }
      }
      if (u == n_nodes) break;
      done[u] = true;
      if (u < ns) {
        for (std::size_t j = 0; j < nd; ++j) {
          const double rc = std::max(0.0, cost[u][j] + pot[u] - pot[ns + j]);
          if (dist[u] + rc < dist[ns + j]) {
            dist[ns + j] = dist[u] + rc;
            parent[ns + j] = u;
          }
        }
      } else {
        const std::size_t j = u - ns;
        for (std::size_t i = 0; i < ns; ++i) {
          if (flow[i][j] <= 0.0) continue;
          const double rc = std::max(0.0, -cost[i][j] + pot[ns + j] - pot[i]);
          if (dist[u] + rc < dist[i]) {
            dist[i] = dist[u] + rc;
            parent[i] = u;
          }
        }
      }
    }
    std::size_t target = n_nodes;
    double best = inf;
    for (std::size_t j = 0; j < nd; ++j) {
      if (rd[j] > eps_done && dist[ns + j] < best) {
        best = dist[ns + j];
        target = ns + j;
      }
    }
    if (target == n_nodes) break;  // nothing reachable: residuals are dust
    for (std::size_t v = 0; v < n_nodes; ++v) {
      if (dist[v] < inf) pot[v] += std::min(dist[v], best);
    }
    // Trace the augmenting path and find the bottleneck.
    std::vector<std::size_t> path;
    for (std::size_t v = target; v != n_nodes; v = parent[v]) {
      path.push_back(v);
      if (v < ns && parent[v] == n_nodes) break;
    }
    std::reverse(path.begin(), path.end());
    const std::size_t source = path.front();
    double bottleneck = std::min(rs[source], rd[target - ns]);
    for (std::size_t s = 0; s + 1 < path.size(); ++s) {
      if (path[s] >= ns) {  // backward arc deficit -> surplus
        bottleneck = std::min(bottleneck, flow[path[s + 1]][path[s] - ns]);
      }
    }
    for (std::size_t s = 0; s + 1 < path.size(); ++s) {
      if (path[s] < ns) {
        flow[path[s]][path[s + 1] - ns] += bottleneck;
      } else {
        flow[path[s + 1]][path[s] - ns] -= bottleneck;
        if (flow[path[s + 1]][path[s] - ns] < 1e-18) flow[path[s + 1]][path[s] - ns] = 0.0;
      }
    }
    rs[source] = (bottleneck == rs[source]) ? 0.0 : rs[source] - bottleneck;
    rd[target - ns] = (bottleneck == rd[target - ns]) ? 0.0 : rd[target - ns] - bottleneck;
  }

  std::vector<double> terms;
  terms.reserve(ns * nd);
  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t j = 0; j < nd; ++j) {
      if (flow[i][j] > 0.0) terms.push_back(flow[i][j] * cost[i][j]);
    }
  }
  return pairwise_sum(terms);
}

}  // namespace detail

/// Exact Wasserstein distance between two finite joint laws: the discrete
/// optimal-transport program with Euclidean ground cost on the plane, solved
/// on the difference measures (the ground cost is a metric, so mass in common
/// stays in place). Combined support is capped at 400 points.
inline double wasserstein_exact(const JointTable& a_in, const JointTable& b_in) {
  const auto [a, b] = align_tables(a_in, b_in);
  std::size_t support_points = 0;
  for (std::size_t i = 0; i < a.nx(); ++i) {
    for (std::size_t j = 0; j < a.ny(); ++j) {
      if (a.mass(i, j) > 0.0 || b.mass(i, j) > 0.0) ++support_points;
    }
  }
  if (support_points > 400) {
    throw SizeError("wasserstein_exact: combined support exceeds 400 points");
  }
  std::vector<detail::TransportPoint> surplus, deficit;
  for (std::size_t i = 0; i < a.nx(); ++i) {
    for (std::size_t j = 0; j < a.ny(); ++j) {
      const double d = a.mass(i, j) - b.mass(i, j);
      if (d > 0.0) surplus.push_back({a.x_grid()[i], a.y_grid()[j], d});
      if (d < 0.0) deficit.push_back({a.x_grid()[i], a.y_grid()[j], -d});
    }
  }
  return detail::min_cost_transport(surplus, deficit);
}

namespace detail {

/// Spanning indicator dictionary for the finite characterization: one point
/// indicator per (x, y) cell with x above the left support endpoint of the
/// family at y (the left endpoint is pinned to zero by the class).
inline std::vector<BivariateTestFunction> characterization_dictionary(
    const ConditionalModel& model) {
  std::vector<BivariateTestFunction> out;
  const std::size_t ny = model.size();
  for (std::size_t j = 0; j < ny; ++j) {
    const FiniteLaw& law = model.family(j).law();
    for (std::size_t k = 1; k < law.size(); ++k) {
      std::vector<TestFunction> sections;
      sections.reserve(ny);
      for (std::size_t jj = 0; jj < ny; ++jj) {
        if (jj == j) {
          const double point = law.support()[k];
          sections.push_back(TestFunction(
              [point](double x) { return x == point ? 1.0 : 0.0; }, DomainKind::discrete));
        } else {
          sections.push_back(TestFunction::constant(0.0, DomainKind::discrete));
        }
      }
      out.emplace_back(std::vector<double>(model.y_values()), std::move(sections));
    }
  }
  return out;
}

}  // namespace detail

/// Finite-support characterization: true iff the joint equals the model's
/// joint table entrywise within 1e-10. The spanning indicator dictionary
/// pins every conditional; the y-marginal is checked directly because the
/// operators act on x alone and share the auxiliary variable by assumption.
inline bool characterize_finite(const JointTable& joint, const ConditionalModel& model,
                                double tol = 1e-10) {
  const JointTable model_table = joint_table(model);
  if (joint.x_grid() != model_table.x_grid() || joint.y_grid() != model_table.y_grid()) {
    throw GridMismatchError("characterize_finite: joint grids must match the model grids");
  }
  const std::vector<double> col = joint.y_marginal();
  for (std::size_t j = 0; j < joint.ny(); ++j) {
    if (std::fabs(col[j] - model.y_weights().weights()[j]) > tol) return false;
  }
  for (const auto& f : detail::characterization_dictionary(model)) {
    if (std::fabs(exact_stein(joint, model, f)) > tol) return false;
  }
  return true;
}

/// Per-slice conditional expectations of N_y f under the joint's conditional
/// laws; every value vanishes when the joint matches the model.
inline std::vector<std::pair<double, double>> conditional_expectation_check(
    const JointTable& joint, const ConditionalModel& model, const BivariateTestFunction& f) {
  for (double y : joint.y_grid()) {
    if (!index_of_exact(model.y_values(), y)) {
      throw GridMismatchError("conditional_expectation_check: joint y-grid leaves the model");
    }
  }
  const std::vector<double> col = joint.y_marginal();
  std::vector<std::pair<double, double>> out;
  for (std::size_t j = 0; j < joint.ny(); ++j) {
    if (col[j] <= 0.0) continue;
    std::vector<double> terms(joint.nx());
    for (std::size_t i = 0; i < joint.nx(); ++i) {
      const double m = joint.mass(i, j);
      terms[i] = m == 0.0 ? 0.0
                          : (m / col[j]) *
                                conditional_apply(model, f, joint.x_grid()[i], joint.y_grid()[j]);
    }
    out.emplace_back(joint.y_grid()[j], pairwise_sum(terms));
  }
  return out;
}

}  // namespace condstein
