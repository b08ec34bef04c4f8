#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <vector>

#include "condstein/errors.hpp"

namespace condstein {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  std::size_t max_evals = std::size_t{1} << 20;
};

namespace detail {

// 15-point Kronrod / 7-point Gauss pair, positive half (QUADPACK constants).
inline constexpr double kGK15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline constexpr double kGK15WeightsK[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kGK15WeightsG[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct GKResult {
  double integral;
  double error;
  double resabs;  // integral of |f|, for the rounding floor
};

template <typename F>
GKResult gk15(const F& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f_mid = f(mid);
  double result_k = kGK15WeightsK[7] * f_mid;
  double result_g = kGK15WeightsG[3] * f_mid;
  double resabs = kGK15WeightsK[7] * std::fabs(f_mid);
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kGK15Nodes[i];
    const double f_lo = f(mid - dx);
    const double f_hi = f(mid + dx);
    const double fsum = f_lo + f_hi;
    result_k += kGK15WeightsK[i] * fsum;
    resabs += kGK15WeightsK[i] * (std::fabs(f_lo) + std::fabs(f_hi));
    if (i % 2 == 1) result_g += kGK15WeightsG[i / 2] * fsum;
  }
  result_k *= half;
  result_g *= half;
  resabs *= std::fabs(half);
  return {result_k, std::fabs(result_k - result_g), resabs};
}

}  // namespace detail

/// Globally adaptive bisection quadrature on [lo, hi]. `split_points` are
/// known discontinuities or kinks of the integrand; the interval is cut there
/// before refinement begins. The segment with the largest error estimate is
/// bisected until the summed estimate falls below abs_tol; segments whose
/// estimate reaches the rounding floor (or whose width collapses) are
/// retired, so the refinement always terminates. Throws QuadratureError when
/// the evaluation budget runs out first.
template <typename F>
double integrate(const F& f, double lo, double hi, QuadratureOptions opt = {},
                 std::span<const double> split_points = {}) {
  if (lo == hi) return 0.0;
  double sign = 1.0;
  if (lo > hi) {
    std::swap(lo, hi);
    sign = -1.0;
  }
  std::vector<double> cuts{lo};
  for (double c : split_points) {
    if (c > lo && c < hi) cuts.push_back(c);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const double width_floor = 1e-14 * (1.0 + std::fabs(lo) + std::fabs(hi));
  const double eps = std::numeric_limits<double>::epsilon();
  std::size_t evals = 0;

  struct Segment {
    double error;
    double a, b;
    double integral;
    bool operator<(const Segment& other) const { return error < other.error; }
  };
  auto evaluate = [&](double a, double b) {
    evals += 15;
    if (evals > opt.max_evals) {
      throw QuadratureError("integrate: evaluation budget exhausted before tolerance");
    }
    const auto r = detail::gk15(f, a, b);
    // An estimate at the rounding floor of the segment cannot be improved by
    // bisection; retire it by reporting zero refinable error.
    const bool floored = r.error <= 50.0 * eps * r.resabs || (b - a) < width_floor;
    return Segment{floored ? 0.0 : r.error, a, b, r.integral};
  };

  std::priority_queue<Segment> active;
  double retired_integral = 0.0;
  double active_error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const Segment s = evaluate(cuts[i], cuts[i + 1]);
    if (s.error == 0.0) {
      retired_integral += s.integral;
    } else {
      active_error += s.error;
      active.push(s);
    }
  }
  while (!active.empty() && active_error > opt.abs_tol) {
    const Segment worst = active.top();
    active.pop();
    active_error -= worst.error;
    const double mid = 0.5 * (worst.a + worst.b);
    for (const Segment& child : {evaluate(worst.a, mid), evaluate(mid, worst.b)}) {
      if (child.error == 0.0) {
        retired_integral += child.integral;
      } else {
        active_error += child.error;
        active.push(child);
      }
    }
  }
  double total = retired_integral;
  while (!active.empty()) {
    total += active.top().integral;
    active.pop();
  }
  return sign * total;
}

}  // namespace condstein
