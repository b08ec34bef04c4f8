#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "condstein/errors.hpp"

namespace condstein {

/// Piecewise Chebyshev interpolant with the exact derivative of the
/// interpolant. Pieces are separated at declared breakpoints (typically the
/// discontinuities of a source term), so each piece interpolates a smooth
/// function. Degrees adapt until the coefficient tail falls below tolerance;
/// pieces are bisected when a single polynomial will not converge.
class ChebyshevInterpolant {
 public:
  static ChebyshevInterpolant fit(const std::function<double(double)>& fn, double lo, double hi,
                                  std::span<const double> breakpoints, double tail_tol,
                                  double abs_tail_tol = 0.0, int max_points = 1025,
                                  int max_depth = 12) {
    if (!(lo < hi)) throw Error("ChebyshevInterpolant: empty interval");
    std::vector<double> cuts{lo};
    for (double c : breakpoints) {
      if (c > lo && c < hi) cuts.push_back(c);
    }
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    ChebyshevInterpolant out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      fit_segment(out, fn, cuts[i], cuts[i + 1], tail_tol, abs_tail_tol, max_points, max_depth);
    }
    return out;
  }

  double lo() const { return pieces_.front().lo; }
  double hi() const { return pieces_.back().hi; }

  double eval(double x) const {
    const Piece& p = piece_for(x);
    return clenshaw(p.coef, x, p);
  }

  double deriv(double x) const {
    const Piece& p = piece_for(x);
    return clenshaw(p.dcoef, x, p);
  }

 private:
  struct Piece {
    double lo, hi;
    std::vector<double> coef;
    std::vector<double> dcoef;
  };

  std::vector<Piece> pieces_;

  const Piece& piece_for(double x) const {
    if (x < pieces_.front().lo || x > pieces_.back().hi) {
      throw DomainError("ChebyshevInterpolant: evaluation outside fitted domain");
    }
    // Shared boundaries resolve to the left piece; this matches a
    // right-closed step convention for the source term.
    auto it = std::lower_bound(pieces_.begin(), pieces_.end(), x,
                               [](const Piece& p, double v) { return p.hi < v; });
    if (it == pieces_.end()) --it;
    return *it;
  }

  static double clenshaw(const std::vector<double>& c, double x, const Piece& p) {
    if (c.empty()) return 0.0;
    double t = (2.0 * x - p.lo - p.hi) / (p.hi - p.lo);
    t = std::clamp(t, -1.0, 1.0);
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) {
      const double b0 = 2.0 * t * b1 - b2 + c[k];
      b2 = b1;
      b1 = b0;
    }
    return t * b1 - b2 + c[0];
  }

  static std::vector<double> derivative_coefficients(const std::vector<double>& c, double lo,
                                                     double hi) {
    const std::size_t n = c.size();
    std::vector<double> d(n, 0.0);
    if (n >= 2) {
      d[n - 2] = 2.0 * static_cast<double>(n - 1) * c[n - 1];
      for (std::size_t k = n - 2; k-- > 0;) {
        d[k] = (k + 2 < n ? d[k + 2] : 0.0) + 2.0 * static_cast<double>(k + 1) * c[k + 1];
      }
      d[0] *= 0.5;
    }
    const double scale = 2.0 / (hi - lo);
    for (double& v : d) v *= scale;
    while (d.size() > 1 && d.back() == 0.0) d.pop_back();
    return d;
  }

  static void fit_segment(ChebyshevInterpolant& out, const std::function<double(double)>& fn,
                          double lo, double hi, double tail_tol, double abs_tail_tol,
                          int max_points, int depth_left) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    for (int n = 17; n <= max_points; n = 2 * n - 1) {
      std::vector<double> vals(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j) {
        const double theta = std::numbers::pi * (static_cast<double>(j) + 0.5) / n;
        vals[static_cast<std::size_t>(j)] = fn(mid + half * std::cos(theta));
      }
      std::vector<double> coef(static_cast<std::size_t>(n), 0.0);
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) {
          const double theta = std::numbers::pi * (static_cast<double>(j) + 0.5) / n;
          s += vals[static_cast<std::size_t>(j)] * std::cos(k * theta);
        }
        coef[static_cast<std::size_t>(k)] = 2.0 * s / n;
      }
      coef[0] *= 0.5;
      double scale = 0.0;
      for (double c : coef) scale = std::max(scale, std::fabs(c));
      const std::size_t tail = std::max<std::size_t>(3, static_cast<std::size_t>(n) / 16);
      double tail_max = 0.0;
      for (std::size_t k = coef.size() - tail; k < coef.size(); ++k) {
        tail_max = std::max(tail_max, std::fabs(coef[k]));
      }
      // Accept on a relative tail, or once the tail sits at the node-noise
      // floor; differentiation amplifies that floor by O(n^2 / length).
      const double accept = std::max(tail_tol * std::max(scale, 1e-30), abs_tail_tol);
      if (tail_max <= accept || scale == 0.0) {
        const double trim = 0.1 * accept;
        while (coef.size() > 4 && std::fabs(coef.back()) < trim) coef.pop_back();
        Piece p{lo, hi, coef, derivative_coefficients(coef, lo, hi)};
        out.pieces_.push_back(std::move(p));
        return;
      }
    }
    if (depth_left <= 0) {
      throw QuadratureError("ChebyshevInterpolant: no convergence at maximum depth");
    }
    fit_segment(out, fn, lo, mid, tail_tol, abs_tail_tol, max_points, depth_left - 1);
    fit_segment(out, fn, mid, hi, tail_tol, abs_tail_tol, max_points, depth_left - 1);
  }
};

}  // namespace condstein
