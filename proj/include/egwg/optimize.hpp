#pragma once

// Projected Newton descent for smooth objectives on a box.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "egwg/errors.hpp"

namespace egwg {

struct BoxOptions {
  int max_iterations = 500;
  /// Stop once the projected gradient max-norm falls below this.
  double grad_tol = 1e-8;
  /// Stop after three consecutive iterations each improving f by less than
  /// f_tol * max(1, |f|).
  double f_tol = 1e-15;
  /// Largest trust-region radius (Euclidean).
  double max_step = 2.0;
  /// Step of the central differences that build the Hessian from gradients.
  double hessian_step = 1e-5;
};

struct BoxResult {
  Eigen::VectorXd x;
  double f = std::numeric_limits<double>::infinity();
  Eigen::VectorXd gradient;
  /// Gradient with the components pushing out of the box at an active bound zeroed.
  Eigen::VectorXd projected_gradient;
  double start_f = std::numeric_limits<double>::infinity();
  int iterations = 0;
  int evaluations = 0;
};

namespace detail {

inline Eigen::VectorXd project_gradient(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                                        const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  Eigen::VectorXd pg = g;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if ((x[i] <= lo[i] && g[i] > 0.0) || (x[i] >= hi[i] && g[i] < 0.0)) pg[i] = 0.0;
  return pg;
}

/// Minimizer of g.d + d.H.d / 2 over |d| <= radius (Euclidean), found on the
/// eigenbasis of H by bisection on the shift mu in (H + mu I) d = -g.
inline Eigen::VectorXd trust_region_step(const Eigen::MatrixXd& h, const Eigen::VectorXd& g, double radius) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  const Eigen::VectorXd& lam = es.eigenvalues();
  const Eigen::MatrixXd& v = es.eigenvectors();
  const Eigen::VectorXd gt = v.transpose() * g;
  auto step = [&](double mu) {
    Eigen::VectorXd c(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) c[i] = -gt[i] / (lam[i] + mu);
    return c;
  };
  const double lam_min = lam.minCoeff();
  const double scale = std::max(lam.cwiseAbs().maxCoeff(), 1e-300);
  if (lam_min > 1e-12 * scale) {
    const Eigen::VectorXd c = step(0.0);
    if (c.norm() <= radius) return v * c;
  }
  // |d(mu)| decreases in mu above -lam_min; bracket and bisect.
  double lo = std::max(0.0, -lam_min) + 1e-12 * scale;
  double hi = lo + g.norm() / radius + scale;
  while (step(hi).norm() > radius) hi *= 2.0;
  if (step(lo).norm() < radius) return v * step(lo);  // hard case: take the shifted step
  for (int k = 0; k < 100 && hi - lo > 1e-12 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    (step(mid).norm() > radius ? lo : hi) = mid;
  }
  return v * step(hi);
}

}  // namespace detail

/// Minimizes f over lo <= x <= hi. `fg(x, g)` returns f(x) and writes the
/// gradient into g; a non-finite return marks x as infeasible, which counts
/// as a rejected trial.
///
/// Each iteration builds the Hessian by central differences of the gradient,
/// holds the coordinates at a bound whose gradient pushes outward (Bertsekas'
/// epsilon-active set), and solves a trust-region Newton subproblem on the
/// rest. The trial point is projected onto the box and accepted when it
/// achieves a fair share of the predicted decrease. The returned f never
/// exceeds f(start).
template <class FG>
BoxResult minimize_box(FG&& fg, Eigen::VectorXd x0, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                       const BoxOptions& opt = {}) {
  const Eigen::Index n = x0.size();
  if (lo.size() != n || hi.size() != n) throw InvalidParameters("box bounds have the wrong dimension");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(lo[i] <= hi[i])) throw InvalidParameters("box lower bound exceeds upper bound");
  auto clamp = [&](Eigen::VectorXd v) {
    for (Eigen::Index i = 0; i < n; ++i) v[i] = std::clamp(v[i], lo[i], hi[i]);
    return v;
  };

  BoxResult res;
  res.x = clamp(std::move(x0));
  res.gradient = Eigen::VectorXd::Zero(n);
  res.f = fg(res.x, res.gradient);
  res.start_f = res.f;
  res.evaluations = 1;
  res.projected_gradient = detail::project_gradient(res.x, res.gradient, lo, hi);
  if (!std::isfinite(res.f) || !res.gradient.allFinite()) return res;

  Eigen::VectorXd gt(n), gp(n), gm(n);
  auto hessian = [&](const Eigen::VectorXd& x) {
    Eigen::MatrixXd h(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double step = opt.hessian_step * std::max(1.0, std::abs(x[j]));
      Eigen::VectorXd xp = x, xm = x;
      xp[j] += step;
      xm[j] -= step;
      const double fp = fg(xp, gp);
      const double fm = fg(xm, gm);
      res.evaluations += 2;
      if (std::isfinite(fp) && std::isfinite(fm) && gp.allFinite() && gm.allFinite()) {
        h.col(j) = (gp - gm) / (2.0 * step);
      } else if (std::isfinite(fp) && gp.allFinite()) {
        h.col(j) = (gp - res.gradient) / step;
      } else if (std::isfinite(fm) && gm.allFinite()) {
        h.col(j) = (res.gradient - gm) / step;
      } else {
        h.col(j).setZero();
        h(j, j) = 1.0;
      }
    }
    return Eigen::MatrixXd(0.5 * (h + h.transpose()));
  };

  double radius = opt.max_step;
  int small_steps = 0;
  bool fresh = true;
  Eigen::MatrixXd h;
  for (; res.iterations < opt.max_iterations; ++res.iterations) {
    res.projected_gradient = detail::project_gradient(res.x, res.gradient, lo, hi);
    if (res.projected_gradient.lpNorm<Eigen::Infinity>() <= opt.grad_tol) break;
    if (fresh) h = hessian(res.x);
    fresh = false;

    // Coordinates within eps of a bound whose gradient pushes outward move
    // toward the bound, at most the radius.
    const Eigen::VectorXd gap = res.x - clamp(res.x - res.gradient);
    const double eps = std::min(1e-3, gap.lpNorm<Eigen::Infinity>());
    std::vector<Eigen::Index> free;
    Eigen::VectorXd trial = res.x;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (res.x[i] <= lo[i] + eps && res.gradient[i] > 0.0)
        trial[i] = std::max(lo[i], res.x[i] - radius);
      else if (res.x[i] >= hi[i] - eps && res.gradient[i] < 0.0)
        trial[i] = std::min(hi[i], res.x[i] + radius);
      else
        free.push_back(i);
    }
    if (!free.empty()) {
      const Eigen::Index m = static_cast<Eigen::Index>(free.size());
      Eigen::MatrixXd hf(m, m);
      Eigen::VectorXd gf(m);
      for (Eigen::Index a = 0; a < m; ++a) {
        gf[a] = res.gradient[free[a]];
        for (Eigen::Index b = 0; b < m; ++b) hf(a, b) = h(free[a], free[b]);
      }
      const Eigen::VectorXd df = detail::trust_region_step(hf, gf, radius);
      for (Eigen::Index a = 0; a < m; ++a) trial[free[a]] += df[a];
    }
    const Eigen::VectorXd xt = clamp(trial);
    const Eigen::VectorXd s = xt - res.x;
    if (s.lpNorm<Eigen::Infinity>() <= 1e-15 * std::max(1.0, res.x.lpNorm<Eigen::Infinity>())) break;

    const double predicted = -(res.gradient.dot(s) + 0.5 * s.dot(h * s));
    const double ft = fg(xt, gt);
    ++res.evaluations;
    const double gain = res.f - ft;
    const bool ok = std::isfinite(ft) && gt.allFinite() && gain > 0.0;
    const double rho = ok && predicted > 0.0 ? gain / predicted : (ok ? 1.0 : -1.0);

    if (rho < 0.25)
      radius = 0.25 * s.norm();
    else if (rho > 0.75 && s.norm() >= 0.99 * radius)
      radius = std::min(2.0 * radius, opt.max_step);
    if (!(rho > 1e-4)) {
      if (radius < 1e-14) break;
      continue;
    }

    res.x = xt;
    res.f = ft;
    res.gradient = gt;
    fresh = true;
    small_steps = gain <= opt.f_tol * std::max(1.0, std::abs(ft)) ? small_steps + 1 : 0;
    if (small_steps >= 3) {
      ++res.iterations;
      break;
    }
  }
  res.projected_gradient = detail::project_gradient(res.x, res.gradient, lo, hi);
  return res;
}

}  // namespace egwg
