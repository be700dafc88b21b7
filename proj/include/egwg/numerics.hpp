#pragma once

// Shared numerical kernels: adaptive Gauss-Kronrod quadrature on finite and
// infinite intervals, bracketed root finding for increasing functions, and
// central-difference Hessians.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/tools/toms748_solve.hpp>

#include "egwg/errors.hpp"

namespace egwg {

struct QuadratureConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  int max_subdivisions = 2000;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol >= 0.0) || max_subdivisions < 1)
      throw InvalidParameters("QuadratureConfig requires rel_tol > 0, abs_tol >= 0, max_subdivisions >= 1");
  }
};

struct RootConfig {
  double x_tol = 1e-12;
  /// Relative width at which bisection stops; lets roots of very small magnitude resolve.
  double rel_tol = 4.0 * std::numeric_limits<double>::epsilon();
  int max_iterations = 200;

  void validate() const {
    if (!(x_tol > 0.0) || !(rel_tol >= 0.0) || max_iterations < 1)
      throw InvalidParameters("RootConfig requires x_tol > 0, rel_tol >= 0, max_iterations >= 1");
  }
};

namespace detail {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
inline constexpr std::array<double, 11> kKronrodNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525452084, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double lo;
  double hi;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
double checked_eval(F& f, double x) {
  const double y = f(x);
  if (std::isnan(y)) throw InvalidIntegrand("integrand returned NaN at x = " + std::to_string(x));
  if (!std::isfinite(y)) throw InvalidIntegrand("integrand is not finite at x = " + std::to_string(x));
  return y;
}

template <class F>
Segment gauss_kronrod21(F& f, double lo, double hi) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double uflow = std::numeric_limits<double>::min();
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);

  std::array<double, 10> f1{}, f2{};
  const double fc = checked_eval(f, center);
  double kronrod = fc * kKronrodWeights[10];
  double gauss = 0.0;
  double abs_sum = std::abs(kronrod);
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kKronrodNodes[j];
    f1[j] = checked_eval(f, center - dx);
    f2[j] = checked_eval(f, center + dx);
    const double pair = f1[j] + f2[j];
    kronrod += kKronrodWeights[j] * pair;
    abs_sum += kKronrodWeights[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  const double mean = 0.5 * kronrod;
  double asc = kKronrodWeights[10] * std::abs(fc - mean);
  for (int j = 0; j < 10; ++j)
    asc += kKronrodWeights[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

  const double value = kronrod * half;
  abs_sum *= std::abs(half);
  asc *= std::abs(half);
  double err = std::abs((kronrod - gauss) * half);
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  if (abs_sum > uflow / (50.0 * eps)) err = std::max(50.0 * eps * abs_sum, err);
  return {lo, hi, value, err};
}

template <class F>
double adaptive_finite(F& f, double lo, double hi, const QuadratureConfig& cfg) {
  std::priority_queue<Segment> heap;
  Segment first = gauss_kronrod21(f, lo, hi);
  double total = first.value;
  double total_err = first.error;
  heap.push(first);
  int splits = 0;
  while (total_err > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total))) {
    if (splits >= cfg.max_subdivisions)
      throw AccuracyError("quadrature did not converge within " + std::to_string(cfg.max_subdivisions) +
                              " subdivisions",
                          total, total_err);
    Segment worst = heap.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi))
      throw AccuracyError("quadrature interval collapsed below machine resolution", total, total_err);
    heap.pop();
    Segment left = gauss_kronrod21(f, worst.lo, mid);
    Segment right = gauss_kronrod21(f, mid, worst.hi);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++splits;
    // Re-sum occasionally so cancellation in the running totals cannot stall the loop.
    if (splits % 64 == 0) {
      auto copy = heap;
      total = 0.0;
      total_err = 0.0;
      while (!copy.empty()) {
        total += copy.top().value;
        total_err += copy.top().error;
        copy.pop();
      }
    }
  }
  return total;
}

}  // namespace detail

/// Integrates f over (lo, hi). Either bound may be infinite; an infinite upper
/// tail is mapped onto [0, 1) by x = lo + tail_scale * u / (1 - u) (mirrored for
/// an infinite lower bound). A doubly infinite range is split at zero.
///
/// Throws AccuracyError (carrying the best estimate and its error bound) when
/// the subdivision budget runs out, and InvalidIntegrand when f returns NaN.
template <class F>
double integrate(F&& f, double lo, double hi, const QuadratureConfig& cfg = {}, double tail_scale = 1.0) {
  cfg.validate();
  if (std::isnan(lo) || std::isnan(hi) || !(lo < hi)) throw DomainError("integrate requires lo < hi");
  if (!(tail_scale > 0.0)) throw DomainError("integrate requires tail_scale > 0");
  constexpr double inf = std::numeric_limits<double>::infinity();

  if (lo == -inf && hi == inf) {
    QuadratureConfig half = cfg;
    half.abs_tol = 0.5 * cfg.abs_tol;
    return integrate(f, -inf, 0.0, half, tail_scale) + integrate(f, 0.0, inf, half, tail_scale);
  }
  if (hi == inf) {
    auto mapped = [&](double u) {
      const double one_minus = 1.0 - u;
      const double x = lo + tail_scale * u / one_minus;
      const double fx = f(x);
      if (fx == 0.0) return 0.0;
      return fx * tail_scale / (one_minus * one_minus);
    };
    return detail::adaptive_finite(mapped, 0.0, 1.0, cfg);
  }
  if (lo == -inf) {
    auto mapped = [&](double u) {
      const double one_minus = 1.0 - u;
      const double x = hi - tail_scale * u / one_minus;
      const double fx = f(x);
      if (fx == 0.0) return 0.0;
      return fx * tail_scale / (one_minus * one_minus);
    };
    return detail::adaptive_finite(mapped, 0.0, 1.0, cfg);
  }
  return detail::adaptive_finite(f, lo, hi, cfg);
}

/// Solves g(x) = target for x > 0, with g strictly increasing on (0, inf).
/// The bracket grows geometrically from `initial` (doubling upward, halving
/// downward), then TOMS 748 narrows it until its width is below
/// x_tol + rel_tol * |x|.
template <class G>
double find_root_increasing(G&& g, double target, const RootConfig& cfg = {}, double initial = 1.0) {
  cfg.validate();
  if (!std::isfinite(target)) throw OutOfRange("root target is not finite");
  if (!(initial > 0.0) || !std::isfinite(initial)) throw DomainError("initial bracket point must be positive");

  constexpr double big = std::numeric_limits<double>::max() / 4.0;
  constexpr double tiny = std::numeric_limits<double>::min();
  auto residual = [&](double x) { return g(x) - target; };

  double lo = initial;
  double hi = initial;
  double r = residual(initial);
  if (r == 0.0) return initial;
  double r_lo = r;
  double r_hi = r;
  if (r < 0.0) {
    while (r_hi < 0.0) {
      lo = hi;
      r_lo = r_hi;
      if (hi > big) throw OutOfRange("root bracket expansion overflowed");
      hi *= 2.0;
      r_hi = residual(hi);
      if (std::isnan(r_hi)) throw OutOfRange("function is NaN during bracket expansion");
    }
  } else {
    while (r_lo > 0.0) {
      hi = lo;
      r_hi = r_lo;
      if (lo < tiny) throw OutOfRange("root target is below g(0+)");
      lo *= 0.5;
      r_lo = residual(lo);
      if (std::isnan(r_lo)) throw OutOfRange("function is NaN during bracket expansion");
    }
  }
  if (r_lo == 0.0) return lo;
  if (r_hi == 0.0) return hi;

  auto converged = [&](double a, double b) {
    return std::abs(b - a) <= cfg.x_tol + cfg.rel_tol * std::max(std::abs(a), std::abs(b));
  };
  std::uintmax_t iterations = static_cast<std::uintmax_t>(cfg.max_iterations);
  const auto bracket = boost::math::tools::toms748_solve(residual, lo, hi, r_lo, r_hi, converged, iterations);
  return 0.5 * (bracket.first + bracket.second);
}

/// Central-difference Hessian with per-coordinate steps
/// h_i = step_scale * max(|p_i|, floor), symmetrized as (H + H^T) / 2.
/// Throws StencilError naming the coordinate whose stencil hit a non-finite value.
template <class F, int N>
Eigen::Matrix<double, N, N> numerical_hessian(F&& f, const Eigen::Matrix<double, N, 1>& point,
                                              double step_scale = 1e-4, double floor = 1e-8) {
  using Vec = Eigen::Matrix<double, N, 1>;
  using Mat = Eigen::Matrix<double, N, N>;
  const Eigen::Index n = point.size();
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(point[i] > 0.0)) throw DomainError("numerical_hessian requires strictly positive coordinates");

  Vec h(n);
  for (Eigen::Index i = 0; i < n; ++i) h[i] = step_scale * std::max(std::abs(point[i]), floor);

  auto eval = [&](const Vec& p, Eigen::Index coord) {
    const double v = f(p);
    if (!std::isfinite(v))
      throw StencilError("non-finite value in Hessian stencil along coordinate " + std::to_string(coord),
                         static_cast<std::size_t>(coord));
    return v;
  };

  const double f0 = eval(point, 0);
  Mat hess(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vec p = point;
    p[i] = point[i] + h[i];
    const double fp = eval(p, i);
    p[i] = point[i] - h[i];
    const double fm = eval(p, i);
    hess(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      Vec p = point;
      p[i] = point[i] + h[i];
      p[j] = point[j] + h[j];
      const double fpp = eval(p, i);
      p[j] = point[j] - h[j];
      const double fpm = eval(p, i);
      p[i] = point[i] - h[i];
      const double fmm = eval(p, i);
      p[j] = point[j] + h[j];
      const double fmp = eval(p, i);
      hess(i, j) = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
      hess(j, i) = hess(i, j);
    }
  }
  return 0.5 * (hess + hess.transpose());
}

}  // namespace egwg
