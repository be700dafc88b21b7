#pragma once

// Maximum likelihood for complete samples: the EGWGD likelihood and its
// analytic gradient, the closed-form profile of theta, box-constrained
// multi-start fitting, observed information and Wald intervals. Competitor
// laws are fitted through the same optimizer.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "egwg/distribution.hpp"
#include "egwg/errors.hpp"
#include "egwg/numerics.hpp"
#include "egwg/optimize.hpp"
#include "egwg/submodels.hpp"

namespace egwg {

/// Sorted positive lifetimes with a provenance label.
class Dataset {
 public:
  explicit Dataset(std::vector<double> values, std::string label = "") : values_(std::move(values)), label_(std::move(label)) {
    if (values_.empty()) throw DomainError("dataset is empty");
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (!(values_[i] > 0.0) || !std::isfinite(values_[i]))
        throw DomainError("dataset value " + std::to_string(i + 1) + " is not a positive finite number");
    std::sort(values_.begin(), values_.end());
  }

  const std::vector<double>& values() const noexcept { return values_; }
  const std::string& label() const noexcept { return label_; }
  std::size_t size() const noexcept { return values_.size(); }
  double sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

 private:
  std::vector<double> values_;
  std::string label_;
};

using Vector5 = Eigen::Matrix<double, 5, 1>;
using Matrix5 = Eigen::Matrix<double, 5, 5>;

inline Vector5 to_vector(const EgwgParams& p) {
  Vector5 v;
  v << p.a, p.b, p.c, p.d, p.theta;
  return v;
}

inline EgwgParams from_vector(const Vector5& v) { return {v[0], v[1], v[2], v[3], v[4]}; }

inline const std::array<std::string, 5>& parameter_order() {
  static const std::array<std::string, 5> order{"a", "b", "c", "d", "theta"};
  return order;
}

/// Sum of log densities; -inf when any term is not finite.
inline double loglik(const EgwgParams& p, const Dataset& data) {
  p.validate();
  double total = 0.0;
  for (double x : data.values()) total += detail::log_pdf_from_log_x(p, std::log(x));
  return std::isfinite(total) ? total : -std::numeric_limits<double>::infinity();
}

namespace detail {

/// Per-sample sums from which the log likelihood and its gradient follow for
/// any theta:
///   L(theta)      = n log theta + (theta - 1) sum_l1 + rest
///   dL/dq(theta)  = (theta - 1) tilt[q] + base[q]        for q in (a, b, c, d)
///   dL/dtheta     = n / theta + sum_l1
struct LikelihoodSums {
  double n = 0.0;
  double sum_l1 = 0.0;  // sum log(1 - e^{-z})
  double rest = 0.0;    // log likelihood at theta = 1
  std::array<double, 4> tilt{};
  std::array<double, 4> base{};
  bool finite = true;

  double value(double theta) const { return n * std::log(theta) + (theta - 1.0) * sum_l1 + rest; }
};

inline LikelihoodSums likelihood_sums(const EgwgParams& p, const Dataset& data) {
  LikelihoodSums s;
  s.n = static_cast<double>(data.size());
  const double log_a = std::log(p.a), log_c = std::log(p.c);
  for (double x : data.values()) {
    const double lx = std::log(x);
    const double lw = log_c + p.d * lx;
    const double w = std::exp(lw);
    const double lz = log_a + p.b * lx + log_expm1_from_log(lw);
    const double z = std::exp(lz);
    const double l1 = log1mexp_from_log(lz);

    // one_minus = 1 - e^{-w}; w_over = w / (1 - e^{-w}), -> 1 as w -> 0.
    const double one_minus = -std::expm1(-w);
    const double w_over = w > 1e-8 ? w / one_minus : 1.0 + 0.5 * w;
    const double gn = p.b / w_over + p.d;  // G / w with G = b (1 - e^{-w}) + d w
    const double g_w = p.b * std::exp(-w) + p.d;
    // z / (e^z - 1), the weight of log(1 - e^{-z}) in the z-derivatives.
    const double q = z > 1e-300 ? z * std::exp(-z) / -std::expm1(-z) : 1.0;

    // Relative derivatives (dz/dp) / z.
    const std::array<double, 4> rel{1.0 / p.a, lx, w_over / p.c, w_over * lx};
    // Derivatives of -z + log a + (b - 1) log x + w + log G, divided where needed.
    const std::array<double, 4> direct{1.0 / p.a, lx + 1.0 / (w_over * gn), w / p.c + g_w / (p.c * gn),
                                       w * lx + (1.0 + g_w * lx) / gn};
    for (int k = 0; k < 4; ++k) {
      s.tilt[k] += q * rel[k];
      s.base[k] += direct[k] - z * rel[k];
    }
    s.sum_l1 += l1;
    s.rest += -z + log_a + (p.b - 1.0) * lx + w + lw + std::log(gn);
  }
  for (int k = 0; k < 4; ++k) s.finite = s.finite && std::isfinite(s.tilt[k]) && std::isfinite(s.base[k]);
  s.finite = s.finite && std::isfinite(s.sum_l1) && std::isfinite(s.rest);
  return s;
}

}  // namespace detail

/// Analytic gradient (dL/da, dL/db, dL/dc, dL/dd, dL/dtheta).
inline Vector5 loglik_grad(const EgwgParams& p, const Dataset& data) {
  p.validate();
  const auto s = detail::likelihood_sums(p, data);
  Vector5 g;
  if (!s.finite) {
    g.setConstant(std::numeric_limits<double>::quiet_NaN());
    return g;
  }
  for (int k = 0; k < 4; ++k) g[k] = (p.theta - 1.0) * s.tilt[k] + s.base[k];
  g[4] = s.n / p.theta + s.sum_l1;
  return g;
}

/// theta maximizing L for fixed (a, b, c, d): -n / sum log(1 - e^{-z_i}).
inline double profile_theta(double a, double b, double c, double d, const Dataset& data) {
  const EgwgParams p{a, b, c, d, 1.0};
  p.validate();
  double sum = 0.0;
  for (double x : data.values()) sum += detail::log1mexp_from_log(detail::log_z(p, std::log(x)));
  const double theta = -static_cast<double>(data.size()) / sum;
  if (!(theta > 0.0) || !std::isfinite(theta))
    throw TailError("log(1 - exp(-z)) vanishes for every sample; theta is unbounded", 0.0);
  return theta;
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  /// The lower end is negative although the parameter is positive.
  bool lower_below_zero = false;
  /// False when the variance was negative or not finite; lo and hi are NaN then.
  bool valid = true;
};

/// estimate +- z sqrt(variance), z the upper (1 - level)/2 standard normal quantile.
inline Interval wald_interval(double estimate, double variance, Probability level) {
  if (!(level.value() > 0.0 && level.value() < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
  if (!(variance >= 0.0) || !std::isfinite(variance))
    throw DegenerateInformation("variance is negative or not finite", 0);
  const boost::math::normal_distribution<double> normal;
  const double z = boost::math::quantile(boost::math::complement(normal, 0.5 * (1.0 - level.value())));
  const double half = z * std::sqrt(variance);
  return {estimate - half, estimate + half, estimate - half < 0.0, true};
}

struct FitConfig {
  /// Box for (a, b, c, d); theta is profiled out and free. The likelihood
  /// is unbounded along degenerate ridges (b or d -> inf with a, c -> 0), so
  /// the box is what makes the maximum well defined.
  std::array<double, 4> lower{1e-8, 1e-3, 1e-4, 0.05};
  std::array<double, 4> upper{1e2, 10.0, 10.0, 10.0};
  int restarts = 8;
  int max_iterations = 500;
  /// Converged means every free log-space gradient component is within
  /// grad_tol * max(1, |L|).
  double grad_tol = 1e-4;
  Probability level{0.95};

  void validate() const {
    for (int k = 0; k < 4; ++k)
      if (!(lower[k] > 0.0 && lower[k] <= upper[k] && std::isfinite(upper[k])))
        throw InvalidParameters("fit box needs 0 < lower <= upper < inf");
    if (restarts < 1 || restarts > 8) throw InvalidParameters("restarts must be between 1 and 8");
    if (max_iterations < 1) throw InvalidParameters("max_iterations must be positive");
    if (!(grad_tol > 0.0)) throw InvalidParameters("grad_tol must be positive");
  }
};

struct RestartTrace {
  EgwgParams start;
  double start_loglik = 0.0;
  double end_loglik = 0.0;
  bool converged = false;
  /// Terminus with theta profiled.
  EgwgParams end;
  int iterations = 0;
};

struct FitResult {
  EgwgParams params;
  double loglik = -std::numeric_limits<double>::infinity();
  Matrix5 covariance = Matrix5::Constant(std::numeric_limits<double>::quiet_NaN());
  std::array<Interval, 5> intervals{};
  double level = 0.95;
  bool converged = false;
  int n_evals = 0;
  int restarts_used = 0;
  /// Names of the box bounds the maximizer sits on, e.g. "a>=1e-08".
  std::vector<std::string> active_bounds;
  /// Max-norm of the free log-space gradient at the returned point.
  double gradient_norm = 0.0;
  std::vector<RestartTrace> restarts;
};

/// Minus the numerical Hessian of the log likelihood at p.
inline Matrix5 observed_information(const EgwgParams& p, const Dataset& data, double step_scale = 1e-4) {
  p.validate();
  auto f = [&](const Vector5& v) {
    const EgwgParams q = from_vector(v);
    double total = 0.0;
    for (double x : data.values()) total += detail::log_pdf_from_log_x(q, std::log(x));
    return total;
  };
  if (!(p.b > 0.0)) throw DomainError("observed information needs b > 0");
  return -numerical_hessian(f, to_vector(p), step_scale);
}

/// Wald intervals from the fit's covariance diagonal.
inline std::array<Interval, 5> confidence_intervals(const FitResult& fit, Probability level) {
  const Vector5 est = to_vector(fit.params);
  std::array<Interval, 5> out;
  for (int k = 0; k < 5; ++k) {
    try {
      out[k] = wald_interval(est[k], fit.covariance(k, k), level);
    } catch (const DegenerateInformation&) {
      throw DegenerateInformation("variance of " + parameter_order()[k] + " is negative or not finite",
                                  static_cast<std::size_t>(k));
    }
  }
  return out;
}

namespace detail {

/// Inverts after scaling to unit diagonal, since the parameters' scales differ
/// by many orders of magnitude and the pivot test is relative to the largest entry.
inline Matrix5 invert_information(const Matrix5& info) {
  const Matrix5 nan = Matrix5::Constant(std::numeric_limits<double>::quiet_NaN());
  if (!info.allFinite()) return nan;
  Vector5 s;
  for (int k = 0; k < 5; ++k) {
    if (!(info(k, k) != 0.0)) return nan;
    s[k] = 1.0 / std::sqrt(std::abs(info(k, k)));
  }
  const Matrix5 scaled = s.asDiagonal() * info * s.asDiagonal();
  Eigen::FullPivLU<Matrix5> lu(scaled);
  if (!lu.isInvertible()) return nan;
  Matrix5 cov = s.asDiagonal() * lu.inverse() * s.asDiagonal();
  return 0.5 * (cov + cov.transpose());
}

/// The same intervals as confidence_intervals, with invalid entries instead of a throw.
inline std::array<Interval, 5> intervals_or_invalid(const FitResult& fit, Probability level) {
  const Vector5 est = to_vector(fit.params);
  std::array<Interval, 5> out;
  for (int k = 0; k < 5; ++k) {
    try {
      out[k] = wald_interval(est[k], fit.covariance(k, k), level);
    } catch (const DegenerateInformation&) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      out[k] = {nan, nan, false, false};
    }
  }
  return out;
}

inline double data_median(const Dataset& data) {
  const auto& v = data.values();
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// a giving z(m) = target for the other parameters of p.
inline double match_a(const EgwgParams& p, double m, double target) {
  return target / (std::pow(m, p.b) * std::expm1(p.c * std::pow(m, p.d)));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Competitor laws

struct CompetitorFit {
  CompetitorSpec spec;
  double loglik = -std::numeric_limits<double>::infinity();
  Eigen::MatrixXd covariance;
  bool converged = false;
  int n_evals = 0;
};

inline double competitor_loglik(const CompetitorSpec& spec, const Dataset& data) {
  validate(spec);
  double total = 0.0;
  for (double x : data.values()) total += competitor_log_pdf(spec, x);
  return std::isfinite(total) ? total : -std::numeric_limits<double>::infinity();
}

/// Score vector of a competitor likelihood in its natural parameters.
inline std::vector<double> competitor_loglik_grad(const CompetitorSpec& spec, const Dataset& data) {
  validate(spec);
  const auto& v = spec.params;
  std::vector<double> g(v.size(), 0.0);
  for (double x : data.values()) {
    const double lx = std::log(x);
    switch (spec.kind) {
      case CompetitorKind::ED: g[0] += 1.0 / v[0] - x; break;
      case CompetitorKind::GED:
        g[0] += 1.0 / v[0] - x + (v[1] - 1.0) * x / std::expm1(v[0] * x);
        g[1] += 1.0 / v[1] + detail::log1mexp_from_log(std::log(v[0] * x));
        break;
      case CompetitorKind::GD: {
        const double a = v[0], c = v[1], em = std::expm1(c * x);
        g[0] += 1.0 / a - em / c;
        g[1] += x - a * (x * (em + 1.0) / c - em / (c * c));
        break;
      }
      case CompetitorKind::IW: {
        const double t = std::exp(-v[0] * lx);
        g[0] += 1.0 / v[0] - lx + lx * t;
        break;
      }
      case CompetitorKind::GIW: {
        const double t = std::exp(-v[1] * lx);
        g[0] += 1.0 / v[0] - t;
        g[1] += 1.0 / v[1] - lx + v[0] * lx * t;
        break;
      }
      case CompetitorKind::EGIW: {
        const double t = std::exp(-v[2] * lx);
        g[0] += 1.0 / v[0] - v[1] * t;
        g[1] += 1.0 / v[1] - v[0] * t;
        g[2] += 1.0 / v[2] - lx + v[0] * v[1] * lx * t;
        break;
      }
    }
  }
  return g;
}

/// Minus the numerical Hessian of the competitor log likelihood.
inline Eigen::MatrixXd competitor_observed_information(const CompetitorSpec& spec, const Dataset& data) {
  validate(spec);
  auto f = [&](const Eigen::VectorXd& v) {
    return competitor_loglik({spec.kind, std::vector<double>(v.data(), v.data() + v.size())}, data);
  };
  const Eigen::VectorXd point = Eigen::Map<const Eigen::VectorXd>(spec.params.data(),
                                                                  static_cast<Eigen::Index>(spec.params.size()));
  return -numerical_hessian(f, point);
}

namespace detail {

inline Eigen::MatrixXd competitor_covariance(const CompetitorSpec& spec, const Dataset& data) {
  const Eigen::Index k = static_cast<Eigen::Index>(spec.params.size());
  try {
    const Eigen::MatrixXd info = competitor_observed_information(spec, data);
    if (info.allFinite() && (info.diagonal().array() != 0.0).all()) {
      // Singularity is judged on the unit-diagonal scaling, above the accuracy
      // of the difference Hessian, so EGIW's exact alpha-theta degeneracy shows.
      const Eigen::VectorXd sc = info.diagonal().cwiseAbs().cwiseSqrt().cwiseInverse();
      const Eigen::MatrixXd unit = sc.asDiagonal() * info * sc.asDiagonal();
      const Eigen::VectorXd lam = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(unit).eigenvalues();
      if (lam.cwiseAbs().minCoeff() > 1e-5 * lam.cwiseAbs().maxCoeff()) {
        Eigen::MatrixXd cov = sc.asDiagonal() * unit.inverse() * sc.asDiagonal();
        return 0.5 * (cov + cov.transpose());
      }
    }
  } catch (const Error&) {
  }
  return Eigen::MatrixXd::Constant(k, k, std::numeric_limits<double>::quiet_NaN());
}

/// Log-space maximization of a competitor likelihood from several starts.
inline CompetitorFit fit_competitor_numeric(CompetitorKind kind, const Dataset& data,
                                            const std::vector<std::vector<double>>& starts,
                                            double grad_tol = 1e-6) {
  const Eigen::Index k = static_cast<Eigen::Index>(competitor_arity(kind));
  int evals = 0;
  auto fg = [&](const Eigen::VectorXd& u, Eigen::VectorXd& g) {
    g.resize(k);
    CompetitorSpec spec{kind, std::vector<double>(static_cast<std::size_t>(k))};
    for (Eigen::Index i = 0; i < k; ++i) spec.params[static_cast<std::size_t>(i)] = std::exp(u[i]);
    ++evals;
    const double l = competitor_loglik(spec, data);
    if (!std::isfinite(l)) return std::numeric_limits<double>::infinity();
    const auto score = competitor_loglik_grad(spec, data);
    for (Eigen::Index i = 0; i < k; ++i) g[i] = -spec.params[static_cast<std::size_t>(i)] * score[static_cast<std::size_t>(i)];
    return -l;
  };
  const Eigen::VectorXd lo = Eigen::VectorXd::Constant(k, std::log(1e-12));
  const Eigen::VectorXd hi = Eigen::VectorXd::Constant(k, std::log(1e12));

  BoxResult best;
  for (const auto& s : starts) {
    Eigen::VectorXd u(k);
    for (Eigen::Index i = 0; i < k; ++i) u[i] = std::log(s[static_cast<std::size_t>(i)]);
    BoxOptions opt;
    opt.grad_tol = 1e-9 * static_cast<double>(data.size());  // f grows with n
    auto r = minimize_box(fg, u, lo, hi, opt);
    if (r.f < best.f) best = r;
  }
  CompetitorFit out;
  out.spec.kind = kind;
  for (Eigen::Index i = 0; i < k; ++i) out.spec.params.push_back(std::exp(best.x[i]));
  out.loglik = -best.f;
  out.converged = std::isfinite(best.f) &&
                  best.projected_gradient.lpNorm<Eigen::Infinity>() <= grad_tol * std::max(1.0, best.f);
  out.n_evals = evals;
  return out;
}

/// Weibull shape from the coefficient of variation, scale from the mean.
inline std::pair<double, double> weibull_moment_match(const Dataset& data) {
  const double n = static_cast<double>(data.size());
  const double mean = data.sum() / n;
  double ss = 0.0;
  for (double x : data.values()) ss += (x - mean) * (x - mean);
  const double cv2 = n > 1.0 ? ss / (n - 1.0) / (mean * mean) : 1.0;
  auto cv2_of_shape = [](double k) {
    const double g1 = boost::math::tgamma(1.0 + 1.0 / k);
    return boost::math::tgamma(1.0 + 2.0 / k) / (g1 * g1) - 1.0;
  };
  double shape = 1.0;
  if (cv2 > 0.0) {
    // cv2_of_shape is decreasing in k; bisect on log k.
    double lo = std::log(0.05), hi = std::log(50.0);
    if (cv2 >= cv2_of_shape(std::exp(lo))) {
      shape = std::exp(lo);
    } else if (cv2 <= cv2_of_shape(std::exp(hi))) {
      shape = std::exp(hi);
    } else {
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (cv2_of_shape(std::exp(mid)) > cv2 ? lo : hi) = mid;
      }
      shape = std::exp(0.5 * (lo + hi));
    }
  }
  const double scale = mean / boost::math::tgamma(1.0 + 1.0 / shape);
  return {shape, scale};
}

}  // namespace detail

/// Maximum likelihood for a competitor law. ED has the closed form n / sum x.
/// EGIW depends on (alpha, theta) only through alpha * theta, so it is fitted
/// as GIW and reported with alpha = 1.
inline CompetitorFit fit_competitor(CompetitorKind kind, const Dataset& data) {
  const double n = static_cast<double>(data.size());
  const double mean = data.sum() / n;
  const double med = detail::data_median(data);
  CompetitorFit out;
  switch (kind) {
    case CompetitorKind::ED:
      out.spec = {kind, {n / data.sum()}};
      out.loglik = competitor_loglik(out.spec, data);
      out.converged = true;
      out.n_evals = 1;
      break;
    case CompetitorKind::GED:
      out = detail::fit_competitor_numeric(kind, data, {{1.0 / mean, 1.0}, {0.5 / mean, 0.5}, {2.0 / mean, 3.0}});
      break;
    case CompetitorKind::GD:
      out = detail::fit_competitor_numeric(
          kind, data, {{1.0 / mean, 0.1 / mean}, {1.0 / mean, 1.0 / mean}, {0.1 / mean, 3.0 / mean}});
      break;
    case CompetitorKind::IW:
      out = detail::fit_competitor_numeric(kind, data, {{1.0}, {0.3}, {3.0}});
      break;
    case CompetitorKind::GIW:
    case CompetitorKind::EGIW: {
      std::vector<std::vector<double>> starts;
      for (double beta : {0.3, 1.0, 3.0}) starts.push_back({std::log(2.0) * std::pow(med, beta), beta});
      out = detail::fit_competitor_numeric(CompetitorKind::GIW, data, starts);
      if (kind == CompetitorKind::EGIW) {
        out.spec = {kind, {1.0, out.spec.params[0], out.spec.params[1]}};
        out.loglik = competitor_loglik(out.spec, data);
      }
      break;
    }
  }
  out.covariance = detail::competitor_covariance(out.spec, data);
  return out;
}

// ---------------------------------------------------------------------------
// EGWGD

namespace detail {

/// The deterministic start schedule: two anchors (the fitted hazard-rate
/// Gompertz law and a moment-matched Weibull law written in EGWGD form),
/// each moved over a grid of (c x^d at the median, d) scalings with a
/// re-matched so z at the sample median stays put.
inline std::vector<EgwgParams> egwgd_starts(const Dataset& data, const FitConfig& cfg) {
  const double m = data_median(data);
  std::vector<std::pair<EgwgParams, double>> anchors;  // (params, z at median)

  const auto gd = fit_competitor(CompetitorKind::GD, data);
  {
    const double rate = gd.spec.params[0], c = gd.spec.params[1];
    EgwgParams p{rate / c, 0.05, c, 1.0, 1.0};
    anchors.push_back({p, (rate / c) * std::expm1(c * m)});
  }
  {
    const auto [shape, scale] = weibull_moment_match(data);
    EgwgParams p{1.0, 0.5 * shape, 0.0, 0.5 * shape, 1.0};
    p.c = 0.5 / std::pow(m, p.d);  // c m^d = 0.5
    anchors.push_back({p, std::pow(m / scale, shape)});
  }

  const std::array<std::pair<double, double>, 4> grid{{{1.0, 1.0}, {0.1, 1.0}, {1.0, 0.5}, {3.0, 1.5}}};
  std::vector<EgwgParams> starts;
  // Unscaled anchors come first.
  for (const auto& [c_scale, d_scale] : grid)
    for (const auto& [anchor, z_med] : anchors) {
      EgwgParams p = anchor;
      const double w_med = c_scale * anchor.c * std::pow(m, anchor.d);
      p.d = anchor.d * d_scale;
      p.c = w_med / std::pow(m, p.d);
      p.b = std::clamp(p.b, cfg.lower[1], cfg.upper[1]);
      p.d = std::clamp(p.d, cfg.lower[3], cfg.upper[3]);
      p.c = std::clamp(p.c, cfg.lower[2], cfg.upper[2]);
      p.a = std::clamp(match_a(p, m, z_med), cfg.lower[0], cfg.upper[0]);
      starts.push_back(p);
    }
  return starts;
}

inline std::string format_bound(const std::string& name, const char* op, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%s%.17g", name.c_str(), op, value);
  return buf;
}

}  // namespace detail

/// Profile log likelihood over (a, b, c, d) with theta = profile_theta.
inline double profile_loglik(double a, double b, double c, double d, const Dataset& data) {
  const EgwgParams p{a, b, c, d, 1.0};
  p.validate();
  const auto s = detail::likelihood_sums(p, data);
  if (!s.finite || !(s.sum_l1 < 0.0)) return -std::numeric_limits<double>::infinity();
  return s.value(-s.n / s.sum_l1);
}

/// Multi-start maximum likelihood for the full EGWGD model. theta is profiled
/// out, so each start runs projected Newton over log(a, b, c, d) inside the box.
/// The best terminus wins; earlier starts win ties.
inline FitResult fit(const Dataset& data, const FitConfig& cfg = {}) {
  cfg.validate();
  if (data.size() < 5) throw DomainError("the five-parameter fit needs at least 5 observations");

  int evals = 0;
  auto objective = [&](const Eigen::VectorXd& u, Eigen::VectorXd& g) {
    ++evals;
    g.resize(4);
    const EgwgParams p{std::exp(u[0]), std::exp(u[1]), std::exp(u[2]), std::exp(u[3]), 1.0};
    const auto s = detail::likelihood_sums(p, data);
    if (!s.finite || !(s.sum_l1 < 0.0)) return std::numeric_limits<double>::infinity();
    const double theta = -s.n / s.sum_l1;
    const std::array<double, 4> pv{p.a, p.b, p.c, p.d};
    // Envelope theorem: the profile gradient is the partial gradient at theta-hat.
    for (int k = 0; k < 4; ++k) g[k] = -pv[k] * ((theta - 1.0) * s.tilt[k] + s.base[k]);
    const double value = -s.value(theta);
    return std::isfinite(value) && g.allFinite() ? value : std::numeric_limits<double>::infinity();
  };

  Eigen::VectorXd lo(4), hi(4);
  for (int k = 0; k < 4; ++k) {
    lo[k] = std::log(cfg.lower[k]);
    hi[k] = std::log(cfg.upper[k]);
  }

  FitResult result;
  BoxResult best;
  const auto starts = detail::egwgd_starts(data, cfg);
  for (int r = 0; r < cfg.restarts; ++r) {
    const EgwgParams& s = starts[static_cast<std::size_t>(r)];
    Eigen::VectorXd u(4);
    u << std::log(s.a), std::log(s.b), std::log(s.c), std::log(s.d);
    BoxOptions opt;
    opt.max_iterations = cfg.max_iterations;
    opt.grad_tol = 1e-9 * static_cast<double>(data.size());
    auto br = minimize_box(objective, u, lo, hi, opt);
    RestartTrace trace;
    trace.start = s;
    trace.start_loglik = -br.start_f;
    trace.end_loglik = -br.f;
    trace.converged = std::isfinite(br.f) &&
                      br.projected_gradient.lpNorm<Eigen::Infinity>() <= cfg.grad_tol * std::max(1.0, std::abs(br.f));
    if (std::isfinite(br.f)) {
      const double ea = std::exp(br.x[0]), eb = std::exp(br.x[1]), ec = std::exp(br.x[2]), ed = std::exp(br.x[3]);
      trace.end = {ea, eb, ec, ed, profile_theta(ea, eb, ec, ed, data)};
    } else {
      trace.end = s;
    }
    trace.iterations = br.iterations;
    result.restarts.push_back(trace);
    if (br.f < best.f) best = br;
  }
  result.restarts_used = cfg.restarts;
  result.n_evals = evals;
  if (!std::isfinite(best.f)) throw Error("every restart started at a point with non-finite likelihood");

  // exp(log(bound)) can round just outside the box.
  auto back = [&](int k) {
    if (best.x[k] <= lo[k]) return cfg.lower[k];
    if (best.x[k] >= hi[k]) return cfg.upper[k];
    return std::clamp(std::exp(best.x[k]), cfg.lower[k], cfg.upper[k]);
  };
  const double a = back(0), b = back(1), c = back(2), d = back(3);
  result.params = {a, b, c, d, profile_theta(a, b, c, d, data)};
  result.loglik = loglik(result.params, data);
  result.gradient_norm = best.projected_gradient.lpNorm<Eigen::Infinity>();
  result.converged = result.gradient_norm <= cfg.grad_tol * std::max(1.0, std::abs(result.loglik));
  for (int k = 0; k < 4; ++k) {
    if (best.x[k] <= lo[k]) result.active_bounds.push_back(detail::format_bound(parameter_order()[k], ">=", cfg.lower[k]));
    if (best.x[k] >= hi[k]) result.active_bounds.push_back(detail::format_bound(parameter_order()[k], "<=", cfg.upper[k]));
  }
  result.level = cfg.level;
  try {
    result.covariance = detail::invert_information(observed_information(result.params, data));
  } catch (const Error&) {
    result.covariance = Matrix5::Constant(std::numeric_limits<double>::quiet_NaN());
  }
  result.intervals = detail::intervals_or_invalid(result, cfg.level);
  return result;
}

}  // namespace egwg
