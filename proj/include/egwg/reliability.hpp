#pragma once

// Moments and reliability measures, all from their defining integrals.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "egwg/distribution.hpp"
#include "egwg/errors.hpp"
#include "egwg/numerics.hpp"

namespace egwg {

namespace detail {

/// Integral of x^r f(x) over (0, inf), taken in s = log x around the median.
/// Near the origin f behaves like a power of x, so in s the lower tail decays
/// only exponentially (slowly when theta is small); the wide tail scale covers it.
inline double log_space_moment(const EgwgParams& p, double r, const QuadratureConfig& cfg) {
  const double center = std::log(median(p));
  auto integrand = [&](double t) {
    const double s = center + t;
    return std::exp(log_pdf_at_log(p, s) + (r + 1.0) * s);
  };
  constexpr double inf = std::numeric_limits<double>::infinity();
  return integrate(integrand, -inf, inf, cfg, 10.0);
}

/// Survival mass beyond u given that the hazard is increasing there:
/// int_u^inf R <= R(u) / h(u).
inline double survival_tail_bound(const EgwgParams& p, double u, double log_r_ref) {
  const double lz = log_z(p, std::log(u));
  const double lr = log_survival_from_log_z(p, lz);
  if (!std::isfinite(lr)) return 0.0;
  return std::exp(lr - log_r_ref - (log_pdf_from_log_x(p, std::log(u)) - lr));
}

/// Integral of R(x) / R(t) over (t, inf).
inline double scaled_survival_integral(const EgwgParams& p, double t, double log_r_t,
                                       const QuadratureConfig& cfg) {
  auto scaled = [&](double x) {
    if (x <= 0.0) return 1.0;
    return std::exp(log_survival(p, x) - log_r_t);
  };
  const double cap = quantile(p, Probability(1.0 - 1e-14));
  if (t < cap) return integrate(scaled, t, cap, cfg) + survival_tail_bound(p, cap, log_r_t);
  // Already past the cap: the remaining mass sits within a few 1/h(t) of t.
  const double scale = 1.0 / std::exp(log_pdf(p, t) - log_r_t);
  return integrate(scaled, t, std::numeric_limits<double>::infinity(), cfg, scale);
}

}  // namespace detail

/// E[X^r] = int_0^inf x^r f(x) dx. r = 0 returns 1 without integrating.
inline double raw_moment(const EgwgParams& p, unsigned r, const QuadratureConfig& cfg = {}) {
  p.validate();
  if (r == 0) return 1.0;
  return detail::log_space_moment(p, static_cast<double>(r), cfg);
}

/// Mean time to failure of a failure law, or mean time to repair of a repair law.
inline double mttf(const EgwgParams& p, const QuadratureConfig& cfg = {}) { return raw_moment(p, 1, cfg); }

/// A failure law paired with a repair law. Both means are computed once at
/// construction, which also verifies that they are finite.
class RepairableSystem {
 public:
  RepairableSystem(const EgwgParams& failure, const EgwgParams& repair, const QuadratureConfig& cfg = {})
      : failure_(failure), repair_(repair) {
    failure.validate();
    repair.validate();
    mttf_ = egwg::mttf(failure, cfg);
    mttr_ = egwg::mttf(repair, cfg);
    if (!(std::isfinite(mttf_) && mttf_ > 0.0)) throw InvalidParameters("failure law has no finite positive mean");
    if (!(std::isfinite(mttr_) && mttr_ > 0.0)) throw InvalidParameters("repair law has no finite positive mean");
  }

  const EgwgParams& failure() const noexcept { return failure_; }
  const EgwgParams& repair() const noexcept { return repair_; }
  double mttf() const noexcept { return mttf_; }
  double mttr() const noexcept { return mttr_; }

 private:
  EgwgParams failure_;
  EgwgParams repair_;
  double mttf_ = 0.0;
  double mttr_ = 0.0;
};

inline double mtbf(const RepairableSystem& sys) { return sys.mttf() + sys.mttr(); }

/// Steady-state availability MTTF / (MTTF + MTTR).
inline Probability availability(const RepairableSystem& sys) {
  return Probability(sys.mttf() / (sys.mttf() + sys.mttr()));
}

/// Probability that a repair finishes by time t; the repair law's cdf.
inline Probability maintainability(const EgwgParams& repair, double t) { return cdf(repair, t); }

/// m(t) = int_t^inf R(x) dx / R(t). The integral runs up to the 1 - 1e-14
/// quantile and adds R/h there as the bound on the remainder.
inline double mean_residual_life(const EgwgParams& p, double t, const QuadratureConfig& cfg = {}) {
  p.validate();
  detail::require_nonnegative(t, "mean_residual_life");
  const double log_r_t = log_survival(p, t);
  if (!std::isfinite(log_r_t)) {
    const double limit = detail::right_tail_limit(p);
    throw TailError("survival underflows at t = " + std::to_string(t), limit);
  }
  return detail::scaled_survival_integral(p, t, log_r_t, cfg);
}

/// P(t) = int_0^t F(x) dx / F(t).
inline double mean_past_life(const EgwgParams& p, double t, const QuadratureConfig& cfg = {}) {
  p.validate();
  detail::require_positive(t, "mean_past_life");
  const double log_f_t = log_cdf(p, t);
  if (!std::isfinite(log_f_t)) throw TailError("cdf underflows at t = " + std::to_string(t), t);
  auto scaled = [&](double x) {
    if (x <= 0.0) return 0.0;
    return std::exp(log_cdf(p, x) - log_f_t);
  };
  return integrate(scaled, 0.0, t, cfg);
}

/// Log density of the i-th of n order statistics (1-based).
inline double log_order_stat_pdf(const EgwgParams& p, std::size_t i, std::size_t n, double x) {
  if (n == 0 || i < 1 || i > n)
    throw DomainError("order statistic index " + std::to_string(i) + " outside 1.." + std::to_string(n));
  p.validate();
  detail::require_positive(x, "order_stat_pdf");
  const double lx = std::log(x);
  const double lz = detail::log_z(p, lx);
  const double nn = static_cast<double>(n), ii = static_cast<double>(i);
  const double log_choose = std::lgamma(nn + 1.0) - std::lgamma(ii) - std::lgamma(nn - ii + 1.0);
  double out = log_choose + detail::log_pdf_from_log_x(p, lx);
  if (i > 1) out += (ii - 1.0) * detail::log_cdf_from_log_z(p, lz);
  if (i < n) out += (nn - ii) * detail::log_survival_from_log_z(p, lz);
  return out;
}

inline double order_stat_pdf(const EgwgParams& p, std::size_t i, std::size_t n, double x) {
  return std::exp(log_order_stat_pdf(p, i, n, x));
}

struct ReliabilityPoint {
  double t;
  /// Present only when a repair law is given.
  std::optional<double> maintainability;
  double mrl;
  /// Absent at t = 0, where the mean past life is undefined.
  std::optional<double> mpl;
};

struct ReliabilitySummary {
  double mttf;
  std::optional<double> mttr, mtbf, availability;
  std::vector<ReliabilityPoint> points;
};

/// Means of the failure law (and of the repair law when given) plus mrl, mpl
/// and maintainability at each t.
inline ReliabilitySummary reliability_summary(const EgwgParams& failure, const std::optional<EgwgParams>& repair,
                                              const std::vector<double>& ts, const QuadratureConfig& cfg = {}) {
  ReliabilitySummary s{};
  if (repair) {
    const RepairableSystem sys(failure, *repair, cfg);
    s.mttf = sys.mttf();
    s.mttr = sys.mttr();
    s.mtbf = mtbf(sys);
    s.availability = availability(sys).value();
  } else {
    s.mttf = mttf(failure, cfg);
  }
  for (double t : ts) {
    detail::require_nonnegative(t, "reliability grid");
    ReliabilityPoint pt{t, std::nullopt, t == 0.0 ? s.mttf : mean_residual_life(failure, t, cfg), std::nullopt};
    if (repair) pt.maintainability = t == 0.0 ? 0.0 : maintainability(*repair, t).value();
    if (t > 0.0) pt.mpl = mean_past_life(failure, t, cfg);
    s.points.push_back(pt);
  }
  return s;
}

}  // namespace egwg
