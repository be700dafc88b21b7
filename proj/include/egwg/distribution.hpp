#pragma once

// Distribution functions of the exponentiated generalized Weibull-Gompertz
// law with cdf F(x) = [1 - exp(-a x^b (exp(c x^d) - 1))]^theta.
//
// Every evaluation goes through log z, z = a x^b (exp(c x^d) - 1), computed
// from log x. This keeps the tiny-z regime near the origin (where theta < 1
// makes the density singular) and the huge-z right tail representable.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "egwg/errors.hpp"
#include "egwg/numerics.hpp"

namespace egwg {

/// A value in [0, 1]. Converts implicitly to double.
class Probability {
 public:
  constexpr Probability() = default;
  constexpr explicit Probability(double v) : value_(v) {
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("probability outside [0, 1]: " + std::to_string(v));
  }
  constexpr double value() const noexcept { return value_; }
  constexpr operator double() const noexcept { return value_; }

 private:
  double value_ = 0.0;
};

/// (a, b, c, d, theta). a, c, d, theta > 0 and b >= 0; b = 0 is the
/// Gompertz-type sub-family and is evaluated through the same closed forms
/// (no 0/0 appears in the factored density below).
struct EgwgParams {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  double d = 1.0;
  double theta = 1.0;

  void validate() const {
    const bool ok = std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d) &&
                    std::isfinite(theta) && a > 0.0 && b >= 0.0 && c > 0.0 && d > 0.0 && theta > 0.0;
    if (!ok)
      throw InvalidParameters("EGWGD parameters require a, c, d, theta > 0 and b >= 0 (got a=" +
                              std::to_string(a) + ", b=" + std::to_string(b) + ", c=" + std::to_string(c) +
                              ", d=" + std::to_string(d) + ", theta=" + std::to_string(theta) + ")");
  }

  friend bool operator==(const EgwgParams&, const EgwgParams&) = default;
};

namespace detail {

/// log(exp(y) - 1) from log y.
inline double log_expm1_from_log(double log_y) {
  if (log_y < -20.0) return log_y + 0.5 * std::exp(log_y);
  const double y = std::exp(log_y);
  if (y > 35.0) return y + std::log1p(-std::exp(-y));
  return std::log(std::expm1(y));
}

/// log(1 - exp(-z)) from log z.
inline double log1mexp_from_log(double log_z) {
  if (log_z < -20.0) {
    const double z = std::exp(log_z);
    return log_z - 0.5 * z;
  }
  const double z = std::exp(log_z);
  if (z > 0.6931471805599453) return std::log1p(-std::exp(-z));
  return std::log(-std::expm1(-z));
}

/// log z as a function of log x.
inline double log_z(const EgwgParams& p, double log_x) {
  const double log_w = std::log(p.c) + p.d * log_x;  // log(c x^d)
  return std::log(p.a) + p.b * log_x + log_expm1_from_log(log_w);
}

/// log F from log z; F = exp(theta * log(1 - e^{-z})).
inline double log_cdf_from_log_z(const EgwgParams& p, double lz) {
  if (lz == std::numeric_limits<double>::infinity()) return 0.0;
  return p.theta * log1mexp_from_log(lz);
}

inline double log_survival_from_log_z(const EgwgParams& p, double lz) {
  if (lz == std::numeric_limits<double>::infinity()) return -std::numeric_limits<double>::infinity();
  const double z = std::exp(lz);
  if (z > 700.0) return std::log(p.theta) - z;  // R = theta e^{-z} (1 + O(e^{-z}))
  const double log_f = log_cdf_from_log_z(p, lz);
  if (log_f < -0.6931471805599453) return std::log1p(-std::exp(log_f));
  return std::log(-std::expm1(log_f));
}

inline double log_pdf_from_log_x(const EgwgParams& p, double log_x) {
  const double lz = log_z(p, log_x);
  if (!(lz < std::numeric_limits<double>::infinity())) return -std::numeric_limits<double>::infinity();
  const double z = std::exp(lz);
  const double log_w = std::log(p.c) + p.d * log_x;
  const double w = std::exp(log_w);
  // dz/dx = a x^{b-1} e^{w} [b (1 - e^{-w}) + c d x^d], written with w = c x^d factored out.
  const double ratio = w > 1e-8 ? -std::expm1(-w) / w : 1.0 - 0.5 * w;
  const double log_bracket = log_w + std::log(p.b * ratio + p.d);
  double value = std::log(p.theta) - z + std::log(p.a) + (p.b - 1.0) * log_x + w + log_bracket;
  if (p.theta != 1.0) value += (p.theta - 1.0) * log1mexp_from_log(lz);
  return value;
}

inline void require_nonnegative(double x, const char* what) {
  if (std::isnan(x) || x < 0.0) throw DomainError(std::string(what) + " requires x >= 0");
}

inline void require_positive(double x, const char* what) {
  if (std::isnan(x) || !(x > 0.0)) throw DomainError(std::string(what) + " requires x > 0");
}

}  // namespace detail

inline double log_cdf(const EgwgParams& p, double x) {
  p.validate();
  detail::require_nonnegative(x, "cdf");
  if (x == 0.0) return -std::numeric_limits<double>::infinity();
  return detail::log_cdf_from_log_z(p, detail::log_z(p, std::log(x)));
}

inline Probability cdf(const EgwgParams& p, double x) {
  const double lf = log_cdf(p, x);
  return Probability(std::min(1.0, std::exp(lf)));
}

inline double log_survival(const EgwgParams& p, double x) {
  p.validate();
  detail::require_nonnegative(x, "survival");
  if (x == 0.0) return 0.0;
  return detail::log_survival_from_log_z(p, detail::log_z(p, std::log(x)));
}

/// R(x) = 1 - F(x), evaluated as -expm1(log F) so it keeps full precision near 1.
inline Probability survival(const EgwgParams& p, double x) {
  p.validate();
  detail::require_nonnegative(x, "survival");
  if (x == 0.0) return Probability(1.0);
  const double lz = detail::log_z(p, std::log(x));
  const double lf = detail::log_cdf_from_log_z(p, lz);
  return Probability(std::min(1.0, -std::expm1(lf)));
}

/// Log density at x = exp(log_x). Accepts arguments far below the smallest
/// representable double, which quadrature in log-x coordinates relies on.
inline double log_pdf_at_log(const EgwgParams& p, double log_x) {
  p.validate();
  if (std::isnan(log_x)) throw DomainError("log_pdf_at_log requires a finite log x");
  return detail::log_pdf_from_log_x(p, log_x);
}

inline double log_pdf(const EgwgParams& p, double x) {
  p.validate();
  detail::require_positive(x, "pdf");
  return detail::log_pdf_from_log_x(p, std::log(x));
}

inline double quantile(const EgwgParams& p, Probability q);

inline double pdf(const EgwgParams& p, double x) {
  const double lp = log_pdf(p, x);
  if (lp > std::log(std::numeric_limits<double>::max())) {
    // theta < 1 singularity at the origin: clamp to the 1e-300 quantile.
    double floor_x = std::numeric_limits<double>::min();
    try {
      floor_x = quantile(p, Probability(1e-300));
    } catch (const OutOfRange&) {
    }
    if (x < floor_x) return std::exp(std::min(log_pdf(p, floor_x), std::log(std::numeric_limits<double>::max())));
    return std::numeric_limits<double>::max();
  }
  return std::exp(lp);
}

namespace detail {

/// Largest x with z(x) representable; beyond it the survival function is 0 even in log space.
inline double right_tail_limit(const EgwgParams& p) {
  const double target = std::log(std::numeric_limits<double>::max());
  auto g = [&](double x) { return log_z(p, std::log(x)); };
  RootConfig cfg;
  cfg.x_tol = std::numeric_limits<double>::min();
  try {
    return find_root_increasing(g, target, cfg);
  } catch (const OutOfRange&) {
    return std::numeric_limits<double>::max();
  }
}

}  // namespace detail

/// h(x) = f(x) / R(x), computed as exp(log f - log R).
inline double hazard(const EgwgParams& p, double x) {
  p.validate();
  detail::require_positive(x, "hazard");
  const double lz = detail::log_z(p, std::log(x));
  const double lr = detail::log_survival_from_log_z(p, lz);
  if (!std::isfinite(lr)) {
    const double limit = detail::right_tail_limit(p);
    throw TailError("survival underflows at x = " + std::to_string(x) +
                        "; largest representable x is " + std::to_string(limit),
                    limit);
  }
  return std::exp(detail::log_pdf_from_log_x(p, std::log(x)) - lr);
}

/// r(x) = f(x) / F(x).
inline double reversed_hazard(const EgwgParams& p, double x) {
  p.validate();
  detail::require_positive(x, "reversed_hazard");
  const double lz = detail::log_z(p, std::log(x));
  const double lf = detail::log_cdf_from_log_z(p, lz);
  if (!std::isfinite(lf)) throw TailError("cdf underflows at x = " + std::to_string(x), x);
  return std::exp(detail::log_pdf_from_log_x(p, std::log(x)) - lf);
}

/// Solves x^b (exp(c x^d) - 1) = -log(1 - q^{1/theta}) / a for x.
inline double quantile(const EgwgParams& p, Probability q) {
  p.validate();
  if (q.value() == 0.0) return 0.0;
  if (q.value() >= 1.0) throw DomainError("quantile requires q < 1");

  const double lv = std::log(q.value()) / p.theta;  // log q^{1/theta}
  double log_target;
  if (lv < -700.0) {
    log_target = lv;  // -log(1 - v) = v (1 + v/2 + ...)
  } else {
    const double inner = lv < -1.0 ? std::log1p(-std::exp(lv)) : std::log(-std::expm1(lv));
    log_target = std::log(-inner);
  }
  log_target -= std::log(p.a);

  auto g = [&](double x) {
    const double lx = std::log(x);
    return p.b * lx + detail::log_expm1_from_log(std::log(p.c) + p.d * lx);
  };
  RootConfig cfg;
  cfg.x_tol = std::numeric_limits<double>::min();
  cfg.max_iterations = 400;
  return find_root_increasing(g, log_target, cfg);
}

inline double median(const EgwgParams& p) { return quantile(p, Probability(0.5)); }

struct Mode {
  /// True when the density's supremum is approached as x -> 0+.
  bool at_boundary = false;
  /// The interior maximizer, or 0 for a boundary mode.
  double x = 0.0;
};

/// Maximizes log f on a 512-point log grid spanning the 1e-6 and 1 - 1e-6
/// quantiles, then refines by golden-section search in log x.
inline Mode mode(const EgwgParams& p) {
  p.validate();
  constexpr int kGrid = 512;
  const double lo = quantile(p, Probability(1e-6));
  const double hi = quantile(p, Probability(1.0 - 1e-6));
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  auto lpdf = [&](double lx) { return detail::log_pdf_from_log_x(p, lx); };

  std::vector<double> grid(kGrid);
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kGrid; ++i) {
    grid[i] = llo + (lhi - llo) * i / (kGrid - 1);
    const double v = lpdf(grid[i]);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }

  double left, right;
  if (best == 0) {
    const double probe = llo - std::log(1e3);
    if (lpdf(probe) >= best_val) return {true, 0.0};
    left = probe;
    right = grid[1];
  } else {
    left = grid[best - 1];
    right = best + 1 < kGrid ? grid[best + 1] : grid[best];
  }

  const double bracket_lo = left;
  const double bracket_hi = right;
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = right - inv_phi * (right - left);
  double x2 = left + inv_phi * (right - left);
  double f1 = lpdf(x1);
  double f2 = lpdf(x2);
  for (int it = 0; it < 200 && (right - left) > 1e-13 * std::max(1.0, std::abs(left)); ++it) {
    if (f1 >= f2) {
      right = x2;
      x2 = x1;
      f2 = f1;
      x1 = right - inv_phi * (right - left);
      f1 = lpdf(x1);
    } else {
      left = x1;
      x1 = x2;
      f1 = f2;
      x2 = left + inv_phi * (right - left);
      f2 = lpdf(x2);
    }
  }
  // Golden section resolves the maximizer only to ~sqrt(eps); finish by
  // bisecting the sign of the central-difference slope.
  auto slope = [&](double s) {
    const double h = 1e-6 * std::max(1.0, std::abs(s));
    return lpdf(s + h) - lpdf(s - h);
  };
  double sl = bracket_lo;
  double sr = bracket_hi;
  if (slope(sl) > 0.0 && slope(sr) < 0.0) {
    for (int it = 0; it < 100 && sr - sl > 4e-16 * std::max(1.0, std::abs(sl)); ++it) {
      const double mid = 0.5 * (sl + sr);
      (slope(mid) > 0.0 ? sl : sr) = mid;
    }
    if (lpdf(0.5 * (sl + sr)) >= lpdf(0.5 * (left + right))) {
      left = sl;
      right = sr;
    }
  }
  const double lx = 0.5 * (left + right);
  if (best == 0 && lpdf(llo - std::log(1e3)) >= lpdf(lx)) return {true, 0.0};
  return {false, std::exp(lx)};
}

/// SplitMix64 (Steele, Lea and Flood). Its constants are part of the sampling
/// contract: the same seed gives the same stream on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on the open interval (0, 1): ((k >> 11) + 0.5) * 2^-53.
  double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// n inverse-transform draws x_i = quantile(p, u_i), u_i from SplitMix64(seed).
inline std::vector<double> sample(const EgwgParams& p, std::size_t n, std::uint64_t seed) {
  p.validate();
  if (n < 1) throw DomainError("sample requires n >= 1");
  SplitMix64 rng(seed);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(quantile(p, Probability(rng.uniform())));
  return out;
}

}  // namespace egwg
