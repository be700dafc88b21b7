#pragma once

// Kolmogorov-Smirnov statistic, information criteria and model comparison.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "egwg/distribution.hpp"
#include "egwg/errors.hpp"
#include "egwg/estimation.hpp"
#include "egwg/submodels.hpp"

namespace egwg {

struct GofReport {
  double ks = 0.0;
  Probability p_value{1.0};
  double neg_loglik = 0.0;
  double aic = 0.0;
  double caic = 0.0;
  double bic = 0.0;
  int k = 0;
  std::size_t n = 0;
};

/// D_n = sup |F - F_n| against a fitted cdf. Tied observations are visited
/// once, with the empirical cdf just below and at the value.
template <class Cdf>
double ks_statistic(Cdf&& cdf_fn, const Dataset& data) {
  const auto& xs = data.values();
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size();) {
    std::size_t j = i;
    while (j < xs.size() && xs[j] == xs[i]) ++j;
    const double f = static_cast<double>(cdf_fn(xs[i]));
    d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(f - static_cast<double>(j) / n)});
    i = j;
  }
  return d;
}

/// Asymptotic Kolmogorov tail 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2) at the
/// Stephens-corrected lambda = (sqrt n + 0.12 + 0.11 / sqrt n) d.
inline Probability ks_pvalue(double d, std::size_t n) {
  if (!(d >= 0.0 && d <= 1.0)) throw DomainError("K-S statistic outside [0, 1]");
  if (n == 0) throw DomainError("K-S p-value needs n >= 1");
  const double rn = std::sqrt(static_cast<double>(n));
  const double lambda = (rn + 0.12 + 0.11 / rn) * d;
  // Below 0.2 the lower tail is under 1e-26, and the series needs ever more terms.
  if (lambda < 0.2) return Probability(1.0);
  double sum = 0.0;
  for (int k = 1;; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-12) break;
  }
  return Probability(std::clamp(2.0 * sum, 0.0, 1.0));
}

struct InfoCriteria {
  double aic;
  /// Small-sample corrected AIC.
  double caic;
  double bic;
};

inline InfoCriteria info_criteria(double neg_loglik, int k, std::size_t n) {
  if (k < 0) throw DomainError("parameter count must be nonnegative");
  const double kk = k, nn = static_cast<double>(n);
  if (!(nn > kk + 1.0))
    throw DomainError("CAIC is undefined for n <= k + 1 (n = " + std::to_string(n) + ", k = " + std::to_string(k) + ")");
  const double aic = 2.0 * kk + 2.0 * neg_loglik;
  return {aic, aic + 2.0 * kk * (kk + 1.0) / (nn - kk - 1.0), kk * std::log(nn) + 2.0 * neg_loglik};
}

/// A model with its fitted parameters, ready for comparison.
struct FittedModel {
  std::string name;
  std::vector<std::pair<std::string, double>> params;
  int k = 0;
  double neg_loglik = 0.0;
  std::function<double(double)> cdf;
};

inline FittedModel fitted_model(const FitResult& fit) {
  const EgwgParams p = fit.params;
  const auto v = to_vector(p);
  FittedModel m{"egwgd", {}, 5, -fit.loglik, [p](double x) { return cdf(p, x).value(); }};
  for (int i = 0; i < 5; ++i) m.params.emplace_back(parameter_order()[i], v[i]);
  return m;
}

inline FittedModel fitted_model(const CompetitorFit& fit) {
  const CompetitorSpec spec = fit.spec;
  const auto names = competitor_param_names(spec.kind);
  FittedModel m{competitor_label(spec.kind), {}, spec.k(), -fit.loglik, [spec](double x) { return competitor_cdf(spec, x).value(); }};
  for (std::size_t i = 0; i < names.size(); ++i) m.params.emplace_back(names[i], spec.params[i]);
  return m;
}

inline GofReport gof_report(const FittedModel& model, const Dataset& data) {
  GofReport r;
  r.ks = ks_statistic(model.cdf, data);
  r.p_value = ks_pvalue(r.ks, data.size());
  r.neg_loglik = model.neg_loglik;
  const auto ic = info_criteria(model.neg_loglik, model.k, data.size());
  r.aic = ic.aic;
  r.caic = ic.caic;
  r.bic = ic.bic;
  r.k = model.k;
  r.n = data.size();
  return r;
}

struct ComparisonRow {
  std::string model;
  std::vector<std::pair<std::string, double>> params;
  GofReport report;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  /// Row indices from best (smallest) to worst; ties keep input order.
  std::vector<std::size_t> by_ks, by_aic, by_caic, by_bic;
};

/// Fills the by_* rankings from the rows.
inline void rank_rows(ComparisonTable& t) {
  auto rank = [&](double GofReport::*field) {
    std::vector<std::size_t> idx(t.rows.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
      return t.rows[i].report.*field < t.rows[j].report.*field;
    });
    return idx;
  };
  t.by_ks = rank(&GofReport::ks);
  t.by_aic = rank(&GofReport::aic);
  t.by_caic = rank(&GofReport::caic);
  t.by_bic = rank(&GofReport::bic);
}

inline ComparisonTable compare(const Dataset& data, const std::vector<FittedModel>& models) {
  ComparisonTable t;
  for (const auto& m : models) t.rows.push_back({m.name, m.params, gof_report(m, data)});
  rank_rows(t);
  return t;
}

}  // namespace egwg
