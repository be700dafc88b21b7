// Acceptance criteria: one PASS/FAIL line per criterion. Exits non-zero when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "egwg/curves.hpp"
#include "egwg/estimation.hpp"
#include "egwg/fixtures.hpp"
#include "egwg/gof.hpp"
#include "egwg/reliability.hpp"
#include "egwg/submodels.hpp"

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using egwg::CompetitorKind;
using egwg::EgwgParams;
using egwg::Probability;

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

bool near(double got, double want, double tol) { return std::abs(got - want) <= tol; }

const egwg::Dataset& aarset() {
  static const egwg::Dataset d(egwg::fixtures::aarset());
  return d;
}

const egwg::FitResult& aarset_fit() {
  static const egwg::FitResult r = egwg::fit(aarset());
  return r;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Sign changes of consecutive first differences, and the direction of the first one.
struct Turns {
  int changes = 0;
  int first = 0;  // -1 falling, +1 rising
};

Turns turns(const std::vector<double>& v) {
  Turns t;
  int prev = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const int s = v[i] > v[i - 1] ? 1 : (v[i] < v[i - 1] ? -1 : 0);
    if (s == 0) continue;
    if (prev == 0) t.first = s;
    if (prev != 0 && s != prev) ++t.changes;
    prev = s;
  }
  return t;
}

std::vector<double> curve(const EgwgParams& p, const std::vector<double>& xs, double (*f)(const EgwgParams&, double)) {
  std::vector<double> out;
  for (double x : xs) out.push_back(f(p, x));
  return out;
}

std::vector<EgwgParams> random_params(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto log_uniform = [&](double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
  };
  std::uniform_real_distribution<double> b_dist(0.0, 3.0);
  std::vector<EgwgParams> out;
  for (int i = 0; i < count; ++i)
    out.push_back({log_uniform(1e-5, 1.0), b_dist(rng), log_uniform(0.01, 2.0), log_uniform(0.2, 3.0),
                   log_uniform(0.1, 5.0)});
  return out;
}

// Points where c x_max^d and a x_max^b stay moderate, so every likelihood term is regular.
std::vector<EgwgParams> data_scaled_params(const egwg::Dataset& data, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double xmax = data.values().back();
  std::vector<EgwgParams> out;
  for (int i = 0; i < count; ++i) {
    EgwgParams p;
    p.b = 0.1 + 1.9 * u(rng);
    p.d = 0.3 + 1.7 * u(rng);
    p.c = std::exp(std::log(0.1) + std::log(50.0) * u(rng)) / std::pow(xmax, p.d);
    p.a = std::exp(std::log(1e-3) + std::log(1e3) * u(rng)) / std::pow(xmax, p.b);
    p.theta = 0.2 + 2.8 * u(rng);
    out.push_back(p);
  }
  return out;
}

// Integral of g(x) over (0, inf) in s = log x around the median.
double log_space_integral(const EgwgParams& p, const std::function<double(double)>& log_g) {
  const double center = std::log(egwg::median(p));
  egwg::QuadratureConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 1e-14;
  cfg.max_subdivisions = 5000;
  return egwg::integrate(
      [&](double t) {
        const double s = center + t;
        const double x = std::exp(s);
        if (x == 0.0 || !std::isfinite(x)) return 0.0;
        return std::exp(log_g(x) + s);
      },
      -kInf, kInf, cfg, 10.0);
}

Check exponential_row() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const auto fit = egwg::fit_competitor(CompetitorKind::ED, aarset());
  const auto g = egwg::gof_report(egwg::fitted_model(fit), aarset());
  const double secs = seconds_since(t0);
  c.require(near(fit.spec.params[0], 0.0219, 0.0005), "a " + fmt("%.6g", fit.spec.params[0]));
  c.require(near(g.neg_loglik, 241.09, 0.05), "-L " + fmt("%.6g", g.neg_loglik));
  c.require(near(g.aic, 484.18, 0.1), "AIC " + fmt("%.6g", g.aic));
  c.require(near(g.caic, 484.26, 0.1), "CAIC " + fmt("%.6g", g.caic));
  c.require(near(g.bic, 486.09, 0.1), "BIC " + fmt("%.6g", g.bic));
  c.require(near(g.ks, 0.191, 0.005), "K-S " + fmt("%.6g", g.ks));
  c.require(secs < 1.0, "runtime " + fmt("%.3g", secs) + " s");
  if (c.ok)
    c.detail = "a=" + fmt("%.5f", fit.spec.params[0]) + " -L=" + fmt("%.3f", g.neg_loglik) + " AIC=" +
               fmt("%.3f", g.aic) + " CAIC=" + fmt("%.3f", g.caic) + " BIC=" + fmt("%.3f", g.bic) +
               " K-S=" + fmt("%.4f", g.ks) + " (" + fmt("%.3f", secs) + " s)";
  return c;
}

Check gompertz_and_generalized_exponential_rows() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const double gd_printed = -egwg::competitor_loglik({CompetitorKind::GD, {0.011, 0.018}}, aarset());
  const double ged_printed = -egwg::competitor_loglik({CompetitorKind::GED, {0.021, 0.902}}, aarset());
  const auto gd = egwg::fit_competitor(CompetitorKind::GD, aarset());
  const auto ged = egwg::fit_competitor(CompetitorKind::GED, aarset());
  const double secs = seconds_since(t0);
  c.require(near(gd_printed, 235.39, 0.75), "GD -L at printed MLE " + fmt("%.6g", gd_printed));
  c.require(near(ged_printed, 240.36, 0.75), "GED -L at printed MLE " + fmt("%.6g", ged_printed));
  c.require(-gd.loglik <= 235.39 + 0.1, "GD fit -L " + fmt("%.6g", -gd.loglik));
  c.require(-ged.loglik <= 240.36 + 0.1, "GED fit -L " + fmt("%.6g", -ged.loglik));
  c.require(secs < 5.0, "runtime " + fmt("%.3g", secs) + " s");
  if (c.ok)
    c.detail = "printed MLE -L: GD " + fmt("%.3f", gd_printed) + ", GED " + fmt("%.3f", ged_printed) +
               "; fitted -L: GD " + fmt("%.3f", -gd.loglik) + ", GED " + fmt("%.3f", -ged.loglik) + " (" +
               fmt("%.3f", secs) + " s)";
  return c;
}

Check egwgd_row() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const egwg::FitResult r = egwg::fit(aarset());
  const double secs = seconds_since(t0);
  const double ks = egwg::gof_report(egwg::fitted_model(r), aarset()).ks;
  c.require(r.restarts_used == 8, "restarts " + std::to_string(r.restarts_used));
  c.require(-r.loglik <= 229.5, "-L " + fmt("%.6g", -r.loglik));
  c.require(ks <= 0.15, "K-S " + fmt("%.6g", ks));
  c.require(secs < 60.0, "runtime " + fmt("%.3g", secs) + " s");
  if (c.ok)
    c.detail = "-L=" + fmt("%.3f", -r.loglik) + " K-S=" + fmt("%.4f", ks) + " with 8 restarts (" +
               fmt("%.3f", secs) + " s)";
  return c;
}

Check information_criteria_cells() {
  Check c;
  struct Row {
    const char* name;
    double neg_loglik;
    int k;
    double aic, caic, bic;
  };
  const Row rows[] = {{"ED", 241.09, 1, 484.18, 484.26, 486.09},
                      {"GED", 240.36, 2, 484.72, 484.96, 488.54},
                      {"GD", 235.39, 2, 474.78, 475.024, 478.60}};
  double worst = 0.0;
  for (const auto& r : rows) {
    const auto ic = egwg::info_criteria(r.neg_loglik, r.k, 50);
    for (const auto& [got, want, label] : {std::tuple{ic.aic, r.aic, "AIC"}, std::tuple{ic.caic, r.caic, "CAIC"},
                                           std::tuple{ic.bic, r.bic, "BIC"}}) {
      worst = std::max(worst, std::abs(got - want));
      c.require(near(got, want, 0.02), std::string(r.name) + " " + label + " " + fmt("%.6g", got));
    }
  }
  if (c.ok) c.detail = "worst cell deviation " + fmt("%.4f", worst);
  return c;
}

Check confidence_interval() {
  Check c;
  const auto iv = egwg::wald_interval(0.000085, 5.854e-10, Probability(0.95));
  // The printed endpoints are cut, not rounded, to six decimals.
  const double lo = std::trunc(iv.lo * 1e6), hi = std::trunc(iv.hi * 1e6);
  c.require(lo == 37.0, "lower " + fmt("%.9f", iv.lo));
  c.require(hi == 132.0, "upper " + fmt("%.9f", iv.hi));
  if (c.ok) c.detail = "[" + fmt("%.9f", iv.lo) + ", " + fmt("%.9f", iv.hi) + "]";
  return c;
}

Check property_suite() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const auto params = random_params(25, 97);

  double worst_mass = 0.0;
  for (const auto& p : params)
    worst_mass = std::max(worst_mass,
                          std::abs(log_space_integral(p, [&](double x) { return egwg::log_pdf(p, x); }) - 1.0));
  c.require(worst_mass <= 1e-7, "pdf normalization " + fmt("%.3g", worst_mass));

  double worst_q = 0.0;
  for (const auto& p : params)
    for (int k = 1; k <= 99; ++k) {
      const double q = k / 100.0;
      worst_q = std::max(worst_q, std::abs(egwg::cdf(p, egwg::quantile(p, Probability(q))).value() - q));
    }
  c.require(worst_q <= 1e-9, "quantile round trip " + fmt("%.3g", worst_q));

  double worst_grad = 0.0;
  const egwg::Dataset sim1(egwg::sample({0.3, 0.6, 0.4, 1.2, 1.5}, 200, 21));
  const egwg::Dataset sim2(egwg::sample({0.001, 0.5, 0.3, 0.8, 0.5}, 300, 22));
  std::uint64_t seed = 100;
  for (const egwg::Dataset* data : {&aarset(), &sim1, &sim2}) {
    for (const auto& p : data_scaled_params(*data, 30, seed++)) {
      const auto g = egwg::loglik_grad(p, *data);
      const auto v = egwg::to_vector(p);
      for (int i = 0; i < 5; ++i) {
        const double h = 1e-4 * v[i];
        auto at = [&](double step) {
          auto w = v;
          w[i] += step;
          return egwg::loglik(egwg::from_vector(w), *data);
        };
        const double fd = (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h);
        worst_grad = std::max(worst_grad, std::abs(g[i] - fd) / std::max({std::abs(g[i]), std::abs(fd), 1e-3}));
      }
    }
  }
  c.require(worst_grad <= 1e-5, "gradient vs differences " + fmt("%.3g", worst_grad));

  double worst_sub = 0.0;
  const double a = 0.4, cc = 0.6, d = 1.7, th = 2.2;
  for (double x : {0.05, 0.4, 1.0, 2.5}) {
    const double gomp = -std::expm1(-a * std::expm1(cc * x));
    const double epd = -std::expm1(-a * std::expm1(cc * std::pow(x, d)));
    const double chen = -std::expm1(-a * std::expm1(std::pow(x, d)));
    const std::pair<egwg::SubModelSpec, double> cases[] = {
        {{egwg::SubModelKind::GD, {a, cc}}, gomp},
        {{egwg::SubModelKind::GGD, {a, cc, th}}, std::pow(gomp, th)},
        {{egwg::SubModelKind::EPD, {a, d, cc}}, epd},
        {{egwg::SubModelKind::GEPD, {a, d, cc, th}}, std::pow(epd, th)},
        {{egwg::SubModelKind::ChenExt, {a, d}}, chen}};
    for (const auto& [spec, want] : cases)
      worst_sub = std::max(worst_sub, std::abs(egwg::cdf(egwg::embed(spec), x).value() - want));
  }
  c.require(worst_sub <= 1e-12, "sub-model reductions " + fmt("%.3g", worst_sub));

  double worst_os = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    const auto& p = params[i];
    for (auto [k, n] : {std::pair<std::size_t, std::size_t>{1, 5}, {3, 5}, {5, 5}})
      worst_os = std::max(
          worst_os, std::abs(log_space_integral(p, [&](double x) { return egwg::log_order_stat_pdf(p, k, n, x); }) - 1.0));
  }
  c.require(worst_os <= 1e-7, "order statistic normalization " + fmt("%.3g", worst_os));

  double worst_av = 0.0, worst_mrl = 0.0;
  for (std::size_t i = 0; i < 10; ++i) {
    const auto& p = params[i];
    worst_av = std::max(worst_av, std::abs(egwg::availability({p, p}).value() - 0.5));
    const double m = egwg::mttf(p);
    worst_mrl = std::max(worst_mrl, std::abs(egwg::mean_residual_life(p, 0.0) - m) / m);
  }
  c.require(worst_av == 0.0, "availability " + fmt("%.3g", worst_av));
  c.require(worst_mrl <= 1e-8, "mrl(0) vs mean " + fmt("%.3g", worst_mrl));

  const double secs = seconds_since(t0);
  c.require(secs < 300.0, "runtime " + fmt("%.3g", secs) + " s");
  if (c.ok)
    c.detail = "mass " + fmt("%.2g", worst_mass) + ", quantile " + fmt("%.2g", worst_q) + ", gradient " +
               fmt("%.2g", worst_grad) + ", reductions " + fmt("%.2g", worst_sub) + ", order stats " +
               fmt("%.2g", worst_os) + ", availability 0.5, mrl(0) " + fmt("%.2g", worst_mrl) + " (" +
               fmt("%.2f", secs) + " s)";
  return c;
}

Check bathtub_hazard() {
  Check c;
  const auto grid = egwg::GridSpec{0.5, 90.0, 180, egwg::Spacing::Linear}.points();
  const auto t = turns(curve(aarset_fit().params, grid, egwg::hazard));
  c.require(t.changes == 1, std::to_string(t.changes) + " direction changes");
  c.require(t.first == -1, "hazard does not start falling");
  if (c.ok) c.detail = "hazard falls then rises, one interior minimum on 180 points over [0.5, 90]";
  return c;
}

Check simulation_recovery() {
  Check c;
  const EgwgParams truth{0.001, 0.5, 0.3, 0.8, 0.5};
  const egwg::Dataset data(egwg::sample(truth, 2000, 11));
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = egwg::fit(data);
  const double secs = seconds_since(t0);

  const auto want = egwg::to_vector(truth), got = egwg::to_vector(r.params);
  std::string rel;
  bool recovered = true;
  for (int i = 0; i < 5; ++i) {
    const double e = std::abs(got[i] - want[i]) / want[i];
    recovered = recovered && e <= 0.25;
    rel += (i ? "," : "") + fmt("%.0f%%", 100.0 * e);
  }
  const double truth_ll = egwg::loglik(truth, data);
  c.require(recovered, "component errors " + rel + " exceed 25%");
  c.require(truth_ll <= r.loglik, "truth likelihood above the fit");

  const auto xs = egwg::GridSpec{0.01, 10.0, 400, egwg::Spacing::Log}.points();
  const EgwgParams decreasing_pdf{1.0, 0.5, 0.1, 1.0, 0.5}, unimodal_pdf{0.05, 2.0, 0.1, 1.2, 2.0};
  const EgwgParams rising{0.3, 0.0, 0.7, 1.0, 1.0}, falling{1.0, 0.5, 0.001, 0.5, 0.5};
  const auto pd = turns(curve(decreasing_pdf, xs, egwg::pdf)), pu = turns(curve(unimodal_pdf, xs, egwg::pdf));
  const auto hr = turns(curve(rising, xs, egwg::hazard)), hf = turns(curve(falling, xs, egwg::hazard));
  const auto hb = turns(curve(aarset_fit().params, egwg::GridSpec{0.5, 90.0, 180, egwg::Spacing::Linear}.points(),
                              egwg::hazard));
  c.require(pd.changes == 0 && pd.first == -1, "decreasing pdf not exhibited");
  c.require(pu.changes == 1 && pu.first == 1, "unimodal pdf not exhibited");
  c.require(hr.changes == 0 && hr.first == 1, "increasing hazard not exhibited");
  c.require(hf.changes == 0 && hf.first == -1, "decreasing hazard not exhibited");
  c.require(hb.changes == 1 && hb.first == -1, "bathtub hazard not exhibited");

  const std::string summary = "fit -L " + fmt("%.3f", -r.loglik) + " vs truth " + fmt("%.3f", -truth_ll) +
                              (recovered ? ", component errors " + rel : "") + ", shape classes checked (" +
                              fmt("%.2f", secs) + " s)";
  c.detail = c.ok ? summary : c.detail + "; " + summary;
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Check (*run)();
  };
  const Criterion criteria[] = {
      {"exponential row", exponential_row},
      {"Gompertz and generalized exponential rows", gompertz_and_generalized_exponential_rows},
      {"EGWGD row", egwgd_row},
      {"information criteria cells", information_criteria_cells},
      {"confidence interval for a", confidence_interval},
      {"property suite", property_suite},
      {"bathtub hazard at the Aarset fit", bathtub_hazard},
      {"simulation recovery and shape classes", simulation_recovery},
  };
  int failures = 0;
  int id = 1;
  for (const auto& cr : criteria) {
    Check c;
    try {
      c = cr.run();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    if (!c.ok) ++failures;
    std::printf("%s %d %s: %s\n", c.ok ? "PASS" : "FAIL", id++, cr.name, c.detail.c_str());
  }
  return failures == 0 ? 0 : 1;
}
