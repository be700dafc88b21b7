// egwg: fit, compare, evaluate and sample the EGWGD family from the shell.
//
// Exit codes: 0 success, 1 usage or input error, 2 a fit did not converge.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "egwg/curves.hpp"
#include "egwg/estimation.hpp"
#include "egwg/gof.hpp"
#include "egwg/io.hpp"
#include "egwg/reliability.hpp"
#include "egwg/submodels.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kNotConverged = 2;

// Where a law's parameters come from: a JSON object (inline or @file), a
// named sub-model with its own parameter list, or the five scalar flags.
struct ParamSource {
  std::string json;
  std::string submodel;
  std::vector<double> sub_params;
  std::optional<double> a, b, c, d, theta;

  void add_to(CLI::App* cmd, const std::string& prefix = "") {
    const std::string p = prefix.empty() ? "" : prefix + "-";
    cmd->add_option("--" + p + "params", json, "JSON object {\"a\",\"b\",\"c\",\"d\",\"theta\"}, @file, or a fit result");
    cmd->add_option("--" + p + "submodel", submodel, "sub-model name, e.g. gompertz, chen, epd");
    cmd->add_option("--" + p + "sub-params", sub_params, "sub-model parameters, comma separated")->delimiter(',');
    cmd->add_option("--" + p + "a", a);
    cmd->add_option("--" + p + "b", b);
    cmd->add_option("--" + p + "c", c);
    cmd->add_option("--" + p + "d", d);
    cmd->add_option("--" + p + "theta", theta);
  }

  bool given() const { return !json.empty() || !submodel.empty() || a || b || c || d || theta; }

  egwg::EgwgParams resolve() const {
    egwg::EgwgParams p;
    if (!json.empty()) {
      std::string text = json;
      if (text.front() == '@') {
        std::ifstream in(text.substr(1));
        if (!in) throw egwg::InputError("cannot read parameter file '" + text.substr(1) + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
      }
      const auto j = egwg::io::parse_json(text);
      p = egwg::io::params_from_json_value(j.contains("params") ? j.at("params") : j);
    } else if (!submodel.empty()) {
      const auto name = egwg::parse_model_name(submodel);
      const auto kind = name ? egwg::as_submodel(*name) : std::nullopt;
      if (!kind) throw egwg::InputError("'" + submodel + "' is not an embeddable sub-model");
      p = egwg::embed({*kind, sub_params});
    } else {
      if (!(a && b && c && d && theta)) throw egwg::InputError("give --params, --submodel, or all of --a --b --c --d --theta");
      p = {*a, *b, *c, *d, *theta};
    }
    p.validate();
    return p;
  }
};

egwg::QuadratureConfig quad_config() {
  egwg::QuadratureConfig cfg;
  if (const char* env = std::getenv("EGWG_QUAD_RTOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0)) throw egwg::InputError(std::string("bad EGWG_QUAD_RTOL '") + env + "'");
    cfg.rel_tol = v;
  }
  return cfg;
}

void emit(const std::string& text, const std::string& out_path) {
  std::cout << text;
  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw egwg::InputError("cannot write '" + out_path + "'");
    f << text;
  }
}

struct FitOptions {
  int restarts = 8;
  int max_iterations = 500;
  double level = 0.95;
  std::vector<double> lower, upper;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--restarts", restarts, "EGWGD restarts (at most 8)")->capture_default_str();
    cmd->add_option("--max-iter", max_iterations, "iterations per restart")->capture_default_str();
    cmd->add_option("--level", level, "confidence level of the Wald intervals")->capture_default_str();
    cmd->add_option("--lower", lower, "lower box bounds for a,b,c,d")->delimiter(',')->expected(4);
    cmd->add_option("--upper", upper, "upper box bounds for a,b,c,d")->delimiter(',')->expected(4);
  }

  egwg::FitConfig config() const {
    egwg::FitConfig cfg;
    cfg.restarts = restarts;
    cfg.max_iterations = max_iterations;
    cfg.level = egwg::Probability(level);
    for (std::size_t i = 0; i < lower.size(); ++i) cfg.lower[i] = lower[i];
    for (std::size_t i = 0; i < upper.size(); ++i) cfg.upper[i] = upper[i];
    cfg.validate();
    return cfg;
  }
};

// A fitted model of either family, with its JSON artifact.
struct AnyFit {
  egwg::FittedModel model;
  std::string json;
  bool converged;
};

AnyFit fit_named(const std::string& name, const egwg::Dataset& data, const FitOptions& opt) {
  const auto m = egwg::parse_model_name(name);
  if (!m) throw egwg::InputError("unknown model '" + name + "'");
  if (*m == egwg::ModelName::EGWGD) {
    const auto r = egwg::fit(data, opt.config());
    return {egwg::fitted_model(r), egwg::io::fit_json(r), r.converged};
  }
  if (const auto kind = egwg::as_competitor(*m)) {
    const auto r = egwg::fit_competitor(*kind, data);
    return {egwg::fitted_model(r), egwg::io::competitor_fit_json(r), r.converged};
  }
  throw egwg::InputError("fitting is available for egwgd, ed, ged, gd, iw, giw and egiw, not '" + name + "'");
}

// Competitor artifacts carry only a covariance; their intervals are derived here.
std::string human_fit(const std::string& json, double level) {
  const auto j = egwg::io::parse_json(json);
  std::ostringstream o;
  o << "model " << j.at("model").get<std::string>() << "   -L "
    << egwg::io::human(j.at("neg_loglik").get<double>()) << "\n";
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-6s %11s %11s %11s\n", "param", "estimate", "lower", "upper");
  o << buf;
  const auto& cov = j.at("covariance");
  std::size_t i = 0;
  const std::size_t k = j.at("params").size();
  for (const auto& [key, value] : j.at("params").items()) {
    std::string lo = "nan", hi = "nan";
    if (j.contains("intervals")) {
      const auto& iv = j.at("intervals").at(key);
      if (!iv.at("lo").is_null()) lo = egwg::io::human(iv.at("lo").get<double>());
      if (!iv.at("hi").is_null()) hi = egwg::io::human(iv.at("hi").get<double>());
    } else if (!cov.at(i * k + i).is_null()) {
      try {
        const auto iv = egwg::wald_interval(value.get<double>(), cov.at(i * k + i).get<double>(), egwg::Probability(level));
        lo = egwg::io::human(iv.lo);
        hi = egwg::io::human(iv.hi);
      } catch (const egwg::DegenerateInformation&) {
      }
    }
    std::snprintf(buf, sizeof buf, "%-6s %11s %11s %11s\n", key.c_str(), egwg::io::human(value.get<double>()).c_str(),
                  lo.c_str(), hi.c_str());
    o << buf;
    ++i;
  }
  if (j.contains("active_bounds") && !j.at("active_bounds").empty()) {
    o << "on bounds:";
    for (const auto& b : j.at("active_bounds")) o << " " << b.get<std::string>();
    o << "\n";
  }
  o << (j.at("converged").get<bool>() ? "converged\n" : "NOT converged\n");
  return o.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EGWGD lifetime distribution toolkit"};
  app.require_subcommand(1);

  std::string data_src, model = "egwgd", out_path;
  std::vector<std::string> models;
  bool human = false, with_mrl = false;
  FitOptions fit_opt;
  ParamSource params, repair;
  double lo = 0.0, hi = 0.0;
  std::size_t count = 0;
  std::string spacing = "linear";
  long long n_draws = 0;
  std::uint64_t seed = 0;
  std::vector<double> ts, xs;

  auto* fit_cmd = app.add_subcommand("fit", "maximum likelihood fit of one model");
  fit_cmd->add_option("--data", data_src, "dataset file or fixture name (aarset)")->required();
  fit_cmd->add_option("--model", model, "model name")->capture_default_str();
  fit_cmd->add_option("--out", out_path, "also write the JSON here");
  fit_cmd->add_flag("--human", human, "print a readable table instead of JSON");
  fit_opt.add_to(fit_cmd);

  auto* cmp_cmd = app.add_subcommand("compare", "fit several models and tabulate K-S, -L, AIC, CAIC, BIC");
  cmp_cmd->add_option("--data", data_src, "dataset file or fixture name (aarset)")->required();
  cmp_cmd->add_option("--models", models, "comma separated model names")->delimiter(',')->required();
  cmp_cmd->add_option("--out", out_path, "also write the CSV here");
  cmp_cmd->add_flag("--human", human, "print a readable table instead of CSV");
  fit_opt.add_to(cmp_cmd);

  auto* curves_cmd = app.add_subcommand("curves", "tabulate pdf, cdf, survival, hazard (and mrl) on a grid");
  params.add_to(curves_cmd);
  curves_cmd->add_option("--lo", lo, "first grid point (> 0)")->required();
  curves_cmd->add_option("--hi", hi, "last grid point")->required();
  curves_cmd->add_option("--count", count, "number of grid points (>= 2)")->required();
  curves_cmd->add_option("--spacing", spacing, "linear or log")->capture_default_str();
  curves_cmd->add_flag("--mrl", with_mrl, "add the mean residual life column");
  curves_cmd->add_option("--out", out_path, "also write the CSV here");

  auto* sample_cmd = app.add_subcommand("sample", "draw a seeded random sample");
  params.add_to(sample_cmd);
  sample_cmd->add_option("--n", n_draws, "sample size (>= 1)")->required();
  sample_cmd->add_option("--seed", seed, "random seed")->capture_default_str();
  sample_cmd->add_option("--out", out_path, "also write the values here");

  auto* rel_cmd = app.add_subcommand("reliability", "MTTF and, with a repair law, MTTR, MTBF, availability");
  params.add_to(rel_cmd);
  repair.add_to(rel_cmd, "repair");
  rel_cmd->add_option("--t", ts, "times for mrl, mpl and maintainability")->delimiter(',');
  rel_cmd->add_option("--out", out_path, "also write the JSON here");

  auto* eval_cmd = app.add_subcommand("eval", "pdf, cdf, survival and hazard at given points");
  params.add_to(eval_cmd);
  eval_cmd->add_option("--x", xs, "points (> 0), comma separated")->delimiter(',')->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    const egwg::QuadratureConfig qcfg = quad_config();

    if (*fit_cmd) {
      const auto data = egwg::io::load_dataset(data_src);
      const auto r = fit_named(model, data, fit_opt);
      emit(human ? human_fit(r.json, fit_opt.level) : r.json + "\n", out_path);
      if (!r.converged) {
        std::cerr << "egwg: the fit did not converge; the output is the best point found\n";
        return kNotConverged;
      }
      return kOk;
    }

    if (*cmp_cmd) {
      if (models.empty()) throw egwg::InputError("--models needs at least one model");
      const auto data = egwg::io::load_dataset(data_src);
      std::vector<egwg::FittedModel> fitted;
      bool all_converged = true;
      for (const auto& name : models) {
        auto r = fit_named(name, data, fit_opt);
        if (!r.converged) {
          all_converged = false;
          std::cerr << "egwg: the " << name << " fit did not converge\n";
        }
        fitted.push_back(std::move(r.model));
      }
      const auto table = egwg::compare(data, fitted);
      emit(human ? egwg::io::human_comparison_table(table) : egwg::io::comparison_csv(table), out_path);
      return all_converged ? kOk : kNotConverged;
    }

    if (*curves_cmd) {
      const auto sp = egwg::parse_spacing(spacing);
      if (!sp) throw egwg::InputError("--spacing must be linear or log");
      const auto grid = egwg::curve_grid(params.resolve(), {lo, hi, count, *sp}, with_mrl, qcfg);
      emit(egwg::io::curves_csv(grid.rows, with_mrl), out_path);
      return kOk;
    }

    if (*sample_cmd) {
      if (n_draws < 1) throw egwg::InputError("--n must be at least 1");
      const auto p = params.resolve();
      emit(egwg::io::sample_lines(egwg::sample(p, static_cast<std::size_t>(n_draws), seed)), out_path);
      return kOk;
    }

    if (*rel_cmd) {
      const auto p = params.resolve();
      const std::optional<egwg::EgwgParams> rp = repair.given() ? std::optional(repair.resolve()) : std::nullopt;
      emit(egwg::io::reliability_json(egwg::reliability_summary(p, rp, ts, qcfg)) + "\n", out_path);
      return kOk;
    }

    if (*eval_cmd) {
      const auto p = params.resolve();
      std::vector<egwg::CurveRow> rows;
      for (double x : xs) {
        if (!(x > 0.0)) throw egwg::InputError("--x values must be positive");
        rows.push_back({x, egwg::pdf(p, x), egwg::cdf(p, x), egwg::survival(p, x), egwg::hazard(p, x), std::nullopt});
      }
      std::cout << egwg::io::curves_csv(rows, false);
      return kOk;
    }
  } catch (const egwg::Error& e) {
    std::cerr << "egwg: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
