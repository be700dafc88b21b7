#pragma once

// Special cases of the EGWGD family and the competitor laws used in model
// comparison.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "egwg/distribution.hpp"
#include "egwg/errors.hpp"

namespace egwg {

class NotEmbeddable : public Error {
 public:
  using Error::Error;
};

enum class SubModelKind {
  GWGD,              // (a, b, c, d), theta = 1
  GD,                // (a, c), b = 0, d = 1, theta = 1
  GGD,               // (a, c, theta), b = 0, d = 1
  ExpModWeibullExt,  // (a, alpha, d, theta), b = 0, c = (1/alpha)^d
  EPD,               // (a, d, c), b = 0, theta = 1
  GEPD,              // (a, d, c, theta), b = 0
  ChenExt,           // (a, d), b = 0, c = 1, theta = 1
  XieExt,            // (a, c, d, theta), b = 0
  ED,                // c -> 0 limit, not embeddable
  GED,               // c -> 0 limit, not embeddable
};

struct SubModelSpec {
  SubModelKind kind;
  std::vector<double> params;
};

inline std::size_t submodel_arity(SubModelKind kind) {
  switch (kind) {
    case SubModelKind::GWGD: return 4;
    case SubModelKind::GD: return 2;
    case SubModelKind::GGD: return 3;
    case SubModelKind::ExpModWeibullExt: return 4;
    case SubModelKind::EPD: return 3;
    case SubModelKind::GEPD: return 4;
    case SubModelKind::ChenExt: return 2;
    case SubModelKind::XieExt: return 4;
    case SubModelKind::ED: return 1;
    case SubModelKind::GED: return 2;
  }
  return 0;
}

/// The EgwgParams that realize an embeddable special case.
inline EgwgParams embed(const SubModelSpec& spec) {
  if (spec.kind == SubModelKind::ED || spec.kind == SubModelKind::GED)
    throw NotEmbeddable("ED and GED are c -> 0 limits of EGWGD; evaluate them as competitor laws");
  if (spec.params.size() != submodel_arity(spec.kind))
    throw InvalidParameters("wrong number of sub-model parameters");
  const auto& v = spec.params;
  EgwgParams p;
  switch (spec.kind) {
    case SubModelKind::GWGD: p = {v[0], v[1], v[2], v[3], 1.0}; break;
    case SubModelKind::GD: p = {v[0], 0.0, v[1], 1.0, 1.0}; break;
    case SubModelKind::GGD: p = {v[0], 0.0, v[1], 1.0, v[2]}; break;
    case SubModelKind::ExpModWeibullExt: p = {v[0], 0.0, std::pow(1.0 / v[1], v[2]), v[2], v[3]}; break;
    case SubModelKind::EPD: p = {v[0], 0.0, v[2], v[1], 1.0}; break;
    case SubModelKind::GEPD: p = {v[0], 0.0, v[2], v[1], v[3]}; break;
    case SubModelKind::ChenExt: p = {v[0], 0.0, 1.0, v[1], 1.0}; break;
    case SubModelKind::XieExt: p = {v[0], 0.0, v[1], v[2], v[3]}; break;
    default: break;
  }
  p.validate();
  return p;
}

enum class CompetitorKind { ED, GED, GD, IW, GIW, EGIW };

/// A competitor law with its own parameter vector:
///   ED (a)                F = 1 - e^{-a x}
///   GED (a, theta)        F = (1 - e^{-a x})^theta
///   GD (a, c)             hazard a e^{c x}, F = 1 - exp(-(a/c)(e^{c x} - 1))
///   IW (theta)            F = exp(-x^{-theta})
///   GIW (theta, beta)     F = exp(-theta x^{-beta})
///   EGIW (alpha, theta, beta)  F = exp(-theta x^{-beta})^alpha
struct CompetitorSpec {
  CompetitorKind kind;
  std::vector<double> params;

  /// Parameter count used by the information criteria.
  int k() const {
    switch (kind) {
      case CompetitorKind::ED: return 1;
      case CompetitorKind::GED: return 2;
      case CompetitorKind::GD: return 2;
      case CompetitorKind::IW: return 2;
      case CompetitorKind::GIW: return 3;
      case CompetitorKind::EGIW: return 4;
    }
    return 0;
  }
};

inline std::size_t competitor_arity(CompetitorKind kind) {
  switch (kind) {
    case CompetitorKind::ED: return 1;
    case CompetitorKind::GED: return 2;
    case CompetitorKind::GD: return 2;
    case CompetitorKind::IW: return 1;
    case CompetitorKind::GIW: return 2;
    case CompetitorKind::EGIW: return 3;
  }
  return 0;
}

inline std::vector<std::string> competitor_param_names(CompetitorKind kind) {
  switch (kind) {
    case CompetitorKind::ED: return {"a"};
    case CompetitorKind::GED: return {"a", "theta"};
    case CompetitorKind::GD: return {"a", "c"};
    case CompetitorKind::IW: return {"theta"};
    case CompetitorKind::GIW: return {"theta", "beta"};
    case CompetitorKind::EGIW: return {"alpha", "theta", "beta"};
  }
  return {};
}

inline void validate(const CompetitorSpec& spec) {
  if (spec.params.size() != competitor_arity(spec.kind))
    throw InvalidParameters("wrong number of competitor parameters");
  for (double v : spec.params)
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidParameters("competitor parameters must be positive and finite");
}

/// GD in hazard-rate form maps onto the EGWGD family as (a / c, 0, c, 1, 1).
inline EgwgParams gd_rate_to_egwg(double rate, double c) { return {rate / c, 0.0, c, 1.0, 1.0}; }

inline double competitor_log_pdf(const CompetitorSpec& spec, double x) {
  validate(spec);
  detail::require_positive(x, "competitor pdf");
  const auto& v = spec.params;
  const double lx = std::log(x);
  switch (spec.kind) {
    case CompetitorKind::ED: return std::log(v[0]) - v[0] * x;
    case CompetitorKind::GED: {
      const double ax = v[0] * x;
      return std::log(v[0] * v[1]) - ax + (v[1] - 1.0) * detail::log1mexp_from_log(std::log(ax));
    }
    case CompetitorKind::GD: {
      const double a = v[0], c = v[1];
      return std::log(a) + c * x - (a / c) * std::expm1(c * x);
    }
    case CompetitorKind::IW: {
      const double t = v[0];
      return std::log(t) - (t + 1.0) * lx - std::exp(-t * lx);
    }
    case CompetitorKind::GIW: {
      const double t = v[0], b = v[1];
      return std::log(t * b) - (b + 1.0) * lx - t * std::exp(-b * lx);
    }
    case CompetitorKind::EGIW: {
      const double al = v[0], t = v[1], b = v[2];
      return std::log(al * t * b) - (b + 1.0) * lx - al * t * std::exp(-b * lx);
    }
  }
  return 0.0;
}

inline double competitor_pdf(const CompetitorSpec& spec, double x) { return std::exp(competitor_log_pdf(spec, x)); }

inline Probability competitor_cdf(const CompetitorSpec& spec, double x) {
  validate(spec);
  detail::require_positive(x, "competitor cdf");
  const auto& v = spec.params;
  const double lx = std::log(x);
  switch (spec.kind) {
    case CompetitorKind::ED: return Probability(-std::expm1(-v[0] * x));
    case CompetitorKind::GED: return Probability(std::exp(v[1] * detail::log1mexp_from_log(std::log(v[0] * x))));
    case CompetitorKind::GD: return cdf(gd_rate_to_egwg(v[0], v[1]), x);
    case CompetitorKind::IW: return Probability(std::exp(-std::exp(-v[0] * lx)));
    case CompetitorKind::GIW: return Probability(std::exp(-v[0] * std::exp(-v[1] * lx)));
    case CompetitorKind::EGIW: return Probability(std::exp(-v[0] * v[1] * std::exp(-v[2] * lx)));
  }
  return Probability(0.0);
}

/// Model names accepted on the command line and in JSON configs.
enum class ModelName { EGWGD, GWGD, GD, GGD, EPD, GEPD, Chen, Xie, EMWE, ED, GED, IW, GIW, EGIW };

inline std::optional<ModelName> parse_model_name(std::string_view s) {
  struct Entry {
    std::string_view name;
    ModelName model;
  };
  static constexpr std::array<Entry, 16> table{{{"egwgd", ModelName::EGWGD},
                                                {"gwgd", ModelName::GWGD},
                                                {"gd", ModelName::GD},
                                                {"gompertz", ModelName::GD},
                                                {"ggd", ModelName::GGD},
                                                {"epd", ModelName::EPD},
                                                {"gepd", ModelName::GEPD},
                                                {"chen", ModelName::Chen},
                                                {"xie", ModelName::Xie},
                                                {"emwe", ModelName::EMWE},
                                                {"ed", ModelName::ED},
                                                {"exponential", ModelName::ED},
                                                {"ged", ModelName::GED},
                                                {"iw", ModelName::IW},
                                                {"giw", ModelName::GIW},
                                                {"egiw", ModelName::EGIW}}};
  for (const auto& e : table)
    if (e.name == s) return e.model;
  return std::nullopt;
}

inline std::string model_label(ModelName m) {
  switch (m) {
    case ModelName::EGWGD: return "egwgd";
    case ModelName::GWGD: return "gwgd";
    case ModelName::GD: return "gd";
    case ModelName::GGD: return "ggd";
    case ModelName::EPD: return "epd";
    case ModelName::GEPD: return "gepd";
    case ModelName::Chen: return "chen";
    case ModelName::Xie: return "xie";
    case ModelName::EMWE: return "emwe";
    case ModelName::ED: return "ed";
    case ModelName::GED: return "ged";
    case ModelName::IW: return "iw";
    case ModelName::GIW: return "giw";
    case ModelName::EGIW: return "egiw";
  }
  return "";
}

inline std::string competitor_label(CompetitorKind kind) {
  switch (kind) {
    case CompetitorKind::ED: return "ed";
    case CompetitorKind::GED: return "ged";
    case CompetitorKind::GD: return "gd";
    case CompetitorKind::IW: return "iw";
    case CompetitorKind::GIW: return "giw";
    case CompetitorKind::EGIW: return "egiw";
  }
  return "";
}

inline std::optional<CompetitorKind> as_competitor(ModelName m) {
  switch (m) {
    case ModelName::ED: return CompetitorKind::ED;
    case ModelName::GED: return CompetitorKind::GED;
    case ModelName::GD: return CompetitorKind::GD;
    case ModelName::IW: return CompetitorKind::IW;
    case ModelName::GIW: return CompetitorKind::GIW;
    case ModelName::EGIW: return CompetitorKind::EGIW;
    default: return std::nullopt;
  }
}

inline std::optional<SubModelKind> as_submodel(ModelName m) {
  switch (m) {
    case ModelName::GWGD: return SubModelKind::GWGD;
    case ModelName::GD: return SubModelKind::GD;
    case ModelName::GGD: return SubModelKind::GGD;
    case ModelName::EPD: return SubModelKind::EPD;
    case ModelName::GEPD: return SubModelKind::GEPD;
    case ModelName::Chen: return SubModelKind::ChenExt;
    case ModelName::Xie: return SubModelKind::XieExt;
    case ModelName::EMWE: return SubModelKind::ExpModWeibullExt;
    default: return std::nullopt;
  }
}

}  // namespace egwg
