#pragma once

// Text formats: datasets in, JSON and CSV artifacts out and back.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "json.hpp"

#include "egwg/curves.hpp"
#include "egwg/distribution.hpp"
#include "egwg/errors.hpp"
#include "egwg/estimation.hpp"
#include "egwg/fixtures.hpp"
#include "egwg/gof.hpp"
#include "egwg/reliability.hpp"

namespace egwg {

/// Unreadable or malformed input.
class InputError : public Error {
 public:
  using Error::Error;
};

namespace io {

using Json = nlohmann::ordered_json;

/// 17 significant digits, enough to round-trip any double. Non-finite values
/// become null in JSON and nan/inf in CSV.
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string json_num(double v) { return std::isfinite(v) ? num(v) : "null"; }

/// Four significant digits for tables meant to be read.
inline std::string human(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

inline std::string json_str(std::string_view s) { return Json(std::string(s)).dump(); }

inline std::string json_object(const std::vector<std::pair<std::string, double>>& fields) {
  std::string out = "{";
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ",";
    out += json_str(fields[i].first) + ":" + json_num(fields[i].second);
  }
  return out + "}";
}

inline double get_num(const Json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("missing field \"") + key + "\"");
  const Json& v = j.at(key);
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!v.is_number()) throw InputError(std::string("field \"") + key + "\" is not a number");
  return v.get<double>();
}

inline Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Datasets

inline double parse_real(std::string_view tok) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) throw InputError("'" + std::string(tok) + "' is not a number");
  return v;
}

inline std::size_t parse_count(std::string_view tok) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) throw InputError("'" + std::string(tok) + "' is not a count");
  return v;
}

/// Positive reals separated by newlines, commas or blanks; '#' starts a comment.
inline Dataset parse_dataset(std::string_view text, std::string label = {}) {
  std::vector<double> values;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ',' || std::isspace(static_cast<unsigned char>(line[i])))) ++i;
      std::size_t j = i;
      while (j < line.size() && line[j] != ',' && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      if (j > i) {
        const std::string_view tok = line.substr(i, j - i);
        double v;
        try {
          v = parse_real(tok);
        } catch (const InputError& e) {
          throw InputError("line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!(v > 0.0) || !std::isfinite(v))
          throw InputError("line " + std::to_string(line_no) + ": value " + std::string(tok) + " is not a positive real");
        values.push_back(v);
      }
      i = j;
    }
    pos = eol + 1;
  }
  if (values.empty()) throw InputError("dataset contains no values");
  return Dataset(std::move(values), std::move(label));
}

/// A named fixture, or else a file path.
inline Dataset load_dataset(const std::string& source) {
  if (auto fx = fixtures::find(source)) return Dataset(std::move(*fx), source);
  std::ifstream in(source, std::ios::binary);
  if (!in) throw InputError("cannot read dataset '" + source + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_dataset(ss.str(), source);
}

inline std::string sample_lines(const std::vector<double>& xs) {
  std::string out;
  for (double x : xs) out += num(x) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Parameters

inline std::string params_json(const EgwgParams& p) {
  return json_object({{"a", p.a}, {"b", p.b}, {"c", p.c}, {"d", p.d}, {"theta", p.theta}});
}

inline EgwgParams params_from_json_value(const Json& j) {
  if (!j.is_object()) throw InputError("parameters must be a JSON object");
  return {get_num(j, "a"), get_num(j, "b"), get_num(j, "c"), get_num(j, "d"), get_num(j, "theta")};
}

inline EgwgParams params_from_json(std::string_view text) { return params_from_json_value(parse_json(text)); }

// ---------------------------------------------------------------------------
// Fit results

inline std::string fit_json(const FitResult& r) {
  std::ostringstream o;
  o << "{\"model\":\"egwgd\",\"params\":" << params_json(r.params) << ",\"loglik\":" << json_num(r.loglik)
    << ",\"neg_loglik\":" << json_num(-r.loglik) << ",\"order\":[\"a\",\"b\",\"c\",\"d\",\"theta\"],\"covariance\":[";
  for (int i = 0; i < 25; ++i) o << (i ? "," : "") << json_num(r.covariance(i / 5, i % 5));
  o << "],\"level\":" << json_num(r.level) << ",\"intervals\":{";
  for (int i = 0; i < 5; ++i) {
    const Interval& iv = r.intervals[static_cast<std::size_t>(i)];
    o << (i ? "," : "") << json_str(parameter_order()[i]) << ":{\"lo\":" << json_num(iv.lo)
      << ",\"hi\":" << json_num(iv.hi) << ",\"lower_below_zero\":" << (iv.lower_below_zero ? "true" : "false")
      << ",\"valid\":" << (iv.valid ? "true" : "false") << "}";
  }
  o << "},\"converged\":" << (r.converged ? "true" : "false") << ",\"gradient_norm\":" << json_num(r.gradient_norm)
    << ",\"n_evals\":" << r.n_evals << ",\"restarts_used\":" << r.restarts_used << ",\"active_bounds\":[";
  for (std::size_t i = 0; i < r.active_bounds.size(); ++i) o << (i ? "," : "") << json_str(r.active_bounds[i]);
  o << "],\"restarts\":[";
  for (std::size_t i = 0; i < r.restarts.size(); ++i) {
    const RestartTrace& t = r.restarts[i];
    o << (i ? "," : "") << "{\"start\":" << params_json(t.start) << ",\"start_loglik\":" << json_num(t.start_loglik)
      << ",\"end_loglik\":" << json_num(t.end_loglik) << ",\"converged\":" << (t.converged ? "true" : "false") << ",\"end\":" << params_json(t.end)
      << ",\"iterations\":" << t.iterations << "}";
  }
  o << "]}";
  return o.str();
}

inline FitResult fit_from_json(std::string_view text) {
  const Json j = parse_json(text);
  FitResult r;
  try {
    r.params = params_from_json_value(j.at("params"));
    r.loglik = get_num(j, "loglik");
    const auto& order = j.at("order");
    for (int i = 0; i < 5; ++i)
      if (order.at(i).get<std::string>() != parameter_order()[i]) throw InputError("unexpected covariance order");
    const auto& cov = j.at("covariance");
    if (!cov.is_array() || cov.size() != 25) throw InputError("covariance must have 25 entries");
    for (int i = 0; i < 25; ++i)
      r.covariance(i / 5, i % 5) = cov[i].is_null() ? std::numeric_limits<double>::quiet_NaN() : cov[i].get<double>();
    r.level = get_num(j, "level");
    for (int i = 0; i < 5; ++i) {
      const auto& iv = j.at("intervals").at(parameter_order()[i]);
      r.intervals[static_cast<std::size_t>(i)] = {get_num(iv, "lo"), get_num(iv, "hi"),
                                                  iv.at("lower_below_zero").get<bool>(), iv.at("valid").get<bool>()};
    }
    r.converged = j.at("converged").get<bool>();
    r.gradient_norm = get_num(j, "gradient_norm");
    r.n_evals = j.at("n_evals").get<int>();
    r.restarts_used = j.at("restarts_used").get<int>();
    r.active_bounds = j.at("active_bounds").get<std::vector<std::string>>();
    for (const auto& t : j.at("restarts"))
      r.restarts.push_back(
          {params_from_json_value(t.at("start")), get_num(t, "start_loglik"), get_num(t, "end_loglik"), t.at("converged").get<bool>(),
           params_from_json_value(t.at("end")), t.at("iterations").get<int>()});
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed fit result: ") + e.what());
  }
  return r;
}

inline std::vector<std::pair<std::string, double>> named_params(const CompetitorSpec& spec) {
  std::vector<std::pair<std::string, double>> out;
  const auto names = competitor_param_names(spec.kind);
  for (std::size_t i = 0; i < names.size(); ++i) out.emplace_back(names[i], spec.params[i]);
  return out;
}

inline std::string competitor_fit_json(const CompetitorFit& r) {
  const auto names = competitor_param_names(r.spec.kind);
  std::ostringstream o;
  o << "{\"model\":" << json_str(competitor_label(r.spec.kind)) << ",\"params\":" << json_object(named_params(r.spec))
    << ",\"loglik\":" << json_num(r.loglik) << ",\"neg_loglik\":" << json_num(-r.loglik) << ",\"order\":[";
  for (std::size_t i = 0; i < names.size(); ++i) o << (i ? "," : "") << json_str(names[i]);
  o << "],\"covariance\":[";
  const Eigen::Index k = r.covariance.rows();
  for (Eigen::Index i = 0; i < k * k; ++i) o << (i ? "," : "") << json_num(r.covariance(i / k, i % k));
  o << "],\"converged\":" << (r.converged ? "true" : "false") << ",\"n_evals\":" << r.n_evals << "}";
  return o.str();
}

inline CompetitorFit competitor_fit_from_json(std::string_view text) {
  const Json j = parse_json(text);
  CompetitorFit r;
  try {
    const auto name = j.at("model").get<std::string>();
    const auto m = parse_model_name(name);
    const auto kind = m ? as_competitor(*m) : std::nullopt;
    if (!kind) throw InputError("unknown competitor model '" + name + "'");
    r.spec.kind = *kind;
    for (const auto& n : competitor_param_names(*kind)) r.spec.params.push_back(get_num(j.at("params"), n.c_str()));
    r.loglik = get_num(j, "loglik");
    const Eigen::Index k = static_cast<Eigen::Index>(r.spec.params.size());
    const auto& cov = j.at("covariance");
    if (!cov.is_array() || cov.size() != static_cast<std::size_t>(k * k)) throw InputError("covariance has the wrong size");
    r.covariance.resize(k, k);
    for (Eigen::Index i = 0; i < k * k; ++i)
      r.covariance(i / k, i % k) = cov[static_cast<std::size_t>(i)].is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                                             : cov[static_cast<std::size_t>(i)].get<double>();
    r.converged = j.at("converged").get<bool>();
    r.n_evals = j.at("n_evals").get<int>();
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed fit result: ") + e.what());
  }
  return r;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        out.back() += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.emplace_back();
    } else if (ch != '\r') {
      out.back() += ch;
    }
  }
  if (quoted) throw InputError("unterminated quoted CSV field");
  return out;
}

inline std::vector<std::string> csv_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) lines.push_back(line);
  return lines;
}

inline double csv_num(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return parse_real(s);
}

inline constexpr std::string_view kComparisonHeader = "model,mle_json,ks,neg_loglik,aic,caic,bic,p_value,k,n";

inline std::string comparison_csv(const ComparisonTable& t) {
  std::string out = std::string(kComparisonHeader) + "\n";
  for (const auto& r : t.rows) {
    const GofReport& g = r.report;
    out += csv_field(r.model) + "," + csv_field(json_object(r.params)) + "," + num(g.ks) + "," + num(g.neg_loglik) +
           "," + num(g.aic) + "," + num(g.caic) + "," + num(g.bic) + "," + num(g.p_value.value()) + "," + std::to_string(g.k) + "," +
           std::to_string(g.n) + "\n";
  }
  return out;
}

/// Rows only; the rankings are recomputed from them.
inline ComparisonTable comparison_from_csv(std::string_view text) {
  const auto lines = csv_lines(text);
  if (lines.empty() || lines[0] != kComparisonHeader) throw InputError("missing comparison CSV header");
  ComparisonTable t;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split_csv_line(lines[i]);
    if (f.size() != 10) throw InputError("comparison row " + std::to_string(i) + " has " + std::to_string(f.size()) + " fields");
    ComparisonRow row;
    row.model = f[0];
    const Json mle = parse_json(f[1]);
    for (auto it = mle.begin(); it != mle.end(); ++it)
      row.params.emplace_back(it.key(), it->is_null() ? std::numeric_limits<double>::quiet_NaN() : it->get<double>());
    row.report.ks = csv_num(f[2]);
    row.report.neg_loglik = csv_num(f[3]);
    row.report.aic = csv_num(f[4]);
    row.report.caic = csv_num(f[5]);
    row.report.bic = csv_num(f[6]);
    row.report.p_value = Probability(csv_num(f[7]));
    row.report.k = static_cast<int>(parse_count(f[8]));
    row.report.n = parse_count(f[9]);
    t.rows.push_back(std::move(row));
  }
  rank_rows(t);
  return t;
}

inline std::string human_comparison_table(const ComparisonTable& t) {
  std::ostringstream o;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-7s %10s %10s %10s %10s %10s %10s\n", "model", "K-S", "-L", "AIC", "CAIC", "BIC",
                "p-value");
  o << buf;
  for (const auto& r : t.rows) {
    const GofReport& g = r.report;
    std::snprintf(buf, sizeof buf, "%-7s %10s %10s %10s %10s %10s %10s\n", r.model.c_str(), human(g.ks).c_str(),
                  human(g.neg_loglik).c_str(), human(g.aic).c_str(), human(g.caic).c_str(), human(g.bic).c_str(),
                  human(g.p_value.value()).c_str());
    o << buf;
  }
  return o.str();
}

inline std::string curves_csv(const std::vector<CurveRow>& rows, bool with_mrl) {
  std::string out = with_mrl ? "x,pdf,cdf,survival,hazard,mrl\n" : "x,pdf,cdf,survival,hazard\n";
  for (const auto& r : rows) {
    out += num(r.x) + "," + num(r.pdf) + "," + num(r.cdf) + "," + num(r.survival) + "," + num(r.hazard);
    if (with_mrl) out += "," + num(r.mrl.value_or(std::numeric_limits<double>::quiet_NaN()));
    out += "\n";
  }
  return out;
}

inline std::vector<CurveRow> curves_from_csv(std::string_view text) {
  const auto lines = csv_lines(text);
  if (lines.empty()) throw InputError("empty curves CSV");
  const bool with_mrl = lines[0] == "x,pdf,cdf,survival,hazard,mrl";
  if (!with_mrl && lines[0] != "x,pdf,cdf,survival,hazard") throw InputError("missing curves CSV header");
  std::vector<CurveRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split_csv_line(lines[i]);
    if (f.size() != (with_mrl ? 6u : 5u)) throw InputError("curves row " + std::to_string(i) + " has the wrong width");
    CurveRow r{csv_num(f[0]), csv_num(f[1]), csv_num(f[2]), csv_num(f[3]), csv_num(f[4]), std::nullopt};
    if (with_mrl) r.mrl = csv_num(f[5]);
    rows.push_back(r);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Reliability summaries

inline std::string reliability_json(const ReliabilitySummary& s) {
  std::ostringstream o;
  o << "{\"mttf\":" << json_num(s.mttf);
  if (s.mttr) o << ",\"mttr\":" << json_num(*s.mttr);
  if (s.mtbf) o << ",\"mtbf\":" << json_num(*s.mtbf);
  if (s.availability) o << ",\"availability\":" << json_num(*s.availability);
  o << ",\"points\":[";
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    const auto& p = s.points[i];
    o << (i ? "," : "") << "{\"t\":" << json_num(p.t);
    if (p.maintainability) o << ",\"maintainability\":" << json_num(*p.maintainability);
    o << ",\"mrl\":" << json_num(p.mrl);
    if (p.mpl) o << ",\"mpl\":" << json_num(*p.mpl);
    o << "}";
  }
  o << "]}";
  return o.str();
}

inline ReliabilitySummary reliability_from_json(std::string_view text) {
  const Json j = parse_json(text);
  auto opt = [](const Json& obj, const char* key) -> std::optional<double> {
    if (!obj.contains(key)) return std::nullopt;
    return get_num(obj, key);
  };
  ReliabilitySummary s{};
  try {
    s.mttf = get_num(j, "mttf");
    s.mttr = opt(j, "mttr");
    s.mtbf = opt(j, "mtbf");
    s.availability = opt(j, "availability");
    for (const auto& p : j.at("points"))
      s.points.push_back({get_num(p, "t"), opt(p, "maintainability"), get_num(p, "mrl"), opt(p, "mpl")});
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed reliability summary: ") + e.what());
  }
  return s;
}

}  // namespace io
}  // namespace egwg
