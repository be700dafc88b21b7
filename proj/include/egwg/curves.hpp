#pragma once

// Tabulated distribution curves for export and plotting.

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "egwg/distribution.hpp"
#include "egwg/errors.hpp"
#include "egwg/numerics.hpp"
#include "egwg/reliability.hpp"

namespace egwg {

enum class Spacing { Linear, Log };

inline std::optional<Spacing> parse_spacing(std::string_view s) {
  if (s == "linear") return Spacing::Linear;
  if (s == "log") return Spacing::Log;
  return std::nullopt;
}

inline std::string spacing_name(Spacing s) { return s == Spacing::Linear ? "linear" : "log"; }

struct GridSpec {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t count = 2;
  Spacing spacing = Spacing::Linear;

  void validate() const {
    if (!(lo > 0.0) || !std::isfinite(hi) || !(hi > lo))
      throw DomainError("grid needs 0 < lo < hi < inf");
    if (count < 2) throw DomainError("grid needs at least 2 points");
  }

  /// The grid abscissae; the endpoints are exactly lo and hi.
  std::vector<double> points() const {
    validate();
    std::vector<double> xs(count);
    const double steps = static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
      const double t = static_cast<double>(i) / steps;
      xs[i] = spacing == Spacing::Linear ? lo + (hi - lo) * t : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * t);
    }
    xs.front() = lo;
    xs.back() = hi;
    return xs;
  }
};

struct CurveRow {
  double x;
  double pdf;
  double cdf;
  double survival;
  double hazard;
  std::optional<double> mrl;
};

struct CurveGrid {
  EgwgParams params;
  GridSpec grid;
  std::vector<CurveRow> rows;
  bool has_mrl() const { return !rows.empty() && rows.front().mrl.has_value(); }
};

/// Evaluates every curve on the grid. The mrl column costs one quadrature per row.
inline CurveGrid curve_grid(const EgwgParams& p, const GridSpec& grid, bool with_mrl,
                            const QuadratureConfig& cfg = {}) {
  p.validate();
  CurveGrid out{p, grid, {}};
  for (double x : grid.points()) {
    CurveRow r{x, pdf(p, x), cdf(p, x), survival(p, x), hazard(p, x), std::nullopt};
    if (with_mrl) r.mrl = mean_residual_life(p, x, cfg);
    out.rows.push_back(r);
  }
  return out;
}

}  // namespace egwg
