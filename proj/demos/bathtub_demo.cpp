// Fits the Aarset failure times, compares the fit with the classic laws and
// prints the bathtub-shaped hazard of the winner.

#include <cstdio>
#include <vector>

#include "egwg/egwg.hpp"

int main() {
  const egwg::Dataset data(egwg::fixtures::aarset());

  const auto fit = egwg::fit(data);
  std::printf("EGWGD fit: a=%.4g b=%.4g c=%.4g d=%.4g theta=%.4g  -L=%.4f  %s\n", fit.params.a, fit.params.b,
              fit.params.c, fit.params.d, fit.params.theta, -fit.loglik, fit.converged ? "converged" : "NOT converged");
  for (const auto& b : fit.active_bounds) std::printf("  on bound %s\n", b.c_str());

  std::vector<egwg::FittedModel> models{egwg::fitted_model(fit)};
  for (auto kind : {egwg::CompetitorKind::ED, egwg::CompetitorKind::GED, egwg::CompetitorKind::GD})
    models.push_back(egwg::fitted_model(egwg::fit_competitor(kind, data)));
  std::printf("\n%s\n", egwg::io::human_comparison_table(egwg::compare(data, models)).c_str());

  const auto grid = egwg::curve_grid(fit.params, {0.5, 90.0, 180, egwg::Spacing::Linear}, false);
  std::size_t low = 0;
  for (std::size_t i = 1; i < grid.rows.size(); ++i)
    if (grid.rows[i].hazard < grid.rows[low].hazard) low = i;
  std::printf("hazard minimum near t=%.4g (h=%.4g)\n\n", grid.rows[low].x, grid.rows[low].hazard);
  std::printf("%8s %12s %12s\n", "t", "hazard", "survival");
  for (std::size_t i = 0; i < grid.rows.size(); i += 15)
    std::printf("%8.4g %12.4g %12.4g\n", grid.rows[i].x, grid.rows[i].hazard, grid.rows[i].survival);

  const double mttf = egwg::mttf(fit.params);
  std::printf("\nMTTF %.4g, mean residual life at t=40: %.4g\n", mttf, egwg::mean_residual_life(fit.params, 40.0));
}
