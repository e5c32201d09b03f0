#pragma once

#include <iosfwd>
#include <vector>

#include "wbc/core_model.hpp"
#include "wbc/fork_sim.hpp"

// Nonlinear least squares for the logarithmic confirmation model
//   p = beta1 - beta2 * ln(c + beta3).
// The model is linear in (beta1, beta2) once beta3 is fixed, so the fit is a
// profile search over beta3 (golden section on a log-spaced bracket) with an
// exact inner linear solve. Deterministic.

namespace wbc {

struct FitReport {
  FitParams params;
  double adj_r_squared = 0.0;  // 1 - (1-R^2)(n-1)/(n-p-1), p = 3
  double rmse = 0.0;
  std::vector<double> residuals;  // y - model(c), per sample
  bool converged = false;  // false when beta3 pinned at a bracket edge
};

// Fit to (c_norm, p_c_hat) pairs. Requires >= 4 samples with distinct c_norm.
FitReport fit_pc(const std::vector<PcSample>& samples);

// Model value at c_norm, clamped to [0, 1].
double predict_pc(const FitParams& params, double c_norm);

// JSON round trip; keys beta1, beta2, beta3, adj_r_squared, rmse, z, p_l,
// converged, plus config_hash when one is supplied.
std::string fit_report_to_json(const FitReport& report, const std::string& config_hash);
FitParams fit_params_from_json(std::istream& is);

}  // namespace wbc
