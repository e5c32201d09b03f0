#include "wbc/curve_fit.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace wbc {

namespace {

struct InnerFit {
  double intercept = 0.0;  // beta1
  double slope = 0.0;      // coefficient on ln(c + beta3); beta2 = -slope
  double sse = 0.0;
};

// Exact least squares of y on {1, ln(c + beta3)} via centered sums.
InnerFit inner_lls(const std::vector<PcSample>& samples, double beta3) {
  const auto n = static_cast<double>(samples.size());
  double su = 0.0, sy = 0.0;
  for (const auto& s : samples) {
    su += std::log(s.c_norm + beta3);
    sy += s.p_c_hat;
  }
  const double mu = su / n;
  const double my = sy / n;
  double suu = 0.0, suy = 0.0;
  for (const auto& s : samples) {
    const double du = std::log(s.c_norm + beta3) - mu;
    suu += du * du;
    suy += du * (s.p_c_hat - my);
  }
  InnerFit fit;
  fit.slope = suu > 0.0 ? suy / suu : 0.0;
  fit.intercept = my - fit.slope * mu;
  for (const auto& s : samples) {
    const double r = s.p_c_hat - (fit.intercept + fit.slope * std::log(s.c_norm + beta3));
    fit.sse += r * r;
  }
  return fit;
}

}  // namespace

FitReport fit_pc(const std::vector<PcSample>& samples) {
  if (samples.size() < 4)
    throw std::invalid_argument("fit_pc: need at least 4 samples");
  double cmin = samples.front().c_norm, cmax = samples.front().c_norm;
  for (const auto& s : samples) {
    if (!(s.p_c_hat >= 0.0 && s.p_c_hat <= 1.0))
      throw std::invalid_argument("fit_pc: p_c_hat out of [0, 1]");
    cmin = std::min(cmin, s.c_norm);
    cmax = std::max(cmax, s.c_norm);
  }
  if (!(cmax > cmin))
    throw std::invalid_argument("fit_pc: degenerate input, constant c_norm");

  // Profile search on t = ln(beta3) over [1e-6, 10]: a coarse log-spaced scan
  // brackets the best basin, then golden section refines it.
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  const double t_min = std::log(1e-6), t_max = std::log(10.0);
  auto sse_at = [&](double t) { return inner_lls(samples, std::exp(t)).sse; };

  const int scan = 256;
  int best_k = 0;
  double best_sse = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= scan; ++k) {
    const double t = t_min + (t_max - t_min) * k / scan;
    const double s = sse_at(t);
    if (s < best_sse) {
      best_sse = s;
      best_k = k;
    }
  }
  const double span = (t_max - t_min) / scan;
  double lo = t_min + span * std::max(0, best_k - 1);
  double hi = t_min + span * std::min(scan, best_k + 1);

  double x1 = hi - golden * (hi - lo);
  double x2 = lo + golden * (hi - lo);
  double f1 = sse_at(x1), f2 = sse_at(x2);
  while (hi - lo > 1e-12) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - golden * (hi - lo);
      f1 = sse_at(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + golden * (hi - lo);
      f2 = sse_at(x2);
    }
  }
  const double t_best = 0.5 * (lo + hi);
  const double beta3 = std::exp(t_best);
  const InnerFit inner = inner_lls(samples, beta3);

  FitReport report;
  report.params.beta1 = inner.intercept;
  report.params.beta2 = -inner.slope;
  report.params.beta3 = beta3;
  report.params.z = samples.front().z;
  report.params.p_l = samples.front().p_l;
  report.converged = t_best - t_min > 1e-9 && t_max - t_best > 1e-9;

  const auto n = static_cast<double>(samples.size());
  double my = 0.0;
  for (const auto& s : samples) my += s.p_c_hat;
  my /= n;
  double sst = 0.0;
  for (const auto& s : samples) sst += (s.p_c_hat - my) * (s.p_c_hat - my);
  for (const auto& s : samples) {
    report.residuals.push_back(
        s.p_c_hat - (inner.intercept + inner.slope * std::log(s.c_norm + beta3)));
  }
  const double r2 = sst > 0.0 ? 1.0 - inner.sse / sst : 1.0;
  const double dof = n - 4.0;  // n - p - 1 with p = 3
  report.adj_r_squared = dof > 0.0 ? 1.0 - (1.0 - r2) * (n - 1.0) / dof : r2;
  report.rmse = std::sqrt(inner.sse / n);
  report.params.adj_r_squared = report.adj_r_squared;
  report.params.rmse = report.rmse;
  return report;
}

double predict_pc(const FitParams& params, double c_norm) {
  const double raw = params.beta1 - params.beta2 * std::log(c_norm + params.beta3);
  return std::clamp(raw, 0.0, 1.0);
}

std::string fit_report_to_json(const FitReport& report, const std::string& config_hash) {
  nlohmann::json j;
  j["beta1"] = report.params.beta1;
  j["beta2"] = report.params.beta2;
  j["beta3"] = report.params.beta3;
  j["adj_r_squared"] = report.adj_r_squared;
  j["rmse"] = report.rmse;
  j["z"] = report.params.z;
  j["p_l"] = report.params.p_l;
  j["converged"] = report.converged;
  if (!config_hash.empty()) j["config_hash"] = config_hash;
  return j.dump(2) + "\n";
}

FitParams fit_params_from_json(std::istream& is) {
  nlohmann::json j = nlohmann::json::parse(is);
  FitParams params;
  params.beta1 = j.at("beta1").get<double>();
  params.beta2 = j.at("beta2").get<double>();
  params.beta3 = j.at("beta3").get<double>();
  params.adj_r_squared = j.value("adj_r_squared", 0.0);
  params.rmse = j.value("rmse", 0.0);
  params.z = j.at("z").get<int>();
  params.p_l = j.at("p_l").get<double>();
  validate(params);
  return params;
}

}  // namespace wbc
