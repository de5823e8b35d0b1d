#pragma once

#include <string>
#include <vector>

#include "scmm/classify.hpp"
#include "scmm/equilibrium.hpp"
#include "scmm/kernel.hpp"

namespace scmm {

struct ScenarioParams {
  double tau = 0.0;     // quartic-merge: t = -2 + tau n^{-2/3}; mp-two-charge: second charge at tau / n^2
  double alpha1 = 0.0;  // charge at the hard edge
  double alpha2 = 0.5;  // mp-two-charge second charge
};

struct Scenario {
  std::string name;
  std::string description;
  ModelFamily family;
  double x_star = 0.0;
  ReferenceKind reference = ReferenceKind::self;
  std::vector<double> grid;
  std::vector<int> n_list;
  ScenarioParams params;
};

std::vector<std::string> scenario_names();
// Throws ValidationError for an unknown name.
Scenario make_scenario(const std::string& name, const ScenarioParams& params = {});
// Defaults per scenario: mp-two-charge uses alpha1 = alpha2 = 1/2 and tau = 1.
ScenarioParams default_params(const std::string& name);

// The classified point nearest x, or a regular interior point (k = 0) of the support.
CriticalPoint critical_point_at(const ModelFamily& family, double x);

// Quadrature resolution used for degree-n kernels.
int default_resolution(std::int64_t n);

struct ScanRow {
  int n = 0;
  double sup_error = 0.0;  // vs the closed form, or vs the previous n for "self"
  std::size_t nodes = 0;
  double seconds = 0.0;
  bool compared = true;
};

struct ScanResult {
  std::string scenario;
  CriticalPoint point;
  bool mirrored = false;
  std::string reference;
  std::string affine_map;
  std::vector<double> grid;
  std::vector<ScanRow> rows;
  double fitted_exponent = 0.0;  // slope of log(sup_error) against log(n)
  bool decreasing = false;
};

ScanResult convergence_scan(const Scenario& s, const std::vector<int>& n_list, const std::vector<double>& grid,
                            int threads = 1);

// Least-squares slope of log y against log x over entries with y > 0.
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

std::vector<double> linspace(double a, double b, int count);

}  // namespace scmm
