#include "scmm/scenarios.hpp"

#include <chrono>
#include <cmath>

#include "scmm/errors.hpp"

namespace scmm {

namespace {

std::int64_t as_n(double n) { return static_cast<std::int64_t>(std::min(std::round(n), 4e18)); }

ModelFamily gaussian_family() {
  const Potential base({0.0, 1.0}, {}, IntervalSet::real_line(), 1);
  const EquilibriumMeasure em = solve_support(base, CutStructure::one_cut);
  ModelFamily f;
  f.name = "gaussian";
  f.potential = [base](double n) { return base.with_n(as_n(n)); };
  f.measure = [em](double) { return em; };
  return f;
}

ModelFamily quartic_family(double tau) {
  ModelFamily f;
  f.name = "quartic";
  f.potential = [tau](double n) {
    const double t = -2.0 + tau * std::pow(n, -2.0 / 3.0);
    return Potential({0.0, t, 0.0, 1.0}, {}, IntervalSet::real_line(), as_n(n));
  };
  f.measure = [tau](double n) { return quartic_curve(tau * std::pow(n, -2.0 / 3.0)); };
  return f;
}

ModelFamily hard_edge_family(double alpha1, bool second, double tau, double alpha2) {
  const EquilibriumMeasure em = marchenko_pastur_curve();
  ModelFamily f;
  f.name = "hard-edge";
  f.potential = [=](double n) {
    std::vector<Singularity> s;
    if (alpha1 != 0.0) s.push_back({cplx(0.0, 0.0), alpha1, {}});
    if (second) s.push_back({cplx(tau / (n * n), 0.0), alpha2, {}});
    return Potential({-1.0}, s, IntervalSet({{-kInf, 0.0}}), as_n(n));
  };
  f.measure = [em](double) { return em; };
  return f;
}

}  // namespace

std::vector<double> linspace(double a, double b, int count) {
  std::vector<double> out;
  if (count == 1) return {a};
  for (int i = 0; i < count; ++i) out.push_back(a + (b - a) * i / (count - 1));
  return out;
}

std::vector<std::string> scenario_names() {
  return {"gue-bulk", "gue-edge", "quartic-merge", "mp-hard-edge", "mp-two-charge"};
}

ScenarioParams default_params(const std::string& name) {
  ScenarioParams p;
  if (name == "mp-two-charge") {
    p.tau = 1.0;
    p.alpha1 = 0.5;
    p.alpha2 = 0.5;
  }
  return p;
}

Scenario make_scenario(const std::string& name, const ScenarioParams& params) {
  Scenario s;
  s.name = name;
  s.params = params;
  if (name == "gue-bulk") {
    s.description = "V = x^2/2 on R, bulk point 0, sine kernel";
    s.family = gaussian_family();
    s.x_star = 0.0;
    s.reference = ReferenceKind::sine;
    s.grid = linspace(-2.0, 2.0, 9);
    s.n_list = {40, 80, 160};
  } else if (name == "gue-edge") {
    s.description = "V = x^2/2 on R, soft edge 2, Airy kernel";
    s.family = gaussian_family();
    s.x_star = 2.0;
    s.reference = ReferenceKind::airy;
    s.grid = linspace(-4.0, 1.0, 11);
    s.n_list = {50, 100, 200};
  } else if (name == "quartic-merge") {
    s.description = "V = t x^2/2 + x^4/4 with t = -2 + tau n^{-2/3}, interior point 0 of order 1";
    s.family = quartic_family(params.tau);
    s.x_star = 0.0;
    s.reference = ReferenceKind::self;
    s.grid = linspace(-2.0, 2.0, 9);
    s.n_list = {30, 60, 120};
  } else if (name == "mp-hard-edge") {
    s.description = "V = -x on (-inf, 0] with |x|^{2 alpha1}, hard edge 0, Bessel kernel";
    s.family = hard_edge_family(params.alpha1, false, 0.0, 0.0);
    s.x_star = 0.0;
    s.reference = ReferenceKind::bessel;
    s.grid = linspace(-4.0, -0.1, 9);
    s.n_list = {50, 100, 200};
  } else if (name == "mp-two-charge") {
    s.description = "V = -x on (-inf, 0] with |x|^{2 alpha1} |x - tau/n^2|^{2 alpha2}, hard edge 0";
    s.family = hard_edge_family(params.alpha1, true, params.tau, params.alpha2);
    s.x_star = 0.0;
    s.reference = ReferenceKind::self;
    s.grid = linspace(-4.0, -0.1, 9);
    s.n_list = {50, 100, 200};
  } else {
    throw ValidationError("unknown scenario '" + name + "'");
  }
  s.family.name = name;
  return s;
}

CriticalPoint critical_point_at(const ModelFamily& family, double x) {
  const auto cps = find_critical_points(family);
  for (const auto& cp : cps)
    if (std::abs(cp.x_star - x) < 1e-6) return cp;
  const auto em = family.measure(kClassifyN);
  if (!em.support().contains_interior(x))
    throw ValidationError("x = " + std::to_string(x) + " is neither a critical point nor inside the support");
  CriticalPoint cp;
  cp.x_star = x;
  cp.kind = PointKind::interior;
  cp.order_k = 0;
  cp.delta = scaling_exponent(PointKind::interior, 0);
  return cp;
}

int default_resolution(std::int64_t n) { return static_cast<int>(std::max<std::int64_t>(800, 16 * n)); }

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(y[i] > 0.0) || !(x[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    ++m;
  }
  if (m < 2) return 0.0;
  const double den = m * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (m * sxy - sx * sy) / den;
}

ScanResult convergence_scan(const Scenario& s, const std::vector<int>& n_list, const std::vector<double>& grid,
                            int threads) {
  if (n_list.empty()) throw ValidationError("n list is empty");
  if (grid.empty()) throw ValidationError("grid is empty");
  ScanResult out;
  out.scenario = s.name;
  out.grid = grid;
  out.reference = to_string(s.reference);

  const CriticalPoint cp = critical_point_at(s.family, s.x_star);
  out.point = cp;
  const ModelData md = extract_model_data(s.family, cp, n_list.back());
  out.mirrored = md.mirrored;
  const ReferenceMap ref = reference_map(s.reference, md);
  out.affine_map = ref.describe();

  std::vector<std::vector<double>> previous;
  std::vector<double> ns, errs;
  for (int n : n_list) {
    const auto t0 = std::chrono::steady_clock::now();
    ScanRow row;
    row.n = n;
    const Potential pot = s.family.potential(n);
    const QuadratureRule q = build_quadrature(pot, default_resolution(n));
    row.nodes = q.size();
    const Recurrence r = stieltjes_recurrence(q, n);
    const ScalingMap map = scaling_map(cp, md.mirrored, n);
    const KernelGrid g = evaluate_grid([&](double u, double v) { return scaled_kernel(r, pot, map, u, v); }, grid,
                                       grid, threads);
    double err = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (std::size_t j = 0; j < grid.size(); ++j) {
        if (!g.in_domain[i][j]) continue;
        if (s.reference == ReferenceKind::self) {
          if (!previous.empty()) err = std::max(err, std::abs(g.values[i][j] - previous[i][j]));
        } else {
          err = std::max(err, std::abs(g.values[i][j] - ref(grid[i], grid[j])));
        }
      }
    row.compared = s.reference != ReferenceKind::self || !previous.empty();
    row.sup_error = err;
    previous = g.values;
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (row.compared) {
      ns.push_back(n);
      errs.push_back(err);
    }
    out.rows.push_back(row);
  }
  out.fitted_exponent = fit_loglog_slope(ns, errs);
  out.decreasing = errs.size() >= 2;
  for (std::size_t i = 1; i < errs.size(); ++i) out.decreasing = out.decreasing && errs[i] < errs[i - 1];
  return out;
}

}  // namespace scmm
