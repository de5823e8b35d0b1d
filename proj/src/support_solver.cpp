#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "scmm/equilibrium.hpp"
#include "scmm/errors.hpp"
#include "scmm/series.hpp"

namespace scmm {

namespace {

using Vec = std::vector<double>;

struct LaurentData {
  std::vector<long double> c;  // c[j] = coefficient of z^{-j} in V'/sqrt(R), j >= 1
  std::vector<double> h;       // polynomial part
};

// V'(z)/sqrt(R(z)) with sqrt(R) ~ z^e at infinity.
LaurentData laurent(const Vec& vprime, const Vec& zeros, const Vec& poles) {
  const int e2 = static_cast<int>(zeros.size()) - static_cast<int>(poles.size());
  if (e2 < 0 || e2 % 2 != 0) throw ValidationError("curve needs an even excess of zeros over poles");
  const int e = e2 / 2;
  const int deg = static_cast<int>(vprime.size()) - 1;
  const int order = deg + e + 2;
  std::vector<long double> roots;
  Vec gammas;
  for (double z : zeros) {
    roots.push_back(z);
    gammas.push_back(-0.5);
  }
  for (double p : poles) {
    roots.push_back(p);
    gammas.push_back(0.5);
  }
  const auto s = product_power_series<long double>(roots, gammas, order);
  LaurentData out;
  out.c.assign(e + 2, 0.0L);
  for (int j = 1; j <= e + 1; ++j)
    for (int k = 0; k <= deg; ++k) {
      const int idx = k - e + j;
      if (idx >= 0 && idx <= order) out.c[j] += static_cast<long double>(vprime[k]) * s[idx];
    }
  for (int i = 0; i <= deg - e; ++i) {
    long double acc = 0.0L;
    for (int k = 0; k <= deg; ++k) {
      const int idx = k - e - i;
      if (idx >= 0) acc += static_cast<long double>(vprime[k]) * s[idx];
    }
    out.h.push_back(static_cast<double>(acc));
  }
  while (out.h.size() > 1 && out.h.back() == 0.0) out.h.pop_back();
  return out;
}

// Damped Newton with a forward-difference Jacobian. Returns nullopt on failure.
std::optional<Vec> newton(const std::function<Vec(const Vec&)>& F, Vec x, double tol = 1e-14) {
  const std::size_t n = x.size();
  auto norm = [](const Vec& v) {
    double s = 0.0;
    for (double t : v) s += t * t;
    return std::sqrt(s);
  };
  Vec fx;
  try {
    fx = F(x);
  } catch (const std::exception&) {
    return std::nullopt;
  }
  for (int it = 0; it < 200; ++it) {
    const double r = norm(fx);
    if (!std::isfinite(r)) return std::nullopt;
    if (r < tol) return x;
    Eigen::MatrixXd J(n, n);
    for (std::size_t j = 0; j < n; ++j) {
      Vec xp = x;
      const double h = 1e-7 * std::max(1.0, std::abs(x[j]));
      xp[j] += h;
      const Vec fp = F(xp);
      for (std::size_t i = 0; i < n; ++i) J(static_cast<long>(i), static_cast<long>(j)) = (fp[i] - fx[i]) / h;
    }
    Eigen::VectorXd rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs(static_cast<long>(i)) = -fx[i];
    const Eigen::VectorXd dx = J.fullPivLu().solve(rhs);
    if (!dx.allFinite()) return std::nullopt;
    double lambda = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 30; ++ls, lambda *= 0.5) {
      Vec xt = x;
      for (std::size_t i = 0; i < n; ++i) xt[i] += lambda * dx(static_cast<long>(i));
      Vec ft;
      try {
        ft = F(xt);
      } catch (const std::exception&) {
        continue;
      }
      if (std::isfinite(norm(ft)) && norm(ft) < r) {
        x = xt;
        fx = ft;
        moved = true;
        break;
      }
    }
    if (!moved) return norm(fx) < 1e3 * tol ? std::optional<Vec>(x) : std::nullopt;
  }
  return norm(fx) < 1e3 * tol ? std::optional<Vec>(x) : std::nullopt;
}

struct Candidate {
  double center;
  double curvature;
};

// Local minima of V_reg on a grid over the domain (clipped to a window).
std::vector<Candidate> candidate_centers(const Potential& p) {
  const auto& I = p.support();
  double lo = std::max(I.inf(), -20.0), hi = std::min(I.sup(), 20.0);
  if (!(lo < hi)) {
    lo = I.inf();
    hi = I.sup();
  }
  const int m = 4001;
  Vec xs(m), vs(m);
  for (int i = 0; i < m; ++i) {
    xs[i] = lo + (hi - lo) * i / (m - 1);
    vs[i] = I.contains(xs[i]) ? p.vreg(xs[i]) : kInf;
  }
  std::vector<Candidate> out;
  auto curvature = [&](double x) {
    const double h = 1e-4;
    const double c = (p.vreg(x + h) - 2 * p.vreg(x) + p.vreg(x - h)) / (h * h);
    return c > 1e-6 ? c : 1.0;
  };
  for (int i = 0; i < m; ++i) {
    const bool left_ok = i == 0 || vs[i] <= vs[i - 1];
    const bool right_ok = i == m - 1 || vs[i] <= vs[i + 1];
    if (std::isfinite(vs[i]) && left_ok && right_ok) out.push_back({xs[i], curvature(xs[i])});
  }
  std::sort(out.begin(), out.end(), [&](const Candidate& a, const Candidate& b) { return p.vreg(a.center) < p.vreg(b.center); });
  if (out.empty()) out.push_back({0.5 * (lo + hi), 1.0});
  return out;
}

// Tries starting points in order; keeps the first solution that yields a valid measure.
EquilibriumMeasure first_valid(const Potential& p, const std::vector<Vec>& starts,
                               const std::function<Vec(const Vec&)>& conditions,
                               const std::function<SpectralCurve(const Vec&)>& build) {
  std::string last_error = "endpoint root-find did not converge";
  for (const Vec& x0 : starts) {
    const auto sol = newton(conditions, x0);
    if (!sol) continue;
    try {
      return EquilibriumMeasure(build(*sol), p, true);
    } catch (const NumericalError& e) {
      last_error = e.what();
    } catch (const ValidationError& e) {
      last_error = e.what();
    }
  }
  throw NumericalError("structure infeasible: " + last_error);
}

}  // namespace

EquilibriumMeasure solve_support(const Potential& p, CutStructure structure) {
  const Vec& vprime = p.reg_coeffs();
  if (p.reg_degree() == 0 && structure != CutStructure::hard_edge_one_cut)
    throw ValidationError("structure hint inconsistent: V_reg is constant");
  const auto centers = candidate_centers(p);

  switch (structure) {
    case CutStructure::one_cut: {
      std::vector<Vec> starts;
      for (const auto& c : centers)
        for (double s : {1.0, 1.5, 0.6, 2.5})
          starts.push_back({c.center - s * 2.0 / std::sqrt(c.curvature), c.center + s * 2.0 / std::sqrt(c.curvature)});
      auto cond = [&](const Vec& x) {
        const auto L = laurent(vprime, {x[0], x[1]}, {});
        return Vec{static_cast<double>(L.c[1]), static_cast<double>(L.c[2] - 2.0L)};
      };
      auto build = [&](const Vec& x) {
        SpectralCurve c;
        c.r_zeros = {std::min(x[0], x[1]), std::max(x[0], x[1])};
        c.h_coeffs = laurent(vprime, c.r_zeros, {}).h;
        return c;
      };
      return first_valid(p, starts, cond, build);
    }
    case CutStructure::symmetric_two_cut: {
      for (std::size_t j = 0; j < vprime.size(); j += 2)
        if (vprime[j] != 0.0) throw ValidationError("structure hint inconsistent: symmetric_two_cut needs an even V_reg");
      if (p.support().inf() != -p.support().sup())
        throw ValidationError("structure hint inconsistent: symmetric_two_cut needs a symmetric domain");
      std::vector<Vec> starts;
      for (const auto& c : centers) {
        const double m = std::abs(c.center);
        if (m == 0.0) continue;
        for (double s : {1.0, 0.7, 1.4}) {
          const double w = s * std::sqrt(2.0 / c.curvature);
          starts.push_back({m + w, std::max(0.05 * m, m - w)});
        }
      }
      auto cond = [&](const Vec& x) {
        const double a = std::abs(x[0]), b = std::abs(x[1]);
        const auto L = laurent(vprime, {-a, -b, b, a}, {});
        return Vec{static_cast<double>(L.c[1]), static_cast<double>(L.c[3] - 2.0L)};
      };
      auto build = [&](const Vec& x) {
        const double a = std::max(std::abs(x[0]), std::abs(x[1])), b = std::min(std::abs(x[0]), std::abs(x[1]));
        if (!(b > 0.0) || !(a > b)) throw NumericalError("two-cut solution collapsed to one cut");
        SpectralCurve c;
        c.r_zeros = {-a, -b, b, a};
        c.h_coeffs = laurent(vprime, c.r_zeros, {}).h;
        return c;
      };
      return first_valid(p, starts, cond, build);
    }
    case CutStructure::hard_edge_one_cut: {
      const double hi = p.support().sup(), lo = p.support().inf();
      if (!std::isfinite(hi) && !std::isfinite(lo))
        throw ValidationError("structure hint inconsistent: hard_edge_one_cut needs a finite domain endpoint");
      std::string last = "no finite endpoint";
      for (int side : {+1, -1}) {
        const double wall = side > 0 ? hi : lo;
        if (!std::isfinite(wall)) continue;
        std::vector<Vec> starts;
        for (double w : {4.0, 1.0, 0.25, 16.0, 64.0}) starts.push_back({wall - side * w});
        auto cond = [&](const Vec& x) {
          const auto L = laurent(vprime, {x[0]}, {wall});
          return Vec{static_cast<double>(L.c[1] - 2.0L)};
        };
        auto build = [&](const Vec& x) {
          if (!((wall - x[0]) * side > 0.0)) throw NumericalError("soft edge on the wrong side of the wall");
          SpectralCurve c;
          c.r_zeros = {x[0]};
          c.r_poles = {wall};
          c.h_coeffs = laurent(vprime, c.r_zeros, c.r_poles).h;
          return c;
        };
        try {
          return first_valid(p, starts, cond, build);
        } catch (const NumericalError& e) {
          last = e.what();
        }
      }
      throw NumericalError(last);
    }
  }
  throw ValidationError("unknown cut structure");
}

double quartic_a(double delta) {
  const double t = -2.0 + delta;
  return std::sqrt((-2.0 * t + 2.0 * std::sqrt(t * t + 12.0)) / 3.0);
}

double quartic_c(double delta) {
  // (1/3)(t + sqrt(t^2/4 + 3)) rewritten without cancellation near t = -2.
  const double t = -2.0 + delta;
  const double r = std::sqrt(t * t / 4.0 + 3.0);
  return ((t - 2.0) * delta / 4.0) / (t - r);
}

EquilibriumMeasure quartic_curve(double delta) {
  const double t = -2.0 + delta;
  const double a = quartic_a(delta), c = quartic_c(delta);
  SpectralCurve curve;
  curve.h_coeffs = {2.0 * c, 0.0, 1.0};
  curve.r_zeros = {-a, a};
  Potential p({0.0, t, 0.0, 1.0}, {}, IntervalSet::real_line(), 1);
  return EquilibriumMeasure(curve, p, delta >= 0.0);
}

EquilibriumMeasure marchenko_pastur_curve() {
  SpectralCurve curve;
  curve.h_coeffs = {-1.0};
  curve.r_zeros = {-4.0};
  curve.r_poles = {0.0};
  Potential p({-1.0}, {}, IntervalSet({{-kInf, 0.0}}), 1);
  return EquilibriumMeasure(curve, p, true);
}

EquilibriumMeasure example_curve(ExampleCurve which, double t) {
  switch (which) {
    case ExampleCurve::quartic: return quartic_curve(t + 2.0);
    case ExampleCurve::marchenko_pastur: return marchenko_pastur_curve();
  }
  throw ValidationError("unknown example curve");
}

}  // namespace scmm
