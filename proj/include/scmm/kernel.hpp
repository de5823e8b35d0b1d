#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "scmm/classify.hpp"
#include "scmm/orthopoly.hpp"
#include "scmm/potential.hpp"

namespace scmm {

struct KernelValue {
  double value = 0.0;
  bool in_domain = true;  // false when a point lies outside the support (value is then 0)
};

// K_n(x,y) with n = p.n(); needs r.m_max >= n. Points within 1e-8 relative of each
// other use the confluent form from the differentiated recurrence.
KernelValue cd_kernel(const Recurrence& r, const Potential& p, double x, double y);

// x = x* + orientation * scale * u with scale = n^{-Delta}; orientation -1 for reflected edges.
struct ScalingMap {
  double x_star = 0.0;
  double scale = 1.0;
  int orientation = 1;
  double to_x(double u) const { return x_star + orientation * scale * u; }
};
ScalingMap scaling_map(const CriticalPoint& cp, bool mirrored, std::int64_t n);

// n^{-Delta} K_n(x(u), x(v)).
KernelValue scaled_kernel(const Recurrence& r, const Potential& p, const ScalingMap& m, double u, double v);

double sine_kernel(double u, double v);
double airy_kernel(double u, double v);
// Hard-edge kernel on u, v >= 0 with order a > -1.
double bessel_kernel(double a, double u, double v);

struct KernelGrid {
  std::vector<double> u_grid, v_grid;
  std::vector<std::vector<double>> values;
  std::vector<std::vector<bool>> in_domain;
  std::int64_t n = 0;
  double x_star = 0.0;
  double delta = 0.0;
  bool scaled = false;
};

// Evaluates f on u_grid x v_grid, splitting rows over up to `threads` workers.
KernelGrid evaluate_grid(const std::function<KernelValue(double, double)>& f, const std::vector<double>& u_grid,
                         const std::vector<double>& v_grid, int threads = 1);

// The plain dx weight of node i: stored weight divided by w(x_i) e^{-log_scale}.
double dx_weight(const QuadratureRule& q, const Potential& p, std::size_t i);

// int K_n(x,x) dx with the rule's nodes.
double kernel_trace(const Recurrence& r, const Potential& p, const QuadratureRule& q);
// max over probes of |int K(x,y) K(y,z) dy - K(x,z)|.
double projection_residual(const Recurrence& r, const Potential& p, const QuadratureRule& q,
                           const std::vector<std::pair<double, double>>& probes);

enum class ReferenceKind { sine, airy, bessel, self };
std::string to_string(ReferenceKind k);
ReferenceKind parse_reference(const std::string& s);

// Closed-form limit composed with the affine map fixed by the model data:
//   sine   c S(cu, cv),               c = E_1 / pi
//   airy   c K_Ai(cu + s, cv + s),    c = E_1^{2/3}, s = (2/3) E_0 E_1^{-1/3}
//   bessel c K_Bes(a; -cu, -cv),      c = 4 E_0^2, a = 2 * (charge at the edge)
struct ReferenceMap {
  ReferenceKind kind = ReferenceKind::self;
  double scale = 1.0;
  double shift = 0.0;
  double order = 0.0;
  std::string describe() const;
  double operator()(double u, double v) const;
};
ReferenceMap reference_map(ReferenceKind kind, const ModelData& md);

}  // namespace scmm
