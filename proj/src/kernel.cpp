#include "scmm/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "scmm/errors.hpp"
#include "scmm/special.hpp"

namespace scmm {

namespace {

constexpr double kPi = std::numbers::pi;

bool near(double x, double y, double rel) {
  return std::abs(x - y) < rel * std::max({1.0, std::abs(x), std::abs(y)});
}

// sum_{j<n} q_j(x) q_j(y) as mantissa * exp(log_factor).
std::pair<double, double> christoffel_sum(const Recurrence& r, int n, double x, double y) {
  double qx = 1.0, qx_prev = 0.0, qy = 1.0, qy_prev = 0.0;
  double log_factor = -r.log_h[0];
  double sum = 1.0;
  for (int k = 0; k + 1 < n; ++k) {
    const double sb = std::sqrt(r.b[k]), sn = std::sqrt(r.b[k + 1]);
    const double nx = ((x - r.a[k]) * qx - sb * qx_prev) / sn;
    const double ny = ((y - r.a[k]) * qy - sb * qy_prev) / sn;
    qx_prev = qx, qx = nx, qy_prev = qy, qy = ny;
    sum += qx * qy;
    const double big = std::max({std::abs(qx), std::abs(qy), std::abs(qx_prev), std::abs(qy_prev)});
    if (big > 1e150) {
      const double s = 1.0 / big;
      qx *= s, qx_prev *= s, qy *= s, qy_prev *= s;
      sum *= s * s;
      log_factor += 2.0 * std::log(big);
    }
  }
  return {sum, log_factor};
}

}  // namespace

KernelValue cd_kernel(const Recurrence& r, const Potential& p, double x, double y) {
  const std::int64_t n64 = p.n();
  if (n64 > r.m_max) throw ValidationError("recurrence has degree " + std::to_string(r.m_max) + " < n = " + std::to_string(n64));
  const int n = static_cast<int>(n64);
  if (!p.support().contains(x) || !p.support().contains(y)) return {0.0, false};
  const double lwx = p.log_weight(x), lwy = p.log_weight(y);
  if (!std::isfinite(lwx) || !std::isfinite(lwy)) return {0.0, true};
  const double half_w = 0.5 * (lwx + lwy);
  const double sb = std::sqrt(r.b[n]);

  if (x == y) {
    const auto v = eval_orthonormal(r, n, x, true);
    const double m = sb * (v.dq * v.q_prev - v.dq_prev * v.q);
    return {m * std::exp(2.0 * v.log_factor + half_w), true};
  }
  if (near(x, y, 1e-8)) {
    const auto [s, lf] = christoffel_sum(r, n, x, y);
    return {s * std::exp(lf + half_w), true};
  }
  const auto vx = eval_orthonormal(r, n, x), vy = eval_orthonormal(r, n, y);
  const double m = sb * (vx.q * vy.q_prev - vy.q * vx.q_prev) / (x - y);
  return {m * std::exp(vx.log_factor + vy.log_factor + half_w), true};
}

ScalingMap scaling_map(const CriticalPoint& cp, bool mirrored, std::int64_t n) {
  ScalingMap m;
  m.x_star = cp.x_star;
  m.scale = std::pow(static_cast<double>(n), -cp.delta.value());
  m.orientation = mirrored ? -1 : 1;
  return m;
}

KernelValue scaled_kernel(const Recurrence& r, const Potential& p, const ScalingMap& m, double u, double v) {
  KernelValue k = cd_kernel(r, p, m.to_x(u), m.to_x(v));
  k.value *= m.scale;
  return k;
}

double sine_kernel(double u, double v) {
  const double d = kPi * (u - v);
  return d == 0.0 ? 1.0 : std::sin(d) / d;
}

double airy_kernel(double u, double v) {
  if (near(u, v, 1e-7)) {
    const auto a = airy(0.5 * (u + v));
    const double m = 0.5 * (u + v);
    return a.aip * a.aip - m * a.ai * a.ai;
  }
  const auto a = airy(u), b = airy(v);
  return (a.ai * b.aip - b.ai * a.aip) / (u - v);
}

double bessel_kernel(double a, double u, double v) {
  if (!(a > -1.0)) throw ValidationError("bessel_kernel: order must be > -1");
  if (!(u >= 0.0) || !(v >= 0.0)) throw ValidationError("bessel_kernel: arguments must be >= 0");
  if (near(u, v, 1e-7)) {
    const double s = std::sqrt(0.5 * (u + v));
    const double j = bessel_j(a, s);
    return 0.25 * (j * j - bessel_j(a + 1, s) * bessel_j(a - 1, s));
  }
  const double su = std::sqrt(u), sv = std::sqrt(v);
  const double num = bessel_j(a, su) * sv * bessel_j_prime(a, sv) - bessel_j(a, sv) * su * bessel_j_prime(a, su);
  return num / (2.0 * (u - v));
}

KernelGrid evaluate_grid(const std::function<KernelValue(double, double)>& f, const std::vector<double>& u_grid,
                         const std::vector<double>& v_grid, int threads) {
  KernelGrid g;
  g.u_grid = u_grid;
  g.v_grid = v_grid;
  g.values.assign(u_grid.size(), std::vector<double>(v_grid.size(), 0.0));
  g.in_domain.assign(u_grid.size(), std::vector<bool>(v_grid.size(), true));
  auto rows = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < u_grid.size(); i += step)
      for (std::size_t j = 0; j < v_grid.size(); ++j) {
        const auto k = f(u_grid[i], v_grid[j]);
        g.values[i][j] = k.value;
        g.in_domain[i][j] = k.in_domain;
      }
  };
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, u_grid.size()));
  if (workers == 1) {
    rows(0, 1);
  } else {
    // vector<bool> rows are written by one worker each, so no bit is shared across threads.
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(rows, t, workers);
    for (auto& th : pool) th.join();
  }
  return g;
}

double dx_weight(const QuadratureRule& q, const Potential& p, std::size_t i) {
  return std::exp(std::log(q.weights[i]) + q.log_scale - p.log_weight(q.nodes[i]));
}

double kernel_trace(const Recurrence& r, const Potential& p, const QuadratureRule& q) {
  double t = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double k = cd_kernel(r, p, q.nodes[i], q.nodes[i]).value;
    if (k != 0.0) t += dx_weight(q, p, i) * k;
  }
  return t;
}

double projection_residual(const Recurrence& r, const Potential& p, const QuadratureRule& q,
                           const std::vector<std::pair<double, double>>& probes) {
  double worst = 0.0;
  for (const auto& [x, z] : probes) {
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      const double y = q.nodes[i];
      const double a = cd_kernel(r, p, x, y).value;
      if (a == 0.0) continue;
      s += dx_weight(q, p, i) * a * cd_kernel(r, p, y, z).value;
    }
    worst = std::max(worst, std::abs(s - cd_kernel(r, p, x, z).value));
  }
  return worst;
}

std::string to_string(ReferenceKind k) {
  switch (k) {
    case ReferenceKind::sine: return "sine";
    case ReferenceKind::airy: return "airy";
    case ReferenceKind::bessel: return "bessel";
    case ReferenceKind::self: return "self";
  }
  return "?";
}

ReferenceKind parse_reference(const std::string& s) {
  if (s == "sine") return ReferenceKind::sine;
  if (s == "airy") return ReferenceKind::airy;
  if (s == "bessel") return ReferenceKind::bessel;
  if (s == "self") return ReferenceKind::self;
  throw ValidationError("unknown reference kernel '" + s + "'");
}

std::string ReferenceMap::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case ReferenceKind::sine: os << "c*sine(c*u, c*v), c = " << scale; break;
    case ReferenceKind::airy: os << "c*airy(c*u + s, c*v + s), c = " << scale << ", s = " << shift; break;
    case ReferenceKind::bessel: os << "c*bessel(" << order << "; -c*u, -c*v), c = " << scale; break;
    case ReferenceKind::self: os << "self (successive n)"; break;
  }
  return os.str();
}

double ReferenceMap::operator()(double u, double v) const {
  switch (kind) {
    case ReferenceKind::sine: return scale * sine_kernel(scale * u, scale * v);
    case ReferenceKind::airy: return scale * airy_kernel(scale * u + shift, scale * v + shift);
    case ReferenceKind::bessel: return scale * bessel_kernel(order, -scale * u, -scale * v);
    case ReferenceKind::self: break;
  }
  throw ValidationError("self reference has no closed form");
}

ReferenceMap reference_map(ReferenceKind kind, const ModelData& md) {
  ReferenceMap m;
  m.kind = kind;
  const auto& cp = md.point;
  auto need = [&](bool ok, const char* what) {
    if (!ok) throw ValidationError(std::string("reference ") + to_string(kind) + " needs " + what);
  };
  switch (kind) {
    case ReferenceKind::sine:
      need(cp.kind == PointKind::interior && cp.order_k == 0, "a regular interior point");
      m.scale = md.E.at(1).real() / kPi;
      break;
    case ReferenceKind::airy: {
      need(cp.kind == PointKind::edge && cp.order_k == 0, "a soft edge");
      const double e1 = md.E.at(1).real(), e0 = md.E.at(0).real();
      m.scale = std::cbrt(e1 * e1);
      m.shift = 2.0 / 3.0 * e0 / std::cbrt(e1);
      break;
    }
    case ReferenceKind::bessel: {
      need(cp.kind == PointKind::edge && cp.order_k == -1, "a hard edge");
      const double e0 = md.E.at(0).real();
      m.scale = 4.0 * e0 * e0;
      double charge = 0.0;
      for (const auto& b : md.B)
        if (b.location == cplx(0.0, 0.0)) charge += b.alpha;
      m.order = 2.0 * charge;
      break;
    }
    case ReferenceKind::self: break;
  }
  return m;
}

}  // namespace scmm
