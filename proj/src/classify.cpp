#include "scmm/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "scmm/errors.hpp"
#include "scmm/integrate.hpp"
#include "scmm/series.hpp"

namespace scmm {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

double distance_to(const IntervalSet& s, const std::vector<double>& points, double x) {
  double d = kInf;
  for (const auto& iv : s.intervals()) d = std::min(d, x < iv.lo ? iv.lo - x : (x > iv.hi ? x - iv.hi : 0.0));
  for (double p : points) d = std::min(d, std::abs(x - p));
  return d;
}

std::int64_t clamp_n(double n) { return static_cast<std::int64_t>(std::min(n, 4e18)); }

// y(z) = -y_orig(-z) written again as a principal-branch product.
SpectralCurve mirror(const SpectralCurve& c) {
  SpectralCurve m;
  const int e = (static_cast<int>(c.r_zeros.size()) - static_cast<int>(c.r_poles.size())) / 2;
  const double sign = (e % 2 == 0) ? -1.0 : 1.0;
  for (std::size_t j = 0; j < c.h_coeffs.size(); ++j)
    m.h_coeffs.push_back(sign * ((j % 2 == 0) ? c.h_coeffs[j] : -c.h_coeffs[j]));
  for (double z : c.r_zeros) m.r_zeros.push_back(-z);
  for (double p : c.r_poles) m.r_poles.push_back(-p);
  std::sort(m.r_zeros.begin(), m.r_zeros.end());
  std::sort(m.r_poles.begin(), m.r_poles.end());
  m.leading_sign = c.leading_sign;
  return m;
}

struct Frame {
  SpectralCurve curve;
  Potential potential;
  double x;
  bool mirrored;
};

Frame make_frame(const EquilibriumMeasure& em, const Potential& p, const CriticalPoint& cp) {
  if (cp.kind == PointKind::edge && cp.side == EdgeSide::left)
    return {mirror(em.curve()), p.mirrored(), -cp.x_star, true};
  return {em.curve(), p, cp.x_star, false};
}

ScaledCurve scale_frame(const Frame& f, const CriticalPoint& cp, double n) {
  const double delta = cp.delta.value();
  const double radius = std::pow(n, -0.5 * delta);
  const double scale = std::pow(n, delta);
  ScaledCurve sc;
  sc.point = cp;
  sc.mirrored = f.mirrored;

  const auto& h = f.curve.h_coeffs;
  std::size_t deg = h.size();
  while (deg > 0 && h[deg - 1] == 0.0) --deg;
  if (deg == 0) throw NumericalError("spectral curve has h = 0");
  const auto roots = poly_roots(h);

  // Outer factor at x* + i0; the local factors are rescaled.
  cplx outer = static_cast<double>(f.curve.leading_sign) * h[deg - 1];
  for (const cplx& r : roots) {
    if (std::abs(r - f.x) < radius)
      sc.h_roots.push_back(scale * (r - f.x));
    else
      outer *= (f.x - r);
  }
  auto side_sqrt = [](double d) { return std::sqrt(cplx(d, 0.0)); };
  for (double z : f.curve.r_zeros) {
    if (std::abs(z - f.x) < radius)
      sc.r_zeros.push_back(scale * (z - f.x));
    else
      outer *= side_sqrt(f.x - z);
  }
  for (double p : f.curve.r_poles) {
    if (std::abs(p - f.x) < radius)
      sc.r_poles.push_back(scale * (p - f.x));
    else
      outer /= side_sqrt(f.x - p);
  }
  const int m_h = static_cast<int>(sc.h_roots.size());
  const int m_r = static_cast<int>(sc.r_zeros.size());
  const int m_p = static_cast<int>(sc.r_poles.size());
  const double balance = (m_h + 0.5 * (m_r - m_p) + 1.0) * delta;
  if (std::abs(balance - 1.0) > 1e-12)
    throw NumericalError("exponent-balance violation at x* = " + fmt(cp.x_star) + ": (m_h + (m_R - m_p)/2 + 1) Delta = " +
                         fmt(balance));
  sc.lead = outer;
  return sc;
}

}  // namespace

std::string to_string(PointKind k) {
  switch (k) {
    case PointKind::edge: return "edge";
    case PointKind::interior: return "interior";
    case PointKind::exterior: return "exterior";
  }
  return "?";
}

std::string to_string(EdgeSide s) {
  switch (s) {
    case EdgeSide::left: return "left";
    case EdgeSide::right: return "right";
    case EdgeSide::none: return "none";
  }
  return "?";
}

std::string Rational::to_string() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

Rational scaling_exponent(PointKind kind, int k) {
  switch (kind) {
    case PointKind::edge:
      if (k != -1 && (k < 0 || k % 2 != 0))
        throw ValidationError("edge order must be -1 or a nonnegative even integer, got " + std::to_string(k));
      return {2, 2 * k + 3};
    case PointKind::interior:
      if (k < 0) throw ValidationError("interior order must be >= 0");
      return {1, 2 * k + 1};
    case PointKind::exterior:
      if (k < 1) throw ValidationError("exterior order must be >= 1");
      return {1, 2 * k};
  }
  throw ValidationError("unknown point kind");
}

double ScaledCurve::exponent() const {
  return static_cast<double>(h_roots.size()) + 0.5 * (static_cast<double>(r_zeros.size()) - static_cast<double>(r_poles.size()));
}

cplx ScaledCurve::eval(cplx zeta) const {
  cplx y = lead;
  for (const cplx& r : h_roots) y *= (zeta - r);
  for (double z : r_zeros) y *= std::sqrt(zeta - z);
  for (double p : r_poles) y /= std::sqrt(zeta - p);
  return y;
}

std::vector<cplx> ScaledCurve::h_coeffs() const { return poly_from_roots<cplx>(lead, h_roots); }

ModelFamily constant_family(const EquilibriumMeasure& em) {
  ModelFamily f;
  f.name = "fixed";
  const Potential p = em.potential();
  f.potential = [p](double n) { return p.with_n(clamp_n(n)); };
  f.measure = [em](double) { return em; };
  return f;
}

std::vector<CriticalPoint> find_critical_points(const EquilibriumMeasure& em, const Potential& p,
                                                double proximity_tol, double cluster_tol) {
  if (!(proximity_tol > 0.0) || !(cluster_tol > 0.0)) throw ValidationError("tolerances must be positive");
  enum class Src { zero, pole, h, sing, ext };
  struct Cand {
    double loc;
    Src src;
  };
  std::vector<Cand> cands;
  const auto& ext = em.exterior_points();
  for (double z : em.curve().r_zeros) cands.push_back({z, Src::zero});
  for (double q : em.curve().r_poles) cands.push_back({q, Src::pole});
  for (const cplx& r : em.h_roots()) {
    const double d = std::hypot(r.imag(), distance_to(em.support(), ext, r.real()));
    if (d < proximity_tol) cands.push_back({r.real(), Src::h});
  }
  for (const auto& s : p.singularities()) {
    if (s.alpha == 0.0 && !s.has_poles()) continue;
    const double d = std::hypot(s.location.imag(), distance_to(em.support(), ext, s.location.real()));
    if (d < proximity_tol) cands.push_back({s.location.real(), Src::sing});
  }
  for (double e : ext) cands.push_back({e, Src::ext});
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.loc < b.loc; });

  for (std::size_t i = 0; i + 1 < cands.size(); ++i) {
    const double gap = cands[i + 1].loc - cands[i].loc;
    if (gap > cluster_tol && gap < 100.0 * cluster_tol)
      throw NumericalError("ambiguous clustering near x = " + fmt(cands[i].loc) + ": points " + fmt(gap) +
                           " apart fit both as one cluster and as two");
  }

  std::vector<CriticalPoint> out;
  for (std::size_t i = 0; i < cands.size();) {
    std::size_t j = i + 1;
    while (j < cands.size() && cands[j].loc - cands[j - 1].loc <= cluster_tol) ++j;
    CriticalPoint cp;
    double sum = 0.0, edge_loc = 0.0;
    int count = 0;
    bool has_edge = false;
    for (std::size_t q = i; q < j; ++q) {
      sum += cands[q].loc;
      ++count;
      switch (cands[q].src) {
        case Src::zero: ++cp.m_r; has_edge = true; edge_loc = cands[q].loc; break;
        case Src::pole: ++cp.m_p; has_edge = true; edge_loc = cands[q].loc; break;
        case Src::h: ++cp.m_h; break;
        default: break;
      }
    }
    cp.x_star = has_edge ? edge_loc : sum / count;
    if (cp.m_r + cp.m_p > 1)
      throw NumericalError("colliding branch points near x = " + fmt(cp.x_star) + " are not supported");
    if (has_edge) {
      cp.kind = PointKind::edge;
      cp.order_k = cp.m_h - cp.m_p;
      const bool right = std::any_of(em.support().intervals().begin(), em.support().intervals().end(),
                                     [&](const Interval& iv) { return iv.hi == edge_loc; });
      cp.side = right ? EdgeSide::right : EdgeSide::left;
    } else if (em.support().contains_interior(cp.x_star)) {
      if (cp.m_h % 2 != 0)
        throw NumericalError("odd number of h zeros at interior point x = " + fmt(cp.x_star));
      cp.kind = PointKind::interior;
      cp.order_k = cp.m_h / 2;
    } else {
      if (cp.m_h % 2 != 1)
        throw NumericalError("exterior point x = " + fmt(cp.x_star) + " needs an odd number of h zeros");
      cp.kind = PointKind::exterior;
      cp.order_k = (cp.m_h + 1) / 2;
    }
    cp.delta = scaling_exponent(cp.kind, cp.order_k);
    out.push_back(cp);
    i = j;
  }
  return out;
}

std::vector<CriticalPoint> find_critical_points(const ModelFamily& family, double proximity_tol) {
  return find_critical_points(family.measure(kClassifyN), family.potential(kClassifyN), proximity_tol);
}

ScaledCurve scaled_curve(const ModelFamily& family, const CriticalPoint& cp, double n) {
  const auto em = family.measure(n);
  return scale_frame(make_frame(em, family.potential(n), cp), cp, n);
}

ScaledCurve scaled_curve(const EquilibriumMeasure& em, const CriticalPoint& cp, double n) {
  return scale_frame(make_frame(em, em.potential(), cp), cp, n);
}

std::vector<cplx> series_at_infinity(const ScaledCurve& curve, int order) {
  if (order < 0) throw ValidationError("series order must be >= 0");
  std::vector<cplx> roots;
  std::vector<double> gammas;
  for (const cplx& r : curve.h_roots) {
    roots.push_back(r);
    gammas.push_back(1.0);
  }
  for (double z : curve.r_zeros) {
    roots.push_back(z);
    gammas.push_back(0.5);
  }
  for (double p : curve.r_poles) {
    roots.push_back(p);
    gammas.push_back(-0.5);
  }
  auto s = product_power_series<cplx>(roots, gammas, order);
  for (auto& c : s) c *= curve.lead;
  return s;
}

namespace {

// Constant term of xihat = -1/2 int_{phat}^zeta yhat after the series part is removed.
cplx integration_constant(const ScaledCurve& sc, const std::vector<cplx>& q) {
  double phat = 0.0;
  bool has_r = false;
  for (double z : sc.r_zeros) phat = has_r ? std::max(phat, z) : z, has_r = true;
  for (double p : sc.r_poles) phat = has_r ? std::max(phat, p) : p, has_r = true;
  double reach = 1.0;
  for (const cplx& r : sc.h_roots) reach = std::max(reach, std::abs(r));
  for (double z : sc.r_zeros) reach = std::max(reach, std::abs(z));
  for (double p : sc.r_poles) reach = std::max(reach, std::abs(p));
  const cplx z0 = cplx(phat, 0.0) + cplx(0.0, 30.0 * reach);
  const cplx dz = z0 - phat;
  auto f = [&](double u) -> cplx {
    const cplx off = dz * (u * u);
    cplx y = sc.lead;
    for (const cplx& r : sc.h_roots) y *= (phat + off - r);
    for (double z : sc.r_zeros) y *= (z == phat) ? std::sqrt(off) : std::sqrt(phat + off - z);
    for (double p : sc.r_poles) y /= (p == phat) ? std::sqrt(off) : std::sqrt(phat + off - p);
    return y * (2.0 * u) * dz;
  };
  const cplx xi0 = -0.5 * integrate(f, 0.0, 1.0, 1e-15, 40);
  // Series part: -1/2 sum q_l z^{m-l+1}/(m-l+1), with a log where m - l = -1.
  const double m = sc.exponent();
  cplx series = 0.0;
  for (std::size_t l = 0; l < q.size(); ++l) {
    const double pw = m - static_cast<double>(l) + 1.0;
    if (std::abs(pw) < 1e-12)
      series += -0.5 * q[l] * std::log(z0);
    else
      series += -0.5 * q[l] * std::pow(z0, pw) / pw;
  }
  return xi0 - series;
}

double scaled_ratio_check(const ScaledCurve& a, const ScaledCurve& b) {
  auto mags = [](const ScaledCurve& c) {
    std::vector<double> v;
    for (const cplx& r : c.h_roots) v.push_back(std::abs(r));
    for (double z : c.r_zeros) v.push_back(std::abs(z));
    for (double p : c.r_poles) v.push_back(std::abs(p));
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto va = mags(a), vb = mags(b);
  if (va.size() != vb.size()) return kInf;
  double worst = 1.0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    if (va[i] < 1e-9 && vb[i] < 1e-9) continue;
    if (va[i] < 1e-9 || vb[i] < 1e-9) return kInf;
    worst = std::max(worst, std::max(va[i] / vb[i], vb[i] / va[i]));
  }
  return worst;
}

}  // namespace

ModelData extract_model_data(const ModelFamily& family, const CriticalPoint& cp, double n, double probe_n) {
  ModelData md;
  md.point = cp;
  md.probe_n = probe_n;
  const int k = cp.order_k;
  const double delta = cp.delta.value();

  const auto em_probe = family.measure(probe_n);
  const auto pot_probe = family.potential(probe_n);
  const Frame frame = make_frame(em_probe, pot_probe, cp);
  md.curve = scale_frame(frame, cp, probe_n);
  md.mirrored = frame.mirrored;
  const ScaledCurve twice = scaled_curve(family, cp, 2.0 * probe_n);
  if (scaled_ratio_check(md.curve, twice) > 2.0)
    throw NumericalError("x* = " + fmt(cp.x_star) + " does not scale appropriately between n and 2n");

  const int order = std::max(2 * k + 6, 4);
  md.q_hat = series_at_infinity(md.curve, order);
  const auto& q = md.q_hat;
  const cplx I(0.0, 1.0);
  const cplx C = integration_constant(md.curve, q);

  switch (cp.kind) {
    case PointKind::edge: {
      md.E.assign(k + 2, 0.0);
      for (int l = 0; l <= k + 1; ++l)
        md.E[k + 1 - l] = (2.0 * k + 3.0) * q[l] / (2.0 * (2.0 * k + 3.0 - 2.0 * l));
      md.tau_inf = md.E;
      const double lead = md.tau_inf[k + 1].real();
      if (k == -1 ? !(lead < 0.0) : !(lead > 0.0))
        throw NumericalError("edge sign constraint on tau_inf violated");
      break;
    }
    case PointKind::interior: {
      md.E.assign(2 * k + 2, 0.0);
      for (int l = 0; l <= 2 * k; ++l)
        md.E[2 * k + 1 - l] = (2.0 * k + 1.0) * q[l] / (2.0 * I * (2.0 * k + 1.0 - l));
      md.E[0] = I * (2.0 * k + 1.0) * C;
      md.tau_inf = md.E;
      // Finite-n phase: n i xi_+(x*) + pi alpha^+, alpha^+ the charge right of the local disc.
      const auto em_n = family.measure(n);
      const auto pot_n = family.potential(n);
      const double radius = std::pow(probe_n, -0.5 * delta);
      for (const auto& s : pot_n.singularities())
        if (s.location.real() > cp.x_star + radius) md.alpha_right += s.alpha;
      const cplx xi_plus = em_n.xi(cplx(cp.x_star, 0.0), 1);
      md.tau_inf[0] = md.E[0] + (2.0 * k + 1.0) * (n * I * xi_plus + kPi * md.alpha_right);
      if (!(md.tau_inf[2 * k + 1].real() > 0.0)) throw NumericalError("interior sign constraint on tau_inf violated");
      break;
    }
    case PointKind::exterior: {
      md.E.assign(2 * k + 1, 0.0);
      for (int l = 0; l <= 2 * k - 1; ++l) md.E[2 * k - l] = static_cast<double>(k) * q[l] / (2.0 * k - l);
      md.c_hat = 0.5 * q[2 * k].real();
      md.E[0] = -2.0 * k * C;
      md.tau_inf = md.E;
      if (!(md.tau_inf[2 * k].real() > 0.0)) throw NumericalError("exterior sign constraint on tau_inf violated");
      break;
    }
  }

  // I and B: images of the domain and the singular set inside the shrinking disc.
  const double radius = std::pow(probe_n, -0.5 * delta);
  const double scale = std::pow(probe_n, delta);
  std::vector<Interval> ivs;
  for (const auto& iv : frame.potential.support().intervals()) {
    if (iv.hi < frame.x - radius || iv.lo > frame.x + radius) continue;
    const double lo = iv.lo > frame.x - radius ? scale * (iv.lo - frame.x) : -kInf;
    const double hi = iv.hi < frame.x + radius ? scale * (iv.hi - frame.x) : kInf;
    ivs.push_back({lo, hi});
  }
  md.I = IntervalSet(std::move(ivs));
  for (const auto& s : frame.potential.singularities()) {
    if (std::abs(s.location - frame.x) >= radius) continue;
    ScaledSingularity b;
    b.location = scale * (s.location - frame.x);
    b.alpha = s.alpha;
    for (const cplx& t : s.pole_coeffs) b.tau.push_back(scale * t);
    md.B.push_back(b);
  }
  std::sort(md.B.begin(), md.B.end(), [](const ScaledSingularity& a, const ScaledSingularity& b) {
    return a.location.real() < b.location.real() ||
           (a.location.real() == b.location.real() && a.location.imag() < b.location.imag());
  });
  return md;
}

ModelData extract_model_data(const EquilibriumMeasure& em, const Potential& p, const CriticalPoint& cp, double n) {
  ModelFamily f = constant_family(em);
  f.potential = [p](double m) { return p.with_n(clamp_n(m)); };
  return extract_model_data(f, cp, n);
}

}  // namespace scmm
