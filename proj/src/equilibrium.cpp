#include "scmm/equilibrium.hpp"

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

cplx branch_sqrt(cplx d, int side) {
  if (d.imag() == 0.0) d = cplx(d.real(), side >= 0 ? 0.0 : -0.0);
  return std::sqrt(d);
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

cplx SpectralCurve::eval(cplx z, int side) const {
  return eval_offset(z, side, kInf, 0.0);
}

cplx SpectralCurve::eval_offset(cplx z, int side, double root_a, cplx offset_a, double root_b,
                                cplx offset_b) const {
  auto offset = [&](double r) -> cplx {
    if (r == root_a) return offset_a;
    if (r == root_b) return offset_b;
    return z - r;
  };
  cplx y = static_cast<double>(leading_sign) * poly_eval(h_coeffs, z);
  for (double r : r_zeros) y *= branch_sqrt(offset(r), side);
  for (double r : r_poles) y /= branch_sqrt(offset(r), side);
  return y;
}

std::vector<double> SpectralCurve::branch_points() const {
  std::vector<double> out = r_zeros;
  out.insert(out.end(), r_poles.begin(), r_poles.end());
  std::sort(out.begin(), out.end());
  return out;
}

bool SpectralCurve::is_branch_point(double x) const {
  return std::find(r_zeros.begin(), r_zeros.end(), x) != r_zeros.end() ||
         std::find(r_poles.begin(), r_poles.end(), x) != r_poles.end();
}

EquilibriumMeasure::EquilibriumMeasure(SpectralCurve curve, const Potential& potential,
                                       bool require_positive)
    : curve_(std::move(curve)), potential_(potential) {
  std::sort(curve_.r_zeros.begin(), curve_.r_zeros.end());
  std::sort(curve_.r_poles.begin(), curve_.r_poles.end());
  const auto bp = curve_.branch_points();
  if (bp.empty() || bp.size() % 2 != 0)
    throw ValidationError("invariant violation: spectral curve needs an even, nonzero number of branch points");
  std::vector<Interval> ivs;
  for (std::size_t i = 0; i < bp.size(); i += 2) ivs.push_back({bp[i], bp[i + 1]});
  support_ = IntervalSet(std::move(ivs));
  p_ = support_.sup();

  const double mass = total_mass();
  if (std::abs(mass - 1.0) > 1e-10)
    throw NumericalError("equilibrium measure has mass " + fmt(mass) + ", expected 1");

  if (require_positive) {
    for (std::size_t i = 0; i < support_.size(); ++i) {
      const int samples = 400;
      double scale = 0.0, worst = 0.0, worst_x = 0.0;
      for (int s = 0; s < samples; ++s) {
        const double th = kPi * (s + 0.5) / samples;
        const double x = support_[i].lo + support_[i].length() * std::pow(std::sin(th / 2), 2);
        const double r = density(x).value;
        scale = std::max(scale, std::abs(r));
        if (r < worst) {
          worst = r;
          worst_x = x;
        }
      }
      if (worst < -1e-12 * std::max(1.0, scale))
        throw NumericalError("density negative at x = " + fmt(worst_x) + " (rho = " + fmt(worst) +
                             "); try another cut structure");
    }
    for (const auto& iv : support_.intervals()) {
      const bool inside = std::any_of(potential_.support().intervals().begin(), potential_.support().intervals().end(),
                                      [&](const Interval& d) { return d.lo <= iv.lo && iv.hi <= d.hi; });
      if (!inside)
        throw NumericalError("support interval [" + fmt(iv.lo) + ", " + fmt(iv.hi) + "] leaves the domain");
    }
  }

  const Interval& first = support_[0];
  const double mid = 0.5 * (first.lo + first.hi);
  ell_ = 2.0 * log_potential(mid) - potential_.vreg(mid);

  // Equality points off the support: real zeros of h in the domain where xi vanishes.
  for (const cplx& r : h_roots()) {
    if (std::abs(r.imag()) > 1e-9 * std::max(1.0, std::abs(r))) continue;
    const double x = r.real();
    if (support_.contains(x) || !potential_.support().contains(x)) continue;
    const double re_xi = x > p_ ? xi(cplx(x, 0.0)).real() : xi(cplx(x, 0.0), 1).real();
    if (std::abs(re_xi) < 1e-9 && std::find(exterior_.begin(), exterior_.end(), x) == exterior_.end())
      exterior_.push_back(x);
  }
  std::sort(exterior_.begin(), exterior_.end());
  if (!exterior_.empty()) p_ = std::max(p_, exterior_.back());

  // Gaps: components of R minus (support union exterior points).
  std::vector<Interval> blocks = support_.intervals();
  for (double e : exterior_) blocks.push_back({e, e});
  std::sort(blocks.begin(), blocks.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  double left = -kInf;
  for (const auto& b : blocks) {
    if (left < b.lo) {
      const double probe = std::isfinite(left) ? 0.5 * (left + b.lo) : b.lo - 1.0;
      gaps_.push_back({left, b.lo, mass_right(probe)});
    }
    left = std::max(left, b.hi);
  }
  gaps_.push_back({left, kInf, 0.0});
}

double EquilibriumMeasure::rho_theta(std::size_t i, double theta) const {
  const Interval& iv = support_[i];
  const double len = iv.length();
  const double s = std::sin(0.5 * theta), c = std::cos(0.5 * theta);
  const double x = iv.lo + len * s * s;
  const cplx y = curve_.eval_offset(cplx(x, 0.0), 1, iv.lo, cplx(len * s * s, 0.0), iv.hi,
                                    cplx(-len * c * c, 0.0));
  return y.imag() / (2.0 * kPi) * 0.5 * len * std::sin(theta);
}

double EquilibriumMeasure::interval_mass(std::size_t i, double a, double b) const {
  if (!(a < b)) return 0.0;
  return integrate([&](double th) { return rho_theta(i, th); }, a, b, 1e-14);
}

DensityValue EquilibriumMeasure::density(double x) const {
  for (const auto& iv : support_.intervals()) {
    if (x < iv.lo || x > iv.hi) continue;
    if (x == iv.lo || x == iv.hi) {
      // Soft edges vanish; hard edges diverge.
      const bool hard = std::find(curve_.r_poles.begin(), curve_.r_poles.end(), x) != curve_.r_poles.end();
      return {hard ? kInf : 0.0, true};
    }
    return {curve_.eval(cplx(x, 0.0), 1).imag() / (2.0 * kPi), true};
  }
  return {0.0, false};
}

double EquilibriumMeasure::total_mass() const {
  double m = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) m += interval_mass(i, 0.0, kPi);
  return m;
}

double EquilibriumMeasure::mass_right(double x) const {
  double m = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    const Interval& iv = support_[i];
    if (x <= iv.lo) {
      m += interval_mass(i, 0.0, kPi);
    } else if (x < iv.hi) {
      const double th = 2.0 * std::asin(std::sqrt((x - iv.lo) / iv.length()));
      m += interval_mass(i, th, kPi);
    }
  }
  return m;
}

double EquilibriumMeasure::log_potential(double x) const {
  double u = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    const Interval& iv = support_[i];
    const double len = iv.length();
    if (x >= iv.lo && x <= iv.hi) {
      const double tx = 2.0 * std::asin(std::sqrt(std::clamp((x - iv.lo) / len, 0.0, 1.0)));
      auto f = [&](double th) {
        const double dist = len * std::abs(std::sin(0.5 * (th + tx)) * std::sin(0.5 * (th - tx)));
        return std::log(std::max(dist, 1e-300)) * rho_theta(i, th);
      };
      if (tx > 0.0) u += integrate_ends(f, 0.0, tx);
      if (tx < kPi) u += integrate_ends(f, tx, kPi);
    } else {
      u += integrate_ends(
          [&](double th) {
            const double s = std::sin(0.5 * th), c = std::cos(0.5 * th);
            const double dist = x < iv.lo ? (iv.lo - x) + len * s * s : (x - iv.hi) + len * c * c;
            return std::log(std::max(dist, 1e-300)) * rho_theta(i, th);
          },
          0.0, kPi);
    }
  }
  return u;
}

double EquilibriumMeasure::variational_value(double x) const {
  return 2.0 * log_potential(x) - potential_.vreg(x) - ell_;
}

cplx EquilibriumMeasure::g(cplx z, int side) const {
  if (z.imag() == 0.0) {
    const double x = z.real();
    if (x >= p_) return log_potential(x);
    if (side == 0) throw ValidationError("g evaluated on its cut without a side");
    return cplx(log_potential(x), side * kPi * mass_right(x));
  }
  cplx total = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    const Interval& iv = support_[i];
    const double len = iv.length();
    total += integrate_ends(
        [&](double th) {
          const double s = std::sin(0.5 * th);
          return std::log(z - (iv.lo + len * s * s)) * rho_theta(i, th);
        },
        0.0, kPi);
  }
  return total;
}

cplx EquilibriumMeasure::xi_from_p(cplx z) const {
  const cplx dz = z - p_;
  const bool edge = curve_.is_branch_point(p_);
  auto f = [&](double u) -> cplx {
    const cplx off = dz * (u * u);
    const cplx s = p_ + off;
    const cplx y = edge ? curve_.eval_offset(s, 1, p_, off) : curve_.eval(s, 1);
    return y * (2.0 * u) * dz;
  };
  return -0.5 * integrate(f, 0.0, 1.0, 1e-14);
}

cplx EquilibriumMeasure::xi_boundary(double x, int side) const {
  // xi_(+-)(x) = 1/2 int_x^p y_(+-)(s) ds, piecewise between branch points.
  std::vector<double> nodes{x};
  for (double b : curve_.branch_points())
    if (b > x && b < p_) nodes.push_back(b);
  nodes.push_back(p_);
  cplx total = 0.0;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double a = nodes[k], b = nodes[k + 1], len = b - a;
    if (!(len > 0.0)) continue;
    auto f = [&](double th) -> cplx {
      const double s = std::sin(0.5 * th), c = std::cos(0.5 * th);
      const double pt = a + len * s * s;
      const cplx y = curve_.eval_offset(cplx(pt, 0.0), side, a, cplx(len * s * s, 0.0), b,
                                        cplx(-len * c * c, 0.0));
      return y * (0.5 * len * std::sin(th));
    };
    total += integrate(f, 0.0, kPi, 1e-14);
  }
  return 0.5 * total;
}

cplx EquilibriumMeasure::xi(cplx z, int side) const {
  if (z.imag() == 0.0) {
    const double x = z.real();
    if (x == p_) return 0.0;
    if (x > p_) return xi_from_p(z);
    if (side == 0) throw ValidationError("xi evaluated on the cut (-inf, p] without a side");
    return xi_boundary(x, side);
  }
  if (z.real() >= p_) return xi_from_p(z);
  // Boundary value at Re z, then a vertical segment into the half-plane.
  const int sd = z.imag() > 0 ? 1 : -1;
  const double x = z.real();
  const double h = z.imag();
  const cplx base = xi_boundary(x, sd);
  const bool at_branch = curve_.is_branch_point(x);
  auto f = [&](double u) -> cplx {
    const cplx off(0.0, h * u * u);
    const cplx y = at_branch ? curve_.eval_offset(x + off, sd, x, off) : curve_.eval(x + off, sd);
    return y * cplx(0.0, h) * (2.0 * u);
  };
  return base - 0.5 * integrate(f, 0.0, 1.0, 1e-14);
}

std::vector<cplx> EquilibriumMeasure::h_roots() const { return poly_roots(curve_.h_coeffs); }

bool VariationalReport::ok() const {
  return std::all_of(entries.begin(), entries.end(), [](const VariationalEntry& e) { return e.passed; });
}

VariationalReport check_variational(const EquilibriumMeasure& em, const std::vector<double>& grid,
                                    double equality_tol) {
  VariationalReport rep;
  const auto& ext = em.exterior_points();
  for (double x : grid) {
    VariationalEntry e;
    e.x = x;
    if (!em.potential().support().contains(x)) {
      e.kind = VariationalEntry::Kind::outside_domain;
      e.passed = true;
      rep.entries.push_back(e);
      continue;
    }
    e.value = em.variational_value(x);
    const bool on_j = em.support().contains(x) ||
                      std::any_of(ext.begin(), ext.end(), [x](double p) { return std::abs(p - x) < 1e-12; });
    if (on_j) {
      e.kind = VariationalEntry::Kind::equality;
      e.passed = std::abs(e.value) < equality_tol;
      rep.max_equality_residual = std::max(rep.max_equality_residual, std::abs(e.value));
    } else {
      e.kind = VariationalEntry::Kind::inequality;
      e.passed = e.value < 0.0;
      rep.max_inequality_value = std::max(rep.max_inequality_value, e.value);
    }
    rep.entries.push_back(e);
  }
  return rep;
}

std::vector<Gap> filling_fractions(const EquilibriumMeasure& em) { return em.gaps(); }

CutStructure parse_cut_structure(const std::string& name) {
  if (name == "one_cut") return CutStructure::one_cut;
  if (name == "symmetric_two_cut") return CutStructure::symmetric_two_cut;
  if (name == "hard_edge_one_cut") return CutStructure::hard_edge_one_cut;
  throw ValidationError("unknown cut structure \"" + name + "\"");
}

std::string to_string(CutStructure s) {
  switch (s) {
    case CutStructure::one_cut: return "one_cut";
    case CutStructure::symmetric_two_cut: return "symmetric_two_cut";
    case CutStructure::hard_edge_one_cut: return "hard_edge_one_cut";
  }
  return "?";
}

}  // namespace scmm
