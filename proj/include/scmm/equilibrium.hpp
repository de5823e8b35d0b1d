#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "scmm/intervals.hpp"
#include "scmm/potential.hpp"

namespace scmm {

// y(z) = sign * h(z) * prod sqrt(z - zero) / prod sqrt(z - pole), each factor on the
// principal branch. With zeros and poles alternating in pairs the cuts fall exactly
// on the support intervals.
struct SpectralCurve {
  std::vector<double> h_coeffs;  // ascending
  std::vector<double> r_zeros;   // soft edges
  std::vector<double> r_poles;   // hard edges
  int leading_sign = 1;

  // side selects the boundary value when z is real and on a cut: +1 above, -1 below.
  cplx eval(cplx z, int side = 1) const;

  // Same, but the offset z - root is supplied for one or two designated roots.
  // Used near branch points where z - root would cancel.
  cplx eval_offset(cplx z, int side, double root_a, cplx offset_a, double root_b = kInf,
                   cplx offset_b = 0.0) const;

  std::vector<double> branch_points() const;  // zeros and poles, ascending
  bool is_branch_point(double x) const;
};

struct Gap {
  double lo = 0.0;
  double hi = 0.0;
  double epsilon = 0.0;  // mass of the measure to the right of the gap
};

struct DensityValue {
  double value = 0.0;
  bool in_support = false;
};

class EquilibriumMeasure {
 public:
  // Builds the measure from a curve whose branch points pair up into support
  // intervals. Checks unit mass, and positivity of the density when requested.
  EquilibriumMeasure(SpectralCurve curve, const Potential& potential, bool require_positive = true);

  const IntervalSet& support() const { return support_; }
  const SpectralCurve& curve() const { return curve_; }
  const Potential& potential() const { return potential_; }
  double ell() const { return ell_; }
  const std::vector<Gap>& gaps() const { return gaps_; }
  const std::vector<double>& exterior_points() const { return exterior_; }
  double p_sup() const { return p_; }

  DensityValue density(double x) const;
  // int_x^inf rho.
  double mass_right(double x) const;
  double total_mass() const;
  // U(x) = int log|x - s| rho(s) ds.
  double log_potential(double x) const;
  // 2U(x) - V_reg(x) - ell.
  double variational_value(double x) const;

  // g(z) = int log(z - s) rho(s) ds. Real z < p needs side = +-1.
  cplx g(cplx z, int side = 0) const;
  // xi(z) = -1/2 int_p^z y. Real z < p needs side = +-1.
  cplx xi(cplx z, int side = 0) const;

  std::vector<cplx> h_roots() const;

 private:
  // rho(x(theta)) dx/dtheta on support interval i, x = lo + len sin^2(theta/2).
  double rho_theta(std::size_t i, double theta) const;
  double interval_mass(std::size_t i, double theta_lo, double theta_hi) const;
  cplx xi_boundary(double x, int side) const;
  cplx xi_from_p(cplx z) const;

  SpectralCurve curve_;
  Potential potential_;
  IntervalSet support_;
  double ell_ = 0.0;
  double p_ = 0.0;
  std::vector<double> exterior_;
  std::vector<Gap> gaps_;
};

enum class CutStructure { one_cut, symmetric_two_cut, hard_edge_one_cut };

CutStructure parse_cut_structure(const std::string& name);
std::string to_string(CutStructure s);

// Endpoints from the large-z conditions y ~ V_reg' - 2/z; h from the polynomial
// part of V_reg'/sqrt(R). Throws NumericalError for an infeasible structure
// (message names the offending point) or a failed root-find.
EquilibriumMeasure solve_support(const Potential& p, CutStructure structure);

// V = (t/2)x^2 + x^4/4 on R with t = -2 + delta, one-cut curve (x^2 + 2c) sqrt(x^2 - a^2).
// Continued analytically for delta < 0, where the density is not positive.
EquilibriumMeasure quartic_curve(double delta);
double quartic_a(double delta);
double quartic_c(double delta);
// V = -x on (-inf, 0], y = -sqrt((x+4)/x).
EquilibriumMeasure marchenko_pastur_curve();

enum class ExampleCurve { quartic, marchenko_pastur };
EquilibriumMeasure example_curve(ExampleCurve which, double t = -2.0);

struct VariationalEntry {
  double x = 0.0;
  double value = 0.0;  // 2U - V_reg - ell
  enum class Kind { equality, inequality, outside_domain } kind = Kind::equality;
  bool passed = false;
};

struct VariationalReport {
  std::vector<VariationalEntry> entries;
  double max_equality_residual = 0.0;
  double max_inequality_value = -kInf;
  bool ok() const;
};

VariationalReport check_variational(const EquilibriumMeasure& em, const std::vector<double>& grid,
                                    double equality_tol = 1e-6);

std::vector<Gap> filling_fractions(const EquilibriumMeasure& em);

}  // namespace scmm
