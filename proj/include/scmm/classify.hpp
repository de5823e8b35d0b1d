#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "scmm/equilibrium.hpp"
#include "scmm/intervals.hpp"
#include "scmm/potential.hpp"

namespace scmm {

enum class PointKind { edge, interior, exterior };
enum class EdgeSide { left, right, none };

std::string to_string(PointKind k);
std::string to_string(EdgeSide s);

struct Rational {
  int num = 0;
  int den = 1;
  double value() const { return static_cast<double>(num) / den; }
  std::string to_string() const;
};

struct CriticalPoint {
  double x_star = 0.0;
  PointKind kind = PointKind::edge;
  int order_k = 0;
  Rational delta;
  EdgeSide side = EdgeSide::none;
  // Multiplicities of the local factors: zeros of h, zeros and poles of R.
  int m_h = 0;
  int m_r = 0;
  int m_p = 0;
};

// Delta for a kind/order pair; throws ValidationError for orders the kind does not admit.
Rational scaling_exponent(PointKind kind, int k);

// The pieces of y that collide with x* as n grows, in the scaled variable:
// yhat(zeta) = lead * prod (zeta - h_i) * prod sqrt(zeta - z_j) / prod sqrt(zeta - p_j).
// Left edges are described after the reflection z -> -z.
struct ScaledCurve {
  CriticalPoint point;
  bool mirrored = false;
  cplx lead;
  std::vector<cplx> h_roots;
  std::vector<double> r_zeros;
  std::vector<double> r_poles;

  // zeta^m with m = m_h + (m_R - m_p)/2.
  double exponent() const;
  cplx eval(cplx zeta) const;
  // Ascending coefficients of the polynomial factor lead * prod (zeta - h_i).
  std::vector<cplx> h_coeffs() const;
};

// A one-parameter family n -> (potential at n, its equilibrium curve). Double-scaling
// families move the potential with n; a fixed config gives a constant family.
struct ModelFamily {
  std::string name;
  std::function<Potential(double n)> potential;
  std::function<EquilibriumMeasure(double n)> measure;
};

ModelFamily constant_family(const EquilibriumMeasure& em);

// Families are classified at this n, where colliding roots sit within ~1e-10 of x*.
inline constexpr double kClassifyN = 1e30;
std::vector<CriticalPoint> find_critical_points(const ModelFamily& family, double proximity_tol = 1e-6);

struct ScaledSingularity {
  cplx location;
  double alpha = 0.0;
  std::vector<cplx> tau;  // n^Delta t_{b,j}
};

struct ModelData {
  CriticalPoint point;
  bool mirrored = false;
  IntervalSet I;
  std::vector<ScaledSingularity> B;
  std::vector<cplx> tau_inf;  // tau_{inf,0..}
  double c_hat = 0.0;         // exterior case only
  std::vector<cplx> E;        // E_j(0), j = 0..
  std::vector<cplx> q_hat;    // large-zeta coefficients of yhat
  ScaledCurve curve;
  double probe_n = 0.0;
  double alpha_right = 0.0;   // total charge strictly right of the local disc
};

std::vector<CriticalPoint> find_critical_points(const EquilibriumMeasure& em, const Potential& p,
                                                double proximity_tol = 1e-6, double cluster_tol = 1e-7);

// yhat at finite n from the family; n^{-Delta/2} sets the disc that collects colliding roots.
ScaledCurve scaled_curve(const ModelFamily& family, const CriticalPoint& cp, double n);
ScaledCurve scaled_curve(const EquilibriumMeasure& em, const CriticalPoint& cp, double n);

// q_l for yhat(zeta) = zeta^m sum_l q_l zeta^{-l}, l = 0..order.
std::vector<cplx> series_at_infinity(const ScaledCurve& curve, int order);

inline constexpr double kLimitProbeN = 1e15;

// Limits are taken at probe_n (and 2*probe_n for the scaling check); n enters only
// through the finite-n part of the interior tau_{inf,0}.
ModelData extract_model_data(const ModelFamily& family, const CriticalPoint& cp, double n,
                             double probe_n = kLimitProbeN);
ModelData extract_model_data(const EquilibriumMeasure& em, const Potential& p, const CriticalPoint& cp,
                             double n);

}  // namespace scmm
