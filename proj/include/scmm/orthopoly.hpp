#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "scmm/potential.hpp"

namespace scmm {

// Discretization of w(x) dx. Weights are stored as w(x_i) dx_i * exp(-log_scale). The scale
// puts the largest weight near e^680, so the rule spans the full double exponent range:
// p_n^2 w matters well below the peak of w (for V = -x on R^- the support edge sits at
// log w = -4n).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  double log_scale = 0.0;
  std::string provenance;
  std::size_t dropped = 0;       // nodes whose scaled weight fell below 1e-300
  double dropped_mass_bound = 0.0;

  std::size_t size() const { return nodes.size(); }
  double log_mass() const;
};

struct QuadratureOptions {
  int resolution = 800;
  // Depth of the 1/4-ratio grading toward special points; <= 0 picks ceil(log2 resolution).
  int grading_depth = 0;
  // Unbounded ends are cut where log w drops this far below its maximum.
  double log_cutoff = 1350.0;
  bool self_check = true;
};

// Composite Gauss-Legendre rule for w on the support of p. Panels are graded toward
// finite support endpoints and singularities. Throws NumericalError when the mass
// disagrees with a doubled-resolution rule by more than 1e-9 relative.
QuadratureRule build_quadrature(const Potential& p, const QuadratureOptions& opts = {});
QuadratureRule build_quadrature(const Potential& p, int resolution);

// Monic recurrence p_{j+1} = (x - a_j) p_j - b_j p_{j-1}, with b_0 unused (0).
// h_j = int p_j^2 w is kept as log h_j.
struct Recurrence {
  std::vector<double> a;      // a_0..a_{m_max}
  std::vector<double> b;      // b_0..b_{m_max}, b_0 = 0
  std::vector<double> log_h;  // log h_0..log h_{m_max}
  int m_max = 0;

  double h(int j) const;
};

Recurrence stieltjes_recurrence(const QuadratureRule& q, int m_max);

// (p_j(x), p_{j-1}(x)) for the monic polynomials.
std::pair<double, double> eval_poly(const Recurrence& r, int j, double x);

// Orthonormal q_j = p_j / sqrt(h_j) at x, returned as mantissas times exp(log_factor).
// Derivatives come from the differentiated recurrence.
struct OrthonormalValues {
  double q = 0.0, q_prev = 0.0;    // q_j, q_{j-1}
  double dq = 0.0, dq_prev = 0.0;  // q_j', q_{j-1}'
  double log_factor = 0.0;
};
OrthonormalValues eval_orthonormal(const Recurrence& r, int j, double x, bool derivatives = false);

struct GramReport {
  double off_diagonal = 0.0;  // max |<p_i,p_j>| / sqrt(h_i h_j), i != j
  double norm_error = 0.0;    // max |<p_j,p_j>/h_j - 1|
  bool ok(double tol = 1e-8) const { return off_diagonal < tol && norm_error < tol; }
};
GramReport gram_check(const Recurrence& r, const QuadratureRule& q, int m);

// Zeros of p_m from the m x m Jacobi matrix, ascending.
std::vector<double> polynomial_zeros(const Recurrence& r, int m);

std::string recurrence_csv(const Recurrence& r);

// Binary cache keyed by the potential (canonical JSON, n included), resolution and m_max.
std::uint64_t recurrence_cache_key(const Potential& p, int resolution, int m_max);
void save_recurrence(const std::string& path, const Recurrence& r, std::uint64_t key);
// Returns false if the file is missing, unreadable or has another key.
bool load_recurrence(const std::string& path, std::uint64_t key, Recurrence& out);

}  // namespace scmm
