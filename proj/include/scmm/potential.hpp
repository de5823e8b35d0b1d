#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "scmm/intervals.hpp"

namespace scmm {

using cplx = std::complex<double>;

// One point of the singular set: log charge alpha and pole coefficients
// t_1..t_d, contributing -sum_j t_j (z-b)^{-j} / j - (2/n) alpha log|z-b| to V.
struct Singularity {
  cplx location;
  double alpha = 0.0;
  std::vector<cplx> pole_coeffs;

  bool is_real() const { return location.imag() == 0.0; }
  bool has_poles() const;
};

enum class PotentialPart { full, reg, sing, br };

struct ValidationCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool ok() const;
};

class Potential {
 public:
  // Throws ValidationError on broken structural invariants (negative alpha,
  // unmatched conjugate data, non-real coefficients on the real axis).
  // A lone non-real singularity gets its conjugate partner added.
  Potential(std::vector<double> reg_coeffs, std::vector<Singularity> singularities,
            IntervalSet support, std::int64_t n);

  const std::vector<double>& reg_coeffs() const { return reg_; }
  const std::vector<Singularity>& singularities() const { return sing_; }
  const IntervalSet& support() const { return support_; }
  std::int64_t n() const { return n_; }

  Potential with_n(std::int64_t n) const;
  // V(-z) as a potential on -I.
  Potential mirrored() const;

  // derivative is 0 or 1. br requires real z.
  cplx eval(cplx z, PotentialPart part = PotentialPart::full, int derivative = 0) const;
  double eval_real(double x, PotentialPart part = PotentialPart::full, int derivative = 0) const;

  // Polynomial part only, for equilibrium problems.
  double vreg(double x) const;
  double vreg_derivative(double x) const;
  int reg_degree() const;  // degree of V_reg, 0 if identically zero

  // log w(x) = -n V(x) on the support, -inf outside or where w vanishes.
  double log_weight(double x) const;
  // w(x); throws NumericalError if it overflows a double.
  double weight(double x) const;

  // Canonical JSON text; stable across runs, used for cache keys.
  std::string to_json() const;

 private:
  std::vector<double> reg_;
  std::vector<Singularity> sing_;
  IntervalSet support_;
  std::int64_t n_;
};

Potential parse_potential(const std::string& json_text);
Potential load_potential(const std::string& path);

ValidationReport validate(const Potential& p);

}  // namespace scmm
