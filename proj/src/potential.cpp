#include "scmm/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "scmm/errors.hpp"

namespace scmm {

namespace {

using nlohmann::json;

bool same_point(cplx a, cplx b) { return std::abs(a - b) <= 1e-14 * (1.0 + std::abs(a)); }

double parse_extended(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw ValidationError("schema violation: " + where + " must be a number or \"-inf\"/\"inf\"");
}

cplx parse_complex(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ValidationError("schema violation: " + where + " must be a number or [re, im]");
}

json extended_to_json(double x) {
  if (x == kInf) return "inf";
  if (x == -kInf) return "-inf";
  return x;
}

}  // namespace

bool Singularity::has_poles() const {
  return std::any_of(pole_coeffs.begin(), pole_coeffs.end(), [](cplx t) { return t != 0.0; });
}

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.passed; });
}

Potential::Potential(std::vector<double> reg_coeffs, std::vector<Singularity> singularities,
                     IntervalSet support, std::int64_t n)
    : reg_(std::move(reg_coeffs)), support_(std::move(support)), n_(n) {
  if (n_ < 1) throw ValidationError("invariant violation: n must be a positive integer");
  if (support_.empty()) throw ValidationError("invariant violation: support is empty");
  for (double t : reg_)
    if (!std::isfinite(t)) throw ValidationError("invariant violation: non-finite reg coefficient");

  for (const auto& s : singularities) {
    if (!(s.alpha >= 0.0) || !std::isfinite(s.alpha))
      throw ValidationError("invariant violation: alpha must be >= 0 (got " +
                            std::to_string(s.alpha) + ")");
    if (s.is_real())
      for (cplx t : s.pole_coeffs)
        if (t.imag() != 0.0)
          throw ValidationError("invariant violation: conjugate closure (complex pole coefficient at a real b)");
    for (const auto& other : sing_)
      if (other.location == s.location)
        throw ValidationError("invariant violation: duplicate singularity location");
    sing_.push_back(s);
  }

  // Conjugate closure: complete missing partners, reject mismatched ones.
  const std::size_t given = sing_.size();
  for (std::size_t i = 0; i < given; ++i) {
    const Singularity s = sing_[i];
    if (s.is_real()) continue;
    const cplx target = std::conj(s.location);
    auto it = std::find_if(sing_.begin(), sing_.end(),
                           [&](const Singularity& o) { return same_point(o.location, target); });
    if (it == sing_.end()) {
      Singularity c = s;
      c.location = target;
      for (auto& t : c.pole_coeffs) t = std::conj(t);
      sing_.push_back(c);
      continue;
    }
    bool match = it->alpha == s.alpha && it->pole_coeffs.size() == s.pole_coeffs.size();
    for (std::size_t j = 0; match && j < s.pole_coeffs.size(); ++j)
      match = std::abs(it->pole_coeffs[j] - std::conj(s.pole_coeffs[j])) <=
              1e-14 * (1.0 + std::abs(s.pole_coeffs[j]));
    if (!match)
      throw ValidationError("invariant violation: conjugate closure (partner data does not match)");
  }
}

Potential Potential::with_n(std::int64_t n) const {
  Potential out = *this;
  if (n < 1) throw ValidationError("invariant violation: n must be a positive integer");
  out.n_ = n;
  return out;
}

Potential Potential::mirrored() const {
  std::vector<double> reg = reg_;
  for (std::size_t j = 0; j < reg.size(); ++j)
    if ((j + 1) % 2 == 1) reg[j] = -reg[j];
  std::vector<Singularity> sing = sing_;
  for (auto& s : sing) {
    s.location = -s.location;
    for (std::size_t j = 0; j < s.pole_coeffs.size(); ++j)
      if ((j + 1) % 2 == 1) s.pole_coeffs[j] = -s.pole_coeffs[j];
  }
  return Potential(std::move(reg), std::move(sing), support_.negated(), n_);
}

cplx Potential::eval(cplx z, PotentialPart part, int derivative) const {
  if (derivative != 0 && derivative != 1)
    throw ValidationError("derivative order must be 0 or 1");
  cplx total = 0.0;
  const bool all = part == PotentialPart::full;

  if (all || part == PotentialPart::reg) {
    // V_reg = sum_j t_j z^j / j, V_reg' = sum_j t_j z^{j-1}; Horner from the top.
    cplx acc = 0.0;
    for (std::size_t j = reg_.size(); j-- > 0;) {
      const double c = derivative == 0 ? reg_[j] / static_cast<double>(j + 1) : reg_[j];
      acc = acc * z + c;
    }
    total += derivative == 0 ? acc * z : acc;
  }

  if (all || part == PotentialPart::sing) {
    for (const auto& s : sing_) {
      if (!s.has_poles()) continue;
      const cplx d = z - s.location;
      if (d == 0.0) throw ValidationError("evaluation at a pole of V");
      const cplx inv = 1.0 / d;
      cplx pw = inv;
      for (std::size_t j = 0; j < s.pole_coeffs.size(); ++j) {
        const double order = static_cast<double>(j + 1);
        if (derivative == 0)
          total -= s.pole_coeffs[j] * pw / order;
        else
          total += s.pole_coeffs[j] * pw * inv;
        pw *= inv;
      }
    }
  }

  if (all || part == PotentialPart::br) {
    if (z.imag() != 0.0) throw ValidationError("V_br is defined on the real axis only");
    const double x = z.real();
    const double scale = 2.0 / static_cast<double>(n_);
    for (const auto& s : sing_) {
      if (s.alpha == 0.0) continue;
      const cplx d = x - s.location;
      if (d == 0.0) throw ValidationError("V_br evaluated at its singularity");
      if (derivative == 0)
        total -= scale * s.alpha * std::log(std::abs(d));
      else
        total -= scale * s.alpha * (1.0 / d).real();
    }
  }
  return total;
}

double Potential::eval_real(double x, PotentialPart part, int derivative) const {
  return eval(cplx(x, 0.0), part, derivative).real();
}

double Potential::vreg(double x) const { return eval_real(x, PotentialPart::reg, 0); }
double Potential::vreg_derivative(double x) const { return eval_real(x, PotentialPart::reg, 1); }

int Potential::reg_degree() const {
  for (std::size_t j = reg_.size(); j-- > 0;)
    if (reg_[j] != 0.0) return static_cast<int>(j + 1);
  return 0;
}

double Potential::log_weight(double x) const {
  if (!support_.contains(x)) return -kInf;
  const double nd = static_cast<double>(n_);
  double lw = -nd * vreg(x);
  for (const auto& s : sing_) {
    const cplx d = x - s.location;
    if (d == 0.0) {
      if (s.alpha == 0.0 && !s.has_poles()) continue;
      return -kInf;  // vanishing charge or pole limit along a validated support
    }
    if (s.has_poles()) {
      const cplx inv = 1.0 / d;
      cplx pw = inv, vs = 0.0;
      for (std::size_t j = 0; j < s.pole_coeffs.size(); ++j) {
        vs -= s.pole_coeffs[j] * pw / static_cast<double>(j + 1);
        pw *= inv;
      }
      lw -= nd * vs.real();  // conjugate partners cancel the imaginary parts
    }
    if (s.alpha != 0.0) lw += 2.0 * s.alpha * std::log(std::abs(d));
  }
  return lw;
}

double Potential::weight(double x) const {
  const double lw = log_weight(x);
  if (lw > 709.0) throw NumericalError("weight overflow at x = " + std::to_string(x));
  return std::exp(lw);
}

std::string Potential::to_json() const {
  json j;
  j["reg"] = reg_;
  json sing = json::array();
  for (const auto& s : sing_) {
    json t = json::array();
    for (cplx c : s.pole_coeffs) t.push_back(json::array({c.real(), c.imag()}));
    sing.push_back({{"b", {s.location.real(), s.location.imag()}}, {"alpha", s.alpha}, {"t", t}});
  }
  j["singularities"] = sing;
  json sup = json::array();
  for (const auto& iv : support_.intervals())
    sup.push_back(json::array({extended_to_json(iv.lo), extended_to_json(iv.hi)}));
  j["support"] = sup;
  j["n"] = n_;
  return j.dump();
}

Potential parse_potential(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("schema violation: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("schema violation: top level must be an object");
  for (const auto& [key, _] : doc.items())
    if (key != "reg" && key != "singularities" && key != "support" && key != "n")
      throw ValidationError("schema violation: unknown key \"" + key + "\"");

  std::vector<double> reg;
  if (doc.contains("reg")) {
    if (!doc["reg"].is_array()) throw ValidationError("schema violation: \"reg\" must be an array");
    for (const auto& v : doc["reg"]) {
      if (!v.is_number()) throw ValidationError("schema violation: \"reg\" entries must be numbers");
      reg.push_back(v.get<double>());
    }
  }

  std::vector<Singularity> sing;
  if (doc.contains("singularities")) {
    if (!doc["singularities"].is_array())
      throw ValidationError("schema violation: \"singularities\" must be an array");
    for (const auto& s : doc["singularities"]) {
      if (!s.is_object() || !s.contains("b"))
        throw ValidationError("schema violation: each singularity needs a \"b\" location");
      Singularity out;
      out.location = parse_complex(s["b"], "singularity b");
      if (s.contains("alpha")) {
        if (!s["alpha"].is_number()) throw ValidationError("schema violation: alpha must be a number");
        out.alpha = s["alpha"].get<double>();
      }
      if (s.contains("t")) {
        if (!s["t"].is_array()) throw ValidationError("schema violation: \"t\" must be an array");
        for (const auto& t : s["t"]) out.pole_coeffs.push_back(parse_complex(t, "pole coefficient"));
      }
      sing.push_back(std::move(out));
    }
  }

  if (!doc.contains("support") || !doc["support"].is_array())
    throw ValidationError("schema violation: \"support\" must be an array of [lo, hi] pairs");
  std::vector<Interval> ivs;
  for (const auto& iv : doc["support"]) {
    if (!iv.is_array() || iv.size() != 2)
      throw ValidationError("schema violation: support entries must be [lo, hi] pairs");
    ivs.push_back({parse_extended(iv[0], "support endpoint"), parse_extended(iv[1], "support endpoint")});
  }

  std::int64_t n = 1;
  if (doc.contains("n")) {
    if (!doc["n"].is_number_integer()) throw ValidationError("schema violation: \"n\" must be an integer");
    n = doc["n"].get<std::int64_t>();
  }
  return Potential(std::move(reg), std::move(sing), IntervalSet(std::move(ivs)), n);
}

Potential load_potential(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_potential(ss.str());
}

ValidationReport validate(const Potential& p) {
  ValidationReport rep;
  const auto& I = p.support();

  {
    ValidationCheck c{"growth", true, "support bounded"};
    if (!I.bounded()) {
      const int d = p.reg_degree();
      const double lead = d > 0 ? p.reg_coeffs()[d - 1] : 0.0;
      std::string why;
      if (d == 0) {
        c.passed = false;
        why = "V_reg is identically zero on an unbounded support";
      }
      if (c.passed && I.sup() == kInf && !(lead > 0.0)) {
        c.passed = false;
        why = "V_reg does not grow as x -> +inf";
      }
      if (c.passed && I.inf() == -kInf && !((d % 2 == 0 ? lead : -lead) > 0.0)) {
        c.passed = false;
        why = "V_reg does not grow as x -> -inf";
      }
      c.detail = c.passed ? "leading term of degree " + std::to_string(d) + " dominates log growth" : why;
    }
    rep.checks.push_back(c);
  }

  {
    ValidationCheck c{"conjugate_closure", true, "singular set closed under conjugation"};
    for (const auto& s : p.singularities()) {
      if (s.is_real()) continue;
      const bool found = std::any_of(p.singularities().begin(), p.singularities().end(),
                                     [&](const Singularity& o) { return same_point(o.location, std::conj(s.location)); });
      if (!found) {
        c.passed = false;
        c.detail = "missing conjugate partner";
      }
    }
    rep.checks.push_back(c);
  }

  {
    ValidationCheck c{"alpha_nonnegative", true, "all log charges >= 0"};
    for (const auto& s : p.singularities())
      if (s.alpha < 0.0) {
        c.passed = false;
        c.detail = "negative log charge";
      }
    rep.checks.push_back(c);
  }

  // Near a real pole the leading term -(t_d/d)(x-b)^{-d} must push V to +inf
  // from every side along which the support reaches b.
  for (const auto& s : p.singularities()) {
    if (!s.is_real() || !s.has_poles()) continue;
    const double b = s.location.real();
    const bool from_left = std::any_of(I.intervals().begin(), I.intervals().end(),
                                       [b](const Interval& iv) { return iv.lo < b && b <= iv.hi; });
    const bool from_right = std::any_of(I.intervals().begin(), I.intervals().end(),
                                        [b](const Interval& iv) { return iv.lo <= b && b < iv.hi; });
    std::size_t d = s.pole_coeffs.size();
    while (d > 0 && s.pole_coeffs[d - 1] == 0.0) --d;
    const double td = s.pole_coeffs[d - 1].real();
    std::ostringstream name;
    name.precision(17);
    name << "integrability_at_" << b;
    ValidationCheck c{name.str(), true, "pole not reached by the support"};
    if (from_left || from_right) {
      // From the right (x-b)^{-d} > 0; from the left its sign is (-1)^d.
      const bool right_ok = !from_right || td < 0.0;
      const bool left_ok = !from_left || ((d % 2 == 0) ? td < 0.0 : td > 0.0);
      c.passed = right_ok && left_ok;
      c.detail = c.passed ? "leading pole term drives V to +inf along the support"
                          : std::string("leading pole term drives V to -inf approaching from the ") +
                                (!right_ok ? "right" : "left");
    }
    rep.checks.push_back(c);
  }
  return rep;
}

}  // namespace scmm
