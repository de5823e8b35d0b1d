#include "scmm/orthopoly.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "scmm/errors.hpp"
#include "scmm/integrate.hpp"

namespace scmm {

namespace {

constexpr double kMinWeight = 1e-300;
// Headroom below the largest representable weight; sums over ~1e4 nodes stay finite.
constexpr double kPeakLogWeight = 680.0;
// Complex singularities closer than this to the axis get a graded breakpoint at Re b.
constexpr double kNearAxis = 1.0;

double log_of_sum(const std::vector<double>& w) {
  double s = 0.0;
  for (double v : w) s += v;
  return std::log(s);
}

struct Window {
  double lo, hi;
};

// Max of log w over a sample of [lo, hi]; infinite ends are pushed out until log w is
// below max - cutoff and still falling, then refined by bisection.
std::vector<Window> windows(const Potential& p, double cutoff, double& global_max) {
  auto lw = [&](double x) { return p.log_weight(x); };
  std::vector<Window> out;
  global_max = -kInf;
  for (const auto& iv : p.support().intervals()) {
    double a = std::isfinite(iv.lo) ? iv.lo : (std::isfinite(iv.hi) ? iv.hi - 1.0 : -1.0);
    double b = std::isfinite(iv.hi) ? iv.hi : (std::isfinite(iv.lo) ? iv.lo + 1.0 : 1.0);
    for (const auto& s : p.singularities()) {
      const double x = s.location.real();
      if (x > iv.lo && x < iv.hi) a = std::min(a, x), b = std::max(b, x);
    }
    auto sample_max = [&](double lo, double hi) {
      double m = -kInf;
      const int pts = 4000;
      for (int i = 1; i < pts; ++i) m = std::max(m, lw(lo + (hi - lo) * i / pts));
      return m;
    };
    double m = sample_max(a, b);
    for (int iter = 0; iter < 200; ++iter) {
      bool grow = false;
      const double step = std::max(1.0, b - a);
      if (!std::isfinite(iv.lo)) {
        const double v = lw(a), inner = lw(a + 1e-3 * step);
        if (!(v < m - cutoff && v <= inner)) {
          a -= step;
          grow = true;
        }
      }
      if (!std::isfinite(iv.hi)) {
        const double v = lw(b), inner = lw(b - 1e-3 * step);
        if (!(v < m - cutoff && v <= inner)) {
          b += step;
          grow = true;
        }
      }
      if (!grow) break;
      m = std::max(m, sample_max(a, b));
      if (iter == 199) throw NumericalError("weight does not decay on an unbounded support interval");
    }
    out.push_back({a, b});
    global_max = std::max(global_max, m);
  }
  if (!std::isfinite(global_max)) throw NumericalError("weight vanishes on the whole support");

  // Cut unbounded ends where log w crosses global_max - cutoff.
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& iv = p.support()[i];
    const double level = global_max - cutoff;
    auto cut = [&](double inside, double outside) {
      if (lw(inside) < level) return inside;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (inside + outside);
        if (lw(mid) >= level)
          inside = mid;
        else
          outside = mid;
      }
      return outside;
    };
    // Bisection from the sample point of largest weight toward the ends.
    double peak = 0.5 * (out[i].lo + out[i].hi), best = -kInf;
    const int pts = 4000;
    for (int k = 1; k < pts; ++k) {
      const double x = out[i].lo + (out[i].hi - out[i].lo) * k / pts;
      const double v = lw(x);
      if (v > best) best = v, peak = x;
    }
    if (!std::isfinite(iv.lo)) {
      double inside = peak;
      // Walk out so the bisection bracket holds a single crossing.
      const double step = (peak - out[i].lo) / 64.0;
      while (inside - step > out[i].lo && lw(inside - step) >= level) inside -= step;
      out[i].lo = cut(inside, std::max(out[i].lo, inside - step));
    }
    if (!std::isfinite(iv.hi)) {
      double inside = peak;
      const double step = (out[i].hi - peak) / 64.0;
      while (inside + step < out[i].hi && lw(inside + step) >= level) inside += step;
      out[i].hi = cut(inside, std::min(out[i].hi, inside + step));
    }
  }
  return out;
}

struct Piece {
  double lo, hi;
  int anchor;  // -1: graded toward lo, +1: toward hi, 0: uniform
};

void add_panel(const Potential& p, double s, double sign, double L, double u0, double u1, double log_scale,
               std::vector<double>& xs, std::vector<double>& ws) {
  const auto& [gx, gw] = gauss_legendre_rule();
  const double c = 0.5 * (u0 + u1), h = 0.5 * (u1 - u0);
  for (int k = 0; k < kPanelNodes; ++k) {
    const double u = c + h * gx[k];
    double x, jac;
    if (sign == 0.0) {
      x = s + L * u;
      jac = L;
    } else {
      x = s + sign * L * u * u;
      jac = 2.0 * L * u;
    }
    const double lw = p.log_weight(x);
    const double w = std::exp(lw - log_scale) * gw[k] * h * jac;
    xs.push_back(x);
    ws.push_back(w);
  }
}

QuadratureRule build_rule(const Potential& p, int resolution, int depth, double cutoff) {
  double gmax = 0.0;
  const auto wins = windows(p, cutoff, gmax);

  std::vector<Piece> pieces;
  double total_len = 0.0;
  for (std::size_t i = 0; i < wins.size(); ++i) {
    const auto& iv = p.support()[i];
    const auto& w = wins[i];
    // Breakpoints with a flag telling whether the weight may be singular there.
    std::vector<std::pair<double, bool>> bp{{w.lo, std::isfinite(iv.lo)}, {w.hi, std::isfinite(iv.hi)}};
    for (const auto& s : p.singularities()) {
      if (s.alpha == 0.0 && !s.has_poles()) continue;
      const double x = s.location.real();
      if (!(x > w.lo && x < w.hi)) continue;
      if (std::abs(s.location.imag()) < kNearAxis) bp.push_back({x, true});
    }
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end(), [](auto& a, auto& b) { return a.first == b.first; }), bp.end());
    for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
      const double lo = bp[k].first, hi = bp[k + 1].first;
      const bool sl = bp[k].second, sh = bp[k + 1].second;
      if (sl && sh) {
        const double mid = 0.5 * (lo + hi);
        pieces.push_back({lo, mid, -1});
        pieces.push_back({mid, hi, +1});
      } else {
        pieces.push_back({lo, hi, sl ? -1 : (sh ? +1 : 0)});
      }
      total_len += hi - lo;
    }
  }

  const int panels = std::max(2, resolution / kPanelNodes);
  QuadratureRule rule;
  rule.log_scale = gmax - kPeakLogWeight;
  std::vector<double> xs, ws;
  for (const auto& pc : pieces) {
    const double L = pc.hi - pc.lo;
    const int m = std::max(2, static_cast<int>(std::ceil(panels * L / total_len)));
    if (pc.anchor == 0) {
      for (int k = 0; k < m; ++k) add_panel(p, pc.lo, 0.0, L, double(k) / m, double(k + 1) / m, rule.log_scale, xs, ws);
      continue;
    }
    const double s = pc.anchor < 0 ? pc.lo : pc.hi;
    const double sign = pc.anchor < 0 ? 1.0 : -1.0;
    const double first = 1.0 / m;
    double edge = first * std::pow(0.25, depth);
    add_panel(p, s, sign, L, 0.0, edge, rule.log_scale, xs, ws);
    for (int d = depth; d > 0; --d) {
      const double next = edge * 4.0;
      add_panel(p, s, sign, L, edge, next, rule.log_scale, xs, ws);
      edge = next;
    }
    for (int k = 1; k < m; ++k) add_panel(p, s, sign, L, double(k) / m, double(k + 1) / m, rule.log_scale, xs, ws);
  }

  std::vector<std::size_t> order(xs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  for (std::size_t i : order) {
    if (!(ws[i] >= kMinWeight) || !p.support().contains_interior(xs[i])) {
      ++rule.dropped;
      if (ws[i] > 0.0) rule.dropped_mass_bound += kMinWeight;
      continue;
    }
    if (!rule.nodes.empty() && xs[i] <= rule.nodes.back()) {
      rule.weights.back() += ws[i];  // coincident nodes from rounding at a breakpoint
      continue;
    }
    rule.nodes.push_back(xs[i]);
    rule.weights.push_back(ws[i]);
  }
  if (rule.nodes.empty()) throw NumericalError("quadrature has no nodes with nonzero weight");

  std::ostringstream prov;
  prov << "gauss-legendre " << kPanelNodes << "-point panels, " << pieces.size() << " pieces, grading depth " << depth
       << ", cutoff " << cutoff << ", resolution " << resolution;
  rule.provenance = prov.str();
  return rule;
}

}  // namespace

double QuadratureRule::log_mass() const { return log_of_sum(weights) + log_scale; }

QuadratureRule build_quadrature(const Potential& p, const QuadratureOptions& opts) {
  if (opts.resolution < 2 * kPanelNodes) throw ValidationError("quadrature resolution must be at least 40");
  auto depth_for = [&](int res) {
    return opts.grading_depth > 0 ? opts.grading_depth : static_cast<int>(std::ceil(std::log2(double(res))));
  };
  QuadratureRule rule = build_rule(p, opts.resolution, depth_for(opts.resolution), opts.log_cutoff);
  if (opts.self_check) {
    const QuadratureRule fine = build_rule(p, 2 * opts.resolution, depth_for(2 * opts.resolution), opts.log_cutoff);
    const double rel = std::abs(std::expm1(rule.log_mass() - fine.log_mass()));
    if (rel > 1e-9) {
      std::ostringstream os;
      os << "quadrature resolution " << opts.resolution << " too small: mass differs from the doubled rule by "
         << rel << " relative";
      throw NumericalError(os.str());
    }
  }
  return rule;
}

QuadratureRule build_quadrature(const Potential& p, int resolution) {
  QuadratureOptions o;
  o.resolution = resolution;
  return build_quadrature(p, o);
}

double Recurrence::h(int j) const { return std::exp(log_h.at(j)); }

Recurrence stieltjes_recurrence(const QuadratureRule& q, int m_max) {
  const std::size_t N = q.size();
  if (m_max < 0) throw ValidationError("m_max must be >= 0");
  if (4 * static_cast<std::size_t>(m_max) >= N)
    throw ValidationError("m_max = " + std::to_string(m_max) + " needs more than " + std::to_string(4 * m_max) +
                          " quadrature nodes (have " + std::to_string(N) + ")");
  Recurrence r;
  r.m_max = m_max;
  r.a.assign(m_max + 1, 0.0);
  r.b.assign(m_max + 1, 0.0);
  r.log_h.assign(m_max + 1, 0.0);

  // Orthonormal vectors pi_j(i) = q_j(x_i) sqrt(w_i).
  double mass = 0.0;
  for (double w : q.weights) mass += w;
  r.log_h[0] = std::log(mass) + q.log_scale;
  std::vector<double> prev(N, 0.0), cur(N), next(N);
  // sqrt(w) / sqrt(mass): the quotient w / mass would underflow for far nodes.
  const double root_mass = std::sqrt(mass);
  for (std::size_t i = 0; i < N; ++i) cur[i] = std::sqrt(q.weights[i]) / root_mass;
  for (int j = 0; j <= m_max; ++j) {
    double a = 0.0;
    for (std::size_t i = 0; i < N; ++i) a += q.nodes[i] * cur[i] * cur[i];
    r.a[j] = a;
    if (j == m_max) break;
    const double sb = std::sqrt(r.b[j]);
    double norm2 = 0.0, scale2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double t = (q.nodes[i] - a) * cur[i];
      next[i] = t - sb * prev[i];
      norm2 += next[i] * next[i];
      scale2 += t * t;
    }
    // scale2 = b_j + b_{j+1}; a genuine measure keeps the ratio O(1), cancellation means breakdown.
    if (!(norm2 > 1e-20 * scale2) || !std::isfinite(norm2))
      throw NumericalError("degree exceeds discretization resolution (b_" + std::to_string(j + 1) + " = " +
                           std::to_string(norm2) + ")");
    r.b[j + 1] = norm2;
    r.log_h[j + 1] = r.log_h[j] + std::log(norm2);
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t i = 0; i < N; ++i) next[i] *= inv;
    prev.swap(cur);
    cur.swap(next);
  }
  return r;
}

std::pair<double, double> eval_poly(const Recurrence& r, int j, double x) {
  if (j < 0 || j > r.m_max + 1) throw ValidationError("degree out of range of the recurrence");
  double pm = 0.0, pc = 1.0;
  for (int k = 0; k < j; ++k) {
    const double pn = (x - r.a[k]) * pc - (k > 0 ? r.b[k] : 0.0) * pm;
    pm = pc;
    pc = pn;
  }
  return {pc, pm};
}

OrthonormalValues eval_orthonormal(const Recurrence& r, int j, double x, bool derivatives) {
  if (j < 0 || j > r.m_max) throw ValidationError("degree out of range of the recurrence");
  OrthonormalValues v;
  v.q = 1.0;
  v.log_factor = -0.5 * r.log_h[0];
  for (int k = 0; k < j; ++k) {
    const double sb = std::sqrt(r.b[k]), sn = std::sqrt(r.b[k + 1]);
    const double qn = ((x - r.a[k]) * v.q - sb * v.q_prev) / sn;
    if (derivatives) {
      const double dn = ((x - r.a[k]) * v.dq + v.q - sb * v.dq_prev) / sn;
      v.dq_prev = v.dq;
      v.dq = dn;
    }
    v.q_prev = v.q;
    v.q = qn;
    const double big = std::max({std::abs(v.q), std::abs(v.q_prev), std::abs(v.dq), std::abs(v.dq_prev)});
    if (big > 1e150) {
      const double s = 1.0 / big;
      v.q *= s, v.q_prev *= s, v.dq *= s, v.dq_prev *= s;
      v.log_factor += std::log(big);
    }
  }
  return v;
}

GramReport gram_check(const Recurrence& r, const QuadratureRule& q, int m) {
  if (m < 0 || m > r.m_max) throw ValidationError("gram_check degree out of range");
  GramReport rep;
  if (m == 0) {
    rep.norm_error = std::abs(std::expm1(q.log_mass() - r.log_h[0]));
    return rep;
  }
  const std::size_t N = q.size();
  // Columns q_j(x_i) sqrt(w_i) exp(log_scale/2), j = 0..m.
  Eigen::MatrixXd Q(N, m + 1);
  for (std::size_t i = 0; i < N; ++i) {
    const double x = q.nodes[i];
    double pm = 0.0, pc = std::exp(0.5 * (q.log_scale - r.log_h[0])) * std::sqrt(q.weights[i]);
    Q(i, 0) = pc;
    for (int k = 0; k < m; ++k) {
      const double pn = ((x - r.a[k]) * pc - std::sqrt(r.b[k]) * pm) / std::sqrt(r.b[k + 1]);
      pm = pc;
      pc = pn;
      Q(i, k + 1) = pc;
    }
  }
  const Eigen::MatrixXd G = Q.transpose() * Q;
  for (int i = 0; i <= m; ++i) {
    rep.norm_error = std::max(rep.norm_error, std::abs(G(i, i) - 1.0));
    for (int j = 0; j < i; ++j) rep.off_diagonal = std::max(rep.off_diagonal, std::abs(G(i, j)));
  }
  return rep;
}

std::vector<double> polynomial_zeros(const Recurrence& r, int m) {
  if (m < 1 || m > r.m_max) throw ValidationError("polynomial_zeros degree out of range");
  Eigen::VectorXd diag(m), sub(m - 1);
  for (int k = 0; k < m; ++k) diag(k) = r.a[k];
  for (int k = 1; k < m; ++k) sub(k - 1) = std::sqrt(r.b[k]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  std::vector<double> z(es.eigenvalues().data(), es.eigenvalues().data() + m);
  std::sort(z.begin(), z.end());
  return z;
}

std::string recurrence_csv(const Recurrence& r) {
  std::ostringstream os;
  os.precision(17);
  os << "j,a_j,b_j,h_j,log_h_j\n";
  for (int j = 0; j <= r.m_max; ++j)
    os << j << ',' << r.a[j] << ',' << r.b[j] << ',' << std::exp(r.log_h[j]) << ',' << r.log_h[j] << '\n';
  return os.str();
}

std::uint64_t recurrence_cache_key(const Potential& p, int resolution, int m_max) {
  // FNV-1a over the canonical text.
  const std::string text = p.to_json() + "|" + std::to_string(p.n()) + "|" + std::to_string(resolution) + "|" +
                           std::to_string(m_max);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {
constexpr char kMagic[8] = {'S', 'C', 'M', 'M', 'R', 'E', 'C', '1'};
}

void save_recurrence(const std::string& path, const Recurrence& r, std::uint64_t key) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NumericalError("cannot write recurrence cache " + path);
  const std::int32_t m = r.m_max;
  out.write(kMagic, sizeof kMagic);
  out.write(reinterpret_cast<const char*>(&key), sizeof key);
  out.write(reinterpret_cast<const char*>(&m), sizeof m);
  for (const auto* v : {&r.a, &r.b, &r.log_h})
    out.write(reinterpret_cast<const char*>(v->data()), static_cast<std::streamsize>(v->size() * sizeof(double)));
}

bool load_recurrence(const std::string& path, std::uint64_t key, Recurrence& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  char magic[8];
  std::uint64_t k = 0;
  std::int32_t m = 0;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(&k), sizeof k);
  in.read(reinterpret_cast<char*>(&m), sizeof m);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0 || k != key || m < 0) return false;
  Recurrence r;
  r.m_max = m;
  for (auto* v : {&r.a, &r.b, &r.log_h}) {
    v->resize(m + 1);
    in.read(reinterpret_cast<char*>(v->data()), static_cast<std::streamsize>(v->size() * sizeof(double)));
  }
  if (!in) return false;
  out = std::move(r);
  return true;
}

}  // namespace scmm
