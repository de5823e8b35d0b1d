#include "scmm/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "scmm/errors.hpp"

namespace scmm {

namespace {

constexpr std::int64_t kRecheckMoves = 10000;
constexpr std::int64_t kTuneWindow = 100;  // sweeps
constexpr std::size_t kLoggedPairs = 256;

// A finite window inside an interval for the initial placement.
Interval placement_window(const Interval& iv) {
  const double lo = std::isfinite(iv.lo) ? iv.lo : (std::isfinite(iv.hi) ? iv.hi - 2.0 : -1.0);
  const double hi = std::isfinite(iv.hi) ? iv.hi : lo + 2.0;
  return {lo, hi};
}

}  // namespace

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

double log_density(const Potential& p, const std::vector<double>& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!p.support().contains(x[i])) return -kInf;
    s += p.log_weight(x[i]);
    for (std::size_t j = i + 1; j < x.size(); ++j) s += 2.0 * std::log(std::abs(x[i] - x[j]));
  }
  return std::isnan(s) ? -kInf : s;
}

double log_move_ratio(const Potential& p, const std::vector<double>& x, std::size_t i, double y) {
  if (!p.support().contains(y)) return -kInf;
  const double lwy = p.log_weight(y);
  if (!std::isfinite(lwy)) return -kInf;
  double d = lwy - p.log_weight(x[i]);
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (j == i) continue;
    d += 2.0 * std::log(std::abs((y - x[j]) / (x[i] - x[j])));
  }
  return std::isnan(d) ? -kInf : d;
}

std::vector<double> initial_positions(const Potential& p) {
  const std::int64_t n = p.n();
  const Interval* best = nullptr;
  double best_len = 0.0;
  for (const auto& iv : p.support().intervals()) {
    const Interval w = placement_window(iv);
    if (w.length() > best_len) best = &iv, best_len = w.length();
  }
  if (!best) throw NumericalError("cannot place " + std::to_string(n) + " points: the support has no interior");
  const Interval w = placement_window(*best);
  const double h = w.length() / static_cast<double>(n);
  std::vector<double> x(n);
  for (std::int64_t k = 0; k < n; ++k) {
    x[k] = w.lo + (k + 0.5) * h;
    // Step off charges and zeros of the weight inside the cell.
    for (int tries = 0; tries < 8 && !std::isfinite(p.log_weight(x[k])); ++tries) x[k] += h / 16.0;
  }
  if (!std::isfinite(log_density(p, x)))
    throw NumericalError("cannot place " + std::to_string(n) + " points in the support interior");
  return x;
}

SampleRun mcmc_sample(const Potential& p, const SamplerOptions& opts) {
  if (!validate(p).ok()) throw ValidationError("potential fails validation");
  if (opts.steps <= 0) throw ValidationError("steps must be positive");
  if (opts.burn_in < 0 || opts.steps <= opts.burn_in) throw ValidationError("steps must exceed burn_in");
  if (opts.thin < 1) throw ValidationError("thin must be >= 1");

  SampleRun run;
  run.n = static_cast<int>(p.n());
  const std::size_t n = run.n;
  ChainState& st = run.state;
  st.seed = opts.seed;
  st.stream = opts.stream;
  st.positions = initial_positions(p);
  st.log_density = log_density(p, st.positions);
  {
    const Interval w = placement_window(p.support()[0]);
    st.step_scale = std::min(w.length(), 2.0) / std::sqrt(static_cast<double>(n));
  }
  auto& x = st.positions;
  std::vector<double> lw(n);
  for (std::size_t i = 0; i < n; ++i) lw[i] = p.log_weight(x[i]);

  auto rng = make_rng(opts.seed, opts.stream);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  const std::int64_t kept = (opts.steps - opts.burn_in + opts.thin - 1) / opts.thin;
  run.sweeps.reserve(kept);
  run.samples.reserve(static_cast<std::size_t>(kept) * n);

  std::int64_t moves = 0;
  std::uint64_t window_accept = 0, window_propose = 0;
  std::uint64_t burn_accept = 0, burn_propose = 0;
  for (std::int64_t sweep = 0; sweep < opts.steps; ++sweep) {
    if (sweep == opts.burn_in) {
      burn_accept = st.accept_count, burn_propose = st.propose_count;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double y = x[i] + st.step_scale * normal(rng);
      const double u = uniform(rng);
      ++st.propose_count;
      ++window_propose;
      ++moves;
      if (p.support().contains(y)) {
        const double lwy = p.log_weight(y);
        double d = lwy - lw[i];
        for (std::size_t j = 0; j < n; ++j)
          if (j != i) d += 2.0 * std::log(std::abs((y - x[j]) / (x[i] - x[j])));
        if (std::isfinite(d) && (d >= 0.0 || std::log(u) < d)) {
          const double old = x[i];
          x[i] = y;
          lw[i] = lwy;
          st.log_density += d;
          ++st.accept_count;
          ++window_accept;
          if (run.logged_pairs < kLoggedPairs) {
            const double back = log_move_ratio(p, x, i, old);
            run.max_balance_residual = std::max(run.max_balance_residual, std::abs(d + back));
            ++run.logged_pairs;
          }
        }
      }
      if (moves % kRecheckMoves == 0) {
        const double full = log_density(p, x);
        const double drift = std::abs(full - st.log_density);
        run.max_recheck_drift = std::max(run.max_recheck_drift, drift);
        if (!(drift <= 1e-9 * std::max(1.0, std::abs(full))))
          throw NumericalError("cached log density drifted by " + std::to_string(drift));
        st.log_density = full;
      }
    }
    if (sweep < opts.burn_in && (sweep + 1) % kTuneWindow == 0) {
      const double rate = static_cast<double>(window_accept) / static_cast<double>(window_propose);
      if (rate < 0.3) st.step_scale *= 0.8;
      if (rate > 0.5) st.step_scale *= 1.25;
      window_accept = window_propose = 0;
    }
    if (sweep >= opts.burn_in && (sweep - opts.burn_in) % opts.thin == 0) {
      run.sweeps.push_back(sweep);
      run.samples.insert(run.samples.end(), x.begin(), x.end());
    }
  }
  if (opts.burn_in == 0) burn_accept = burn_propose = 0;
  run.burn_in_acceptance = burn_propose ? static_cast<double>(burn_accept) / burn_propose : 0.0;
  run.acceptance = static_cast<double>(st.accept_count - burn_accept) /
                   static_cast<double>(st.propose_count - burn_propose);
  return run;
}

std::vector<SampleRun> mcmc_sample_chains(const Potential& p, const SamplerOptions& opts, int chains, int threads) {
  if (chains < 1) throw ValidationError("chains must be >= 1");
  std::vector<SampleRun> out(chains);
  std::vector<std::exception_ptr> errors(chains);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int c; (c = next++) < chains;) {
      SamplerOptions o = opts;
      o.stream = opts.stream + static_cast<std::uint64_t>(c);
      try {
        out[c] = mcmc_sample(p, o);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  const int workers = std::clamp(threads, 1, chains);
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<double> uniform_edges(double lo, double hi, int bins) {
  if (bins < 1 || !(hi > lo)) throw ValidationError("need bins >= 1 and hi > lo");
  std::vector<double> e(bins + 1);
  for (int i = 0; i <= bins; ++i) e[i] = lo + (hi - lo) * i / bins;
  return e;
}

Histogram histogram_density(const std::vector<double>& samples, const std::vector<double>& edges) {
  if (samples.empty()) throw ValidationError("histogram needs at least one sample");
  if (edges.size() < 2) throw ValidationError("histogram needs at least one bin");
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i] > edges[i - 1])) throw ValidationError("bin edges must be strictly ascending");
  Histogram h;
  h.edges = edges;
  h.counts.assign(edges.size() - 1, 0);
  h.density.assign(edges.size() - 1, 0.0);
  std::uint64_t inside = 0;
  for (double s : samples) {
    if (!(s >= edges.front() && s <= edges.back())) {
      ++h.outside;
      continue;
    }
    auto it = std::upper_bound(edges.begin(), edges.end(), s);
    std::size_t bin = std::min<std::size_t>(it - edges.begin() - 1, h.counts.size() - 1);
    ++h.counts[bin];
    ++inside;
  }
  if (inside == 0) return h;
  for (std::size_t i = 0; i < h.bins(); ++i)
    h.density[i] = static_cast<double>(h.counts[i]) / (static_cast<double>(inside) * h.width(i));
  return h;
}

DensityComparison compare_density(const Histogram& h, const EquilibriumMeasure& em) {
  DensityComparison c;
  for (std::size_t i = 0; i < h.bins(); ++i) {
    const double avg = (em.mass_right(h.edges[i]) - em.mass_right(h.edges[i + 1])) / h.width(i);
    c.reference.push_back(avg);
    const double dev = std::abs(h.density[i] - avg);
    c.sup_dev = std::max(c.sup_dev, dev);
    c.l1_dev += dev * h.width(i);
  }
  return c;
}

}  // namespace scmm
