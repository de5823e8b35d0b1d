#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "scmm/equilibrium.hpp"
#include "scmm/potential.hpp"

namespace scmm {

struct ChainState {
  std::vector<double> positions;
  double log_density = 0.0;  // cached; rechecked against a full recomputation every 10^4 moves
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  double step_scale = 0.0;
  std::uint64_t accept_count = 0;
  std::uint64_t propose_count = 0;
};

struct SamplerOptions {
  std::int64_t steps = 0;    // sweeps in total, burn-in included; one sweep = n single-site moves
  std::int64_t burn_in = 0;  // sweeps discarded, step_scale is tuned only here
  std::int64_t thin = 1;     // keep every thin-th sweep after burn-in
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

struct SampleRun {
  int n = 0;
  std::vector<std::int64_t> sweeps;  // sweep index of each kept configuration
  std::vector<double> samples;       // kept configurations, row-major (sweeps.size() x n)
  ChainState state;                  // after the last sweep
  double burn_in_acceptance = 0.0;
  double acceptance = 0.0;           // after burn-in, with step_scale frozen
  double max_recheck_drift = 0.0;    // largest |cached - recomputed| seen
  double max_balance_residual = 0.0; // |log r(x->x') + log r(x'->x)| over logged move pairs
  std::size_t logged_pairs = 0;

  const double* configuration(std::size_t k) const { return samples.data() + k * n; }
};

// The generator for (seed, stream): mt19937_64 seeded with seed_seq of the four 32-bit halves.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream);

// 2 sum_{i<j} log|x_i - x_j| + sum_k log w(x_k); -inf if a point leaves the support or hits
// a charge.
double log_density(const Potential& p, const std::vector<double>& x);

// Log Metropolis ratio for moving site i of x to y (-inf if y is outside the support).
double log_move_ratio(const Potential& p, const std::vector<double>& x, std::size_t i, double y);

// n = p.n() points spread inside the support with finite log density. Throws NumericalError
// when the support has no interior to place them in.
std::vector<double> initial_positions(const Potential& p);

// Single-site Gaussian-proposal Metropolis for the joint eigenvalue density.
// Deterministic given (seed, stream). Throws ValidationError on bad options and
// NumericalError if the cached log density drifts from the recomputed one.
SampleRun mcmc_sample(const Potential& p, const SamplerOptions& opts);

// Independent chains on streams opts.stream + c for c < chains, run on up to `threads` workers.
std::vector<SampleRun> mcmc_sample_chains(const Potential& p, const SamplerOptions& opts, int chains,
                                          int threads = 1);

struct Histogram {
  std::vector<double> edges;    // ascending, size = bins + 1
  std::vector<double> density;  // normalized over the bins
  std::vector<std::uint64_t> counts;
  std::uint64_t outside = 0;    // samples that fell in no bin

  std::size_t bins() const { return density.size(); }
  double width(std::size_t i) const { return edges[i + 1] - edges[i]; }
};

std::vector<double> uniform_edges(double lo, double hi, int bins);

// Throws ValidationError for no samples or edges that are not strictly ascending.
Histogram histogram_density(const std::vector<double>& samples, const std::vector<double>& edges);

struct DensityComparison {
  double sup_dev = 0.0;
  double l1_dev = 0.0;  // sum |empirical - average| * width
  std::vector<double> reference;  // bin averages of rho
};

DensityComparison compare_density(const Histogram& h, const EquilibriumMeasure& em);

}  // namespace scmm
