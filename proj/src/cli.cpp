#include "scmm/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <ostream>
#include <sstream>
#include <thread>

#include "scmm/classify.hpp"
#include "scmm/equilibrium.hpp"
#include "scmm/errors.hpp"
#include "scmm/io.hpp"
#include "scmm/kernel.hpp"
#include "scmm/orthopoly.hpp"
#include "scmm/potential.hpp"
#include "scmm/sampler.hpp"
#include "scmm/scenarios.hpp"

namespace scmm {

namespace {

using nlohmann::json;

json endpoint(double x) {
  if (x == kInf) return "inf";
  if (x == -kInf) return "-inf";
  return x;
}

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

template <class T>
json to_json(const std::vector<T>& v) {
  json a = json::array();
  for (const auto& x : v) {
    if constexpr (std::is_same_v<T, cplx>) a.push_back(to_json(x));
    else a.push_back(x);
  }
  return a;
}

json to_json(const IntervalSet& s) {
  json a = json::array();
  for (const auto& iv : s.intervals()) a.push_back({endpoint(iv.lo), endpoint(iv.hi)});
  return a;
}

json to_json(const CriticalPoint& cp) {
  return {{"x_star", cp.x_star},       {"kind", to_string(cp.kind)},    {"side", to_string(cp.side)},
          {"order_k", cp.order_k},     {"delta", cp.delta.to_string()}, {"delta_value", cp.delta.value()},
          {"multiplicity_h", cp.m_h}, {"multiplicity_r_zero", cp.m_r}, {"multiplicity_r_pole", cp.m_p}};
}

json to_json(const ModelData& md) {
  json b = json::array();
  for (const auto& s : md.B) b.push_back({{"location", to_json(s.location)}, {"alpha", s.alpha}, {"tau", to_json(s.tau)}});
  return {{"mirrored", md.mirrored},
          {"I", to_json(md.I)},
          {"B", b},
          {"tau_inf", to_json(md.tau_inf)},
          {"c_hat", md.c_hat},
          {"E", to_json(md.E)},
          {"q_hat", to_json(md.q_hat)},
          {"curve",
           {{"lead", to_json(md.curve.lead)},
            {"h_roots", to_json(md.curve.h_roots)},
            {"r_zeros", to_json(md.curve.r_zeros)},
            {"r_poles", to_json(md.curve.r_poles)},
            {"exponent", md.curve.exponent()}}},
          {"probe_n", md.probe_n},
          {"alpha_right", md.alpha_right}};
}

json to_json(const EquilibriumMeasure& em) {
  json gaps = json::array();
  for (const auto& g : em.gaps()) gaps.push_back({{"lo", endpoint(g.lo)}, {"hi", endpoint(g.hi)}, {"epsilon", g.epsilon}});
  const auto& c = em.curve();
  return {{"support", to_json(em.support())},
          {"curve",
           {{"h_coeffs", c.h_coeffs}, {"r_zeros", c.r_zeros}, {"r_poles", c.r_poles}, {"leading_sign", c.leading_sign}}},
          {"ell", em.ell()},
          {"p", em.p_sup()},
          {"total_mass", em.total_mass()},
          {"gaps", gaps},
          {"exterior_points", em.exterior_points()}};
}

// "lo:hi:count" -> count equispaced points including both ends.
std::vector<double> parse_grid(const std::string& spec) {
  std::stringstream ss(spec);
  std::string a, b, c;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c))
    throw ValidationError("grid must look like lo:hi:count, got '" + spec + "'");
  double lo, hi;
  int count;
  try {
    lo = std::stod(a), hi = std::stod(b), count = std::stoi(c);
  } catch (const std::exception&) {
    throw ValidationError("grid must look like lo:hi:count, got '" + spec + "'");
  }
  if (count < 1 || !(hi >= lo)) throw ValidationError("grid needs count >= 1 and hi >= lo");
  return linspace(lo, hi, count);
}

std::pair<double, double> parse_range(const std::string& spec) {
  const auto pos = spec.find(':');
  try {
    if (pos != std::string::npos) {
      const double lo = std::stod(spec.substr(0, pos)), hi = std::stod(spec.substr(pos + 1));
      if (hi > lo) return {lo, hi};
    }
  } catch (const std::exception&) {
  }
  throw ValidationError("range must look like lo:hi with lo < hi, got '" + spec + "'");
}

std::vector<int> parse_int_list(const std::string& spec) {
  std::vector<int> out;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw ValidationError("bad integer list '" + spec + "'");
    }
    if (out.back() < 1) throw ValidationError("list entries must be >= 1");
  }
  if (out.empty()) throw ValidationError("empty integer list");
  return out;
}

// 200 cell centres over the hull of the support widened by one unit, clipped to the domain.
std::vector<double> default_measure_grid(const EquilibriumMeasure& em) {
  const auto& I = em.potential().support();
  const double lo = std::max(em.support().inf() - 1.0, I.inf());
  const double hi = std::min(em.support().sup() + 1.0, I.sup());
  std::vector<double> g;
  const int count = 200;
  for (int i = 0; i < count; ++i) g.push_back(lo + (hi - lo) * (i + 0.5) / count);
  return g;
}

struct Context {
  std::string out_dir;
  int threads = 1;
  std::ostream* out = nullptr;
  RunManifest manifest;

  void emit(const std::string& name, const std::string& text) {
    write_text((std::filesystem::path(out_dir) / name).string(), text);
    manifest.files.push_back(name);
  }
  void emit_json(const std::string& name, const json& j) { emit(name, j.dump(2) + "\n"); }
};

std::string verdict(const VariationalEntry& e) {
  switch (e.kind) {
    case VariationalEntry::Kind::equality: return e.passed ? "equality_ok" : "equality_fail";
    case VariationalEntry::Kind::inequality: return e.passed ? "inequality_ok" : "inequality_fail";
    case VariationalEntry::Kind::outside_domain: return "outside_domain";
  }
  return "?";
}

int cmd_validate(Context& ctx, const std::string& config) {
  const Potential p = load_potential(config);
  const ValidationReport rep = validate(p);
  json checks = json::array();
  for (const auto& c : rep.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    *ctx.out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  }
  ctx.emit_json("validate.json", {{"config", config}, {"ok", rep.ok()}, {"checks", checks}});
  return rep.ok() ? kExitOk : kExitValidation;
}

int cmd_equilibrium(Context& ctx, const std::string& config, const std::string& structure,
                    const std::string& grid_spec) {
  const Potential p = load_potential(config);
  const CutStructure cs = parse_cut_structure(structure);
  const EquilibriumMeasure em = solve_support(p, cs);
  const std::vector<double> grid = grid_spec.empty() ? default_measure_grid(em) : parse_grid(grid_spec);

  CsvTable dens;
  dens.add_meta("config", config);
  dens.add_meta("structure", structure);
  dens.columns = {"x", "rho", "in_support"};
  for (double x : grid) {
    const auto d = em.density(x);
    dens.add_row({fmt17(x), fmt17(d.value), d.in_support ? "1" : "0"});
  }
  ctx.emit("equilibrium_density.csv", dens.str());

  const VariationalReport rep = check_variational(em, grid);
  CsvTable var;
  var.add_meta("config", config);
  var.add_meta("structure", structure);
  var.add_meta("ell", fmt17(em.ell()));
  var.columns = {"x", "residual", "verdict"};
  for (const auto& e : rep.entries) var.add_row({fmt17(e.x), fmt17(e.value), verdict(e)});
  ctx.emit("equilibrium_variational.csv", var.str());

  json j = to_json(em);
  j["config"] = config;
  j["structure"] = structure;
  j["variational"] = {{"ok", rep.ok()},
                      {"max_equality_residual", rep.max_equality_residual},
                      {"max_inequality_value", std::isfinite(rep.max_inequality_value) ? json(rep.max_inequality_value)
                                                                                        : json(nullptr)},
                      {"grid_points", grid.size()}};
  ctx.emit_json("equilibrium.json", j);
  *ctx.out << "support " << em.support().to_string() << ", ell = " << fmt17(em.ell())
           << ", variational " << (rep.ok() ? "ok" : "FAILED") << "\n";
  return rep.ok() ? kExitOk : kExitNumerical;
}

struct FamilyChoice {
  ModelFamily family;
  double default_n = 0.0;
  std::string label;
};

FamilyChoice choose_family(const std::string& config, const std::string& scenario, const std::string& structure,
                           const ScenarioParams& params) {
  if (config.empty() == scenario.empty()) throw ValidationError("give exactly one of a config file or --scenario");
  if (!scenario.empty()) {
    const Scenario s = make_scenario(scenario, params);
    return {s.family, static_cast<double>(s.n_list.back()), scenario};
  }
  const Potential p = load_potential(config);
  const EquilibriumMeasure em = solve_support(p, parse_cut_structure(structure));
  return {constant_family(em), static_cast<double>(p.n()), config};
}

int cmd_classify(Context& ctx, const FamilyChoice& fc, double n) {
  if (n <= 0.0) n = fc.default_n;
  const auto cps = find_critical_points(fc.family);
  json points = json::array();
  for (const auto& cp : cps) {
    json e = to_json(cp);
    e["model_data"] = to_json(extract_model_data(fc.family, cp, n));
    points.push_back(e);
    *ctx.out << to_string(cp.kind) << " point at " << fmt17(cp.x_star) << ": k = " << cp.order_k
             << ", delta = " << cp.delta.to_string() << "\n";
  }
  ctx.emit_json("classify.json", {{"source", fc.label}, {"n", n}, {"critical_points", points}});
  return kExitOk;
}

struct KernelArgs {
  std::string config;
  std::int64_t n = 0;
  std::string at = "raw";
  std::string grid;
  std::string structure = "one_cut";
  int resolution = 0;
  std::string cache_dir;
};

char hex_digit(unsigned v) { return "0123456789abcdef"[v & 15]; }

int cmd_kernel(Context& ctx, const KernelArgs& a) {
  Potential p = load_potential(a.config);
  if (a.n > 0) p = p.with_n(a.n);
  if (!validate(p).ok()) throw ValidationError("potential fails validation");
  const std::int64_t n = p.n();
  const int res = a.resolution > 0 ? a.resolution : default_resolution(n);
  const QuadratureRule q = build_quadrature(p, res);

  Recurrence r;
  bool cached = false;
  std::string cache_path;
  if (!a.cache_dir.empty()) {
    const std::uint64_t key = recurrence_cache_key(p, res, static_cast<int>(n));
    std::string name(16, '0');
    for (int i = 0; i < 16; ++i) name[i] = hex_digit(static_cast<unsigned>(key >> (60 - 4 * i)));
    cache_path = (std::filesystem::path(a.cache_dir) / (name + ".rec")).string();
    cached = load_recurrence(cache_path, key, r);
    if (!cached) {
      r = stieltjes_recurrence(q, static_cast<int>(n));
      std::filesystem::create_directories(a.cache_dir);
      save_recurrence(cache_path, r, key);
    }
  } else {
    r = stieltjes_recurrence(q, static_cast<int>(n));
  }

  ScalingMap map;
  json map_json = {{"mode", "raw"}};
  std::vector<double> grid;
  if (a.at == "raw") {
    const double lo = std::max(p.support().inf(), -3.0), hi = std::min(p.support().sup(), 3.0);
    grid = a.grid.empty() ? linspace(lo, hi, 31) : parse_grid(a.grid);
  } else {
    double x_star;
    try {
      x_star = std::stod(a.at);
    } catch (const std::exception&) {
      throw ValidationError("--at takes 'raw' or a number, got '" + a.at + "'");
    }
    const EquilibriumMeasure em = solve_support(p, parse_cut_structure(a.structure));
    const CriticalPoint cp = critical_point_at(constant_family(em), x_star);
    const bool mirrored = cp.kind == PointKind::edge && cp.side == EdgeSide::left;
    map = scaling_map(cp, mirrored, n);
    map_json = {{"mode", "scaled"},      {"x_star", cp.x_star}, {"delta", cp.delta.to_string()},
                {"scale", map.scale},    {"orientation", map.orientation}, {"point", to_json(cp)}};
    grid = a.grid.empty() ? linspace(-2.0, 2.0, 9) : parse_grid(a.grid);
  }

  const KernelGrid g = evaluate_grid([&](double u, double v) { return scaled_kernel(r, p, map, u, v); }, grid, grid,
                                     ctx.threads);
  CsvTable kc;
  kc.add_meta("config", a.config);
  kc.add_meta("n", std::to_string(n));
  kc.add_meta("map", map_json.dump());
  kc.columns = {"u", "v", "x", "y", "value", "in_domain"};
  double asym = 0.0;
  std::size_t outside = 0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = 0; j < grid.size(); ++j) {
      kc.add_row({fmt17(grid[i]), fmt17(grid[j]), fmt17(map.to_x(grid[i])), fmt17(map.to_x(grid[j])),
                  fmt17(g.values[i][j]), g.in_domain[i][j] ? "1" : "0"});
      asym = std::max(asym, std::abs(g.values[i][j] - g.values[j][i]));
      if (!g.in_domain[i][j]) ++outside;
    }
  ctx.emit("kernel_grid.csv", kc.str());

  CsvTable tc;
  tc.add_meta("config", a.config);
  tc.add_meta("n", std::to_string(n));
  tc.columns = {"x", "dx_weight", "k_xx", "contribution"};
  double trace = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double k = cd_kernel(r, p, q.nodes[i], q.nodes[i]).value;
    const double dw = k != 0.0 ? dx_weight(q, p, i) : 0.0;
    tc.add_row({q.nodes[i], dw, k, dw * k});
    trace += dw * k;
  }
  ctx.emit("kernel_trace.csv", tc.str());

  CsvTable rc;
  rc.add_meta("config", a.config);
  rc.add_meta("resolution", std::to_string(res));
  std::string rec = rc.str() + recurrence_csv(r);
  ctx.emit("kernel_recurrence.csv", rec);

  json j = {{"config", a.config},
            {"n", n},
            {"resolution", res},
            {"nodes", q.size()},
            {"quadrature", q.provenance},
            {"recurrence_cached", cached},
            {"map", map_json},
            {"trace", trace},
            {"trace_relative_error", std::abs(trace - static_cast<double>(n)) / static_cast<double>(n)},
            {"max_asymmetry", asym},
            {"out_of_domain_points", outside}};
  if (!cache_path.empty()) j["cache_file"] = cache_path;
  ctx.emit_json("kernel.json", j);
  *ctx.out << "n = " << n << ", trace = " << fmt17(trace) << ", max asymmetry = " << asym << "\n";
  return kExitOk;
}

int cmd_converge(Context& ctx, const std::string& name, const ScenarioParams& params, const std::string& n_list,
                 const std::string& grid_spec) {
  const Scenario s = make_scenario(name, params);
  const std::vector<int> ns = n_list.empty() ? s.n_list : parse_int_list(n_list);
  const std::vector<double> grid = grid_spec.empty() ? s.grid : parse_grid(grid_spec);
  const ScanResult res = convergence_scan(s, ns, grid, ctx.threads);
  json rows = json::array();
  for (const auto& row : res.rows) {
    rows.push_back({{"n", row.n},
                    {"sup_error", row.compared ? json(row.sup_error) : json(nullptr)},
                    {"nodes", row.nodes},
                    {"seconds", row.seconds}});
    *ctx.out << "n = " << row.n << "  sup error "
             << (row.compared ? fmt17(row.sup_error) : std::string("(baseline)")) << "\n";
  }
  ctx.emit_json("converge.json", {{"scenario", s.name},
                                  {"description", s.description},
                                  {"params", {{"tau", params.tau}, {"alpha1", params.alpha1}, {"alpha2", params.alpha2}}},
                                  {"point", to_json(res.point)},
                                  {"mirrored", res.mirrored},
                                  {"reference", res.reference},
                                  {"affine_map", res.affine_map},
                                  {"grid", res.grid},
                                  {"rows", rows},
                                  {"fitted_exponent", res.fitted_exponent},
                                  {"decreasing", res.decreasing}});
  *ctx.out << "fitted exponent " << fmt17(res.fitted_exponent) << ", decreasing " << (res.decreasing ? "yes" : "no")
           << "\n";
  return kExitOk;
}

struct SampleArgs {
  std::string config;
  std::int64_t steps = 0;
  std::int64_t burn_in = -1;
  std::int64_t thin = 1;
  std::uint64_t seed = 0;
  int chains = 1;
  std::string structure = "one_cut";
  int bins = 40;
  std::string range;
  bool dump = true;
};

int cmd_sample(Context& ctx, const SampleArgs& a) {
  const Potential p = load_potential(a.config);
  if (a.steps <= 0) throw ValidationError("--steps must be positive");
  SamplerOptions o;
  o.steps = a.steps;
  o.burn_in = a.burn_in >= 0 ? a.burn_in : a.steps / 10;
  o.thin = a.thin;
  o.seed = a.seed;
  const auto runs = mcmc_sample_chains(p, o, a.chains, ctx.threads);

  json chains = json::array();
  std::vector<double> pooled;
  for (std::size_t c = 0; c < runs.size(); ++c) {
    const SampleRun& run = runs[c];
    if (a.dump) {
      CsvTable t;
      t.add_meta("config", a.config);
      t.add_meta("seed", std::to_string(run.state.seed));
      t.add_meta("stream", std::to_string(run.state.stream));
      t.add_meta("step_scale", fmt17(run.state.step_scale));
      t.columns = {"sweep"};
      for (int i = 0; i < run.n; ++i) t.columns.push_back("x" + std::to_string(i));
      for (std::size_t k = 0; k < run.sweeps.size(); ++k) {
        std::vector<std::string> row{std::to_string(run.sweeps[k])};
        for (int i = 0; i < run.n; ++i) row.push_back(fmt17(run.configuration(k)[i]));
        t.add_row(std::move(row));
      }
      ctx.emit("sample_chain" + std::to_string(c) + ".csv", t.str());
    }
    pooled.insert(pooled.end(), run.samples.begin(), run.samples.end());
    chains.push_back({{"stream", run.state.stream},
                      {"kept", run.sweeps.size()},
                      {"acceptance", run.acceptance},
                      {"burn_in_acceptance", run.burn_in_acceptance},
                      {"step_scale", run.state.step_scale},
                      {"accept_count", run.state.accept_count},
                      {"propose_count", run.state.propose_count},
                      {"max_recheck_drift", run.max_recheck_drift},
                      {"max_balance_residual", run.max_balance_residual}});
    *ctx.out << "chain " << c << ": acceptance " << run.acceptance << ", step " << run.state.step_scale << "\n";
  }

  json comparison = nullptr;
  try {
    const EquilibriumMeasure em = solve_support(p, parse_cut_structure(a.structure));
    double lo, hi;
    if (a.range.empty()) {
      lo = std::max(em.support().inf() - 0.5, p.support().inf());
      hi = std::min(em.support().sup() + 0.5, p.support().sup());
    } else {
      std::tie(lo, hi) = parse_range(a.range);
    }
    const Histogram h = histogram_density(pooled, uniform_edges(lo, hi, a.bins));
    const DensityComparison cmp = compare_density(h, em);
    CsvTable t;
    t.add_meta("config", a.config);
    t.add_meta("structure", a.structure);
    t.add_meta("outside", std::to_string(h.outside));
    t.columns = {"lo", "hi", "count", "density", "reference"};
    for (std::size_t i = 0; i < h.bins(); ++i)
      t.add_row({fmt17(h.edges[i]), fmt17(h.edges[i + 1]), std::to_string(h.counts[i]), fmt17(h.density[i]),
                 fmt17(cmp.reference[i])});
    ctx.emit("sample_histogram.csv", t.str());
    comparison = {{"structure", a.structure}, {"bins", a.bins},     {"range", {lo, hi}},
                  {"sup_dev", cmp.sup_dev},   {"l1_dev", cmp.l1_dev}, {"outside", h.outside}};
    *ctx.out << "density vs equilibrium: sup " << cmp.sup_dev << ", l1 " << cmp.l1_dev << "\n";
  } catch (const NumericalError& e) {
    comparison = {{"structure", a.structure}, {"skipped", e.what()}};
  }
  ctx.emit_json("sample.json", {{"config", a.config},
                                {"seed", a.seed},
                                {"rng", "mt19937_64, seed_seq(seed, stream)"},
                                {"steps", o.steps},
                                {"burn_in", o.burn_in},
                                {"thin", o.thin},
                                {"chains", chains},
                                {"comparison", comparison}});
  return kExitOk;
}

std::string resolve_out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return "scmm-out";
}

json collect_overrides(const CLI::App* sub) {
  json o = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->count() == 0 || opt->get_name() == "--help") continue;
    const auto& res = opt->results();
    o[opt->get_name()] = res.size() == 1 ? json(res[0]) : json(res);
  }
  return o;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical lab for semi-classical hermitian one-matrix models", "scmm"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  std::string out_flag;
  int threads = 1;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_flag, "Output directory (overrides $" + std::string(kOutputDirEnv) + ")");
    sub->add_option("--threads", threads, "Worker threads, 0 = hardware concurrency")->check(CLI::NonNegativeNumber);
  };

  std::string config, structure = "one_cut", grid, scenario;
  double n_classify = 0.0;
  ScenarioParams params;
  std::optional<double> tau, alpha1, alpha2;
  auto add_params = [&](CLI::App* sub) {
    sub->add_option("--tau", tau, "Double-scaling parameter");
    sub->add_option("--alpha1", alpha1, "Charge at the hard edge");
    sub->add_option("--alpha2", alpha2, "Second charge (mp-two-charge)");
  };

  auto* validate_cmd = app.add_subcommand("validate", "Check a potential config");
  validate_cmd->add_option("config", config, "Potential JSON")->required();
  add_common(validate_cmd);

  auto* eq_cmd = app.add_subcommand("equilibrium", "Solve the equilibrium problem");
  eq_cmd->add_option("config", config, "Potential JSON")->required();
  eq_cmd->add_option("--structure", structure, "one_cut | symmetric_two_cut | hard_edge_one_cut");
  eq_cmd->add_option("--grid", grid, "lo:hi:count (default: 200 cell centres around the support)");
  add_common(eq_cmd);

  auto* cl_cmd = app.add_subcommand("classify", "Critical points and model data");
  cl_cmd->add_option("config", config, "Potential JSON");
  cl_cmd->add_option("--scenario", scenario, "Use a double-scaling preset instead of a config");
  cl_cmd->add_option("--structure", structure, "Cut structure for a config");
  cl_cmd->add_option("--n", n_classify, "n for the finite-n parts of the model data");
  add_params(cl_cmd);
  add_common(cl_cmd);

  KernelArgs ka;
  auto* k_cmd = app.add_subcommand("kernel", "Christoffel-Darboux kernel on a grid");
  k_cmd->add_option("config", ka.config, "Potential JSON")->required();
  k_cmd->add_option("--n", ka.n, "Degree (overrides the config)");
  k_cmd->add_option("--at", ka.at, "'raw' for x coordinates, or x* for the scaled kernel around x*");
  k_cmd->add_option("--grid", ka.grid, "lo:hi:count");
  k_cmd->add_option("--structure", ka.structure, "Cut structure used to classify x*");
  k_cmd->add_option("--resolution", ka.resolution, "Quadrature resolution (default max(800, 16n))");
  k_cmd->add_option("--cache", ka.cache_dir, "Directory for cached recurrence coefficients");
  add_common(k_cmd);

  std::string n_list;
  auto* cv_cmd = app.add_subcommand("converge", "Convergence scan for a named scenario");
  cv_cmd->add_option("scenario", scenario, "gue-bulk | gue-edge | quartic-merge | mp-hard-edge | mp-two-charge")
      ->required();
  cv_cmd->add_option("--n-list", n_list, "Comma separated n values");
  cv_cmd->add_option("--grid", grid, "lo:hi:count");
  add_params(cv_cmd);
  add_common(cv_cmd);

  SampleArgs sa;
  bool no_dump = false;
  auto* s_cmd = app.add_subcommand("sample", "Metropolis sampling of the eigenvalue density");
  s_cmd->add_option("config", sa.config, "Potential JSON")->required();
  s_cmd->add_option("--steps", sa.steps, "Sweeps in total, burn-in included")->required();
  s_cmd->add_option("--burn-in", sa.burn_in, "Sweeps discarded (default steps/10)");
  s_cmd->add_option("--thin", sa.thin, "Keep every thin-th sweep");
  s_cmd->add_option("--seed", sa.seed, "RNG seed");
  s_cmd->add_option("--chains", sa.chains, "Independent chains on streams 0..chains-1");
  s_cmd->add_option("--structure", sa.structure, "Cut structure of the reference density");
  s_cmd->add_option("--bins", sa.bins, "Histogram bins");
  s_cmd->add_option("--range", sa.range, "Histogram range lo:hi");
  s_cmd->add_flag("--no-dump", no_dump, "Skip the per-chain sample CSVs");
  add_common(s_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  Context ctx;
  ctx.out = &out;
  ctx.out_dir = resolve_out_dir(out_flag);
  ctx.threads = threads == 0 ? static_cast<int>(std::max(1u, std::thread::hardware_concurrency())) : threads;
  ctx.manifest.command = sub->get_name();
  ctx.manifest.config_path = sub == cv_cmd ? scenario : (sub == k_cmd ? ka.config : sub == s_cmd ? sa.config : config);
  ctx.manifest.overrides = collect_overrides(sub);
  ctx.manifest.output_dir = ctx.out_dir;
  ctx.manifest.tool_version = kToolVersion;

  if (!scenario.empty() || sub == cv_cmd) params = default_params(scenario);
  if (tau) params.tau = *tau;
  if (alpha1) params.alpha1 = *alpha1;
  if (alpha2) params.alpha2 = *alpha2;

  const auto t0 = std::chrono::steady_clock::now();
  int code = kExitOk;
  try {
    if (sub == validate_cmd) code = cmd_validate(ctx, config);
    else if (sub == eq_cmd) code = cmd_equilibrium(ctx, config, structure, grid);
    else if (sub == cl_cmd) code = cmd_classify(ctx, choose_family(config, scenario, structure, params), n_classify);
    else if (sub == k_cmd) code = cmd_kernel(ctx, ka);
    else if (sub == cv_cmd) code = cmd_converge(ctx, scenario, params, n_list, grid);
    else if (sub == s_cmd) {
      sa.dump = !no_dump;
      code = cmd_sample(ctx, sa);
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    code = kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    code = kExitNumerical;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    code = kExitNumerical;
  }
  ctx.manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ctx.manifest.exit_code = code;
  try {
    write_text((std::filesystem::path(ctx.out_dir) / (ctx.manifest.command + "_manifest.json")).string(),
               ctx.manifest.to_json().dump(2) + "\n");
  } catch (const std::exception& e) {
    err << "cannot write manifest: " << e.what() << "\n";
    if (code == kExitOk) code = kExitNumerical;
  }
  return code;
}

}  // namespace scmm
