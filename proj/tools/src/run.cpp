#include "chiralcat/cli/run.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "chiralcat/closed_dynamics.hpp"
#include "chiralcat/cli/io.hpp"
#include "chiralcat/errors.hpp"

namespace chiralcat::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::optional<double> maybe_cat_time(const SystemParams& s) {
  try {
    return cat_time(s);
  } catch (const DegenerateDetuning&) {
    return std::nullopt;
  }
}

double sample_time(const ExperimentConfig& c) {
  if (c.run.wigner_time) return *c.run.wigner_time;
  const auto ts = maybe_cat_time(c.system);
  if (!ts) throw DegenerateDetuning("cat time undefined for this coupling; set run.wigner_time");
  return *ts;
}

std::vector<OutputFile> closed_curves(const ExperimentConfig& c) {
  const ClosedSimulation sim(c.system, c.run.tail_threshold);
  CsvWriter fid({"t", "F", "F_plus", "F_minus"});
  CsvWriter prob({"t", "P_plus", "P_minus", "P_plus_analytic", "P_minus_analytic", "norm"});
  for (double t : c.run.times.points(maybe_cat_time(c.system))) {
    const ClosedSample s = sim.sample(t);
    fid.row({t, s.fidelity, s.fidelity_plus, s.fidelity_minus});
    prob.row({t, s.p_plus, s.p_minus, s.p_plus_analytic, s.p_minus_analytic, s.norm});
  }
  return {{"closed_fidelities.csv", fid.str()}, {"closed_probabilities.csv", prob.str()}};
}

std::vector<OutputFile> analytic_curves(const ExperimentConfig& c) {
  CsvWriter out({"t", "P_plus", "P_minus", "M_plus", "M_minus"});
  for (double t : c.run.times.points(maybe_cat_time(c.system))) {
    const BranchWeights w = normalizations_and_probabilities(c.system, t);
    out.row({t, w.p_plus, w.p_minus, w.m_plus.value_or(kNaN), w.m_minus.value_or(kNaN)});
  }
  return {{"analytic_probabilities.csv", out.str()}};
}

double open_branch_fidelity(const ExperimentConfig& c, double t, Branch b, const DensityMatrix& rho) {
  try {
    return fidelity_open_branch(c.system, t, b, rho);
  } catch (const NullBranch&) {
    return kNaN;
  }
}

std::vector<OutputFile> open_curves(const ExperimentConfig& c) {
  CsvWriter fid({"t", "f", "f_plus", "f_minus"});
  CsvWriter prob({"t", "p_plus", "p_minus", "trace", "purity"});
  const std::vector<double> times = c.run.times.points(maybe_cat_time(c.system));
  const DensityMatrix rho0 = initial_density(c.system.alpha, c.system.trunc, c.run.tail_threshold);
  MasterEquation(c.system).evolve(
      rho0, times,
      [&](double t, const DensityMatrix& rho) {
        fid.row({t, fidelity_open(c.system, t, rho), open_branch_fidelity(c, t, Branch::Plus, rho),
                 open_branch_fidelity(c, t, Branch::Minus, rho)});
        prob.row({t, branch_probability(rho, Branch::Plus), branch_probability(rho, Branch::Minus),
                  rho.trace().real(), rho.purity()});
      },
      c.run.integrator);
  return {{"open_fidelities.csv", fid.str()}, {"open_probabilities.csv", prob.str()}};
}

json grid_json(const GridSpec& g) {
  return {{"re_min", g.re_min}, {"re_max", g.re_max}, {"im_min", g.im_min},
          {"im_max", g.im_max}, {"n_re", g.n_re},     {"n_im", g.n_im}};
}

void emit_grid(const WignerGrid& g, std::vector<OutputFile>& out) {
  const std::string stem = "wigner_" + std::string(to_string(g.meta.source)) + "_" +
                           std::string(to_string(g.meta.mode)) + "_" +
                           std::string(to_string(g.meta.branch));
  CsvWriter csv({"re_chi", "im_chi", "w"});
  for (int i = 0; i < g.grid.n_re; ++i) {
    for (int j = 0; j < g.grid.n_im; ++j) csv.row({g.grid.re(i), g.grid.im(j), g.at(i, j)});
  }
  const Negativity neg = negativity(g);
  const cplx peak = g.argmax();
  const json meta = {{"source", to_string(g.meta.source)},
                     {"mode", to_string(g.meta.mode)},
                     {"branch", to_string(g.meta.branch)},
                     {"time", g.meta.time},
                     {"grid", grid_json(g.grid)},
                     {"csv", stem + ".csv"},
                     {"min", g.min()},
                     {"max", g.max()},
                     {"argmax", {peak.real(), peak.imag()}},
                     {"integral", g.integral()},
                     {"negative_volume", neg.negative_volume},
                     {"max_imag_residue", g.max_imag_residue}};
  out.push_back({stem + ".csv", csv.str()});
  out.push_back({stem + ".json", meta.dump(2) + "\n"});
}

std::vector<OutputFile> wigner_map(const ExperimentConfig& c) {
  const double t = sample_time(c);
  std::vector<OutputFile> out;
  for (WignerSourceKind kind : c.run.sources) {
    std::optional<PureState> psi;
    std::optional<DensityMatrix> rho;
    if (kind == WignerSourceKind::Exact) {
      psi = ClosedSimulation(c.system, c.run.tail_threshold).exact_state(t);
    } else if (kind == WignerSourceKind::Open) {
      rho = evolve_master(c.system,
                          initial_density(c.system.alpha, c.system.trunc, c.run.tail_threshold), t,
                          c.run.integrator);
    }
    for (Branch b : c.run.branches) {
      std::optional<BranchResult> br;
      std::optional<BranchDensity> bd;
      if (psi) br = measure_branch(*psi, b);
      if (rho) bd = branch_density(*rho, b);
      for (Mode m : c.run.modes) {
        const WignerSource src = psi   ? WignerSource::exact(*br, m, t)
                                 : rho ? WignerSource::open(*bd, m, t)
                                       : WignerSource::analytic(c.system, t, b, m);
        emit_grid(evaluate_grid(src, c.run.grid, c.run.threads), out);
      }
    }
  }
  return out;
}

std::vector<OutputFile> sagnac(const ExperimentConfig& c) {
  const double shift = sagnac_shift(c.physical);
  json j = {{"omega_rad_s", c.physical.omega_rad_s},
            {"cavity_frequency_rad_s", c.physical.cavity_frequency()},
            {"delta_sag_rad_s", shift}};
  if (c.coupling_rad_s > 0.0) {
    j["j_rad_s"] = c.coupling_rad_s;
    j["delta_sag_over_j"] = shift / c.coupling_rad_s;
    j["omega_for_configured_delta_sag_rad_s"] =
        required_rotation(c.system.delta_sag * c.coupling_rad_s, c.physical);
  }
  return {{"sagnac.json", j.dump(2) + "\n"}};
}

std::vector<OutputFile> compute_single(const ExperimentConfig& c) {
  switch (c.run.kind) {
    case RunKind::ClosedCurves: return closed_curves(c);
    case RunKind::OpenCurves: return open_curves(c);
    case RunKind::WignerMap: return wigner_map(c);
    case RunKind::AnalyticCurves: return analytic_curves(c);
    case RunKind::Sagnac: return sagnac(c);
    case RunKind::Sweep: break;
  }
  throw std::logic_error("sweep entries cannot nest");
}

json derived(const ExperimentConfig& c) {
  const SystemParams& s = c.system;
  json d = {{"delta_cw", s.delta_cw()}, {"delta_ccw", s.delta_ccw()}};
  try {
    const StarkRates z = stark_rates(s);
    d["zeta_cw"] = z.cw;
    d["zeta_ccw"] = z.ccw;
  } catch (const DegenerateDetuning&) {
    d["zeta_cw"] = nullptr;
    d["zeta_ccw"] = nullptr;
  }
  const auto ts = maybe_cat_time(s);
  d["cat_time"] = ts ? json(*ts) : json(nullptr);
  try {
    const DispersiveReport r = dispersive_check(s);
    d["dispersive_check"] = {
        {"sagnac_ratio_cw", r.sagnac_ratio_cw ? json(*r.sagnac_ratio_cw) : json(nullptr)},
        {"sagnac_ratio_ccw", r.sagnac_ratio_ccw ? json(*r.sagnac_ratio_ccw) : json(nullptr)},
        {"mixing_ratio_cw", r.mixing_ratio_cw},
        {"mixing_ratio_ccw", r.mixing_ratio_ccw},
        {"threshold", r.threshold},
        {"pass", r.pass}};
  } catch (const DegenerateDetuning& e) {
    d["dispersive_check"] = {{"error", e.what()}};
  }
  return d;
}

json config_json(const ExperimentConfig& c) {
  json j = json::object();
  for (const auto& [k, v] : c.echo()) j[k] = v;
  return j;
}

}  // namespace

std::vector<OutputFile> compute(const ExperimentConfig& config, unsigned jobs) {
  if (config.run.kind != RunKind::Sweep) return compute_single(config);

  const std::size_t n = config.sweep.values.size();
  std::vector<std::vector<OutputFile>> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = compute_single(config.sweep_entry(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const std::size_t workers = std::clamp<std::size_t>(jobs, 1, n);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }
  std::vector<OutputFile> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    for (OutputFile& f : results[i]) {
      out.push_back({config.sweep_label(i) + "/" + f.path, std::move(f.content)});
    }
  }
  return out;
}

int run(const ExperimentConfig& config, const RunOptions& opts, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  const std::filesystem::path dir = opts.out_dir.empty() ? std::filesystem::path(config.run.output) : opts.out_dir;

  std::vector<OutputFile> files;
  try {
    config.validate();
    files = compute(config, opts.jobs);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const Error& e) {
    log << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  }

  json manifest = {{"tool", {{"name", "chiralcat"}, {"version", kToolVersion}}},
                   {"kind", to_string(config.run.kind)},
                   {"seed_free", opts.seed_free},
                   {"config", config_json(config)},
                   {"derived", derived(config)}};
  if (config.run.kind == RunKind::Sweep) {
    json entries = json::array();
    for (std::size_t i = 0; i < config.sweep.values.size(); ++i) {
      entries.push_back({{"label", config.sweep_label(i)},
                         {"parameter", config.sweep.parameter},
                         {"value", config.sweep.values[i]},
                         {"derived", derived(config.sweep_entry(i))}});
    }
    manifest["sweep"] = entries;
  }

  json listing = json::array();
  try {
    for (const OutputFile& f : files) {
      write_atomic(dir / f.path, f.content);
      listing.push_back({{"path", f.path}, {"bytes", f.content.size()}, {"sha256", sha256_hex(f.content)}});
    }
    manifest["outputs"] = listing;
    manifest["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    log << "write failed: " << e.what() << "\n";
    return kFailure;
  }
  log << "wrote " << files.size() << " files and manifest.json to " << dir.string() << "\n";
  return kSuccess;
}

}  // namespace chiralcat::cli
