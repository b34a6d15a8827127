#include "chiralcat/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <set>

#include "chiralcat/cli/io.hpp"

namespace chiralcat::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(std::string_view v) {
  v = trim(v);
  double x = 0.0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc{} || end != v.data() + v.size()) {
    throw ConfigError("expected a number, got '" + std::string(v) + "'");
  }
  return x;
}

int parse_int(std::string_view v) {
  v = trim(v);
  int x = 0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc{} || end != v.data() + v.size()) {
    throw ConfigError("expected an integer, got '" + std::string(v) + "'");
  }
  return x;
}

bool parse_bool(std::string_view v) {
  v = trim(v);
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError("expected true or false, got '" + std::string(v) + "'");
}

std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = v.find(',');
    out.push_back(trim(v.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  if (out.size() == 1 && out[0].empty()) out.clear();
  return out;
}

template <class T>
std::string join(const std::vector<T>& xs, const std::function<std::string(const T&)>& f) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += f(xs[i]);
  }
  return out;
}

RunKind parse_kind(std::string_view v) {
  for (RunKind k : {RunKind::ClosedCurves, RunKind::OpenCurves, RunKind::WignerMap,
                    RunKind::AnalyticCurves, RunKind::Sagnac, RunKind::Sweep}) {
    if (to_string(k) == trim(v)) return k;
  }
  throw ConfigError("unknown run kind '" + std::string(v) + "'");
}

WignerSourceKind parse_source(std::string_view v) {
  for (auto k : {WignerSourceKind::Analytic, WignerSourceKind::Exact, WignerSourceKind::Open}) {
    if (to_string(k) == v) return k;
  }
  throw ConfigError("unknown Wigner source '" + std::string(v) + "'");
}

Branch parse_branch(std::string_view v) {
  if (v == "plus") return Branch::Plus;
  if (v == "minus") return Branch::Minus;
  throw ConfigError("unknown branch '" + std::string(v) + "'");
}

Mode parse_mode(std::string_view v) {
  if (v == "cw") return Mode::CW;
  if (v == "ccw") return Mode::CCW;
  throw ConfigError("unknown mode '" + std::string(v) + "'");
}

template <class T>
std::vector<T> parse_list(std::string_view v, T (*one)(std::string_view)) {
  std::vector<T> out;
  for (std::string_view item : split_list(v)) {
    const T x = one(item);
    if (std::find(out.begin(), out.end(), x) != out.end()) {
      throw ConfigError("repeated list entry '" + std::string(item) + "'");
    }
    out.push_back(x);
  }
  return out;
}

struct Key {
  std::string_view name;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
  bool sweepable = false;
};

template <class Get>
Key real_key(std::string_view name, Get ref, bool sweepable) {
  return {name, [ref](ExperimentConfig& c, std::string_view v) { ref(c) = parse_double(v); },
          [ref](const ExperimentConfig& c) {
            return format_double(ref(c));
          },
          sweepable};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back(real_key("system.J", [](auto& c) -> auto& { return c.system.J; }, true));
    k.push_back(
        real_key("system.delta", [](auto& c) -> auto& { return c.system.delta; }, true));
    k.push_back(real_key(
        "system.delta_sag", [](auto& c) -> auto& { return c.system.delta_sag; }, true));
    k.push_back(
        real_key("system.kappa", [](auto& c) -> auto& { return c.system.kappa; }, true));
    k.push_back(
        real_key("system.gamma", [](auto& c) -> auto& { return c.system.gamma; }, true));
    k.push_back({"system.alpha_re",
                 [](ExperimentConfig& c, std::string_view v) {
                   c.system.alpha.real(parse_double(v));
                 },
                 [](const ExperimentConfig& c) { return format_double(c.system.alpha.real()); }, true});
    k.push_back({"system.alpha_im",
                 [](ExperimentConfig& c, std::string_view v) {
                   c.system.alpha.imag(parse_double(v));
                 },
                 [](const ExperimentConfig& c) { return format_double(c.system.alpha.imag()); }, true});
    k.push_back({"system.n_cw",
                 [](ExperimentConfig& c, std::string_view v) {
                   const int n = parse_int(v);
                   if (n < 1) throw ConfigError("system.n_cw must be positive");
                   c.system.trunc = Truncation(n, c.system.trunc.n_ccw());
                 },
                 [](const ExperimentConfig& c) { return std::to_string(c.system.trunc.n_cw()); }});
    k.push_back({"system.n_ccw",
                 [](ExperimentConfig& c, std::string_view v) {
                   const int n = parse_int(v);
                   if (n < 1) throw ConfigError("system.n_ccw must be positive");
                   c.system.trunc = Truncation(c.system.trunc.n_cw(), n);
                 },
                 [](const ExperimentConfig& c) { return std::to_string(c.system.trunc.n_ccw()); }});

    k.push_back(real_key("physical.refractive_index",
                         [](auto& c) -> auto& { return c.physical.refractive_index; },
                         false));
    k.push_back(real_key("physical.radius_m",
                         [](auto& c) -> auto& { return c.physical.radius_m; }, false));
    k.push_back(real_key("physical.wavelength_m",
                         [](auto& c) -> auto& { return c.physical.wavelength_m; },
                         false));
    k.push_back(real_key("physical.omega_rad_s",
                         [](auto& c) -> auto& { return c.physical.omega_rad_s; },
                         false));
    k.push_back(real_key("physical.dn_dlambda",
                         [](auto& c) -> auto& { return c.physical.dn_dlambda; },
                         false));
    k.push_back(real_key("physical.j_rad_s",
                         [](auto& c) -> auto& { return c.coupling_rad_s; }, false));

    k.push_back({"run.kind", [](ExperimentConfig& c, std::string_view v) { c.run.kind = parse_kind(v); },
                 [](const ExperimentConfig& c) { return std::string(to_string(c.run.kind)); }});
    k.push_back(real_key("run.t_start",
                         [](auto& c) -> auto& { return c.run.times.start; }, false));
    k.push_back(
        real_key("run.t_end", [](auto& c) -> auto& { return c.run.times.end; }, false));
    k.push_back({"run.samples",
                 [](ExperimentConfig& c, std::string_view v) { c.run.times.samples = parse_int(v); },
                 [](const ExperimentConfig& c) { return std::to_string(c.run.times.samples); }});
    k.push_back({"run.include_cat_time",
                 [](ExperimentConfig& c, std::string_view v) {
                   c.run.times.include_cat_time = parse_bool(v);
                 },
                 [](const ExperimentConfig& c) {
                   return std::string(c.run.times.include_cat_time ? "true" : "false");
                 }});
    k.push_back({"run.wigner_time",
                 [](ExperimentConfig& c, std::string_view v) {
                   if (trim(v) == "cat") {
                     c.run.wigner_time.reset();
                   } else {
                     c.run.wigner_time = parse_double(v);
                   }
                 },
                 [](const ExperimentConfig& c) {
                   return c.run.wigner_time ? format_double(*c.run.wigner_time) : std::string("cat");
                 }});
    k.push_back({"run.sources",
                 [](ExperimentConfig& c, std::string_view v) {
                   c.run.sources = parse_list(v, parse_source);
                 },
                 [](const ExperimentConfig& c) {
                   return join<WignerSourceKind>(c.run.sources, [](const WignerSourceKind& s) {
                     return std::string(to_string(s));
                   });
                 }});
    k.push_back({"run.branches",
                 [](ExperimentConfig& c, std::string_view v) {
                   c.run.branches = parse_list(v, parse_branch);
                 },
                 [](const ExperimentConfig& c) {
                   return join<Branch>(c.run.branches,
                                       [](const Branch& b) { return std::string(to_string(b)); });
                 }});
    k.push_back({"run.modes",
                 [](ExperimentConfig& c, std::string_view v) { c.run.modes = parse_list(v, parse_mode); },
                 [](const ExperimentConfig& c) {
                   return join<Mode>(c.run.modes,
                                     [](const Mode& m) { return std::string(to_string(m)); });
                 }});
    k.push_back(real_key("run.grid.re_min",
                         [](auto& c) -> auto& { return c.run.grid.re_min; }, false));
    k.push_back(real_key("run.grid.re_max",
                         [](auto& c) -> auto& { return c.run.grid.re_max; }, false));
    k.push_back(real_key("run.grid.im_min",
                         [](auto& c) -> auto& { return c.run.grid.im_min; }, false));
    k.push_back(real_key("run.grid.im_max",
                         [](auto& c) -> auto& { return c.run.grid.im_max; }, false));
    k.push_back({"run.grid.n_re",
                 [](ExperimentConfig& c, std::string_view v) { c.run.grid.n_re = parse_int(v); },
                 [](const ExperimentConfig& c) { return std::to_string(c.run.grid.n_re); }});
    k.push_back({"run.grid.n_im",
                 [](ExperimentConfig& c, std::string_view v) { c.run.grid.n_im = parse_int(v); },
                 [](const ExperimentConfig& c) { return std::to_string(c.run.grid.n_im); }});
    k.push_back({"run.output",
                 [](ExperimentConfig& c, std::string_view v) { c.run.output = std::string(trim(v)); },
                 [](const ExperimentConfig& c) { return c.run.output; }});
    k.push_back(real_key("run.rtol",
                         [](auto& c) -> auto& { return c.run.integrator.rtol; }, false));
    k.push_back(real_key("run.atol",
                         [](auto& c) -> auto& { return c.run.integrator.atol; }, false));
    k.push_back(real_key("run.tail_threshold",
                         [](auto& c) -> auto& { return c.run.tail_threshold; }, false));
    k.push_back({"run.threads",
                 [](ExperimentConfig& c, std::string_view v) {
                   const int n = parse_int(v);
                   if (n < 0) throw ConfigError("run.threads must be non-negative");
                   c.run.threads = static_cast<unsigned>(n);
                 },
                 [](const ExperimentConfig& c) { return std::to_string(c.run.threads); }});

    k.push_back({"sweep.parameter",
                 [](ExperimentConfig& c, std::string_view v) { c.sweep.parameter = std::string(trim(v)); },
                 [](const ExperimentConfig& c) { return c.sweep.parameter; }});
    k.push_back({"sweep.values",
                 [](ExperimentConfig& c, std::string_view v) {
                   c.sweep.values.clear();
                   for (std::string_view item : split_list(v)) c.sweep.values.push_back(parse_double(item));
                 },
                 [](const ExperimentConfig& c) {
                   return join<double>(c.sweep.values, [](const double& x) { return format_double(x); });
                 }});
    k.push_back({"sweep.kind",
                 [](ExperimentConfig& c, std::string_view v) { c.sweep.kind = parse_kind(v); },
                 [](const ExperimentConfig& c) { return std::string(to_string(c.sweep.kind)); }});
    return k;
  }();
  return table;
}

const Key* find_key(std::string_view name) {
  for (const Key& k : keys()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

void validate_run(const ExperimentConfig& c) {
  try {
    c.system.validate();
    c.physical.validate();
    c.run.grid.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const TimeGrid& t = c.run.times;
  if (!std::isfinite(t.start) || !std::isfinite(t.end) || t.start < 0.0 || t.end < t.start) {
    throw ConfigError("time grid must satisfy 0 <= run.t_start <= run.t_end");
  }
  if (t.samples < 1 || (t.samples == 1 && t.end != t.start)) {
    throw ConfigError("run.samples must be >= 2, or 1 with t_start = t_end");
  }
  if (c.run.wigner_time && !(std::isfinite(*c.run.wigner_time) && *c.run.wigner_time >= 0.0)) {
    throw ConfigError("run.wigner_time must be 'cat' or a non-negative time");
  }
  if (c.run.sources.empty() || c.run.branches.empty() || c.run.modes.empty()) {
    throw ConfigError("run.sources, run.branches and run.modes must be non-empty");
  }
  if (!(c.run.integrator.rtol > 0.0) || !(c.run.integrator.atol > 0.0)) {
    throw ConfigError("integrator tolerances must be positive");
  }
  if (!(c.run.tail_threshold > 0.0 && c.run.tail_threshold < 1.0)) {
    throw ConfigError("run.tail_threshold must lie in (0, 1)");
  }
  if (!(c.coupling_rad_s >= 0.0) || !std::isfinite(c.coupling_rad_s)) {
    throw ConfigError("physical.j_rad_s must be non-negative");
  }
  if (c.run.output.empty()) throw ConfigError("run.output must be non-empty");
}

}  // namespace

std::string_view to_string(RunKind k) {
  switch (k) {
    case RunKind::ClosedCurves: return "closed_curves";
    case RunKind::OpenCurves: return "open_curves";
    case RunKind::WignerMap: return "wigner_map";
    case RunKind::AnalyticCurves: return "analytic_curves";
    case RunKind::Sagnac: return "sagnac";
    case RunKind::Sweep: return "sweep";
  }
  return "unknown";
}

std::vector<double> TimeGrid::points(std::optional<double> cat_time) const {
  std::vector<double> t;
  t.reserve(samples + 1);
  if (samples == 1) {
    t.push_back(start);
  } else {
    for (int i = 0; i < samples; ++i) t.push_back(start + (end - start) * i / (samples - 1));
    t.back() = end;
  }
  if (include_cat_time && cat_time && *cat_time >= start && *cat_time <= end) {
    const auto it = std::lower_bound(t.begin(), t.end(), *cat_time);
    if (it == t.end() || *it != *cat_time) t.insert(it, *cat_time);
  }
  return t;
}

void ExperimentConfig::validate() const {
  validate_run(*this);
  if (run.kind != RunKind::Sweep) return;
  const Key* k = find_key(sweep.parameter);
  if (!k || !k->sweepable) throw ConfigError("sweep.parameter '" + sweep.parameter + "' cannot be swept");
  if (sweep.values.empty()) throw ConfigError("sweep.values must be non-empty");
  if (sweep.kind == RunKind::Sweep || sweep.kind == RunKind::Sagnac) {
    throw ConfigError("sweep.kind must be a simulation kind");
  }
  std::set<std::string> labels;
  for (std::size_t i = 0; i < sweep.values.size(); ++i) {
    if (!labels.insert(sweep_label(i)).second) throw ConfigError("repeated sweep value");
    validate_run(sweep_entry(i));
  }
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const Key& k : keys()) out.emplace_back(std::string(k.name), k.get(*this));
  return out;
}

ExperimentConfig ExperimentConfig::sweep_entry(std::size_t i) const {
  ExperimentConfig e = *this;
  find_key(sweep.parameter)->set(e, format_double(sweep.values.at(i)));
  e.run.kind = sweep.kind;
  return e;
}

std::string ExperimentConfig::sweep_label(std::size_t i) const {
  const auto dot = sweep.parameter.rfind('.');
  return sweep.parameter.substr(dot + 1) + "_" + format_double(sweep.values.at(i));
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string_view name = trim(line.substr(0, eq));
    const Key* key = find_key(name);
    if (!key) throw ConfigError(where + "unknown key '" + std::string(name) + "'");
    if (!seen.insert(std::string(name)).second) {
      throw ConfigError(where + "duplicate key '" + std::string(name) + "'");
    }
    try {
      key->set(c, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + std::string(name) + ": " + e.what());
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text);
}

std::string to_text(const ExperimentConfig& c) {
  std::string out;
  for (const auto& [k, v] : c.echo()) out += k + " = " + v + "\n";
  return out;
}

const std::vector<std::string_view>& preset_names() {
  static const std::vector<std::string_view> names{"fig2", "fig3", "fig4", "fig5",
                                                   "fig6", "fig7", "fig8"};
  return names;
}

ExperimentConfig preset(std::string_view name) {
  ExperimentConfig c;
  c.run.output = std::string(name);
  if (name == "fig2" || name == "fig5") {
    c.run.kind = RunKind::WignerMap;
    c.run.sources = {name == "fig2" ? WignerSourceKind::Analytic : WignerSourceKind::Exact};
  } else if (name == "fig3" || name == "fig4") {
    c.run.kind = RunKind::ClosedCurves;
    c.run.times.samples = 2001;
  } else if (name == "fig6" || name == "fig7" || name == "fig8") {
    c.system.gamma = 0.005;
    c.run.kind = RunKind::Sweep;
    c.sweep.parameter = "system.kappa";
    c.sweep.values = {0.0025, 0.005, 0.01};
    if (name == "fig8") {
      c.sweep.kind = RunKind::WignerMap;
      c.run.sources = {WignerSourceKind::Open};
    } else {
      c.sweep.kind = RunKind::OpenCurves;
    }
  } else {
    throw UnknownPreset("unknown preset '" + std::string(name) + "'");
  }
  c.validate();
  return c;
}

}  // namespace chiralcat::cli
