#include "twopulse/config.hpp"

#include "twopulse/analytic.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace twopulse {

namespace pt = boost::property_tree;

namespace {

std::string join(const std::vector<std::string>& items) {
  std::ostringstream os;
  for (std::size_t i = 0; i < items.size(); ++i) os << (i ? "; " : "") << items[i];
  return os.str();
}

std::optional<double> to_number(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<int> to_integer(std::string_view s) {
  int v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return v;
}

// Typed access to one section; remembers which keys were consumed so the
// rest can be reported as unknown.
class Section {
 public:
  Section(std::string name, const pt::ptree* tree, std::vector<std::string>& errors)
      : name_(std::move(name)), tree_(tree), errors_(errors) {}

  bool has(const std::string& key) {
    used_.insert(key);
    return tree_ && tree_->find(key) != tree_->not_found();
  }

  std::optional<std::string> text(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return tree_->find(key)->second.data();
  }

  std::optional<double> number(const std::string& key) {
    const auto t = text(key);
    if (!t) return std::nullopt;
    const auto v = to_number(*t);
    if (!v) fail(key, "expects a finite number, got '" + *t + "'");
    return v;
  }

  double number(const std::string& key, double fallback) { return number(key).value_or(fallback); }

  std::optional<int> integer(const std::string& key) {
    const auto t = text(key);
    if (!t) return std::nullopt;
    const auto v = to_integer(*t);
    if (!v) fail(key, "expects an integer, got '" + *t + "'");
    return v;
  }

  template <class E>
  E choice(const std::string& key, E fallback, const std::map<std::string, E>& options) {
    const auto t = text(key);
    if (!t) return fallback;
    const auto it = options.find(*t);
    if (it != options.end()) return it->second;
    std::string names;
    for (const auto& [k, v] : options) names += (names.empty() ? "" : "|") + k;
    fail(key, "must be one of " + names + ", got '" + *t + "'");
    return fallback;
  }

  void fail(const std::string& key, const std::string& message) {
    errors_.push_back("[" + name_ + "] " + key + " " + message);
  }

  void report_unknown() {
    if (!tree_) return;
    for (const auto& [key, child] : *tree_)
      if (!used_.count(key)) errors_.push_back("[" + name_ + "] unknown key '" + key + "'");
  }

 private:
  std::string name_;
  const pt::ptree* tree_;
  std::vector<std::string>& errors_;
  std::set<std::string> used_;
};

// Exactly one of `step` and `count` may be given; returns the sample count.
std::optional<int> resolve_count(Section& sec, const std::string& step_key,
                                 const std::string& count_key, double span, int fallback,
                                 int extra) {
  const bool has_step = sec.has(step_key);
  const bool has_count = sec.has(count_key);
  if (has_step && has_count) {
    sec.fail(step_key, "and " + count_key + " are mutually exclusive");
    return std::nullopt;
  }
  if (has_count) {
    const auto n = sec.integer(count_key);
    if (n && *n < 1 + extra) {
      sec.fail(count_key, "must be >= " + std::to_string(1 + extra));
      return std::nullopt;
    }
    return n;
  }
  if (has_step) {
    const auto h = sec.number(step_key);
    if (!h) return std::nullopt;
    if (!(*h > 0.0)) {
      sec.fail(step_key, "must be > 0");
      return std::nullopt;
    }
    if (!(span > 0.0)) return std::nullopt;
    const double steps = span / *h;
    const double rounded = std::round(steps);
    if (rounded < 1.0 || std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps)) {
      sec.fail(step_key, "must divide the axis length evenly");
      return std::nullopt;
    }
    return static_cast<int>(rounded) + extra;
  }
  return fallback;
}

void read_pulse(Section& sec, PulseSpec& pulse) {
  pulse.shape = sec.choice<PulseShape>(
      "shape", pulse.shape, {{"sech", PulseShape::sech}, {"gaussian", PulseShape::gaussian}});
  const bool rad = sec.has("area");
  const bool in_pi = sec.has("area_pi");
  if (rad && in_pi) {
    sec.fail("area", "and area_pi are mutually exclusive");
  } else if (rad) {
    pulse.area = sec.number("area", pulse.area);
  } else if (in_pi) {
    pulse.area = sec.number("area_pi", pulse.area / kPi) * kPi;
  }
  pulse.width = sec.number("width", pulse.width);
  pulse.delay = sec.number("delay", pulse.delay);
  pulse.phase = sec.number("phase", pulse.phase);
}

std::vector<double> parse_list(Section& sec, const std::string& key) {
  std::vector<double> out;
  const auto t = sec.text(key);
  if (!t) return out;
  std::stringstream ss(*t);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    const std::string trimmed =
        first == std::string::npos ? std::string{} : item.substr(first, last - first + 1);
    const auto v = to_number(trimmed);
    if (!v) {
      sec.fail(key, "expects a comma-separated list of numbers, got '" + item + "'");
      return {};
    }
    out.push_back(*v);
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : InvalidParameter(join(violations)), violations_(std::move(violations)) {}

ParseOutcome parse_config(std::string_view text) {
  ParseOutcome outcome;
  auto& errors = outcome.violations;

  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    errors.push_back("syntax error at line " + std::to_string(e.line()) + ": " + e.message());
    return outcome;
  }

  static const std::set<std::string> kSections{"medium", "pulse_a", "pulse_b", "grid", "run"};
  for (const auto& [name, child] : tree) {
    const bool stray_key = child.empty() && !child.data().empty();
    if (stray_key) {
      errors.push_back("key '" + name + "' appears outside any section");
    } else if (!kSections.count(name)) {
      errors.push_back("unknown section [" + name + "]");
    }
  }
  const auto section = [&](const std::string& name) {
    const auto it = tree.find(name);
    return Section(name, it == tree.not_found() ? nullptr : &it->second, errors);
  };

  ExperimentConfig cfg;

  Section run = section("run");
  cfg.solver = run.choice<Solver>(
      "solver", cfg.solver,
      {{"full", Solver::full}, {"adiabatic", Solver::adiabatic}, {"analytic", Solver::analytic}});
  cfg.input = run.choice<InputMode>("input", cfg.input,
                                    {{"pulses", InputMode::pulses}, {"analytic", InputMode::analytic}});
  if (const auto n = run.integer("stations")) {
    if (*n < 1) run.fail("stations", "must be >= 1");
    cfg.stations = *n;
  }
  cfg.station_positions = parse_list(run, "station_positions");
  if (const auto dir = run.text("output_dir")) {
    if (dir->empty()) run.fail("output_dir", "must not be empty");
    cfg.output_dir = *dir;
  }
  cfg.tau = run.number("tau", cfg.tau);
  if (!(cfg.tau > 0.0)) run.fail("tau", "must be > 0");
  run.report_unknown();

  Section medium = section("medium");
  MediumPrep& prep = cfg.prep;
  prep.delta_bar = 10.0;
  prep.alpha2 = medium.number("alpha2", prep.alpha2);
  prep.beta2 = medium.number("beta2", prep.beta2);
  prep.delta_bar = medium.number("delta_bar", prep.delta_bar);
  if (const auto t2 = medium.text("t2_star"); t2 && *t2 != "sharp") {
    prep.t2_star = medium.number("t2_star");
    if (!prep.t2_star) prep.t2_star = 1.0;  // already reported
  }
  const auto mu = medium.number("mu");
  const auto entry = medium.number("entry");
  const auto exit = medium.number("exit");
  medium.report_unknown();

  Section pa = section("pulse_a");
  read_pulse(pa, cfg.pulse_a);
  pa.report_unknown();
  Section pb = section("pulse_b");
  read_pulse(pb, cfg.pulse_b);
  pb.report_unknown();

  Section grid = section("grid");
  GridConfig& g = cfg.grid;
  g.t_min = grid.number("t_min", g.t_min);
  g.t_max = grid.number("t_max", g.t_max);
  g.z_min = grid.number("z_min", g.z_min);
  g.z_max = grid.number("z_max", g.z_max);
  if (!(g.t_max > g.t_min)) grid.fail("t_max", "must exceed t_min");
  if (!(g.z_max > g.z_min)) grid.fail("z_max", "must exceed z_min");
  if (const auto n = resolve_count(grid, "dt", "n_t", g.t_max - g.t_min,
                                   static_cast<int>(std::lround((g.t_max - g.t_min) / 0.02)) + 1, 1))
    g.n_t = *n;
  if (const auto n = resolve_count(grid, "dz", "n_z", g.z_max - g.z_min,
                                   std::max(1, static_cast<int>(std::lround((g.z_max - g.z_min) / 0.05))),
                                   0))
    g.n_z = *n;
  if (const auto n = grid.integer("doppler_nodes")) {
    if (*n < 1 || *n > 128) grid.fail("doppler_nodes", "must lie in [1, 128]");
    else g.doppler_nodes = *n;
  }
  if (const auto n = grid.integer("substeps")) {
    if (*n < 1) grid.fail("substeps", "must be >= 1");
    else g.substeps = *n;
  }
  g.stiff_phase_limit = grid.number("stiff_phase_limit", g.stiff_phase_limit);
  if (!(g.stiff_phase_limit >= 0.0)) grid.fail("stiff_phase_limit", "must be >= 0");
  g.scheme = grid.choice<ZScheme>("scheme", g.scheme,
                                  {{"trapezoid", ZScheme::trapezoid}, {"midpoint", ZScheme::midpoint}});
  grid.report_unknown();

  // Domain-level invariants, with mu checked on its own.
  {
    MediumPrep probe = prep;
    probe.mu = 1.0;
    for (auto& v : violations(probe)) errors.push_back("[medium] " + v);
    if (mu && !(*mu > 0.0)) errors.push_back("[medium] mu must be > 0");
    if (entry && exit && !(*entry < *exit))
      errors.push_back("[medium] medium entry face must precede exit face");
  }
  for (const auto* pulse : {&cfg.pulse_a, &cfg.pulse_b})
    for (auto& v : violations(*pulse))
      errors.push_back(std::string(pulse == &cfg.pulse_a ? "[pulse_a] " : "[pulse_b] ") + v);
  for (double z : cfg.station_positions)
    if (z < g.z_min || z > g.z_max)
      errors.push_back("[run] station_positions entries must lie in [z_min, z_max]");
  if (cfg.solver == Solver::adiabatic) {
    if (!prep.sharp_line()) errors.push_back("[medium] the adiabatic solver requires t2_star = sharp");
    if (prep.delta_bar == 0.0) errors.push_back("[medium] the adiabatic solver requires delta_bar != 0");
  }
  if (!errors.empty()) return outcome;

  const auto nodes =
      make_doppler_quadrature(prep.delta_bar, prep.t2_star, prep.sharp_line() ? 1 : g.doppler_nodes);
  MediumPrep unit = prep;
  unit.mu = 1.0;
  const double kappa_unit = compute_kappa_delta(unit, cfg.tau, nodes).kappa;
  cfg.mu_given = mu.has_value();
  prep.mu = mu ? *mu : 1.0 / kappa_unit;
  const auto coeffs = compute_kappa_delta(prep, cfg.tau, nodes);
  cfg.kappa = coeffs.kappa;
  cfg.delta = coeffs.delta;
  prep.mask = MediumMask{entry ? *entry / cfg.kappa : -kInf, exit ? *exit / cfg.kappa : kInf};

  outcome.config = std::move(cfg);
  return outcome;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({"cannot read config file " + path.string()});
  std::ostringstream text;
  text << in.rdbuf();
  auto outcome = parse_config(text.str());
  if (!outcome.config) throw ConfigError(std::move(outcome.violations));
  return std::move(*outcome.config);
}

SimulationGrid build_grid(const ExperimentConfig& config) {
  const GridConfig& g = config.grid;
  SimulationGrid grid;
  grid.t = TimeAxis{g.t_min, g.t_max, g.n_t};
  grid.z_min = g.z_min / config.kappa;
  grid.z_max = g.z_max / config.kappa;
  grid.n_z = g.n_z;
  grid.doppler = make_doppler_quadrature(config.prep.delta_bar, config.prep.t2_star,
                                         config.prep.sharp_line() ? 1 : g.doppler_nodes);
  return grid;
}

PropagationSettings build_settings(const ExperimentConfig& config) {
  PropagationSettings s;
  s.scheme = config.grid.scheme;
  s.substeps = config.grid.substeps;
  s.stiff_phase_limit = config.grid.stiff_phase_limit;
  s.tau = config.tau;
  const GridConfig& g = config.grid;
  const std::vector<double> kz = config.station_positions.empty()
                                     ? even_stations(g.z_min, g.z_max, config.stations)
                                     : config.station_positions;
  for (double z : kz) s.stations.push_back(z / config.kappa);
  return s;
}

}  // namespace twopulse
