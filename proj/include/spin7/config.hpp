#pragma once

// Experiment configuration and its JSON form. Every field is optional in the
// file; missing fields take the defaults below. Unknown keys are rejected so
// that typos surface as config errors instead of silently using defaults.
//
// {
//   "grid":      {"active_dims": [0, 1], "sizes": [64, 64], "lengths": [1.0, 1.0]},
//   "generator": {"modes": 3, "amplitude": 0.05, "seed": 1, "max_wavenumber": 2},
//   "flow":      {"dt": 0, "steps": 100, "stencil": 2, "dt_safety": 0.1,
//                 "integrator": "lie_euler", "blowup_threshold": 1e6, "energy_plateau": 0},
//   "monitor":   {"every": 1, "checkpoint_every": 0, "theta_centers": [[0, 0]],
//                 "theta_t0": 0, "lambda_sigma": 0, "singular_epsilon": 0.01,
//                 "singular_rho": 0, "singular_levels": 8, "bochner": true},
//   "output":    {"dir": "out"}
// }
//
// dt = 0 means dt_safety * h^2; theta_t0 = 0 means t_end + 4 h^2;
// lambda_sigma = 0 means t_end; singular_rho = 0 means sqrt(t_end) / 2.

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spin7/fiber.hpp"
#include "spin7/flow.hpp"
#include "spin7/lattice.hpp"

namespace spin7 {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridSpec {
  std::vector<int> active_dims{0, 1};
  std::vector<int> sizes{64, 64};
  std::vector<double> lengths{1.0, 1.0};

  LatticeGrid build() const { return LatticeGrid(active_dims, sizes, lengths); }
  bool operator==(const GridSpec&) const = default;
};

struct MonitorSpec {
  int every = 1;
  int checkpoint_every = 0;
  std::vector<std::vector<int>> theta_centers{{0, 0}};
  double theta_t0 = 0.0;
  double lambda_sigma = 0.0;
  double singular_epsilon = 0.01;
  double singular_rho = 0.0;
  int singular_levels = 8;
  bool bochner = true;

  bool operator==(const MonitorSpec&) const = default;
};

struct ExperimentConfig {
  GridSpec grid;
  GeneratorSpec generator;
  FlowConfig flow;  // monitor_every and checkpoint_every mirror `monitor`
  MonitorSpec monitor;
  std::string output_dir = "out";

  /// Builds the grid and checks every constraint without touching field
  /// storage. Throws ConfigError.
  LatticeGrid validate() const {
    LatticeGrid g;
    try {
      g = grid.build();
      random_fourier_fiber(g, generator);
      FlowConfig f = flow_config();
      f.validate(g);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    if (monitor.singular_levels < 1) throw ConfigError("monitor: singular_levels must be >= 1");
    if (!(monitor.singular_epsilon >= 0.0)) throw ConfigError("monitor: singular_epsilon must be >= 0");
    if (!(monitor.lambda_sigma >= 0.0) || !(monitor.singular_rho >= 0.0) || !(monitor.theta_t0 >= 0.0))
      throw ConfigError("monitor: times and scales must be >= 0");
    for (const auto& c : monitor.theta_centers) {
      if (static_cast<int>(c.size()) != g.dims())
        throw ConfigError("monitor: each theta center needs one coordinate per active dimension");
      for (int d = 0; d < g.dims(); ++d)
        if (c[d] < 0 || c[d] >= g.sizes()[d]) throw ConfigError("monitor: theta center outside the grid");
    }
    return g;
  }

  FlowConfig flow_config() const {
    FlowConfig f = flow;
    f.monitor_every = monitor.every;
    f.checkpoint_every = monitor.checkpoint_every;
    return f;
  }

  bool operator==(const ExperimentConfig& o) const {
    const auto& a = flow;
    const auto& b = o.flow;
    return grid == o.grid && generator.modes == o.generator.modes && generator.amplitude == o.generator.amplitude &&
           generator.seed == o.generator.seed && generator.max_wavenumber == o.generator.max_wavenumber &&
           a.dt == b.dt && a.steps == b.steps && a.stencil == b.stencil && a.dt_safety == b.dt_safety &&
           a.blowup_threshold == b.blowup_threshold && a.energy_plateau == b.energy_plateau &&
           a.integrator == b.integrator && monitor == o.monitor && output_dir == o.output_dir;
  }
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& j, const char* section, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(std::string(section) + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw ConfigError(std::string(section) + ": unknown key '" + it.key() + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace detail

inline nlohmann::json to_json(const ExperimentConfig& c) {
  using nlohmann::json;
  json j;
  j["grid"] = {{"active_dims", c.grid.active_dims}, {"sizes", c.grid.sizes}, {"lengths", c.grid.lengths}};
  j["generator"] = {{"modes", c.generator.modes},
                    {"amplitude", c.generator.amplitude},
                    {"seed", c.generator.seed},
                    {"max_wavenumber", c.generator.max_wavenumber}};
  j["flow"] = {{"dt", c.flow.dt},
               {"steps", c.flow.steps},
               {"stencil", c.flow.stencil},
               {"dt_safety", c.flow.dt_safety},
               {"integrator", to_string(c.flow.integrator)},
               {"blowup_threshold", c.flow.blowup_threshold},
               {"energy_plateau", c.flow.energy_plateau}};
  j["monitor"] = {{"every", c.monitor.every},
                  {"checkpoint_every", c.monitor.checkpoint_every},
                  {"theta_centers", c.monitor.theta_centers},
                  {"theta_t0", c.monitor.theta_t0},
                  {"lambda_sigma", c.monitor.lambda_sigma},
                  {"singular_epsilon", c.monitor.singular_epsilon},
                  {"singular_rho", c.monitor.singular_rho},
                  {"singular_levels", c.monitor.singular_levels},
                  {"bochner", c.monitor.bochner}};
  j["output"] = {{"dir", c.output_dir}};
  return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  using detail::read;
  ExperimentConfig c;
  try {
    detail::reject_unknown(j, "config", {"grid", "generator", "flow", "monitor", "output"});
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      detail::reject_unknown(g, "grid", {"active_dims", "sizes", "lengths"});
      read(g, "active_dims", c.grid.active_dims);
      read(g, "sizes", c.grid.sizes);
      read(g, "lengths", c.grid.lengths);
      // a single size/length applies to every active axis
      if (c.grid.sizes.size() == 1 && c.grid.active_dims.size() > 1)
        c.grid.sizes.assign(c.grid.active_dims.size(), c.grid.sizes[0]);
      if (!g.contains("lengths") || (c.grid.lengths.size() == 1 && c.grid.active_dims.size() > 1))
        c.grid.lengths.assign(c.grid.active_dims.size(), c.grid.lengths.empty() ? 1.0 : c.grid.lengths[0]);
    }
    if (j.contains("generator")) {
      const auto& g = j.at("generator");
      detail::reject_unknown(g, "generator", {"modes", "amplitude", "seed", "max_wavenumber"});
      read(g, "modes", c.generator.modes);
      read(g, "amplitude", c.generator.amplitude);
      read(g, "seed", c.generator.seed);
      read(g, "max_wavenumber", c.generator.max_wavenumber);
    }
    if (j.contains("flow")) {
      const auto& f = j.at("flow");
      detail::reject_unknown(
          f, "flow", {"dt", "steps", "stencil", "dt_safety", "integrator", "blowup_threshold", "energy_plateau"});
      read(f, "dt", c.flow.dt);
      read(f, "steps", c.flow.steps);
      read(f, "stencil", c.flow.stencil);
      read(f, "dt_safety", c.flow.dt_safety);
      read(f, "blowup_threshold", c.flow.blowup_threshold);
      read(f, "energy_plateau", c.flow.energy_plateau);
      if (f.contains("integrator")) c.flow.integrator = integrator_from_string(f.at("integrator").get<std::string>());
    }
    if (j.contains("monitor")) {
      const auto& m = j.at("monitor");
      detail::reject_unknown(m, "monitor",
                             {"every", "checkpoint_every", "theta_centers", "theta_t0", "lambda_sigma",
                              "singular_epsilon", "singular_rho", "singular_levels", "bochner"});
      if (!m.contains("theta_centers"))
        c.monitor.theta_centers.assign(1, std::vector<int>(c.grid.active_dims.size(), 0));
      read(m, "every", c.monitor.every);
      read(m, "checkpoint_every", c.monitor.checkpoint_every);
      read(m, "theta_centers", c.monitor.theta_centers);
      read(m, "theta_t0", c.monitor.theta_t0);
      read(m, "lambda_sigma", c.monitor.lambda_sigma);
      read(m, "singular_epsilon", c.monitor.singular_epsilon);
      read(m, "singular_rho", c.monitor.singular_rho);
      read(m, "singular_levels", c.monitor.singular_levels);
      read(m, "bochner", c.monitor.bochner);
    } else {
      c.monitor.theta_centers.assign(1, std::vector<int>(c.grid.active_dims.size(), 0));
    }
    if (j.contains("output")) {
      const auto& o = j.at("output");
      detail::reject_unknown(o, "output", {"dir"});
      read(o, "dir", c.output_dir);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  c.flow.monitor_every = c.monitor.every;
  c.flow.checkpoint_every = c.monitor.checkpoint_every;
  return c;
}

inline ExperimentConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return config_from_json(j);
}

inline std::string serialize_config(const ExperimentConfig& c) { return to_json(c).dump(2); }

}  // namespace spin7
