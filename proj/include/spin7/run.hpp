#pragma once

// A complete flow experiment: generate initial data, integrate, monitor,
// summarize. File output stays with the caller through hooks.

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "spin7/config.hpp"
#include "spin7/fiber.hpp"
#include "spin7/flow.hpp"
#include "spin7/io.hpp"
#include "spin7/monitors.hpp"

namespace spin7 {

struct SeriesRow {
  long step = 0;
  double t = 0.0;
  double energy = 0.0;
  double sup_torsion = 0.0;
  double dt_used = 0.0;  // step taken from this row to the next, 0 on the last row
  double z = 0.0;
  std::vector<double> theta;
  double bochner = std::numeric_limits<double>::quiet_NaN();  // needs both neighbours
};

struct RunSummary {
  long steps_done = 0;
  double dt = 0.0;
  double t_end = 0.0;
  std::string stop_reason = "completed";
  double energy_initial = 0.0;
  double energy_final = 0.0;
  double worst_energy_increase = 0.0;  // max E_{n+1} - E_n over the run
  double sup_initial = 0.0;
  double sup_max = 0.0;
  double sup_final = 0.0;
  long dte_window_steps = 0;  // steps n with sup|T|(t_n) <= 2 sup|T|(0)
  double dte_delta = 0.0;
  ExponentialFit div_decay;   // ||Div T||^2 over the final half
  double reaction_rate = 0.0; // C in Z(t) <= Z(0) e^{Ct}
  double z_ratio = 0.0;       // worst Z / (Z(0) e^{Ct}) on the doubling window
  double theta_t0 = 0.0;
  std::vector<double> theta_ratio;  // per center, worst Theta(t2) / Theta(t1)
  EntropyResult entropy;
  std::size_t singular_sites = 0;
  double bochner_max = 0.0;
  AdmissibilityReport admissibility;
};

struct RunResult {
  std::vector<SeriesRow> rows;
  // per step, including step 0
  std::vector<double> times, energies, sups, div_l2;
  std::vector<DensitySnapshot> history;  // |T|^2 at monitored steps
  std::vector<bool> singular_mask;
  RunSummary summary;
  FlowState final_state;
};

struct RunHooks {
  std::function<void(const FlowState&)> on_checkpoint;
  std::function<void(const SeriesRow&)> on_row;
  std::function<void(const FlowState&, const FlowBlowup&)> on_blowup;  // called before the rethrow
};

inline RunResult run_flow(const StructureField& initial, const ExperimentConfig& config, const RunHooks& hooks = {}) {
  const LatticeGrid& grid = initial.grid;
  const FlowConfig cfg = config.flow_config();
  cfg.validate(grid);
  const Stencil stencil = Stencil::of_order(cfg.stencil);
  const double dt = cfg.resolved_dt(grid);
  const double h = grid.min_spacing();
  const double t_max = cfg.steps * dt;
  const MonitorSpec& mon = config.monitor;
  const double theta_t0 = mon.theta_t0 > 0.0 ? mon.theta_t0 : t_max + 4.0 * h * h;

  std::vector<HeatKernelSpec> centers;
  for (const auto& c : mon.theta_centers) {
    HeatKernelSpec k;
    for (int d = 0; d < grid.dims(); ++d) k.center[d] = c[d];
    k.t0 = theta_t0;
    centers.push_back(k);
  }

  RunResult r;
  r.final_state.field = initial;
  FlowState& state = r.final_state;
  FieldEvaluation eval = evaluate(state.field, stencil);
  const double sup0 = eval.sup_torsion;
  bool in_window = true;
  double rate = 0.0;
  std::vector<double> previous_density;
  bool stop_next = false;

  try {
    detail::check_blowup(eval, cfg, 0, 0.0);
    for (long n = 0;; ++n) {
      r.times.push_back(state.t);
      r.energies.push_back(eval.energy);
      r.sups.push_back(eval.sup_torsion);
      r.div_l2.push_back(eval.div_l2_squared);
      in_window = in_window && eval.sup_torsion <= 2.0 * sup0;
      const bool last = n >= cfg.steps || stop_next;
      const bool monitored = n % cfg.monitor_every == 0 || last;

      SeriesRow row;
      if (monitored) {
        row.step = n;
        row.t = state.t;
        row.energy = eval.energy;
        row.sup_torsion = eval.sup_torsion;
        row.dt_used = last ? 0.0 : dt;
        row.z = (t_max - state.t) * 2.0 * eval.energy;
        for (const auto& k : centers) row.theta.push_back(theta(grid, eval.density, k, state.t));
        r.history.push_back({state.t, eval.density});
        if (in_window) rate = std::max(rate, reaction_rate(eval.torsion));
      }
      if (cfg.checkpoint_every > 0 && (n % cfg.checkpoint_every == 0 || last) && hooks.on_checkpoint)
        hooks.on_checkpoint(state);
      if (last) {
        if (monitored) r.rows.push_back(row);
        if (monitored && hooks.on_row) hooks.on_row(row);
        if (stop_next) r.summary.stop_reason = "energy plateau";
        break;
      }

      const bool want_bochner = monitored && mon.bochner && !previous_density.empty();
      StructureField middle;
      if (want_bochner) middle = state.field;
      std::vector<double> density = std::move(eval.density);
      const double energy_before = eval.energy;

      advance(state, cfg, eval);
      eval = evaluate(state.field, stencil);
      detail::check_blowup(eval, cfg, state.step, state.t);

      if (want_bochner) row.bochner = bochner_residual(previous_density, middle, eval.density, dt, stencil).max_abs;
      if (monitored) {
        r.rows.push_back(row);
        if (hooks.on_row) hooks.on_row(row);
      }
      previous_density = std::move(density);
      if (cfg.energy_plateau > 0.0 &&
          std::abs(eval.energy - energy_before) <= cfg.energy_plateau * r.energies.front())
        stop_next = true;
    }
  } catch (const FlowBlowup& e) {
    if (hooks.on_blowup) hooks.on_blowup(state, e);
    throw;
  }

  RunSummary& s = r.summary;
  s.steps_done = state.step;
  s.dt = dt;
  s.t_end = state.t;
  s.energy_initial = r.energies.front();
  s.energy_final = r.energies.back();
  s.worst_energy_increase = worst_energy_increase(r.energies);
  s.sup_initial = sup0;
  s.sup_final = r.sups.back();
  for (double v : r.sups) s.sup_max = std::max(s.sup_max, v);
  const std::size_t window = doubling_window(r.sups);
  s.dte_window_steps = static_cast<long>(window) - 1;
  s.dte_delta = window > 0 ? r.times[window - 1] : 0.0;
  const std::size_t half = r.times.size() / 2;
  s.div_decay = fit_exponential(std::span(r.times).subspan(half), std::span(r.div_l2).subspan(half));
  s.reaction_rate = rate;
  const auto z = z_series(r.times, r.energies, t_max);
  s.z_ratio = z_bound_ratio(r.times, z, rate, window);
  s.theta_t0 = theta_t0;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    std::vector<double> th;
    for (const auto& row : r.rows) th.push_back(row.theta[c]);
    s.theta_ratio.push_back(worst_theta_ratio(th));
  }
  const double sigma = mon.lambda_sigma > 0.0 ? mon.lambda_sigma : (s.t_end > 0.0 ? s.t_end : h * h);
  s.entropy = entropy_lambda(grid, r.history.front().density, sigma);
  const double rho = mon.singular_rho > 0.0 ? mon.singular_rho : std::sqrt(std::max(s.t_end, h * h)) / 2.0;
  r.singular_mask = singular_detector(grid, r.history, s.t_end, mon.singular_epsilon, rho, mon.singular_levels);
  for (bool b : r.singular_mask) s.singular_sites += b ? 1 : 0;
  for (const auto& row : r.rows)
    if (std::isfinite(row.bochner)) s.bochner_max = std::max(s.bochner_max, row.bochner);
  s.admissibility = admissibility(state.field);
  return r;
}

// ---------------------------------------------------------------- output

inline std::string series_header(std::size_t theta_columns) {
  std::string h = "t,E,supT,dtUsed,Z";
  for (std::size_t c = 0; c < theta_columns; ++c) h += ",theta_" + std::to_string(c);
  return h + ",bochnerResidual";
}

inline std::string series_line(const SeriesRow& row) {
  std::string line = format_double(row.t) + ',' + format_double(row.energy) + ',' + format_double(row.sup_torsion) +
                     ',' + format_double(row.dt_used) + ',' + format_double(row.z);
  for (double th : row.theta) line += ',' + format_double(th);
  return line + ',' + format_double(row.bochner);
}

inline nlohmann::json to_json(const RunSummary& s) {
  using nlohmann::json;
  auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  return json{{"steps_done", s.steps_done},
              {"dt", num(s.dt)},
              {"t_end", num(s.t_end)},
              {"stop_reason", s.stop_reason},
              {"energy_initial", num(s.energy_initial)},
              {"energy_final", num(s.energy_final)},
              {"worst_energy_increase", num(s.worst_energy_increase)},
              {"sup_torsion_initial", num(s.sup_initial)},
              {"sup_torsion_max", num(s.sup_max)},
              {"sup_torsion_final", num(s.sup_final)},
              {"doubling_window_steps", s.dte_window_steps},
              {"doubling_window_time", num(s.dte_delta)},
              {"div_decay_rate", num(s.div_decay.rate)},
              {"div_decay_r_squared", num(s.div_decay.r_squared)},
              {"reaction_rate", num(s.reaction_rate)},
              {"z_bound_ratio", num(s.z_ratio)},
              {"theta_t0", num(s.theta_t0)},
              {"theta_worst_ratio", s.theta_ratio},
              {"entropy", {{"value", num(s.entropy.value)}, {"time", num(s.entropy.time)},
                           {"site", s.entropy.site}, {"holder_bound", num(s.entropy.holder_bound)}}},
              {"singular_sites", s.singular_sites},
              {"bochner_max", num(s.bochner_max)},
              {"admissibility", {{"identity", num(s.admissibility.identity)},
                                 {"orthogonality", num(s.admissibility.orthogonality)},
                                 {"consistency", num(s.admissibility.consistency)}}}};
}

inline StructureField initial_field(const ExperimentConfig& config) {
  const LatticeGrid grid = config.validate();
  return StructureField::from_fiber(seeded_field_generator(grid, config.generator));
}

inline RunResult run_flow(const ExperimentConfig& config, const RunHooks& hooks = {}) {
  return run_flow(initial_field(config), config, hooks);
}

}  // namespace spin7
