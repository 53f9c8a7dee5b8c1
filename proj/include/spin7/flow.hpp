#pragma once

// The harmonic flow dPhi/dt = Div T <> Phi, integrated by exponential updates
// of the per-site rotation so that every step is an exact SO(8) pullback.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spin7/field.hpp"

namespace spin7 {

enum class Integrator { lie_euler, heun };

inline const char* to_string(Integrator i) { return i == Integrator::heun ? "heun" : "lie_euler"; }

inline Integrator integrator_from_string(const std::string& s) {
  if (s == "lie_euler") return Integrator::lie_euler;
  if (s == "heun") return Integrator::heun;
  throw std::invalid_argument("unknown integrator '" + s + "' (expected lie_euler or heun)");
}

struct FlowConfig {
  double dt = 0.0;  // 0 selects dt_safety * h_min^2
  int steps = 100;
  int stencil = 2;
  int monitor_every = 1;
  int checkpoint_every = 0;  // 0 disables checkpoints
  double dt_safety = 0.1;
  double blowup_threshold = 1e6;  // abort when sup |T| exceeds this
  double energy_plateau = 0.0;    // stop once |E_n - E_{n+1}| <= plateau * E(0); 0 disables
  Integrator integrator = Integrator::lie_euler;

  /// Largest dt_safety for which explicit stepping of the linearized flow is
  /// stable: 2 / (spectral radius of the composed stencil * active dims).
  static double stability_limit(const LatticeGrid& grid, int stencil_order) {
    return 2.0 / (Stencil::of_order(stencil_order).composite_spectral_radius() * grid.dims());
  }

  double resolved_dt(const LatticeGrid& grid) const {
    const double h = grid.min_spacing();
    return dt > 0.0 ? dt : dt_safety * h * h;
  }

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate(const LatticeGrid& grid) const {
    if (stencil != 2 && stencil != 4) throw std::invalid_argument("flow: stencil must be 2 or 4");
    Stencil::of_order(stencil).check(grid);
    if (!(dt >= 0.0) || !std::isfinite(dt)) throw std::invalid_argument("flow: dt must be positive");
    if (!(dt_safety > 0.0) || !std::isfinite(dt_safety)) throw std::invalid_argument("flow: dt_safety must be positive");
    const double cap = stability_limit(grid, stencil);
    if (dt_safety > cap) {
      std::ostringstream msg;
      msg << "flow: dt_safety " << dt_safety << " exceeds the explicit stability limit " << cap;
      throw std::invalid_argument(msg.str());
    }
    const double h = grid.min_spacing();
    if (dt > dt_safety * h * h * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "flow: dt " << dt << " above the parabolic bound dt_safety*h^2 = " << dt_safety * h * h;
      throw std::invalid_argument(msg.str());
    }
    if (steps < 0) throw std::invalid_argument("flow: steps must be >= 0");
    if (monitor_every < 1) throw std::invalid_argument("flow: monitor_every must be >= 1");
    if (checkpoint_every < 0) throw std::invalid_argument("flow: checkpoint_every must be >= 0");
    if (!(blowup_threshold > 0.0)) throw std::invalid_argument("flow: blowup_threshold must be positive");
    if (!(energy_plateau >= 0.0)) throw std::invalid_argument("flow: energy_plateau must be >= 0");
  }
};

struct FlowState {
  double t = 0.0;
  long step = 0;
  StructureField field;
};

class FlowBlowup : public std::runtime_error {
 public:
  FlowBlowup(long step, double t, double sup, std::size_t site)
      : std::runtime_error(describe(step, t, sup, site)), step(step), t(t), sup_torsion(sup), site(site) {}

  long step;
  double t;
  double sup_torsion;
  std::size_t site;

 private:
  static std::string describe(long step, double t, double sup, std::size_t site) {
    std::ostringstream msg;
    msg << "blowup at step " << step << " (t = " << t << "): sup|T| = " << sup << " at site " << site;
    return msg.str();
  }
};

/// Everything derived from one snapshot that the stepper and monitors need.
struct FieldEvaluation {
  TorsionField torsion;
  DivergenceField div;
  std::vector<double> density;  // |T(x)|^2
  double energy = 0.0;          // 1/2 sum |T|^2 * cell volume
  double sup_torsion = 0.0;
  std::size_t sup_site = 0;
  double div_l2_squared = 0.0;  // sum |Div T|^2 * cell volume
};

inline FieldEvaluation evaluate(const StructureField& f, const Stencil& stencil) {
  FieldEvaluation e;
  e.torsion = torsion_field(f, stencil);
  e.div = div_torsion_field(f, e.torsion, stencil);
  e.density = e.torsion.density();
  const double cell = f.grid.cell_volume();
  double sum = 0.0, div_sum = 0.0, sup2 = 0.0;
  for (std::size_t s = 0; s < f.size(); ++s) {
    sum += e.density[s];
    div_sum += norm_squared(e.div.value[s]);
    if (!(e.density[s] <= sup2)) {  // also catches NaN
      sup2 = e.density[s];
      e.sup_site = s;
    }
  }
  e.energy = 0.5 * sum * cell;
  e.div_l2_squared = div_sum * cell;
  e.sup_torsion = std::sqrt(sup2);
  return e;
}

inline double energy(const StructureField& f, const Stencil& stencil = Stencil::of_order(2)) {
  return evaluate(f, stencil).energy;
}

inline double sup_torsion(const StructureField& f, const Stencil& stencil = Stencil::of_order(2)) {
  return evaluate(f, stencil).sup_torsion;
}

namespace detail {

inline void check_blowup(const FieldEvaluation& e, const FlowConfig& cfg, long step, double t) {
  if (!std::isfinite(e.sup_torsion) || e.sup_torsion > cfg.blowup_threshold)
    throw FlowBlowup(step, t, e.sup_torsion, e.sup_site);
}

/// Q <- exp(scale * V) Q at every site, then refresh Phi. One Newton-Schulz
/// step Q <- Q (3 - Q^T Q) / 2 removes the roundoff drift of Q^T Q that
/// repeated products would otherwise accumulate. Sites with V = 0 are left
/// untouched, so stationary data stays bit-identical.
inline void rotate(StructureField& f, const std::vector<PackedTwoForm>& v, double scale) {
  for (std::size_t s = 0; s < f.size(); ++s) {
    if (std::all_of(v[s].begin(), v[s].end(), [](double c) { return c == 0.0; })) continue;
    const Matrix8 x = scale * to_matrix(v[s]);
    const Matrix8 q = small_exponential(x).lazyProduct(f.rotation[s]);
    const Matrix8 gram = q.transpose().lazyProduct(q);
    f.rotation[s] = 0.5 * q.lazyProduct(3.0 * Matrix8::Identity() - gram);
    f.phi[s] = act_on_standard(f.rotation[s]);
  }
}

}  // namespace detail

/// Advances `state` by one step given its evaluation. Lie-Euler:
/// Q <- exp(dt V) Q. Heun: V* from the Lie-Euler predictor, then
/// Q <- exp(dt (V + V*) / 2) Q.
inline void advance(FlowState& state, const FlowConfig& cfg, const FieldEvaluation& current) {
  const double dt = cfg.resolved_dt(state.field.grid);
  const Stencil stencil = Stencil::of_order(cfg.stencil);
  if (cfg.integrator == Integrator::lie_euler) {
    detail::rotate(state.field, current.div.value, dt);
  } else {
    StructureField predicted = state.field;
    detail::rotate(predicted, current.div.value, dt);
    const FieldEvaluation next = evaluate(predicted, stencil);
    detail::check_blowup(next, cfg, state.step + 1, state.t + dt);
    std::vector<PackedTwoForm> mean(state.field.size());
    for (std::size_t s = 0; s < mean.size(); ++s)
      for (int c = 0; c < kPairCount; ++c) mean[s][c] = 0.5 * (current.div.value[s][c] + next.div.value[s][c]);
    detail::rotate(state.field, mean, dt);
  }
  state.t += dt;
  ++state.step;
}

inline FlowState flow_step(const FlowState& state, const FlowConfig& cfg) {
  cfg.validate(state.field.grid);
  const FieldEvaluation e = evaluate(state.field, Stencil::of_order(cfg.stencil));
  detail::check_blowup(e, cfg, state.step, state.t);
  FlowState next = state;
  advance(next, cfg, e);
  return next;
}

}  // namespace spin7
