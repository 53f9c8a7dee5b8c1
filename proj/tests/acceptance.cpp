// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "spin7/run.hpp"
#include "spin7/torsion.hpp"
#include "spin7/verify.hpp"

using namespace spin7;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int number, const char* title, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("[%s] %d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", number, title, o.detail.c_str(), secs);
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Matrix8 random_rotation(std::mt19937_64& rng) { return detail::random_rotation(rng); }

TorsionTensor random_torsion(std::mt19937_64& rng, const FourForm& phi) {
  TorsionTensor t;
  for (int m = 0; m < kDim; ++m) t.slice[m] = project_two_form(detail::random_two_form(rng), TwoFormPart::seven, phi);
  return t;
}

ExperimentConfig reference_config() {
  ExperimentConfig c;
  c.grid.sizes = {64, 64};
  c.generator.amplitude = 0.05;
  c.generator.seed = 1;
  c.flow.steps = 2000;
  c.flow.dt_safety = 0.6;
  c.monitor.every = 10;
  c.monitor.theta_centers = {{0, 0}, {32, 32}, {16, 40}};
  return c;
}

ExperimentConfig config_with_size(int n) {
  ExperimentConfig c = reference_config();
  c.grid.sizes = {n, n};
  c.monitor.theta_centers = {{0, 0}};
  return c;
}

// ---------------------------------------------------------------- 1

Outcome identity_suite() {
  const FourForm phi = standard_phi();
  const IdentityResiduals id = contraction_identity_residuals(phi);
  std::mt19937_64 rng(101);
  const TorsionTensor t0 = random_torsion(rng, phi);
  const NablaResiduals nr0 = nabla_contraction_residuals(gradient_from_torsion(t0, phi), phi);
  const double standard = std::max({id.max(), nr0.max(), max_abs_difference(hodge_star(phi), phi)});

  double pulled = 0.0;
  for (int k = 0; k < 100; ++k) {
    const FourForm p = act(random_rotation(rng), phi);
    const TorsionTensor t = random_torsion(rng, p);
    pulled = std::max({pulled, contraction_identity_residuals(p).max(),
                       nabla_contraction_residuals(gradient_from_torsion(t, p), p).max(),
                       max_abs_difference(hodge_star(p), p)});
  }
  return {standard <= 1e-12 && pulled <= 1e-11,
          fmt("standard form %.2e (<= 1e-12), 100 pullbacks %.2e (<= 1e-11)", standard, pulled)};
}

// ---------------------------------------------------------------- 2

Outcome representation_theory() {
  const VerifyReport r = verify_identities(standard_phi_packed(), 1e-11);
  auto residual = [&](const std::string& name) {
    for (const auto& c : r.checks)
      if (c.name == name) return c.residual;
    throw std::runtime_error("missing check " + name);
  };
  const double spectrum = residual("lambda.spectrum");
  const double rank = residual("diamond.rank");
  const double kernel = residual("diamond.kernel");
  const double triple = residual("diamond.triple_96");
  const double pi = std::max({residual("two_form.idempotent"), residual("two_form.orthogonal"),
                              residual("two_form.complementary")});
  const double split = residual("three_form.split");
  const bool mult = r.lambda_spectrum.size() == 4 && r.lambda_spectrum[0].second == 1 &&
                    r.lambda_spectrum[1].second == 7 && r.lambda_spectrum[2].second == 35 &&
                    r.lambda_spectrum[3].second == 27;
  const bool pass = mult && spectrum <= 1e-10 && rank == 0.0 && kernel <= 1e-11 && triple <= 1e-11 && pi <= 1e-13 &&
                    split <= 1e-12;
  return {pass, fmt("spectrum %.1e, rank 43/kernel 21 %s (kernel residual %.1e), 96-identity %.1e, "
                    "pi algebra %.1e, 3-form split %.1e",
                    spectrum, rank == 0.0 ? "ok" : "WRONG", kernel, triple, pi, split)};
}

// ---------------------------------------------------------------- 3

Outcome torsion_roundtrip() {
  std::mt19937_64 rng(303);
  double roundtrip = 0.0, defect = 0.0;
  FourForm phi = standard_phi();
  for (int k = 0; k < 1000; ++k) {
    if (k % 10 == 0) phi = act(random_rotation(rng), standard_phi());
    const TorsionTensor t = random_torsion(rng, phi);
    const TorsionTensor back = torsion_from_gradient(gradient_from_torsion(t, phi), phi);
    for (int m = 0; m < kDim; ++m) roundtrip = std::max(roundtrip, max_abs_difference(back.slice[m], t.slice[m]));
    defect = std::max(defect, omega27_defect(back, phi));
  }
  // torsion computed on a lattice field
  const StructureField f = initial_field(config_with_size(32));
  const TorsionField tf = torsion_field(f, Stencil::of_order(2));
  double lattice_defect = 0.0;
  for (std::size_t s = 0; s < f.size(); ++s)
    lattice_defect = std::max(lattice_defect, omega27_defect(tf.at(s), unpack(f.phi[s])));
  return {roundtrip <= 1e-11 && defect <= 1e-11 && lattice_defect <= 1e-11,
          fmt("roundtrip %.2e, 7-part defect %.2e (random), %.2e (lattice torsion)", roundtrip, defect, lattice_defect)};
}

// ---------------------------------------------------------------- 4

struct FlatResiduals {
  double bianchi = 0.0, ricci = 0.0, scalar = 0.0;
};

FlatResiduals flat_residuals(int n) {
  const StructureField f = initial_field(config_with_size(n));
  const Stencil st = Stencil::of_order(2);
  const TorsionField t = torsion_field(f, st);
  const TorsionFieldGradient g = torsion_gradient(t, st);
  FlatResiduals r;
  for (std::size_t s = 0; s < f.size(); ++s) {
    const TorsionTensor ts = t.at(s);
    const TorsionGradient gs = g.at(s);
    r.bianchi = std::max(r.bianchi, bianchi_residual(ts, gs).max_abs);
    r.ricci = std::max(r.ricci, ricci_residual(ts, gs).cwiseAbs().maxCoeff());
    r.scalar = std::max(r.scalar, std::abs(scalar_residual(ts, gs)));
  }
  return r;
}

Outcome flat_constraints() {
  const FlatResiduals a = flat_residuals(64), b = flat_residuals(128);
  const double rb = a.bianchi / b.bianchi, rr = a.ricci / b.ricci, rs = a.scalar / b.scalar;
  auto ok = [](double ratio) { return std::abs(ratio - 4.0) <= 0.6; };
  return {ok(rb) && ok(rr) && ok(rs),
          fmt("64^2 -> 128^2 ratios: bianchi %.3f (%.2e), ricci %.3f (%.2e), scalar %.3f (%.2e); need 4 +- 15%%", rb,
              b.bianchi, rr, b.ricci, rs, b.scalar)};
}

// ---------------------------------------------------------------- 5, 6

struct Reference {
  RunResult result;
  LatticeGrid grid;
  double seconds = 0.0;
};

const Reference& reference_run() {
  static const Reference ref = [] {
    Reference r;
    const ExperimentConfig c = reference_config();
    r.grid = c.validate();
    const auto start = std::chrono::steady_clock::now();
    r.result = run_flow(c);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  }();
  return ref;
}

Outcome flow_behavior() {
  const Reference& ref = reference_run();
  const RunSummary& s = ref.result.summary;
  const double e0 = s.energy_initial;
  const double increase = s.worst_energy_increase / e0;
  const double sup_ratio = s.sup_final / s.sup_initial;
  const bool pass = s.steps_done == 2000 && increase <= 1e-12 && s.dte_window_steps >= 50 &&
                    s.div_decay.r_squared >= 0.99 && sup_ratio <= 1e-4 && ref.seconds < 300.0;
  return {pass, fmt("64^2, 2000 steps in %.0f s: worst dE/E(0) %.1e, doubling window %ld steps, "
                    "|Div T|^2 decay rate %.2f R^2 %.6f, final sup|T|/sup|T|(0) %.2e",
                    ref.seconds, increase, s.dte_window_steps, s.div_decay.rate, s.div_decay.r_squared, sup_ratio)};
}

Outcome monotone_quantities() {
  const Reference& ref = reference_run();
  const RunResult& r = ref.result;
  const RunSummary& s = r.summary;
  const double t_max = s.t_end;
  const std::vector<double> one(ref.grid.site_count(), 1.0);
  double z_identity = 0.0;
  for (std::size_t k = 0; k < r.history.size(); ++k) {
    const double t = r.history[k].t;
    const std::size_t step = static_cast<std::size_t>(std::llround(t / s.dt));
    const double z = z_value(ref.grid, r.history[k].density, one, t, t_max);
    const double expected = (t_max - t) * 2.0 * r.energies[step];
    z_identity = std::max(z_identity, std::abs(z - expected) / std::max(1e-300, (t_max) * 2.0 * s.energy_initial));
  }
  double theta = 0.0;
  for (double x : s.theta_ratio) theta = std::max(theta, x);
  const bool pass = z_identity <= 1e-13 && s.z_ratio <= 1.0 && theta <= 1.0 + 1e-3;
  return {pass, fmt("Z identity %.1e, Z/(Z(0)e^{Ct}) max %.6f (C = %.3f), Theta worst ratio %.6f over %zu centers",
                    z_identity, s.z_ratio, s.reaction_rate, theta, s.theta_ratio.size())};
}

// ---------------------------------------------------------------- 7

std::vector<double> bochner_field(int n, double dt) {
  ExperimentConfig c = config_with_size(n);
  c.flow.dt = dt;
  c.validate();
  FlowState state;
  state.field = initial_field(c);
  const FlowConfig f = c.flow_config();
  const Stencil st = Stencil::of_order(f.stencil);
  const FieldEvaluation e0 = evaluate(state.field, st);
  advance(state, f, e0);
  const StructureField middle = state.field;
  const FieldEvaluation e1 = evaluate(middle, st);
  advance(state, f, e1);
  return bochner_residual(e0.density, middle, evaluate(state.field, st).density, dt, st).residual;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Outcome bochner_convergence() {
  // dt: the spatial error is common to all dt at fixed h, so successive
  // differences isolate the time error.
  const double h = 1.0 / 64.0, dt = 0.6 * h * h;
  std::vector<std::vector<double>> r;
  for (int k = 0; k < 3; ++k) r.push_back(bochner_field(64, dt / (1 << k)));
  const double p_dt = std::log2(max_diff(r[0], r[1]) / max_diff(r[1], r[2]));
  // h: dt = 1e-5 h^2 makes the time error negligible
  std::vector<double> rh;
  for (int n : {32, 64, 128}) rh.push_back(max_abs(bochner_field(n, 1e-5 / (double(n) * n))));
  const double p_h1 = std::log2(rh[0] / rh[1]), p_h2 = std::log2(rh[1] / rh[2]);
  const bool pass = std::abs(p_dt - 1.0) <= 0.2 && std::abs(p_h1 - 2.0) <= 0.3 && std::abs(p_h2 - 2.0) <= 0.3;
  return {pass, fmt("dt exponent %.3f (need 1 +- 0.2); h exponent %.3f (32->64), %.3f (64->128) (need 2 +- 0.3)", p_dt,
                    p_h1, p_h2)};
}

// ---------------------------------------------------------------- 8

Outcome fixed_point() {
  ExperimentConfig c;
  c.grid.sizes = {16, 16};
  c.validate();
  FiberField fiber(c.grid.build());
  const Fiber constant{0.3, -0.2, 0.1, 0.25, -0.15, 0.05, 0.4};
  for (auto& v : fiber.values) v = constant;
  FlowState state;
  state.field = StructureField::from_fiber(fiber);
  const StructureField initial = state.field;
  const FlowConfig f = c.flow_config();
  const Stencil st = Stencil::of_order(f.stencil);
  double worst_energy = 0.0;
  for (int n = 0; n < 10000; ++n) {
    const FieldEvaluation e = evaluate(state.field, st);
    worst_energy = std::max(worst_energy, e.energy);
    advance(state, f, e);
  }
  worst_energy = std::max(worst_energy, evaluate(state.field, st).energy);
  bool identical = true;
  for (std::size_t s = 0; s < initial.size(); ++s)
    identical = identical && std::memcmp(initial.phi[s].data(), state.field.phi[s].data(), sizeof(PackedFourForm)) == 0 &&
                std::memcmp(initial.rotation[s].data(), state.field.rotation[s].data(), sizeof(Matrix8)) == 0;
  const double adm = admissibility(state.field).max();
  return {identical && worst_energy <= 1e-12 && adm <= 1e-12,
          fmt("16^2 constant pullback, 10^4 steps: bit-identical %s, max E %.1e, admissibility %.1e",
              identical ? "yes" : "NO", worst_energy, adm)};
}

}  // namespace

int main() {
  criterion(1, "identity suite", identity_suite);
  criterion(2, "representation theory", representation_theory);
  criterion(3, "torsion roundtrip", torsion_roundtrip);
  criterion(4, "flat constraints", flat_constraints);
  criterion(5, "flow behavior", flow_behavior);
  criterion(6, "monotone quantities", monotone_quantities);
  criterion(7, "Bochner residual convergence", bochner_convergence);
  criterion(8, "fixed point", fixed_point);
  std::printf("%d of 8 criteria passed\n", 8 - failures);
  return failures == 0 ? 0 : 1;
}
