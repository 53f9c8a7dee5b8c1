// spin7: identity verification, tensor decomposition, flow experiments, reports.
//
// Exit codes: 0 success, 1 verification failure, 2 config or input error,
// 3 flow blowup.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "spin7/config.hpp"
#include "spin7/form_spaces.hpp"
#include "spin7/io.hpp"
#include "spin7/run.hpp"
#include "spin7/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace spin7;

namespace {

enum Exit { ok = 0, failed = 1, bad_input = 2, blowup = 3 };

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create " + dir.string() + ": " + ec.message());
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

// ---------------------------------------------------------------- verify

int cmd_verify(double threshold, std::optional<int> flip_term, const std::string& out_dir) {
  PackedFourForm phi = standard_phi_packed();
  if (flip_term) {
    if (*flip_term < 0 || *flip_term >= 14) throw InputError("--flip-term must be in 0..13");
    phi = corrupted_phi(*flip_term);
  }
  const VerifyReport report = verify_identities(phi, threshold);

  std::ostringstream table;
  if (flip_term) table << "fault injection: Cayley term " << *flip_term << " sign-flipped\n";
  char line[200];
  std::snprintf(line, sizeof line, "%-28s %-11s %-11s %s\n", "check", "residual", "threshold", "result");
  table << line;
  for (const auto& c : report.checks) {
    std::snprintf(line, sizeof line, "%-28s %-11s %-11s %s", c.name.c_str(), sci(c.residual).c_str(),
                  sci(c.threshold).c_str(), c.passed() ? "PASS" : "FAIL");
    table << line;
    if (!c.detail.empty()) table << "  (" << c.detail << ')';
    table << '\n';
  }
  table << "Lambda_Phi eigenvalue multiplicities:";
  for (const auto& [v, m] : report.lambda_spectrum) {
    const double shown = std::abs(v - std::round(v)) < 1e-8 ? std::round(v) + 0.0 : v;
    std::snprintf(line, sizeof line, " %.6g:%d", shown, m);
    table << line;
  }
  std::size_t failures = 0;
  for (const auto& c : report.checks) failures += c.passed() ? 0 : 1;
  table << "\n" << report.checks.size() - failures << "/" << report.checks.size() << " checks passed\n";

  std::cout << table.str();
  if (!out_dir.empty()) {
    make_dir(out_dir);
    write_file(fs::path(out_dir) / "verify.txt", table.str());
  }
  return report.passed() ? ok : failed;
}

// ---------------------------------------------------------------- decompose

struct Component {
  std::string name;
  int dimension;
  std::vector<double> values;  // dense, same rank as the input
};

double frobenius_squared(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

template <int R, class Tag>
std::vector<double> dense(const Tensor<R, Tag>& t) {
  return {t.components().begin(), t.components().end()};
}

template <int R, class Tag>
void check_antisymmetric(const Tensor<R, Tag>& t, double scale) {
  const AntisymmetryViolation v = antisymmetry_violation(t);
  if (v.magnitude <= 1e-12 * std::max(1.0, scale)) return;
  std::ostringstream msg;
  msg << "input is not antisymmetric: component (";
  for (int s = 0; s < R; ++s) msg << (s ? "," : "") << v.index[s];
  msg << ") changes by " << v.magnitude << " instead of flipping sign under the swap of slots " << v.first << " and "
      << v.second;
  throw InputError(msg.str());
}

int cmd_decompose(const std::string& input, const std::string& kind, const std::string& out_dir, double threshold) {
  std::ifstream in(input);
  if (!in) throw InputError("cannot open " + input);
  TensorFile file;
  try {
    file = read_tensor(in);
  } catch (const FormatError& e) {
    throw InputError(input + ": " + e.what());
  }
  if (!kind.empty() && rank_of_kind(kind) != file.rank)
    throw InputError(input + ": file holds a " + std::to_string(file.rank) + "-form but --kind is " + kind);

  double scale = 0.0;
  for (double x : file.values) scale = std::max(scale, std::abs(x));
  const FourForm phi = standard_phi();
  std::vector<Component> parts;
  json extra = json::object();

  if (file.rank == 2) {
    const auto beta = tensor_from_file<2, TwoFormTag>(file);
    check_antisymmetric(beta, scale);
    parts.push_back({"7", 7, dense(project_two_form(beta, TwoFormPart::seven, phi))});
    parts.push_back({"21", 21, dense(project_two_form(beta, TwoFormPart::twenty_one, phi))});
  } else if (file.rank == 3) {
    const auto gamma = tensor_from_file<3, ThreeFormTag>(file);
    check_antisymmetric(gamma, scale);
    const ThreeFormSplit split = decompose_three_form(gamma, phi);
    parts.push_back({"8", 8, dense(interior(split.vector, phi))});
    parts.push_back({"48", 48, dense(split.rest)});
    extra["vector"] = std::vector<double>(split.vector.begin(), split.vector.end());
  } else {
    const auto sigma = tensor_from_file<4, FourFormTag>(file);
    check_antisymmetric(sigma, scale);
    const FourFormSplit split = decompose_four_form(sigma, phi);
    static const char* names[] = {"1", "7", "27", "35"};
    for (int p = 0; p < 4; ++p) parts.push_back({names[p], kFourFormPartDimensions[p], dense(split.parts[p])});
  }

  double resum = 0.0;
  for (std::size_t i = 0; i < file.values.size(); ++i) {
    double sum = 0.0;
    for (const auto& c : parts) sum += c.values[i];
    resum = std::max(resum, std::abs(sum - file.values[i]));
  }
  const double input_norm = frobenius_squared(file.values);
  double parts_norm = 0.0;

  make_dir(out_dir);
  json summary;
  summary["input"] = input;
  summary["kind"] = std::to_string(file.rank) + "-form";
  summary["input_norm_squared"] = input_norm;
  summary["parts"] = json::array();
  for (const auto& c : parts) {
    const std::string name = "part_" + c.name + ".txt";
    std::ofstream out(fs::path(out_dir) / name);
    write_tensor(out, file.rank, c.values.data());
    const double n2 = frobenius_squared(c.values);
    parts_norm += n2;
    summary["parts"].push_back({{"name", c.name},
                                {"dimension", c.dimension},
                                {"file", name},
                                {"norm_squared", n2},
                                {"fraction", input_norm > 0.0 ? n2 / input_norm : 0.0}});
  }
  const double resum_tolerance = threshold * std::max(1.0, scale);
  summary["resum_residual"] = resum;
  summary["resum_tolerance"] = resum_tolerance;
  summary["parseval_defect"] = std::abs(parts_norm - input_norm);
  summary["resum_passed"] = resum <= resum_tolerance;
  summary.update(extra);
  write_file(fs::path(out_dir) / "summary.json", summary.dump(2) + "\n");

  std::cout << summary["kind"].get<std::string>() << " |input|^2 = " << input_norm << "\n";
  for (const auto& p : summary["parts"]) {
    char line[160];
    std::snprintf(line, sizeof line, "  part %-3s (dim %2d)  |part|^2 = %-12.6g %6.2f%%\n",
                  p["name"].get<std::string>().c_str(), p["dimension"].get<int>(), p["norm_squared"].get<double>(),
                  100.0 * p["fraction"].get<double>());
    std::cout << line;
  }
  std::cout << "re-sum residual " << sci(resum) << " (tolerance " << sci(resum_tolerance) << ")\n";
  return resum <= resum_tolerance ? ok : failed;
}

// ---------------------------------------------------------------- flow

int cmd_flow(const std::string& config_path, const std::string& out_override, std::optional<std::uint64_t> seed,
             std::optional<int> stencil) {
  ExperimentConfig config = parse_config(read_file(config_path));
  if (!out_override.empty()) config.output_dir = out_override;
  if (seed) config.generator.seed = *seed;
  if (stencil) config.flow.stencil = *stencil;
  config.validate();  // before any field storage is allocated

  const fs::path out = config.output_dir;
  make_dir(out);
  write_file(out / "config.json", serialize_config(config) + "\n");

  std::ofstream csv(out / "series.csv");
  if (!csv) throw InputError("cannot write " + (out / "series.csv").string());
  csv << series_header(config.monitor.theta_centers.size()) << '\n';

  const Omega27Basis& basis = standard_basis();
  std::optional<FiberField> last_fiber;
  auto save_state = [&](const FlowState& state, const fs::path& path) {
    const FiberField fiber = state.field.to_fiber(basis, last_fiber ? &*last_fiber : nullptr);
    save_snapshot(path.string(), Snapshot{fiber, basis.hash(), config.generator.seed, state.t});
    last_fiber = fiber;
  };

  RunHooks hooks;
  hooks.on_row = [&](const SeriesRow& row) { csv << series_line(row) << '\n'; };
  if (config.monitor.checkpoint_every > 0) {
    make_dir(out / "checkpoints");
    hooks.on_checkpoint = [&](const FlowState& state) {
      char name[40];
      std::snprintf(name, sizeof name, "step_%08ld.s7f", state.step);
      save_state(state, out / "checkpoints" / name);
    };
  }
  hooks.on_blowup = [&](const FlowState& state, const FlowBlowup& e) {
    csv.flush();
    const auto& grid = state.field.grid;
    const auto c = grid.coords(e.site);
    json dump{{"step", e.step},
              {"t", e.t},
              {"sup_torsion", std::isfinite(e.sup_torsion) ? json(e.sup_torsion) : json(nullptr)},
              {"site", e.site},
              {"lattice_point", std::vector<int>(c.begin(), c.begin() + grid.dims())},
              {"threshold", config.flow.blowup_threshold},
              {"snapshot", "blowup_state.s7f"}};
    write_file(out / "blowup.json", dump.dump(2) + "\n");
    try {
      save_state(state, out / "blowup_state.s7f");
    } catch (const std::exception&) {
      // a non-finite field has no chart coordinates; the JSON dump stands alone
    }
  };

  RunResult result;
  try {
    result = run_flow(config, hooks);
  } catch (const FlowBlowup& e) {
    std::cerr << "spin7 flow: " << e.what() << "\n  diagnostic dump in " << (out / "blowup.json").string() << '\n';
    return blowup;
  }
  csv.close();
  const json summary = to_json(result.summary);
  write_file(out / "summary.json", summary.dump(2) + "\n");

  const RunSummary& s = result.summary;
  std::cout << "steps " << s.steps_done << " (" << s.stop_reason << "), dt " << sci(s.dt) << ", t_end " << sci(s.t_end)
            << "\n  E(0) " << sci(s.energy_initial) << "  E(end) " << sci(s.energy_final) << "  max sup|T| "
            << sci(s.sup_max) << "\n  Div T decay rate " << sci(s.div_decay.rate) << " (R^2 " << s.div_decay.r_squared
            << ")  doubling window " << s.dte_window_steps << " steps  singular sites " << s.singular_sites
            << "\n  output in " << out.string() << '\n';
  return ok;
}

// ---------------------------------------------------------------- report

int cmd_report(const std::string& run_dir) {
  const fs::path dir = run_dir;
  json summary;
  try {
    summary = json::parse(read_file((dir / "summary.json").string()));
  } catch (const json::exception& e) {
    throw InputError((dir / "summary.json").string() + ": " + e.what());
  }
  std::ifstream csv(dir / "series.csv");
  if (!csv) throw InputError("cannot open " + (dir / "series.csv").string());
  std::string header, line, first, last;
  std::getline(csv, header);
  long rows = 0;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    if (rows++ == 0) first = line;
    last = line;
  }

  auto get = [&](const char* key) -> std::string {
    const json& v = summary.at(key);
    if (v.is_number_float()) return sci(v.get<double>());
    return v.dump();
  };
  std::ostringstream r;
  r << "# Flow report: " << dir.string() << "\n\n";
  r << "| quantity | value |\n|---|---|\n";
  for (const char* key :
       {"steps_done", "stop_reason", "dt", "t_end", "energy_initial", "energy_final", "worst_energy_increase",
        "sup_torsion_initial", "sup_torsion_max", "sup_torsion_final", "doubling_window_steps", "div_decay_rate",
        "div_decay_r_squared", "reaction_rate", "z_bound_ratio", "theta_worst_ratio", "singular_sites",
        "bochner_max"})
    if (summary.contains(key)) r << "| " << key << " | " << get(key) << " |\n";
  if (summary.contains("entropy"))
    r << "| entropy | " << summary["entropy"]["value"].dump() << " at t = " << summary["entropy"]["time"].dump()
      << " |\n";
  r << "\nseries.csv: " << rows << " rows\n\n    " << header << "\n    " << first << "\n    ...\n    " << last << '\n';

  std::cout << r.str();
  write_file(dir / "report.md", r.str());
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spin(7) structures: identity checks, tensor decomposition and the harmonic flow on flat tori"};
  app.require_subcommand(1);

  double threshold = -1.0;
  std::string out_dir, decompose_dir, config_path, input, kind;
  std::optional<int> flip_term, stencil;
  std::optional<std::uint64_t> seed;

  auto* verify = app.add_subcommand("verify", "run the identity catalogue and print a pass/fail table");
  verify->add_option("--threshold", threshold, "residual threshold (default 1e-11)");
  verify->add_option("--out", out_dir, "also write the table to DIR/verify.txt");
  verify->add_option("--flip-term", flip_term, "fault injection: flip the sign of one Cayley term (0..13)");

  auto* decompose = app.add_subcommand("decompose", "split a 2-, 3- or 4-form into its Spin(7) components");
  decompose->add_option("input", input, "tensor file")->required();
  decompose->add_option("--kind", kind, "expected kind: 2-form, 3-form or 4-form");
  decompose->add_option("--out", decompose_dir, "output directory")->default_val("decomposition");
  decompose->add_option("--threshold", threshold, "re-sum tolerance relative to max|input| (default 1e-12)");

  auto* flow = app.add_subcommand("flow", "run a flow experiment");
  flow->add_option("--config", config_path, "experiment config (JSON)")->required();
  flow->add_option("--out", out_dir, "output directory (overrides the config)");
  flow->add_option("--seed", seed, "generator seed (overrides the config)");
  flow->add_option("--stencil", stencil, "finite-difference order (overrides the config)")
      ->check(CLI::IsMember({2, 4}));

  auto* report = app.add_subcommand("report", "summarize a finished flow run");
  report->add_option("--out", out_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : bad_input;
  }

  try {
    if (*verify) return cmd_verify(threshold > 0.0 ? threshold : 1e-11, flip_term, out_dir);
    if (*decompose) return cmd_decompose(input, kind, decompose_dir, threshold > 0.0 ? threshold : 1e-12);
    if (*flow) return cmd_flow(config_path, out_dir, seed, stencil);
    if (*report) return cmd_report(out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "spin7: config error: " << e.what() << '\n';
    return bad_input;
  } catch (const InputError& e) {
    std::cerr << "spin7: " << e.what() << '\n';
    return bad_input;
  } catch (const FormatError& e) {
    std::cerr << "spin7: " << e.what() << '\n';
    return bad_input;
  }
  return ok;
}
