// swingbench: stability metrics for networked swing dynamics.
//
// Subcommands: analyze, norms, bode, rootlocus, sweep, combined, smib,
// validate. Reports go to stdout as JSON; tables go to --out as CSV with
// fixed column contracts; errors are single-line JSON on stderr.
// Exit codes: 0 success, 2 input error, 3 discrepancy under --strict.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "swingbench/closed_form.hpp"
#include "swingbench/csv.hpp"
#include "swingbench/errors.hpp"
#include "swingbench/netio.hpp"
#include "swingbench/network.hpp"
#include "swingbench/oracles.hpp"
#include "swingbench/sweeps.hpp"
#include "swingbench/swing_system.hpp"

namespace {

using nlohmann::ordered_json;
using namespace swingbench;

constexpr int kExitOk = 0;
constexpr int kExitGeneric = 1;
constexpr int kExitInput = 2;
constexpr int kExitDiscrepancy = 3;

struct CommonOptions {
  bool strict = false;
  bool allow_known = false;
  double rel_tol = 1e-9;
  int threads = 0;  // resolved against SWINGBENCH_THREADS
};

int env_thread_cap() {
  const char* env = std::getenv("SWINGBENCH_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  return std::atoi(env);
}

OutputKind parse_output_kind(const std::string& name) {
  if (name == "phase") return OutputKind::PhaseCohesiveness;
  if (name == "edge") return OutputKind::EdgePhase;
  if (name == "frequency") return OutputKind::Frequency;
  if (name == "combined") return OutputKind::Combined;
  throw ValidationError("unknown output kind \"" + name + "\" (expected phase|edge|frequency|combined)");
}

ordered_json input_echo(const NetworkSpec<double>& spec) {
  ordered_json j;
  j["hash"] = spec_hash(spec);
  j["n"] = spec.n;
  j["edge_count"] = spec.edges.size();
  j["inertia"] = spec.inertia;
  j["damping"] = spec.damping;
  j["kappa"] = spec.kappa;
  return j;
}

ordered_json closed_norm_json(const NormResult<double>& r) {
  ordered_json j;
  j["value"] = r.value;
  j["source"] = r.source;
  j["regime"] = regime_name(r.regime);
  if (r.alternate_value) {
    j["alternate_value"] = *r.alternate_value;
    j["alternate_source"] = r.alternate_source;
  }
  return j;
}

struct DiscrepancyState {
  bool any = false;
  bool unexpected = false;
};

/// A closed-form/oracle pair disagrees when the gap exceeds 10x the oracle
/// tolerance. The phase-output H2 mismatch between the published expression
/// and the modal oracle is the one documented ("known") case: it fires
/// whenever the oracle instead matches the modal alternate value.
ordered_json norm_block_json(OutputKind output, Index n, double inertia, double damping,
                             const LaplacianSpectrum<double>& eig, double rel_tol, DiscrepancyState& state) {
  ordered_json block;
  const auto modes = modes_from_lambdas(eig.eigenvalues, inertia, damping, output, 1.0);

  std::optional<NormPair<double>> closed;
  if (output == OutputKind::PhaseCohesiveness || output == OutputKind::EdgePhase) {
    closed = phase_output_norms(n, inertia, damping, eig.eigenvalues(1));
  } else if (output == OutputKind::Frequency) {
    closed = frequency_output_norms(n, inertia, damping);
  }

  const auto gramian = h2_gramian(modes);
  const auto hinf = hinf_search(modes, rel_tol);
  const double h2_tol = 1e-9;
  const double hinf_tol = std::max(hinf.tol_achieved, rel_tol);

  if (closed) {
    ordered_json cf;
    cf["h2"] = closed_norm_json(closed->h2);
    cf["hinf"] = closed_norm_json(closed->hinf);
    block["closed_form"] = cf;
  } else {
    block["closed_form"] = nullptr;  // combined output is numeric-only
  }

  ordered_json oracle;
  oracle["h2"] = ordered_json{{"value", gramian.h2}, {"rel_tol", h2_tol}, {"deflated_modes", gramian.deflated_modes}};
  oracle["hinf"] = ordered_json{{"value", hinf.hinf},
                                {"argmax_omega", hinf.argmax_omega},
                                {"governing_mode", hinf.governing_mode},
                                {"rel_tol", hinf_tol}};
  block["oracle"] = oracle;

  if (closed) {
    const bool h2_fires = std::abs(closed->h2.value - gramian.h2) > 10 * h2_tol * std::max(gramian.h2, 1e-300);
    bool h2_known = false;
    if (h2_fires && closed->h2.alternate_value) {
      h2_known = std::abs(*closed->h2.alternate_value - gramian.h2) <= 10 * h2_tol * std::max(gramian.h2, 1e-300);
    }
    const bool hinf_fires =
        std::abs(closed->hinf.value - hinf.hinf) > 10 * hinf_tol * std::max(hinf.hinf, 1e-300);
    ordered_json disc;
    disc["h2"] = h2_fires;
    disc["h2_known"] = h2_known;
    disc["hinf"] = hinf_fires;
    block["discrepancy"] = disc;
    state.any = state.any || h2_fires || hinf_fires;
    state.unexpected = state.unexpected || hinf_fires || (h2_fires && !h2_known);
  }
  return block;
}

ordered_json eigen_json(double inertia, double damping, const LaplacianSpectrum<double>& eig) {
  ordered_json j;
  ordered_json modes = ordered_json::array();
  for (const auto& m : system_eigenvalues(inertia, damping, eig)) {
    ordered_json item;
    item["mode"] = m.mode;
    item["lambda"] = m.lambda;
    item["s1"] = {m.s1.real(), m.s1.imag()};
    item["s2"] = {m.s2.real(), m.s2.imag()};
    if (m.zeta) {
      item["zeta"] = *m.zeta;
    } else {
      item["zeta"] = nullptr;
    }
    item["omega_n"] = m.omega_n;
    modes.push_back(item);
  }
  j["modes"] = modes;
  j["zeta_min"] = min_damping_ratio(inertia, damping, eig.eigenvalues(eig.size() - 1));
  return j;
}

void emit_report(const ordered_json& report) { std::cout << report.dump(2) << std::endl; }

int finish(const ordered_json& report, const CommonOptions& opts, const DiscrepancyState& state) {
  emit_report(report);
  if (opts.strict) {
    const bool blocking = opts.allow_known ? state.unexpected : state.any;
    if (blocking) return kExitDiscrepancy;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Subcommand runners
// ---------------------------------------------------------------------------

int run_validate(const std::string& net) {
  const auto spec = parse_network_file(net);
  const auto eig = spectrum(spec);
  ordered_json report;
  report["command"] = "validate";
  report["input"] = input_echo(spec);
  report["valid"] = true;
  report["connected"] = true;
  report["lambda_2"] = eig.eigenvalues(1);
  report["lambda_max"] = eig.eigenvalues(eig.size() - 1);
  report["canonical"] = ordered_json::parse(emit_network(spec));
  emit_report(report);
  return kExitOk;
}

int run_norms(const std::string& net, const std::string& output_name, const CommonOptions& opts) {
  const auto spec = parse_network_file(net);
  const OutputKind output = parse_output_kind(output_name);
  const auto eig = spectrum(spec);
  DiscrepancyState state;
  ordered_json report;
  report["command"] = "norms";
  report["input"] = input_echo(spec);
  report["output"] = output_name;
  report["norms"] =
      norm_block_json(output, spec.n, spec.inertia, spec.damping, eig, opts.rel_tol, state);
  report["discrepancies"] = ordered_json{{"any", state.any}, {"unexpected", state.unexpected}};
  return finish(report, opts, state);
}

int run_analyze(const std::string& net, const CommonOptions& opts) {
  const auto spec = parse_network_file(net);
  const auto eig = spectrum(spec);
  DiscrepancyState state;
  ordered_json report;
  report["command"] = "analyze";
  report["input"] = input_echo(spec);
  report["eigen"] = eigen_json(spec.inertia, spec.damping, eig);
  ordered_json norms;
  norms["phase"] = norm_block_json(OutputKind::PhaseCohesiveness, spec.n, spec.inertia, spec.damping, eig,
                                   opts.rel_tol, state);
  norms["frequency"] =
      norm_block_json(OutputKind::Frequency, spec.n, spec.inertia, spec.damping, eig, opts.rel_tol, state);
  {
    // Combined uses the spec's kappa; rebuild the modes accordingly.
    const auto modes =
        modes_from_lambdas(eig.eigenvalues, spec.inertia, spec.damping, OutputKind::Combined, spec.kappa);
    const auto gramian = h2_gramian(modes);
    const auto hinf = hinf_search(modes, opts.rel_tol);
    ordered_json block;
    block["closed_form"] = nullptr;
    block["oracle"] =
        ordered_json{{"h2", ordered_json{{"value", gramian.h2},
                                         {"rel_tol", 1e-9},
                                         {"deflated_modes", gramian.deflated_modes}}},
                     {"hinf", ordered_json{{"value", hinf.hinf},
                                           {"argmax_omega", hinf.argmax_omega},
                                           {"governing_mode", hinf.governing_mode},
                                           {"rel_tol", std::max(hinf.tol_achieved, opts.rel_tol)}}}};
    norms["combined"] = block;
  }
  report["norms"] = norms;
  report["artifacts"] = ordered_json::array();
  report["discrepancies"] = ordered_json{{"any", state.any}, {"unexpected", state.unexpected}};
  return finish(report, opts, state);
}

int run_smib(double M, double D, double B, const std::string& output_name, const CommonOptions& opts) {
  const OutputKind output = parse_output_kind(output_name);
  if (output == OutputKind::Combined || output == OutputKind::EdgePhase) {
    throw ValidationError("smib supports output phase|frequency");
  }
  ordered_json report;
  report["command"] = "smib";
  report["M"] = M;
  report["D"] = D;
  report["B"] = B;
  report["output"] = output_name;

  NormPair<double> closed;
  if (output == OutputKind::PhaseCohesiveness) {
    closed = smib_norms(M, D, B);
  } else {
    closed = frequency_output_norms(Index(1), M, D);
    closed.hinf.source = "smib-frequency-hinf";
    closed.h2.source = "smib-frequency-h2";
  }
  report["h2"] = closed_norm_json(closed.h2);
  report["hinf"] = closed_norm_json(closed.hinf);
  report["omega_peak"] = resonant_peak_frequency(M, D, B);

  const auto [s1, s2] = mode_poles(M, D, B);
  report["poles"] = {ordered_json{s1.real(), s1.imag()}, ordered_json{s2.real(), s2.imag()}};
  report["zeta"] = D / (2 * std::sqrt(M * B));

  const auto modes = smib_modes(M, D, B, output);
  const auto gramian = h2_gramian(modes);
  const auto hinf = hinf_search(modes, opts.rel_tol);
  const double hinf_tol = std::max(hinf.tol_achieved, opts.rel_tol);
  report["oracle"] = ordered_json{
      {"h2", gramian.h2},
      {"hinf", hinf.hinf},
      {"argmax_omega", hinf.argmax_omega},
      {"rel_tol", hinf_tol}};

  DiscrepancyState state;
  const bool h2_fires = std::abs(closed.h2.value - gramian.h2) > 1e-8 * std::max(gramian.h2, 1e-300);
  const bool hinf_fires = std::abs(closed.hinf.value - hinf.hinf) > 10 * hinf_tol * std::max(hinf.hinf, 1e-300);
  state.any = h2_fires || hinf_fires;
  state.unexpected = state.any;
  report["discrepancies"] = ordered_json{{"any", state.any}, {"unexpected", state.unexpected}};
  return finish(report, opts, state);
}

int run_bode(const std::string& net, const std::string& output_name, double omega_min, double omega_max,
             Index points, const std::string& out_path) {
  const auto spec = parse_network_file(net);
  const auto table = bode_table(spec, parse_output_kind(output_name), omega_min, omega_max, points);
  atomic_write_file(out_path, to_csv(table));

  Index peak = 0;
  table.sigma.maxCoeff(&peak);
  ordered_json report;
  report["command"] = "bode";
  report["input"] = input_echo(spec);
  report["output"] = output_name;
  report["rows"] = table.omega.size();
  report["peak_omega"] = table.omega(peak);
  report["peak_sigma"] = table.sigma(peak);
  report["artifacts"] = {out_path};
  emit_report(report);
  return kExitOk;
}

int run_rootlocus(const std::string& net, double D, double B, bool smib_form, const Grid<double>& grid,
                  const std::string& out_path) {
  ordered_json report;
  report["command"] = "rootlocus";
  RootLocusTable<double> table;
  if (smib_form) {
    if (!(D > 0) || !(B > 0)) throw ValidationError("rootlocus: --D and --B must be > 0");
    table = root_locus(grid, D, B);
    report["D"] = D;
    report["B"] = B;
  } else {
    const auto spec = parse_network_file(net);
    table = root_locus(grid, spec);
    report["input"] = input_echo(spec);
  }
  atomic_write_file(out_path, to_csv(table));
  report["rows"] = table.size();
  report["artifacts"] = {out_path};
  emit_report(report);
  return kExitOk;
}

int run_sweep(const std::string& net, const std::string& param_name, const std::string& output_name,
              const Grid<double>& grid, const std::vector<std::string>& metric_names, Index oracle_stride,
              const std::string& out_path, const CommonOptions& opts) {
  SweepPlan<double> plan;
  plan.spec = parse_network_file(net);
  if (param_name == "M") {
    plan.param = SweepParam::Inertia;
  } else if (param_name == "D") {
    plan.param = SweepParam::Damping;
  } else {
    throw ValidationError("sweep: --param must be M or D");
  }
  plan.grid = grid;
  plan.output = parse_output_kind(output_name);
  plan.oracle_stride = oracle_stride;
  plan.oracle_rel_tol = opts.rel_tol;
  plan.max_threads = opts.threads;
  if (!metric_names.empty()) {
    plan.metrics = MetricSelection{false, false, false, false, false};
    for (const auto& m : metric_names) {
      if (m == "h2-closed") {
        plan.metrics.h2_closed = true;
      } else if (m == "h2-oracle") {
        plan.metrics.h2_oracle = true;
      } else if (m == "hinf-closed") {
        plan.metrics.hinf_closed = true;
      } else if (m == "hinf-oracle") {
        plan.metrics.hinf_oracle = true;
      } else if (m == "zeta-min") {
        plan.metrics.zeta_min = true;
      } else {
        throw ValidationError("sweep: unknown metric \"" + m + "\"");
      }
    }
  }

  const auto table = norm_sweep(plan);
  atomic_write_file(out_path, to_csv(table));

  ordered_json report;
  report["command"] = "sweep";
  report["input"] = input_echo(plan.spec);
  report["param"] = param_name;
  report["output"] = output_name;
  report["rows"] = table.rows.size();
  report["artifacts"] = {out_path};
  emit_report(report);
  return kExitOk;
}

int run_combined(const std::string& net, double kappa, const Grid<double>& grid, const std::string& out_path,
                 const CommonOptions& opts) {
  const auto spec = parse_network_file(net);
  const auto rows = combined_sweep(spec, kappa, grid, opts.rel_tol, opts.threads);
  atomic_write_file(out_path, to_csv(rows));
  ordered_json report;
  report["command"] = "combined";
  report["input"] = input_echo(spec);
  report["kappa"] = kappa;
  report["rows"] = rows.size();
  report["artifacts"] = {out_path};
  emit_report(report);
  return kExitOk;
}

int error_exit(const char* kind, const std::string& message) {
  ordered_json err;
  err["error"] = kind;
  err["message"] = message;
  std::cerr << err.dump() << std::endl;
  return kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"swingbench: eigenvalue, H2 and H-infinity metrics of networked swing dynamics"};
  app.require_subcommand(1);

  CommonOptions opts;
  opts.threads = env_thread_cap();

  std::string net, output_name = "phase", param_name = "M", out_path;
  std::vector<std::string> metric_names;
  double M = 1.0, D = 1.0, B = 1.0, kappa = 1.0;
  double omega_min = 1e-2, omega_max = 1e2;
  Index points = 200, oracle_stride = 1;
  bool linear_grid = false;
  double grid_min = 0.1, grid_max = 10.0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_flag("--strict", opts.strict, "exit 3 when closed-form and oracle values disagree");
    cmd->add_flag("--allow-known-discrepancies", opts.allow_known,
                  "do not fail --strict on the documented phase-output H2 gap");
    cmd->add_option("--rel-tol", opts.rel_tol, "relative tolerance for the H-infinity search");
    cmd->add_option("--threads", opts.threads, "parallelism cap (0 = auto; SWINGBENCH_THREADS overrides default)");
  };

  auto* validate_cmd = app.add_subcommand("validate", "parse and validate a network file");
  validate_cmd->add_option("--net", net, "network JSON file or inline JSON")->required();

  auto* analyze_cmd = app.add_subcommand("analyze", "full eigen + norm report for a network");
  analyze_cmd->add_option("--net", net, "network JSON file or inline JSON")->required();
  add_common(analyze_cmd);

  auto* norms_cmd = app.add_subcommand("norms", "closed-form and oracle norms for one output");
  norms_cmd->add_option("--net", net, "network JSON file or inline JSON")->required();
  norms_cmd->add_option("--output", output_name, "phase|edge|frequency|combined");
  add_common(norms_cmd);

  auto* smib_cmd = app.add_subcommand("smib", "single-machine infinite-bus metrics");
  smib_cmd->add_option("--M", M, "inertia")->required();
  smib_cmd->add_option("--D", D, "damping")->required();
  smib_cmd->add_option("--B", B, "susceptance to the infinite bus")->required();
  smib_cmd->add_option("--output", output_name, "phase|frequency");
  add_common(smib_cmd);

  auto* bode_cmd = app.add_subcommand("bode", "largest-singular-value frequency response table");
  bode_cmd->add_option("--net", net, "network JSON file or inline JSON")->required();
  bode_cmd->add_option("--output", output_name, "phase|edge|frequency|combined");
  bode_cmd->add_option("--omega-min", omega_min, "lowest frequency (> 0)");
  bode_cmd->add_option("--omega-max", omega_max, "highest frequency");
  bode_cmd->add_option("--points", points, "log-spaced sample count (>= 2)");
  bode_cmd->add_option("--out", out_path, "CSV output path (omega,sigma_max)")->required();

  auto* rl_cmd = app.add_subcommand("rootlocus", "closed-form poles over an inertia grid");
  rl_cmd->add_option("--net", net, "network JSON file or inline JSON");
  rl_cmd->add_option("--D", D, "damping (SMIB form)");
  rl_cmd->add_option("--B", B, "susceptance (SMIB form)");
  rl_cmd->add_option("--min", grid_min, "grid minimum");
  rl_cmd->add_option("--max", grid_max, "grid maximum");
  rl_cmd->add_option("--points", points, "grid size");
  rl_cmd->add_flag("--linear", linear_grid, "linear grid instead of log");
  rl_cmd->add_option("--out", out_path, "CSV output path (M,mode,re1,im1,re2,im2)")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "norms over an inertia or damping grid");
  sweep_cmd->add_option("--net", net, "network JSON file or inline JSON")->required();
  sweep_cmd->add_option("--param", param_name, "M or D");
  sweep_cmd->add_option("--output", output_name, "phase|edge|frequency|combined");
  sweep_cmd->add_option("--min", grid_min, "grid minimum");
  sweep_cmd->add_option("--max", grid_max, "grid maximum");
  sweep_cmd->add_option("--points", points, "grid size");
  sweep_cmd->add_flag("--linear", linear_grid, "linear grid instead of log");
  sweep_cmd->add_option("--metrics", metric_names,
                        "subset of h2-closed h2-oracle hinf-closed hinf-oracle zeta-min (default: the four norms)");
  sweep_cmd->add_option("--oracle-stride", oracle_stride, "evaluate oracle metrics every k-th row");
  sweep_cmd->add_option("--out", out_path, "CSV output path")->required();
  add_common(sweep_cmd);

  auto* combined_cmd = app.add_subcommand("combined", "oracle norms of the combined output over an inertia grid");
  combined_cmd->add_option("--net", net, "network JSON file or inline JSON")->required();
  combined_cmd->add_option("--kappa", kappa, "frequency-block weight");
  combined_cmd->add_option("--min", grid_min, "grid minimum");
  combined_cmd->add_option("--max", grid_max, "grid maximum");
  combined_cmd->add_option("--points", points, "grid size");
  combined_cmd->add_flag("--linear", linear_grid, "linear grid instead of log");
  combined_cmd->add_option("--out", out_path, "CSV output path (M,h2_oracle,hinf_oracle)")->required();
  add_common(combined_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return error_exit("UsageError", e.what());
  }

  Grid<double> grid{grid_min, grid_max, points, !linear_grid};

  try {
    if (*validate_cmd) return run_validate(net);
    if (*analyze_cmd) return run_analyze(net, opts);
    if (*norms_cmd) return run_norms(net, output_name, opts);
    if (*smib_cmd) return run_smib(M, D, B, output_name, opts);
    if (*bode_cmd) return run_bode(net, output_name, omega_min, omega_max, points, out_path);
    if (*rl_cmd) return run_rootlocus(net, D, B, net.empty(), grid, out_path);
    if (*sweep_cmd) return run_sweep(net, param_name, output_name, grid, metric_names, oracle_stride, out_path, opts);
    if (*combined_cmd) return run_combined(net, kappa, grid, out_path, opts);
  } catch (const ParseError& e) {
    return error_exit("ParseError", e.what());
  } catch (const ValidationError& e) {
    return error_exit("ValidationError", e.what());
  } catch (const DisconnectedGraph& e) {
    return error_exit("DisconnectedGraph", e.what());
  } catch (const NonPositiveParameter& e) {
    return error_exit("NonPositiveParameter", e.what());
  } catch (const Error& e) {
    return error_exit("Error", e.what());
  } catch (const std::invalid_argument& e) {
    return error_exit("InvalidArgument", e.what());
  } catch (const std::exception& e) {
    ordered_json err;
    err["error"] = "InternalError";
    err["message"] = e.what();
    std::cerr << err.dump() << std::endl;
    return kExitGeneric;
  }
  return kExitGeneric;
}
