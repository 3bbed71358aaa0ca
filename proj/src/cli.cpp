#include "geogate/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "geogate/errors.hpp"
#include "geogate/serialization.hpp"

namespace geogate::cli {
namespace {

constexpr double kDefaultOmega0RadPerSecond = 2.0 * kPi * 1000.0;

struct Settings {
  std::string output;
  std::string write_config;
  int steps = kDefaultSteps;

  // solve / gate / tomo / surface
  double epsilon = 0.5;
  std::string epsilons = "0.5,0.3,0.1";
  double gamma = 0.5;
  double omega0_tilde = -1.0;
  std::string guess;
  bool display_si = false;
  double omega0_rad_s = kDefaultOmega0RadPerSecond;
  bool finite_hard_pulses = false;
  bool merged = false;

  // phases / trajectory
  double omega0 = 2.0 * kPi;
  double omega1 = kPi;
  double omega_rf = 1.6 * kPi;
  double phi = 0.0;
  bool fig3 = false;
  std::string branch = "plus";
  int samples = 400;
  double duration = 0.0;

  double noise_ratio = 0.85;
  bool noise_free = false;
  std::string grid = "19,36";
};

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size() && item.find_first_not_of(' ', used) != std::string::npos) {
        throw std::invalid_argument(item);
      }
    } catch (const std::logic_error&) {
      throw InvalidArgument(std::string("cannot parse ") + what + ": '" + text + "'");
    }
  }
  if (values.empty()) throw InvalidArgument(std::string("empty ") + what);
  return values;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw InvalidArgument("cannot open output file " + path);
  file << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

LabField field_of(const Settings& s) {
  LabField f{s.omega0, s.omega1, s.omega_rf, s.phi};
  f.validate();
  return f;
}

Json si_block(const SolvedPair& sp, double scale) {
  return Json{{"omega0_rad_per_s", std::abs(sp.pair.omega0_tilde) * scale},
              {"omega1_rad_per_s", sp.pair.omega1() * scale},
              {"omega1_rf_rad_per_s", sp.pair.omega1_rf_tilde * scale},
              {"omega2_rf_rad_per_s", sp.pair.omega2_rf_tilde * scale},
              {"tau1_s", 2.0 * kPi / std::abs(sp.pair.omega1_rf_tilde) / scale},
              {"tau2_s", 2.0 * kPi / std::abs(sp.pair.omega2_rf_tilde) / scale}};
}

SolveOptions solve_options(const Settings& s) {
  SolveOptions o;
  o.steps = s.steps;
  if (!s.guess.empty()) {
    const auto g = parse_list(s.guess, "guess");
    if (g.size() != 2) throw InvalidArgument("guess needs two ratios");
    o.guess = std::make_pair(g[0], g[1]);
  }
  return o;
}

int cmd_solve(const Settings& s, std::ostream& out) {
  const SolvedPair sp = solve(s.epsilon, s.gamma, s.omega0_tilde, solve_options(s));
  Json j = solved_pair_json(sp);
  if (s.display_si) j["display"] = si_block(sp, s.omega0_rad_s);
  emit(dump(j), s.output, out);
  return kExitOk;
}

int cmd_phases(const Settings& s, std::ostream& out) {
  if (s.fig3) {
    emit(dump(fig3_json(fig3_report(s.steps))), s.output, out);
    return kExitOk;
  }
  const LabField f = field_of(s);
  Json j{{"closed_form", cyclic_report_json(f, cyclic_report(f))},
         {"numeric", Json{{"plus", numeric_phases_json(numeric_phases(f, Branch::Plus, s.steps))},
                          {"minus", numeric_phases_json(numeric_phases(f, Branch::Minus, s.steps))}}},
         {"steps", s.steps}};
  emit(dump(j), s.output, out);
  return kExitOk;
}

GateReport gate_report(const Settings& s) {
  const SolvedPair sp = solve(s.epsilon, s.gamma, s.omega0_tilde, solve_options(s));
  GateReport r;
  r.sequence = compile_echo(sp);
  SequenceOptions o;
  o.finite_hard_pulses = s.finite_hard_pulses;
  o.use_merged = s.merged;
  r.unitary = sequence_unitary(r.sequence, o);
  r.closed_form = closed_form_echo(sp.geometry, sp.pair.gamma);
  r.zw = zw_gate(sp.pair, sp.pair.gamma);
  r.distance_closed_form = distance_up_to_global_phase(r.unitary, r.closed_form);
  r.distance_zw =
      distance_up_to_global_phase(r.zw, rotation(Vec3::UnitY(), -sp.geometry.theta) * r.unitary);
  return r;
}

int cmd_gate(const Settings& s, std::ostream& out) {
  const GateReport r = gate_report(s);
  Json j = gate_report_json(r);
  if (std::abs(s.gamma - 0.5) < 1e-15) {
    const HadamardComparison h = hadamard_equivalence(r.sequence.geometry.Theta);
    j["gamma_half_gate"] = matrix_json(gamma_half_gate(r.sequence.geometry.Theta));
    j["hadamard"] = Json{{"distance_to_hadamard", h.distance_to_hadamard},
                         {"distance_to_z_hadamard_z", h.distance_to_z_hadamard_z},
                         {"note", h.note}};
  }
  emit(dump(j), s.output, out);
  return kExitOk;
}

int cmd_trajectory(const Settings& s, std::ostream& out) {
  const LabField f = field_of(s);
  if (s.branch != "plus" && s.branch != "minus") {
    throw InvalidArgument("branch must be plus or minus");
  }
  const auto [plus, minus] = cyclic_states(f);
  const double duration = s.duration > 0.0 ? s.duration : f.period();
  std::ostringstream csv;
  write_trajectory_csv(csv, bloch_trajectory(f, s.branch == "plus" ? plus : minus, duration,
                                             s.samples));
  emit(csv.str(), s.output, out);
  return kExitOk;
}

int cmd_tomo(const Settings& s, std::ostream& out) {
  const NoiseModel noise = calibrate_rf_noise(s.noise_ratio);
  Json reports = Json::array();
  for (double eps : parse_list(s.epsilons, "epsilon list")) {
    const SolvedPair sp = solve(eps, s.gamma, s.omega0_tilde, solve_options(s));
    Json r = fidelity_report_json(fidelity_report(sp, noise));
    r["process_matrix"] = process_matrix_json(process_tomography(channel_of(compile_echo(sp), noise)));
    reports.push_back(r);
  }
  Json j{{"target_ratio", s.noise_ratio},
         {"achieved_ratio", pulse_signal_ratio(noise)},
         {"noise", noise_json(noise)},
         {"reports", reports}};
  emit(dump(j), s.output, out);
  return kExitOk;
}

int cmd_surface(const Settings& s, std::ostream& out) {
  const auto g = parse_list(s.grid, "grid");
  if (g.size() != 2 || g[0] != std::floor(g[0]) || g[1] != std::floor(g[1])) {
    throw InvalidArgument("grid must be two integers T,P");
  }
  const SolvedPair sp = solve(s.epsilon, s.gamma, s.omega0_tilde, solve_options(s));
  const PulseSequence seq = compile_echo(sp);
  const KrausSet channel = s.noise_free ? channel_of(seq)
                                        : channel_of(seq, calibrate_rf_noise(s.noise_ratio));
  std::ostringstream csv;
  write_surface_csv(csv, bloch_surface(channel, static_cast<int>(g[0]), static_cast<int>(g[1])));
  emit(csv.str(), s.output, out);
  return kExitOk;
}

int cmd_table1(const Settings& s, std::ostream& out) {
  SolveOptions o;
  o.steps = s.steps;
  emit(dump(table1_json(table1_report(o))), s.output, out);
  return kExitOk;
}

struct CheckLine {
  std::string name;
  double value;
  double limit;
};

int cmd_check(const Settings& s, std::ostream& out) {
  std::vector<CheckLine> lines;
  const LabField f{2.0 * kPi, kPi, 1.6 * kPi, 0.0};
  const double tau = f.period();
  lines.push_back({"propagator_vs_rk4", max_norm(propagator(f, tau) -
                                                 numerical_propagator(f, tau, s.steps)), 1e-6});
  const CyclicReport rep = cyclic_report(f);
  for (Branch b : {Branch::Plus, Branch::Minus}) {
    const NumericPhases np = numeric_phases(f, b, s.steps);
    const std::string tag = b == Branch::Plus ? "plus" : "minus";
    lines.push_back({"dynamical_" + tag, std::abs(np.dynamical - rep.phases(b).dynamical), 1e-6});
    lines.push_back({"geometric_" + tag, std::abs(np.geometric - rep.phases(b).geometric), 1e-6});
    lines.push_back({"total_" + tag, std::abs(np.total - rep.phases(b).total), 1e-6});
  }
  lines.push_back({"single_loop_gate", distance_up_to_global_phase(single_loop_gate(f),
                                                                   propagator(f, tau)), 1e-9});

  SolveOptions o;
  o.steps = s.steps;
  const SolvedPair sp = solve(0.5, 0.5, -1.0, o);
  lines.push_back({"solver_dynamical", std::abs(sp.residuals.r_dyn), 1e-8});
  lines.push_back({"solver_geometric", std::abs(sp.residuals.r_geo), 1e-8});
  const PhaseSums doubled = phase_sums_oracle(sp.pair, 2 * s.steps);
  lines.push_back({"doubled_dynamical", std::abs(doubled.dynamical), 1e-7});
  lines.push_back({"doubled_geometric", std::abs(wrap_pi(doubled.geometric - 0.5 * kPi)), 1e-7});

  const PulseSequence seq = compile_echo(sp);
  const Operator2 u = sequence_unitary(seq);
  lines.push_back({"echo_closed_form", distance_up_to_global_phase(u, closed_form_echo(sp.geometry, 0.5)), 1e-9});
  lines.push_back({"echo_squared", max_norm(u * u + identity2()), 1e-9});
  lines.push_back({"zw_relation", distance_up_to_global_phase(
                                      zw_gate(sp.pair, 0.5),
                                      rotation(Vec3::UnitY(), -sp.geometry.theta) * u), 1e-9});
  lines.push_back({"qpt_fidelity", std::abs(entanglement_fidelity(channel_of(seq), u) - 1.0), 1e-9});
  lines.push_back({"qpt_rank", static_cast<double>(
                                   kraus_from_chi(process_tomography(channel_of(seq))).operators.size()) - 1.0, 0.0});
  lines.push_back({"depolarizing_fidelity",
                   std::abs(entanglement_fidelity(depolarizing_channel(), u) - 0.25), 1e-9});

  int failures = 0;
  std::ostringstream text;
  text.precision(3);
  for (const auto& l : lines) {
    const bool ok = l.value <= l.limit;
    if (!ok) ++failures;
    text << (ok ? "ok   " : "FAIL ") << l.name << " " << std::scientific << l.value << " <= "
         << l.limit << "\n";
  }
  text << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed")
       << "\n";
  emit(text.str(), s.output, out);
  return failures == 0 ? kExitOk : kExitViolation;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Inserts the config file's entries right after the subcommand so that explicit
// flags, which come later, take precedence.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  for (std::size_t k = 1; k < args.size(); ++k) {
    std::string path;
    std::size_t erase = 0;
    if (args[k] == "--config" && k + 1 < args.size()) {
      path = args[k + 1];
      erase = 2;
    } else if (args[k].rfind("--config=", 0) == 0) {
      path = args[k].substr(9);
      erase = 1;
    }
    if (erase == 0) continue;
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot read config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    args.erase(args.begin() + static_cast<std::ptrdiff_t>(k),
               args.begin() + static_cast<std::ptrdiff_t>(k + erase));
    std::vector<std::string> tokens;
    for (const auto& [key, value] : RunConfig::parse(buf.str()).values) {
      tokens.push_back("--" + key + "=" + value);
    }
    const std::size_t at = args.size() > 1 ? 2 : args.size();
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), tokens.begin(), tokens.end());
    break;
  }
  return args;
}

RunConfig effective_config(const CLI::App& sub) {
  RunConfig cfg;
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "write-config" || name == "config") continue;
    if (opt->get_expected_min() == 0) {
      cfg.values.emplace_back(name, opt->count() > 0 && opt->as<bool>() ? "true" : "false");
    } else if (opt->count() > 0) {
      cfg.values.emplace_back(name, opt->results().back());
    } else if (!opt->get_default_str().empty()) {
      cfg.values.emplace_back(name, opt->get_default_str());
    }
  }
  return cfg;
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int number = 0;
  while (std::getline(ss, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("config line " + std::to_string(number) + " is not key = value");
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty()) throw InvalidArgument("config line " + std::to_string(number) + " has no key");
    cfg.values.emplace_back(key, value);
  }
  return cfg;
}

std::string RunConfig::str() const {
  std::string s;
  for (const auto& [k, v] : values) s += k + " = " + v + "\n";
  return s;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"Nonadiabatic geometric one-qubit gate design and simulation", "geogate"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default()->multi_option_policy(
      CLI::MultiOptionPolicy::TakeLast);
  app.add_option("--config", "Flat key = value file with flags for the subcommand");

  auto add_common = [&](CLI::App* sub, bool with_steps = true) {
    sub->add_option("-o,--output", s.output, "Write to this file instead of stdout");
    sub->add_option("--write-config", s.write_config, "Write the effective flags as a config file");
    if (with_steps) {
      sub->add_option("--steps", s.steps, "RK4 steps per loop")->check(CLI::Range(1000, 100000000));
    }
  };
  auto add_pair = [&](CLI::App* sub, bool with_epsilon) {
    if (with_epsilon) sub->add_option("--epsilon", s.epsilon, "omega1 / |omega0_tilde|");
    sub->add_option("--gamma", s.gamma, "Target geometric phase in units of pi");
    sub->add_option("--omega0", s.omega0_tilde, "Offset omega0_tilde (< 0)");
    sub->add_option("--guess", s.guess, "Start ratios r1,r2 = omega_rf / omega0_tilde");
  };
  auto add_field = [&](CLI::App* sub) {
    sub->add_option("--omega0", s.omega0, "Static field");
    sub->add_option("--omega1", s.omega1, "Rotating amplitude");
    sub->add_option("--omega-rf", s.omega_rf, "Rotation frequency");
    sub->add_option("--phi", s.phi, "Initial phase");
  };

  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve the double-loop conditions");
  add_common(solve_cmd);
  add_pair(solve_cmd, true);
  solve_cmd->add_flag("--display-si", s.display_si, "Add rad/s values");
  solve_cmd->add_option("--omega0-rad-s", s.omega0_rad_s, "|omega0_tilde| in rad/s for display");

  CLI::App* phases_cmd = app.add_subcommand("phases", "Cyclic states and phases of one loop");
  add_common(phases_cmd);
  add_field(phases_cmd);
  phases_cmd->add_flag("--fig3", s.fig3, "Report the two-loop example set instead");

  CLI::App* gate_cmd = app.add_subcommand("gate", "Compile the echo sequence and its unitary");
  add_common(gate_cmd);
  add_pair(gate_cmd, true);
  gate_cmd->add_flag("--finite-hard-pulses", s.finite_hard_pulses, "Hard pulses of finite length");
  gate_cmd->add_flag("--merged", s.merged, "Evaluate the merged sequence");

  CLI::App* traj_cmd = app.add_subcommand("trajectory", "Bloch trajectory CSV of a cyclic state");
  add_common(traj_cmd, false);
  add_field(traj_cmd);
  traj_cmd->add_option("--branch", s.branch, "plus or minus");
  traj_cmd->add_option("--steps", s.samples, "Rows after the first")->check(CLI::PositiveNumber);
  traj_cmd->add_option("--duration", s.duration, "Evolution time (default one period)");

  CLI::App* tomo_cmd = app.add_subcommand("tomo", "Noise calibration and fidelity report");
  add_common(tomo_cmd);
  add_pair(tomo_cmd, false);
  tomo_cmd->add_option("--epsilon", s.epsilons, "Comma-separated epsilon values");
  tomo_cmd->add_option("--noise-ratio", s.noise_ratio, "Target 5pi/2 to pi/2 signal ratio");

  CLI::App* surface_cmd = app.add_subcommand("surface", "Bloch surface map CSV");
  add_common(surface_cmd);
  add_pair(surface_cmd, true);
  surface_cmd->add_option("--grid", s.grid, "Grid T,P");
  surface_cmd->add_option("--noise-ratio", s.noise_ratio, "Target 5pi/2 to pi/2 signal ratio");
  surface_cmd->add_flag("--noise-free", s.noise_free, "Skip the rf-noise model");

  CLI::App* table_cmd = app.add_subcommand("table1", "Gamma = 1/2 table comparison");
  add_common(table_cmd);

  CLI::App* check_cmd = app.add_subcommand("check", "Oracle self-consistency suite");
  add_common(check_cmd);

  std::vector<std::string> args;
  try {
    args = expand_config(raw_args);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    if (!s.write_config.empty()) emit(effective_config(*sub).str(), s.write_config, out);
    if (sub == solve_cmd) return cmd_solve(s, out);
    if (sub == phases_cmd) return cmd_phases(s, out);
    if (sub == gate_cmd) return cmd_gate(s, out);
    if (sub == traj_cmd) return cmd_trajectory(s, out);
    if (sub == tomo_cmd) return cmd_tomo(s, out);
    if (sub == surface_cmd) return cmd_surface(s, out);
    if (sub == table_cmd) return cmd_table1(s, out);
    return cmd_check(s, out);
  } catch (const SolverFailure& e) {
    err << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitViolation;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return run(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace geogate::cli
