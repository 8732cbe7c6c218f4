#include "cli.hpp"

#include <cmath>
#include <iostream>
#include <optional>
#include <random>

#include "CLI11.hpp"
#include "json.hpp"

#include "gridjam/attack_design.hpp"
#include "gridjam/case_io.hpp"
#include "gridjam/error.hpp"
#include "gridjam/estimator.hpp"
#include "gridjam/harness.hpp"
#include "gridjam/oracle.hpp"

namespace gridjam {

namespace {

using json = nlohmann::json;

struct Options {
  std::string topology;
  std::string scenario;
  std::optional<double> p_inject;
  std::optional<double> p_jam;
  std::vector<double> p_jams;
  std::string beta;
  std::optional<double> gamma;
  std::optional<double> lambda;
  std::optional<std::uint64_t> seed;
  int trials = 200;
  std::string out;
  std::string filter = "all";
  std::string attack = "jamming";
  double noise = 0.0;
  double phasor_fraction = 0.6;
  std::vector<double> secure_fractions{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  std::string system_name;
  bool no_timing = false;
};

struct Loaded {
  Grid grid;
  Scenario scenario;
};

Loaded load(const Options& o) {
  Loaded l{parse_topology(o.topology), {}};
  l.scenario = parse_scenario(o.scenario, l.grid);
  CostParams& p = l.scenario.params;
  if (o.p_inject) p.p_inject = *o.p_inject;
  if (o.p_jam) p.p_jam = *o.p_jam;
  if (o.gamma) p.gamma = *o.gamma;
  if (o.seed) p.seed = *o.seed;
  if (o.beta == "finite") p.beta_mode = BetaMode::Finite;
  if (o.beta == "inf") p.beta_mode = BetaMode::Infinite;
  if (o.lambda) l.scenario.lambda = *o.lambda;
  p.validate();
  return l;
}

json plan_json(std::string_view attack, const DesignResult& r, const AugmentedSystem& system) {
  json j;
  j["attack"] = attack;
  j["feasible"] = r.plan.has_value();
  j["rounds"] = r.inflation_rounds;
  if (!r.plan) return j;
  const AttackPlan& p = *r.plan;
  std::vector<int> side;
  for (int v : p.cut.side1) side.push_back(system.grid().bus_ids()[v]);
  j["cost"] = p.cost;
  j["cut"] = side;
  j["crossing"] = p.cut.crossing;
  j["n_S"] = p.cut.n_secure;
  j["n_Sc"] = p.cut.n_insecure;
  j["jam"] = p.jam;
  j["inject"] = p.inject;
  return j;
}

struct Designs {
  DesignResult hidden;
  DesignResult detectable;
  DesignResult jamming;
};

Designs design_all(const MeasurementGraph& graph, const CostParams& params) {
  Designs d;
  d.hidden = design_hidden_attack(graph, params);
  d.detectable = design_detectable_attack(graph, params);
  std::vector<Cut> candidates;
  if (d.detectable.plan) candidates.push_back(d.detectable.plan->cut);
  if (d.hidden.plan) candidates.push_back(d.hidden.plan->cut);
  d.jamming = design_jamming_attack(graph, params, candidates);
  return d;
}

int cmd_attack(const Options& o, std::ostream& out) {
  Loaded l = load(o);
  AugmentedSystem system = build_system(l.grid, l.scenario.measurements);
  MeasurementGraph graph = to_graph(system);
  Designs d = design_all(graph, l.scenario.params);
  out << plan_json("hidden", d.hidden, system).dump() << '\n';
  out << plan_json("detectable", d.detectable, system).dump() << '\n';
  out << plan_json("jamming", d.jamming, system).dump() << '\n';
  return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
  Loaded l = load(o);
  AugmentedSystem system = build_system(l.grid, l.scenario.measurements);
  MeasurementGraph graph = to_graph(system);
  Designs d = design_all(graph, l.scenario.params);
  const DesignResult* chosen = &d.jamming;
  if (o.attack == "hidden") chosen = &d.hidden;
  if (o.attack == "detectable") chosen = &d.detectable;

  json j = plan_json(o.attack, *chosen, system);
  if (!chosen->plan) {
    out << j.dump() << '\n';
    return kExitOk;
  }
  Rng rng(derive_seed(l.scenario.params.seed, 99));
  std::uniform_real_distribution<double> angle(-0.1, 0.1);
  Eigen::VectorXd x_true(system.bus_count());
  for (auto& v : x_true) v = angle(rng);

  SimulationOptions sim;
  sim.lambda = l.scenario.lambda ? *l.scenario.lambda : default_lambda(system);
  if (o.noise > 0.0) {
    std::normal_distribution<double> gauss(0.0, o.noise);
    Eigen::VectorXd e(system.measurement_count());
    for (auto& v : e) v = gauss(rng);
    sim.noise = e;
    sim.noise_scale = o.noise;
  }
  AttackVerification v = simulate_attack(system, *chosen->plan, x_true, sim);
  j["lambda"] = sim.lambda;
  j["alpha"] = v.alpha;
  j["success"] = v.success;
  j["detected"] = v.detected;
  j["removed"] = v.removed;
  j["removal_rounds"] = v.rounds;
  std::vector<double> shift(v.estimate_shift.data(), v.estimate_shift.data() + v.estimate_shift.size());
  j["estimate_shift"] = shift;
  out << j.dump() << '\n';
  return v.success ? kExitOk : kExitInvariant;
}

int cmd_oracle_check(const Options& o, std::ostream& out) {
  Loaded l = load(o);
  AugmentedSystem system = build_system(l.grid, l.scenario.measurements);
  MeasurementGraph graph = to_graph(system);
  const CostParams& params = l.scenario.params;
  Designs d = design_all(graph, params);
  auto oracle = brute_force_optimal(graph, params);

  json j;
  j["design_feasible"] = d.jamming.plan.has_value();
  j["oracle_feasible"] = oracle.has_value();
  bool ok = d.jamming.plan.has_value() <= oracle.has_value();
  if (oracle) {
    j["oracle_cost"] = oracle->best_cost;
    j["feasible_cuts"] = oracle->feasible_cut_count;
  }
  if (d.jamming.plan) {
    j["design_cost"] = d.jamming.plan->cost;
    if (oracle) {
      double gap = d.jamming.plan->cost - oracle->best_cost;
      j["gap"] = gap;
      ok = ok && gap >= -1e-9;
      auto sweep = sweep_jam_counts(d.jamming.plan->cut, params);
      ok = ok && sweep && std::abs(sweep->cost - d.jamming.plan->cost) <= 1e-9;
    }
  }
  j["ok"] = ok;
  out << j.dump() << '\n';
  return ok ? kExitOk : kExitInvariant;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  SweepConfig config;
  config.grid = parse_topology(o.topology);
  config.system_name = o.system_name.empty()
                           ? std::filesystem::path(o.topology).stem().string()
                           : o.system_name;
  config.trials = o.trials;
  config.phasor_fraction = o.phasor_fraction;
  config.secure_fractions = o.secure_fractions;
  if (o.p_inject) config.p_inject = *o.p_inject;
  if (!o.p_jams.empty()) config.p_jams = o.p_jams;
  if (o.beta == "finite") config.beta_modes = {BetaMode::Finite};
  if (o.beta == "inf") config.beta_modes = {BetaMode::Infinite};
  if (o.seed) config.seed = *o.seed;
  if (o.filter == "hidden-possible") config.filter = TrialFilter::HiddenPossible;
  if (o.filter == "hidden-resilient") config.filter = TrialFilter::HiddenResilient;
  config.record_runtime = !o.no_timing;

  auto rows = run_sweep(config);
  if (o.out.empty() || o.out == "-") {
    out << format_results(rows);
  } else {
    write_results(rows, o.out);
  }
  return kExitOk;
}

bool usage_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::ValidationError:
    case ErrorKind::UnknownId:
    case ErrorKind::IoError:
    case ErrorKind::BadIndex:
    case ErrorKind::RankDeficient:
    case ErrorKind::DisconnectedGrid:
    case ErrorKind::TooLarge:
      return true;
    default:
      return false;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Design and verify minimum-cost data attacks on DC state estimation"};
  app.require_subcommand(1);

  auto add_costs = [&](CLI::App* sub) {
    sub->add_option("--p-i", o.p_inject, "Bad-data injection cost per measurement");
    sub->add_option("--beta", o.beta, "Inflation mode")->check(CLI::IsMember({"finite", "inf"}));
    sub->add_option("--gamma", o.gamma, "No-solution cut-weight threshold");
    sub->add_option("--seed", o.seed, "RNG seed");
  };
  auto add_case = [&](CLI::App* sub) {
    sub->add_option("--topology", o.topology, "Edge-list topology file")->required();
    sub->add_option("--scenario", o.scenario, "Scenario file")->required();
    sub->add_option("--p-j", o.p_jam, "Jamming cost per measurement");
    sub->add_option("--lambda", o.lambda, "Detection threshold");
    add_costs(sub);
  };

  auto* attack = app.add_subcommand("attack", "Print hidden, detectable and jamming plans");
  add_case(attack);
  auto* verify = app.add_subcommand("verify", "Run a designed attack through the estimator");
  add_case(verify);
  verify->add_option("--attack", o.attack, "Attack to verify")
      ->check(CLI::IsMember({"hidden", "detectable", "jamming"}));
  verify->add_option("--noise", o.noise, "Measurement noise standard deviation")
      ->check(CLI::NonNegativeNumber);
  auto* oracle = app.add_subcommand("oracle-check", "Compare the design against exhaustive search");
  add_case(oracle);

  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep over secure fractions, CSV output");
  sweep->add_option("--topology", o.topology, "Edge-list topology file")->required();
  sweep->add_option("--p-j", o.p_jams, "Jamming costs (repeatable)");
  sweep->add_option("--trials", o.trials, "Trials per secure fraction")->check(CLI::PositiveNumber);
  sweep->add_option("--out", o.out, "Output CSV path (stdout when omitted)");
  sweep->add_option("--filter", o.filter, "Trial filter")
      ->check(CLI::IsMember({"all", "hidden-possible", "hidden-resilient"}));
  sweep->add_option("--secure-fractions", o.secure_fractions, "Secure fractions to sweep");
  sweep->add_option("--phasor-fraction", o.phasor_fraction, "Fraction of buses with phasors");
  sweep->add_option("--system", o.system_name, "System name written to the CSV");
  sweep->add_flag("--no-timing", o.no_timing, "Write 0 runtimes for byte-stable output");
  sweep->add_option("--p-i", o.p_inject, "Bad-data injection cost per measurement");
  sweep->add_option("--beta", o.beta, "Inflation mode (both when omitted)")
      ->check(CLI::IsMember({"finite", "inf"}));
  sweep->add_option("--seed", o.seed, "Master seed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (attack->parsed()) return cmd_attack(o, out);
    if (verify->parsed()) return cmd_verify(o, out);
    if (oracle->parsed()) return cmd_oracle_check(o, out);
    return cmd_sweep(o, out);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return usage_error(e.kind()) ? kExitUsage : kExitInvariant;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInvariant;
  }
}

}  // namespace gridjam
