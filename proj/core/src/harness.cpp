#include "gridjam/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "gridjam/attack_graph.hpp"
#include "gridjam/error.hpp"

namespace gridjam {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  // splitmix64 finalizer over a Weyl-sequence offset.
  std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

namespace {

int ceil_count(double fraction, int total) {
  // Tolerate representation error such as 0.1 * 30 = 3.0000000000000004.
  int k = static_cast<int>(std::ceil(fraction * total - 1e-9));
  return std::clamp(k, 0, total);
}

void check_fraction(double f, const char* what) {
  if (!(f >= 0.0 && f <= 1.0)) {
    throw Error(ErrorKind::ValidationError, std::string(what) + " must lie in [0, 1]");
  }
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

Scenario random_scenario(const Grid& grid, double phasor_fraction, double secure_fraction,
                         Rng& rng) {
  check_fraction(phasor_fraction, "phasor fraction");
  check_fraction(secure_fraction, "secure fraction");
  std::vector<int> buses(static_cast<std::size_t>(grid.bus_count()));
  std::iota(buses.begin(), buses.end(), 0);
  std::shuffle(buses.begin(), buses.end(), rng);
  buses.resize(static_cast<std::size_t>(ceil_count(phasor_fraction, grid.bus_count())));
  std::sort(buses.begin(), buses.end());

  Scenario scenario;
  scenario.measurements = default_measurements(grid, buses);
  const int m = static_cast<int>(scenario.measurements.size());
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (int i = 0; i < ceil_count(secure_fraction, m); ++i) {
    scenario.measurements[order[i]].secure = true;
  }
  return scenario;
}

void SweepConfig::validate() const {
  check_fraction(phasor_fraction, "phasor fraction");
  for (double f : secure_fractions) check_fraction(f, "secure fraction");
  if (trials < 1) throw Error(ErrorKind::ValidationError, "trials must be >= 1");
  if (beta_modes.empty()) throw Error(ErrorKind::ValidationError, "at least one beta mode");
  for (double p : p_jams) {
    CostParams params;
    params.p_inject = p_inject;
    params.p_jam = p;
    params.validate();
  }
  if (grid.bus_count() == 0) throw Error(ErrorKind::ValidationError, "sweep needs a grid");
}

std::vector<TrialRecord> run_trials(const SweepConfig& config) {
  config.validate();
  std::vector<TrialRecord> records;
  const auto timed = [&](auto&& design) {
    auto start = std::chrono::steady_clock::now();
    DesignResult result = design();
    AttackSample sample;
    sample.runtime_ms = config.record_runtime ? elapsed_ms(start) : 0.0;
    if (result.plan) {
      sample.cost = result.plan->cost;
      sample.cut_size = result.plan->cut.size();
    }
    return std::make_pair(sample, std::move(result.plan));
  };

  for (double fraction : config.secure_fractions) {
    for (int t = 0; t < config.trials; ++t) {
      const std::uint64_t trial_seed = derive_seed(config.seed, static_cast<std::uint64_t>(t));
      Rng rng(trial_seed);
      Scenario scenario = random_scenario(config.grid, config.phasor_fraction, fraction, rng);
      AugmentedSystem system = build_system(config.grid, scenario.measurements);
      MeasurementGraph graph = to_graph(system);

      TrialRecord record;
      record.trial = t;
      record.secure_fraction = fraction;
      record.measurement_count = system.measurement_count();
      record.secure_count = graph.secure_count();
      record.nodal_witness = nodal_witness(graph).has_value();

      CostParams base;
      base.p_inject = config.p_inject;
      base.seed = derive_seed(trial_seed, 1);
      auto [hidden, hidden_plan] = timed([&] { return design_hidden_attack(graph, base); });
      record.hidden = hidden;

      for (BetaMode beta : config.beta_modes) {
        CostParams det_params = base;
        det_params.beta_mode = beta;
        auto [det, det_plan] = timed([&] { return design_detectable_attack(graph, det_params); });
        record.detectable.push_back(det);

        // The baseline cuts are themselves feasible jamming cuts.
        std::vector<Cut> candidates;
        if (det_plan) candidates.push_back(det_plan->cut);
        if (hidden_plan) candidates.push_back(hidden_plan->cut);
        for (double p_jam : config.p_jams) {
          CostParams jam_params = det_params;
          jam_params.p_jam = p_jam;
          auto [jam, jam_plan] =
              timed([&] { return design_jamming_attack(graph, jam_params, candidates); });
          record.jamming.push_back(jam);
        }
      }
      records.push_back(std::move(record));
    }
  }
  return records;
}

std::vector<ResultRow> summarize(const SweepConfig& config,
                                 const std::vector<TrialRecord>& records) {
  std::vector<ResultRow> rows;
  for (double fraction : config.secure_fractions) {
    std::vector<const TrialRecord*> included;
    for (const TrialRecord& r : records) {
      if (r.secure_fraction != fraction) continue;
      bool hidden = r.hidden.cost.has_value();
      if (config.filter == TrialFilter::HiddenPossible && !hidden) continue;
      if (config.filter == TrialFilter::HiddenResilient && hidden) continue;
      included.push_back(&r);
    }

    auto row_for = [&](std::string attack, std::optional<double> p_jam, std::string beta,
                       auto&& sample_of) {
      ResultRow row;
      row.system = config.system_name;
      row.secure_fraction = fraction;
      row.attack = std::move(attack);
      row.p_jam = p_jam;
      row.beta = std::move(beta);
      row.trials = static_cast<int>(included.size());
      double cost_sum = 0.0;
      double runtime_sum = 0.0;
      int feasible = 0;
      for (const TrialRecord* r : included) {
        const AttackSample& s = sample_of(*r);
        runtime_sum += s.runtime_ms;
        if (s.cost) {
          ++feasible;
          cost_sum += *s.cost;
        }
      }
      if (!included.empty()) {
        row.feasible_fraction = static_cast<double>(feasible) / static_cast<double>(included.size());
        row.mean_runtime_ms = runtime_sum / static_cast<double>(included.size());
      }
      if (feasible > 0) row.mean_cost = cost_sum / feasible;
      rows.push_back(std::move(row));
    };

    row_for("hidden", std::nullopt, "NA", [](const TrialRecord& r) -> const AttackSample& {
      return r.hidden;
    });
    const std::size_t n_jam = config.p_jams.size();
    for (std::size_t b = 0; b < config.beta_modes.size(); ++b) {
      const std::string beta = to_string(config.beta_modes[b]);
      row_for("detectable", std::nullopt, beta,
              [b](const TrialRecord& r) -> const AttackSample& { return r.detectable[b]; });
      for (std::size_t j = 0; j < n_jam; ++j) {
        row_for("jamming", config.p_jams[j], beta,
                [b, j, n_jam](const TrialRecord& r) -> const AttackSample& {
                  return r.jamming[b * n_jam + j];
                });
      }
    }
  }
  return rows;
}

std::vector<ResultRow> run_sweep(const SweepConfig& config) {
  return summarize(config, run_trials(config));
}

std::string to_string(BetaMode mode) {
  return mode == BetaMode::Finite ? "finite" : "inf";
}

std::string to_string(TrialFilter filter) {
  switch (filter) {
    case TrialFilter::All: return "all";
    case TrialFilter::HiddenPossible: return "hidden-possible";
    case TrialFilter::HiddenResilient: return "hidden-resilient";
  }
  return "all";
}

}  // namespace gridjam
