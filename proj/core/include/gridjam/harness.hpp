#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gridjam/attack_design.hpp"
#include "gridjam/case_io.hpp"

namespace gridjam {

using Rng = std::mt19937_64;

/// Independent stream seed for item `index` of a run seeded by `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Flows on every line, phasors on ceil(phasor_fraction * n) random buses,
/// ceil(secure_fraction * m) random secure measurements.  The random draws
/// do not depend on secure_fraction, so for a fixed rng state the secure
/// sets are nested as the fraction grows.
Scenario random_scenario(const Grid& grid, double phasor_fraction,
                         double secure_fraction, Rng& rng);

enum class TrialFilter { All, HiddenPossible, HiddenResilient };

struct SweepConfig {
  std::string system_name = "grid";
  Grid grid;
  double phasor_fraction = 0.6;
  std::vector<double> secure_fractions{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  int trials = 200;
  double p_inject = 1.0;
  std::vector<double> p_jams{0.0, 0.25, 0.75};
  std::vector<BetaMode> beta_modes{BetaMode::Finite, BetaMode::Infinite};
  std::uint64_t seed = 1;
  TrialFilter filter = TrialFilter::All;
  bool record_runtime = true;

  void validate() const;
};

/// One attack design outcome inside a trial.
struct AttackSample {
  std::optional<double> cost;
  int cut_size = 0;
  double runtime_ms = 0.0;
};

/// All designs evaluated on one random scenario.
struct TrialRecord {
  int trial = 0;
  double secure_fraction = 0.0;
  int measurement_count = 0;
  int secure_count = 0;
  bool nodal_witness = false;
  AttackSample hidden;
  std::vector<AttackSample> detectable;  // per beta mode
  std::vector<AttackSample> jamming;     // [beta][p_J], row-major
};

/// Runs every trial for every secure fraction (paired: one scenario feeds
/// all attack kinds).  Records are ordered by (fraction, trial).
std::vector<TrialRecord> run_trials(const SweepConfig& config);

/// Aggregates trial records into CSV rows under `config.filter`.
std::vector<ResultRow> summarize(const SweepConfig& config,
                                 const std::vector<TrialRecord>& records);

std::vector<ResultRow> run_sweep(const SweepConfig& config);

std::string to_string(BetaMode mode);
std::string to_string(TrialFilter filter);

}  // namespace gridjam
