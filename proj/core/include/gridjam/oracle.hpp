#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gridjam/attack_design.hpp"
#include "gridjam/grid_model.hpp"

namespace gridjam {

/// Exhaustive search is capped at this many non-reference nodes.
inline constexpr int kMaxEnumeratedNodes = 22;
/// brute_force_removal is capped at this many measurements.
inline constexpr int kMaxRemovalMeasurements = 20;

/// Counts for one enumerated cut.  Bit i of `mask` marks the i-th
/// non-reference node (in index order) as side1.
struct CutSummary {
  std::uint32_t mask = 0;
  int size = 0;
  int n_secure = 0;
  int n_insecure = 0;
  double weight = 0.0;
};

/// Visits all 2^n - 1 cuts in Gray-code order.  Throws TooLarge.
void for_each_cut(const MeasurementGraph& graph,
                  const std::function<void(const CutSummary&)>& visit);

/// Materializes every cut.  Throws TooLarge.
std::vector<Cut> enumerate_cuts(const MeasurementGraph& graph);

/// Cut described by a summary mask.
Cut cut_from_mask(const MeasurementGraph& graph, std::uint32_t mask);

struct OracleResult {
  Cut best_cut;
  CutAttackOption best_option;
  double best_cost = 0.0;
  int feasible_cut_count = 0;
  std::map<std::uint32_t, double> all_costs;  // keyed by CutSummary::mask
};

/// True optimum of the jamming attack by enumerating every cut and every
/// admissible jam count.  Empty when no feasible cut exists.
std::optional<OracleResult> brute_force_optimal(const MeasurementGraph& graph,
                                                const CostParams& params);

/// Cheapest cost over admissible jam counts for one cut, by direct sweep.
/// Empty for infeasible counts.
std::optional<CutAttackOption> sweep_jam_counts(const Cut& cut,
                                                const CostParams& params);

/// p_I * min |C| over cuts with no secure edge.
std::optional<double> brute_force_hidden_cost(const MeasurementGraph& graph,
                                              double p_inject);
/// p_I * min floor(1 + |C|/2) over feasible cuts.
std::optional<double> brute_force_detectable_cost(const MeasurementGraph& graph,
                                                  double p_inject);

/// Smallest measurement subset (lexicographic among equal sizes) whose
/// removal from `active` gives J <= lambda while every bus stays observed.
/// Throws TooLarge (m > 20) or NoRemovalWorks.
std::vector<int> brute_force_removal(const AugmentedSystem& system,
                                     const Eigen::VectorXd& z, double lambda,
                                     std::span<const int> active = {});

}  // namespace gridjam
