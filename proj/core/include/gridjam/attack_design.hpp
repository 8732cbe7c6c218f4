#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gridjam/attack_graph.hpp"

namespace gridjam {

enum class BetaMode { Finite, Infinite };

/// Costs and search knobs for attack design.
struct CostParams {
  double p_inject = 1.0;
  double p_jam = 0.0;
  BetaMode beta_mode = BetaMode::Finite;
  /// Finite inflation step; defaults to the secure edge weight of the regime.
  std::optional<double> beta;
  /// Cut-weight threshold for declaring no solution; defaults to p_I (m+1)
  /// for cost-weighted graphs and m+1 for unit weights.
  std::optional<double> gamma;
  std::uint64_t seed = 0;

  /// Throws ValidationError unless 0 <= p_jam <= p_inject, p_inject > 0 and
  /// beta/gamma (when given) are positive and finite.
  void validate() const;
};

/// Cheap jamming: p_J < p_I/2.  Costly jamming: p_J >= p_I/2.
enum class CostRegime { CheapJamming, CostlyJamming };

CostRegime regime_of(const CostParams& params) noexcept;

/// Jam/inject split for one feasible cut.
struct CutAttackOption {
  Cut cut;
  int k_jam = 0;
  int k_inject = 0;
  double cost = 0.0;
};

enum class AttackKind { Hidden, Detectable, DetectableJamming };

std::string_view to_string(AttackKind kind) noexcept;

struct AttackPlan {
  AttackKind kind = AttackKind::DetectableJamming;
  Cut cut;
  std::vector<int> jam;     // sorted measurement ids
  std::vector<int> inject;  // sorted measurement ids
  std::vector<int> c;       // 0/1 per node, reference entry 0
  double alpha = 0.0;       // 0 means "use the activation magnitude"
  double cost = 0.0;
};

/// Outcome of a design call.  An empty `plan` means no solution was found.
struct DesignResult {
  std::optional<AttackPlan> plan;
  int inflation_rounds = 0;
  int min_cut_calls = 0;
};

/// Cheapest jam/inject split on a feasible cut.  Throws InfeasibleCut.
CutAttackOption per_cut_optimum(const Cut& cut, const CostParams& params);

/// Injections needed on `cut` without jamming: floor(1 + |C|/2).
int detectable_injections(const Cut& cut) noexcept;

/// Edge weights that make cut weight track attack cost in each regime.
std::vector<double> regime_weights(const MeasurementGraph& graph,
                                   const CostParams& params);

/// Iterative min-cut search: recompute the global min cut, inflating a
/// random secure crossing edge by `beta` while the cut is infeasible and its
/// weight is below `gamma`.  Returns the first feasible bond found.
struct MinCutSearch {
  std::optional<Cut> cut;
  int inflation_rounds = 0;
  int min_cut_calls = 0;
};
MinCutSearch min_cut_search(MeasurementGraph weighted, double beta, double gamma,
                            std::uint64_t seed);

/// Jamming-enabled attack.  The min-cut search result is compared against
/// the nodal cuts and any caller-supplied candidate cuts; the cheapest
/// feasible option is materialized.
DesignResult design_jamming_attack(const MeasurementGraph& graph,
                                   const CostParams& params,
                                   std::span<const Cut> candidates = {});

/// Injection-only attack on a minimum-cardinality feasible cut.
DesignResult design_detectable_attack(const MeasurementGraph& graph,
                                      const CostParams& params,
                                      std::span<const Cut> candidates = {});

/// Undetectable attack: minimum cut with no secure edge, all edges injected.
DesignResult design_hidden_attack(const MeasurementGraph& graph,
                                  const CostParams& params);

/// Guaranteed cost reduction from adding jamming to a no-jam detectable
/// plan built on `plan_nojam.cut`.
double cost_gap_bound(const AttackPlan& plan_nojam, const CostParams& params);

/// First node (reference last) whose nodal cut has an insecure majority.
std::optional<Cut> nodal_witness(const MeasurementGraph& graph);

/// Builds a plan from an option: lowest insecure ids are injected, the next
/// k_jam are jammed.
AttackPlan materialize_plan(const MeasurementGraph& graph,
                            const CutAttackOption& option, AttackKind kind);

}  // namespace gridjam
