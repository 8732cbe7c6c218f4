#include "gridjam/attack_design.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "gridjam/error.hpp"

namespace gridjam {

void CostParams::validate() const {
  if (!(p_inject > 0.0) || !std::isfinite(p_inject)) {
    throw Error(ErrorKind::ValidationError, "p_I must be positive");
  }
  if (!(p_jam >= 0.0) || p_jam > p_inject) {
    throw Error(ErrorKind::ValidationError, "p_J must lie in [0, p_I]");
  }
  if (beta && (!(*beta > 0.0) || !std::isfinite(*beta))) {
    throw Error(ErrorKind::ValidationError, "beta must be positive and finite");
  }
  if (gamma && (!(*gamma > 0.0) || !std::isfinite(*gamma))) {
    throw Error(ErrorKind::ValidationError, "gamma must be positive and finite");
  }
}

CostRegime regime_of(const CostParams& params) noexcept {
  return params.p_jam < params.p_inject / 2.0 ? CostRegime::CheapJamming
                                              : CostRegime::CostlyJamming;
}

std::string_view to_string(AttackKind kind) noexcept {
  switch (kind) {
    case AttackKind::Hidden: return "hidden";
    case AttackKind::Detectable: return "detectable";
    case AttackKind::DetectableJamming: return "jamming";
  }
  return "unknown";
}

CutAttackOption per_cut_optimum(const Cut& cut, const CostParams& params) {
  if (!is_feasible(cut)) {
    throw Error(ErrorKind::InfeasibleCut, "cut has no insecure majority");
  }
  CutAttackOption option{cut, 0, 0, 0.0};
  if (regime_of(params) == CostRegime::CheapJamming) {
    // Cost falls with every jam: jam all but n_S + 1 insecure edges.
    option.k_jam = cut.n_insecure - cut.n_secure - 1;
    option.k_inject = cut.n_secure + 1;
  } else {
    // Only the parity of |C| - k_J matters; one jam at most.
    option.k_jam = 1 - cut.size() % 2;
    option.k_inject = (1 + cut.size()) / 2;
  }
  option.cost = params.p_jam * option.k_jam + params.p_inject * option.k_inject;
  return option;
}

int detectable_injections(const Cut& cut) noexcept {
  return 1 + cut.size() / 2;
}

std::vector<double> regime_weights(const MeasurementGraph& graph, const CostParams& params) {
  std::vector<double> weights;
  weights.reserve(static_cast<std::size_t>(graph.edge_count()));
  const bool cheap = regime_of(params) == CostRegime::CheapJamming;
  for (const GraphEdge& e : graph.edges()) {
    if (!cheap) {
      weights.push_back(1.0);
    } else {
      weights.push_back(e.secure ? params.p_inject - params.p_jam : params.p_jam);
    }
  }
  return weights;
}

namespace {

// Orders candidate cuts: weight, then cardinality, then side1.
bool lighter(const Cut& a, const Cut& b) {
  if (a.weight != b.weight) return a.weight < b.weight;
  if (a.size() != b.size()) return a.size() < b.size();
  return a.side1 < b.side1;
}

constexpr int kMaxInflationRounds = 1'000'000;

}  // namespace

MinCutSearch min_cut_search(MeasurementGraph weighted, double beta, double gamma,
                            std::uint64_t seed) {
  MinCutSearch out;
  std::mt19937_64 rng(seed);
  for (;;) {
    Cut cut = global_min_cut(weighted);
    ++out.min_cut_calls;
    if (is_feasible(cut)) {
      std::optional<Cut> best;
      for (Cut& bond : split_into_bonds(weighted, cut)) {
        if (is_feasible(bond) && (!best || lighter(bond, *best))) best = std::move(bond);
      }
      out.cut = std::move(best);
      return out;
    }
    if (cut.weight >= gamma || out.inflation_rounds >= kMaxInflationRounds) return out;

    std::vector<int> secure_ids;
    for (int id : cut.crossing) {
      if (weighted.edge(id).secure) secure_ids.push_back(id);
    }
    std::uniform_int_distribution<std::size_t> pick(0, secure_ids.size() - 1);
    int id = secure_ids[pick(rng)];
    weighted.set_weight(id, weighted.edge(id).weight + beta);
    ++out.inflation_rounds;
  }
}

namespace {

struct SearchSettings {
  std::vector<double> weights;
  double beta;
  double gamma;
};

SearchSettings settings_for(const MeasurementGraph& graph, const CostParams& params,
                            bool unit_weights) {
  params.validate();
  const bool cheap = !unit_weights && regime_of(params) == CostRegime::CheapJamming;
  SearchSettings s;
  s.weights = unit_weights ? std::vector<double>(static_cast<std::size_t>(graph.edge_count()), 1.0)
                           : regime_weights(graph, params);
  const double m_plus_1 = static_cast<double>(graph.edge_count() + 1);
  s.gamma = params.gamma ? *params.gamma : m_plus_1 * (cheap ? params.p_inject : 1.0);
  if (params.beta_mode == BetaMode::Infinite) {
    s.beta = s.gamma;
  } else {
    s.beta = params.beta ? *params.beta : (cheap ? params.p_inject - params.p_jam : 1.0);
  }
  return s;
}

CutAttackOption price(const Cut& cut, const CostParams& params, AttackKind kind) {
  if (kind == AttackKind::DetectableJamming) return per_cut_optimum(cut, params);
  int k = detectable_injections(cut);
  return {cut, 0, k, params.p_inject * k};
}

DesignResult design_with_search(const MeasurementGraph& graph, const CostParams& params,
                                AttackKind kind, std::span<const Cut> candidates) {
  SearchSettings s = settings_for(graph, params, kind == AttackKind::Detectable);
  MinCutSearch search = min_cut_search(graph.with_weights(s.weights), s.beta, s.gamma, params.seed);

  DesignResult result;
  result.inflation_rounds = search.inflation_rounds;
  result.min_cut_calls = search.min_cut_calls;

  std::optional<CutAttackOption> best;
  auto consider = [&](const Cut& cut) {
    if (!is_feasible(cut)) return;
    CutAttackOption option = price(cut, params, kind);
    if (!best) {
      best = std::move(option);
      return;
    }
    double tol = 1e-12 * std::max(1.0, std::abs(best->cost));
    if (option.cost < best->cost - tol ||
        (option.cost <= best->cost + tol && option.cut.size() < best->cut.size())) {
      best = std::move(option);
    }
  };

  if (search.cut) consider(make_cut(graph, search.cut->side1));

  std::vector<Cut> pool;
  for (int v = 0; v < graph.node_count(); ++v) pool.push_back(nodal_cut(graph, v));
  for (const Cut& c : candidates) pool.push_back(make_cut(graph, c.side1));
  std::set<std::vector<int>> seen;
  for (const Cut& c : pool) {
    if (!is_feasible(c)) continue;
    for (const Cut& bond : split_into_bonds(graph, c)) {
      if (seen.insert(bond.crossing).second) consider(bond);
    }
  }

  if (best) result.plan = materialize_plan(graph, *best, kind);
  return result;
}

}  // namespace

DesignResult design_jamming_attack(const MeasurementGraph& graph, const CostParams& params,
                                   std::span<const Cut> candidates) {
  return design_with_search(graph, params, AttackKind::DetectableJamming, candidates);
}

DesignResult design_detectable_attack(const MeasurementGraph& graph, const CostParams& params,
                                      std::span<const Cut> candidates) {
  return design_with_search(graph, params, AttackKind::Detectable, candidates);
}

DesignResult design_hidden_attack(const MeasurementGraph& graph, const CostParams& params) {
  params.validate();
  DesignResult result;
  std::optional<ContractedGraph> contracted;
  try {
    contracted.emplace(contract_secure(graph));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::AllContracted) throw;
    return result;
  }
  std::vector<double> unit(static_cast<std::size_t>(contracted->graph.edge_count()), 1.0);
  Cut small = global_min_cut(contracted->graph.with_weights(unit));
  result.min_cut_calls = 1;
  Cut cut = contracted->expand(small, graph);
  CutAttackOption option{cut, 0, cut.size(), params.p_inject * cut.size()};
  result.plan = materialize_plan(graph, option, AttackKind::Hidden);
  return result;
}

double cost_gap_bound(const AttackPlan& plan_nojam, const CostParams& params) {
  const Cut& cut = plan_nojam.cut;
  const int parity = cut.size() % 2;
  if (regime_of(params) == CostRegime::CheapJamming) {
    return (params.p_inject - 2.0 * params.p_jam) * ((cut.n_insecure - cut.n_secure) / 2) +
           params.p_jam * (1 - parity);
  }
  return parity == 0 ? params.p_inject - params.p_jam : 0.0;
}

std::optional<Cut> nodal_witness(const MeasurementGraph& graph) {
  for (int v = 0; v < graph.node_count(); ++v) {
    if (v == graph.reference()) continue;
    Cut cut = nodal_cut(graph, v);
    if (is_feasible(cut)) return cut;
  }
  Cut cut = nodal_cut(graph, graph.reference());
  if (is_feasible(cut)) return cut;
  return std::nullopt;
}

AttackPlan materialize_plan(const MeasurementGraph& graph, const CutAttackOption& option,
                            AttackKind kind) {
  AttackPlan plan;
  plan.kind = kind;
  plan.cut = option.cut;
  plan.cost = option.cost;
  std::vector<int> insecure;
  for (int id : option.cut.crossing) {
    if (!graph.edge(id).secure) insecure.push_back(id);
  }
  if (option.k_inject + option.k_jam > static_cast<int>(insecure.size())) {
    throw Error(ErrorKind::InfeasibleCut, "not enough insecure crossing edges for the plan");
  }
  plan.inject.assign(insecure.begin(), insecure.begin() + option.k_inject);
  plan.jam.assign(insecure.begin() + option.k_inject,
                  insecure.begin() + option.k_inject + option.k_jam);
  plan.c.assign(static_cast<std::size_t>(graph.node_count()), 0);
  for (int v : option.cut.side1) plan.c[v] = 1;
  return plan;
}

}  // namespace gridjam
