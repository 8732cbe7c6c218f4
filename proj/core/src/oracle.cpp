#include "gridjam/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "disjoint_sets.hpp"
#include "gridjam/error.hpp"
#include "gridjam/estimator.hpp"

namespace gridjam {

namespace {

std::vector<int> non_reference_nodes(const MeasurementGraph& graph) {
  std::vector<int> nodes;
  for (int v = 0; v < graph.node_count(); ++v) {
    if (v != graph.reference()) nodes.push_back(v);
  }
  return nodes;
}

std::vector<int> side_of_mask(const std::vector<int>& nodes, std::uint32_t mask) {
  std::vector<int> side;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (mask & (std::uint32_t{1} << i)) side.push_back(nodes[i]);
  }
  return side;
}

struct SweepResult {
  int k_jam;
  int k_inject;
  double cost;
};

// Direct sweep on counts alone: every jam count that leaves an insecure
// majority among the surviving cut edges.
std::optional<SweepResult> sweep_counts(int size, int n_secure, int n_insecure,
                                        const CostParams& params) {
  std::optional<SweepResult> best;
  for (int k_jam = 0; k_jam <= n_insecure; ++k_jam) {
    int remaining = n_insecure - k_jam;
    if (remaining <= n_secure) break;
    int k_inject = 1 + (size - k_jam) / 2;
    if (k_inject > remaining) continue;
    double cost = params.p_jam * k_jam + params.p_inject * k_inject;
    if (!best || cost < best->cost) best = SweepResult{k_jam, k_inject, cost};
  }
  return best;
}

}  // namespace

void for_each_cut(const MeasurementGraph& graph,
                  const std::function<void(const CutSummary&)>& visit) {
  const std::vector<int> nodes = non_reference_nodes(graph);
  const int n = static_cast<int>(nodes.size());
  if (n > kMaxEnumeratedNodes) {
    throw Error(ErrorKind::TooLarge, "exhaustive cut enumeration is capped at " +
                                         std::to_string(kMaxEnumeratedNodes) + " nodes");
  }
  if (n == 0) return;

  std::vector<int> position(static_cast<std::size_t>(graph.node_count()), -1);
  for (int i = 0; i < n; ++i) position[nodes[i]] = i;
  std::vector<std::vector<int>> incident(static_cast<std::size_t>(n));
  for (std::size_t e = 0; e < graph.edges().size(); ++e) {
    const GraphEdge& edge = graph.edges()[e];
    if (position[edge.u] >= 0) incident[position[edge.u]].push_back(static_cast<int>(e));
    if (position[edge.v] >= 0) incident[position[edge.v]].push_back(static_cast<int>(e));
  }

  std::vector<char> side(static_cast<std::size_t>(graph.node_count()), 0);
  CutSummary summary;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t i = 1; i < total; ++i) {
    const int bit = std::countr_zero(i);
    const int node = nodes[bit];
    for (int e : incident[bit]) {
      const GraphEdge& edge = graph.edges()[e];
      const int sign = side[edge.u] != side[edge.v] ? -1 : 1;
      summary.size += sign;
      (edge.secure ? summary.n_secure : summary.n_insecure) += sign;
      summary.weight += sign * edge.weight;
    }
    side[node] = !side[node];
    summary.mask ^= std::uint32_t{1} << bit;
    visit(summary);
  }
}

Cut cut_from_mask(const MeasurementGraph& graph, std::uint32_t mask) {
  return make_cut(graph, side_of_mask(non_reference_nodes(graph), mask));
}

std::vector<Cut> enumerate_cuts(const MeasurementGraph& graph) {
  std::vector<Cut> cuts;
  for_each_cut(graph, [&](const CutSummary& s) { cuts.push_back(cut_from_mask(graph, s.mask)); });
  return cuts;
}

std::optional<CutAttackOption> sweep_jam_counts(const Cut& cut, const CostParams& params) {
  auto best = sweep_counts(cut.size(), cut.n_secure, cut.n_insecure, params);
  if (!best) return std::nullopt;
  return CutAttackOption{cut, best->k_jam, best->k_inject, best->cost};
}

std::optional<OracleResult> brute_force_optimal(const MeasurementGraph& graph,
                                                const CostParams& params) {
  params.validate();
  const std::vector<int> nodes = non_reference_nodes(graph);
  OracleResult result;
  std::optional<std::uint32_t> best_mask;
  int best_size = 0;
  double best_cost = 0.0;

  for_each_cut(graph, [&](const CutSummary& s) {
    if (s.n_insecure <= s.n_secure) return;
    ++result.feasible_cut_count;
    auto sweep = sweep_counts(s.size, s.n_secure, s.n_insecure, params);
    result.all_costs[s.mask] = sweep->cost;
    bool better = !best_mask || sweep->cost < best_cost ||
                  (sweep->cost == best_cost &&
                   (s.size < best_size ||
                    (s.size == best_size &&
                     side_of_mask(nodes, s.mask) < side_of_mask(nodes, *best_mask))));
    if (better) {
      best_mask = s.mask;
      best_size = s.size;
      best_cost = sweep->cost;
    }
  });
  if (!best_mask) return std::nullopt;

  result.best_cut = cut_from_mask(graph, *best_mask);
  result.best_option = *sweep_jam_counts(result.best_cut, params);
  result.best_cost = result.best_option.cost;
  return result;
}

std::optional<double> brute_force_hidden_cost(const MeasurementGraph& graph, double p_inject) {
  std::optional<int> best;
  for_each_cut(graph, [&](const CutSummary& s) {
    if (s.n_secure == 0 && (!best || s.size < *best)) best = s.size;
  });
  if (!best) return std::nullopt;
  return p_inject * *best;
}

std::optional<double> brute_force_detectable_cost(const MeasurementGraph& graph,
                                                  double p_inject) {
  std::optional<int> best;
  for_each_cut(graph, [&](const CutSummary& s) {
    if (s.n_insecure <= s.n_secure) return;
    int k = 1 + s.size / 2;
    if (!best || k < *best) best = k;
  });
  if (!best) return std::nullopt;
  return p_inject * *best;
}

namespace {

// Minimised weighted residual over `rows` via the normal equations; nullopt
// when the rows do not observe every bus.
std::optional<double> residual_after(const AugmentedSystem& system, const Eigen::VectorXd& z,
                                     const std::vector<int>& rows) {
  detail::DisjointSets sets(system.node_count());
  for (int id : rows) {
    auto [u, v] = system.endpoints(id);
    sets.unite(u, v);
  }
  if (sets.components() != 1) return std::nullopt;
  const int n = system.bus_count();
  Eigen::MatrixXd gain = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (int id : rows) {
    Eigen::VectorXd h = system.matrix().row(id).head(n).transpose();
    double w = 1.0 / system.variances()(id);
    gain += w * h * h.transpose();
    rhs += w * z(id) * h;
  }
  Eigen::VectorXd x = gain.ldlt().solve(rhs);
  double j2 = 0.0;
  for (int id : rows) {
    double r = z(id) - system.matrix().row(id).head(n).dot(x);
    j2 += r * r / system.variances()(id);
  }
  return std::sqrt(j2);
}

// Visits k-subsets of [0, n) in lexicographic order until `visit` returns true.
template <typename Visit>
bool for_each_combination(int n, int k, Visit&& visit) {
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[i] = i;
  for (;;) {
    if (visit(idx)) return true;
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return false;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

std::vector<int> brute_force_removal(const AugmentedSystem& system, const Eigen::VectorXd& z,
                                     double lambda, std::span<const int> active) {
  if (system.measurement_count() > kMaxRemovalMeasurements) {
    throw Error(ErrorKind::TooLarge, "exhaustive removal is capped at " +
                                         std::to_string(kMaxRemovalMeasurements) +
                                         " measurements");
  }
  if (z.size() != system.measurement_count()) {
    throw Error(ErrorKind::DimensionMismatch, "measurement vector length != m");
  }
  std::vector<int> pool(active.begin(), active.end());
  if (pool.empty()) pool = all_measurements(system);
  std::sort(pool.begin(), pool.end());
  const int size = static_cast<int>(pool.size());

  std::vector<int> found;
  for (int k = 0; k <= size; ++k) {
    bool hit = for_each_combination(size, k, [&](const std::vector<int>& idx) {
      std::vector<int> rows;
      std::size_t next = 0;
      for (int i = 0; i < size; ++i) {
        if (next < idx.size() && idx[next] == i) {
          ++next;
        } else {
          rows.push_back(pool[i]);
        }
      }
      auto j = residual_after(system, z, rows);
      if (!j || *j > lambda) return false;
      found.clear();
      for (int i : idx) found.push_back(pool[i]);
      return true;
    });
    if (hit) return found;
  }
  throw Error(ErrorKind::NoRemovalWorks, "no observable subset passes the detection test");
}

}  // namespace gridjam
