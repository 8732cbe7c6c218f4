#pragma once

#include <span>
#include <vector>

#include "gridjam/grid_model.hpp"

namespace gridjam {

struct GraphEdge {
  int u = 0;
  int v = 0;
  int id = 0;  // measurement id
  bool secure = false;
  double weight = 1.0;
};

/// Measurement multigraph: one node per bus plus the reference node (the
/// last index), one edge per measurement.  Parallel edges are kept.
class MeasurementGraph {
 public:
  MeasurementGraph(int node_count, int reference, std::vector<GraphEdge> edges);

  int node_count() const noexcept { return node_count_; }
  int reference() const noexcept { return reference_; }
  int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
  const std::vector<GraphEdge>& edges() const noexcept { return edges_; }
  /// Edge with the given measurement id.
  const GraphEdge& edge(int id) const { return edges_[index_of_id_[id]]; }
  int secure_count() const noexcept;

  /// Copy with the weights replaced (indexed by edge position).
  MeasurementGraph with_weights(std::span<const double> weights) const;
  void set_weight(int id, double weight) { edges_[index_of_id_[id]].weight = weight; }

 private:
  int node_count_;
  int reference_;
  std::vector<GraphEdge> edges_;
  std::vector<int> index_of_id_;
};

/// Node bipartition.  `side1` never contains the reference and is non-empty.
struct Cut {
  std::vector<int> side1;     // sorted node indices
  std::vector<int> crossing;  // sorted measurement ids
  int n_secure = 0;
  int n_insecure = 0;
  double weight = 0.0;

  int size() const noexcept { return static_cast<int>(crossing.size()); }
};

/// Cut induced by a node set; if `side` contains the reference it is
/// complemented first.  Throws BadIndex for an empty/complete side.
Cut make_cut(const MeasurementGraph& graph, std::span<const int> side);

MeasurementGraph to_graph(const AugmentedSystem& system);
MeasurementGraph to_graph(const AugmentedSystem& system,
                          std::span<const double> weights);

/// Stoer-Wagner global minimum cut.  Throws Disconnected (also for graphs
/// with fewer than two nodes).
Cut global_min_cut(const MeasurementGraph& graph);

/// Strict majority of insecure crossing edges.
bool is_feasible(const Cut& cut) noexcept;

/// Result of merging every secure edge.  `group_of[v]` maps an original node
/// to its contracted node.
struct ContractedGraph {
  MeasurementGraph graph;
  std::vector<int> group_of;

  /// Lifts a cut of the contracted graph to the original graph.
  Cut expand(const Cut& contracted_cut, const MeasurementGraph& original) const;
};

/// Throws AllContracted when the secure edges span every node.
ContractedGraph contract_secure(const MeasurementGraph& graph);

/// True iff the graph minus the jammed and removed measurements is still
/// connected, i.e. the surviving incidence matrix keeps rank n.
bool rank_after_attack(const MeasurementGraph& graph, std::span<const int> jammed,
                       std::span<const int> removed);

/// Connectivity of the subgraph using only `active` measurement ids.
bool spans_connected(const MeasurementGraph& graph, std::span<const int> active);

/// Splits a cut into bonds (cuts whose two sides are both connected).  Every
/// returned bond crosses a subset of `cut.crossing`; if `cut` is feasible at
/// least one returned bond is feasible.
std::vector<Cut> split_into_bonds(const MeasurementGraph& graph, const Cut& cut);

/// The cut isolating `node`.  For the reference this is the cut whose side1
/// is every bus.
Cut nodal_cut(const MeasurementGraph& graph, int node);

}  // namespace gridjam
