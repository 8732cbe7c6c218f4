#include "gridjam/attack_graph.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <queue>
#include <set>

#include "disjoint_sets.hpp"
#include "gridjam/error.hpp"

namespace gridjam {

MeasurementGraph::MeasurementGraph(int node_count, int reference,
                                   std::vector<GraphEdge> edges)
    : node_count_(node_count), reference_(reference), edges_(std::move(edges)) {
  if (reference_ < 0 || reference_ >= node_count_) {
    throw Error(ErrorKind::BadIndex, "reference node out of range");
  }
  int max_id = -1;
  for (const GraphEdge& e : edges_) {
    if (e.u < 0 || e.u >= node_count_ || e.v < 0 || e.v >= node_count_ || e.u == e.v) {
      throw Error(ErrorKind::BadIndex, "edge endpoint out of range");
    }
    if (!(e.weight >= 0.0)) {
      throw Error(ErrorKind::ValidationError, "edge weights must be non-negative");
    }
    max_id = std::max(max_id, e.id);
  }
  index_of_id_.assign(static_cast<std::size_t>(max_id + 1), -1);
  for (int i = 0; i < edge_count(); ++i) {
    int& slot = index_of_id_[edges_[i].id];
    if (edges_[i].id < 0 || slot != -1) {
      throw Error(ErrorKind::BadIndex, "duplicate or negative measurement id");
    }
    slot = i;
  }
}

int MeasurementGraph::secure_count() const noexcept {
  return static_cast<int>(
      std::count_if(edges_.begin(), edges_.end(), [](const GraphEdge& e) { return e.secure; }));
}

MeasurementGraph MeasurementGraph::with_weights(std::span<const double> weights) const {
  if (static_cast<int>(weights.size()) != edge_count()) {
    throw Error(ErrorKind::DimensionMismatch, "one weight per edge expected");
  }
  std::vector<GraphEdge> edges = edges_;
  for (std::size_t i = 0; i < edges.size(); ++i) edges[i].weight = weights[i];
  return MeasurementGraph(node_count_, reference_, std::move(edges));
}

Cut make_cut(const MeasurementGraph& graph, std::span<const int> side) {
  std::vector<char> in_side(static_cast<std::size_t>(graph.node_count()), 0);
  for (int v : side) {
    if (v < 0 || v >= graph.node_count()) throw Error(ErrorKind::BadIndex, "cut node out of range");
    in_side[v] = 1;
  }
  if (in_side[graph.reference()]) {
    for (auto& flag : in_side) flag = !flag;
  }
  Cut cut;
  for (int v = 0; v < graph.node_count(); ++v) {
    if (in_side[v]) cut.side1.push_back(v);
  }
  if (cut.side1.empty()) throw Error(ErrorKind::BadIndex, "cut side is empty");
  for (const GraphEdge& e : graph.edges()) {
    if (in_side[e.u] != in_side[e.v]) {
      cut.crossing.push_back(e.id);
      (e.secure ? cut.n_secure : cut.n_insecure) += 1;
      cut.weight += e.weight;
    }
  }
  std::sort(cut.crossing.begin(), cut.crossing.end());
  return cut;
}

MeasurementGraph to_graph(const AugmentedSystem& system) {
  std::vector<double> unit(static_cast<std::size_t>(system.measurement_count()), 1.0);
  return to_graph(system, unit);
}

MeasurementGraph to_graph(const AugmentedSystem& system, std::span<const double> weights) {
  const int m = system.measurement_count();
  if (static_cast<int>(weights.size()) != m) {
    throw Error(ErrorKind::DimensionMismatch, "one weight per measurement expected");
  }
  std::vector<GraphEdge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    auto [u, v] = system.endpoints(k);
    edges.push_back({u, v, k, system.measurements()[k].secure, weights[k]});
  }
  return MeasurementGraph(system.node_count(), system.reference(), std::move(edges));
}

namespace {

bool connected(const MeasurementGraph& graph) {
  detail::DisjointSets sets(graph.node_count());
  for (const GraphEdge& e : graph.edges()) sets.unite(e.u, e.v);
  return sets.components() == 1;
}

}  // namespace

// Stoer-Wagner with adjacency maps and a lazy max-heap: each phase is
// O(E log V), so the whole search is O(V E log V).
Cut global_min_cut(const MeasurementGraph& graph) {
  const int n = graph.node_count();
  if (n < 2 || !connected(graph)) {
    throw Error(ErrorKind::Disconnected, "min cut needs a connected graph with >= 2 nodes");
  }

  std::vector<std::map<int, double>> adj(static_cast<std::size_t>(n));
  for (const GraphEdge& e : graph.edges()) {
    adj[e.u][e.v] += e.weight;
    adj[e.v][e.u] += e.weight;
  }
  std::vector<std::vector<int>> members(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) members[v] = {v};
  std::vector<char> alive(static_cast<std::size_t>(n), 1);

  double best_weight = std::numeric_limits<double>::infinity();
  std::vector<int> best_side;

  std::vector<double> key(static_cast<std::size_t>(n));
  std::vector<char> added(static_cast<std::size_t>(n));
  for (int remaining = n; remaining > 1; --remaining) {
    std::fill(key.begin(), key.end(), 0.0);
    std::fill(added.begin(), added.end(), 0);
    // Max weight first; lower node index wins ties.
    using Entry = std::pair<double, int>;
    auto cmp = [](const Entry& a, const Entry& b) {
      return a.first < b.first || (a.first == b.first && a.second > b.second);
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
    for (int v = 0; v < n; ++v) {
      if (alive[v]) heap.push({0.0, v});
    }
    int prev = -1;
    int last = -1;
    for (int step = 0; step < remaining; ++step) {
      int v = -1;
      while (!heap.empty()) {
        auto [k, u] = heap.top();
        heap.pop();
        if (!added[u] && k == key[u]) {
          v = u;
          break;
        }
      }
      added[v] = 1;
      prev = last;
      last = v;
      for (const auto& [u, w] : adj[v]) {
        if (!added[u]) {
          key[u] += w;
          heap.push({key[u], u});
        }
      }
    }
    if (key[last] < best_weight) {
      best_weight = key[last];
      best_side = members[last];
    }
    // Merge `last` into `prev`.
    for (const auto& [u, w] : adj[last]) {
      if (u == prev) continue;
      adj[prev][u] += w;
      adj[u][prev] += w;
      adj[u].erase(last);
    }
    adj[prev].erase(last);
    adj[last].clear();
    alive[last] = 0;
    members[prev].insert(members[prev].end(), members[last].begin(), members[last].end());
    members[last].clear();
  }
  return make_cut(graph, best_side);
}

bool is_feasible(const Cut& cut) noexcept {
  return cut.n_insecure > cut.n_secure;
}

Cut ContractedGraph::expand(const Cut& contracted_cut, const MeasurementGraph& original) const {
  std::vector<char> in_side(static_cast<std::size_t>(graph.node_count()), 0);
  for (int g : contracted_cut.side1) in_side[g] = 1;
  std::vector<int> side;
  for (int v = 0; v < original.node_count(); ++v) {
    if (in_side[group_of[v]]) side.push_back(v);
  }
  return make_cut(original, side);
}

ContractedGraph contract_secure(const MeasurementGraph& graph) {
  detail::DisjointSets sets(graph.node_count());
  for (const GraphEdge& e : graph.edges()) {
    if (e.secure) sets.unite(e.u, e.v);
  }
  if (sets.components() == 1) {
    throw Error(ErrorKind::AllContracted, "secure measurements span every node");
  }
  // Groups are numbered by their smallest original node.
  std::vector<int> group_of(static_cast<std::size_t>(graph.node_count()), -1);
  std::vector<int> group_of_root(static_cast<std::size_t>(graph.node_count()), -1);
  int groups = 0;
  for (int v = 0; v < graph.node_count(); ++v) {
    int root = sets.find(v);
    if (group_of_root[root] < 0) group_of_root[root] = groups++;
    group_of[v] = group_of_root[root];
  }
  std::vector<GraphEdge> edges;
  for (const GraphEdge& e : graph.edges()) {
    if (e.secure) continue;
    int gu = group_of[e.u];
    int gv = group_of[e.v];
    if (gu == gv) continue;
    edges.push_back({gu, gv, e.id, false, e.weight});
  }
  return ContractedGraph{
      MeasurementGraph(groups, group_of[graph.reference()], std::move(edges)),
      std::move(group_of)};
}

bool spans_connected(const MeasurementGraph& graph, std::span<const int> active) {
  detail::DisjointSets sets(graph.node_count());
  for (int id : active) {
    const GraphEdge& e = graph.edge(id);
    sets.unite(e.u, e.v);
  }
  return sets.components() == 1;
}

bool rank_after_attack(const MeasurementGraph& graph, std::span<const int> jammed,
                       std::span<const int> removed) {
  std::set<int> gone(jammed.begin(), jammed.end());
  gone.insert(removed.begin(), removed.end());
  detail::DisjointSets sets(graph.node_count());
  for (const GraphEdge& e : graph.edges()) {
    if (!gone.count(e.id)) sets.unite(e.u, e.v);
  }
  return sets.components() == 1;
}

namespace {

// Components of the graph restricted to nodes with `keep[v]` and edges not
// flagged in `drop`; returns component index per node (-1 for dropped nodes).
std::vector<int> components(const MeasurementGraph& graph, const std::vector<char>& keep,
                            const std::vector<char>& drop_edge) {
  detail::DisjointSets sets(graph.node_count());
  for (std::size_t i = 0; i < graph.edges().size(); ++i) {
    const GraphEdge& e = graph.edges()[i];
    if (drop_edge[i] || !keep[e.u] || !keep[e.v]) continue;
    sets.unite(e.u, e.v);
  }
  std::vector<int> label(static_cast<std::size_t>(graph.node_count()), -1);
  std::vector<int> of_root(static_cast<std::size_t>(graph.node_count()), -1);
  int next = 0;
  for (int v = 0; v < graph.node_count(); ++v) {
    if (!keep[v]) continue;
    int r = sets.find(v);
    if (of_root[r] < 0) of_root[r] = next++;
    label[v] = of_root[r];
  }
  return label;
}

}  // namespace

// For each component K of G - C, every component L of G - K is connected and
// so is its complement (K plus the other components, all adjacent to K), so
// delta(L) is a bond contained in C.  These bonds cover C twice, hence a
// feasible C always yields at least one feasible bond.
std::vector<Cut> split_into_bonds(const MeasurementGraph& graph, const Cut& cut) {
  const auto node_count = static_cast<std::size_t>(graph.node_count());
  std::set<int> crossing(cut.crossing.begin(), cut.crossing.end());
  std::vector<char> crossing_edge(graph.edges().size(), 0);
  for (std::size_t i = 0; i < graph.edges().size(); ++i) {
    crossing_edge[i] = crossing.count(graph.edges()[i].id) ? 1 : 0;
  }
  std::vector<char> all(node_count, 1);
  std::vector<int> outer = components(graph, all, crossing_edge);
  int outer_count = *std::max_element(outer.begin(), outer.end()) + 1;
  if (outer_count == 2) return {cut};

  std::vector<char> no_drop(graph.edges().size(), 0);
  std::vector<Cut> bonds;
  std::set<std::vector<int>> seen;
  for (int k = 0; k < outer_count; ++k) {
    std::vector<char> keep(node_count);
    for (std::size_t v = 0; v < node_count; ++v) keep[v] = outer[v] != k;
    std::vector<int> inner = components(graph, keep, no_drop);
    int inner_count = *std::max_element(inner.begin(), inner.end()) + 1;
    for (int l = 0; l < inner_count; ++l) {
      std::vector<int> side;
      for (std::size_t v = 0; v < node_count; ++v) {
        if (inner[v] == l) side.push_back(static_cast<int>(v));
      }
      Cut bond = make_cut(graph, side);
      if (seen.insert(bond.crossing).second) bonds.push_back(std::move(bond));
    }
  }
  return bonds;
}

Cut nodal_cut(const MeasurementGraph& graph, int node) {
  const int side[] = {node};
  return make_cut(graph, side);
}

}  // namespace gridjam
