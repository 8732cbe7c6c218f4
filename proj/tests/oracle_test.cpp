#include "doctest.h"

#include <random>
#include <set>

#include "gridjam/error.hpp"
#include "gridjam/oracle.hpp"
#include "test_support.hpp"

using namespace gridjam;

namespace {

CostParams costs(double p_jam) {
  CostParams p;
  p.p_jam = p_jam;
  return p;
}

MeasurementGraph path_graph(int buses) {
  std::vector<GraphEdge> edges;
  for (int v = 0; v < buses; ++v) edges.push_back({v, v + 1, v, false, 1.0});
  return MeasurementGraph(buses + 1, buses, edges);
}

}  // namespace

TEST_CASE("cut enumeration counts") {
  CHECK(enumerate_cuts(test::canonical_graph()).size() == 7);
  CHECK(enumerate_cuts(path_graph(1)).size() == 1);
  CHECK_THROWS_AS(enumerate_cuts(path_graph(23)), Error);
  try {
    for_each_cut(path_graph(23), [](const CutSummary&) {});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TooLarge);
  }
}

TEST_CASE("gray-code summaries match recomputed cuts") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    MeasurementGraph g = test::random_graph(rng, 1 + trial % 7, 3 + trial % 8, 0.4);
    std::set<std::uint32_t> seen;
    for_each_cut(g, [&](const CutSummary& s) {
      seen.insert(s.mask);
      Cut c = cut_from_mask(g, s.mask);
      CHECK(c.size() == s.size);
      CHECK(c.n_secure == s.n_secure);
      CHECK(c.n_insecure == s.n_insecure);
      CHECK(c.weight == doctest::Approx(s.weight));
      Cut again = make_cut(g, c.side1);
      CHECK(again.crossing == c.crossing);
    });
    CHECK(seen.size() == (std::size_t{1} << (g.node_count() - 1)) - 1);
  }
}

TEST_CASE("canonical oracle") {
  auto r = brute_force_optimal(test::canonical_graph(), costs(0.25));
  REQUIRE(r);
  CHECK(r->best_cost == 1.25);
  CHECK(r->feasible_cut_count == 6);
  CHECK(r->all_costs.size() == 6);
  CHECK(r->best_option.k_jam == 1);
  CHECK(r->best_cut.side1 == std::vector<int>{1});

  CHECK(brute_force_optimal(test::canonical_graph(), costs(0.0))->best_cost == 1.0);
  CHECK(brute_force_optimal(test::canonical_graph(), costs(0.75))->best_cost == 1.75);
  CHECK(*brute_force_hidden_cost(test::canonical_graph(), 1.0) == 2.0);
  CHECK(*brute_force_detectable_cost(test::canonical_graph(), 1.0) == 2.0);
}

TEST_CASE("jamming at full price matches the no-jam optimum") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    MeasurementGraph g = test::random_graph(rng, 1 + trial % 8, 2 + trial % 10, 0.3);
    auto r = brute_force_optimal(g, costs(1.0));
    auto det = brute_force_detectable_cost(g, 1.0);
    CHECK(r.has_value() == det.has_value());
    if (r) CHECK(r->best_cost == doctest::Approx(*det));
  }
}

TEST_CASE("all-secure graph has no solution") {
  MeasurementGraph g = test::canonical_graph();
  std::vector<GraphEdge> edges = g.edges();
  for (auto& e : edges) e.secure = true;
  MeasurementGraph sealed(g.node_count(), g.reference(), edges);
  CHECK_FALSE(brute_force_optimal(sealed, costs(0.25)));
  CHECK_FALSE(brute_force_hidden_cost(sealed, 1.0));
  CHECK_FALSE(brute_force_detectable_cost(sealed, 1.0));
}

TEST_CASE("sweep_jam_counts rejects infeasible cuts") {
  Cut c;
  c.n_secure = 2;
  c.n_insecure = 2;
  CHECK_FALSE(sweep_jam_counts(c, costs(0.25)));
}

TEST_CASE("brute-force removal") {
  AugmentedSystem s = test::canonical_system();
  Eigen::VectorXd clean = true_measurements(s, Eigen::Vector3d(0.1, 0.2, 0.3));
  CHECK(brute_force_removal(s, clean, 0.1).empty());

  Grid grid = test::triangle();
  const int phasors[] = {0, 1, 2};
  AugmentedSystem rich = build_system(grid, default_measurements(grid, phasors));
  Eigen::VectorXd z = Eigen::VectorXd::Zero(6);
  z(4) = 50.0;
  CHECK(brute_force_removal(rich, z, 0.1) == std::vector<int>{4});

  // Two colluding readings outvote nothing: both go.
  z.setZero();
  z(0) = 5.0;
  z(5) = -5.0;
  CHECK(brute_force_removal(rich, z, 0.1) == std::vector<int>{0, 5});

  // Looks like a lone phasor spike, but x = (1, 1, 1) explains it exactly.
  Eigen::VectorXd only_phasor = Eigen::VectorXd::Zero(4);
  only_phasor(3) = 1.0;
  CHECK(brute_force_removal(s, only_phasor, 0.1).empty());

  std::mt19937_64 rng(1);
  AugmentedSystem big = test::random_system(rng, 12, 8, 3, 0.0);
  REQUIRE(big.measurement_count() > kMaxRemovalMeasurements);
  CHECK_THROWS_AS(brute_force_removal(big, Eigen::VectorXd::Zero(big.measurement_count()), 0.1),
                  Error);
}
