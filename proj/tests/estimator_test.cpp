#include "doctest.h"

#include <algorithm>
#include <random>

#include "gridjam/attack_design.hpp"
#include "gridjam/error.hpp"
#include "gridjam/estimator.hpp"
#include "gridjam/oracle.hpp"
#include "test_support.hpp"

using namespace gridjam;

namespace {

Eigen::VectorXd reading(const AugmentedSystem& s, std::initializer_list<double> x) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(x.size()));
  int i = 0;
  for (double xi : x) v(i++) = xi;
  return true_measurements(s, v);
}

AugmentedSystem triangle_all_phasors() {
  Grid grid = test::triangle();
  const int phasors[] = {0, 1, 2};
  return build_system(grid, default_measurements(grid, phasors));
}

// Plain normal-equations solve, independent of the QR path.
Eigen::VectorXd normal_equations(const AugmentedSystem& s, const Eigen::VectorXd& z) {
  Eigen::MatrixXd h = s.matrix().leftCols(s.bus_count());
  Eigen::VectorXd w = s.variances().cwiseInverse();
  Eigen::MatrixXd g = h.transpose() * w.asDiagonal() * h;
  return g.ldlt().solve(h.transpose() * w.asDiagonal() * z);
}

double residual_norm(const AugmentedSystem& s, const Eigen::VectorXd& z,
                     const Eigen::VectorXd& x) {
  Eigen::VectorXd r = z - s.matrix().leftCols(s.bus_count()) * x;
  return r.cwiseQuotient(s.variances().cwiseSqrt()).norm();
}

}  // namespace

TEST_CASE("exact readings are fitted exactly") {
  AugmentedSystem s = test::canonical_system();
  Eigen::VectorXd z = reading(s, {0.3, -0.2, 0.7});
  Eigen::VectorXd x = estimate_state(s, z, all_measurements(s));
  CHECK((x - Eigen::Vector3d(0.3, -0.2, 0.7)).norm() < 1e-10);
}

TEST_CASE("column-space shifts move the estimate by c") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    AugmentedSystem s = test::random_system(rng, 2 + trial % 7, trial % 5, 2, 0.0, false);
    Eigen::VectorXd x = Eigen::VectorXd::Random(s.bus_count());
    Eigen::VectorXd c = Eigen::VectorXd::Random(s.bus_count());
    Eigen::VectorXd a = s.matrix().leftCols(s.bus_count()) * c;
    Eigen::VectorXd est = estimate_state(s, true_measurements(s, x) + a, all_measurements(s));
    CHECK((est - (x + c)).norm() < 1e-9);
  }
}

TEST_CASE("canonical noisy fit matches normal equations and a grid search") {
  AugmentedSystem s = test::canonical_system();
  Eigen::VectorXd z(4);
  z << 0.51, 0.5, 1.0, 1.0;
  auto active = all_measurements(s);
  Eigen::VectorXd x = estimate_state(s, z, active);
  Eigen::VectorXd expected = normal_equations(s, z);
  CHECK((x - expected).norm() < 1e-10);
  CHECK(std::abs(weighted_residual_norm(s, z, active, x) - residual_norm(s, z, expected)) < 1e-10);

  const double j = weighted_residual_norm(s, z, active, x);
  for (int a = -2; a <= 2; ++a) {
    for (int b = -2; b <= 2; ++b) {
      for (int c = -2; c <= 2; ++c) {
        Eigen::Vector3d probe = x + 1e-3 * Eigen::Vector3d(a, b, c);
        CHECK(j <= residual_norm(s, z, probe) + 1e-15);
      }
    }
  }
}

TEST_CASE("estimate_state errors") {
  AugmentedSystem s = test::canonical_system();
  Eigen::VectorXd z = Eigen::VectorXd::Zero(4);
  const int flows[] = {0, 1, 2};
  CHECK_THROWS_AS(estimate_state(s, z, flows), Error);
  const int bogus[] = {0, 1, 2, 3, 9};
  CHECK_THROWS_AS(estimate_state(s, z, bogus), Error);
  CHECK_THROWS_AS(estimate_state(s, Eigen::VectorXd::Zero(3), all_measurements(s)), Error);
}

TEST_CASE("normalized residuals") {
  AugmentedSystem s = triangle_all_phasors();
  auto active = all_measurements(s);
  Eigen::VectorXd clean = reading(s, {0.2, 0.1, -0.4});
  for (const auto& nr : normalized_residuals(s, clean, active, estimate_state(s, clean, active))) {
    CHECK(nr.value < 1e-9);
  }

  for (int bad = 0; bad < s.measurement_count(); ++bad) {
    Eigen::VectorXd z = clean;
    z(bad) += 5.0;
    Eigen::VectorXd x = estimate_state(s, z, active);
    auto nrs = normalized_residuals(s, z, active, x);
    for (const auto& nr : nrs) {
      if (nr.id != bad) CHECK(nr.value < nrs[bad].value * (1.0 - 1e-6));
    }
    // Exhaustive single-removal check: only dropping the corrupted reading
    // zeroes the residual.
    for (int drop = 0; drop < s.measurement_count(); ++drop) {
      std::vector<int> rest;
      for (int id : active) {
        if (id != drop) rest.push_back(id);
      }
      double j = weighted_residual_norm(s, z, rest, estimate_state(s, z, rest));
      CHECK((j < 1e-9) == (drop == bad));
    }
  }
}

TEST_CASE("critical measurements are not removable") {
  const RawLine path[] = {{1, 2, 1.0}, {2, 3, 1.0}};
  Grid grid = Grid::from_lines(path);
  const int phasors[] = {0, 2};
  AugmentedSystem s = build_system(grid, default_measurements(grid, phasors));
  // Spanning graph: ref-1-2-3-ref is a single cycle, nothing is critical.
  auto active = all_measurements(s);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(4);
  z(0) = 1.0;
  for (const auto& nr : normalized_residuals(s, z, active, estimate_state(s, z, active))) {
    CHECK(nr.removable);
  }
  const int tree[] = {0, 1, 2};
  auto nrs = normalized_residuals(s, z, tree, estimate_state(s, z, tree));
  for (const auto& nr : nrs) CHECK_FALSE(nr.removable);
}

TEST_CASE("remove_bad_data on clean readings") {
  AugmentedSystem s = test::canonical_system();
  for (double lambda : {1e-6, 0.1, 10.0}) {
    EstimationOutcome out = remove_bad_data(s, reading(s, {1.0, 0.5, 0.0}), lambda);
    CHECK(out.removed.empty());
    CHECK_FALSE(out.detected);
    CHECK(out.rounds == 0);
  }
  CHECK_THROWS_AS(remove_bad_data(s, Eigen::VectorXd::Zero(4), 0.0), Error);
}

TEST_CASE("canonical single-flow injection: tied cycle residuals resolve to lowest id") {
  AugmentedSystem s = test::canonical_system();
  Eigen::VectorXd z = Eigen::VectorXd::Zero(4);
  z(0) = 10.0;
  EstimationOutcome out = remove_bad_data(s, z, 0.1);
  REQUIRE(out.removed.size() == 1);
  CHECK(out.removed[0] == 0);
  CHECK_FALSE(out.detected);
  CHECK(out.weighted_residual_norm <= 0.1);
  // The cycle flows all share one normalized residual, so any single flow
  // is a minimal removal; the oracle picks the lexicographic first.
  CHECK(brute_force_removal(s, z, 0.1) == std::vector<int>{0});
}

TEST_CASE("a single large outlier is removed in the first round") {
  std::mt19937_64 rng(19);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    AugmentedSystem s = test::random_system(rng, 3 + trial % 4, 2 + trial % 3, 3, 0.0);
    if (s.measurement_count() > kMaxRemovalMeasurements) continue;
    Eigen::VectorXd z = true_measurements(s, Eigen::VectorXd::Random(s.bus_count()));
    MeasurementGraph g = to_graph(s);
    // Pick a measurement on a cycle that stays redundant after removal.
    int bad = -1;
    for (int id = 0; id < s.measurement_count() && bad < 0; ++id) {
      std::vector<int> rest;
      for (int k = 0; k < s.measurement_count(); ++k) {
        if (k != id) rest.push_back(k);
      }
      if (!spans_connected(g, rest)) continue;
      auto nrs = normalized_residuals(s, Eigen::VectorXd::Zero(s.measurement_count()), rest,
                                      Eigen::VectorXd::Zero(s.bus_count()));
      if (std::all_of(nrs.begin(), nrs.end(), [](const auto& r) { return r.removable; })) bad = id;
    }
    if (bad < 0) continue;
    z(bad) += 100.0;
    EstimationOutcome out = remove_bad_data(s, z, 1.0);
    REQUIRE_FALSE(out.removed.empty());
    CHECK(out.removed.front() == bad);
    CHECK(out.removed.size() == 1);
    CHECK(brute_force_removal(s, z, 1.0) == std::vector<int>{bad});
    ++checked;
  }
  CHECK(checked > 20);
}

TEST_CASE("removal invariants on random noisy systems") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int trial = 0; trial < 80; ++trial) {
    AugmentedSystem s = test::random_system(rng, 2 + trial % 6, trial % 5, 2, 0.0, false);
    Eigen::VectorXd z = true_measurements(s, Eigen::VectorXd::Random(s.bus_count()));
    for (int k = 0; k < z.size(); ++k) z(k) += noise(rng);
    const double lambda = 0.5 + (trial % 4);
    EstimationOutcome out = remove_bad_data(s, z, lambda);

    // Surviving and removed partition the measurements.
    std::vector<int> all = out.surviving;
    all.insert(all.end(), out.removed.begin(), out.removed.end());
    std::sort(all.begin(), all.end());
    CHECK(all == all_measurements(s));
    CHECK(out.rounds == static_cast<int>(out.removed.size()));
    CHECK(out.detected == (out.weighted_residual_norm > lambda));

    // Residual is orthogonal to the column space over the survivors.
    Eigen::MatrixXd h(out.surviving.size(), s.bus_count());
    for (std::size_t r = 0; r < out.surviving.size(); ++r) {
      h.row(static_cast<Eigen::Index>(r)) = s.matrix().row(out.surviving[r]).head(s.bus_count());
    }
    CHECK((h.transpose() * out.residual).norm() < 1e-8);

    // Fewer measurements never fit worse.
    auto every = all_measurements(s);
    CHECK(out.weighted_residual_norm <=
          weighted_residual_norm(s, z, every, estimate_state(s, z, every)) + 1e-12);

    // Idempotent once accepted.
    if (!out.detected) {
      EstimationOutcome again = remove_bad_data(s, z, lambda, out.surviving);
      CHECK(again.removed.empty());
      CHECK((again.estimate - out.estimate).norm() < 1e-12);
    }
  }
}

TEST_CASE("magnitude helpers") {
  AugmentedSystem s = test::canonical_system();
  CHECK(default_lambda(s) == doctest::Approx(6.0));
  CHECK(activation_magnitude(s, 0.1) == doctest::Approx(2.0));
}

TEST_CASE("simulate_attack on the canonical system") {
  AugmentedSystem s = test::canonical_system();
  MeasurementGraph g = to_graph(s);
  Eigen::VectorXd x = Eigen::Vector3d(0.05, -0.02, 0.01);
  SimulationOptions opts;
  opts.lambda = 0.1;

  CostParams params;
  DesignResult hidden = design_hidden_attack(g, params);
  REQUIRE(hidden.plan);
  AttackVerification hv = simulate_attack(s, *hidden.plan, x, opts);
  CHECK(hv.success);
  CHECK(hv.removed.empty());
  CHECK(hv.rounds == 0);

  params.p_jam = 0.75;
  DesignResult jam = design_jamming_attack(g, params);
  REQUIRE(jam.plan);
  AttackVerification jv = simulate_attack(s, *jam.plan, x, opts);
  CHECK(jv.success);
  Eigen::VectorXd expected = Eigen::VectorXd::Zero(3);
  for (int v = 0; v < 3; ++v) expected(v) = jv.alpha * jam.plan->c[v];
  CHECK((jv.estimate_shift - expected).norm() < 1e-7 * jv.alpha);
  CHECK(jv.removed == brute_force_removal(s, [&] {
          // Attacked readings with jammed rows dropped, as the detector sees them.
          Eigen::VectorXd z = true_measurements(s, x);
          Eigen::VectorXd c = Eigen::VectorXd::Zero(4);
          for (int v = 0; v < 3; ++v) c(v) = jam.plan->c[v];
          Eigen::VectorXd a = s.matrix() * c;
          for (int id : jam.plan->inject) z(id) += jv.alpha * a(id);
          return z;
        }(), 0.1, [&] {
          std::vector<int> active;
          for (int id = 0; id < 4; ++id) {
            if (!std::binary_search(jam.plan->jam.begin(), jam.plan->jam.end(), id)) {
              active.push_back(id);
            }
          }
          return active;
        }()));

  // Inject one of the two cut edges without jamming.  The three cycle flows
  // tie, so the detector drops an honest flow and the shift is wrong.
  AttackPlan weak = *jam.plan;
  weak.jam.clear();
  AttackVerification wv = simulate_attack(s, weak, x, opts);
  CHECK_FALSE(wv.success);
}

TEST_CASE("a minority injection is removed as bad data") {
  AugmentedSystem s = triangle_all_phasors();
  MeasurementGraph g = to_graph(s);
  const int side[] = {0};
  AttackPlan weak;
  weak.cut = make_cut(g, side);
  REQUIRE(weak.cut.size() == 3);
  weak.inject = {0};
  weak.c = {1, 0, 0, 0};
  SimulationOptions opts;
  opts.lambda = 0.1;
  AttackVerification v = simulate_attack(s, weak, Eigen::Vector3d(0.1, 0.0, -0.1), opts);
  CHECK_FALSE(v.success);
  CHECK(v.removed == std::vector<int>{0});
  CHECK(v.estimate_shift.norm() < 1e-9);

  Eigen::VectorXd z = true_measurements(s, Eigen::Vector3d(0.1, 0.0, -0.1));
  z(0) += v.alpha * s.matrix()(0, 0);
  CHECK(brute_force_removal(s, z, 0.1) == v.removed);
}
