#include "doctest.h"

#include "gridjam/error.hpp"
#include "gridjam/grid_model.hpp"
#include "test_support.hpp"

using namespace gridjam;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected gridjam::Error");
  return ErrorKind::IoError;
}

}  // namespace

TEST_CASE("canonical three-bus matrix") {
  AugmentedSystem s = test::canonical_system();
  Eigen::MatrixXd expected(4, 4);
  expected << 1, -1, 0, 0,
              0, 1, -1, 0,
              1, 0, -1, 0,
              1, 0, 0, -1;
  CHECK(s.matrix() == expected);
  CHECK(s.reference() == 3);
  CHECK(s.variances() == Eigen::VectorXd::Ones(4));
}

TEST_CASE("single bus with one phasor") {
  const int ids[] = {7};
  Grid grid = Grid::from_lines({}, ids);
  const int phasors[] = {0};
  AugmentedSystem s = build_system(grid, default_measurements(grid, phasors));
  Eigen::MatrixXd expected(1, 2);
  expected << 1, -1;
  CHECK(s.matrix() == expected);
}

TEST_CASE("flow-only configuration is rank deficient") {
  Grid grid = test::triangle();
  CHECK(kind_of([&] { build_system(grid, default_measurements(grid, {})); }) ==
        ErrorKind::RankDeficient);
}

TEST_CASE("grid validation") {
  const RawLine loop[] = {{1, 1, 1.0}};
  CHECK(kind_of([&] { Grid::from_lines(loop); }) == ErrorKind::ValidationError);
  const RawLine negative[] = {{1, 2, -1.0}};
  CHECK(kind_of([&] { Grid::from_lines(negative); }) == ErrorKind::ValidationError);
  const RawLine split[] = {{1, 2, 1.0}, {3, 4, 1.0}};
  CHECK(kind_of([&] { Grid::from_lines(split); }) == ErrorKind::DisconnectedGrid);
  const RawLine one[] = {{1, 2, 1.0}};
  const int dup[] = {1, 2, 2};
  CHECK(kind_of([&] { Grid::from_lines(one, dup); }) == ErrorKind::ValidationError);
  const int missing[] = {1, 3};
  CHECK(kind_of([&] { Grid::from_lines(one, missing); }) == ErrorKind::ValidationError);
}

TEST_CASE("external ids are remapped densely") {
  const RawLine lines[] = {{10, 30, 2.0}, {30, 20, 1.0}};
  Grid grid = Grid::from_lines(lines);
  CHECK(grid.bus_ids() == std::vector<int>{10, 20, 30});
  CHECK(grid.index_of(30) == 2);
  CHECK_FALSE(grid.index_of(40).has_value());
  CHECK(grid.lines()[0].from == 0);
  CHECK(grid.lines()[0].to == 2);
}

TEST_CASE("bad measurement indices") {
  Grid grid = test::triangle();
  std::vector<Measurement> bad_line{Measurement::flow(0, 5), Measurement::phasor(1, 0)};
  CHECK(kind_of([&] { build_system(grid, bad_line); }) == ErrorKind::BadIndex);
  std::vector<Measurement> gap{Measurement::flow(0, 0), Measurement::phasor(2, 0)};
  CHECK(kind_of([&] { build_system(grid, gap); }) == ErrorKind::BadIndex);
  Eigen::VectorXd zero_var = Eigen::VectorXd::Zero(4);
  const int phasors[] = {0};
  CHECK(kind_of([&] { build_system(grid, default_measurements(grid, phasors), zero_var); }) ==
        ErrorKind::ValidationError);
}

TEST_CASE("true measurements") {
  AugmentedSystem s = test::canonical_system();
  CHECK(true_measurements(s, Eigen::VectorXd::Zero(3)).isZero());

  Eigen::VectorXd x(3);
  x << 1.0, 0.5, 0.0;
  Eigen::VectorXd expected(4);
  expected << 0.5, 0.5, 1.0, 1.0;
  CHECK(true_measurements(s, x).isApprox(expected));

  Eigen::VectorXd cancel = -(s.matrix().leftCols(3) * x);
  CHECK(true_measurements(s, x, cancel).isZero());

  CHECK(kind_of([&] { true_measurements(s, Eigen::VectorXd::Zero(2)); }) ==
        ErrorKind::DimensionMismatch);
  CHECK(kind_of([&] { true_measurements(s, x, Eigen::VectorXd::Zero(3)); }) ==
        ErrorKind::DimensionMismatch);
}

TEST_CASE("row structure properties on random systems") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    AugmentedSystem s = test::random_system(rng, 2 + trial % 6, trial % 4, 1 + trial % 3, 0.3,
                                            /*unit=*/false);
    const Eigen::MatrixXd& h = s.matrix();
    for (int k = 0; k < h.rows(); ++k) {
      int nonzeros = 0;
      for (int c = 0; c < h.cols(); ++c) nonzeros += h(k, c) != 0.0;
      CHECK(nonzeros == 2);
      CHECK(std::abs(h.row(k).sum()) < 1e-12);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(h.leftCols(s.bus_count()));
    CHECK(lu.rank() == s.bus_count());
  }
}
