#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace gridjam {

/// A transmission line between two dense (0-based) bus indices.
struct Line {
  int from = 0;
  int to = 0;
  double susceptance = 1.0;
};

/// Line as read from a file: endpoints are external bus ids.
struct RawLine {
  int from_bus = 0;
  int to_bus = 0;
  double susceptance = 1.0;
};

/// Buses and lines of a DC grid.  External bus ids are remapped to dense
/// indices 0..n-1 in ascending id order; `bus_ids()[i]` recovers the id.
class Grid {
 public:
  /// Validates and builds a grid.  When `bus_ids` is empty the bus set is the
  /// set of line endpoints.  Throws ValidationError (duplicate bus id,
  /// self-loop, non-positive susceptance, unknown endpoint) or
  /// DisconnectedGrid.
  static Grid from_lines(std::span<const RawLine> lines,
                         std::span<const int> bus_ids = {});

  int bus_count() const noexcept { return static_cast<int>(bus_ids_.size()); }
  int line_count() const noexcept { return static_cast<int>(lines_.size()); }
  const std::vector<int>& bus_ids() const noexcept { return bus_ids_; }
  const std::vector<Line>& lines() const noexcept { return lines_; }

  /// Dense index of an external bus id, or nullopt.
  std::optional<int> index_of(int bus_id) const;

 private:
  std::vector<int> bus_ids_;
  std::vector<Line> lines_;
};

enum class MeasurementKind { Flow, Phasor };

/// One meter reading.  `target` is a line index for flows (oriented
/// from -> to) and a dense bus index for phasors.
struct Measurement {
  int id = 0;
  MeasurementKind kind = MeasurementKind::Flow;
  int target = 0;
  bool secure = false;

  static Measurement flow(int id, int line, bool secure = false) {
    return {id, MeasurementKind::Flow, line, secure};
  }
  static Measurement phasor(int id, int bus, bool secure = false) {
    return {id, MeasurementKind::Phasor, bus, secure};
  }
};

/// Grid + measurements + the m x (n+1) measurement matrix whose last column
/// belongs to the reference node.  Every row is a flow between two nodes:
/// phasor rows carry +1 at the bus and -1 at the reference.
class AugmentedSystem {
 public:
  const Grid& grid() const noexcept { return grid_; }
  const std::vector<Measurement>& measurements() const noexcept {
    return measurements_;
  }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  /// Diagonal of the noise covariance.
  const Eigen::VectorXd& variances() const noexcept { return variances_; }

  int bus_count() const noexcept { return grid_.bus_count(); }
  int measurement_count() const noexcept {
    return static_cast<int>(measurements_.size());
  }
  int reference() const noexcept { return grid_.bus_count(); }
  int node_count() const noexcept { return grid_.bus_count() + 1; }

  /// The two node indices touched by a row, positive entry first.
  std::pair<int, int> endpoints(int measurement_id) const {
    return endpoints_[static_cast<std::size_t>(measurement_id)];
  }
  /// Smallest noise standard deviation.
  double sigma_min() const;

 private:
  friend AugmentedSystem build_system(Grid, std::vector<Measurement>,
                                      std::optional<Eigen::VectorXd>);
  AugmentedSystem(Grid grid) : grid_(std::move(grid)) {}

  Grid grid_;
  std::vector<Measurement> measurements_;
  std::vector<std::pair<int, int>> endpoints_;
  Eigen::MatrixXd matrix_;
  Eigen::VectorXd variances_;
};

/// Builds the augmented DC measurement matrix.  `variances` defaults to all
/// ones (identity covariance).  Throws BadIndex for ids/targets out of
/// range, RankDeficient when the measurements do not observe every bus
/// (including the phasor-free case), ValidationError for non-positive
/// variances.
AugmentedSystem build_system(Grid grid, std::vector<Measurement> measurements,
                             std::optional<Eigen::VectorXd> variances =
                                 std::nullopt);

/// z = H [x; 0] + noise.  Throws DimensionMismatch.
Eigen::VectorXd true_measurements(
    const AugmentedSystem& system, const Eigen::VectorXd& x,
    const std::optional<Eigen::VectorXd>& noise = std::nullopt);

/// Flows on every line followed by phasors on the listed dense bus indices.
std::vector<Measurement> default_measurements(const Grid& grid,
                                              std::span<const int> phasor_buses);

}  // namespace gridjam
