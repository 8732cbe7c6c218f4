#include "gridjam/grid_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "disjoint_sets.hpp"
#include "gridjam/error.hpp"

namespace gridjam {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DisconnectedGrid: return "DisconnectedGrid";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::BadIndex: return "BadIndex";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::Disconnected: return "Disconnected";
    case ErrorKind::AllContracted: return "AllContracted";
    case ErrorKind::InfeasibleCut: return "InfeasibleCut";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::NoRemovalWorks: return "NoRemovalWorks";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::UnknownId: return "UnknownId";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message, std::optional<int> line)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      line_(line) {}

Grid Grid::from_lines(std::span<const RawLine> lines, std::span<const int> bus_ids) {
  Grid grid;
  if (bus_ids.empty()) {
    for (const RawLine& l : lines) {
      grid.bus_ids_.push_back(l.from_bus);
      grid.bus_ids_.push_back(l.to_bus);
    }
    std::sort(grid.bus_ids_.begin(), grid.bus_ids_.end());
    grid.bus_ids_.erase(std::unique(grid.bus_ids_.begin(), grid.bus_ids_.end()),
                        grid.bus_ids_.end());
  } else {
    grid.bus_ids_.assign(bus_ids.begin(), bus_ids.end());
    std::sort(grid.bus_ids_.begin(), grid.bus_ids_.end());
    if (std::adjacent_find(grid.bus_ids_.begin(), grid.bus_ids_.end()) !=
        grid.bus_ids_.end()) {
      throw Error(ErrorKind::ValidationError, "duplicate bus id");
    }
  }
  if (grid.bus_ids_.empty()) {
    throw Error(ErrorKind::ValidationError, "grid has no buses");
  }

  for (const RawLine& l : lines) {
    if (l.from_bus == l.to_bus) {
      throw Error(ErrorKind::ValidationError,
                  "self-loop at bus " + std::to_string(l.from_bus));
    }
    if (!(l.susceptance > 0.0) || !std::isfinite(l.susceptance)) {
      throw Error(ErrorKind::ValidationError, "susceptance must be positive");
    }
    auto from = grid.index_of(l.from_bus);
    auto to = grid.index_of(l.to_bus);
    if (!from || !to) {
      throw Error(ErrorKind::ValidationError, "line references unknown bus");
    }
    grid.lines_.push_back({*from, *to, l.susceptance});
  }

  detail::DisjointSets sets(grid.bus_count());
  for (const Line& l : grid.lines_) sets.unite(l.from, l.to);
  if (sets.components() != 1) {
    throw Error(ErrorKind::DisconnectedGrid, "lines do not connect every bus");
  }
  return grid;
}

std::optional<int> Grid::index_of(int bus_id) const {
  auto it = std::lower_bound(bus_ids_.begin(), bus_ids_.end(), bus_id);
  if (it == bus_ids_.end() || *it != bus_id) return std::nullopt;
  return static_cast<int>(it - bus_ids_.begin());
}

double AugmentedSystem::sigma_min() const {
  return std::sqrt(variances_.minCoeff());
}

AugmentedSystem build_system(Grid grid, std::vector<Measurement> measurements,
                             std::optional<Eigen::VectorXd> variances) {
  const int n = grid.bus_count();
  const int m = static_cast<int>(measurements.size());
  AugmentedSystem system(std::move(grid));

  system.matrix_ = Eigen::MatrixXd::Zero(m, n + 1);
  system.endpoints_.resize(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    const Measurement& meas = measurements[k];
    if (meas.id != k) {
      throw Error(ErrorKind::BadIndex,
                  "measurement ids must be 0..m-1 in order (got " +
                      std::to_string(meas.id) + " at position " +
                      std::to_string(k) + ")");
    }
    if (meas.kind == MeasurementKind::Flow) {
      if (meas.target < 0 || meas.target >= system.grid_.line_count()) {
        throw Error(ErrorKind::BadIndex, "flow on unknown line");
      }
      const Line& line = system.grid_.lines()[meas.target];
      system.matrix_(k, line.from) = line.susceptance;
      system.matrix_(k, line.to) = -line.susceptance;
      system.endpoints_[k] = {line.from, line.to};
    } else {
      if (meas.target < 0 || meas.target >= n) {
        throw Error(ErrorKind::BadIndex, "phasor on unknown bus");
      }
      system.matrix_(k, meas.target) = 1.0;
      system.matrix_(k, n) = -1.0;
      system.endpoints_[k] = {meas.target, n};
    }
  }

  // Rank n of the reduced matrix <=> the measurement graph spans all n+1
  // nodes, which needs at least one phasor.
  detail::DisjointSets sets(n + 1);
  for (const auto& [u, v] : system.endpoints_) sets.unite(u, v);
  if (sets.components() != 1) {
    throw Error(ErrorKind::RankDeficient,
                "measurements do not observe every bus relative to the reference");
  }

  if (variances) {
    if (variances->size() != m) {
      throw Error(ErrorKind::DimensionMismatch, "covariance diagonal length != m");
    }
    for (double v : *variances) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw Error(ErrorKind::ValidationError, "variances must be positive");
      }
    }
    system.variances_ = std::move(*variances);
  } else {
    system.variances_ = Eigen::VectorXd::Ones(m);
  }
  system.measurements_ = std::move(measurements);
  return system;
}

Eigen::VectorXd true_measurements(const AugmentedSystem& system,
                                  const Eigen::VectorXd& x,
                                  const std::optional<Eigen::VectorXd>& noise) {
  const int n = system.bus_count();
  const int m = system.measurement_count();
  if (x.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "state length != bus count");
  }
  Eigen::VectorXd z = system.matrix().leftCols(n) * x;
  if (noise) {
    if (noise->size() != m) {
      throw Error(ErrorKind::DimensionMismatch, "noise length != m");
    }
    z += *noise;
  }
  return z;
}

std::vector<Measurement> default_measurements(const Grid& grid,
                                              std::span<const int> phasor_buses) {
  std::vector<Measurement> out;
  out.reserve(static_cast<std::size_t>(grid.line_count()) + phasor_buses.size());
  for (int l = 0; l < grid.line_count(); ++l) {
    out.push_back(Measurement::flow(static_cast<int>(out.size()), l));
  }
  for (int bus : phasor_buses) {
    out.push_back(Measurement::phasor(static_cast<int>(out.size()), bus));
  }
  return out;
}

}  // namespace gridjam
