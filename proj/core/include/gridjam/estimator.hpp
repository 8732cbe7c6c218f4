#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gridjam/grid_model.hpp"

namespace gridjam {

struct AttackPlan;

/// Result of estimation followed by greedy bad-data removal.
struct EstimationOutcome {
  Eigen::VectorXd estimate;  // length n, reference excluded
  Eigen::VectorXd residual;  // over `surviving`, same order
  double weighted_residual_norm = 0.0;
  bool detected = false;
  std::vector<int> removed;    // in removal order
  std::vector<int> surviving;  // sorted
  int rounds = 0;
};

struct NormalizedResidual {
  int id = 0;
  double value = 0.0;
  bool removable = true;  // false for critical measurements
};

/// Floor on residual variance when normalizing.
inline constexpr double kResidualVarianceFloor = 1e-12;
/// Relative gap below which two normalized residuals count as tied.
inline constexpr double kResidualTieTolerance = 1e-9;

std::vector<int> all_measurements(const AugmentedSystem& system);

/// Weighted least-squares state over the `active` measurement ids.  Throws
/// RankDeficient if they do not observe every bus, BadIndex for unknown ids,
/// DimensionMismatch for a wrong-length z.
Eigen::VectorXd estimate_state(const AugmentedSystem& system,
                               const Eigen::VectorXd& z,
                               std::span<const int> active);

/// ||Sigma^{-1/2}(z - Hx)|| over the active rows.
double weighted_residual_norm(const AugmentedSystem& system,
                              const Eigen::VectorXd& z,
                              std::span<const int> active,
                              const Eigen::VectorXd& estimate);

/// |r_i| / sqrt(max(R_r(i,i), floor)) for each active id (same order as
/// `active`).  Measurements whose removal would break observability are
/// flagged non-removable.
std::vector<NormalizedResidual> normalized_residuals(
    const AugmentedSystem& system, const Eigen::VectorXd& z,
    std::span<const int> active, const Eigen::VectorXd& estimate);

/// Greedy largest-normalized-residual removal until J <= lambda, starting
/// from `active` (all measurements when empty).
EstimationOutcome remove_bad_data(const AugmentedSystem& system,
                                  const Eigen::VectorXd& z, double lambda,
                                  std::span<const int> active = {});

/// Default detection threshold 3 sqrt(m).
double default_lambda(const AugmentedSystem& system);

/// Injection magnitude large enough that any uncompensated inconsistency
/// trips the detector: 10 lambda max(1, sqrt(m)) / sigma_min.
double activation_magnitude(const AugmentedSystem& system, double lambda);

struct AttackVerification {
  bool success = false;
  Eigen::VectorXd estimate_shift;
  std::vector<int> removed;
  int rounds = 0;
  bool detected = false;
  double alpha = 0.0;
};

struct SimulationOptions {
  double lambda = 0.0;
  std::optional<Eigen::VectorXd> noise;
  /// Overrides `plan.alpha` and the activation magnitude.
  std::optional<double> alpha;
  /// Expected noise magnitude; the shift tolerance is 10x this.
  double noise_scale = 0.0;
};

/// Applies `plan` to clean readings of `x_true`, drops jammed measurements,
/// runs bad-data removal and checks that the estimate moved by alpha*c
/// while only honest cut measurements were discarded.
AttackVerification simulate_attack(const AugmentedSystem& system,
                                   const AttackPlan& plan,
                                   const Eigen::VectorXd& x_true,
                                   const SimulationOptions& options);

}  // namespace gridjam
