#include "gridjam/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "disjoint_sets.hpp"
#include "gridjam/attack_design.hpp"
#include "gridjam/error.hpp"

namespace gridjam {

namespace {

void check_inputs(const AugmentedSystem& system, const Eigen::VectorXd& z,
                  std::span<const int> active) {
  if (z.size() != system.measurement_count()) {
    throw Error(ErrorKind::DimensionMismatch, "measurement vector length != m");
  }
  for (int id : active) {
    if (id < 0 || id >= system.measurement_count()) {
      throw Error(ErrorKind::BadIndex, "unknown measurement id " + std::to_string(id));
    }
  }
}

bool observes_all(const AugmentedSystem& system, std::span<const int> active, int skip = -1) {
  detail::DisjointSets sets(system.node_count());
  for (int id : active) {
    if (id == skip) continue;
    auto [u, v] = system.endpoints(id);
    sets.unite(u, v);
  }
  return sets.components() == 1;
}

struct ActiveRows {
  Eigen::MatrixXd h;     // k x n
  Eigen::VectorXd z;     // k
  Eigen::VectorXd var;   // k
};

ActiveRows gather(const AugmentedSystem& system, const Eigen::VectorXd& z,
                  std::span<const int> active) {
  const int n = system.bus_count();
  const auto k = static_cast<Eigen::Index>(active.size());
  ActiveRows rows{Eigen::MatrixXd(k, n), Eigen::VectorXd(k), Eigen::VectorXd(k)};
  for (Eigen::Index i = 0; i < k; ++i) {
    int id = active[static_cast<std::size_t>(i)];
    rows.h.row(i) = system.matrix().row(id).head(n);
    rows.z(i) = z(id);
    rows.var(i) = system.variances()(id);
  }
  return rows;
}

std::vector<int> sorted_ids(std::span<const int> ids) {
  std::vector<int> out(ids.begin(), ids.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<int> all_measurements(const AugmentedSystem& system) {
  std::vector<int> ids(static_cast<std::size_t>(system.measurement_count()));
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

Eigen::VectorXd estimate_state(const AugmentedSystem& system, const Eigen::VectorXd& z,
                               std::span<const int> active) {
  check_inputs(system, z, active);
  if (!observes_all(system, active)) {
    throw Error(ErrorKind::RankDeficient, "active measurements do not observe every bus");
  }
  ActiveRows rows = gather(system, z, active);
  Eigen::VectorXd scale = rows.var.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd a = scale.asDiagonal() * rows.h;
  Eigen::VectorXd b = scale.cwiseProduct(rows.z);
  return a.colPivHouseholderQr().solve(b);
}

double weighted_residual_norm(const AugmentedSystem& system, const Eigen::VectorXd& z,
                              std::span<const int> active, const Eigen::VectorXd& estimate) {
  check_inputs(system, z, active);
  ActiveRows rows = gather(system, z, active);
  Eigen::VectorXd r = rows.z - rows.h * estimate;
  return r.cwiseQuotient(rows.var.cwiseSqrt()).norm();
}

std::vector<NormalizedResidual> normalized_residuals(const AugmentedSystem& system,
                                                     const Eigen::VectorXd& z,
                                                     std::span<const int> active,
                                                     const Eigen::VectorXd& estimate) {
  check_inputs(system, z, active);
  if (!observes_all(system, active)) {
    throw Error(ErrorKind::RankDeficient, "active measurements do not observe every bus");
  }
  ActiveRows rows = gather(system, z, active);
  Eigen::VectorXd r = rows.z - rows.h * estimate;

  // R_r = Sigma - H (H^T Sigma^-1 H)^-1 H^T, diagonal only.
  Eigen::VectorXd inv_var = rows.var.cwiseInverse();
  Eigen::MatrixXd gain = rows.h.transpose() * inv_var.asDiagonal() * rows.h;
  Eigen::MatrixXd gain_inv_ht = gain.ldlt().solve(rows.h.transpose());

  std::vector<NormalizedResidual> out;
  out.reserve(active.size());
  for (Eigen::Index i = 0; i < rows.h.rows(); ++i) {
    double rr = rows.var(i) - rows.h.row(i).dot(gain_inv_ht.col(i));
    int id = active[static_cast<std::size_t>(i)];
    out.push_back({id, std::abs(r(i)) / std::sqrt(std::max(rr, kResidualVarianceFloor)),
                   observes_all(system, active, id)});
  }
  return out;
}

EstimationOutcome remove_bad_data(const AugmentedSystem& system, const Eigen::VectorXd& z,
                                  double lambda, std::span<const int> active) {
  if (!(lambda > 0.0)) {
    throw Error(ErrorKind::ValidationError, "lambda must be positive");
  }
  EstimationOutcome out;
  out.surviving = active.empty() ? all_measurements(system) : sorted_ids(active);
  check_inputs(system, z, out.surviving);

  for (;;) {
    out.estimate = estimate_state(system, z, out.surviving);
    out.weighted_residual_norm = weighted_residual_norm(system, z, out.surviving, out.estimate);
    if (out.weighted_residual_norm <= lambda) {
      out.detected = false;
      break;
    }
    auto nr = normalized_residuals(system, z, out.surviving, out.estimate);
    // Ids are ascending, so keeping the first of a tie picks the lowest id.
    const NormalizedResidual* pick = nullptr;
    for (const auto& entry : nr) {
      if (!entry.removable) continue;
      if (!pick || entry.value > pick->value * (1.0 + kResidualTieTolerance)) {
        pick = &entry;
      }
    }
    if (!pick) {
      out.detected = true;
      break;
    }
    int id = pick->id;
    out.removed.push_back(id);
    out.surviving.erase(std::find(out.surviving.begin(), out.surviving.end(), id));
    ++out.rounds;
  }

  ActiveRows rows = gather(system, z, out.surviving);
  out.residual = rows.z - rows.h * out.estimate;
  return out;
}

double default_lambda(const AugmentedSystem& system) {
  return 3.0 * std::sqrt(static_cast<double>(system.measurement_count()));
}

double activation_magnitude(const AugmentedSystem& system, double lambda) {
  double root_m = std::sqrt(static_cast<double>(system.measurement_count()));
  return 10.0 * lambda * std::max(1.0, root_m) / system.sigma_min();
}

AttackVerification simulate_attack(const AugmentedSystem& system, const AttackPlan& plan,
                                   const Eigen::VectorXd& x_true,
                                   const SimulationOptions& options) {
  const int n = system.bus_count();
  if (static_cast<int>(plan.c.size()) != n + 1) {
    throw Error(ErrorKind::DimensionMismatch, "plan node vector length != n+1");
  }
  double lambda = options.lambda > 0.0 ? options.lambda : default_lambda(system);

  AttackVerification out;
  out.alpha = options.alpha ? *options.alpha
                            : (plan.alpha > 0.0 ? plan.alpha : activation_magnitude(system, lambda));

  Eigen::VectorXd shift_nodes(n + 1);
  for (int v = 0; v <= n; ++v) shift_nodes(v) = plan.c[v];
  Eigen::VectorXd z = true_measurements(system, x_true, options.noise);
  for (int id : plan.inject) {
    z(id) += out.alpha * system.matrix().row(id).dot(shift_nodes);
  }

  std::set<int> jammed(plan.jam.begin(), plan.jam.end());
  std::vector<int> active;
  for (int id = 0; id < system.measurement_count(); ++id) {
    if (!jammed.count(id)) active.push_back(id);
  }

  EstimationOutcome outcome = remove_bad_data(system, z, lambda, active);
  out.removed = outcome.removed;
  out.rounds = outcome.rounds;
  out.detected = outcome.detected;
  out.estimate_shift = outcome.estimate - x_true;

  std::set<int> honest(plan.cut.crossing.begin(), plan.cut.crossing.end());
  for (int id : plan.inject) honest.erase(id);
  for (int id : plan.jam) honest.erase(id);
  bool removal_ok = std::all_of(out.removed.begin(), out.removed.end(),
                                [&](int id) { return honest.count(id) > 0; });

  double tol = std::max(10.0 * options.noise_scale, 1e-7 * std::max(1.0, out.alpha));
  Eigen::VectorXd expected = out.alpha * shift_nodes.head(n);
  bool shift_ok = (out.estimate_shift - expected).cwiseAbs().maxCoeff() <= tol;

  out.success = !outcome.detected && removal_ok && shift_ok;
  return out;
}

}  // namespace gridjam
