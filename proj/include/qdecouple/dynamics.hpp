#pragma once

#include <functional>
#include <optional>

#include "qdecouple/decouple.hpp"

namespace qdec {

enum class TrajectoryKind { controlled, uncontrolled, target, stationary, oracle };

struct Trajectory {
    RealVector times;
    RealMatrix states;  // row k = coherence vector at times(k)
    TrajectoryKind kind = TrajectoryKind::controlled;
    BasisConvention convention = BasisConvention::orthonormal;
    // Filled by the density-matrix oracle.
    double max_trace_error = 0.0;
    double min_eigenvalue = 1.0;

    int points() const { return static_cast<int>(times.size()); }
};

using ControlFunction = std::function<RealVector(double)>;

enum class Integrator { rk4, rk45 };
enum class DynamicsMode { full, free };  // free: dm/dt = O0 m only (Eq. of the target)

struct IntegrateOptions {
    Integrator method = Integrator::rk4;
    double step = 1e-3;   // fixed-step RK4 substep cap
    double rtol = 1e-9;   // RK45
    double atol = 1e-12;  // RK45
};

// Integrates the coherence-vector equation over the grid. u may be empty for
// the uncontrolled system; mode = free drops controls and dissipation.
Trajectory integrate(const VectorizedSystem& vs, const ControlFunction& u, const RealVector& m0,
                     const RealVector& grid, const IntegrateOptions& options = {},
                     DynamicsMode mode = DynamicsMode::full);

// Independent density-matrix integration of the master equation; states are
// projected to coherence vectors on the given basis. Enforces trace
// preservation (1e-9) and spectrum positivity (-1e-8) along the way.
Trajectory integrate_density_oracle(const OpenSystemSpec& spec, const ControlFunction& u,
                                    const ComplexMatrix& rho0, const RealVector& grid,
                                    const OrthonormalBasis& basis,
                                    const IntegrateOptions& options = {});

struct LidarParams {
    double omega = 0.0;
    double gamma = 0.0;
    double divergence_threshold = 1e-6;
};

enum class LidarStatus { convergent, diverged };

struct LidarRun {
    Trajectory trajectory;  // Bloch components; truncated at divergence
    RealMatrix controls;    // row k = (u_x, u_y) at times(k)
    LidarStatus status = LidarStatus::convergent;
    std::optional<double> divergence_time;
    bool predicted_convergent = false;
};

// Convergence criterion m_z0 < (-1 + sqrt(1 - 2 C0^2)) / 2; never convergent
// when C0^2 > 1/2.
bool lidar_predicts_convergent(const RealVector& m0_bloch);

// Exact-decoupling comparator: (m_x, m_y) pinned to the free trajectory, m_z
// integrated through the singular scalar equation, open-loop controls emitted
// by substitution. Divergence is localized by bisection.
LidarRun lidar_controls(const LidarParams& params, const RealVector& m0_bloch,
                        const RealVector& grid, const IntegrateOptions& options = {});

// Euclidean distance over the selected coordinates, per grid point.
RealVector tracking_error(const Trajectory& a, const Trajectory& b,
                          const std::vector<int>& indices);

// Sum of squared coordinates for each index group, per grid point.
RealMatrix coherence_metrics(const Trajectory& traj, const std::vector<std::vector<int>>& groups);

// Two-qubit entanglement measure E(rho) = max(2 sum_ij m_ij^2 - 1/2, 0) over
// the correlation block m_ij = tr(sigma_i x sigma_j rho) / 2.
double entanglement_measure(const ComplexMatrix& rho);
double entanglement_measure(const CoherenceVector& m, const OrthonormalBasis& basis);

struct BoundReport {
    bool ok = true;
    double max_ratio = 0.0;  // max over grid of |a-b| / bound
    std::optional<double> first_violation_time;
};

// Checks |a(t) - b(t)| <= (1 + tol) e^{-d_min (t - t0)} |a(t0) - b(t0)| on the
// common grid.
BoundReport convergence_bound_check(const Trajectory& a, const Trajectory& b, double d_min,
                                    double tol = 1e-6);

}  // namespace qdec
