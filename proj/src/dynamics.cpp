#include "qdecouple/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qdec {

namespace {

void validate_grid(const RealVector& grid) {
    if (grid.size() < 1) throw Error(ErrorKind::config, "integrate: empty time grid");
    for (Eigen::Index k = 1; k < grid.size(); ++k) {
        if (!(grid(k) > grid(k - 1)))
            throw Error(ErrorKind::config, "integrate: grid must be strictly increasing");
    }
}

// One classic RK4 step x(t) -> x(t+h).
template <typename State, typename Rhs>
State rk4_step(const Rhs& f, double t, const State& x, double h) {
    const State k1 = f(t, x);
    const State k2 = f(t + 0.5 * h, x + (0.5 * h) * k1);
    const State k3 = f(t + 0.5 * h, x + (0.5 * h) * k2);
    const State k4 = f(t + h, x + h * k3);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Dormand-Prince 5(4) coefficients.
template <typename State, typename Rhs>
void rk45_span(const Rhs& f, double t0, double t1, State& x, double rtol, double atol) {
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                        e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                        e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
    double t = t0;
    const double span = t1 - t0;
    double h = std::min(span, 0.1 * span + 1e-6);
    const double hmin = 1e-14 * std::max(1.0, std::abs(t1));
    while (t < t1) {
        h = std::min(h, t1 - t);
        if (h < hmin)
            throw Error(ErrorKind::numerical, "integrate: adaptive step size underflow");
        const State k1 = f(t, x);
        const State k2 = f(t + h / 5, x + h * (a21 * k1));
        const State k3 = f(t + 3 * h / 10, x + h * (a31 * k1 + a32 * k2));
        const State k4 = f(t + 4 * h / 5, x + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const State k5 = f(t + 8 * h / 9, x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const State k6 = f(t + h, x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const State xn = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const State k7 = f(t + h, xn);
        const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        // Scaled RMS error over coefficients.
        const auto scale =
            (x.cwiseAbs().cwiseMax(xn.cwiseAbs()).array() * rtol + atol).eval();
        const double en = std::sqrt((err.cwiseAbs().array() / scale).square().mean());
        if (en <= 1.0) {
            t += h;
            x = xn;
        }
        const double factor =
            std::clamp(0.9 * std::pow(std::max(en, 1e-10), -0.2), 0.2, 5.0);
        h *= factor;
    }
}

template <typename State, typename Rhs>
void fixed_rk4_span(const Rhs& f, double t0, double t1, State& x, double hmax) {
    const double span = t1 - t0;
    const int nsub = std::max(1, static_cast<int>(std::ceil(span / hmax - 1e-12)));
    const double h = span / nsub;
    for (int i = 0; i < nsub; ++i) {
        x = rk4_step(f, t0 + i * h, x, h);
    }
}

}  // namespace

Trajectory integrate(const VectorizedSystem& vs, const ControlFunction& u, const RealVector& m0,
                     const RealVector& grid, const IntegrateOptions& options, DynamicsMode mode) {
    validate_grid(grid);
    const int n = vs.size();
    if (m0.size() != n) throw Error(ErrorKind::config, "integrate: state dimension mismatch");

    const RealMatrix drift = mode == DynamicsMode::free ? vs.O0 : (vs.O0 + vs.D).eval();
    const bool with_controls = mode == DynamicsMode::full && static_cast<bool>(u);
    auto rhs = [&](double t, const RealVector& m) -> RealVector {
        RealVector dm = drift * m;
        if (mode == DynamicsMode::full) dm += vs.g;
        if (with_controls) {
            const RealVector uv = u(t);
            if (uv.size() != static_cast<Eigen::Index>(vs.controls_O.size()))
                throw Error(ErrorKind::config, "integrate: control vector has wrong size");
            for (Eigen::Index i = 0; i < uv.size(); ++i)
                dm += uv(i) * (vs.controls_O[static_cast<size_t>(i)] * m);
        }
        return dm;
    };

    Trajectory traj;
    traj.convention = vs.basis.convention;
    traj.times = grid;
    traj.states.resize(grid.size(), n);
    RealVector x = m0;
    traj.states.row(0) = x.transpose();
    for (Eigen::Index k = 1; k < grid.size(); ++k) {
        if (options.method == Integrator::rk4) {
            fixed_rk4_span(rhs, grid(k - 1), grid(k), x, options.step);
        } else {
            rk45_span(rhs, grid(k - 1), grid(k), x, options.rtol, options.atol);
        }
        traj.states.row(k) = x.transpose();
    }
    return traj;
}

Trajectory integrate_density_oracle(const OpenSystemSpec& spec, const ControlFunction& u,
                                    const ComplexMatrix& rho0, const RealVector& grid,
                                    const OrthonormalBasis& basis,
                                    const IntegrateOptions& options) {
    validate_grid(grid);
    spec.validate();
    if (rho0.rows() != spec.dim || rho0.cols() != spec.dim)
        throw Error(ErrorKind::config, "integrate_density_oracle: state dimension mismatch");
    if (std::abs(rho0.trace().real() - 1.0) > 1e-10)
        throw Error(ErrorKind::config, "integrate_density_oracle: rho0 must have unit trace");
    {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (rho0 + rho0.adjoint()));
        if (es.eigenvalues().minCoeff() < -1e-10)
            throw Error(ErrorKind::config,
                        "integrate_density_oracle: rho0 is not positive semidefinite");
    }

    const RealVector u_zero = RealVector::Zero(static_cast<Eigen::Index>(spec.controls.size()));
    auto rhs = [&](double t, const ComplexMatrix& rho) -> ComplexMatrix {
        return master_equation_rhs(spec, rho, u ? u(t) : u_zero);
    };

    Trajectory traj;
    traj.kind = TrajectoryKind::oracle;
    traj.convention = basis.convention;
    traj.times = grid;
    traj.states.resize(grid.size(), basis.size());

    ComplexMatrix rho = rho0;
    auto record = [&](Eigen::Index k) {
        const double trace_err = std::abs(rho.trace() - Complex(1.0, 0.0));
        traj.max_trace_error = std::max(traj.max_trace_error, trace_err);
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (rho + rho.adjoint()));
        traj.min_eigenvalue = std::min(traj.min_eigenvalue, es.eigenvalues().minCoeff());
        if (trace_err > 1e-9)
            throw Error(ErrorKind::numerical,
                        "integrate_density_oracle: trace drifted by " + std::to_string(trace_err));
        if (traj.min_eigenvalue < -1e-8)
            throw Error(ErrorKind::numerical,
                        "integrate_density_oracle: state lost positivity, min eigenvalue " +
                            std::to_string(traj.min_eigenvalue));
        for (int j = 0; j < basis.size(); ++j)
            traj.states(k, j) = (basis.elements[j] * rho).trace().real();
    };
    record(0);
    for (Eigen::Index k = 1; k < grid.size(); ++k) {
        if (options.method == Integrator::rk4) {
            fixed_rk4_span(rhs, grid(k - 1), grid(k), rho, options.step);
        } else {
            rk45_span(rhs, grid(k - 1), grid(k), rho, options.rtol, options.atol);
        }
        record(k);
    }
    return traj;
}

bool lidar_predicts_convergent(const RealVector& m0_bloch) {
    if (m0_bloch.size() != 3)
        throw Error(ErrorKind::config, "lidar_predicts_convergent: expected a Bloch vector");
    const double c0sq = m0_bloch(0) * m0_bloch(0) + m0_bloch(1) * m0_bloch(1);
    if (c0sq > 0.5) return false;  // no real equilibria, m_z always reaches zero
    return m0_bloch(2) < 0.5 * (-1.0 + std::sqrt(1.0 - 2.0 * c0sq));
}

LidarRun lidar_controls(const LidarParams& params, const RealVector& m0_bloch,
                        const RealVector& grid, const IntegrateOptions& options) {
    validate_grid(grid);
    if (m0_bloch.size() != 3)
        throw Error(ErrorKind::config, "lidar_controls: expected a Bloch vector");
    if (!(params.gamma > 0.0))
        throw Error(ErrorKind::config, "lidar_controls: gamma must be positive");
    if (std::abs(m0_bloch(2)) < 1e-12)
        throw Error(ErrorKind::infeasible,
                    "lidar_controls: m_z0 = 0, the feedback law is singular at t0");

    const double c0sq = m0_bloch(0) * m0_bloch(0) + m0_bloch(1) * m0_bloch(1);
    const double gamma = params.gamma;
    const double omega = params.omega;
    const double thr = params.divergence_threshold;
    const double t_start = grid(0);

    // (m_x, m_y) follow the free trajectory exactly; only m_z is integrated.
    auto target_xy = [&](double t) {
        const double c = std::cos(omega * (t - t_start));
        const double s = std::sin(omega * (t - t_start));
        return std::pair<double, double>{m0_bloch(0) * c - m0_bloch(1) * s,
                                         m0_bloch(0) * s + m0_bloch(1) * c};
    };
    auto fz = [&](double /*t*/, double mz) {
        return -gamma * (mz * mz + mz + 0.5 * c0sq) / mz;
    };
    auto bad = [&](double mz, double mz_prev) {
        return !std::isfinite(mz) || std::abs(mz) < thr || mz * mz_prev < 0.0;
    };

    LidarRun run;
    run.predicted_convergent = lidar_predicts_convergent(m0_bloch);
    std::vector<double> times;
    std::vector<double> zs;
    times.push_back(t_start);
    zs.push_back(m0_bloch(2));

    double t = t_start;
    double mz = m0_bloch(2);
    bool diverged = false;
    double t_div = 0.0;
    for (Eigen::Index k = 1; k < grid.size() && !diverged; ++k) {
        const double span = grid(k) - grid(k - 1);
        const int nsub = std::max(1, static_cast<int>(std::ceil(span / options.step - 1e-12)));
        const double h = span / nsub;
        for (int i = 0; i < nsub; ++i) {
            const double mz_new = rk4_step(fz, t, mz, h);
            if (bad(mz_new, mz)) {
                // Bisect the offending substep to localize the event.
                double a = t, b = t + h;
                double mza = mz;
                while (b - a > 1e-12 * std::max(1.0, std::abs(b))) {
                    const double mid = 0.5 * (a + b);
                    const double mzm = rk4_step(fz, a, mza, mid - a);
                    if (bad(mzm, mza)) {
                        b = mid;
                    } else {
                        a = mid;
                        mza = mzm;
                    }
                }
                diverged = true;
                t_div = 0.5 * (a + b);
                break;
            }
            t += h;
            mz = mz_new;
        }
        if (!diverged) {
            times.push_back(grid(k));
            zs.push_back(mz);
        }
    }

    const Eigen::Index npts = static_cast<Eigen::Index>(times.size());
    run.trajectory.convention = BasisConvention::pauli_bloch;
    run.trajectory.kind = TrajectoryKind::controlled;
    run.trajectory.times.resize(npts);
    run.trajectory.states.resize(npts, 3);
    run.controls.resize(npts, 2);
    for (Eigen::Index k = 0; k < npts; ++k) {
        const double tk = times[static_cast<size_t>(k)];
        const double zk = zs[static_cast<size_t>(k)];
        const auto [mx, my] = target_xy(tk);
        run.trajectory.times(k) = tk;
        run.trajectory.states.row(k) << mx, my, zk;
        run.controls.row(k) << -0.5 * gamma * my / zk, 0.5 * gamma * mx / zk;
    }
    if (diverged) {
        run.status = LidarStatus::diverged;
        run.divergence_time = t_div;
    } else {
        run.status = LidarStatus::convergent;
    }
    return run;
}

RealVector tracking_error(const Trajectory& a, const Trajectory& b,
                          const std::vector<int>& indices) {
    if (a.times.size() != b.times.size() || (a.times - b.times).cwiseAbs().maxCoeff() > 1e-12)
        throw Error(ErrorKind::config, "tracking_error: trajectories use different grids");
    RealVector out(a.times.size());
    for (Eigen::Index k = 0; k < a.times.size(); ++k) {
        double sq = 0.0;
        for (int idx : indices) {
            const double d = a.states(k, idx) - b.states(k, idx);
            sq += d * d;
        }
        out(k) = std::sqrt(sq);
    }
    return out;
}

RealMatrix coherence_metrics(const Trajectory& traj, const std::vector<std::vector<int>>& groups) {
    RealMatrix out(traj.times.size(), static_cast<Eigen::Index>(groups.size()));
    for (Eigen::Index k = 0; k < traj.times.size(); ++k) {
        for (size_t gidx = 0; gidx < groups.size(); ++gidx) {
            double sq = 0.0;
            for (int idx : groups[gidx]) {
                if (idx < 0 || idx >= traj.states.cols())
                    throw Error(ErrorKind::config, "coherence_metrics: index out of range");
                sq += traj.states(k, idx) * traj.states(k, idx);
            }
            out(k, static_cast<Eigen::Index>(gidx)) = sq;
        }
    }
    return out;
}

double entanglement_measure(const ComplexMatrix& rho) {
    if (rho.rows() != 4 || rho.cols() != 4)
        throw Error(ErrorKind::config, "entanglement_measure: expected a two-qubit state");
    const OrthonormalBasis pauli = pauli_bloch_basis();
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            ComplexMatrix sij(4, 4);
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c)
                    sij.block(2 * r, 2 * c, 2, 2) =
                        pauli.elements[i](r, c) * pauli.elements[j];
            const double mij = 0.5 * (sij * rho).trace().real();
            sum += mij * mij;
        }
    }
    return std::max(2.0 * sum - 0.5, 0.0);
}

double entanglement_measure(const CoherenceVector& m, const OrthonormalBasis& basis) {
    if (basis.dim != 4)
        throw Error(ErrorKind::config, "entanglement_measure: expected a two-qubit basis");
    return entanglement_measure(coherence_to_rho(m, basis));
}

BoundReport convergence_bound_check(const Trajectory& a, const Trajectory& b, double d_min,
                                    double tol) {
    if (a.times.size() != b.times.size() || (a.times - b.times).cwiseAbs().maxCoeff() > 1e-12)
        throw Error(ErrorKind::config, "convergence_bound_check: grid mismatch");
    BoundReport rep;
    const double base = (a.states.row(0) - b.states.row(0)).norm();
    const double t0 = a.times(0);
    for (Eigen::Index k = 0; k < a.times.size(); ++k) {
        const double gap = (a.states.row(k) - b.states.row(k)).norm();
        const double bound = (1.0 + tol) * std::exp(-d_min * (a.times(k) - t0)) * base + 1e-12;
        const double ratio = gap / bound;
        rep.max_ratio = std::max(rep.max_ratio, ratio);
        if (ratio > 1.0 && !rep.first_violation_time) {
            rep.ok = false;
            rep.first_violation_time = a.times(k);
        }
    }
    return rep;
}

}  // namespace qdec
