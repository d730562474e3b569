#include "qdecouple/decouple.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <random>

namespace qdec {

std::pair<RealVector, RealVector> residual(const RealVector& xi, const RealVector& eta,
                                           const BlockForm& blocks, const RealVector& m0_1) {
    const int m = blocks.m;
    const int ne = blocks.eps_size();
    if (xi.size() != static_cast<Eigen::Index>(blocks.controls_O12.size()) ||
        eta.size() != ne || m0_1.size() != m) {
        throw Error(ErrorKind::config, "residual: dimension mismatch with block form");
    }
    RealVector F1 = blocks.D11 * m0_1 + blocks.D12 * eta + blocks.g1;
    RealVector F2 = blocks.D21 * m0_1 + blocks.D22 * eta + blocks.g2;
    for (Eigen::Index i = 0; i < xi.size(); ++i) {
        F1 += xi(i) * (blocks.controls_O12[static_cast<size_t>(i)] * eta);
        F2 -= xi(i) * (blocks.controls_O12[static_cast<size_t>(i)].transpose() * m0_1);
    }
    return {F1, F2};
}

RealMatrix residual_jacobian(const RealVector& xi, const RealVector& eta, const BlockForm& blocks,
                             const RealVector& m0_1) {
    const int m = blocks.m;
    const int ne = blocks.eps_size();
    const int nu = static_cast<int>(blocks.controls_O12.size());
    if (xi.size() != nu || eta.size() != ne || m0_1.size() != m) {
        throw Error(ErrorKind::config, "residual_jacobian: dimension mismatch with block form");
    }
    RealMatrix J = RealMatrix::Zero(m + ne, nu + ne);
    RealMatrix dF1_deta = blocks.D12;
    for (int i = 0; i < nu; ++i) {
        const auto& O12 = blocks.controls_O12[static_cast<size_t>(i)];
        J.block(0, i, m, 1) = O12 * eta;
        J.block(m, i, ne, 1) = -(O12.transpose() * m0_1);
        dF1_deta += xi(i) * O12;
    }
    J.block(0, nu, m, ne) = dF1_deta;
    J.block(m, nu, ne, ne) = blocks.D22;
    return J;
}

namespace {

struct NewtonResult {
    RealVector x;
    double resid = std::numeric_limits<double>::infinity();
    bool converged = false;
};

double resid_norm(const BlockForm& blocks, const RealVector& m0_1, const RealVector& x, int nu) {
    auto [F1, F2] = residual(x.head(nu), x.tail(x.size() - nu), blocks, m0_1);
    return std::sqrt(F1.squaredNorm() + F2.squaredNorm());
}

RealVector stack_residual(const BlockForm& blocks, const RealVector& m0_1, const RealVector& x,
                          int nu) {
    auto [F1, F2] = residual(x.head(nu), x.tail(x.size() - nu), blocks, m0_1);
    RealVector F(F1.size() + F2.size());
    F << F1, F2;
    return F;
}

// Damped Newton with a minimum-norm step (complete orthogonal decomposition
// handles rank-deficient Jacobians on solution manifolds) and Armijo
// backtracking. Switches to Levenberg damping when the plain step stalls.
NewtonResult damped_newton(const BlockForm& blocks, const RealVector& m0_1, RealVector x, int nu,
                           int max_iter, double tol) {
    NewtonResult out;
    double lambda = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        const RealVector F = stack_residual(blocks, m0_1, x, nu);
        const double nF = F.norm();
        if (!std::isfinite(nF)) break;
        // Polish well past the acceptance tolerance; defective roots stall on
        // their own and exit through the line-search branch below.
        if (nF <= 1e-15) break;
        const RealMatrix J =
            residual_jacobian(x.head(nu), x.tail(x.size() - nu), blocks, m0_1);
        RealVector dx;
        if (lambda == 0.0) {
            Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(J);
            dx = cod.solve(-F);
        } else {
            const RealMatrix A = J.transpose() * J +
                                 lambda * RealMatrix::Identity(J.cols(), J.cols());
            dx = A.ldlt().solve(-J.transpose() * F);
        }
        double alpha = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            const double trial = resid_norm(blocks, m0_1, x + alpha * dx, nu);
            if (std::isfinite(trial) && trial <= (1.0 - 1e-4 * alpha) * nF) {
                x += alpha * dx;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (accepted) {
            lambda = std::max(lambda * 0.25, 0.0);
            if (lambda < 1e-14) lambda = 0.0;
        } else {
            lambda = (lambda == 0.0) ? 1e-6 : lambda * 100.0;
            if (lambda > 1e12) break;
        }
    }
    out.x = x;
    out.resid = resid_norm(blocks, m0_1, x, nu);
    out.converged = out.resid <= tol;
    return out;
}

// Levenberg-damped Gauss-Newton descent on |F|^2; returns when the gradient
// J^T F is below grad_tol or the iteration budget runs out.
NewtonResult gauss_newton_min(const BlockForm& blocks, const RealVector& m0_1, RealVector x,
                              int nu, int max_iter, double grad_tol) {
    double lambda = 1e-3;
    for (int it = 0; it < max_iter; ++it) {
        const RealVector F = stack_residual(blocks, m0_1, x, nu);
        const RealMatrix J =
            residual_jacobian(x.head(nu), x.tail(x.size() - nu), blocks, m0_1);
        const RealVector grad = J.transpose() * F;
        if (grad.norm() <= grad_tol) break;
        bool stepped = false;
        for (int tries = 0; tries < 60; ++tries) {
            const RealMatrix A = J.transpose() * J +
                                 lambda * RealMatrix::Identity(J.cols(), J.cols());
            const RealVector dx = A.ldlt().solve(-grad);
            if (resid_norm(blocks, m0_1, x + dx, nu) < F.norm()) {
                x += dx;
                lambda = std::max(lambda * 0.3, 1e-14);
                stepped = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!stepped) break;
    }
    NewtonResult out;
    out.x = x;
    out.resid = resid_norm(blocks, m0_1, x, nu);
    return out;
}

}  // namespace

StationarySolution solve_stationary(const BlockForm& blocks, const RealVector& m0_1,
                                    const SolveOptions& options) {
    if (!blocks.assumptions.all() && !options.override_assumptions) {
        throw Error(ErrorKind::infeasible,
                    "solve_stationary: assumptions H1-H3 not satisfied (override to force)");
    }
    const int nu = static_cast<int>(blocks.controls_O12.size());
    const int ne = blocks.eps_size();
    if (m0_1.size() != blocks.m)
        throw Error(ErrorKind::config, "solve_stationary: m0^1 has wrong size");

    // Base start: xi = 0 (or the caller's guess) with eta from the linear
    // solve of F2 at that xi.
    RealVector xi_start = options.xi0.value_or(RealVector::Zero(nu));
    if (xi_start.size() != nu)
        throw Error(ErrorKind::config, "solve_stationary: xi0 has wrong size");
    RealVector eta_start;
    if (options.eta0) {
        eta_start = *options.eta0;
        if (eta_start.size() != ne)
            throw Error(ErrorKind::config, "solve_stationary: eta0 has wrong size");
    } else {
        RealVector rhs = -(blocks.D21 * m0_1 + blocks.g2);
        for (int i = 0; i < nu; ++i)
            rhs += xi_start(i) * (blocks.controls_O12[static_cast<size_t>(i)].transpose() * m0_1);
        eta_start = blocks.D22.fullPivLu().solve(rhs);
    }
    RealVector x0(nu + ne);
    x0 << xi_start, eta_start;

    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double spread = std::max(1.0, eta_start.norm());

    NewtonResult best;
    int best_restart = -1;
    const int restarts = std::max(1, options.restarts);
    for (int r = 0; r < restarts; ++r) {
        RealVector x = x0;
        if (r > 0) {
            const double sigma = spread * (0.1 * std::pow(2.0, (r - 1) % 5));
            for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += sigma * gauss(rng);
        }
        NewtonResult res = damped_newton(blocks, m0_1, x, nu, options.max_iter, options.tol);
        if (res.converged) {
            // First converged restart wins; exact roots tie at <= tol.
            best = res;
            best_restart = r;
            break;
        }
        if (res.resid < best.resid) {
            best = res;
            best_restart = r;
        }
    }

    StationarySolution sol;
    if (best_restart >= 0 && best.converged) {
        sol.xi = best.x.head(nu);
        sol.eta = best.x.tail(ne);
        sol.residual_norm = best.resid;
        sol.status = SolveStatus::exact;
        return sol;
    }
    if (options.allow_least_squares && best_restart >= 0 && best.x.size() == nu + ne) {
        NewtonResult lsq = gauss_newton_min(blocks, m0_1, best.x, nu, 500, 1e-10);
        if (std::isfinite(lsq.resid)) {
            sol.xi = lsq.x.head(nu);
            sol.eta = lsq.x.tail(ne);
            sol.residual_norm = lsq.resid;
            sol.status = lsq.resid <= options.tol ? SolveStatus::exact : SolveStatus::least_squares;
            return sol;
        }
    }
    sol.xi = RealVector::Zero(nu);
    sol.eta = eta_start;
    sol.residual_norm = best.resid;
    sol.status = SolveStatus::failed;
    return sol;
}

namespace {

// Bloch-convention one-qubit block form for amplitude damping at rate gamma.
// F does not involve O0, so the Rabi frequency is irrelevant here.
BlockForm one_qubit_blocks(double gamma) {
    OpenSystemSpec spec;
    spec.dim = 2;
    auto [basis, split] = preset_split(SplitPreset::one_qubit);
    spec.H0 = ComplexMatrix::Zero(2, 2);
    spec.controls = {0.5 * basis.elements[0], 0.5 * basis.elements[1]};
    ComplexMatrix lower = ComplexMatrix::Zero(2, 2);
    lower(1, 0) = 1.0;
    spec.lindblads = {{lower, gamma}};
    return block_split(vectorize(spec, basis, split));
}

}  // namespace

OneQubitControls analytic_one_qubit(const RealVector& m0_bloch, double gamma, Branch branch) {
    if (m0_bloch.size() != 3)
        throw Error(ErrorKind::config, "analytic_one_qubit: expected a 3-component Bloch vector");
    if (!(gamma > 0.0))
        throw Error(ErrorKind::config, "analytic_one_qubit: gamma must be positive");
    if (m0_bloch.norm() > 1.0 + 1e-9)
        throw Error(ErrorKind::config, "analytic_one_qubit: state outside the Bloch ball");
    const double c0sq = m0_bloch(0) * m0_bloch(0) + m0_bloch(1) * m0_bloch(1);
    OneQubitControls out;
    out.solution.branch = branch;
    if (c0sq > 0.5 + 1e-12) {
        throw Error(ErrorKind::infeasible,
                    "analytic_one_qubit: C0^2 = " + std::to_string(c0sq) +
                        " exceeds 1/2, the stationary system has no real solution");
    }
    const BlockForm blocks = one_qubit_blocks(gamma);
    if (c0sq < 1e-14) {
        out.solution.xi = RealVector::Zero(2);
        out.solution.eta = RealVector::Constant(1, -1.0);
        out.solution.degenerate = true;
    } else {
        const double r = std::sqrt(std::max(0.0, 1.0 - 2.0 * c0sq));
        const double sign = branch == Branch::plus ? 1.0 : -1.0;
        const double factor = gamma * (1.0 + sign * r) / (2.0 * c0sq);
        out.solution.xi = RealVector(2);
        out.solution.xi << m0_bloch(1) * factor, -m0_bloch(0) * factor;
        // The xi branch with 1 + sign*r pairs with eta = (-1 + sign*r)/2.
        out.solution.eta = RealVector::Constant(1, (-1.0 + sign * r) / 2.0);
    }
    auto [F1, F2] = residual(out.solution.xi, out.solution.eta, blocks, m0_bloch.head(2));
    out.solution.residual_norm = std::sqrt(F1.squaredNorm() + F2.squaredNorm());
    out.solution.status = SolveStatus::exact;
    out.amplitude = out.solution.xi.norm();
    out.phase = out.solution.degenerate ? 0.0 : std::atan2(out.solution.xi(1), out.solution.xi(0));
    return out;
}

ControlLaw::ControlLaw(RealVector xi, const RealMatrix& O0_11, double t0)
    : xi_(std::move(xi)), O0_11_(O0_11), t0_(t0), exp_(O0_11) {
    if (xi_.size() != O0_11_.rows())
        throw Error(ErrorKind::config, "ControlLaw: xi does not match the p-block dimension");
}

RealVector ControlLaw::at(double t) const { return exp_.apply(t - t0_, xi_); }

ControlLaw make_control_law(const VectorizedSystem& vs, const BlockForm& blocks,
                            const StationarySolution& solution, double t0) {
    if (solution.status == SolveStatus::failed)
        throw Error(ErrorKind::infeasible, "make_control_law: no stationary solution available");
    const int m = blocks.m;
    if (static_cast<int>(vs.controls_O.size()) != m)
        throw Error(ErrorKind::config,
                    "make_control_law: need exactly one control per p coordinate");
    // The law requires [-O0, O_i] = sum_j (O0_11)_ij O_j, i.e. the control
    // generators transform under O0 exactly like the p basis coordinates.
    for (int i = 0; i < m; ++i) {
        RealMatrix lhs = vs.controls_O[static_cast<size_t>(i)] * vs.O0 -
                         vs.O0 * vs.controls_O[static_cast<size_t>(i)];
        for (int j = 0; j < m; ++j) {
            lhs -= blocks.O0_11(i, j) * vs.controls_O[static_cast<size_t>(j)];
        }
        if (lhs.norm() > 1e-9 * std::max(1.0, vs.O0.norm())) {
            throw Error(ErrorKind::infeasible,
                        "make_control_law: control generators are not aligned with the Cartan "
                        "p basis (commutation defect " +
                            std::to_string(lhs.norm()) + ")");
        }
    }
    return ControlLaw(solution.xi, blocks.O0_11, t0);
}

CoherenceVector stationary_trajectory(const RealVector& m0_1, const RealVector& eta,
                                      const BlockForm& blocks, BasisConvention convention,
                                      double t0, double t) {
    if (m0_1.size() != blocks.m || eta.size() != blocks.eps_size())
        throw Error(ErrorKind::config, "stationary_trajectory: dimension mismatch");
    const AntisymmetricExp e11(blocks.O0_11);
    const AntisymmetricExp e22(blocks.O0_22);
    RealVector permuted(m0_1.size() + eta.size());
    permuted << e11.apply(t - t0, m0_1), e22.apply(t - t0, eta);
    CoherenceVector cv;
    cv.convention = convention;
    cv.m = blocks.unpermute(permuted);
    return cv;
}

double ChannelDecomposition::peak() const {
    double p = std::abs(constant);
    for (const auto& tone : tones) p += tone.amplitude;
    return p;
}

std::vector<ChannelDecomposition> decompose_controls(const ControlLaw& law, double tol) {
    const auto& eig = law.exp();
    const RealVector& lam = eig.eigenvalues();
    const ComplexMatrix& V = eig.eigenvectors();
    const Eigen::VectorXcd w = V.adjoint() * law.xi().cast<Complex>();
    const int n = eig.size();
    const std::vector<double> freqs = eig.frequencies();
    const double scale = n > 0 ? std::max(1.0, lam.cwiseAbs().maxCoeff()) : 1.0;
    const double zero_cut = 1e-9 * scale;
    std::vector<ChannelDecomposition> out;
    for (int i = 0; i < n; ++i) {
        ChannelDecomposition ch;
        ch.index = i;
        for (double f : freqs) {
            Complex z = 0.0;
            for (int k = 0; k < n; ++k) {
                if (f == 0.0 ? std::abs(lam(k)) <= zero_cut
                             : std::abs(lam(k) - f) <= 1e-9 * scale) {
                    z += V(i, k) * w(k);
                }
            }
            if (f == 0.0) {
                // Zero modes appear once each; their sum is the real constant.
                ch.constant = z.real();
            } else {
                // u_i(t) += 2 Re(z e^{-i f (t-t0)}) = a cos + b sin.
                const double a = 2.0 * z.real();
                const double b = 2.0 * z.imag();
                const double amp = std::hypot(a, b);
                if (amp > tol) ch.tones.push_back({f, amp, std::atan2(b, a)});
            }
        }
        out.push_back(std::move(ch));
    }
    return out;
}

}  // namespace qdec
