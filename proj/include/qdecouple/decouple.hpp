#pragma once

#include <cstdint>
#include <vector>
#include <optional>
#include <utility>

#include "qdecouple/vectorize.hpp"

namespace qdec {

enum class SolveStatus { exact, least_squares, failed };
enum class Branch { plus, minus };

struct StationarySolution {
    RealVector xi;   // control constants, one per p coordinate
    RealVector eta;  // asymptotic eps-block state
    double residual_norm = 0.0;
    SolveStatus status = SolveStatus::failed;
    std::optional<Branch> branch;  // set by the one-qubit analytic path
    bool degenerate = false;       // C0 = 0: no control needed
};

struct SolveOptions {
    int restarts = 8;
    int max_iter = 200;
    double tol = 1e-11;
    bool allow_least_squares = true;
    std::uint64_t seed = 20060109;
    bool override_assumptions = false;
    // Optional explicit first start. eta0 defaults to the linear solve of F2
    // at xi = 0 when absent.
    std::optional<RealVector> xi0;
    std::optional<RealVector> eta0;
};

// F1 = sum_i xi_i O_i^{12} eta + D11 m0^1 + D12 eta + g1
// F2 = -sum_i xi_i (O_i^{12})^T m0^1 + D21 m0^1 + D22 eta + g2
std::pair<RealVector, RealVector> residual(const RealVector& xi, const RealVector& eta,
                                           const BlockForm& blocks, const RealVector& m0_1);

// Analytic Jacobian of (F1, F2) with respect to (xi, eta).
RealMatrix residual_jacobian(const RealVector& xi, const RealVector& eta, const BlockForm& blocks,
                             const RealVector& m0_1);

// Damped-Newton multistart solve of the stationary system; falls back to a
// Levenberg-damped Gauss-Newton minimization of |F|^2 when no exact root is
// reached and least squares is allowed. Deterministic for a fixed seed.
StationarySolution solve_stationary(const BlockForm& blocks, const RealVector& m0_1,
                                    const SolveOptions& options = {});

struct OneQubitControls {
    StationarySolution solution;  // xi in R^2, eta in R^1 (Bloch convention)
    double amplitude = 0.0;
    double phase = 0.0;
};

// Closed-form one-qubit amplitude-damping solution. Requires the Bloch vector
// inside the unit ball with C0^2 = m_x^2 + m_y^2 <= 1/2. C0 = 0 returns the
// degenerate no-control solution.
OneQubitControls analytic_one_qubit(const RealVector& m0_bloch, double gamma,
                                    Branch branch = Branch::minus);

// Open-loop law u(t) = exp(O0_11 (t - t0)) xi; |u(t)| is conserved.
class ControlLaw {
  public:
    ControlLaw() = default;
    ControlLaw(RealVector xi, const RealMatrix& O0_11, double t0);

    RealVector at(double t) const;
    double t0() const { return t0_; }
    const RealVector& xi() const { return xi_; }
    const RealMatrix& generator() const { return O0_11_; }
    const AntisymmetricExp& exp() const { return exp_; }

  private:
    RealVector xi_;
    RealMatrix O0_11_;
    double t0_ = 0.0;
    AntisymmetricExp exp_;
};

// Verifies the commutation alignment [-O0, O_i] = sum_j (O0_11)_ij O_j that the
// control law relies on, then builds the law.
ControlLaw make_control_law(const VectorizedSystem& vs, const BlockForm& blocks,
                            const StationarySolution& solution, double t0);

// m_inf(t) = (exp(O0_11 (t-t0)) m0^1, exp(O0_22 (t-t0)) eta), returned in the
// original basis ordering.
CoherenceVector stationary_trajectory(const RealVector& m0_1, const RealVector& eta,
                                      const BlockForm& blocks, BasisConvention convention,
                                      double t0, double t);

// One sinusoidal component of a control channel.
struct ChannelTone {
    double frequency = 0.0;
    double amplitude = 0.0;
    double phase = 0.0;  // u(t) ~ amplitude * cos(frequency (t-t0) - phase)
};

struct ChannelDecomposition {
    int index = 0;
    double constant = 0.0;
    std::vector<ChannelTone> tones;

    double peak() const;
};

// Per-channel frequency content of u(t) = exp(O0_11 (t-t0)) xi.
std::vector<ChannelDecomposition> decompose_controls(const ControlLaw& law, double tol = 1e-10);

}  // namespace qdec
