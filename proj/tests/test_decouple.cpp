#include <doctest.h>

#include <cmath>
#include <random>

#include "qdecouple/decouple.hpp"
#include "qdecouple/presets.hpp"

using namespace qdec;

namespace {

const double kSqrt2 = std::sqrt(2.0);

struct OneQubitSetup {
    PresetSystem sys;
    VectorizedSystem vs;
    BlockForm blocks;
};

OneQubitSetup one_qubit(double gamma = 0.2) {
    PresetParams params = default_params(SystemPreset::one_qubit);
    params.gamma = gamma;
    OneQubitSetup s{preset_system(SystemPreset::one_qubit, params), {}, {}};
    s.vs = vectorize(s.sys.spec, s.sys.basis, s.sys.split);
    s.blocks = block_split(s.vs);
    return s;
}

double full_resid_norm(const RealVector& xi, const RealVector& eta, const BlockForm& blocks,
                       const RealVector& m0_1) {
    auto [F1, F2] = residual(xi, eta, blocks, m0_1);
    return std::sqrt(F1.squaredNorm() + F2.squaredNorm());
}

// Scalar-bisection oracle for the one-qubit eps equation at fixed xi:
// F2(eta) = xi_x m0y - xi_y m0x - G eta - G = 0, solved without linear algebra.
double bisect_one_qubit_eta(const RealVector& xi, const RealVector& m01, double gamma) {
    auto f = [&](double eta) {
        return xi(0) * m01(1) - xi(1) * m01(0) - gamma * eta - gamma;
    };
    double lo = -10.0, hi = 10.0;
    REQUIRE(f(lo) * f(hi) <= 0.0);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f(lo) * f(mid) <= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

RealVector bloch(double x, double y, double z) {
    RealVector m(3);
    m << x, y, z;
    return m;
}

}  // namespace

TEST_CASE("residual vanishes identically for the zero system") {
    BlockForm blocks;
    blocks.m = 2;
    blocks.perm = {0, 1, 2};
    blocks.O0_11 = RealMatrix::Zero(2, 2);
    blocks.O0_22 = RealMatrix::Zero(1, 1);
    blocks.D11 = RealMatrix::Zero(2, 2);
    blocks.D12 = RealMatrix::Zero(2, 1);
    blocks.D21 = RealMatrix::Zero(1, 2);
    blocks.D22 = RealMatrix::Zero(1, 1);
    blocks.g1 = RealVector::Zero(2);
    blocks.g2 = RealVector::Zero(1);
    blocks.controls_O12 = {RealMatrix::Zero(2, 1), RealMatrix::Zero(2, 1)};
    auto [F1, F2] = residual(RealVector::Zero(2), RealVector::Zero(1), blocks,
                             RealVector::Zero(2));
    CHECK(F1.norm() == 0.0);
    CHECK(F2.norm() == 0.0);
}

TEST_CASE("one-qubit worked solution zeroes the residual") {
    const auto s = one_qubit();
    const double gamma = 0.2;
    RealVector m01(2);
    m01 << kSqrt2 / 2.0, 0.0;
    RealVector xi(2);
    xi << 0.0, -kSqrt2 * gamma / 2.0;
    // eta from the independent scalar bisection oracle.
    const double eta_scalar = bisect_one_qubit_eta(xi, m01, gamma);
    CHECK(eta_scalar == doctest::Approx(-0.5).epsilon(1e-12));
    RealVector eta(1);
    eta << eta_scalar;
    CHECK(full_resid_norm(xi, eta, s.blocks, m01) <= 1e-12);
}

TEST_CASE("block residual agrees with the full-matrix stationarity expression") {
    std::mt19937_64 rng(1234);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (SystemPreset kind :
         {SystemPreset::one_qubit, SystemPreset::qutrit_v, SystemPreset::two_qubit}) {
        const PresetSystem sys = preset_system(kind);
        const VectorizedSystem vs = vectorize(sys.spec, sys.basis, sys.split);
        const BlockForm blocks = block_split(vs);
        const int n = vs.size();
        const int m = blocks.m;
        for (int trial = 0; trial < 5; ++trial) {
            RealVector xi(m), eta(n - m), m01(m);
            for (int i = 0; i < m; ++i) {
                xi(i) = gauss(rng);
                m01(i) = gauss(rng);
            }
            for (int i = 0; i < n - m; ++i) eta(i) = gauss(rng);
            // Assemble sum_i xi_i O_i m_inf + D m_inf + g using the full
            // unpermuted matrices.
            RealVector perm_state(n);
            perm_state << m01, eta;
            const RealVector state = blocks.unpermute(perm_state);
            RealVector full = vs.D * state + vs.g;
            for (int i = 0; i < m; ++i)
                full += xi(i) * (vs.controls_O[static_cast<size_t>(i)] * state);
            const RealVector full_perm = blocks.permute(full);
            auto [F1, F2] = residual(xi, eta, blocks, m01);
            CHECK((full_perm.head(m) - F1).norm() <= 1e-12 * std::max(1.0, F1.norm()));
            CHECK((full_perm.tail(n - m) - F2).norm() <= 1e-12 * std::max(1.0, F2.norm()));
        }
    }
}

TEST_CASE("residual_jacobian matches central finite differences") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const PresetSystem sys = preset_system(SystemPreset::qutrit_v);
    const VectorizedSystem vs = vectorize(sys.spec, sys.basis, sys.split);
    const BlockForm blocks = block_split(vs);
    const int m = blocks.m;
    const int ne = blocks.eps_size();
    for (int trial = 0; trial < 5; ++trial) {
        RealVector xi(m), eta(ne), m01(m);
        for (int i = 0; i < m; ++i) {
            xi(i) = gauss(rng);
            m01(i) = gauss(rng);
        }
        for (int i = 0; i < ne; ++i) eta(i) = gauss(rng);
        const RealMatrix J = residual_jacobian(xi, eta, blocks, m01);
        const double h = 1e-6;
        for (int col = 0; col < m + ne; ++col) {
            RealVector xp(m + ne), xm(m + ne);
            xp << xi, eta;
            xm = xp;
            xp(col) += h;
            xm(col) -= h;
            auto [F1p, F2p] = residual(xp.head(m), xp.tail(ne), blocks, m01);
            auto [F1m, F2m] = residual(xm.head(m), xm.tail(ne), blocks, m01);
            RealVector fd(m + ne);
            fd << (F1p - F1m) / (2 * h), (F2p - F2m) / (2 * h);
            CHECK((J.col(col) - fd).norm() <= 1e-6 * std::max(1.0, fd.norm()));
        }
    }
}

TEST_CASE("residual_jacobian at the origin has the stated block structure") {
    const auto s = one_qubit();
    RealVector m01(2);
    m01 << 0.3, -0.1;
    const RealMatrix J = residual_jacobian(RealVector::Zero(2), RealVector::Zero(1), s.blocks,
                                           m01);
    // dF1/dxi = O12 eta = 0 at eta = 0; dF1/deta = D12 = 0 here.
    CHECK(J.topLeftCorner(2, 2).norm() == 0.0);
    CHECK(J.topRightCorner(2, 1).norm() <= 1e-14);
    // dF2/dxi_i = -(O_i^{12})^T m0^1, dF2/deta = D22.
    CHECK(J(2, 0) == doctest::Approx(-0.1));   // -(0,-1)^T . m01
    CHECK(J(2, 1) == doctest::Approx(-0.3));   // -(1,0)^T . m01
    CHECK(J(2, 2) == doctest::Approx(-0.2));
}

TEST_CASE("analytic one-qubit Jacobian is nonsingular strictly inside the feasible disk") {
    const auto s = one_qubit();
    std::mt19937_64 rng(3111);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        const double c0sq = 0.49 * unif(rng) + 1e-3;
        const double phase = 2 * M_PI * unif(rng);
        const RealVector m0 =
            bloch(std::sqrt(c0sq) * std::cos(phase), std::sqrt(c0sq) * std::sin(phase), 0.1);
        const auto sol = analytic_one_qubit(m0, 0.2, Branch::minus).solution;
        const RealMatrix J = residual_jacobian(sol.xi, sol.eta, s.blocks, m0.head(2));
        CHECK(std::abs(J.fullPivLu().determinant()) > 1e-8);
    }
}

TEST_CASE("analytic one-qubit reproduces the worked example on both branches") {
    const double gamma = 0.7;
    const RealVector m0 = bloch(kSqrt2 / 2.0, 0.0, kSqrt2 / 2.0);
    for (Branch branch : {Branch::minus, Branch::plus}) {
        const OneQubitControls oc = analytic_one_qubit(m0, gamma, branch);
        CHECK(oc.solution.xi(0) == doctest::Approx(0.0));
        CHECK(oc.solution.xi(1) == doctest::Approx(-kSqrt2 * gamma / 2.0).epsilon(1e-14));
        CHECK(oc.solution.eta(0) == doctest::Approx(-0.5).epsilon(1e-14));
        CHECK(oc.amplitude == doctest::Approx(kSqrt2 * gamma / 2.0).epsilon(1e-14));
        CHECK(oc.solution.residual_norm <= 1e-12);
        CHECK(oc.solution.status == SolveStatus::exact);
    }
}

TEST_CASE("analytic one-qubit branch consistency across the feasible disk") {
    std::mt19937_64 rng(555);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        const double c0sq = 0.499 * unif(rng) + 1e-4;
        const double phase = 2 * M_PI * unif(rng);
        const double z = 0.6 * (2 * unif(rng) - 1);
        const RealVector m0 =
            bloch(std::sqrt(c0sq) * std::cos(phase), std::sqrt(c0sq) * std::sin(phase), z);
        if (m0.norm() > 0.99) continue;
        const auto minus = analytic_one_qubit(m0, 1.0, Branch::minus);
        const auto plus = analytic_one_qubit(m0, 1.0, Branch::plus);
        CHECK(minus.solution.residual_norm <= 1e-12);
        CHECK(plus.solution.residual_norm <= 1e-12);
        CHECK(minus.amplitude <= plus.amplitude + 1e-14);
        // Phase is branch independent: arctan(-m0x / m0y).
        CHECK(std::abs(std::remainder(minus.phase - plus.phase, 2 * M_PI)) <= 1e-10);
    }
}

TEST_CASE("analytic one-qubit degenerate and infeasible cases") {
    const OneQubitControls deg = analytic_one_qubit(bloch(0.0, 0.0, 0.4), 0.5);
    CHECK(deg.solution.degenerate);
    CHECK(deg.solution.xi.norm() == 0.0);
    CHECK(deg.solution.eta(0) == doctest::Approx(-1.0));
    CHECK(deg.amplitude == 0.0);
    CHECK(deg.solution.residual_norm <= 1e-12);

    CHECK_THROWS_AS(analytic_one_qubit(bloch(0.8, 0.0, 0.0), 0.5), Error);
    CHECK_THROWS_AS(analytic_one_qubit(bloch(0.9, 0.9, 0.9), 0.5), Error);
}

TEST_CASE("solver matches an analytic branch on random feasible states") {
    const auto s = one_qubit(1.0);
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    SolveOptions opts;
    int solved = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const double c0sq = 0.5 * unif(rng);
        const double phase = 2 * M_PI * unif(rng);
        const double z = 0.7 * (2 * unif(rng) - 1);
        const RealVector m0 =
            bloch(std::sqrt(c0sq) * std::cos(phase), std::sqrt(c0sq) * std::sin(phase), z);
        if (m0.norm() > 0.99 || c0sq < 1e-6) continue;
        const StationarySolution sol = solve_stationary(s.blocks, m0.head(2), opts);
        REQUIRE(sol.status == SolveStatus::exact);
        CHECK(sol.residual_norm <= 1e-10);
        const auto minus = analytic_one_qubit(m0, 1.0, Branch::minus).solution;
        const auto plus = analytic_one_qubit(m0, 1.0, Branch::plus).solution;
        const double d_minus = (sol.xi - minus.xi).norm() + (sol.eta - minus.eta).norm();
        const double d_plus = (sol.xi - plus.xi).norm() + (sol.eta - plus.eta).norm();
        CHECK(std::min(d_minus, d_plus) <= 1e-8);
        ++solved;
    }
    CHECK(solved >= 90);
}

TEST_CASE("solver reports least_squares or failed beyond the feasibility boundary") {
    const auto s = one_qubit(1.0);
    RealVector m01(2);
    m01 << 0.9, 0.0;  // C0^2 = 0.81 > 1/2
    SolveOptions opts;
    opts.allow_least_squares = true;
    const StationarySolution lsq = solve_stationary(s.blocks, m01, opts);
    CHECK(lsq.status == SolveStatus::least_squares);
    CHECK(lsq.residual_norm > 1e-3);
    // Least-squares dominance: no worse than the no-control stationary point.
    const RealVector eta0 = s.blocks.D22.fullPivLu().solve(
        -(s.blocks.D21 * m01 + s.blocks.g2));
    CHECK(lsq.residual_norm <=
          full_resid_norm(RealVector::Zero(2), eta0, s.blocks, m01) + 1e-12);

    opts.allow_least_squares = false;
    const StationarySolution failed = solve_stationary(s.blocks, m01, opts);
    CHECK(failed.status == SolveStatus::failed);
}

TEST_CASE("solver refuses to run when assumptions fail unless overridden") {
    PresetSystem sys = preset_system(SystemPreset::one_qubit);
    // Kill H2 by removing dissipation: D = 0 is not strictly negative.
    sys.spec.lindblads.clear();
    const VectorizedSystem vs = vectorize(sys.spec, sys.basis, sys.split);
    const BlockForm blocks = block_split(vs);
    RealVector m01(2);
    m01 << 0.1, 0.0;
    CHECK_THROWS_AS(solve_stationary(blocks, m01, {}), Error);
    SolveOptions opts;
    opts.override_assumptions = true;
    CHECK_NOTHROW(solve_stationary(blocks, m01, opts));
}

TEST_CASE("qutrit preset: frozen exact root and the Newton solve") {
    const PresetSystem sys = preset_system(SystemPreset::qutrit_v);
    const VectorizedSystem vs = vectorize(sys.spec, sys.basis, sys.split);
    const BlockForm blocks = block_split(vs);
    const CoherenceVector m0 = rho_to_coherence(sys.rho0, sys.basis);
    const RealVector m01 = blocks.permute(m0.m).head(4);
    const double gamma = 0.2;

    // Exact closed form of the unique real root, derived by eliminating eta
    // and solving the remaining polynomial system symbolically.
    RealVector xi_exact(4), eta_exact(4);
    xi_exact << 0.0, gamma * kSqrt2 / 4.0, 0.0, gamma * kSqrt2 / 4.0;
    eta_exact << kSqrt2 / 8.0, 0.0, 0.0, -5.0 * std::sqrt(6.0) / 24.0;
    CHECK(full_resid_norm(xi_exact, eta_exact, blocks, m01) <= 1e-14);

    const StationarySolution sol = solve_stationary(blocks, m01, {});
    REQUIRE(sol.status == SolveStatus::exact);
    CHECK(sol.residual_norm <= 1e-11);
    // The root is defective (singular Jacobian), so parameter accuracy is
    // limited to about the square root of the residual floor.
    CHECK((sol.xi - xi_exact).norm() <= 1e-6);
    CHECK((sol.eta - eta_exact).norm() <= 1e-6);
}

TEST_CASE("two-qubit mixed state: published control constants solve exactly") {
    const PresetSystem sys = preset_system(SystemPreset::two_qubit);
    const VectorizedSystem vs = vectorize(sys.spec, sys.basis, sys.split);
    const BlockForm blocks = block_split(vs);
    const CoherenceVector m0 = rho_to_coherence(sys.rho0, sys.basis);
    const RealVector m01 = blocks.permute(m0.m).head(9);
    const double gamma = 0.2;

    RealVector xi_pub = RealVector::Zero(9);
    xi_pub(1) = -gamma / 2.0;  // xy
    xi_pub(3) = -gamma / 2.0;  // yx
    xi_pub(8) = gamma / 4.0;   // zz
    RealVector eta_pub(6);
    eta_pub << 0.0, 0.0, -0.25, 0.0, 0.0, -0.25;
    CHECK(full_resid_norm(xi_pub, eta_pub, blocks, m01) <= 1e-14);

    // The zz control annihilates the stationary trajectory, so the root set is
    // a manifold; seeding with the published constants pins that representative
    // and the solver verifies it.
    SolveOptions opts;
    opts.xi0 = xi_pub;
    const StationarySolution sol = solve_stationary(blocks, m01, opts);
    REQUIRE(sol.status == SolveStatus::exact);
    CHECK(sol.residual_norm <= 1e-13);
    CHECK((sol.xi - xi_pub).norm() <= 1e-12);
    CHECK((sol.eta - eta_pub).norm() <= 1e-12);

    // An unseeded solve still finds an exact root with the same oscillatory
    // part; only the free zz component differs.
    const StationarySolution free_sol = solve_stationary(blocks, m01, {});
    REQUIRE(free_sol.status == SolveStatus::exact);
    CHECK(free_sol.residual_norm <= 1e-11);
    CHECK(free_sol.xi(1) == doctest::Approx(-gamma / 2.0).epsilon(1e-8));
    CHECK(free_sol.xi(3) == doctest::Approx(-gamma / 2.0).epsilon(1e-8));
}

TEST_CASE("two-qubit Bell state: exact solve fails, least squares returned") {
    const PresetSystem sys = preset_system(SystemPreset::two_qubit);
    const VectorizedSystem vs = vectorize(sys.spec, sys.basis, sys.split);
    const BlockForm blocks = block_split(vs);
    const CoherenceVector m0 = rho_to_coherence(bell_phi0_density(), sys.basis);
    const RealVector m01 = blocks.permute(m0.m).head(9);
    const StationarySolution sol = solve_stationary(blocks, m01, {});
    CHECK(sol.status == SolveStatus::least_squares);
    CHECK(sol.residual_norm > 0.01);
    CHECK(sol.residual_norm < 0.2);
}

TEST_CASE("control law reproduces the worked sinusoids and conserves the norm") {
    const auto s = one_qubit(0.2);
    const double gamma = 0.2;
    const auto sol = analytic_one_qubit(bloch(kSqrt2 / 2, 0, kSqrt2 / 2), gamma).solution;
    const ControlLaw law = make_control_law(s.vs, s.blocks, sol, 0.0);
    CHECK((law.at(0.0) - sol.xi).norm() <= 1e-15);
    for (int k = 0; k <= 100; ++k) {
        const double t = 0.1 * k;
        const RealVector u = law.at(t);
        CHECK(std::abs(u(0) - kSqrt2 / 2 * gamma * std::sin(3 * t)) <= 1e-12);
        CHECK(std::abs(u(1) + kSqrt2 / 2 * gamma * std::cos(3 * t)) <= 1e-12);
        CHECK(std::abs(u.norm() - sol.xi.norm()) <= 1e-12);
    }
}

TEST_CASE("two-qubit control channels: constant zz and frequency-2 oscillations") {
    const PresetSystem sys = preset_system(SystemPreset::two_qubit);
    const VectorizedSystem vs = vectorize(sys.spec, sys.basis, sys.split);
    const BlockForm blocks = block_split(vs);
    const double gamma = 0.2;
    RealVector xi = RealVector::Zero(9);
    xi(1) = -gamma / 2.0;
    xi(3) = -gamma / 2.0;
    xi(8) = gamma / 4.0;
    StationarySolution sol;
    sol.xi = xi;
    sol.eta = RealVector::Zero(6);
    sol.status = SolveStatus::exact;
    const ControlLaw law = make_control_law(vs, blocks, sol, 0.0);
    const auto channels = decompose_controls(law);
    REQUIRE(channels.size() == 9);
    CHECK(channels[8].constant == doctest::Approx(gamma / 4.0).epsilon(1e-12));
    CHECK(channels[8].tones.empty());
    for (int idx : {0, 1, 3, 4}) {
        REQUIRE(channels[static_cast<size_t>(idx)].tones.size() == 1);
        const auto& tone = channels[static_cast<size_t>(idx)].tones[0];
        CHECK(tone.frequency == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(tone.amplitude == doctest::Approx(gamma / 2.0).epsilon(1e-12));
        CHECK(std::abs(channels[static_cast<size_t>(idx)].constant) <= 1e-12);
    }
    for (int idx : {2, 5, 6, 7}) {
        CHECK(channels[static_cast<size_t>(idx)].peak() <= 1e-12);
    }
    // Direct time-domain cross-check of the four claimed waveforms.
    for (double t : {0.0, 0.33, 1.7}) {
        const RealVector u = law.at(t);
        CHECK(std::abs(u(1) + gamma / 2 * std::cos(2 * t)) <= 1e-12);
        CHECK(std::abs(u(3) + gamma / 2 * std::cos(2 * t)) <= 1e-12);
        CHECK(std::abs(u(0) - gamma / 2 * std::sin(2 * t)) <= 1e-12);
        CHECK(std::abs(u(4) + gamma / 2 * std::sin(2 * t)) <= 1e-12);
        CHECK(std::abs(u(8) - gamma / 4) <= 1e-12);
    }
}

TEST_CASE("make_control_law rejects misaligned control sets") {
    PresetSystem sys = preset_system(SystemPreset::one_qubit);
    // Swap the control pair: u_1 drives sigma_y, u_2 drives sigma_x. The
    // commutation alignment with O0_11 then fails.
    std::swap(sys.spec.controls[0], sys.spec.controls[1]);
    const VectorizedSystem vs = vectorize(sys.spec, sys.basis, sys.split);
    const BlockForm blocks = block_split(vs);
    StationarySolution sol;
    sol.xi = RealVector::Zero(2);
    sol.eta = RealVector::Constant(1, -1.0);
    sol.status = SolveStatus::exact;
    CHECK_THROWS_AS(make_control_law(vs, blocks, sol, 0.0), Error);
}

TEST_CASE("stationary trajectory starts at (m0^1, eta) and solves the controlled equation") {
    const PresetSystem sys = preset_system(SystemPreset::qutrit_v);
    const VectorizedSystem vs = vectorize(sys.spec, sys.basis, sys.split);
    const BlockForm blocks = block_split(vs);
    const CoherenceVector m0 = rho_to_coherence(sys.rho0, sys.basis);
    const RealVector m01 = blocks.permute(m0.m).head(4);
    const double gamma = 0.2;
    RealVector xi(4), eta(4);
    xi << 0.0, gamma * kSqrt2 / 4.0, 0.0, gamma * kSqrt2 / 4.0;
    eta << kSqrt2 / 8.0, 0.0, 0.0, -5.0 * std::sqrt(6.0) / 24.0;

    const CoherenceVector at_t0 =
        stationary_trajectory(m01, eta, blocks, sys.basis.convention, 0.0, 0.0);
    RealVector expected_perm(8);
    expected_perm << m01, eta;
    CHECK((at_t0.m - blocks.unpermute(expected_perm)).norm() <= 1e-14);

    StationarySolution sol;
    sol.xi = xi;
    sol.eta = eta;
    sol.status = SolveStatus::exact;
    const ControlLaw law = make_control_law(vs, blocks, sol, 0.0);
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> tdist(0.0, 10.0);
    for (int k = 0; k < 50; ++k) {
        const double t = tdist(rng);
        const RealVector minf =
            stationary_trajectory(m01, eta, blocks, sys.basis.convention, 0.0, t).m;
        // The stationarity identity: control and dissipation cancel exactly,
        // leaving d minf / dt = O0 minf.
        const RealVector u = law.at(t);
        RealVector cancel = vs.D * minf + vs.g;
        for (int i = 0; i < 4; ++i) cancel += u(i) * (vs.controls_O[static_cast<size_t>(i)] * minf);
        CHECK(cancel.norm() <= 1e-9);
    }
}

TEST_CASE("one-qubit stationary p-part rotates with the free system") {
    const auto s = one_qubit(0.2);
    const RealVector m0 = bloch(kSqrt2 / 2, 0, kSqrt2 / 2);
    const auto sol = analytic_one_qubit(m0, 0.2).solution;
    for (double t : {0.0, 0.7, 2.0}) {
        const RealVector minf =
            stationary_trajectory(m0.head(2), sol.eta, s.blocks,
                                  BasisConvention::pauli_bloch, 0.0, t)
                .m;
        CHECK(minf(0) == doctest::Approx(kSqrt2 / 2 * std::cos(3 * t)).epsilon(1e-12));
        CHECK(minf(1) == doctest::Approx(kSqrt2 / 2 * std::sin(3 * t)).epsilon(1e-12));
        CHECK(minf(2) == doctest::Approx(-0.5).epsilon(1e-12));
    }
}
