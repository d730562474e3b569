#include <doctest.h>

#include <cmath>
#include <random>

#include "qdecouple/presets.hpp"
#include "qdecouple/vectorize.hpp"

using namespace qdec;

namespace {

const double kSqrt2 = std::sqrt(2.0);
const double kSqrt6 = std::sqrt(6.0);

ComplexMatrix random_hermitian(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix A(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) A(r, c) = Complex(gauss(rng), gauss(rng));
    return 0.5 * (A + A.adjoint());
}

ComplexMatrix random_density(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix A(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) A(r, c) = Complex(gauss(rng), gauss(rng));
    ComplexMatrix rho = A * A.adjoint();
    return rho / rho.trace().real();
}

OpenSystemSpec random_spec(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> rate(0.1, 2.0);
    OpenSystemSpec spec;
    spec.dim = n;
    spec.H0 = random_hermitian(n, rng);
    spec.controls = {random_hermitian(n, rng), random_hermitian(n, rng)};
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int ch = 0; ch < 2; ++ch) {
        ComplexMatrix L(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) L(r, c) = Complex(gauss(rng), gauss(rng));
        spec.lindblads.push_back({L, rate(rng)});
    }
    return spec;
}

CartanSplit trivial_split(int size) {
    CartanSplit split;
    for (int i = 0; i < size; ++i) split.eps_indices.push_back(i);
    return split;
}

}  // namespace

TEST_CASE("Bloch coordinates of the worked initial state") {
    const OrthonormalBasis bloch = pauli_bloch_basis();
    const double q = kSqrt2 / 4.0;
    const ComplexMatrix rho = 0.5 * ComplexMatrix::Identity(2, 2) + q * bloch.elements[0] +
                              q * bloch.elements[2];
    const CoherenceVector m = rho_to_coherence(rho, bloch);
    CHECK(m.m(0) == doctest::Approx(kSqrt2 / 2.0).epsilon(1e-14));
    CHECK(m.m(1) == doctest::Approx(0.0));
    CHECK(m.m(2) == doctest::Approx(kSqrt2 / 2.0).epsilon(1e-14));
    CHECK((coherence_to_rho(m, bloch) - rho).norm() <= 1e-14);
}

TEST_CASE("maximally mixed state has zero coherence vector") {
    for (int N : {2, 3, 4}) {
        const OrthonormalBasis basis = gellmann_basis(N);
        const ComplexMatrix rho = ComplexMatrix::Identity(N, N) / static_cast<double>(N);
        CHECK(rho_to_coherence(rho, basis).m.norm() <= 1e-14);
    }
}

TEST_CASE("qutrit initial state coordinates match the printed expansion") {
    const PresetSystem sys = preset_system(SystemPreset::qutrit_v);
    const CoherenceVector m = rho_to_coherence(sys.rho0, sys.basis);
    RealVector expected = RealVector::Zero(8);
    expected(3) = kSqrt2 / 4.0;   // Omega_4
    expected(5) = kSqrt2 / 4.0;   // Omega_6
    expected(7) = -kSqrt6 / 12.0; // Omega_8
    CHECK((m.m - expected).norm() <= 1e-14);
    CHECK((coherence_to_rho(m, sys.basis) - sys.rho0).norm() <= 1e-14);
}

TEST_CASE("state conversion round trip on random densities") {
    std::mt19937_64 rng(31);
    for (int N : {2, 3, 4}) {
        const OrthonormalBasis basis = gellmann_basis(N);
        for (int trial = 0; trial < 10; ++trial) {
            const ComplexMatrix rho = random_density(N, rng);
            const CoherenceVector m = rho_to_coherence(rho, basis);
            CHECK((coherence_to_rho(m, basis) - rho).norm() <= 1e-12);
            CHECK(m.purity_excess(N) <= 1e-9);
        }
    }
}

TEST_CASE("rho_to_coherence validates the state") {
    const OrthonormalBasis basis = gellmann_basis(2);
    CHECK_THROWS_AS(rho_to_coherence(2.0 * ComplexMatrix::Identity(2, 2), basis), Error);
    ComplexMatrix bad(2, 2);
    bad << 0.5, 1.0, 0.0, 0.5;
    CHECK_THROWS_AS(rho_to_coherence(bad, basis), Error);
}

TEST_CASE("one-qubit amplitude damping vectorizes to the printed D and g") {
    const PresetSystem sys = preset_system(SystemPreset::one_qubit);
    const VectorizedSystem vs = vectorize(sys.spec, sys.basis, sys.split);
    const double gamma = 0.2;
    RealMatrix D_expected = RealMatrix::Zero(3, 3);
    D_expected.diagonal() << -gamma / 2.0, -gamma / 2.0, -gamma;
    RealVector g_expected(3);
    g_expected << 0.0, 0.0, -gamma;
    CHECK((vs.D - D_expected).norm() <= 1e-14);
    CHECK((vs.g - g_expected).norm() <= 1e-14);
    // O0 = omega O_z with omega = 3.
    CHECK(vs.O0(0, 1) == doctest::Approx(-3.0));
    CHECK(vs.O0(1, 0) == doctest::Approx(3.0));
    CHECK(vs.O0.norm() == doctest::Approx(std::sqrt(18.0)));
}

TEST_CASE("closed systems vectorize to D = 0, g = 0") {
    OpenSystemSpec spec;
    spec.dim = 3;
    std::mt19937_64 rng(3);
    spec.H0 = random_hermitian(3, rng);
    const OrthonormalBasis basis = gellmann_basis(3);
    const VectorizedSystem vs = vectorize(spec, basis, trivial_split(basis.size()));
    CHECK(vs.D.norm() == 0.0);
    CHECK(vs.g.norm() == 0.0);
}

TEST_CASE("vectorized equation matches the density-matrix derivative") {
    // Oracle identity: the coherence-vector RHS equals the projection of the
    // master-equation RHS, for random systems, states and control values.
    std::mt19937_64 rng(940721);
    int checked = 0;
    for (int trial = 0; trial < 67; ++trial) {
        const int N = 2 + trial % 3;
        const OrthonormalBasis basis = gellmann_basis(N);
        const OpenSystemSpec spec = random_spec(N, rng);
        const VectorizedSystem vs = vectorize(spec, basis, trivial_split(basis.size()));
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int s = 0; s < 3; ++s) {
            const ComplexMatrix rho = random_density(N, rng);
            const CoherenceVector m = rho_to_coherence(rho, basis);
            RealVector u(2);
            u << gauss(rng), gauss(rng);
            RealVector rhs_vec = vs.O0 * m.m + vs.D * m.m + vs.g;
            for (int i = 0; i < 2; ++i)
                rhs_vec += u(i) * (vs.controls_O[static_cast<size_t>(i)] * m.m);
            const ComplexMatrix drho = master_equation_rhs(spec, rho, u);
            RealVector rhs_oracle(basis.size());
            for (int j = 0; j < basis.size(); ++j)
                rhs_oracle(j) = (basis.elements[j] * drho).trace().real();
            CHECK((rhs_vec - rhs_oracle).norm() <=
                  1e-9 * std::max(1.0, rhs_oracle.norm()));
            ++checked;
        }
    }
    CHECK(checked == 201);
}

TEST_CASE("assumption checks pass on every preset") {
    for (SystemPreset kind :
         {SystemPreset::one_qubit, SystemPreset::qutrit_v, SystemPreset::two_qubit}) {
        const PresetSystem sys = preset_system(kind);
        const VectorizedSystem vs = vectorize(sys.spec, sys.basis, sys.split);
        const AssumptionReport rep = check_assumptions(vs);
        CHECK(rep.h1);
        CHECK(rep.h2);
        CHECK(rep.h3);
        CHECK(rep.all());
        CHECK(rep.h2_max_eigenvalue < 0.0);
    }
}

TEST_CASE("a transverse free Hamiltonian breaks H1") {
    // H0 ~ sigma_x with amplitude damping along z: [O0, D] != 0.
    PresetSystem sys = preset_system(SystemPreset::one_qubit);
    sys.spec.H0 = 0.5 * 3.0 * sys.basis.elements[0];
    const VectorizedSystem vs = vectorize(sys.spec, sys.basis, sys.split);
    const AssumptionReport rep = check_assumptions(vs);
    CHECK_FALSE(rep.h1);
    CHECK(rep.h1_commutator_norm > 1e-3);
}

TEST_CASE("block_split produces the printed one-qubit p-block") {
    const PresetSystem sys = preset_system(SystemPreset::one_qubit);
    const VectorizedSystem vs = vectorize(sys.spec, sys.basis, sys.split);
    const BlockForm blocks = block_split(vs);
    REQUIRE(blocks.m == 2);
    CHECK(blocks.O0_11(0, 1) == doctest::Approx(-3.0));
    CHECK(blocks.O0_11(1, 0) == doctest::Approx(3.0));
    CHECK(blocks.O0_22.norm() <= 1e-14);
    CHECK(blocks.g1.norm() <= 1e-14);
    CHECK(blocks.g2(0) == doctest::Approx(-0.2));
    // O_x^{12} = (0, -1)^T, O_y^{12} = (1, 0)^T.
    CHECK(blocks.controls_O12[0](0, 0) == doctest::Approx(0.0));
    CHECK(blocks.controls_O12[0](1, 0) == doctest::Approx(-1.0));
    CHECK(blocks.controls_O12[1](0, 0) == doctest::Approx(1.0));
    CHECK(blocks.controls_O12[1](1, 0) == doctest::Approx(0.0));
}

TEST_CASE("block_split handles the trivial split") {
    OpenSystemSpec spec;
    spec.dim = 2;
    std::mt19937_64 rng(17);
    spec.H0 = random_hermitian(2, rng);
    const OrthonormalBasis basis = gellmann_basis(2);
    const VectorizedSystem vs = vectorize(spec, basis, trivial_split(3));
    const BlockForm blocks = block_split(vs);
    CHECK(blocks.m == 0);
    CHECK(blocks.O0_22.rows() == 3);
    CHECK((blocks.O0_22 - vs.O0).norm() <= 1e-14);
}

TEST_CASE("block_split rejects H3 violations with the leakage norm") {
    PresetSystem sys = preset_system(SystemPreset::one_qubit);
    sys.spec.H0 = 0.5 * sys.basis.elements[0];  // sigma_x / 2 lies in p
    const VectorizedSystem vs = vectorize(sys.spec, sys.basis, sys.split);
    CHECK_THROWS_WITH_AS(block_split(vs), doctest::Contains("leakage"), Error);
}

TEST_CASE("block_split rejects controls outside p") {
    PresetSystem sys = preset_system(SystemPreset::one_qubit);
    sys.spec.controls.push_back(0.5 * sys.basis.elements[2]);  // sigma_z / 2 lies in eps
    const VectorizedSystem vs = vectorize(sys.spec, sys.basis, sys.split);
    CHECK_THROWS_AS(block_split(vs), Error);
}

TEST_CASE("Lemma 2 conjugation identity holds for every preset") {
    std::mt19937_64 rng(62);
    std::uniform_real_distribution<double> tdist(0.0, 10.0);
    for (SystemPreset kind :
         {SystemPreset::one_qubit, SystemPreset::qutrit_v, SystemPreset::two_qubit}) {
        const PresetSystem sys = preset_system(kind);
        const VectorizedSystem vs = vectorize(sys.spec, sys.basis, sys.split);
        const BlockForm blocks = block_split(vs);
        const AntisymmetricExp E0(vs.O0);
        const AntisymmetricExp E11(blocks.O0_11);
        for (int rep = 0; rep < 20; ++rep) {
            const double t = tdist(rng);
            const RealMatrix left = E0.at(-t);
            const RealMatrix right = E0.at(t);
            const RealMatrix R11 = E11.at(t);
            for (int i = 0; i < blocks.m; ++i) {
                RealMatrix lhs = left * vs.controls_O[static_cast<size_t>(i)] * right;
                for (int j = 0; j < blocks.m; ++j)
                    lhs -= R11(i, j) * vs.controls_O[static_cast<size_t>(j)];
                CHECK(lhs.norm() <= 1e-9);
            }
        }
    }
}

TEST_CASE("Bloch and orthonormal conventions differ by sqrt(2) on states") {
    const PresetSystem sys = preset_system(SystemPreset::one_qubit);
    // The same physical model expressed over the orthonormal basis.
    OpenSystemSpec spec = sys.spec;
    const OrthonormalBasis ortho = gellmann_basis(2);
    const CartanSplit split = sys.split;
    const VectorizedSystem vb = vectorize(sys.spec, sys.basis, sys.split);
    const VectorizedSystem vo = vectorize(spec, ortho, split);
    const CoherenceVector mb = rho_to_coherence(sys.rho0, sys.basis);
    const CoherenceVector mo = rho_to_coherence(sys.rho0, ortho);
    CHECK((mb.m - kSqrt2 * mo.m).norm() <= 1e-12);
    // The generator matrices are convention independent; D matches entrywise
    // and g scales with the coordinates.
    CHECK((vb.O0 - vo.O0).norm() <= 1e-12);
    CHECK((vb.D - vo.D).norm() <= 1e-12);
    CHECK((vb.g - kSqrt2 * vo.g).norm() <= 1e-12);
}
