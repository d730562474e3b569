#include "qdecouple/presets.hpp"

#include <cmath>

namespace qdec {

PresetParams default_params(SystemPreset kind) {
    PresetParams p;
    p.gamma = 0.2;
    switch (kind) {
        case SystemPreset::one_qubit: p.omega = 3.0; break;
        case SystemPreset::qutrit_v: p.omega = 0.0; break;
        case SystemPreset::two_qubit: p.omega = 1.0; break;
    }
    return p;
}

namespace {

ComplexMatrix lowering(int dim, int ground, int excited) {
    ComplexMatrix L = ComplexMatrix::Zero(dim, dim);
    L(ground, excited) = 1.0;
    return L;
}

ComplexMatrix kron(const ComplexMatrix& A, const ComplexMatrix& B) {
    ComplexMatrix K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

PresetSystem one_qubit_system(const PresetParams& params) {
    PresetSystem ps;
    ps.name = "one_qubit";
    ps.omega = params.omega;
    auto [basis, split] = preset_split(SplitPreset::one_qubit);
    ps.basis = basis;
    ps.split = split;
    ps.spec.dim = 2;
    ps.spec.H0 = 0.5 * params.omega * basis.elements[2];
    ps.spec.controls = {0.5 * basis.elements[0], 0.5 * basis.elements[1]};
    // |1> is the sigma_z ground state; unit-normalized spontaneous emission.
    ps.spec.lindblads = {{lowering(2, 1, 0), params.gamma}};
    const double q = std::sqrt(2.0) / 4.0;
    ps.rho0 = 0.5 * ComplexMatrix::Identity(2, 2) + q * basis.elements[0] + q * basis.elements[2];
    ps.control_names = {"u_x", "u_y"};
    ps.coherence_groups = {{0, 1}};
    ps.coherence_names = {"C2"};
    return ps;
}

PresetSystem qutrit_system(const PresetParams& params) {
    PresetSystem ps;
    ps.name = "qutrit_v";
    auto [basis, split] = preset_split(SplitPreset::qutrit_v);
    ps.basis = basis;
    ps.split = split;
    ps.spec.dim = 3;
    // Hydrogen-like V configuration: E_n = -13.6 / n^2 per tau0.
    const double E0 = -13.6, E1 = -13.6 / 4.0, E2 = -13.6 / 9.0;
    ComplexMatrix H0 = ComplexMatrix::Zero(3, 3);
    H0(0, 0) = E0;
    H0(1, 1) = E1;
    H0(2, 2) = E2;
    ps.spec.H0 = H0;
    ps.spec.controls = {basis.elements[3], basis.elements[4], basis.elements[5],
                        basis.elements[6]};
    ps.spec.lindblads = {{lowering(3, 0, 1), params.gamma}, {lowering(3, 0, 2), params.gamma}};
    // 1/2 |v1><v1| + 1/2 |v2><v2| with v_i = (|0> + |i>)/sqrt(2).
    Eigen::Vector3cd v1, v2;
    const double h = std::sqrt(2.0) / 2.0;
    v1 << h, h, 0.0;
    v2 << h, 0.0, h;
    ps.rho0 = 0.5 * (v1 * v1.adjoint()) + 0.5 * (v2 * v2.adjoint());
    ps.control_names = {"u_4", "u_5", "u_6", "u_7"};
    ps.coherence_groups = {{3, 4}, {5, 6}};
    ps.coherence_names = {"C01_2", "C02_2"};
    return ps;
}

PresetSystem two_qubit_system(const PresetParams& params) {
    PresetSystem ps;
    ps.name = "two_qubit";
    ps.omega = params.omega;
    auto [basis, split] = preset_split(SplitPreset::two_qubit);
    ps.basis = basis;
    ps.split = split;
    ps.spec.dim = 4;
    // Basis ordering: 9 p elements si x sj / 2 (row-major), then
    // sx I/2, sy I/2, sz I/2, I sx/2, I sy/2, I sz/2.
    ps.spec.H0 = params.omega * (basis.elements[11] + basis.elements[14]);
    for (int i = 0; i < 9; ++i) ps.spec.controls.push_back(basis.elements[i]);
    const ComplexMatrix I2 = ComplexMatrix::Identity(2, 2);
    const ComplexMatrix low = lowering(2, 1, 0);
    ps.spec.lindblads = {{kron(low, I2), params.gamma}, {kron(I2, low), params.gamma}};
    ps.rho0 = 0.125 * ComplexMatrix::Identity(4, 4) + 0.5 * bell_phi0_density();
    const char* axes = "xyz";
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            ps.control_names.push_back(std::string("u_") + axes[i] + axes[j]);
    for (int i = 0; i < 9; ++i) ps.coherence_groups.push_back({i});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            ps.coherence_names.push_back(std::string("m_") + axes[i] + axes[j] + "_2");
    return ps;
}

}  // namespace

ComplexMatrix bell_phi0_density() {
    Eigen::Vector4cd phi;
    phi << 1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0);
    return phi * phi.adjoint();
}

PresetSystem preset_system(SystemPreset kind, const PresetParams& params) {
    switch (kind) {
        case SystemPreset::one_qubit: return one_qubit_system(params);
        case SystemPreset::qutrit_v: return qutrit_system(params);
        case SystemPreset::two_qubit: return two_qubit_system(params);
    }
    throw Error(ErrorKind::config, "preset_system: unknown preset");
}

PresetSystem preset_system(SystemPreset kind) {
    return preset_system(kind, default_params(kind));
}

SystemPreset parse_system_preset(const std::string& name) {
    if (name == "one_qubit") return SystemPreset::one_qubit;
    if (name == "qutrit_v") return SystemPreset::qutrit_v;
    if (name == "two_qubit") return SystemPreset::two_qubit;
    throw Error(ErrorKind::config, "unknown system preset: " + name);
}

std::string to_string(SystemPreset kind) {
    switch (kind) {
        case SystemPreset::one_qubit: return "one_qubit";
        case SystemPreset::qutrit_v: return "qutrit_v";
        case SystemPreset::two_qubit: return "two_qubit";
    }
    return "unknown";
}

}  // namespace qdec
