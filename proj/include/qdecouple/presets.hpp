#pragma once

#include <string>
#include <vector>

#include "qdecouple/vectorize.hpp"

namespace qdec {

enum class SystemPreset { one_qubit, qutrit_v, two_qubit };

struct PresetParams {
    double gamma = 0.2;  // damping rate, units 1/tau0
    // one_qubit: Rabi frequency omega; two_qubit: omega1 = omega2.
    double omega = 0.0;
};

struct PresetSystem {
    std::string name;
    OpenSystemSpec spec;
    OrthonormalBasis basis;
    CartanSplit split;
    ComplexMatrix rho0;
    std::vector<std::string> control_names;
    std::vector<std::vector<int>> coherence_groups;  // coordinate index groups
    std::vector<std::string> coherence_names;
    double omega = 0.0;  // free precession frequency (one-qubit Lidar comparator)
};

PresetParams default_params(SystemPreset kind);

// The worked systems with the published parameters. The one-qubit model uses
// the Bloch convention with H0 = (omega/2) sigma_z and unit-normalized
// lowering operators so that D = diag(-G/2, -G/2, -G), g = (0, 0, -G).
PresetSystem preset_system(SystemPreset kind, const PresetParams& params);
PresetSystem preset_system(SystemPreset kind);

// |phi0> = (|00> + |11>)/sqrt(2) projector, the two-qubit pure initial state.
ComplexMatrix bell_phi0_density();

SystemPreset parse_system_preset(const std::string& name);
std::string to_string(SystemPreset kind);

}  // namespace qdec
