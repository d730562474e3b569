#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "qdecouple/dynamics.hpp"
#include "qdecouple/presets.hpp"

namespace qdec {

struct TimeConfig {
    double t0 = 0.0;
    double t_end = 10.0;
    double step = 1e-3;         // integrator substep
    double output_step = 0.01;  // grid spacing of emitted samples
    bool adaptive = false;
    double rtol = 1e-9;
    double atol = 1e-12;
};

struct ComparisonFlags {
    bool uncontrolled = true;
    bool target = true;
    bool lidar = false;
    bool oracle = false;
};

struct OutputConfig {
    std::string directory = "out";
    std::string prefix;
};

// A scenario is either a named preset or an inline system description.
struct InlineSystem {
    OpenSystemSpec spec;
    BasisConvention convention = BasisConvention::orthonormal;
    CartanSplit split;
};

struct ScenarioConfig {
    std::string name;
    std::optional<SystemPreset> preset;
    PresetParams params;
    std::optional<InlineSystem> inline_system;
    std::optional<ComplexMatrix> rho0;       // overrides the preset initial state
    std::optional<RealVector> coherence0;    // alternative initial state form
    TimeConfig time;
    SolveOptions solver;
    // one_qubit preset only: use the closed-form solution with this branch
    // instead of the Newton solve. The worked example sits exactly on the
    // C0^2 = 1/2 feasibility boundary where the numeric root is defective.
    std::optional<Branch> analytic_branch = Branch::minus;
    ComparisonFlags comparisons;
    OutputConfig outputs;
};

ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::filesystem::path& path);
std::string emit_config(const ScenarioConfig& config);

enum class ScenarioPreset { one_qubit, qutrit_v, two_qubit_mixed, two_qubit_bell };

ScenarioPreset parse_scenario_preset(const std::string& name);
std::string to_string(ScenarioPreset kind);

// The shipped scenario configurations with the published parameters.
ScenarioConfig preset_config(ScenarioPreset kind);

struct RunReport {
    std::string name;
    AssumptionReport assumptions;
    bool cartan_ok = false;
    StationarySolution solution;
    std::vector<std::string> files_written;
    // Populated when the corresponding trajectories were produced.
    std::optional<double> final_p_tracking_error;
    std::optional<LidarStatus> lidar_status;
};

// Subcommand bodies. check runs the verification stage only; solve adds the
// stationary solve; run produces trajectories, metrics and all output files.
RunReport check_scenario(const ScenarioConfig& config);
RunReport solve_scenario(const ScenarioConfig& config);
RunReport run_scenario(const ScenarioConfig& config);

// Environment override for OutputConfig::directory.
extern const char* const kOutputDirEnvVar;

}  // namespace qdec
