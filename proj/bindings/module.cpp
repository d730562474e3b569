#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qdecouple/scenario.hpp"

namespace py = pybind11;
using namespace qdec;

namespace {

StationarySolution solve_for(const PresetSystem& sys, const ComplexMatrix& rho0,
                             const SolveOptions& options) {
    const VectorizedSystem vs = vectorize(sys.spec, sys.basis, sys.split);
    const BlockForm blocks = block_split(vs);
    const CoherenceVector m0 = rho_to_coherence(rho0, sys.basis);
    const RealVector m0_1 = blocks.permute(m0.m).head(blocks.m);
    return solve_stationary(blocks, m0_1, options);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Noise-decoupling control synthesis for Markovian open quantum systems";

    py::register_exception<Error>(m, "QdecError");

    py::enum_<BasisConvention>(m, "BasisConvention")
        .value("orthonormal", BasisConvention::orthonormal)
        .value("pauli_bloch", BasisConvention::pauli_bloch);

    py::class_<OrthonormalBasis>(m, "OrthonormalBasis")
        .def_readonly("dim", &OrthonormalBasis::dim)
        .def_readonly("convention", &OrthonormalBasis::convention)
        .def_readonly("elements", &OrthonormalBasis::elements)
        .def_property_readonly("size", &OrthonormalBasis::size)
        .def("element_norm2", &OrthonormalBasis::element_norm2);

    py::class_<CartanSplit>(m, "CartanSplit")
        .def(py::init([](std::vector<int> p, std::vector<int> eps) {
                 return CartanSplit{std::move(p), std::move(eps)};
             }),
             py::arg("p_indices"), py::arg("eps_indices"))
        .def_readonly("p_indices", &CartanSplit::p_indices)
        .def_readonly("eps_indices", &CartanSplit::eps_indices);

    py::class_<CartanViolation>(m, "CartanViolation")
        .def_readonly("relation", &CartanViolation::relation)
        .def_readonly("i", &CartanViolation::i)
        .def_readonly("j", &CartanViolation::j)
        .def_readonly("leak", &CartanViolation::leak);

    py::class_<CartanReport>(m, "CartanReport")
        .def_readonly("ok", &CartanReport::ok)
        .def_readonly("violations", &CartanReport::violations);

    m.def("gellmann_basis", &gellmann_basis, py::arg("dim"));
    m.def("pauli_bloch_basis", &pauli_bloch_basis);
    m.def("commutator", &commutator, py::arg("a"), py::arg("b"));
    m.def("adjoint_rep", &adjoint_rep, py::arg("hamiltonian"), py::arg("basis"));
    m.def("verify_cartan", &verify_cartan, py::arg("basis"), py::arg("split"),
          py::arg("tol") = 1e-10);

    py::enum_<SplitPreset>(m, "SplitPreset")
        .value("one_qubit", SplitPreset::one_qubit)
        .value("qutrit_v", SplitPreset::qutrit_v)
        .value("two_qubit", SplitPreset::two_qubit);
    m.def("preset_split", &preset_split, py::arg("kind"));

    py::class_<LindbladChannel>(m, "LindbladChannel")
        .def(py::init([](ComplexMatrix op, double rate) {
                 return LindbladChannel{std::move(op), rate};
             }),
             py::arg("op"), py::arg("rate"))
        .def_readonly("op", &LindbladChannel::op)
        .def_readonly("rate", &LindbladChannel::rate);

    py::class_<OpenSystemSpec>(m, "OpenSystemSpec")
        .def(py::init([](int dim, ComplexMatrix H0, std::vector<ComplexMatrix> controls,
                         std::vector<LindbladChannel> lindblads) {
                 OpenSystemSpec spec{dim, std::move(H0), std::move(controls),
                                     std::move(lindblads)};
                 spec.validate();
                 return spec;
             }),
             py::arg("dim"), py::arg("H0"), py::arg("controls"), py::arg("lindblads"))
        .def_readonly("dim", &OpenSystemSpec::dim)
        .def_readonly("H0", &OpenSystemSpec::H0)
        .def_readonly("controls", &OpenSystemSpec::controls)
        .def_readonly("lindblads", &OpenSystemSpec::lindblads);

    py::class_<CoherenceVector>(m, "CoherenceVector")
        .def(py::init([](RealVector mm, BasisConvention convention) {
                 return CoherenceVector{std::move(mm), convention};
             }),
             py::arg("m"), py::arg("convention") = BasisConvention::orthonormal)
        .def_readonly("m", &CoherenceVector::m)
        .def_readonly("convention", &CoherenceVector::convention);

    m.def("rho_to_coherence", &rho_to_coherence, py::arg("rho"), py::arg("basis"));
    m.def("coherence_to_rho", &coherence_to_rho, py::arg("m"), py::arg("basis"));

    py::class_<VectorizedSystem>(m, "VectorizedSystem")
        .def_readonly("O0", &VectorizedSystem::O0)
        .def_readonly("controls_O", &VectorizedSystem::controls_O)
        .def_readonly("D", &VectorizedSystem::D)
        .def_readonly("g", &VectorizedSystem::g)
        .def_readonly("basis", &VectorizedSystem::basis)
        .def_readonly("split", &VectorizedSystem::split);

    py::class_<AssumptionReport>(m, "AssumptionReport")
        .def_readonly("h1", &AssumptionReport::h1)
        .def_readonly("h2", &AssumptionReport::h2)
        .def_readonly("h3", &AssumptionReport::h3)
        .def_readonly("h1_commutator_norm", &AssumptionReport::h1_commutator_norm)
        .def_readonly("h1_drift_norm", &AssumptionReport::h1_drift_norm)
        .def_readonly("h2_max_eigenvalue", &AssumptionReport::h2_max_eigenvalue)
        .def_readonly("h3_leak", &AssumptionReport::h3_leak)
        .def("all", &AssumptionReport::all);

    py::class_<BlockForm>(m, "BlockForm")
        .def_readonly("m", &BlockForm::m)
        .def_readonly("perm", &BlockForm::perm)
        .def_readonly("O0_11", &BlockForm::O0_11)
        .def_readonly("O0_22", &BlockForm::O0_22)
        .def_readonly("controls_O12", &BlockForm::controls_O12)
        .def_readonly("D11", &BlockForm::D11)
        .def_readonly("D12", &BlockForm::D12)
        .def_readonly("D21", &BlockForm::D21)
        .def_readonly("D22", &BlockForm::D22)
        .def_readonly("g1", &BlockForm::g1)
        .def_readonly("g2", &BlockForm::g2)
        .def_readonly("assumptions", &BlockForm::assumptions)
        .def("permute", &BlockForm::permute)
        .def("unpermute", &BlockForm::unpermute);

    m.def("vectorize", &vectorize, py::arg("spec"), py::arg("basis"), py::arg("split"));
    m.def("check_assumptions", &check_assumptions, py::arg("system"));
    m.def("block_split", &block_split, py::arg("system"));

    py::enum_<SolveStatus>(m, "SolveStatus")
        .value("exact", SolveStatus::exact)
        .value("least_squares", SolveStatus::least_squares)
        .value("failed", SolveStatus::failed);
    py::enum_<Branch>(m, "Branch").value("plus", Branch::plus).value("minus", Branch::minus);

    py::class_<StationarySolution>(m, "StationarySolution")
        .def_readonly("xi", &StationarySolution::xi)
        .def_readonly("eta", &StationarySolution::eta)
        .def_readonly("residual_norm", &StationarySolution::residual_norm)
        .def_readonly("status", &StationarySolution::status)
        .def_readonly("branch", &StationarySolution::branch)
        .def_readonly("degenerate", &StationarySolution::degenerate);

    py::class_<SolveOptions>(m, "SolveOptions")
        .def(py::init<>())
        .def_readwrite("restarts", &SolveOptions::restarts)
        .def_readwrite("max_iter", &SolveOptions::max_iter)
        .def_readwrite("tol", &SolveOptions::tol)
        .def_readwrite("allow_least_squares", &SolveOptions::allow_least_squares)
        .def_readwrite("seed", &SolveOptions::seed)
        .def_readwrite("override_assumptions", &SolveOptions::override_assumptions)
        .def_readwrite("xi0", &SolveOptions::xi0)
        .def_readwrite("eta0", &SolveOptions::eta0);

    m.def(
        "residual",
        [](const RealVector& xi, const RealVector& eta, const BlockForm& blocks,
           const RealVector& m0_1) { return residual(xi, eta, blocks, m0_1); },
        py::arg("xi"), py::arg("eta"), py::arg("blocks"), py::arg("m0_1"));
    m.def("residual_jacobian", &residual_jacobian, py::arg("xi"), py::arg("eta"),
          py::arg("blocks"), py::arg("m0_1"));
    m.def("solve_stationary", &solve_stationary, py::arg("blocks"), py::arg("m0_1"),
          py::arg("options") = SolveOptions{});

    py::class_<OneQubitControls>(m, "OneQubitControls")
        .def_readonly("solution", &OneQubitControls::solution)
        .def_readonly("amplitude", &OneQubitControls::amplitude)
        .def_readonly("phase", &OneQubitControls::phase);
    m.def("analytic_one_qubit", &analytic_one_qubit, py::arg("m0_bloch"), py::arg("gamma"),
          py::arg("branch") = Branch::minus);

    py::class_<ControlLaw>(m, "ControlLaw")
        .def(py::init<RealVector, const RealMatrix&, double>(), py::arg("xi"), py::arg("O0_11"),
             py::arg("t0"))
        .def("at", &ControlLaw::at, py::arg("t"))
        .def_property_readonly("t0", &ControlLaw::t0)
        .def_property_readonly("xi", &ControlLaw::xi)
        .def_property_readonly("generator", &ControlLaw::generator);
    m.def("make_control_law", &make_control_law, py::arg("system"), py::arg("blocks"),
          py::arg("solution"), py::arg("t0"));
    m.def("stationary_trajectory", &stationary_trajectory, py::arg("m0_1"), py::arg("eta"),
          py::arg("blocks"), py::arg("convention"), py::arg("t0"), py::arg("t"));

    py::enum_<TrajectoryKind>(m, "TrajectoryKind")
        .value("controlled", TrajectoryKind::controlled)
        .value("uncontrolled", TrajectoryKind::uncontrolled)
        .value("target", TrajectoryKind::target)
        .value("stationary", TrajectoryKind::stationary)
        .value("oracle", TrajectoryKind::oracle);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("times", &Trajectory::times)
        .def_readonly("states", &Trajectory::states)
        .def_readonly("kind", &Trajectory::kind)
        .def_readonly("convention", &Trajectory::convention)
        .def_readonly("max_trace_error", &Trajectory::max_trace_error)
        .def_readonly("min_eigenvalue", &Trajectory::min_eigenvalue);

    py::enum_<Integrator>(m, "Integrator")
        .value("rk4", Integrator::rk4)
        .value("rk45", Integrator::rk45);
    py::enum_<DynamicsMode>(m, "DynamicsMode")
        .value("full", DynamicsMode::full)
        .value("free", DynamicsMode::free);

    py::class_<IntegrateOptions>(m, "IntegrateOptions")
        .def(py::init<>())
        .def_readwrite("method", &IntegrateOptions::method)
        .def_readwrite("step", &IntegrateOptions::step)
        .def_readwrite("rtol", &IntegrateOptions::rtol)
        .def_readwrite("atol", &IntegrateOptions::atol);

    m.def(
        "integrate",
        [](const VectorizedSystem& vs, const std::optional<ControlFunction>& u,
           const RealVector& m0, const RealVector& grid, const IntegrateOptions& options,
           DynamicsMode mode) {
            return integrate(vs, u ? *u : ControlFunction{}, m0, grid, options, mode);
        },
        py::arg("system"), py::arg("u"), py::arg("m0"), py::arg("grid"),
        py::arg("options") = IntegrateOptions{}, py::arg("mode") = DynamicsMode::full);
    m.def(
        "integrate_density_oracle",
        [](const OpenSystemSpec& spec, const std::optional<ControlFunction>& u,
           const ComplexMatrix& rho0, const RealVector& grid, const OrthonormalBasis& basis,
           const IntegrateOptions& options) {
            return integrate_density_oracle(spec, u ? *u : ControlFunction{}, rho0, grid, basis,
                                            options);
        },
        py::arg("spec"), py::arg("u"), py::arg("rho0"), py::arg("grid"), py::arg("basis"),
        py::arg("options") = IntegrateOptions{});

    py::enum_<LidarStatus>(m, "LidarStatus")
        .value("convergent", LidarStatus::convergent)
        .value("diverged", LidarStatus::diverged);

    py::class_<LidarParams>(m, "LidarParams")
        .def(py::init([](double omega, double gamma, double threshold) {
                 return LidarParams{omega, gamma, threshold};
             }),
             py::arg("omega"), py::arg("gamma"), py::arg("divergence_threshold") = 1e-6)
        .def_readwrite("omega", &LidarParams::omega)
        .def_readwrite("gamma", &LidarParams::gamma)
        .def_readwrite("divergence_threshold", &LidarParams::divergence_threshold);

    py::class_<LidarRun>(m, "LidarRun")
        .def_readonly("trajectory", &LidarRun::trajectory)
        .def_readonly("controls", &LidarRun::controls)
        .def_readonly("status", &LidarRun::status)
        .def_readonly("divergence_time", &LidarRun::divergence_time)
        .def_readonly("predicted_convergent", &LidarRun::predicted_convergent);

    m.def("lidar_predicts_convergent", &lidar_predicts_convergent, py::arg("m0_bloch"));
    m.def("lidar_controls", &lidar_controls, py::arg("params"), py::arg("m0_bloch"),
          py::arg("grid"), py::arg("options") = IntegrateOptions{});

    m.def("tracking_error", &tracking_error, py::arg("a"), py::arg("b"), py::arg("indices"));
    m.def("coherence_metrics", &coherence_metrics, py::arg("trajectory"), py::arg("groups"));
    m.def("entanglement_measure",
          py::overload_cast<const ComplexMatrix&>(&entanglement_measure), py::arg("rho"));
    m.def("entanglement_measure_coherence",
          py::overload_cast<const CoherenceVector&, const OrthonormalBasis&>(
              &entanglement_measure),
          py::arg("m"), py::arg("basis"));

    py::class_<BoundReport>(m, "BoundReport")
        .def_readonly("ok", &BoundReport::ok)
        .def_readonly("max_ratio", &BoundReport::max_ratio)
        .def_readonly("first_violation_time", &BoundReport::first_violation_time);
    m.def("convergence_bound_check", &convergence_bound_check, py::arg("a"), py::arg("b"),
          py::arg("d_min"), py::arg("tol") = 1e-6);

    py::enum_<SystemPreset>(m, "SystemPreset")
        .value("one_qubit", SystemPreset::one_qubit)
        .value("qutrit_v", SystemPreset::qutrit_v)
        .value("two_qubit", SystemPreset::two_qubit);

    py::class_<PresetParams>(m, "PresetParams")
        .def(py::init<>())
        .def_readwrite("gamma", &PresetParams::gamma)
        .def_readwrite("omega", &PresetParams::omega);

    py::class_<PresetSystem>(m, "PresetSystem")
        .def_readonly("name", &PresetSystem::name)
        .def_readonly("spec", &PresetSystem::spec)
        .def_readonly("basis", &PresetSystem::basis)
        .def_readonly("split", &PresetSystem::split)
        .def_readonly("rho0", &PresetSystem::rho0)
        .def_readonly("control_names", &PresetSystem::control_names)
        .def_readonly("omega", &PresetSystem::omega);

    m.def("preset_system", py::overload_cast<SystemPreset>(&preset_system), py::arg("kind"));
    m.def("preset_system_with",
          py::overload_cast<SystemPreset, const PresetParams&>(&preset_system), py::arg("kind"),
          py::arg("params"));
    m.def("bell_phi0_density", &bell_phi0_density);
    m.def("default_params", &default_params, py::arg("kind"));

    m.def("solve_preset", &solve_for, py::arg("system"), py::arg("rho0"),
          py::arg("options") = SolveOptions{});

    py::class_<RunReport>(m, "RunReport")
        .def_readonly("name", &RunReport::name)
        .def_readonly("assumptions", &RunReport::assumptions)
        .def_readonly("cartan_ok", &RunReport::cartan_ok)
        .def_readonly("solution", &RunReport::solution)
        .def_readonly("files_written", &RunReport::files_written)
        .def_readonly("final_p_tracking_error", &RunReport::final_p_tracking_error)
        .def_readonly("lidar_status", &RunReport::lidar_status);

    m.def("parse_config", &parse_config, py::arg("json_text"));
    m.def("emit_config", &emit_config, py::arg("config"));
    m.def(
        "preset_config",
        [](const std::string& name) { return preset_config(parse_scenario_preset(name)); },
        py::arg("name"));
    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def_readwrite("name", &ScenarioConfig::name)
        .def_readwrite("solver", &ScenarioConfig::solver)
        .def_property(
            "output_directory",
            [](const ScenarioConfig& c) { return c.outputs.directory; },
            [](ScenarioConfig& c, const std::string& d) { c.outputs.directory = d; })
        .def_property(
            "output_prefix", [](const ScenarioConfig& c) { return c.outputs.prefix; },
            [](ScenarioConfig& c, const std::string& p) { c.outputs.prefix = p; });
    m.def("check_scenario", &check_scenario, py::arg("config"));
    m.def("solve_scenario", &solve_scenario, py::arg("config"));
    m.def("run_scenario", &run_scenario, py::arg("config"));
}
