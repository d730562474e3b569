#include "qdecouple/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qdec {

const char* const kOutputDirEnvVar = "QDECOUPLE_OUTPUT_DIR";

namespace {

using nlohmann::json;

json matrix_to_json(const ComplexMatrix& M) {
    json re = json::array(), im = json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        json re_row = json::array(), im_row = json::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c) {
            re_row.push_back(M(r, c).real());
            im_row.push_back(M(r, c).imag());
        }
        re.push_back(re_row);
        im.push_back(im_row);
    }
    return json{{"re", re}, {"im", im}};
}

ComplexMatrix matrix_from_json(const json& j) {
    if (!j.contains("re")) throw Error(ErrorKind::config, "matrix: missing 're' array");
    const auto& re = j.at("re");
    const Eigen::Index rows = static_cast<Eigen::Index>(re.size());
    if (rows == 0) throw Error(ErrorKind::config, "matrix: empty");
    const Eigen::Index cols = static_cast<Eigen::Index>(re.at(0).size());
    ComplexMatrix M = ComplexMatrix::Zero(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            M(r, c) = Complex(re.at(r).at(c).get<double>(), 0.0);
    if (j.contains("im")) {
        const auto& im = j.at("im");
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c)
                M(r, c) += Complex(0.0, im.at(r).at(c).get<double>());
    }
    return M;
}

json vector_to_json(const RealVector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

RealVector vector_from_json(const json& j) {
    RealVector v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j.at(i).get<double>();
    return v;
}

std::vector<int> ints_from_json(const json& j) {
    std::vector<int> out;
    for (const auto& x : j) out.push_back(x.get<int>());
    return out;
}

const char* convention_name(BasisConvention c) {
    return c == BasisConvention::pauli_bloch ? "pauli_bloch" : "orthonormal";
}

BasisConvention convention_from_name(const std::string& s) {
    if (s == "pauli_bloch") return BasisConvention::pauli_bloch;
    if (s == "orthonormal") return BasisConvention::orthonormal;
    throw Error(ErrorKind::config, "unknown basis convention: " + s);
}

}  // namespace

ScenarioConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::config, std::string("config parse error: ") + e.what());
    }
    ScenarioConfig cfg;
    try {
        cfg.name = j.value("name", "scenario");
        const auto& sys = j.at("system");
        if (sys.contains("preset")) {
            cfg.preset = parse_system_preset(sys.at("preset").get<std::string>());
            cfg.params = default_params(*cfg.preset);
            if (sys.contains("params")) {
                const auto& p = sys.at("params");
                cfg.params.gamma = p.value("gamma", cfg.params.gamma);
                cfg.params.omega = p.value("omega", cfg.params.omega);
            }
        } else {
            InlineSystem in;
            in.spec.dim = sys.at("dim").get<int>();
            in.convention = convention_from_name(sys.value("convention", "orthonormal"));
            in.spec.H0 = matrix_from_json(sys.at("H0"));
            if (sys.contains("controls"))
                for (const auto& c : sys.at("controls"))
                    in.spec.controls.push_back(matrix_from_json(c));
            if (sys.contains("lindblads"))
                for (const auto& l : sys.at("lindblads"))
                    in.spec.lindblads.push_back(
                        {matrix_from_json(l.at("op")), l.at("rate").get<double>()});
            in.split.p_indices = ints_from_json(sys.at("split").at("p"));
            in.split.eps_indices = ints_from_json(sys.at("split").at("eps"));
            cfg.inline_system = std::move(in);
        }
        if (j.contains("initial_state")) {
            const auto& st = j.at("initial_state");
            if (st.contains("rho")) cfg.rho0 = matrix_from_json(st.at("rho"));
            if (st.contains("coherence")) cfg.coherence0 = vector_from_json(st.at("coherence"));
        }
        if (j.contains("time")) {
            const auto& t = j.at("time");
            cfg.time.t0 = t.value("t0", 0.0);
            cfg.time.t_end = t.value("t_end", 10.0);
            cfg.time.step = t.value("step", 1e-3);
            cfg.time.output_step = t.value("output_step", 0.01);
            cfg.time.adaptive = t.value("adaptive", false);
            cfg.time.rtol = t.value("rtol", 1e-9);
            cfg.time.atol = t.value("atol", 1e-12);
            if (!(cfg.time.t_end > cfg.time.t0))
                throw Error(ErrorKind::config, "time: t_end must exceed t0");
            if (!(cfg.time.step > 0.0) || !(cfg.time.output_step > 0.0))
                throw Error(ErrorKind::config, "time: steps must be positive");
        }
        if (j.contains("solver")) {
            const auto& s = j.at("solver");
            cfg.solver.restarts = s.value("restarts", cfg.solver.restarts);
            cfg.solver.max_iter = s.value("max_iter", cfg.solver.max_iter);
            cfg.solver.tol = s.value("tol", cfg.solver.tol);
            cfg.solver.allow_least_squares =
                s.value("allow_least_squares", cfg.solver.allow_least_squares);
            cfg.solver.seed = s.value("seed", cfg.solver.seed);
            cfg.solver.override_assumptions =
                s.value("override_assumptions", cfg.solver.override_assumptions);
            if (s.contains("xi0")) cfg.solver.xi0 = vector_from_json(s.at("xi0"));
            if (s.contains("eta0")) cfg.solver.eta0 = vector_from_json(s.at("eta0"));
            if (s.contains("branch")) {
                const std::string b = s.at("branch").get<std::string>();
                if (b == "plus") cfg.analytic_branch = Branch::plus;
                else if (b == "minus") cfg.analytic_branch = Branch::minus;
                else if (b == "none") cfg.analytic_branch.reset();
                else throw Error(ErrorKind::config, "solver.branch must be plus, minus or none");
            }
        }
        if (j.contains("comparisons")) {
            const auto& c = j.at("comparisons");
            cfg.comparisons.uncontrolled = c.value("uncontrolled", true);
            cfg.comparisons.target = c.value("target", true);
            cfg.comparisons.lidar = c.value("lidar", false);
            cfg.comparisons.oracle = c.value("oracle", false);
        }
        if (j.contains("outputs")) {
            const auto& o = j.at("outputs");
            cfg.outputs.directory = o.value("directory", cfg.outputs.directory);
            cfg.outputs.prefix = o.value("prefix", cfg.outputs.prefix);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::config, std::string("config error: ") + e.what());
    }
    if (cfg.outputs.prefix.empty()) cfg.outputs.prefix = cfg.name;
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open config file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string emit_config(const ScenarioConfig& cfg) {
    json j;
    j["name"] = cfg.name;
    json sys;
    if (cfg.preset) {
        sys["preset"] = to_string(*cfg.preset);
        sys["params"] = {{"gamma", cfg.params.gamma}, {"omega", cfg.params.omega}};
    } else if (cfg.inline_system) {
        const auto& in = *cfg.inline_system;
        sys["dim"] = in.spec.dim;
        sys["convention"] = convention_name(in.convention);
        sys["H0"] = matrix_to_json(in.spec.H0);
        json ctrls = json::array();
        for (const auto& c : in.spec.controls) ctrls.push_back(matrix_to_json(c));
        sys["controls"] = ctrls;
        json linds = json::array();
        for (const auto& l : in.spec.lindblads)
            linds.push_back(json{{"op", matrix_to_json(l.op)}, {"rate", l.rate}});
        sys["lindblads"] = linds;
        sys["split"] = {{"p", in.split.p_indices}, {"eps", in.split.eps_indices}};
    }
    j["system"] = sys;
    if (cfg.rho0) j["initial_state"] = {{"rho", matrix_to_json(*cfg.rho0)}};
    if (cfg.coherence0) j["initial_state"]["coherence"] = vector_to_json(*cfg.coherence0);
    j["time"] = {{"t0", cfg.time.t0},       {"t_end", cfg.time.t_end},
                 {"step", cfg.time.step},   {"output_step", cfg.time.output_step},
                 {"adaptive", cfg.time.adaptive}, {"rtol", cfg.time.rtol},
                 {"atol", cfg.time.atol}};
    json solver = {{"restarts", cfg.solver.restarts},
                   {"max_iter", cfg.solver.max_iter},
                   {"tol", cfg.solver.tol},
                   {"allow_least_squares", cfg.solver.allow_least_squares},
                   {"seed", cfg.solver.seed},
                   {"override_assumptions", cfg.solver.override_assumptions}};
    if (cfg.solver.xi0) solver["xi0"] = vector_to_json(*cfg.solver.xi0);
    if (cfg.solver.eta0) solver["eta0"] = vector_to_json(*cfg.solver.eta0);
    solver["branch"] = !cfg.analytic_branch ? "none"
                       : (*cfg.analytic_branch == Branch::plus ? "plus" : "minus");
    j["solver"] = solver;
    j["comparisons"] = {{"uncontrolled", cfg.comparisons.uncontrolled},
                        {"target", cfg.comparisons.target},
                        {"lidar", cfg.comparisons.lidar},
                        {"oracle", cfg.comparisons.oracle}};
    j["outputs"] = {{"directory", cfg.outputs.directory}, {"prefix", cfg.outputs.prefix}};
    return j.dump(2) + "\n";
}

ScenarioPreset parse_scenario_preset(const std::string& name) {
    if (name == "one_qubit") return ScenarioPreset::one_qubit;
    if (name == "qutrit_v") return ScenarioPreset::qutrit_v;
    if (name == "two_qubit_mixed") return ScenarioPreset::two_qubit_mixed;
    if (name == "two_qubit_bell") return ScenarioPreset::two_qubit_bell;
    throw Error(ErrorKind::config, "unknown scenario preset: " + name);
}

std::string to_string(ScenarioPreset kind) {
    switch (kind) {
        case ScenarioPreset::one_qubit: return "one_qubit";
        case ScenarioPreset::qutrit_v: return "qutrit_v";
        case ScenarioPreset::two_qubit_mixed: return "two_qubit_mixed";
        case ScenarioPreset::two_qubit_bell: return "two_qubit_bell";
    }
    return "unknown";
}

ScenarioConfig preset_config(ScenarioPreset kind) {
    ScenarioConfig cfg;
    cfg.name = to_string(kind);
    cfg.outputs.prefix = cfg.name;
    cfg.comparisons.oracle = true;
    switch (kind) {
        case ScenarioPreset::one_qubit: {
            cfg.preset = SystemPreset::one_qubit;
            cfg.params = default_params(SystemPreset::one_qubit);
            cfg.comparisons.lidar = true;
            break;
        }
        case ScenarioPreset::qutrit_v: {
            cfg.preset = SystemPreset::qutrit_v;
            cfg.params = default_params(SystemPreset::qutrit_v);
            // The fastest phase rotates at |E2 - E0| ~ 12/tau0; keep the
            // free-trajectory RK4 error comfortably under 1e-8.
            cfg.time.step = 2.5e-4;
            break;
        }
        case ScenarioPreset::two_qubit_mixed: {
            cfg.preset = SystemPreset::two_qubit;
            cfg.params = default_params(SystemPreset::two_qubit);
            // The stationary system is rank deficient here: the zz control
            // acts trivially on the stationary trajectory, so the root is a
            // manifold. Seed the solver with the published control constants
            // to pin the reported representative; the solve still verifies
            // them to machine precision.
            RealVector xi0 = RealVector::Zero(9);
            xi0(1) = -0.5 * cfg.params.gamma;   // u_xy(t0)
            xi0(3) = -0.5 * cfg.params.gamma;   // u_yx(t0)
            xi0(8) = 0.25 * cfg.params.gamma;   // u_zz
            cfg.solver.xi0 = xi0;
            break;
        }
        case ScenarioPreset::two_qubit_bell: {
            cfg.preset = SystemPreset::two_qubit;
            cfg.params = default_params(SystemPreset::two_qubit);
            cfg.rho0 = bell_phi0_density();
            cfg.solver.allow_least_squares = true;
            break;
        }
    }
    return cfg;
}

namespace {

struct BuiltSystem {
    PresetSystem sys;  // inline systems are wrapped into the same shape
};

BuiltSystem build_system(const ScenarioConfig& cfg) {
    BuiltSystem b;
    if (cfg.preset) {
        b.sys = preset_system(*cfg.preset, cfg.params);
    } else if (cfg.inline_system) {
        const auto& in = *cfg.inline_system;
        b.sys.name = cfg.name;
        b.sys.spec = in.spec;
        b.sys.basis = in.convention == BasisConvention::pauli_bloch
                          ? pauli_bloch_basis()
                          : gellmann_basis(in.spec.dim);
        b.sys.split = in.split;
        b.sys.rho0 = ComplexMatrix::Identity(in.spec.dim, in.spec.dim) /
                     static_cast<double>(in.spec.dim);
        for (size_t i = 0; i < in.spec.controls.size(); ++i)
            b.sys.control_names.push_back("u_" + std::to_string(i + 1));
    } else {
        throw Error(ErrorKind::config, "scenario: no system given");
    }
    if (cfg.rho0) b.sys.rho0 = *cfg.rho0;
    if (cfg.coherence0) {
        CoherenceVector cv;
        cv.m = *cfg.coherence0;
        cv.convention = b.sys.basis.convention;
        b.sys.rho0 = coherence_to_rho(cv, b.sys.basis);
    }
    return b;
}

std::filesystem::path output_dir(const ScenarioConfig& cfg) {
    if (const char* env = std::getenv(kOutputDirEnvVar); env != nullptr && env[0] != '\0') {
        return std::filesystem::path(env);
    }
    return std::filesystem::path(cfg.outputs.directory);
}

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text,
                RunReport& report) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorKind::io, "write failed for " + path.string());
    report.files_written.push_back(path.string());
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const RealMatrix& columns, RunReport& report) {
    std::string text;
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) text += ',';
        text += header[i];
    }
    text += '\n';
    for (Eigen::Index r = 0; r < columns.rows(); ++r) {
        for (Eigen::Index c = 0; c < columns.cols(); ++c) {
            if (c) text += ',';
            text += fmt17(columns(r, c));
        }
        text += '\n';
    }
    write_text(path, text, report);
}

json assumptions_json(const AssumptionReport& rep) {
    return json{{"H1",
                 {{"ok", rep.h1},
                  {"commutator_norm", rep.h1_commutator_norm},
                  {"drift_norm", rep.h1_drift_norm}}},
                {"H2", {{"ok", rep.h2}, {"max_sym_eigenvalue", rep.h2_max_eigenvalue}}},
                {"H3", {{"ok", rep.h3}, {"p_leak", rep.h3_leak}}},
                {"all", rep.all()}};
}

json cartan_json(const CartanReport& rep) {
    json v = json::array();
    for (const auto& viol : rep.violations) {
        v.push_back(json{{"relation", viol.relation},
                         {"i", viol.i},
                         {"j", viol.j},
                         {"leak", viol.leak}});
    }
    return json{{"ok", rep.ok}, {"violations", v}};
}

const char* status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::exact: return "exact";
        case SolveStatus::least_squares: return "least_squares";
        case SolveStatus::failed: return "failed";
    }
    return "unknown";
}

struct Pipeline {
    ScenarioConfig cfg;
    BuiltSystem built;
    VectorizedSystem vs;
    AssumptionReport assumptions;
    CartanReport cartan;
    CoherenceVector m0;
    BlockForm blocks;
    RealVector m0_1;
};

Pipeline make_pipeline(const ScenarioConfig& cfg) {
    Pipeline p{cfg, build_system(cfg), {}, {}, {}, {}, {}, {}};
    p.vs = vectorize(p.built.sys.spec, p.built.sys.basis, p.built.sys.split);
    p.assumptions = check_assumptions(p.vs);
    p.cartan = verify_cartan(p.built.sys.basis, p.built.sys.split);
    p.m0 = rho_to_coherence(p.built.sys.rho0, p.built.sys.basis);
    p.blocks = block_split(p.vs);
    const RealVector permuted = p.blocks.permute(p.m0.m);
    p.m0_1 = permuted.head(p.blocks.m);
    return p;
}

StationarySolution dispatch_solve(const Pipeline& p) {
    // The one-qubit amplitude-damping preset has the closed-form solution;
    // prefer it so boundary states (C0^2 = 1/2, defective Newton root) stay
    // machine precise.
    if (p.cfg.preset == SystemPreset::one_qubit && p.cfg.analytic_branch && !p.cfg.solver.xi0) {
        return analytic_one_qubit(p.m0.m, p.cfg.params.gamma, *p.cfg.analytic_branch).solution;
    }
    return solve_stationary(p.blocks, p.m0_1, p.cfg.solver);
}

void write_checks(const Pipeline& p, RunReport& report) {
    const auto dir = output_dir(p.cfg);
    std::filesystem::create_directories(dir);
    json j{{"system", p.built.sys.name},
           {"dim", p.built.sys.spec.dim},
           {"convention", convention_name(p.built.sys.basis.convention)},
           {"cartan", cartan_json(p.cartan)},
           {"assumptions", assumptions_json(p.assumptions)}};
    write_text(dir / (p.cfg.outputs.prefix + "_checks.json"), j.dump(2) + "\n", report);
}

void write_solution(const Pipeline& p, const StationarySolution& sol,
                    const std::optional<ControlLaw>& law, RunReport& report) {
    const auto dir = output_dir(p.cfg);
    json j{{"status", status_name(sol.status)},
           {"residual_norm", sol.residual_norm},
           {"xi", vector_to_json(sol.xi)},
           {"eta", vector_to_json(sol.eta)},
           {"degenerate", sol.degenerate}};
    if (law) {
        json channels = json::array();
        const auto decomp = decompose_controls(*law);
        for (const auto& ch : decomp) {
            json tones = json::array();
            for (const auto& tone : ch.tones)
                tones.push_back(json{{"frequency", tone.frequency},
                                     {"amplitude", tone.amplitude},
                                     {"phase", tone.phase}});
            const std::string name =
                ch.index < static_cast<int>(p.built.sys.control_names.size())
                    ? p.built.sys.control_names[static_cast<size_t>(ch.index)]
                    : "u_" + std::to_string(ch.index + 1);
            channels.push_back(json{{"name", name},
                                    {"constant", ch.constant},
                                    {"tones", tones},
                                    {"peak", ch.peak()}});
        }
        j["channels"] = channels;
        json freqs = json::array();
        for (double f : law->exp().frequencies()) freqs.push_back(f);
        j["frequencies"] = freqs;
    }
    write_text(dir / (p.cfg.outputs.prefix + "_solution.json"), j.dump(2) + "\n", report);
}

RealVector make_grid(const TimeConfig& t) {
    const int n = std::max(1, static_cast<int>(std::llround((t.t_end - t.t0) / t.output_step)));
    RealVector grid(n + 1);
    for (int k = 0; k <= n; ++k) grid(k) = t.t0 + (t.t_end - t.t0) * k / n;
    return grid;
}

RealMatrix with_time(const RealVector& t, const RealMatrix& cols) {
    RealMatrix out(t.size(), cols.cols() + 1);
    out.col(0) = t;
    out.rightCols(cols.cols()) = cols;
    return out;
}

std::vector<std::string> state_header(int n) {
    std::vector<std::string> h{"t"};
    for (int j = 1; j <= n; ++j) h.push_back("m_" + std::to_string(j));
    return h;
}

std::string plot_stub(const Pipeline& p, bool lidar_present) {
    std::ostringstream os;
    const std::string& pre = p.cfg.outputs.prefix;
    os << "# Column pairings for plotting " << p.built.sys.name << " results.\n";
    os << "# All files share the time column 't'.\n";
    const auto& groups = p.built.sys.coherence_groups;
    int panel = 1;
    for (size_t gi = 0; gi < groups.size(); ++gi) {
        for (int idx : groups[gi]) {
            os << "panel " << panel++ << ": m_" << (idx + 1) << " -- x: t; y: " << pre
               << "_controlled.csv:m_" << (idx + 1) << ", " << pre << "_uncontrolled.csv:m_"
               << (idx + 1) << ", " << pre << "_target.csv:m_" << (idx + 1) << "\n";
        }
    }
    os << "controls: x: t; y: " << pre << "_controls.csv:<all u columns>, normalized by gamma\n";
    os << "tracking: x: t; y: " << pre << "_tracking_error.csv:controlled_vs_target\n";
    if (lidar_present) {
        os << "lidar controls: x: t; y: " << pre << "_lidar.csv:u_x," << pre
           << "_lidar.csv:u_y\n";
        os << "strategy gap: x: t; y: " << pre << "_lidar.csv:delta_xy_vs_controlled\n";
    }
    if (p.built.sys.spec.dim == 4) {
        os << "entanglement: x: t; y: " << pre
           << "_entanglement.csv:controlled,uncontrolled,target\n";
    }
    return os.str();
}

}  // namespace

RunReport check_scenario(const ScenarioConfig& cfg) {
    Pipeline p = make_pipeline(cfg);
    RunReport report;
    report.name = cfg.name;
    report.assumptions = p.assumptions;
    report.cartan_ok = p.cartan.ok;
    write_checks(p, report);
    return report;
}

RunReport solve_scenario(const ScenarioConfig& cfg) {
    Pipeline p = make_pipeline(cfg);
    RunReport report;
    report.name = cfg.name;
    report.assumptions = p.assumptions;
    report.cartan_ok = p.cartan.ok;
    write_checks(p, report);
    report.solution = dispatch_solve(p);
    std::optional<ControlLaw> law;
    if (report.solution.status != SolveStatus::failed) {
        law = make_control_law(p.vs, p.blocks, report.solution, cfg.time.t0);
    }
    write_solution(p, report.solution, law, report);
    if (report.solution.status == SolveStatus::failed) {
        throw Error(ErrorKind::infeasible,
                    "stationary system unsolvable and least squares disabled");
    }
    return report;
}

RunReport run_scenario(const ScenarioConfig& cfg) {
    Pipeline p = make_pipeline(cfg);
    RunReport report;
    report.name = cfg.name;
    report.assumptions = p.assumptions;
    report.cartan_ok = p.cartan.ok;
    write_checks(p, report);

    report.solution = dispatch_solve(p);
    std::optional<ControlLaw> law;
    if (report.solution.status != SolveStatus::failed) {
        law = make_control_law(p.vs, p.blocks, report.solution, cfg.time.t0);
    }
    write_solution(p, report.solution, law, report);
    if (report.solution.status == SolveStatus::failed) {
        throw Error(ErrorKind::infeasible,
                    "stationary system unsolvable and least squares disabled");
    }

    const auto dir = output_dir(cfg);
    const std::string& pre = cfg.outputs.prefix;
    const RealVector grid = make_grid(cfg.time);
    IntegrateOptions iopt;
    iopt.method = cfg.time.adaptive ? Integrator::rk45 : Integrator::rk4;
    iopt.step = cfg.time.step;
    iopt.rtol = cfg.time.rtol;
    iopt.atol = cfg.time.atol;

    ControlFunction u = [&law](double t) { return law->at(t); };
    const int n = p.vs.size();
    const auto header = state_header(n);

    Trajectory controlled = integrate(p.vs, u, p.m0.m, grid, iopt);
    controlled.kind = TrajectoryKind::controlled;
    write_csv(dir / (pre + "_controlled.csv"), header, with_time(grid, controlled.states),
              report);

    Trajectory stationary;
    stationary.kind = TrajectoryKind::stationary;
    stationary.convention = p.m0.convention;
    stationary.times = grid;
    stationary.states.resize(grid.size(), n);
    for (Eigen::Index k = 0; k < grid.size(); ++k) {
        stationary.states.row(k) =
            stationary_trajectory(p.m0_1, report.solution.eta, p.blocks, p.m0.convention,
                                  cfg.time.t0, grid(k))
                .m.transpose();
    }
    write_csv(dir / (pre + "_stationary.csv"), header, with_time(grid, stationary.states),
              report);

    RealMatrix ucols(grid.size(), static_cast<Eigen::Index>(p.vs.controls_O.size()));
    for (Eigen::Index k = 0; k < grid.size(); ++k) ucols.row(k) = law->at(grid(k)).transpose();
    std::vector<std::string> uheader{"t"};
    for (const auto& name : p.built.sys.control_names) uheader.push_back(name);
    write_csv(dir / (pre + "_controls.csv"), uheader, with_time(grid, ucols), report);

    std::optional<Trajectory> uncontrolled, target, oracle;
    if (cfg.comparisons.uncontrolled) {
        uncontrolled = integrate(p.vs, nullptr, p.m0.m, grid, iopt);
        uncontrolled->kind = TrajectoryKind::uncontrolled;
        write_csv(dir / (pre + "_uncontrolled.csv"), header,
                  with_time(grid, uncontrolled->states), report);
    }
    if (cfg.comparisons.target) {
        target = integrate(p.vs, nullptr, p.m0.m, grid, iopt, DynamicsMode::free);
        target->kind = TrajectoryKind::target;
        write_csv(dir / (pre + "_target.csv"), header, with_time(grid, target->states), report);
    }
    if (cfg.comparisons.oracle) {
        oracle = integrate_density_oracle(p.built.sys.spec, u, p.built.sys.rho0, grid,
                                          p.built.sys.basis, iopt);
        write_csv(dir / (pre + "_oracle.csv"), header, with_time(grid, oracle->states), report);
    }

    // Metrics.
    std::vector<int> p_indices = p.vs.split.p_indices;
    if (target) {
        const RealVector err_t = tracking_error(controlled, *target, p_indices);
        const RealVector err_s = tracking_error(controlled, stationary, p_indices);
        RealMatrix cols(grid.size(), 2);
        cols.col(0) = err_t;
        cols.col(1) = err_s;
        write_csv(dir / (pre + "_tracking_error.csv"),
                  {"t", "controlled_vs_target", "controlled_vs_stationary"},
                  with_time(grid, cols), report);
        report.final_p_tracking_error = err_t(grid.size() - 1);
    }
    {
        std::vector<Trajectory*> trajs{&controlled};
        std::vector<std::string> tags{"controlled"};
        if (uncontrolled) {
            trajs.push_back(&*uncontrolled);
            tags.emplace_back("uncontrolled");
        }
        if (target) {
            trajs.push_back(&*target);
            tags.emplace_back("target");
        }
        const auto& groups = p.built.sys.coherence_groups;
        if (!groups.empty()) {
            RealMatrix cols(grid.size(),
                            static_cast<Eigen::Index>(groups.size() * trajs.size()));
            std::vector<std::string> head{"t"};
            Eigen::Index c = 0;
            for (size_t ti = 0; ti < trajs.size(); ++ti) {
                const RealMatrix met = coherence_metrics(*trajs[ti], groups);
                for (size_t gi = 0; gi < groups.size(); ++gi) {
                    cols.col(c++) = met.col(static_cast<Eigen::Index>(gi));
                    head.push_back(tags[ti] + "_" + p.built.sys.coherence_names[gi]);
                }
            }
            write_csv(dir / (pre + "_coherence.csv"), head, with_time(grid, cols), report);
        }
    }
    if (p.built.sys.spec.dim == 4) {
        std::vector<std::pair<std::string, Trajectory*>> sel{{"controlled", &controlled}};
        if (uncontrolled) sel.emplace_back("uncontrolled", &*uncontrolled);
        if (target) sel.emplace_back("target", &*target);
        RealMatrix cols(grid.size(), static_cast<Eigen::Index>(sel.size()));
        std::vector<std::string> head{"t"};
        for (size_t i = 0; i < sel.size(); ++i) {
            head.push_back(sel[i].first);
            for (Eigen::Index k = 0; k < grid.size(); ++k) {
                CoherenceVector cv;
                cv.convention = p.m0.convention;
                cv.m = sel[i].second->states.row(k).transpose();
                cols(k, static_cast<Eigen::Index>(i)) =
                    entanglement_measure(cv, p.built.sys.basis);
            }
        }
        write_csv(dir / (pre + "_entanglement.csv"), head, with_time(grid, cols), report);
    }

    bool lidar_present = false;
    if (cfg.comparisons.lidar) {
        if (p.built.sys.spec.dim != 2)
            throw Error(ErrorKind::config, "lidar comparison requires a one-qubit system");
        LidarParams lp;
        lp.omega = p.built.sys.omega;
        lp.gamma = cfg.params.gamma;
        LidarRun lrun = lidar_controls(lp, p.m0.m, grid, iopt);
        report.lidar_status = lrun.status;
        const Eigen::Index npts = lrun.trajectory.times.size();
        RealMatrix cols(npts, 6);
        cols.leftCols(3) = lrun.trajectory.states;
        cols.col(3) = lrun.controls.col(0);
        cols.col(4) = lrun.controls.col(1);
        for (Eigen::Index k = 0; k < npts; ++k) {
            const double dx = lrun.trajectory.states(k, 0) - controlled.states(k, 0);
            const double dy = lrun.trajectory.states(k, 1) - controlled.states(k, 1);
            cols(k, 5) = std::hypot(dx, dy);
        }
        write_csv(dir / (pre + "_lidar.csv"),
                  {"t", "m_x", "m_y", "m_z", "u_x", "u_y", "delta_xy_vs_controlled"},
                  with_time(lrun.trajectory.times, cols), report);
        lidar_present = true;
    }

    write_text(dir / (pre + "_plots.txt"), plot_stub(p, lidar_present), report);
    return report;
}

}  // namespace qdec
