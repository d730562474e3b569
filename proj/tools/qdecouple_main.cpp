#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "qdecouple/scenario.hpp"

namespace {

void print_report(const qdec::RunReport& report) {
    std::printf("scenario: %s\n", report.name.c_str());
    std::printf("cartan: %s\n", report.cartan_ok ? "ok" : "VIOLATED");
    std::printf("assumptions: H1=%s H2=%s H3=%s\n", report.assumptions.h1 ? "ok" : "fail",
                report.assumptions.h2 ? "ok" : "fail", report.assumptions.h3 ? "ok" : "fail");
    const char* status = "failed";
    switch (report.solution.status) {
        case qdec::SolveStatus::exact: status = "exact"; break;
        case qdec::SolveStatus::least_squares: status = "least_squares"; break;
        case qdec::SolveStatus::failed: status = "failed"; break;
    }
    std::printf("solution: %s (residual %.3e)\n", status, report.solution.residual_norm);
    if (report.final_p_tracking_error)
        std::printf("p-block tracking error at t_end: %.6e\n", *report.final_p_tracking_error);
    if (report.lidar_status)
        std::printf("lidar comparator: %s\n",
                    *report.lidar_status == qdec::LidarStatus::diverged ? "diverged"
                                                                        : "convergent");
    for (const auto& f : report.files_written) std::printf("wrote %s\n", f.c_str());
}

int dispatch(const std::string& mode, const std::string& config_path) {
    const qdec::ScenarioConfig cfg = qdec::load_config(config_path);
    qdec::RunReport report;
    if (mode == "check") {
        report = qdec::check_scenario(cfg);
    } else if (mode == "solve") {
        report = qdec::solve_scenario(cfg);
    } else {
        report = qdec::run_scenario(cfg);
    }
    print_report(report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Asymptotic noise-decoupling control synthesis for Markovian open systems"};
    app.require_subcommand(1);

    std::string config_path;
    auto* check = app.add_subcommand("check", "verify the Cartan split and assumptions H1-H3");
    check->add_option("config", config_path, "scenario config (JSON)")->required();
    auto* solve = app.add_subcommand("solve", "additionally solve the stationary system");
    solve->add_option("config", config_path, "scenario config (JSON)")->required();
    auto* run = app.add_subcommand("run", "full pipeline: checks, solve, trajectories, metrics");
    run->add_option("config", config_path, "scenario config (JSON)")->required();

    std::string preset_name;
    std::string emit_path;
    auto* preset = app.add_subcommand("preset", "print or save a shipped scenario config");
    preset->add_option("name", preset_name,
                       "one_qubit | qutrit_v | two_qubit_mixed | two_qubit_bell")
        ->required();
    preset->add_option("--emit", emit_path, "write the config to this path instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (preset->parsed()) {
            const auto cfg = qdec::preset_config(qdec::parse_scenario_preset(preset_name));
            const std::string text = qdec::emit_config(cfg);
            if (emit_path.empty()) {
                std::fputs(text.c_str(), stdout);
            } else {
                std::FILE* f = std::fopen(emit_path.c_str(), "wb");
                if (f == nullptr) {
                    std::fprintf(stderr, "error: cannot write %s\n", emit_path.c_str());
                    return static_cast<int>(qdec::ErrorKind::io);
                }
                std::fputs(text.c_str(), f);
                std::fclose(f);
                std::printf("wrote %s\n", emit_path.c_str());
            }
            return 0;
        }
        if (check->parsed()) return dispatch("check", config_path);
        if (solve->parsed()) return dispatch("solve", config_path);
        if (run->parsed()) return dispatch("run", config_path);
    } catch (const qdec::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.exit_code();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return static_cast<int>(qdec::ErrorKind::numerical);
    }
    return 0;
}
