#pragma once

#include <filesystem>

#include "curveflow/flow.hpp"

namespace curveflow {

enum class InitialKind { line, arc, perturbed_line, file };

/// Everything a run needs: energy parameters, integrator settings, the
/// initial-curve recipe, and output options. Parsed from flat key = value
/// text with dotted keys for the initial-curve section.
struct Config {
    int dim = 2;
    int N = 64;
    Eigen::RowVectorXd f_minus, f_plus;
    FlowParams params;

    Integrator integrator = Integrator::semi_implicit;
    VelocityMode velocity_mode = VelocityMode::normal;
    DtMode dt_mode = DtMode::cfl;
    double dt = 0.0;
    double cfl_safety = 0.1;
    double t_end = 0.0;
    long max_steps = 100000;
    double stationarity_tol = 0.0; // 0: 1e-6 * (1 + W0) at run start
    int redistribute_every = -1;   // -1: 50 in normal mode, 0 in gradient mode
    double h_min_factor = 1e-3;

    InitialKind initial = InitialKind::line;
    double bulge = 1.0;                 // initial = arc
    double amplitude = 0.0;             // initial = perturbed_line
    int mode = 1;                       // initial = perturbed_line
    std::uint64_t seed = 0;             // 0: single exact sine mode
    std::filesystem::path initial_path; // initial = file

    std::filesystem::path output_dir = "out";
    int snapshot_every = 0;
    bool validate_bc0 = false;
    double bc0_tol = 1e-3;

    FlowConfig flow_config() const;
    void validate() const;
};

Config parse_config_text(const std::string& text, const std::string& origin = "<string>");
Config parse_config(const std::filesystem::path& path);

DiscreteCurve build_initial(const Config& config);

/// The defaults table printed by `run --print-defaults`.
std::string defaults_table();

} // namespace curveflow
