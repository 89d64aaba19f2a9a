#pragma once

#include "curveflow/config.hpp"

namespace curveflow {

// Exit codes shared by the CLI:
//   0 clean termination / all audits pass
//   1 audit violations
//   2 run stopped by max_steps
//   3 run terminated on a step error
//   4 IO, config, or missing-data errors

int cmd_run(const Config& config, bool resolve_env = true);
int cmd_run(const std::filesystem::path& config_path);

int cmd_check(const std::filesystem::path& trajectory_dir);

int cmd_audit(const std::filesystem::path& spec_path);

int cmd_sweep(const std::string& config_glob);

} // namespace curveflow
