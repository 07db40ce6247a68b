#pragma once

#include <ostream>

#include "run_config.hpp"

namespace permqfi::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

/// Each command writes its data files and a JSON manifest into cfg.out_dir,
/// prints a short summary to `out` and progress to `log`, and returns an
/// exit code. Usage problems are thrown as InvalidArgument.
int cmd_time_scan(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_dicke_scan(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_exponent_map(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_oracle_check(const RunConfig& cfg, std::ostream& out, std::ostream& log);

}  // namespace permqfi::cli
