#pragma once

#include <string>

#include "bcq/config.hpp"

namespace bcq::cli {

/// Exit codes shared by every subcommand: 0 success, 2 configuration or
/// validation error, 3 numeric or acceptance failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

int cmd_spectra(const ConfigDoc& doc, const std::string& out_dir);
int cmd_detcheck(const ConfigDoc& doc, const std::string& out_dir);
int cmd_scan_alpha(const ConfigDoc& doc, const std::string& out_dir);
int cmd_verdict(const ConfigDoc& doc, const std::string& out_dir);
int cmd_control(const ConfigDoc& doc, const std::string& out_dir);

/// Wraps a command body with the exception-to-exit-code mapping.
int run_command(const std::string& name, const std::string& config_path,
                const std::string& out_dir);

}  // namespace bcq::cli
