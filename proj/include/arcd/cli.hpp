#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "arcd/experiment.hpp"

namespace arcd {

/// Parses command-line arguments (without the program name) into an
/// experiment. Throws ConfigError on invalid values; `--help` and parse
/// errors are reported by `cli_main`.
ExperimentSpec parse_cli(const std::vector<std::string>& args);

/// Arguments recorded in a trace file's `argv` metadata entry.
std::vector<std::string> rerun_arguments(const std::string& trace_path);

/// Full command-line entry point. Returns the process exit code.
int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

/// Joins arguments with single spaces, quoting any that contain whitespace.
std::string join_arguments(const std::vector<std::string>& args);
std::vector<std::string> split_arguments(const std::string& line);

}  // namespace arcd
