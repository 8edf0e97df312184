#pragma once

#include <ostream>
#include <string>

#include "erodewave/run_spec.hpp"

namespace erodewave {

enum class LogLevel { error = 0, info = 1, debug = 2 };

/// Reads "error", "info" or "debug"; anything else (or null) means error.
LogLevel parse_log_level(const char* s);

struct DispatchOptions {
  double eps = 0.05;  // envelope shift for the envelope mode
  LogLevel log_level = LogLevel::error;
};

/// Runs the mode, prints a one-line summary to out and writes files under spec.output.dir.
/// Returns 0 on success, 1 for model or configuration errors, 2 for numerical or I/O failures.
int dispatch(const RunSpec& spec, std::ostream& out, std::ostream& log, const DispatchOptions& opts = {});

}  // namespace erodewave
