#pragma once

#include <iosfwd>
#include <string>

#include "cwstein/config.hpp"

namespace cwstein {

enum ExitCode { kExitOk = 0, kExitFailure = 1, kExitInvalid = 2, kExitBudget = 3, kExitNumerical = 4 };

// Runs one validated experiment, writes artifacts under effective["out"] and a
// manifest; errors are mapped to exit codes and reported on `log`.
int execute(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace cwstein
