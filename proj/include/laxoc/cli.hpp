#pragma once

#include "laxoc/io.hpp"

namespace laxoc {

/// Dispatch one CLI command (solve, reconstruct, verify, audit, oracle).
/// Writes the command's artifacts plus a run manifest into the output
/// directory; on failure writes error.json and returns a nonzero status.
int run_command(const std::string& command, const RunConfig& config);

/// Artifacts of a reconstruct run, exposed for tests and the acceptance
/// suite (the CLI writes exactly these).
struct ReconstructOutcome {
  Solution solution;
  ConvexProgram program;
  Decomposition decomposition;
  PiecewiseControl alpha;      // admissible control on [0, T]
  PiecewiseControl beta1;      // relaxed schedule (min-min TI mode only)
  double sigma_T = -1.0;       // pseudo-time horizon (min-min TI mode only)
  Trajectory dense;            // RK4 trajectory under alpha
  std::vector<double> cost_curve;
  FeasibilityReport feasibility;
  TerminalChoice terminal;
  int sweep_k = -1;            // winning index for time-varying min-min
};

/// The full solve + decompose + schedule + integrate + select pipeline.
ReconstructOutcome run_reconstruction(const ProblemInstance& inst, const TimeGrid& grid,
                                      const SolveOptions& options, int substeps = 8);

}  // namespace laxoc
