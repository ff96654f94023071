#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fedx/config.hpp"
#include "fedx/trace.hpp"

namespace fedx {

struct RunEnv {
  unsigned threads = 0;
  // Where the one-line summary goes; null for silence.
  std::ostream* log = nullptr;
};

// FEDX_THREADS, 0 (serial) when unset or malformed.
unsigned threads_from_env();

// Generates data, resolves the schedule, runs the algorithm and writes the
// trace to config.output_path row by row. The output file is opened before
// any computation.
RunTrace run(const RunConfig& config, const RunEnv& env = {});

enum class SweepAxis { kK, kN };

struct SweepRow {
  double value = 0.0;
  double final_objective = 0.0;
  double final_pauc_03 = 0.0;
  double final_pauc_05 = 0.0;
  std::size_t floats = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<RunTrace> traces;
};

// One run per value, trace_<K|N><value>.csv plus summary.csv under out_dir.
// vary N keeps the total number of positives and negatives fixed and splits
// it evenly, so every value must divide both totals.
SweepResult sweep(const RunConfig& base, SweepAxis axis, const std::vector<int>& values,
                  const std::string& out_dir, const RunEnv& env = {});

RunConfig with_axis_value(const RunConfig& base, SweepAxis axis, int value);

struct OracleReport {
  double objective = 0.0;
  ParamVector grad;
  double grad_norm_sq = 0.0;
};

// Exact objective and gradient at w0 on the training federation.
OracleReport oracle(const RunConfig& config);

}  // namespace fedx
