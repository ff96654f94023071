#pragma once

#include <cstddef>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "fedx/algorithms.hpp"

namespace fedx {

struct RoundRecord {
  int round = 0;
  double wall_seconds = 0.0;
  std::optional<double> objective;     // F(w-bar^r), exact
  std::optional<double> grad_norm_sq;  // ||grad F(w-bar^r)||^2, exact
  std::optional<double> auc;
  std::vector<double> pauc;            // one per configured fpr, empty if not evaluated
  std::size_t uplink_floats = 0;       // per client
  std::size_t downlink_floats = 0;     // per client
  std::size_t buffer_wraps = 0;
};

struct RunTrace {
  std::string config_line;
  std::vector<double> pauc_fprs;
  std::vector<RoundRecord> rounds;
  std::size_t n_clients = 0;

  // Sum over rounds of n_clients * (uplink + downlink).
  std::size_t total_floats() const;
  const RoundRecord& last() const { return rounds.back(); }
};

// Column header for the round trace:
// round,wall_seconds,objective,grad_norm_sq,auc,pauc@<q>...,uplink_floats,downlink_floats,buffer_wraps
std::string trace_header(const std::vector<double>& pauc_fprs);

// One CSV row, reals with 17 significant digits, missing values empty.
std::string format_row(const RoundRecord& record, std::size_t n_pauc);

// Appends rows as they are produced and flushes each, so a crashed run
// leaves a parseable prefix. Line 1 is `# config: <resolved config>`.
class TraceWriter {
 public:
  TraceWriter(const std::string& path, const std::string& config_line,
              const std::vector<double>& pauc_fprs);
  void write(const RoundRecord& record);

 private:
  std::ofstream out_;
  std::size_t n_pauc_;
};

// Optional per-iteration log: client,round,iteration,loss_estimate,step_size
class IterationWriter {
 public:
  explicit IterationWriter(const std::string& path);
  void write(const IterationRecord& record);

 private:
  std::ofstream out_;
};

// Parses a trace file written by TraceWriter.
RunTrace read_trace(const std::string& path);

std::string format_real(double v);

}  // namespace fedx
