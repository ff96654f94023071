#include "fedx/trace.hpp"

#include <cstdio>
#include <sstream>

#include "fedx/errors.hpp"

namespace fedx {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::size_t RunTrace::total_floats() const {
  std::size_t total = 0;
  for (const auto& r : rounds) total += n_clients * (r.uplink_floats + r.downlink_floats);
  return total;
}

std::string trace_header(const std::vector<double>& pauc_fprs) {
  std::string h = "round,wall_seconds,objective,grad_norm_sq,auc";
  for (double q : pauc_fprs) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", q);
    h += ",pauc@";
    h += buf;
  }
  h += ",uplink_floats,downlink_floats,buffer_wraps";
  return h;
}

std::string format_row(const RoundRecord& r, std::size_t n_pauc) {
  auto opt = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string(); };
  std::string row = std::to_string(r.round) + "," + format_real(r.wall_seconds) + "," +
                    opt(r.objective) + "," + opt(r.grad_norm_sq) + "," + opt(r.auc);
  for (std::size_t k = 0; k < n_pauc; ++k) {
    row += ",";
    if (k < r.pauc.size()) row += format_real(r.pauc[k]);
  }
  row += "," + std::to_string(r.uplink_floats) + "," + std::to_string(r.downlink_floats) + "," +
         std::to_string(r.buffer_wraps);
  return row;
}

TraceWriter::TraceWriter(const std::string& path, const std::string& config_line,
                         const std::vector<double>& pauc_fprs)
    : out_(path, std::ios::out | std::ios::trunc), n_pauc_(pauc_fprs.size()) {
  if (!out_) throw IoError("cannot open trace file " + path + " for writing");
  out_ << "# config: " << config_line << '\n' << trace_header(pauc_fprs) << '\n';
  out_.flush();
  if (!out_) throw IoError("cannot write trace file " + path);
}

void TraceWriter::write(const RoundRecord& record) {
  out_ << format_row(record, n_pauc_) << '\n';
  out_.flush();
  if (!out_) throw IoError("trace write failed");
}

IterationWriter::IterationWriter(const std::string& path) : out_(path, std::ios::out | std::ios::trunc) {
  if (!out_) throw IoError("cannot open iteration trace " + path + " for writing");
  out_ << "client,round,iteration,loss_estimate,step_size\n";
}

void IterationWriter::write(const IterationRecord& r) {
  out_ << r.client << ',' << r.round << ',' << r.iteration << ',' << format_real(r.loss_estimate)
       << ',' << format_real(r.step_size) << '\n';
}

RunTrace read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read trace file " + path);
  RunTrace trace;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# config: ", 0) != 0) {
    throw IoError(path + ": missing config header");
  }
  trace.config_line = line.substr(10);
  if (!std::getline(in, line)) throw IoError(path + ": missing column header");
  std::vector<std::string> columns;
  {
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) columns.push_back(col);
  }
  for (const auto& col : columns) {
    if (col.rfind("pauc@", 0) == 0) trace.pauc_fprs.push_back(std::stod(col.substr(5)));
  }
  const std::size_t n_pauc = trace.pauc_fprs.size();
  if (columns.size() != 8 + n_pauc) throw IoError(path + ": unexpected column count");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != columns.size()) throw IoError(path + ": ragged row");
    auto opt = [](const std::string& s) -> std::optional<double> {
      if (s.empty()) return std::nullopt;
      return std::stod(s);
    };
    RoundRecord r;
    r.round = std::stoi(cells[0]);
    r.wall_seconds = std::stod(cells[1]);
    r.objective = opt(cells[2]);
    r.grad_norm_sq = opt(cells[3]);
    r.auc = opt(cells[4]);
    for (std::size_t k = 0; k < n_pauc; ++k) {
      if (auto v = opt(cells[5 + k])) r.pauc.push_back(*v);
    }
    r.uplink_floats = std::stoull(cells[5 + n_pauc]);
    r.downlink_floats = std::stoull(cells[6 + n_pauc]);
    r.buffer_wraps = std::stoull(cells[7 + n_pauc]);
    trace.rounds.push_back(std::move(r));
  }
  return trace;
}

}  // namespace fedx
