#include "fedx/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>

#include "fedx/errors.hpp"
#include "fedx/metrics.hpp"

namespace fedx {

namespace {

double norm_sq(const ParamVector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

std::optional<double> pauc_at(const RoundRecord& r, const std::vector<double>& fprs, double q) {
  for (std::size_t k = 0; k < fprs.size() && k < r.pauc.size(); ++k) {
    if (fprs[k] == q) return r.pauc[k];
  }
  return std::nullopt;
}

std::string iteration_path(const std::string& trace_path) {
  std::filesystem::path p(trace_path);
  return (p.parent_path() / (p.stem().string() + ".iter.csv")).string();
}

}  // namespace

unsigned threads_from_env() {
  const char* v = std::getenv("FEDX_THREADS");
  if (!v || !*v) return 0;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 0) return 0;
  return static_cast<unsigned>(n);
}

RunTrace run(const RunConfig& input, const RunEnv& env) {
  RunConfig config = input;
  config.scorer.input_dim = config.data.input_dim;
  validate(config);

  // Placeholder header; rewritten once the schedule is resolved. Opening
  // first surfaces an unwritable path before any work.
  auto writer = std::make_unique<TraceWriter>(config.output_path, to_one_line(config),
                                              config.pauc_fprs);

  const FederatedDataset data = build_training_data(config.data);
  config = resolve_schedule(std::move(config), data);
  writer = std::make_unique<TraceWriter>(config.output_path, to_one_line(config), config.pauc_fprs);
  std::unique_ptr<IterationWriter> iter_writer;
  if (config.verbose) iter_writer = std::make_unique<IterationWriter>(iteration_path(config.output_path));

  const auto s1 = data.all_pos();
  const auto s2 = data.all_neg();
  const Problem problem{config.scorer, config.loss, config.outer};

  RunTrace trace;
  trace.config_line = to_one_line(config);
  trace.pauc_fprs = config.pauc_fprs;
  trace.n_clients = config.algorithm == Algorithm::kCentralized ? 1 : data.clients.size();

  const auto start = std::chrono::steady_clock::now();
  const int last_round = config.hyper.R;
  RoundSink sink = [&](const RoundEvent& ev) {
    RoundRecord rec;
    rec.round = ev.round;
    const bool final_round = ev.round == last_round;
    if (final_round || ev.round % config.oracle_every_rounds == 0) {
      auto [obj, grad] = exact_objective_and_grad(config.loss, config.outer, config.scorer,
                                                  ev.model, s1, s2);
      rec.objective = obj;
      rec.grad_norm_sq = norm_sq(grad);
    }
    if (final_round || ev.round % config.eval_every_rounds == 0) {
      const ScoredEval eval = score_eval_split(config.scorer, ev.model, data.eval_pos, data.eval_neg);
      rec.auc = auc(eval);
      for (double q : config.pauc_fprs) rec.pauc.push_back(partial_auc(eval, q));
    }
    rec.uplink_floats = ev.cost.uplink_floats;
    rec.downlink_floats = ev.cost.downlink_floats;
    rec.buffer_wraps = ev.buffer_wraps;
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    writer->write(rec);
    if (iter_writer) {
      for (const auto& it : ev.iterations) iter_writer->write(it);
    }
    trace.rounds.push_back(std::move(rec));
  };

  RunOptions options;
  options.threads = env.threads;
  options.record_iterations = config.verbose;
  run_algorithm(config.algorithm, data, problem, config.hyper, sink, options);

  if (env.log) {
    const auto& last = trace.last();
    *env.log << to_string(config.algorithm) << " R=" << config.hyper.R
             << " final_objective=" << format_real(last.objective.value_or(0.0));
    if (!config.pauc_fprs.empty() && !last.pauc.empty()) {
      *env.log << " final_pauc@" << config.pauc_fprs.front() << "=" << format_real(last.pauc.front());
    }
    *env.log << " total_floats=" << trace.total_floats() << '\n';
  }
  return trace;
}

RunConfig with_axis_value(const RunConfig& base, SweepAxis axis, int value) {
  if (value < 1) throw ConfigError(axis == SweepAxis::kK ? "hyper.K" : "data.n_clients", "must be >= 1");
  RunConfig c = base;
  if (axis == SweepAxis::kK) {
    c.hyper.K = value;
    c.explicit_keys.insert("hyper.K");
    return c;
  }
  const std::size_t n = static_cast<std::size_t>(value);
  const std::size_t total_pos = base.data.n_pos_per_client * base.data.n_clients;
  const std::size_t total_neg = base.data.n_neg_per_client * base.data.n_clients;
  if (total_pos % n != 0 || total_neg % n != 0) {
    throw ConfigError("data.n_clients", "sweep value " + std::to_string(value) +
                                            " does not divide the total data evenly");
  }
  c.data.n_clients = n;
  c.data.n_pos_per_client = total_pos / n;
  c.data.n_neg_per_client = total_neg / n;
  return c;
}

SweepResult sweep(const RunConfig& base, SweepAxis axis, const std::vector<int>& values,
                  const std::string& out_dir, const RunEnv& env) {
  if (values.empty()) throw ConfigError("values", "sweep needs at least one value");
  std::filesystem::create_directories(out_dir);
  const std::string axis_name = axis == SweepAxis::kK ? "K" : "N";
  const std::string summary_path = (std::filesystem::path(out_dir) / "summary.csv").string();
  std::ofstream summary(summary_path, std::ios::out | std::ios::trunc);
  if (!summary) throw IoError("cannot write " + summary_path);
  summary << axis_name << ",final_objective,final_pauc@0.3,final_pauc@0.5,floats_communicated\n";
  summary.flush();

  SweepResult result;
  for (int v : values) {
    RunConfig c = with_axis_value(base, axis, v);
    c.output_path =
        (std::filesystem::path(out_dir) / ("trace_" + axis_name + std::to_string(v) + ".csv")).string();
    for (double q : {0.3, 0.5}) {
      if (std::find(c.pauc_fprs.begin(), c.pauc_fprs.end(), q) == c.pauc_fprs.end()) {
        c.pauc_fprs.push_back(q);
      }
    }
    RunTrace trace = run(c, env);
    const auto& last = trace.last();
    SweepRow row{static_cast<double>(v), last.objective.value_or(0.0),
                 pauc_at(last, trace.pauc_fprs, 0.3).value_or(0.0),
                 pauc_at(last, trace.pauc_fprs, 0.5).value_or(0.0), trace.total_floats()};
    summary << v << ',' << format_real(row.final_objective) << ',' << format_real(row.final_pauc_03)
            << ',' << format_real(row.final_pauc_05) << ',' << row.floats << '\n';
    summary.flush();
    result.rows.push_back(row);
    result.traces.push_back(std::move(trace));
  }
  return result;
}

OracleReport oracle(const RunConfig& input) {
  RunConfig config = input;
  config.scorer.input_dim = config.data.input_dim;
  validate(config);
  const FederatedDataset data = build_training_data(config.data);
  const ParamVector w0 = initial_model(config.scorer, config.hyper.seed);
  auto [obj, grad] = exact_objective_and_grad(config.loss, config.outer, config.scorer, w0,
                                              data.all_pos(), data.all_neg());
  OracleReport report{obj, grad, norm_sq(grad)};
  return report;
}

}  // namespace fedx
