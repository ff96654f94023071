#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fedx/algorithms.hpp"
#include "fedx/data.hpp"
#include "fedx/losses.hpp"
#include "fedx/model.hpp"

namespace fedx {

struct TheoryConfig {
  bool enabled = false;
  double eps = 0.1;
  double scale = 1.0;
};

struct RunConfig {
  Algorithm algorithm = Algorithm::kFedX1;
  DataConfig data;
  ScorerSpec scorer{ScorerKind::kLinear, 10, 8};
  PairwiseLossSpec loss;
  OuterFnSpec outer;
  HyperParams hyper;
  TheoryConfig theory;
  int eval_every_rounds = 1;
  int oracle_every_rounds = 1;
  std::vector<double> pauc_fprs{0.3, 0.5};
  bool verbose = false;  // per-iteration trace next to the round trace
  std::string output_path = "trace.csv";

  // Keys that appeared in the parsed text; explicit hyper.* values win over
  // the theory schedule.
  std::set<std::string> explicit_keys;
};

// Flat `section.key = value` lines; `#` starts a comment; blank lines are
// ignored. Unknown keys, malformed values and invariant violations throw
// ConfigError naming the key.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

// Every resolved key, one `key = value` per line, in a fixed order.
// parse_config(to_text(c)) reproduces c.
std::string to_text(const RunConfig& config);

// The same keys on one line, for the trace header.
std::string to_one_line(const RunConfig& config);

void validate(const RunConfig& config);

// Applies the theory schedule (if enabled) for the realised data; explicit
// hyper.* keys are kept.
RunConfig resolve_schedule(RunConfig config, const FederatedDataset& data);

std::string_view to_string(Algorithm algorithm);
std::string_view to_string(PairwiseLossKind kind);
std::string_view to_string(OuterKind kind);
std::string_view to_string(ScorerKind kind);

}  // namespace fedx
