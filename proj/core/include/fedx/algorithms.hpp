#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "fedx/data.hpp"
#include "fedx/federation.hpp"
#include "fedx/losses.hpp"
#include "fedx/model.hpp"

namespace fedx {

enum class Algorithm { kFedX1, kFedX2, kLocalSgd, kLocalPair, kCentralized };

// How the hatted samples that feed H and U are chosen in FedX2.
enum class HistorySamples { kIndependent, kReuse };

// Initial contents of a client's u-table. kZero is u(z) = 0 for every
// positive; kBootstrap seeds u(z) with one loss value at w0 against a random
// local negative so that no emitted u-record sits at the clamp floor.
enum class UInit { kBootstrap, kZero };

struct HyperParams {
  double eta = 0.1;
  int K = 32;
  int R = 50;
  int B1 = 32;
  int B2 = 32;
  double gamma = 0.9;
  double beta = 0.1;
  // 0 disables decay; otherwise eta is multiplied by lr_decay_factor after
  // every lr_decay_every local iterations.
  int lr_decay_every = 0;
  double lr_decay_factor = 0.1;
  std::uint64_t seed = 1;
  HistorySamples history_samples = HistorySamples::kIndependent;
  UInit u_init = UInit::kBootstrap;

  double step_size(long long iteration) const;
};

void validate(const HyperParams& hyper);

struct Problem {
  ScorerSpec scorer;
  PairwiseLossSpec loss;
  OuterFnSpec outer;
};

// Moving-average tracker of g(w, z, S2) for the positives of one client.
class UTable {
 public:
  UTable() = default;
  // Every id starts at `initial`.
  UTable(std::span<const std::int64_t> ids, double initial = 0.0);

  bool contains(std::int64_t id) const { return values_.count(id) != 0; }
  double at(std::int64_t id) const;
  void set(std::int64_t id, double value);
  std::size_t size() const { return values_.size(); }

 private:
  std::unordered_map<std::int64_t, double> values_;
};

// u(z1) <- (1 - gamma) u(z1) + gamma * l(fresh_score, lazy2.value); returns
// the new value. Other entries are untouched.
double fedx2_u_update(UTable& table, const PairwiseLossSpec& loss, std::int64_t z1,
                      double fresh_score, const ScoreRecord& lazy2, double gamma);

struct Estimate {
  ParamVector grad;
  std::vector<double> fresh1;  // h(w, z1_m)
  std::vector<double> fresh2;  // h(w, z2_m)
};

// G1 + G2 with lazy S2 scores paired against the active positives and lazy
// S1 scores paired against the active negatives:
//   G1 = 1/B1 sum_m d1 l(h(w, z1_m), lazy2_m) grad h(w, z1_m)
//   G2 = 1/B2 sum_m d2 l(lazy1_m, h(w, z2_m)) grad h(w, z2_m)
Estimate fedx1_estimate(const ScorerSpec& scorer, const PairwiseLossSpec& loss,
                        std::span<const double> w, std::span<const Sample* const> z1,
                        std::span<const Sample* const> z2, std::span<const ScoreRecord> lazy2,
                        std::span<const ScoreRecord> lazy1);

// As fedx1_estimate with outer-derivative weights: f'(u_z1[m]) on G1 terms
// (u_z1 holds the already-updated u of each z1_m) and f'(lazy_u[m]) on G2
// terms, lazy_u[m] sharing provenance with lazy1[m].
Estimate fedx2_estimate(const ScorerSpec& scorer, const PairwiseLossSpec& loss,
                        const OuterFnSpec& outer, std::span<const double> w,
                        std::span<const Sample* const> z1, std::span<const Sample* const> z2,
                        std::span<const ScoreRecord> lazy2, std::span<const ScoreRecord> lazy1,
                        std::span<const double> u_z1, std::span<const URecord> lazy_u);

// G <- (1 - beta) G + beta * raw
void momentum_step(std::span<double> momentum, std::span<const double> raw, double beta);

// Per-sample logistic loss log(1 + exp(-y h)) with y = +1 for S1, -1 for S2;
// used by the Local SGD baseline. Returns the loss and adds coef * gradient.
double logistic_loss_accumulate(const ScorerSpec& scorer, std::span<const double> w,
                                const Sample& sample, double coef, std::span<double> grad);

enum class ScheduleKind { kFedX1, kFedX2 };

// Hyperparameters from a target accuracy eps:
//   fedx1: R = ceil(scale / eps^3), eta = scale * N * eps^2, K = max(1, ceil(1 / (N eps)))
//   fedx2: R = ceil(scale * sqrt(M) / eps^3), eta = scale * eps^2 / M,
//          gamma = scale * eps^2, beta = scale * eps^2 / sqrt(M), K = max(1, ceil(sqrt(M) / eps))
// gamma and beta are clamped to (0, 1]. Fields not listed keep `base`.
HyperParams theory_schedule(ScheduleKind kind, double eps, std::size_t n_clients, std::size_t m,
                            double scale, HyperParams base = {});

struct IterationRecord {
  int client = 0;
  int round = 0;
  int iteration = 0;
  double loss_estimate = 0.0;
  double step_size = 0.0;
  // Raw estimator G1 + G2 before momentum; filled only when requested.
  std::vector<double> estimate;
};

struct RoundEvent {
  int round = 0;
  const ParamVector& model;
  CommCost cost;  // per client; zero for the centralized baseline
  std::size_t buffer_wraps = 0;
  std::span<const IterationRecord> iterations;
};

using RoundSink = std::function<void(const RoundEvent&)>;

struct RunOptions {
  unsigned threads = 0;
  bool record_iterations = false;
  bool record_estimates = false;
};

// Round 0 is the bootstrap exchange at w0; rounds 1..R follow. The sink sees
// every round in order after aggregation. Returns the final averaged model.
ParamVector run_algorithm(Algorithm algorithm, const FederatedDataset& data,
                          const Problem& problem, const HyperParams& hyper, const RoundSink& sink,
                          const RunOptions& options = {});

ParamVector fedx1_run(const FederatedDataset& data, const Problem& problem,
                      const HyperParams& hyper, const RoundSink& sink,
                      const RunOptions& options = {});
ParamVector fedx2_run(const FederatedDataset& data, const Problem& problem,
                      const HyperParams& hyper, const RoundSink& sink,
                      const RunOptions& options = {});
ParamVector local_sgd_run(const FederatedDataset& data, const Problem& problem,
                          const HyperParams& hyper, const RoundSink& sink,
                          const RunOptions& options = {});
ParamVector local_pair_run(const FederatedDataset& data, const Problem& problem,
                           const HyperParams& hyper, const RoundSink& sink,
                           const RunOptions& options = {});
ParamVector centralized_run(const FederatedDataset& data, const Problem& problem,
                            const HyperParams& hyper, const RoundSink& sink,
                            const RunOptions& options = {});

// Throws ConfigError when the outer function does not fit the algorithm.
void check_compatibility(Algorithm algorithm, const OuterFnSpec& outer);

ParamVector initial_model(const ScorerSpec& scorer, std::uint64_t seed);

}  // namespace fedx
