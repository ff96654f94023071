#include "fedx/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "clients.hpp"
#include "fedx/errors.hpp"

namespace fedx {

double HyperParams::step_size(long long iteration) const {
  if (lr_decay_every <= 0) return eta;
  const long long drops = iteration / lr_decay_every;
  return eta * std::pow(lr_decay_factor, static_cast<double>(drops));
}

void validate(const HyperParams& h) {
  if (!(h.eta >= 0.0) || !std::isfinite(h.eta)) throw ConfigError("hyper.eta", "must be >= 0");
  if (h.K < 1) throw ConfigError("hyper.K", "must be >= 1");
  if (h.R < 1) throw ConfigError("hyper.R", "must be >= 1");
  if (h.B1 < 1) throw ConfigError("hyper.B1", "must be >= 1");
  if (h.B2 < 1) throw ConfigError("hyper.B2", "must be >= 1");
  if (!(h.gamma > 0.0 && h.gamma <= 1.0)) throw ConfigError("hyper.gamma", "must lie in (0, 1]");
  if (!(h.beta > 0.0 && h.beta <= 1.0)) throw ConfigError("hyper.beta", "must lie in (0, 1]");
  if (h.lr_decay_every < 0) throw ConfigError("hyper.lr_decay_every", "must be >= 0");
  if (!(h.lr_decay_factor > 0.0 && h.lr_decay_factor <= 1.0)) {
    throw ConfigError("hyper.lr_decay_factor", "must lie in (0, 1]");
  }
}

UTable::UTable(std::span<const std::int64_t> ids, double initial) {
  for (auto id : ids) values_[id] = initial;
}

double UTable::at(std::int64_t id) const {
  auto it = values_.find(id);
  if (it == values_.end()) throw InvalidArgument("u-table has no entry for sample " + std::to_string(id));
  return it->second;
}

void UTable::set(std::int64_t id, double value) {
  auto it = values_.find(id);
  if (it == values_.end()) throw InvalidArgument("u-table has no entry for sample " + std::to_string(id));
  it->second = value;
}

double fedx2_u_update(UTable& table, const PairwiseLossSpec& loss_spec, std::int64_t z1,
                      double fresh_score, const ScoreRecord& lazy2, double gamma) {
  const double old = table.at(z1);
  const double updated = (1.0 - gamma) * old + gamma * loss(loss_spec, fresh_score, lazy2.value);
  table.set(z1, updated);
  return updated;
}

namespace {

void check_batches(std::size_t z1, std::size_t z2, std::size_t lazy2, std::size_t lazy1) {
  if (z1 == 0 || z2 == 0) throw InvalidArgument("empty minibatch");
  if (z1 != lazy2) throw InvalidArgument("|z1| must equal the number of lazy S2 scores");
  if (z2 != lazy1) throw InvalidArgument("|z2| must equal the number of lazy S1 scores");
}

template <typename PosWeight, typename NegWeight>
Estimate estimate_impl(const ScorerSpec& scorer, const PairwiseLossSpec& loss_spec,
                       std::span<const double> w, std::span<const Sample* const> z1,
                       std::span<const Sample* const> z2, std::span<const ScoreRecord> lazy2,
                       std::span<const ScoreRecord> lazy1, PosWeight pos_weight,
                       NegWeight neg_weight) {
  Estimate est;
  est.grad.assign(w.size(), 0.0);
  est.fresh1.reserve(z1.size());
  est.fresh2.reserve(z2.size());
  const double inv_b1 = 1.0 / static_cast<double>(z1.size());
  const double inv_b2 = 1.0 / static_cast<double>(z2.size());
  for (std::size_t m = 0; m < z1.size(); ++m) {
    const double a = score(scorer, w, z1[m]->features);
    const double coef = pos_weight(m) * loss_grads(loss_spec, a, lazy2[m].value).d_a * inv_b1;
    accumulate_score_grad(scorer, w, z1[m]->features, coef, est.grad);
    est.fresh1.push_back(a);
  }
  for (std::size_t m = 0; m < z2.size(); ++m) {
    const double b = score(scorer, w, z2[m]->features);
    const double coef = neg_weight(m) * loss_grads(loss_spec, lazy1[m].value, b).d_b * inv_b2;
    accumulate_score_grad(scorer, w, z2[m]->features, coef, est.grad);
    est.fresh2.push_back(b);
  }
  return est;
}

}  // namespace

Estimate fedx1_estimate(const ScorerSpec& scorer, const PairwiseLossSpec& loss_spec,
                        std::span<const double> w, std::span<const Sample* const> z1,
                        std::span<const Sample* const> z2, std::span<const ScoreRecord> lazy2,
                        std::span<const ScoreRecord> lazy1) {
  check_batches(z1.size(), z2.size(), lazy2.size(), lazy1.size());
  auto one = [](std::size_t) { return 1.0; };
  return estimate_impl(scorer, loss_spec, w, z1, z2, lazy2, lazy1, one, one);
}

Estimate fedx2_estimate(const ScorerSpec& scorer, const PairwiseLossSpec& loss_spec,
                        const OuterFnSpec& outer_spec, std::span<const double> w,
                        std::span<const Sample* const> z1, std::span<const Sample* const> z2,
                        std::span<const ScoreRecord> lazy2, std::span<const ScoreRecord> lazy1,
                        std::span<const double> u_z1, std::span<const URecord> lazy_u) {
  check_batches(z1.size(), z2.size(), lazy2.size(), lazy1.size());
  if (u_z1.size() != z1.size()) throw InvalidArgument("one u value per z1 sample is required");
  if (lazy_u.size() != z2.size()) throw InvalidArgument("one lazy u-record per z2 sample is required");
  return estimate_impl(
      scorer, loss_spec, w, z1, z2, lazy2, lazy1,
      [&](std::size_t m) { return outer_grad(outer_spec, u_z1[m]); },
      [&](std::size_t m) { return outer_grad(outer_spec, lazy_u[m].value); });
}

void momentum_step(std::span<double> momentum, std::span<const double> raw, double beta) {
  if (momentum.size() != raw.size()) throw InvalidArgument("momentum length mismatch");
  for (std::size_t i = 0; i < momentum.size(); ++i) {
    momentum[i] = (1.0 - beta) * momentum[i] + beta * raw[i];
  }
}

double logistic_loss_accumulate(const ScorerSpec& scorer, std::span<const double> w,
                                const Sample& sample, double coef, std::span<double> grad) {
  const double y = sample.group == Group::kPositive ? 1.0 : -1.0;
  const double t = -y * score(scorer, w, sample.features);
  // log(1 + e^t) and its derivative sigma(t), both without overflow.
  const double value = t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
  const double sig = t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
  accumulate_score_grad(scorer, w, sample.features, coef * -y * sig, grad);
  return value;
}

HyperParams theory_schedule(ScheduleKind kind, double eps, std::size_t n_clients, std::size_t m,
                            double scale, HyperParams base) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("target eps must lie in (0, 1)");
  if (!(scale > 0.0)) throw InvalidArgument("schedule scale must be positive");
  if (n_clients == 0) throw InvalidArgument("schedule needs at least one client");
  const double e2 = eps * eps;
  const double e3 = e2 * eps;
  auto clamp01 = [](double v) { return std::min(v, 1.0); };
  auto at_least_one = [](double v) { return static_cast<int>(std::max(1.0, std::ceil(v))); };
  if (kind == ScheduleKind::kFedX1) {
    const double n = static_cast<double>(n_clients);
    base.R = at_least_one(scale / e3);
    base.eta = scale * n * e2;
    base.K = at_least_one(1.0 / (n * eps));
    return base;
  }
  if (m == 0) throw InvalidArgument("schedule needs M >= 1");
  const double md = static_cast<double>(m);
  const double root_m = std::sqrt(md);
  base.R = at_least_one(scale * root_m / e3);
  base.eta = scale * e2 / md;
  base.gamma = clamp01(scale * e2);
  base.beta = clamp01(scale * e2 / root_m);
  base.K = at_least_one(root_m / eps);
  return base;
}

void check_compatibility(Algorithm algorithm, const OuterFnSpec& outer_spec) {
  if (algorithm == Algorithm::kFedX1 && outer_spec.kind != OuterKind::kIdentity) {
    throw ConfigError("outer.kind", "fedx1 requires the identity outer function");
  }
  if (algorithm == Algorithm::kFedX2 && outer_spec.kind != OuterKind::kKlLog) {
    throw ConfigError("outer.kind", "fedx2 requires a nonlinear outer function (kl_log)");
  }
}

ParamVector initial_model(const ScorerSpec& scorer, std::uint64_t seed) {
  Stream rng = make_stream(seed, Purpose::kInit);
  return initial_params(scorer, rng);
}

ParamVector run_algorithm(Algorithm algorithm, const FederatedDataset& data,
                          const Problem& problem, const HyperParams& hyper, const RoundSink& sink,
                          const RunOptions& options) {
  validate(problem.scorer);
  validate(problem.loss);
  validate(problem.outer);
  validate(hyper);
  check_compatibility(algorithm, problem.outer);
  if (data.clients.empty()) throw InvalidArgument("dataset has no clients");
  if (data.input_dim != problem.scorer.input_dim) {
    throw ConfigError("scorer.input_dim", "does not match the dataset feature count");
  }

  const ParamVector w0 = initial_model(problem.scorer, hyper.seed);
  detail::ClientSetup setup{&problem, &hyper, options.record_iterations || options.record_estimates,
                            options.record_estimates};

  // The centralized baseline is one worker over the union of all shards.
  ClientShard union_shard;
  const bool centralized = algorithm == Algorithm::kCentralized;
  if (centralized) {
    union_shard.pos = data.all_pos();
    union_shard.neg = data.all_neg();
  }

  std::vector<std::unique_ptr<FederatedClient>> clients;
  const std::size_t n = centralized ? 1 : data.clients.size();
  for (std::size_t i = 0; i < n; ++i) {
    const ClientShard& shard = centralized ? union_shard : data.clients[i];
    clients.push_back(detail::make_client(algorithm, setup, static_cast<int>(i), shard, w0));
  }

  InProcessTransport transport;
  for (int r = 0; r <= hyper.R; ++r) {
    RoundStats stats = run_round(clients, transport, r, options.threads);
    if (centralized) stats.cost = {};
    if (!std::all_of(stats.model.begin(), stats.model.end(), [](double v) { return std::isfinite(v); })) {
      throw NumericalError("model is not finite after round " + std::to_string(r) +
                           "; the step size is too large for this loss");
    }
    std::vector<IterationRecord> iterations;
    if (setup.record_iterations) {
      for (auto& c : clients) {
        auto recs = static_cast<detail::ClientBase&>(*c).take_iterations();
        iterations.insert(iterations.end(), std::make_move_iterator(recs.begin()),
                          std::make_move_iterator(recs.end()));
      }
    }
    if (sink) sink(RoundEvent{r, stats.model, stats.cost, stats.buffer_wraps, iterations});
    if (r == hyper.R) return stats.model;
  }
  return w0;
}

ParamVector fedx1_run(const FederatedDataset& data, const Problem& problem,
                      const HyperParams& hyper, const RoundSink& sink, const RunOptions& options) {
  return run_algorithm(Algorithm::kFedX1, data, problem, hyper, sink, options);
}

ParamVector fedx2_run(const FederatedDataset& data, const Problem& problem,
                      const HyperParams& hyper, const RoundSink& sink, const RunOptions& options) {
  return run_algorithm(Algorithm::kFedX2, data, problem, hyper, sink, options);
}

ParamVector local_sgd_run(const FederatedDataset& data, const Problem& problem,
                          const HyperParams& hyper, const RoundSink& sink,
                          const RunOptions& options) {
  return run_algorithm(Algorithm::kLocalSgd, data, problem, hyper, sink, options);
}

ParamVector local_pair_run(const FederatedDataset& data, const Problem& problem,
                           const HyperParams& hyper, const RoundSink& sink,
                           const RunOptions& options) {
  return run_algorithm(Algorithm::kLocalPair, data, problem, hyper, sink, options);
}

ParamVector centralized_run(const FederatedDataset& data, const Problem& problem,
                            const HyperParams& hyper, const RoundSink& sink,
                            const RunOptions& options) {
  return run_algorithm(Algorithm::kCentralized, data, problem, hyper, sink, options);
}

}  // namespace fedx
