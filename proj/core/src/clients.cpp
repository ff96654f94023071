#include "clients.hpp"

#include <algorithm>
#include <string>

#include "fedx/errors.hpp"

namespace fedx::detail {

std::vector<std::size_t> sample_without_replacement(Stream& rng, std::size_t n,
                                                    std::size_t count) {
  if (count > n) throw InvalidArgument("minibatch larger than the shard");
  std::vector<std::size_t> out;
  out.reserve(count);
  for (std::size_t j = n - count; j < n; ++j) {
    const std::size_t t = static_cast<std::size_t>(rng.below(j + 1));
    if (std::find(out.begin(), out.end(), t) == out.end()) {
      out.push_back(t);
    } else {
      out.push_back(j);
    }
  }
  return out;
}

ClientBase::ClientBase(const ClientSetup& setup, int index, const ClientShard& shard,
                       ParamVector w0)
    : setup_(setup), index_(index), shard_(shard), w_(std::move(w0)) {
  const auto& h = hyper();
  if (static_cast<std::size_t>(h.B1) > shard.pos.size()) {
    throw ConfigError("hyper.B1", "exceeds the " + std::to_string(shard.pos.size()) +
                                      " positives on client " + std::to_string(index));
  }
  if (static_cast<std::size_t>(h.B2) > shard.neg.size()) {
    throw ConfigError("hyper.B2", "exceeds the " + std::to_string(shard.neg.size()) +
                                      " negatives on client " + std::to_string(index));
  }
}

std::vector<const Sample*> ClientBase::draw(Stream& rng, const std::vector<Sample>& from,
                                            std::size_t count) const {
  std::vector<const Sample*> out;
  out.reserve(count);
  for (std::size_t idx : sample_without_replacement(rng, from.size(), count)) {
    out.push_back(&from[idx]);
  }
  return out;
}

void ClientBase::record(int round, int iteration, double loss_estimate, double step,
                        const ParamVector* estimate) {
  if (!setup_.record_iterations) return;
  IterationRecord rec{index_, round, iteration, loss_estimate, step, {}};
  if (setup_.record_estimates && estimate) rec.estimate = *estimate;
  iterations_.push_back(std::move(rec));
}

UTable ClientBase::seeded_u_table(const ParamVector& w0) const {
  std::vector<std::int64_t> ids;
  for (const auto& s : shard_.pos) ids.push_back(s.id);
  UTable table(ids, 0.0);
  if (hyper().u_init == UInit::kZero) return table;
  Stream rng = make_stream(hyper().seed, Purpose::kBootstrap, static_cast<std::uint64_t>(index_), 1);
  const auto& p = problem();
  for (const auto& s : shard_.pos) {
    const auto& partner = shard_.neg[static_cast<std::size_t>(rng.below(shard_.neg.size()))];
    table.set(s.id, loss(p.loss, score(p.scorer, w0, s.features),
                         score(p.scorer, w0, partner.features)));
  }
  return table;
}

namespace {

ScoreRecord make_record(double value, int client, int round, int iteration, const Sample& s) {
  return ScoreRecord{value, client, round, iteration, s.id};
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

// FedX1 (linear outer) and FedX2 (nonlinear outer) share the round skeleton:
// bootstrap histories at w0, buffers refilled from the last aggregate, K
// local steps that mix fresh local scores with one-round-stale lazy ones.
class FedXClient final : public ClientBase {
 public:
  FedXClient(const ClientSetup& setup, int index, const ClientShard& shard, ParamVector w0,
             bool nonlinear)
      : ClientBase(setup, index, shard, std::move(w0)), nonlinear_(nonlinear) {
    if (nonlinear_) {
      momentum_.assign(w_.size(), 0.0);
      u_table_ = seeded_u_table(w_);
    }
  }

  RoundUpload bootstrap() override {
    const auto& p = problem();
    const auto& h = hyper();
    RoundUpload up = empty_upload(0);
    for (int k = 0; k < h.K; ++k) {
      Stream rng = make_stream(h.seed, Purpose::kBootstrap, index_, 0, k);
      const auto z1 = draw(rng, shard_.pos, h.B1);
      const auto z2 = draw(rng, shard_.neg, h.B2);
      std::vector<double> s2;
      for (const auto* z : z2) {
        s2.push_back(score(p.scorer, w_, z->features));
        up.h2.records.push_back(make_record(s2.back(), index_, 0, k, *z));
      }
      for (std::size_t m = 0; m < z1.size(); ++m) {
        const double a = score(p.scorer, w_, z1[m]->features);
        up.h1.records.push_back(make_record(a, index_, 0, k, *z1[m]));
        if (nonlinear_) {
          // u0 of a bootstrap positive: one loss value against the paired
          // bootstrap negative at w0.
          const double u0 = loss(p.loss, a, s2[m % s2.size()]);
          up.u->push_back(URecord{u0, index_, 0, k, z1[m]->id});
        }
      }
    }
    return up;
  }

  RoundUpload local_round(int round) override {
    const auto& p = problem();
    const auto& h = hyper();
    RoundUpload up = empty_upload(round);
    const std::size_t wraps_before = wraps();
    std::vector<ScoreRecord> lazy2, lazy1;
    std::vector<PairedRecord> paired;
    std::vector<URecord> lazy_u;
    std::vector<double> u_z1;
    for (int k = 0; k < h.K; ++k) {
      const double step = h.step_size(static_cast<long long>(round - 1) * h.K + k);
      Stream rng = make_stream(h.seed, Purpose::kActiveSample, index_, round, k);
      const auto z1 = draw(rng, shard_.pos, h.B1);
      const auto z2 = draw(rng, shard_.neg, h.B2);
      lazy2.clear();
      neg_buffer_.next_into(h.B1, lazy2);

      Estimate est;
      double loss_sum = 0.0;
      if (!nonlinear_) {
        lazy1.clear();
        pos_buffer_.next_into(h.B2, lazy1);
        est = fedx1_estimate(p.scorer, p.loss, w_, z1, z2, lazy2, lazy1);
        for (std::size_t m = 0; m < z1.size(); ++m) {
          up.h1.records.push_back(make_record(est.fresh1[m], index_, round, k, *z1[m]));
          loss_sum += loss(p.loss, est.fresh1[m], lazy2[m].value);
        }
        for (std::size_t m = 0; m < z2.size(); ++m) {
          up.h2.records.push_back(make_record(est.fresh2[m], index_, round, k, *z2[m]));
        }
        axpy(-step, est.grad, w_);
      } else {
        paired.clear();
        pos_paired_buffer_.next_into(h.B2, paired);
        lazy1.clear();
        lazy_u.clear();
        for (const auto& pr : paired) {
          lazy1.push_back(pr.score);
          lazy_u.push_back(pr.u);
        }
        u_z1.clear();
        std::vector<double> fresh1;
        for (std::size_t m = 0; m < z1.size(); ++m) {
          fresh1.push_back(score(p.scorer, w_, z1[m]->features));
          u_z1.push_back(fedx2_u_update(u_table_, p.loss, z1[m]->id, fresh1[m], lazy2[m], h.gamma));
          loss_sum += loss(p.loss, fresh1[m], lazy2[m].value);
        }
        emit_history(up, round, k, z1, z2, fresh1);
        est = fedx2_estimate(p.scorer, p.loss, p.outer, w_, z1, z2, lazy2, lazy1, u_z1, lazy_u);
        momentum_step(momentum_, est.grad, h.beta);
        axpy(-step, momentum_, w_);
      }
      record(round, k, loss_sum / static_cast<double>(z1.size()), step, &est.grad);
    }
    up.model = w_;
    if (nonlinear_) up.momentum = momentum_;
    up.buffer_wraps = wraps() - wraps_before;
    return up;
  }

  void receive(const RoundDownload& down) override {
    const auto& h = hyper();
    w_ = down.model;
    if (nonlinear_) momentum_ = *down.momentum;
    const auto next_round = static_cast<std::uint64_t>(down.round + 1);
    neg_buffer_.refill(down.r2, make_stream(h.seed, Purpose::kBufferNegScores, index_, next_round));
    Stream pos_rng = make_stream(h.seed, Purpose::kBufferPosScores, index_, next_round);
    if (!nonlinear_) {
      pos_buffer_.refill(down.r1, pos_rng);
      return;
    }
    if (!down.p || down.p->size() != down.r1.size()) {
      throw ProtocolError("aggregated u-records do not align with the S1 history");
    }
    std::vector<PairedRecord> paired;
    paired.reserve(down.r1.size());
    for (std::size_t k = 0; k < down.r1.size(); ++k) paired.push_back({down.r1[k], (*down.p)[k]});
    pos_paired_buffer_.refill(std::move(paired), pos_rng);
  }

 private:
  RoundUpload empty_upload(int round) const {
    RoundUpload up;
    up.client = index_;
    up.round = round;
    up.model = w_;
    if (nonlinear_) {
      up.momentum = momentum_;
      up.u.emplace();
    }
    return up;
  }

  // Hatted samples: fresh independent draws by default, or the update
  // samples themselves. Their scores go to H, their current u to U.
  void emit_history(RoundUpload& up, int round, int k, const std::vector<const Sample*>& z1,
                    const std::vector<const Sample*>& z2, const std::vector<double>& fresh1) {
    const auto& p = problem();
    const auto& h = hyper();
    if (h.history_samples == HistorySamples::kReuse) {
      for (std::size_t m = 0; m < z1.size(); ++m) {
        up.h1.records.push_back(make_record(fresh1[m], index_, round, k, *z1[m]));
        up.u->push_back(URecord{u_table_.at(z1[m]->id), index_, round, k, z1[m]->id});
      }
      for (const auto* z : z2) {
        up.h2.records.push_back(make_record(score(p.scorer, w_, z->features), index_, round, k, *z));
      }
      return;
    }
    Stream rng = make_stream(h.seed, Purpose::kHistorySample, index_, round, k);
    const auto hat1 = draw(rng, shard_.pos, h.B1);
    const auto hat2 = draw(rng, shard_.neg, h.B2);
    for (const auto* z : hat1) {
      up.h1.records.push_back(make_record(score(p.scorer, w_, z->features), index_, round, k, *z));
      up.u->push_back(URecord{u_table_.at(z->id), index_, round, k, z->id});
    }
    for (const auto* z : hat2) {
      up.h2.records.push_back(make_record(score(p.scorer, w_, z->features), index_, round, k, *z));
    }
  }

  std::size_t wraps() const {
    return neg_buffer_.wraps() + pos_buffer_.wraps() + pos_paired_buffer_.wraps();
  }

  bool nonlinear_;
  ParamVector momentum_;
  UTable u_table_;
  Buffer<ScoreRecord> neg_buffer_;         // lazy S2 scores, paired with active positives
  Buffer<ScoreRecord> pos_buffer_;         // lazy S1 scores (FedX1)
  Buffer<PairedRecord> pos_paired_buffer_;  // lazy S1 scores with their u (FedX2)
};

// Local Pair and Centralized: every minibatch positive is paired with every
// minibatch negative of the same shard, all scored at the current model.
// Nonlinear outer functions track u per positive (SOX) and use momentum.
class LocalPairClient final : public ClientBase {
 public:
  LocalPairClient(const ClientSetup& setup, int index, const ClientShard& shard, ParamVector w0)
      : ClientBase(setup, index, shard, std::move(w0)),
        nonlinear_(problem().outer.kind != OuterKind::kIdentity) {
    if (nonlinear_) {
      momentum_.assign(w_.size(), 0.0);
      u_table_ = seeded_u_table(w_);
    }
  }

  RoundUpload bootstrap() override { return upload(0); }

  RoundUpload local_round(int round) override {
    const auto& p = problem();
    const auto& h = hyper();
    ParamVector grad(w_.size());
    for (int k = 0; k < h.K; ++k) {
      const double step = h.step_size(static_cast<long long>(round - 1) * h.K + k);
      Stream rng = make_stream(h.seed, Purpose::kActiveSample, index_, round, k);
      const auto z1 = draw(rng, shard_.pos, h.B1);
      const auto z2 = draw(rng, shard_.neg, h.B2);
      std::vector<double> a, b;
      for (const auto* z : z1) a.push_back(score(p.scorer, w_, z->features));
      for (const auto* z : z2) b.push_back(score(p.scorer, w_, z->features));

      const double inv_pairs = 1.0 / static_cast<double>(z1.size() * z2.size());
      std::vector<double> neg_coef(z2.size(), 0.0);
      std::fill(grad.begin(), grad.end(), 0.0);
      double loss_sum = 0.0;
      for (std::size_t m = 0; m < z1.size(); ++m) {
        double inner = 0.0;
        for (double bq : b) inner += loss(p.loss, a[m], bq);
        loss_sum += inner;
        double weight = 1.0;
        if (nonlinear_) {
          const double old = u_table_.at(z1[m]->id);
          const double u = (1.0 - h.gamma) * old + h.gamma * inner / static_cast<double>(b.size());
          u_table_.set(z1[m]->id, u);
          weight = outer_grad(p.outer, u);
        }
        double da = 0.0;
        for (std::size_t q = 0; q < b.size(); ++q) {
          const auto g = loss_grads(p.loss, a[m], b[q]);
          da += g.d_a;
          neg_coef[q] += weight * g.d_b;
        }
        accumulate_score_grad(p.scorer, w_, z1[m]->features, weight * da * inv_pairs, grad);
      }
      for (std::size_t q = 0; q < z2.size(); ++q) {
        accumulate_score_grad(p.scorer, w_, z2[q]->features, neg_coef[q] * inv_pairs, grad);
      }
      if (nonlinear_) {
        momentum_step(momentum_, grad, h.beta);
        axpy(-step, momentum_, w_);
      } else {
        axpy(-step, grad, w_);
      }
      record(round, k, loss_sum * inv_pairs, step, &grad);
    }
    return upload(round);
  }

  void receive(const RoundDownload& down) override {
    w_ = down.model;
    if (nonlinear_) momentum_ = *down.momentum;
  }

 private:
  RoundUpload upload(int round) const {
    RoundUpload up;
    up.client = index_;
    up.round = round;
    up.model = w_;
    if (nonlinear_) up.momentum = momentum_;
    return up;
  }

  bool nonlinear_;
  ParamVector momentum_;
  UTable u_table_;
};

// Local SGD on per-sample cross-entropy; only the model is exchanged.
class LocalSgdClient final : public ClientBase {
 public:
  using ClientBase::ClientBase;

  RoundUpload bootstrap() override { return upload(0); }

  RoundUpload local_round(int round) override {
    const auto& p = problem();
    const auto& h = hyper();
    ParamVector grad(w_.size());
    for (int k = 0; k < h.K; ++k) {
      const double step = h.step_size(static_cast<long long>(round - 1) * h.K + k);
      Stream rng = make_stream(h.seed, Purpose::kActiveSample, index_, round, k);
      const auto z1 = draw(rng, shard_.pos, h.B1);
      const auto z2 = draw(rng, shard_.neg, h.B2);
      const double coef = 1.0 / static_cast<double>(z1.size() + z2.size());
      std::fill(grad.begin(), grad.end(), 0.0);
      double loss_sum = 0.0;
      for (const auto* z : z1) loss_sum += logistic_loss_accumulate(p.scorer, w_, *z, coef, grad);
      for (const auto* z : z2) loss_sum += logistic_loss_accumulate(p.scorer, w_, *z, coef, grad);
      axpy(-step, grad, w_);
      record(round, k, loss_sum * coef, step, &grad);
    }
    return upload(round);
  }

  void receive(const RoundDownload& down) override { w_ = down.model; }

 private:
  RoundUpload upload(int round) const {
    RoundUpload up;
    up.client = index_;
    up.round = round;
    up.model = w_;
    return up;
  }
};

}  // namespace

std::unique_ptr<FederatedClient> make_client(Algorithm algorithm, const ClientSetup& setup,
                                             int index, const ClientShard& shard,
                                             const ParamVector& w0) {
  switch (algorithm) {
    case Algorithm::kFedX1:
      return std::make_unique<FedXClient>(setup, index, shard, w0, false);
    case Algorithm::kFedX2:
      return std::make_unique<FedXClient>(setup, index, shard, w0, true);
    case Algorithm::kLocalSgd:
      return std::make_unique<LocalSgdClient>(setup, index, shard, w0);
    case Algorithm::kLocalPair:
    case Algorithm::kCentralized:
      return std::make_unique<LocalPairClient>(setup, index, shard, w0);
  }
  throw InvalidArgument("unknown algorithm");
}

}  // namespace fedx::detail
