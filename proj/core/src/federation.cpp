#include "fedx/federation.hpp"

#include <algorithm>
#include <string>
#include <thread>

namespace fedx {

namespace {

constexpr std::size_t kProvenanceInts = 4;

void tree_sum(std::span<const ParamVector* const> vs, std::span<double> out) {
  if (vs.size() == 1) {
    std::copy(vs[0]->begin(), vs[0]->end(), out.begin());
    return;
  }
  const std::size_t half = vs.size() / 2;
  std::vector<double> right(out.size());
  tree_sum(vs.first(half), out);
  tree_sum(vs.subspan(half), right);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += right[i];
}

}  // namespace

ParamVector tree_mean(std::span<const ParamVector* const> vectors) {
  if (vectors.empty()) throw InvalidArgument("mean of zero vectors");
  const std::size_t d = vectors[0]->size();
  for (const auto* v : vectors) {
    if (v->size() != d) throw ProtocolError("uploaded vectors differ in length");
  }
  ParamVector out(d, 0.0);
  tree_sum(vectors, out);
  const double n = static_cast<double>(vectors.size());
  for (double& x : out) x /= n;
  return out;
}

RoundDownload server_aggregate(std::vector<RoundUpload> uploads, std::size_t n_clients) {
  if (uploads.size() != n_clients) {
    throw ProtocolError("expected " + std::to_string(n_clients) + " uploads, got " +
                        std::to_string(uploads.size()));
  }
  std::sort(uploads.begin(), uploads.end(),
            [](const RoundUpload& a, const RoundUpload& b) { return a.client < b.client; });
  for (std::size_t i = 0; i < uploads.size(); ++i) {
    if (uploads[i].client != static_cast<int>(i)) {
      throw ProtocolError("uploads do not cover clients 0..N-1 exactly once");
    }
  }
  const bool with_momentum = uploads.front().momentum.has_value();
  const bool with_u = uploads.front().u.has_value();
  for (const auto& up : uploads) {
    if (up.momentum.has_value() != with_momentum || up.u.has_value() != with_u) {
      throw ProtocolError("clients disagree on message layout");
    }
  }

  RoundDownload down;
  down.round = uploads.front().round;
  std::vector<const ParamVector*> models;
  for (const auto& up : uploads) models.push_back(&up.model);
  down.model = tree_mean(models);
  if (with_momentum) {
    std::vector<const ParamVector*> moms;
    for (const auto& up : uploads) moms.push_back(&*up.momentum);
    down.momentum = tree_mean(moms);
  }
  if (with_u) down.p.emplace();
  for (auto& up : uploads) {
    down.r1.insert(down.r1.end(), up.h1.records.begin(), up.h1.records.end());
    down.r2.insert(down.r2.end(), up.h2.records.begin(), up.h2.records.end());
    if (with_u) down.p->insert(down.p->end(), up.u->begin(), up.u->end());
  }
  return down;
}

CommCost comm_cost(const RoundUpload& up, const RoundDownload& down) {
  CommCost c;
  c.uplink_floats = up.model.size() + (up.momentum ? up.momentum->size() : 0) +
                    up.h1.records.size() + up.h2.records.size() + (up.u ? up.u->size() : 0);
  c.uplink_ints = kProvenanceInts * (up.h1.records.size() + up.h2.records.size() +
                                     (up.u ? up.u->size() : 0));
  c.downlink_floats = down.model.size() + (down.momentum ? down.momentum->size() : 0) +
                      down.r1.size() + down.r2.size() + (down.p ? down.p->size() : 0);
  c.downlink_ints =
      kProvenanceInts * (down.r1.size() + down.r2.size() + (down.p ? down.p->size() : 0));
  return c;
}

void InProcessTransport::send_upload(RoundUpload upload) { inbox_.push_back(std::move(upload)); }

std::vector<RoundUpload> InProcessTransport::collect_uploads() {
  std::vector<RoundUpload> out(std::make_move_iterator(inbox_.begin()),
                               std::make_move_iterator(inbox_.end()));
  inbox_.clear();
  return out;
}

void InProcessTransport::broadcast(RoundDownload download) { last_ = std::move(download); }

const RoundDownload& InProcessTransport::receive(int /*client*/) {
  if (!last_) throw ProtocolError("no download has been broadcast yet");
  return *last_;
}

RoundStats run_round(std::span<const std::unique_ptr<FederatedClient>> clients,
                     Transport& transport, int round, unsigned threads) {
  std::vector<RoundUpload> uploads(clients.size());
  auto work = [&](std::size_t i) {
    uploads[i] = round == 0 ? clients[i]->bootstrap() : clients[i]->local_round(round);
  };

  if (threads <= 1 || clients.size() <= 1) {
    for (std::size_t i = 0; i < clients.size(); ++i) work(i);
  } else {
    std::vector<std::exception_ptr> errors(clients.size());
    const std::size_t n_workers = std::min<std::size_t>(threads, clients.size());
    {
      std::vector<std::jthread> workers;
      for (std::size_t t = 0; t < n_workers; ++t) {
        workers.emplace_back([&, t] {
          for (std::size_t i = t; i < clients.size(); i += n_workers) {
            try {
              work(i);
            } catch (...) {
              errors[i] = std::current_exception();
            }
          }
        });
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  // Barrier: nothing is aggregated until every client has uploaded.
  RoundStats stats;
  stats.round = round;
  for (const auto& up : uploads) stats.buffer_wraps += up.buffer_wraps;
  const RoundUpload first = uploads.front();
  for (auto& up : uploads) transport.send_upload(std::move(up));
  transport.broadcast(server_aggregate(transport.collect_uploads(), clients.size()));
  for (const auto& c : clients) c->receive(transport.receive(c->index()));

  const RoundDownload& down = transport.receive(0);
  stats.cost = comm_cost(first, down);
  stats.model = down.model;
  return stats;
}

}  // namespace fedx
