#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "fedx/errors.hpp"
#include "fedx/model.hpp"
#include "fedx/rng.hpp"

namespace fedx {

// One stored prediction h with its provenance (client j, round, iteration t,
// sample id). Only `value` is numeric payload; the rest is bookkeeping.
struct ScoreRecord {
  double value = 0.0;
  int client = 0;
  int round = 0;
  int iteration = 0;
  std::int64_t sample_id = 0;

  friend bool operator==(const ScoreRecord&, const ScoreRecord&) = default;
};

// A stored moving-average estimate u(z) with the same provenance fields.
struct URecord {
  double value = 0.0;
  int client = 0;
  int round = 0;
  int iteration = 0;
  std::int64_t sample_id = 0;

  friend bool operator==(const URecord&, const URecord&) = default;
};

enum class HistorySide { kPositive, kNegative };

struct HistorySet {
  HistorySide side = HistorySide::kPositive;
  std::vector<ScoreRecord> records;
};

// A client-side queue over the last aggregated list. refill() replaces the
// contents with a Fisher-Yates permutation of the received list and rewinds;
// next() draws sequentially and, on exhaustion, reshuffles the same entries
// and keeps going (counted in wraps()).
template <typename T>
class Buffer {
 public:
  void refill(std::vector<T> received, Stream rng) {
    if (received.empty()) throw ProtocolError("buffer refill with an empty aggregate");
    entries_ = std::move(received);
    rng_ = rng;
    rng_->shuffle(std::span<T>(entries_));
    cursor_ = 0;
  }

  std::vector<T> next(std::size_t count) {
    std::vector<T> out;
    out.reserve(count);
    next_into(count, out);
    return out;
  }

  void next_into(std::size_t count, std::vector<T>& out) {
    if (!rng_) throw ProtocolError("buffer drawn before its first refill");
    for (std::size_t k = 0; k < count; ++k) {
      if (cursor_ == entries_.size()) {
        rng_->shuffle(std::span<T>(entries_));
        cursor_ = 0;
        ++wraps_;
      }
      out.push_back(entries_[cursor_++]);
    }
  }

  bool refilled() const { return rng_.has_value(); }
  std::size_t size() const { return entries_.size(); }
  std::size_t cursor() const { return cursor_; }
  std::size_t wraps() const { return wraps_; }
  std::span<const T> entries() const { return entries_; }

 private:
  std::vector<T> entries_;
  std::size_t cursor_ = 0;
  std::size_t wraps_ = 0;
  std::optional<Stream> rng_;
};

// Positive-side lazy draw for FedX2: the S1 score and the u estimate of the
// same hatted sample travel together so one permutation keeps them paired.
struct PairedRecord {
  ScoreRecord score;
  URecord u;
};

struct RoundUpload {
  int client = 0;
  int round = 0;
  ParamVector model;
  std::optional<ParamVector> momentum;
  HistorySet h1{HistorySide::kPositive, {}};
  HistorySet h2{HistorySide::kNegative, {}};
  std::optional<std::vector<URecord>> u;
  // Bookkeeping, not payload.
  std::size_t buffer_wraps = 0;
};

struct RoundDownload {
  int round = 0;
  ParamVector model;
  std::optional<ParamVector> momentum;
  std::vector<ScoreRecord> r1;
  std::vector<ScoreRecord> r2;
  std::optional<std::vector<URecord>> p;
};

struct CommCost {
  std::size_t uplink_floats = 0;
  std::size_t downlink_floats = 0;
  std::size_t uplink_ints = 0;
  std::size_t downlink_ints = 0;
};

// Mean model (pairwise-tree sum in client order), mean momentum when present,
// histories and u-lists concatenated in client order. Uploads may arrive in
// any order; they are sorted by client index first.
RoundDownload server_aggregate(std::vector<RoundUpload> uploads, std::size_t n_clients);

// Every real number in the two messages. Provenance fields (4 integers per
// record) are reported separately.
CommCost comm_cost(const RoundUpload& upload, const RoundDownload& download);

// Deterministic order-fixed mean of equal-length vectors.
ParamVector tree_mean(std::span<const ParamVector* const> vectors);

// Messages between clients and the server. Implementations must deliver
// every upload of a round before collect() returns; no partial rounds.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send_upload(RoundUpload upload) = 0;
  virtual std::vector<RoundUpload> collect_uploads() = 0;
  virtual void broadcast(RoundDownload download) = 0;
  virtual const RoundDownload& receive(int client) = 0;
};

// In-process queue. Delivery order is the order of send_upload() calls; the
// server re-sorts by client so that order never matters.
class InProcessTransport final : public Transport {
 public:
  void send_upload(RoundUpload upload) override;
  std::vector<RoundUpload> collect_uploads() override;
  void broadcast(RoundDownload download) override;
  const RoundDownload& receive(int client) override;

 private:
  std::deque<RoundUpload> inbox_;
  std::optional<RoundDownload> last_;
};

// What a client does inside the synchronous round loop.
class FederatedClient {
 public:
  virtual ~FederatedClient() = default;
  virtual int index() const = 0;
  // Round 0: score the bootstrap samples at w0 and produce the first upload.
  virtual RoundUpload bootstrap() = 0;
  // Round r >= 1: refill buffers from the last download, run K local steps,
  // produce the upload.
  virtual RoundUpload local_round(int round) = 0;
  virtual void receive(const RoundDownload& download) = 0;
};

struct RoundStats {
  int round = 0;
  CommCost cost;  // per client
  std::size_t buffer_wraps = 0;  // summed over clients
  ParamVector model;  // w-bar after aggregation
};

// One synchronous round: every client runs (round 0 = bootstrap), uploads go
// through the transport, the server aggregates after all have arrived, the
// download is delivered to every client. `threads` = 0 runs clients
// serially; results do not depend on it.
RoundStats run_round(std::span<const std::unique_ptr<FederatedClient>> clients,
                     Transport& transport, int round, unsigned threads);

}  // namespace fedx
