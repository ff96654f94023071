#pragma once

#include <memory>
#include <vector>

#include "fedx/algorithms.hpp"
#include "fedx/federation.hpp"

namespace fedx::detail {

struct ClientSetup {
  const Problem* problem = nullptr;
  const HyperParams* hyper = nullptr;
  bool record_iterations = false;
  bool record_estimates = false;
};

// `count` distinct indices in [0, n), Floyd's algorithm.
std::vector<std::size_t> sample_without_replacement(Stream& rng, std::size_t n, std::size_t count);

class ClientBase : public FederatedClient {
 public:
  ClientBase(const ClientSetup& setup, int index, const ClientShard& shard, ParamVector w0);

  int index() const override { return index_; }
  std::vector<IterationRecord> take_iterations() { return std::move(iterations_); }

 protected:
  std::vector<const Sample*> draw(Stream& rng, const std::vector<Sample>& from,
                                  std::size_t count) const;
  void record(int round, int iteration, double loss_estimate, double step,
              const ParamVector* estimate);
  UTable seeded_u_table(const ParamVector& w0) const;

  const Problem& problem() const { return *setup_.problem; }
  const HyperParams& hyper() const { return *setup_.hyper; }

  ClientSetup setup_;
  int index_;
  const ClientShard& shard_;
  ParamVector w_;

 private:
  std::vector<IterationRecord> iterations_;
};

std::unique_ptr<FederatedClient> make_client(Algorithm algorithm, const ClientSetup& setup,
                                             int index, const ClientShard& shard,
                                             const ParamVector& w0);

}  // namespace fedx::detail
