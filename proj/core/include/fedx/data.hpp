#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace fedx {

enum class Group : int { kPositive = 1, kNegative = 0 };

struct Sample {
  std::int64_t id = 0;
  std::vector<double> features;
  Group group = Group::kPositive;
  int client = 0;
};

struct ClientShard {
  std::vector<Sample> pos;  // S1^i
  std::vector<Sample> neg;  // S2^i
};

struct FederatedDataset {
  std::size_t input_dim = 0;
  std::vector<ClientShard> clients;
  std::vector<Sample> eval_pos;
  std::vector<Sample> eval_neg;

  std::vector<Sample> all_pos() const;
  std::vector<Sample> all_neg() const;
  std::size_t total_train() const;
};

struct DataConfig {
  std::size_t n_pos_per_client = 32;
  std::size_t n_neg_per_client = 160;
  std::size_t input_dim = 10;
  std::size_t n_clients = 16;
  std::size_t n_eval_pos = 200;
  std::size_t n_eval_neg = 1000;
  // Distance between the two class means (along the all-ones direction).
  double separation = 1.8;
  // Fraction of negatives drawn from a far-off "outlier" component; their
  // mean sits outlier_shift away along a direction orthogonal to the class
  // axis.
  double outlier_fraction = 0.0;
  double outlier_shift = 0.0;
  double hetero_step = 0.01;
  double hetero_base = -0.08;
  double hetero_var = 0.04;
  double flip_fraction = 0.0;
  std::uint64_t seed = 1;
};

void validate(const DataConfig& config);

// Clean two-cluster data, partitioned in contiguous blocks by client. The
// k-th positive (negative) of the global pool is drawn from its own substream,
// so the pool does not depend on n_clients; only the partition does.
FederatedDataset generate(const DataConfig& config);

// Client i gets i.i.d. N(hetero_base + i * hetero_step, hetero_var) noise on
// every feature of every training sample. hetero_var is a variance.
FederatedDataset apply_heterogeneity(FederatedDataset dataset, const DataConfig& config);

// Per client: floor(f * |S1^i|) random positives move to S2^i and
// floor(f * |S2^i|) random negatives move to S1^i.
FederatedDataset flip_labels(FederatedDataset dataset, double flip_fraction, std::uint64_t seed);

// generate -> flip_labels -> apply_heterogeneity.
FederatedDataset build_training_data(const DataConfig& config);

// Line format: id<TAB>group(0|1)<TAB>client<TAB>f_0,f_1,...
// Covers training shards only; eval samples are written with client -1.
void write_dataset(std::ostream& out, const FederatedDataset& dataset);
FederatedDataset read_dataset(std::istream& in);

}  // namespace fedx
