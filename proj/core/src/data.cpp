#include "fedx/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "fedx/errors.hpp"
#include "fedx/rng.hpp"

namespace fedx {

namespace {

std::vector<double> draw_point(Stream& rng, const DataConfig& c, Group group, bool outlier) {
  const double axis = (group == Group::kPositive ? 0.5 : -0.5) * c.separation /
                      std::sqrt(static_cast<double>(c.input_dim));
  std::vector<double> x(c.input_dim);
  for (double& v : x) v = axis + rng.normal();
  if (outlier && c.input_dim >= 2) {
    x[0] += c.outlier_shift / std::sqrt(2.0);
    x[1] -= c.outlier_shift / std::sqrt(2.0);
  }
  return x;
}

Sample make_sample(const DataConfig& c, Purpose purpose, Group group, std::uint64_t index,
                   std::int64_t id, int client) {
  Stream rng = make_stream(c.seed, purpose, 0, 0, index);
  bool outlier = false;
  if (group == Group::kNegative && c.outlier_fraction > 0.0) {
    outlier = rng.uniform() < c.outlier_fraction;
  }
  return Sample{id, draw_point(rng, c, group, outlier), group, client};
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::vector<Sample> FederatedDataset::all_pos() const {
  std::vector<Sample> out;
  for (const auto& c : clients) out.insert(out.end(), c.pos.begin(), c.pos.end());
  return out;
}

std::vector<Sample> FederatedDataset::all_neg() const {
  std::vector<Sample> out;
  for (const auto& c : clients) out.insert(out.end(), c.neg.begin(), c.neg.end());
  return out;
}

std::size_t FederatedDataset::total_train() const {
  std::size_t n = 0;
  for (const auto& c : clients) n += c.pos.size() + c.neg.size();
  return n;
}

void validate(const DataConfig& c) {
  if (c.n_pos_per_client == 0) throw ConfigError("data.n_pos_per_client", "must be >= 1");
  if (c.n_neg_per_client == 0) throw ConfigError("data.n_neg_per_client", "must be >= 1");
  if (c.input_dim == 0) throw ConfigError("data.input_dim", "must be >= 1");
  if (c.n_clients == 0) throw ConfigError("data.n_clients", "must be >= 1");
  if (c.n_eval_pos == 0) throw ConfigError("data.n_eval_pos", "must be >= 1");
  if (c.n_eval_neg == 0) throw ConfigError("data.n_eval_neg", "must be >= 1");
  if (c.hetero_var < 0.0) throw ConfigError("data.hetero_var", "must be >= 0");
  if (!(c.flip_fraction >= 0.0 && c.flip_fraction <= 1.0)) {
    throw ConfigError("data.flip_fraction", "must lie in [0, 1]");
  }
  if (!(c.outlier_fraction >= 0.0 && c.outlier_fraction <= 1.0)) {
    throw ConfigError("data.outlier_fraction", "must lie in [0, 1]");
  }
}

FederatedDataset generate(const DataConfig& c) {
  validate(c);
  FederatedDataset ds;
  ds.input_dim = c.input_dim;
  ds.clients.resize(c.n_clients);
  const std::uint64_t n_pos = c.n_pos_per_client * c.n_clients;
  const std::uint64_t n_neg = c.n_neg_per_client * c.n_clients;
  std::int64_t next_id = 0;
  for (std::size_t i = 0; i < c.n_clients; ++i) {
    auto& shard = ds.clients[i];
    for (std::size_t k = 0; k < c.n_pos_per_client; ++k) {
      const std::uint64_t idx = i * c.n_pos_per_client + k;
      shard.pos.push_back(make_sample(c, Purpose::kDataPositive, Group::kPositive, idx,
                                      static_cast<std::int64_t>(idx), static_cast<int>(i)));
    }
    for (std::size_t k = 0; k < c.n_neg_per_client; ++k) {
      const std::uint64_t idx = i * c.n_neg_per_client + k;
      shard.neg.push_back(make_sample(c, Purpose::kDataNegative, Group::kNegative, idx,
                                      static_cast<std::int64_t>(n_pos + idx),
                                      static_cast<int>(i)));
    }
  }
  next_id = static_cast<std::int64_t>(n_pos + n_neg);
  for (std::uint64_t k = 0; k < c.n_eval_pos; ++k) {
    ds.eval_pos.push_back(make_sample(c, Purpose::kEvalPositive, Group::kPositive, k, next_id++, -1));
  }
  for (std::uint64_t k = 0; k < c.n_eval_neg; ++k) {
    ds.eval_neg.push_back(make_sample(c, Purpose::kEvalNegative, Group::kNegative, k, next_id++, -1));
  }
  return ds;
}

FederatedDataset apply_heterogeneity(FederatedDataset ds, const DataConfig& c) {
  if (ds.clients.size() != c.n_clients) {
    throw InvalidArgument("dataset client count does not match config.n_clients");
  }
  const double sd = std::sqrt(c.hetero_var);
  for (std::size_t i = 0; i < ds.clients.size(); ++i) {
    const double mu = c.hetero_base + static_cast<double>(i) * c.hetero_step;
    auto perturb = [&](Sample& s) {
      Stream rng = make_stream(c.seed, Purpose::kHeterogeneity, i, 0,
                               static_cast<std::uint64_t>(s.id));
      for (double& v : s.features) v += mu + sd * rng.normal();
    };
    if (mu == 0.0 && sd == 0.0) continue;
    for (auto& s : ds.clients[i].pos) perturb(s);
    for (auto& s : ds.clients[i].neg) perturb(s);
  }
  return ds;
}

FederatedDataset flip_labels(FederatedDataset ds, double flip_fraction, std::uint64_t seed) {
  if (!(flip_fraction >= 0.0 && flip_fraction <= 1.0)) {
    throw InvalidArgument("flip_fraction must lie in [0, 1]");
  }
  if (flip_fraction == 0.0) return ds;
  for (std::size_t i = 0; i < ds.clients.size(); ++i) {
    auto& shard = ds.clients[i];
    Stream rng = make_stream(seed, Purpose::kLabelFlip, i);
    auto pick = [&](std::vector<Sample>& from) {
      const auto n_move =
          static_cast<std::size_t>(std::floor(flip_fraction * static_cast<double>(from.size())));
      std::vector<std::size_t> order(from.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      rng.shuffle(std::span<std::size_t>(order));
      std::vector<bool> moving(from.size(), false);
      for (std::size_t k = 0; k < n_move; ++k) moving[order[k]] = true;
      std::vector<Sample> keep, moved;
      for (std::size_t k = 0; k < from.size(); ++k) {
        (moving[k] ? moved : keep).push_back(std::move(from[k]));
      }
      from = std::move(keep);
      return moved;
    };
    auto pos_to_neg = pick(shard.pos);
    auto neg_to_pos = pick(shard.neg);
    for (auto& s : pos_to_neg) {
      s.group = Group::kNegative;
      shard.neg.push_back(std::move(s));
    }
    for (auto& s : neg_to_pos) {
      s.group = Group::kPositive;
      shard.pos.push_back(std::move(s));
    }
  }
  return ds;
}

FederatedDataset build_training_data(const DataConfig& c) {
  return apply_heterogeneity(flip_labels(generate(c), c.flip_fraction, c.seed), c);
}

void write_dataset(std::ostream& out, const FederatedDataset& ds) {
  auto emit = [&](const Sample& s) {
    out << s.id << '\t' << static_cast<int>(s.group) << '\t' << s.client << '\t';
    for (std::size_t k = 0; k < s.features.size(); ++k) {
      if (k) out << ',';
      out << format_double(s.features[k]);
    }
    out << '\n';
  };
  for (const auto& c : ds.clients) {
    for (const auto& s : c.pos) emit(s);
    for (const auto& s : c.neg) emit(s);
  }
  for (const auto& s : ds.eval_pos) emit(s);
  for (const auto& s : ds.eval_neg) emit(s);
}

FederatedDataset read_dataset(std::istream& in) {
  FederatedDataset ds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string id_s, group_s, client_s, feats;
    if (!std::getline(fields, id_s, '\t') || !std::getline(fields, group_s, '\t') ||
        !std::getline(fields, client_s, '\t') || !std::getline(fields, feats)) {
      throw IoError("dataset line " + std::to_string(line_no) + ": expected 4 tab-separated fields");
    }
    Sample s;
    s.id = std::stoll(id_s);
    const int g = std::stoi(group_s);
    if (g != 0 && g != 1) throw IoError("dataset line " + std::to_string(line_no) + ": bad group");
    s.group = g == 1 ? Group::kPositive : Group::kNegative;
    s.client = std::stoi(client_s);
    std::size_t pos = 0;
    while (pos <= feats.size()) {
      const std::size_t comma = std::min(feats.find(',', pos), feats.size());
      double v = 0.0;
      auto res = std::from_chars(feats.data() + pos, feats.data() + comma, v);
      if (res.ec != std::errc{} || res.ptr != feats.data() + comma) {
        throw IoError("dataset line " + std::to_string(line_no) + ": bad feature value");
      }
      s.features.push_back(v);
      pos = comma + 1;
    }
    if (ds.input_dim == 0) ds.input_dim = s.features.size();
    if (s.features.size() != ds.input_dim) {
      throw IoError("dataset line " + std::to_string(line_no) + ": feature count mismatch");
    }
    if (s.client < 0) {
      (s.group == Group::kPositive ? ds.eval_pos : ds.eval_neg).push_back(std::move(s));
      continue;
    }
    if (static_cast<std::size_t>(s.client) >= ds.clients.size()) ds.clients.resize(s.client + 1);
    auto& shard = ds.clients[s.client];
    (s.group == Group::kPositive ? shard.pos : shard.neg).push_back(std::move(s));
  }
  return ds;
}

}  // namespace fedx
