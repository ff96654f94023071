#include "selftest.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "fedx/algorithms.hpp"
#include "fedx/data.hpp"
#include "fedx/federation.hpp"
#include "fedx/losses.hpp"
#include "fedx/metrics.hpp"
#include "fedx/rng.hpp"

namespace fedx::tools {

namespace {

double brute_auc(const ScoredEval& e) {
  double wins = 0.0;
  for (double p : e.pos_scores) {
    for (double n : e.neg_scores) wins += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  }
  return wins / (static_cast<double>(e.pos_scores.size()) * static_cast<double>(e.neg_scores.size()));
}

bool check_auc() {
  Stream rng = make_stream(7, Purpose::kMonteCarlo);
  for (int trial = 0; trial < 50; ++trial) {
    ScoredEval e;
    const std::size_t p = 1 + rng.below(20);
    const std::size_t q = 1 + rng.below(20);
    // Coarse values so ties occur.
    for (std::size_t k = 0; k < p; ++k) e.pos_scores.push_back(static_cast<double>(rng.below(6)));
    for (std::size_t k = 0; k < q; ++k) e.neg_scores.push_back(static_cast<double>(rng.below(6)));
    if (std::abs(auc(e) - brute_auc(e)) > 1e-12) return false;
    if (std::abs(partial_auc(e, 1.0) - auc(e)) > 1e-12) return false;
  }
  return true;
}

bool check_loss_grads() {
  const PairwiseLossSpec specs[] = {{PairwiseLossKind::kPsmSigmoid, 1.0},
                                    {PairwiseLossKind::kKlOpauc, 2.0},
                                    {PairwiseLossKind::kSquare, 1.0}};
  Stream rng = make_stream(11, Purpose::kMonteCarlo);
  const double h = 1e-6;
  for (const auto& spec : specs) {
    for (int k = 0; k < 100; ++k) {
      const double a = 4.0 * rng.uniform() - 2.0;
      const double b = 4.0 * rng.uniform() - 2.0;
      const LossGrads g = loss_grads(spec, a, b);
      const double fa = (loss(spec, a + h, b) - loss(spec, a - h, b)) / (2 * h);
      const double fb = (loss(spec, a, b + h) - loss(spec, a, b - h)) / (2 * h);
      const double tol = 1e-5 * (1.0 + std::abs(fa) + std::abs(fb));
      if (std::abs(g.d_a - fa) > tol || std::abs(g.d_b - fb) > tol) return false;
    }
  }
  return true;
}

bool check_exact_grad() {
  DataConfig dc;
  dc.n_clients = 2;
  dc.n_pos_per_client = 3;
  dc.n_neg_per_client = 5;
  dc.input_dim = 4;
  const FederatedDataset data = build_training_data(dc);
  const ScorerSpec scorer{ScorerKind::kMlp1, 4, 3};
  const PairwiseLossSpec loss{PairwiseLossKind::kKlOpauc, 2.0};
  const OuterFnSpec f{OuterKind::kKlLog, 1.0};
  const ParamVector w = initial_model(scorer, 3);
  const auto s1 = data.all_pos();
  const auto s2 = data.all_neg();
  const ParamVector g = exact_grad(loss, f, scorer, w, s1, s2);
  const ParamVector fd = finite_diff_grad(
      [&](std::span<const double> v) { return exact_objective(loss, f, scorer, v, s1, s2); }, w, 1e-6);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (std::abs(g[k] - fd[k]) > 1e-5 * (1.0 + std::abs(fd[k]))) return false;
  }
  return true;
}

bool check_aggregate() {
  std::vector<RoundUpload> ups;
  for (int c = 3; c >= 0; --c) {
    RoundUpload u;
    u.client = c;
    u.round = 1;
    u.model = {static_cast<double>(c), 1.0};
    u.h1.records.push_back({0.5, c, 1, 0, c});
    u.h2.records.push_back({-0.5, c, 1, 0, 10 + c});
    ups.push_back(u);
  }
  const RoundDownload d = server_aggregate(ups, 4);
  if (d.model.size() != 2 || d.model[0] != 1.5 || d.model[1] != 1.0) return false;
  for (int c = 0; c < 4; ++c) {
    if (d.r1[static_cast<std::size_t>(c)].client != c) return false;
  }
  const CommCost cost = comm_cost(ups.front(), d);
  return cost.uplink_floats == 2 + 2 && cost.downlink_floats == 2 + 8;
}

bool check_u_update() {
  const std::vector<std::int64_t> ids{0};
  UTable table(ids, 1.0);
  const PairwiseLossSpec loss{PairwiseLossKind::kKlOpauc, 1.0};
  // l(0, 0) = e, so u = 0.9 * 1 + 0.1 * e.
  const double u = fedx2_u_update(table, loss, 0, 0.0, ScoreRecord{0.0, 0, 0, 0, 1}, 0.1);
  return std::abs(u - (0.9 + 0.1 * std::exp(1.0))) < 1e-12;
}

}  // namespace

bool run_selftest(std::ostream& out) {
  struct Check {
    const char* name;
    std::function<bool()> fn;
  };
  const Check checks[] = {
      {"auc matches brute force with ties", check_auc},
      {"loss partials match central differences", check_loss_grads},
      {"exact gradient matches central differences", check_exact_grad},
      {"server mean, history order and float count", check_aggregate},
      {"moving-average u update", check_u_update},
  };
  bool all = true;
  for (const auto& c : checks) {
    bool ok = false;
    try {
      ok = c.fn();
    } catch (const std::exception& e) {
      out << "  exception: " << e.what() << '\n';
    }
    out << (ok ? "PASS " : "FAIL ") << c.name << '\n';
    all = all && ok;
  }
  return all;
}

}  // namespace fedx::tools
