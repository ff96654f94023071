// Acceptance checks, one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when all pass).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "fedx/algorithms.hpp"
#include "fedx/harness.hpp"
#include "fedx/losses.hpp"
#include "fedx/metrics.hpp"
#include "fedx/rng.hpp"

namespace fedx {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

std::vector<Sample> gaussian_samples(Stream& rng, std::size_t n, std::size_t dim, Group g, std::int64_t id0) {
  std::vector<Sample> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k].id = id0 + static_cast<std::int64_t>(k);
    out[k].group = g;
    out[k].features.resize(dim);
    for (double& v : out[k].features) v = rng.normal();
  }
  return out;
}

// Per-coordinate running mean and variance (Welford).
struct Moments {
  explicit Moments(std::size_t d) : mean(d, 0.0), m2(d, 0.0) {}
  void add(const std::vector<double>& x) {
    ++n;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double delta = x[j] - mean[j];
      mean[j] += delta / static_cast<double>(n);
      m2[j] += delta * (x[j] - mean[j]);
    }
  }
  double stderr_of(std::size_t j) const {
    return std::sqrt(m2[j] / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
  }
  std::size_t n = 0;
  std::vector<double> mean, m2;
};

// Worst |mean - target| / stderr over coordinates; pass when <= 3.
Outcome within_three_se(const Moments& m, const std::vector<double>& target) {
  double worst = 0.0;
  bool ok = true;
  for (std::size_t j = 0; j < target.size(); ++j) {
    const double se = m.stderr_of(j);
    const double dev = std::abs(m.mean[j] - target[j]);
    if (dev > 3.0 * se) ok = false;
    worst = std::max(worst, se > 0 ? dev / se : (dev > 0 ? INFINITY : 0.0));
  }
  return {ok, "n=" + std::to_string(m.n) + " d=" + std::to_string(target.size()) +
                  " worst |mean-exact|/se=" + fmt("%.3f", worst)};
}

// 1. exact_grad against central differences of exact_objective.
Outcome gradient_oracle() {
  Stream rng = make_stream(101, Purpose::kMonteCarlo);
  const PairwiseLossSpec losses[] = {{PairwiseLossKind::kPsmSigmoid, 1.0},
                                     {PairwiseLossKind::kKlOpauc, 2.0},
                                     {PairwiseLossKind::kSquare, 1.0}};
  const OuterFnSpec outers[] = {{OuterKind::kIdentity}, {OuterKind::kKlLog, 1.0}};
  const ScorerSpec scorers[] = {{ScorerKind::kLinear, 4}, {ScorerKind::kMlp1, 4, 3}};
  int instances = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    for (const auto& scorer : scorers) {
      for (const auto& l : losses) {
        for (const auto& f : outers) {
          const std::size_t p = 1 + rng.below(8), q = 1 + rng.below(8);
          const auto s1 = gaussian_samples(rng, p, 4, Group::kPositive, 0);
          auto s2 = gaussian_samples(rng, q, 4, Group::kNegative, 100);
          ParamVector w(scorer.param_count());
          for (double& v : w) v = 0.4 * rng.normal();
          if (f.kind == OuterKind::kKlLog && l.kind == PairwiseLossKind::kSquare) {
            // Keep the inner mean away from log's singularity at 0: shift the
            // negatives so every pair has margin far from 1.
            for (auto& s : s2) s.features[0] += 3.0;
          }
          const auto g = exact_grad(l, f, scorer, w, s1, s2);
          const auto fd = finite_diff_grad(
              [&](std::span<const double> v) { return exact_objective(l, f, scorer, v, s1, s2); }, w, 1e-6);
          double diff = 0.0, norm = 0.0;
          for (std::size_t j = 0; j < g.size(); ++j) {
            diff += (g[j] - fd[j]) * (g[j] - fd[j]);
            norm += fd[j] * fd[j];
          }
          worst = std::max(worst, std::sqrt(diff) / std::max(1.0, std::sqrt(norm)));
          ++instances;
        }
      }
    }
  }
  return {instances >= 50 && worst <= 1e-5,
          std::to_string(instances) + " instances, worst rel err " + fmt("%.2e", worst)};
}

// 2. FedX1 estimator is unbiased with the model frozen at w0. Every round
// contributes one (client, iteration) draw from the odd rounds only: an
// odd round's draw depends on its own active samples and the previous
// round's histories, so draws from rounds 1, 3, 5, ... share no randomness.
Outcome fedx1_unbiased() {
  DataConfig dc;
  dc.n_clients = 4;
  dc.n_pos_per_client = 5;
  dc.n_neg_per_client = 15;
  dc.input_dim = 4;
  dc.seed = 202;
  const auto data = build_training_data(dc);
  const Problem problem{ScorerSpec{ScorerKind::kMlp1, 4, 3}, PairwiseLossSpec{PairwiseLossKind::kPsmSigmoid}};
  HyperParams h;
  h.eta = 0.0;
  h.K = 1;
  h.B1 = 1;
  h.B2 = 1;
  h.seed = 202;
  const int draws = 100000;
  h.R = 2 * draws;
  const ParamVector w0 = initial_model(problem.scorer, h.seed);
  Moments m(w0.size());
  Stream pick = make_stream(h.seed, Purpose::kMonteCarlo);
  RunOptions opt;
  opt.record_iterations = true;
  opt.record_estimates = true;
  run_algorithm(Algorithm::kFedX1, data, problem, h,
                [&](const RoundEvent& ev) {
                  if (ev.round % 2 == 0) return;
                  const auto& rec = ev.iterations[pick.below(ev.iterations.size())];
                  m.add(rec.estimate);
                },
                opt);
  const auto exact =
      exact_grad(problem.loss, problem.outer, problem.scorer, w0, data.all_pos(), data.all_neg());
  return within_three_se(m, exact);
}

// 3. FedX2 estimator with u(z) and the lazy u-records replaced by the exact
// inner means. One draw: a uniform client i, z1 ~ S1^i, z2 ~ S2^i, lazy S2
// score of a uniform negative of the federation, lazy (score, u) of a
// uniform positive of the federation.
Outcome fedx2_exact_u() {
  DataConfig dc;
  dc.n_clients = 4;
  dc.n_pos_per_client = 5;
  dc.n_neg_per_client = 15;
  dc.input_dim = 4;
  dc.seed = 303;
  const auto data = build_training_data(dc);
  const ScorerSpec scorer{ScorerKind::kMlp1, 4, 3};
  const PairwiseLossSpec loss{PairwiseLossKind::kKlOpauc, 2.0};
  const OuterFnSpec f{OuterKind::kKlLog, 1.0};
  const ParamVector w = initial_model(scorer, 303);
  const auto s1 = data.all_pos();
  const auto s2 = data.all_neg();
  std::vector<double> h1, h2, g1;
  for (const auto& z : s1) {
    h1.push_back(score(scorer, w, z.features));
    g1.push_back(exact_inner(loss, scorer, w, z, s2));
  }
  for (const auto& z : s2) h2.push_back(score(scorer, w, z.features));
  std::unordered_map<std::int64_t, double> inner;
  for (std::size_t k = 0; k < s1.size(); ++k) inner[s1[k].id] = g1[k];

  Stream rng = make_stream(303, Purpose::kMonteCarlo);
  Moments m(w.size());
  for (int t = 0; t < 100000; ++t) {
    const auto& shard = data.clients[rng.below(data.clients.size())];
    const Sample* z1 = &shard.pos[rng.below(shard.pos.size())];
    const Sample* z2 = &shard.neg[rng.below(shard.neg.size())];
    const std::size_t j2 = rng.below(s2.size());
    const std::size_t j1 = rng.below(s1.size());
    const ScoreRecord lazy2{h2[j2], 0, 0, 0, s2[j2].id};
    const ScoreRecord lazy1{h1[j1], 0, 0, 0, s1[j1].id};
    const URecord lazy_u{g1[j1], 0, 0, 0, s1[j1].id};
    const double u_z1 = inner.at(z1->id);
    const auto est = fedx2_estimate(scorer, loss, f, w, std::span<const Sample* const>(&z1, 1),
                                    std::span<const Sample* const>(&z2, 1), std::span(&lazy2, 1),
                                    std::span(&lazy1, 1), std::span(&u_z1, 1), std::span(&lazy_u, 1));
    m.add(est.grad);
  }
  return within_three_se(m, exact_grad(loss, f, scorer, w, s1, s2));
}

// 4. FedX1 on a convex instance reaches the full-gradient-descent optimum.
Outcome convex_convergence() {
  DataConfig dc;
  dc.n_clients = 4;
  dc.n_pos_per_client = 8;
  dc.n_neg_per_client = 40;
  dc.input_dim = 10;
  dc.seed = 404;
  const auto data = build_training_data(dc);
  const auto s1 = data.all_pos();
  const auto s2 = data.all_neg();
  const Problem p{ScorerSpec{ScorerKind::kLinear, 10}, PairwiseLossSpec{PairwiseLossKind::kSquare}};

  // Oracle: the objective is quadratic with Hessian 2 E[(x - x')(x - x')^T];
  // gradient descent at step 1 / lambda_max(H) from w0 = 0.
  const std::size_t d = 10;
  std::vector<double> hess(d * d, 0.0);
  for (const auto& a : s1) {
    for (const auto& b : s2) {
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
          hess[i * d + j] += 2.0 * (a.features[i] - b.features[i]) * (a.features[j] - b.features[j]);
        }
      }
    }
  }
  for (double& v : hess) v /= static_cast<double>(s1.size() * s2.size());
  std::vector<double> v(d, 1.0);
  double lambda = 0.0;
  for (int it = 0; it < 500; ++it) {
    std::vector<double> hv(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) hv[i] += hess[i * d + j] * v[j];
    }
    double norm = 0.0;
    for (double x : hv) norm += x * x;
    norm = std::sqrt(norm);
    lambda = norm;
    for (std::size_t i = 0; i < d; ++i) v[i] = hv[i] / norm;
  }
  ParamVector w(d, 0.0);
  for (int it = 0; it < 10000; ++it) {
    const auto g = exact_grad(p.loss, p.outer, p.scorer, w, s1, s2);
    for (std::size_t j = 0; j < d; ++j) w[j] -= g[j] / lambda;
  }
  const double optimum = exact_objective(p.loss, p.outer, p.scorer, w, s1, s2);

  HyperParams h;
  h.K = 8;
  h.R = 400;
  h.B1 = 8;
  h.B2 = 8;
  h.eta = 0.02;
  h.lr_decay_every = 800;
  h.lr_decay_factor = 0.3;
  h.seed = 404;
  const ParamVector final_w = run_algorithm(Algorithm::kFedX1, data, p, h, nullptr);
  const double reached = exact_objective(p.loss, p.outer, p.scorer, final_w, s1, s2);
  const double gap = reached - optimum;
  return {std::abs(gap) <= 1e-3, "optimum " + fmt("%.6f", optimum) + ", FedX1 " + fmt("%.6f", reached) +
                                     ", gap " + fmt("%.2e", gap)};
}

// 5. FedX2 drives the running mean of ||grad F||^2 below 10% of round 1.
Outcome fedx2_stationarity() {
  std::string detail;
  bool all = true;
  for (std::uint64_t seed : {1, 2, 3}) {
    RunConfig c;
    c.algorithm = Algorithm::kFedX2;
    c.outer = OuterFnSpec{OuterKind::kKlLog, 1.0};
    c.loss = PairwiseLossSpec{PairwiseLossKind::kKlOpauc, 2.0};
    c.scorer = ScorerSpec{ScorerKind::kMlp1, 10, 8};
    c.data.n_clients = 4;
    c.data.n_pos_per_client = 8;
    c.data.n_neg_per_client = 40;
    c.data.seed = seed;
    c.hyper.seed = seed;
    c.hyper.K = 8;
    c.hyper.R = 200;
    c.hyper.B1 = 4;
    c.hyper.B2 = 4;
    c.explicit_keys = {"hyper.K", "hyper.R", "hyper.B1", "hyper.B2"};
    c.theory = TheoryConfig{true, 0.5, 1.0};
    c.eval_every_rounds = 1000;
    c.output_path = (std::filesystem::temp_directory_path() / "fedx_acceptance_c5.csv").string();
    const auto trace = run(c);
    double sum = 0.0;
    for (std::size_t r = 1; r < trace.rounds.size(); ++r) sum += *trace.rounds[r].grad_norm_sq;
    const double first = *trace.rounds[1].grad_norm_sq;
    const double ratio = sum / static_cast<double>(trace.rounds.size() - 1) / first;
    all = all && ratio <= 0.10;
    detail += "seed " + std::to_string(seed) + " ratio " + fmt("%.3f", ratio) + (seed < 3 ? "; " : "");
  }
  return {all, detail};
}

// 6. Reduction identities.
Outcome reductions() {
  Stream rng = make_stream(606, Purpose::kMonteCarlo);
  const ScorerSpec scorer{ScorerKind::kMlp1, 4, 3};
  bool a = true;
  for (int t = 0; t < 50; ++t) {
    const auto pos = gaussian_samples(rng, 3, 4, Group::kPositive, 0);
    const auto neg = gaussian_samples(rng, 3, 4, Group::kNegative, 10);
    std::vector<const Sample*> z1, z2;
    for (const auto& s : pos) z1.push_back(&s);
    for (const auto& s : neg) z2.push_back(&s);
    ParamVector w(scorer.param_count());
    for (double& v : w) v = 0.5 * rng.normal();
    std::vector<ScoreRecord> lazy2, lazy1;
    std::vector<URecord> lazy_u;
    std::vector<double> u;
    for (int k = 0; k < 3; ++k) {
      lazy2.push_back({rng.normal(), 0, 0, 0, 0});
      lazy1.push_back({rng.normal(), 0, 0, 0, 0});
      lazy_u.push_back({1.0 + rng.uniform(), 0, 0, 0, 0});
      u.push_back(1.0 + rng.uniform());
    }
    const PairwiseLossSpec l{PairwiseLossKind::kKlOpauc, 2.0};
    a = a && fedx1_estimate(scorer, l, w, z1, z2, lazy2, lazy1).grad ==
                 fedx2_estimate(scorer, l, OuterFnSpec{}, w, z1, z2, lazy2, lazy1, u, lazy_u).grad;
  }

  bool b = true;
  const double beta = 0.2;
  std::vector<double> G{1.0, -3.0}, G0 = G, g{0.5, 2.0};
  for (int k = 1; k <= 40; ++k) {
    momentum_step(G, g, beta);
    const double decay = std::pow(1.0 - beta, k);
    for (std::size_t j = 0; j < 2; ++j) b = b && std::abs(G[j] - (decay * G0[j] + (1 - decay) * g[j])) <= 1e-12;
  }

  bool c = true, d = true;
  for (int t = 0; t < 300; ++t) {
    ScoredEval e;
    const std::size_t P = 1 + rng.below(50), Q = 1 + rng.below(50), levels = 1 + rng.below(10);
    for (std::size_t k = 0; k < P; ++k) e.pos_scores.push_back(static_cast<double>(rng.below(levels)));
    for (std::size_t k = 0; k < Q; ++k) e.neg_scores.push_back(static_cast<double>(rng.below(levels)));
    double wins = 0.0;
    for (double p : e.pos_scores) {
      for (double n : e.neg_scores) wins += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
    }
    const double brute = wins / static_cast<double>(P * Q);
    c = c && partial_auc(e, 1.0) == auc(e);
    d = d && auc(e) == brute;
  }
  const auto yn = [](bool x) { return x ? std::string("ok") : std::string("FAILED"); };
  return {a && b && c && d,
          "(a) f'=1 reduction " + yn(a) + ", (b) momentum " + yn(b) + ", (c) pAUC@1 " + yn(c) + ", (d) brute AUC " + yn(d)};
}

// 7. Uplink float counts and zero buffer wraps.
Outcome communication() {
  Stream rng = make_stream(707, Purpose::kMonteCarlo);
  bool ok = true;
  int configs = 0;
  for (Algorithm algo : {Algorithm::kFedX1, Algorithm::kFedX2}) {
    for (int t = 0; t < 10; ++t) {
      DataConfig dc;
      dc.n_clients = 1 + rng.below(5);
      dc.n_pos_per_client = 4 + rng.below(8);
      dc.n_neg_per_client = 10 + rng.below(20);
      dc.input_dim = 2 + rng.below(6);
      dc.seed = 700 + static_cast<std::uint64_t>(t);
      const auto data = build_training_data(dc);
      Problem p{ScorerSpec{rng.below(2) ? ScorerKind::kMlp1 : ScorerKind::kLinear, dc.input_dim,
                           1 + rng.below(4)}};
      if (algo == Algorithm::kFedX2) {
        p.loss = PairwiseLossSpec{PairwiseLossKind::kKlOpauc, 2.0};
        p.outer = OuterFnSpec{OuterKind::kKlLog, 1.0};
      }
      HyperParams h;
      h.K = 1 + static_cast<int>(rng.below(6));
      h.B1 = h.B2 = 1 + static_cast<int>(rng.below(4));
      h.R = 3;
      h.eta = 0.01;
      const std::size_t d = p.scorer.param_count();
      const std::size_t kb = static_cast<std::size_t>(h.K * h.B1);
      const std::size_t expected = algo == Algorithm::kFedX1 ? d + 2 * kb : 2 * d + 3 * kb;
      run_algorithm(algo, data, p, h, [&](const RoundEvent& ev) { ok = ok && ev.cost.uplink_floats == expected; });
      ++configs;
    }
  }
  std::size_t wraps = 0;
  for (Algorithm algo : {Algorithm::kFedX1, Algorithm::kFedX2}) {
    RunConfig c;  // defaults: 16 clients, K = 32, B1 = B2 = 32
    c.algorithm = algo;
    Problem p{ScorerSpec{ScorerKind::kLinear, c.data.input_dim}};
    if (algo == Algorithm::kFedX2) {
      p.loss = PairwiseLossSpec{PairwiseLossKind::kKlOpauc, 2.0};
      p.outer = OuterFnSpec{OuterKind::kKlLog, 1.0};
    }
    HyperParams h = c.hyper;
    h.R = 3;
    h.eta = 0.01;
    run_algorithm(algo, build_training_data(c.data), p, h, [&](const RoundEvent& ev) { wraps += ev.buffer_wraps; });
  }
  return {ok && wraps == 0, std::to_string(configs) + " random configs (10 per algorithm), buffer wraps under defaults " +
                                std::to_string(wraps)};
}

// 8. More sources with the same total data: N = 16 is at least as good as N = 1.
Outcome vary_n() {
  int wins = 0;
  std::string detail;
  const auto dir = std::filesystem::temp_directory_path() / "fedx_acceptance_c8";
  for (std::uint64_t seed : {1, 2, 3}) {
    RunConfig c;
    c.algorithm = Algorithm::kFedX2;
    c.outer = OuterFnSpec{OuterKind::kKlLog, 1.0};
    c.loss = PairwiseLossSpec{PairwiseLossKind::kKlOpauc, 2.0};
    c.scorer = ScorerSpec{ScorerKind::kMlp1, 10, 8};
    c.data.n_clients = 16;
    c.data.n_pos_per_client = 8;
    c.data.n_neg_per_client = 40;
    c.data.seed = seed;
    c.hyper.seed = seed;
    c.hyper.K = 8;
    c.hyper.R = 60;
    c.hyper.B1 = 4;
    c.hyper.B2 = 4;
    c.hyper.eta = 0.03;
    c.hyper.gamma = 0.25;
    c.hyper.beta = 0.1;
    c.oracle_every_rounds = 1000;
    c.eval_every_rounds = 1000;
    const auto s = sweep(c, SweepAxis::kN, {1, 4, 16}, (dir / std::to_string(seed)).string());
    const double n1 = s.rows[0].final_pauc_03, n16 = s.rows[2].final_pauc_03;
    if (n16 >= n1) ++wins;
    detail += "seed " + std::to_string(seed) + " pAUC@0.3 N=1 " + fmt("%.4f", n1) + " N=4 " +
              fmt("%.4f", s.rows[1].final_pauc_03) + " N=16 " + fmt("%.4f", n16) + (seed < 3 ? "; " : "");
  }
  return {wins >= 2, std::to_string(wins) + "/3 seeds: " + detail};
}

// 9. With 20% flipped labels PSM keeps a higher test AUC than square loss.
Outcome robustness() {
  int wins = 0;
  std::string detail;
  for (std::uint64_t seed : {1, 2, 3}) {
    double aucs[2];
    for (int k = 0; k < 2; ++k) {
      RunConfig c;
      c.algorithm = Algorithm::kFedX1;
      c.loss = PairwiseLossSpec{k == 0 ? PairwiseLossKind::kPsmSigmoid : PairwiseLossKind::kSquare};
      c.data.n_clients = 4;
      c.data.n_pos_per_client = 20;
      c.data.n_neg_per_client = 100;
      c.data.flip_fraction = 0.2;
      c.data.seed = seed;
      c.hyper.seed = seed;
      c.hyper.K = 8;
      c.hyper.R = 150;
      c.hyper.B1 = 8;
      c.hyper.B2 = 8;
      c.hyper.eta = 0.02;
      c.oracle_every_rounds = 1000;
      c.eval_every_rounds = 1000;
      c.output_path = (std::filesystem::temp_directory_path() / "fedx_acceptance_c9.csv").string();
      aucs[k] = *run(c).last().auc;
    }
    if (aucs[0] > aucs[1]) ++wins;
    detail += "seed " + std::to_string(seed) + " PSM " + fmt("%.4f", aucs[0]) + " square " + fmt("%.4f", aucs[1]) +
              (seed < 3 ? "; " : "");
  }
  return {wins >= 2, std::to_string(wins) + "/3 seeds: " + detail};
}

std::string trace_without_wall_clock(const std::string& path) {
  std::ifstream in(path);
  std::stringstream out;
  std::string line;
  std::getline(in, line);  // config comment, holds the output path
  while (std::getline(in, line)) {
    const auto a = line.find(',');
    const auto b = a == std::string::npos ? a : line.find(',', a + 1);
    if (b != std::string::npos && line.rfind("round,", 0) != 0) line = line.substr(0, a + 1) + line.substr(b);
    out << line << '\n';
  }
  return out.str();
}

// 10. Byte-identical traces across repeats and thread counts.
Outcome determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "fedx_acceptance_c10";
  std::filesystem::create_directories(dir);
  bool ok = true;
  int compared = 0;
  for (Algorithm algo : {Algorithm::kFedX1, Algorithm::kFedX2, Algorithm::kLocalPair}) {
    RunConfig c;
    c.algorithm = algo;
    if (algo != Algorithm::kFedX1) {
      c.outer = OuterFnSpec{OuterKind::kKlLog, 1.0};
      c.loss = PairwiseLossSpec{PairwiseLossKind::kKlOpauc, 2.0};
    }
    c.scorer = ScorerSpec{ScorerKind::kMlp1, 10, 4};
    c.data.n_clients = 8;
    c.data.n_pos_per_client = 8;
    c.data.n_neg_per_client = 40;
    c.hyper.K = 4;
    c.hyper.R = 10;
    c.hyper.B1 = 4;
    c.hyper.B2 = 4;
    c.hyper.eta = 0.03;
    c.hyper.gamma = 0.5;
    std::string reference;
    for (unsigned threads : {0u, 4u, 0u, 4u}) {
      c.output_path = (dir / ("t" + std::to_string(compared) + ".csv")).string();
      run(c, RunEnv{threads, nullptr});
      const auto text = trace_without_wall_clock(c.output_path);
      if (reference.empty()) {
        reference = text;
      } else {
        ok = ok && text == reference;
      }
      ++compared;
    }
  }
  return {ok, std::to_string(compared) + " traces over 3 algorithms at FEDX_THREADS in {0, 4}"};
}

}  // namespace
}  // namespace fedx

int main() {
  using fedx::Outcome;
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> fn;
  };
  const Criterion criteria[] = {
      {1, "gradient-oracle consistency", fedx::gradient_oracle},
      {2, "FedX1 unbiasedness", fedx::fedx1_unbiased},
      {3, "FedX2 exact-u consistency", fedx::fedx2_exact_u},
      {4, "convex convergence", fedx::convex_convergence},
      {5, "FedX2 stationarity trend", fedx::fedx2_stationarity},
      {6, "reduction identities", fedx::reductions},
      {7, "communication accounting", fedx::communication},
      {8, "vary-N ablation", fedx::vary_n},
      {9, "label-flip robustness", fedx::robustness},
      {10, "determinism", fedx::determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s [%d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed;
}
