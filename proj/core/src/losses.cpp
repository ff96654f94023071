#include "fedx/losses.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fedx/errors.hpp"

namespace fedx {

namespace {

// 1 / (1 + exp(t)) without overflow for large |t|.
double inv_one_plus_exp(double t) {
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

void require_nonempty(std::span<const Sample> s, const char* name) {
  if (s.empty()) throw InvalidArgument(std::string(name) + " must be nonempty");
}

std::vector<double> scores_of(const ScorerSpec& scorer, std::span<const double> w,
                              std::span<const Sample> set) {
  std::vector<double> out;
  out.reserve(set.size());
  for (const auto& s : set) out.push_back(score(scorer, w, s.features));
  return out;
}

}  // namespace

void validate(const PairwiseLossSpec& spec) {
  if (spec.kind == PairwiseLossKind::kKlOpauc && !(spec.lambda > 0.0)) {
    throw ConfigError("loss.lambda", "must be > 0 for kl_opauc");
  }
}

void validate(const OuterFnSpec& spec) {
  if (spec.kind != OuterKind::kKlLog) return;
  if (!(spec.lambda > 0.0)) throw ConfigError("outer.lambda", "must be > 0 for kl_log");
  if (!(spec.u_floor > 0.0)) throw ConfigError("outer.u_floor", "must be > 0");
}

double loss(const PairwiseLossSpec& spec, double a, double b) {
  switch (spec.kind) {
    case PairwiseLossKind::kPsmSigmoid:
      return inv_one_plus_exp(a - b);
    case PairwiseLossKind::kKlOpauc: {
      const double m = std::max(b + 1.0 - a, 0.0);
      return std::exp(m * m / spec.lambda);
    }
    case PairwiseLossKind::kSquare: {
      const double r = 1.0 - (a - b);
      return r * r;
    }
  }
  return 0.0;
}

LossGrads loss_grads(const PairwiseLossSpec& spec, double a, double b) {
  switch (spec.kind) {
    case PairwiseLossKind::kPsmSigmoid: {
      const double s = inv_one_plus_exp(a - b);
      const double d = s * (1.0 - s);
      return {-d, d};
    }
    case PairwiseLossKind::kKlOpauc: {
      const double m = std::max(b + 1.0 - a, 0.0);
      if (m == 0.0) return {0.0, 0.0};
      const double d = std::exp(m * m / spec.lambda) * 2.0 * m / spec.lambda;
      return {-d, d};
    }
    case PairwiseLossKind::kSquare: {
      const double d = 2.0 * (1.0 - (a - b));
      return {-d, d};
    }
  }
  return {};
}

double outer(const OuterFnSpec& spec, double s) {
  if (spec.kind == OuterKind::kIdentity) return s;
  return spec.lambda * std::log(std::max(s, spec.u_floor));
}

double outer_grad(const OuterFnSpec& spec, double s) {
  if (spec.kind == OuterKind::kIdentity) return 1.0;
  return spec.lambda / std::max(s, spec.u_floor);
}

double exact_inner(const PairwiseLossSpec& loss_spec, const ScorerSpec& scorer,
                   std::span<const double> w, const Sample& z, std::span<const Sample> s2) {
  require_nonempty(s2, "S2");
  const double a = score(scorer, w, z.features);
  double sum = 0.0;
  for (const auto& neg : s2) sum += loss(loss_spec, a, score(scorer, w, neg.features));
  return sum / static_cast<double>(s2.size());
}

double exact_objective(const PairwiseLossSpec& loss_spec, const OuterFnSpec& f,
                       const ScorerSpec& scorer, std::span<const double> w,
                       std::span<const Sample> s1, std::span<const Sample> s2) {
  require_nonempty(s1, "S1");
  require_nonempty(s2, "S2");
  const auto neg_scores = scores_of(scorer, w, s2);
  double total = 0.0;
  for (const auto& pos : s1) {
    const double a = score(scorer, w, pos.features);
    double inner = 0.0;
    for (double b : neg_scores) inner += loss(loss_spec, a, b);
    total += outer(f, inner / static_cast<double>(neg_scores.size()));
  }
  return total / static_cast<double>(s1.size());
}

std::pair<double, ParamVector> exact_objective_and_grad(const PairwiseLossSpec& loss_spec,
                                                        const OuterFnSpec& f,
                                                        const ScorerSpec& scorer,
                                                        std::span<const double> w,
                                                        std::span<const Sample> s1,
                                                        std::span<const Sample> s2) {
  require_nonempty(s1, "S1");
  require_nonempty(s2, "S2");
  const auto pos_scores = scores_of(scorer, w, s1);
  const auto neg_scores = scores_of(scorer, w, s2);
  const double n1 = static_cast<double>(s1.size());
  const double n2 = static_cast<double>(s2.size());

  // The gradient is sum_z c_z grad h(z) + sum_z' c_z' grad h(z'), so collect
  // the scalar coefficients first and touch parameter space once per sample.
  std::vector<double> pos_coef(s1.size(), 0.0);
  std::vector<double> neg_coef(s2.size(), 0.0);
  double objective = 0.0;
  for (std::size_t p = 0; p < s1.size(); ++p) {
    const double a = pos_scores[p];
    double inner = 0.0;
    for (double b : neg_scores) inner += loss(loss_spec, a, b);
    inner /= n2;
    objective += outer(f, inner);
    const double weight = outer_grad(f, inner) / (n1 * n2);
    double da_sum = 0.0;
    for (std::size_t q = 0; q < s2.size(); ++q) {
      const auto g = loss_grads(loss_spec, a, neg_scores[q]);
      da_sum += g.d_a;
      neg_coef[q] += weight * g.d_b;
    }
    pos_coef[p] = weight * da_sum;
  }

  ParamVector grad(scorer.param_count(), 0.0);
  for (std::size_t p = 0; p < s1.size(); ++p) {
    accumulate_score_grad(scorer, w, s1[p].features, pos_coef[p], grad);
  }
  for (std::size_t q = 0; q < s2.size(); ++q) {
    accumulate_score_grad(scorer, w, s2[q].features, neg_coef[q], grad);
  }
  return {objective / n1, std::move(grad)};
}

ParamVector exact_grad(const PairwiseLossSpec& loss_spec, const OuterFnSpec& f,
                       const ScorerSpec& scorer, std::span<const double> w,
                       std::span<const Sample> s1, std::span<const Sample> s2) {
  return exact_objective_and_grad(loss_spec, f, scorer, w, s1, s2).second;
}

}  // namespace fedx
