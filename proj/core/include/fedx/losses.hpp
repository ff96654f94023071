#pragma once

#include <span>
#include <utility>

#include "fedx/data.hpp"
#include "fedx/model.hpp"

namespace fedx {

enum class PairwiseLossKind { kPsmSigmoid, kKlOpauc, kSquare };

// l(a, b) where a scores a positive (S1) sample and b a negative (S2) one.
//   psm_sigmoid: 1 / (1 + exp(a - b))
//   kl_opauc:    exp(((b + 1 - a)_+)^2 / lambda)
//   square:      (1 - (a - b))^2
struct PairwiseLossSpec {
  PairwiseLossKind kind = PairwiseLossKind::kPsmSigmoid;
  double lambda = 1.0;
};

enum class OuterKind { kIdentity, kKlLog };

// f(s). kl_log is lambda * log(max(s, u_floor)).
struct OuterFnSpec {
  OuterKind kind = OuterKind::kIdentity;
  double lambda = 1.0;
  double u_floor = 1e-8;
};

struct LossGrads {
  double d_a = 0.0;
  double d_b = 0.0;
};

void validate(const PairwiseLossSpec& spec);
void validate(const OuterFnSpec& spec);

double loss(const PairwiseLossSpec& spec, double a, double b);
LossGrads loss_grads(const PairwiseLossSpec& spec, double a, double b);

double outer(const OuterFnSpec& spec, double s);
double outer_grad(const OuterFnSpec& spec, double s);

// Brute-force oracles over the full federation. S1/S2 are the unions of all
// client shards.
double exact_inner(const PairwiseLossSpec& loss, const ScorerSpec& scorer,
                   std::span<const double> w, const Sample& z, std::span<const Sample> s2);

double exact_objective(const PairwiseLossSpec& loss, const OuterFnSpec& f,
                       const ScorerSpec& scorer, std::span<const double> w,
                       std::span<const Sample> s1, std::span<const Sample> s2);

ParamVector exact_grad(const PairwiseLossSpec& loss, const OuterFnSpec& f,
                       const ScorerSpec& scorer, std::span<const double> w,
                       std::span<const Sample> s1, std::span<const Sample> s2);

// Objective and gradient in one pass over the pairs.
std::pair<double, ParamVector> exact_objective_and_grad(const PairwiseLossSpec& loss,
                                                        const OuterFnSpec& f,
                                                        const ScorerSpec& scorer,
                                                        std::span<const double> w,
                                                        std::span<const Sample> s1,
                                                        std::span<const Sample> s2);

}  // namespace fedx
