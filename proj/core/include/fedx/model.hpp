#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fedx/rng.hpp"

namespace fedx {

// Model parameters w. Length is fixed for the lifetime of a run.
using ParamVector = std::vector<double>;

enum class ScorerKind { kLinear, kMlp1 };

// h(w, x) with scalar output.
//   linear: h = <w, x>, param_count = input_dim
//   mlp1:   h = <w_out, tanh(W x)>, W is hidden_dim x input_dim row-major and
//           stored first, followed by w_out; no biases.
struct ScorerSpec {
  ScorerKind kind = ScorerKind::kLinear;
  std::size_t input_dim = 1;
  std::size_t hidden_dim = 8;

  std::size_t param_count() const;
};

double score(const ScorerSpec& spec, std::span<const double> w, std::span<const double> x);

ParamVector score_grad(const ScorerSpec& spec, std::span<const double> w,
                       std::span<const double> x);

// out += coef * grad_w h(w, x); returns h(w, x). The hot path of every
// estimator and oracle.
double accumulate_score_grad(const ScorerSpec& spec, std::span<const double> w,
                             std::span<const double> x, double coef, std::span<double> out);

// Central differences, coordinate by coordinate.
ParamVector finite_diff_grad(const std::function<double(std::span<const double>)>& fn,
                             std::span<const double> w, double step);

// Initial parameters. Linear starts at zero; mlp1 draws the hidden block from
// N(0, 1/input_dim) and the output block from N(0, 1/hidden_dim) since an
// all-zero mlp1 is a stationary point.
ParamVector initial_params(const ScorerSpec& spec, Stream& rng);

void validate(const ScorerSpec& spec);

}  // namespace fedx
