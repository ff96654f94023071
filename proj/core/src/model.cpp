#include "fedx/model.hpp"

#include <cmath>
#include <string>

#include "fedx/errors.hpp"

namespace fedx {

namespace {

void check_shapes(const ScorerSpec& spec, std::span<const double> w, std::span<const double> x) {
  if (w.size() != spec.param_count()) {
    throw InvalidArgument("parameter length " + std::to_string(w.size()) + " != " +
                          std::to_string(spec.param_count()));
  }
  if (x.size() != spec.input_dim) {
    throw InvalidArgument("feature length " + std::to_string(x.size()) + " != " +
                          std::to_string(spec.input_dim));
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::size_t ScorerSpec::param_count() const {
  switch (kind) {
    case ScorerKind::kLinear:
      return input_dim;
    case ScorerKind::kMlp1:
      return input_dim * hidden_dim + hidden_dim;
  }
  return 0;
}

void validate(const ScorerSpec& spec) {
  if (spec.input_dim == 0) throw InvalidArgument("input_dim must be positive");
  if (spec.kind == ScorerKind::kMlp1 && spec.hidden_dim == 0) {
    throw InvalidArgument("hidden_dim must be positive");
  }
}

double score(const ScorerSpec& spec, std::span<const double> w, std::span<const double> x) {
  check_shapes(spec, w, x);
  if (spec.kind == ScorerKind::kLinear) return dot(w, x);
  const std::size_t in = spec.input_dim;
  const auto w_out = w.subspan(in * spec.hidden_dim);
  double s = 0.0;
  for (std::size_t j = 0; j < spec.hidden_dim; ++j) {
    s += w_out[j] * std::tanh(dot(w.subspan(j * in, in), x));
  }
  return s;
}

ParamVector score_grad(const ScorerSpec& spec, std::span<const double> w,
                       std::span<const double> x) {
  ParamVector g(spec.param_count(), 0.0);
  accumulate_score_grad(spec, w, x, 1.0, g);
  return g;
}

double accumulate_score_grad(const ScorerSpec& spec, std::span<const double> w,
                             std::span<const double> x, double coef, std::span<double> out) {
  check_shapes(spec, w, x);
  if (out.size() != w.size()) throw InvalidArgument("gradient buffer has wrong length");
  const std::size_t in = spec.input_dim;
  if (spec.kind == ScorerKind::kLinear) {
    for (std::size_t i = 0; i < in; ++i) out[i] += coef * x[i];
    return dot(w, x);
  }
  const std::size_t hid = spec.hidden_dim;
  const auto w_out = w.subspan(in * hid);
  auto g_out = out.subspan(in * hid);
  double s = 0.0;
  for (std::size_t j = 0; j < hid; ++j) {
    const double a = std::tanh(dot(w.subspan(j * in, in), x));
    s += w_out[j] * a;
    g_out[j] += coef * a;
    // d tanh(t)/dt = 1 - tanh(t)^2
    const double back = coef * w_out[j] * (1.0 - a * a);
    if (back == 0.0) continue;
    auto g_row = out.subspan(j * in, in);
    for (std::size_t i = 0; i < in; ++i) g_row[i] += back * x[i];
  }
  return s;
}

ParamVector finite_diff_grad(const std::function<double(std::span<const double>)>& fn,
                             std::span<const double> w, double step) {
  if (!(step > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  ParamVector probe(w.begin(), w.end());
  ParamVector g(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double orig = probe[i];
    probe[i] = orig + step;
    const double up = fn(probe);
    probe[i] = orig - step;
    const double down = fn(probe);
    probe[i] = orig;
    g[i] = (up - down) / (2.0 * step);
  }
  return g;
}

ParamVector initial_params(const ScorerSpec& spec, Stream& rng) {
  ParamVector w(spec.param_count(), 0.0);
  if (spec.kind == ScorerKind::kLinear) return w;
  const double hidden_sd = 1.0 / std::sqrt(static_cast<double>(spec.input_dim));
  const double out_sd = 1.0 / std::sqrt(static_cast<double>(spec.hidden_dim));
  const std::size_t n_hidden = spec.input_dim * spec.hidden_dim;
  for (std::size_t i = 0; i < n_hidden; ++i) w[i] = hidden_sd * rng.normal();
  for (std::size_t i = n_hidden; i < w.size(); ++i) w[i] = out_sd * rng.normal();
  return w;
}

}  // namespace fedx
