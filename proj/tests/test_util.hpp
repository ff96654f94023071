#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fedx/data.hpp"
#include "fedx/model.hpp"
#include "fedx/rng.hpp"

namespace fedx::testing {

inline std::vector<Sample> random_samples(Stream& rng, std::size_t count, std::size_t dim, Group g,
                                          std::int64_t first_id = 0) {
  std::vector<Sample> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    out[k].id = first_id + static_cast<std::int64_t>(k);
    out[k].group = g;
    out[k].features.resize(dim);
    for (double& v : out[k].features) v = rng.normal();
  }
  return out;
}

inline ParamVector random_params(Stream& rng, std::size_t n, double scale = 0.5) {
  ParamVector w(n);
  for (double& v : w) v = scale * rng.normal();
  return w;
}

inline double rel_err(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, norm = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    diff += (a[k] - b[k]) * (a[k] - b[k]);
    norm += b[k] * b[k];
  }
  return std::sqrt(diff) / std::max(1.0, std::sqrt(norm));
}

}  // namespace fedx::testing
