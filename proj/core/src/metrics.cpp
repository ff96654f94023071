#include "fedx/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "fedx/errors.hpp"

namespace fedx {

namespace {

// Counts, for sorted inputs, sum_p [#neg < p] + 0.5 [#neg == p] by a merge.
double wins(std::vector<double> pos, std::vector<double> neg) {
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  double total = 0.0;
  std::size_t below = 0;  // negatives strictly less than current positive
  std::size_t upto = 0;   // negatives less than or equal
  for (double p : pos) {
    while (below < neg.size() && neg[below] < p) ++below;
    upto = std::max(upto, below);
    while (upto < neg.size() && neg[upto] == p) ++upto;
    total += static_cast<double>(below) + 0.5 * static_cast<double>(upto - below);
  }
  return total;
}

void require_sides(const ScoredEval& eval) {
  if (eval.pos_scores.empty() || eval.neg_scores.empty()) {
    throw InvalidArgument("AUC needs at least one positive and one negative score");
  }
}

}  // namespace

double auc(const ScoredEval& eval) {
  require_sides(eval);
  const double pairs =
      static_cast<double>(eval.pos_scores.size()) * static_cast<double>(eval.neg_scores.size());
  return wins(eval.pos_scores, eval.neg_scores) / pairs;
}

double partial_auc(const ScoredEval& eval, double fpr_max) {
  require_sides(eval);
  if (!(fpr_max > 0.0 && fpr_max <= 1.0)) throw InvalidArgument("fpr_max must lie in (0, 1]");
  const auto q = static_cast<std::size_t>(
      std::floor(fpr_max * static_cast<double>(eval.neg_scores.size())));
  if (q == 0) throw InvalidArgument("fpr_max selects no negatives");
  // Equal scores at the cut are interchangeable for the win count, so no
  // secondary key is needed.
  std::vector<double> hardest = eval.neg_scores;
  std::nth_element(hardest.begin(), hardest.begin() + static_cast<std::ptrdiff_t>(q - 1),
                   hardest.end(), std::greater<>());
  hardest.resize(q);
  const double pairs = static_cast<double>(eval.pos_scores.size()) * static_cast<double>(q);
  return wins(eval.pos_scores, std::move(hardest)) / pairs;
}

ScoredEval score_eval_split(const ScorerSpec& scorer, std::span<const double> w,
                            std::span<const Sample> pos, std::span<const Sample> neg) {
  ScoredEval out;
  out.pos_scores.reserve(pos.size());
  out.neg_scores.reserve(neg.size());
  for (const auto& s : pos) out.pos_scores.push_back(score(scorer, w, s.features));
  for (const auto& s : neg) out.neg_scores.push_back(score(scorer, w, s.features));
  return out;
}

}  // namespace fedx
