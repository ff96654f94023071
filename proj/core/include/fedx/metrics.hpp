#pragma once

#include <span>
#include <vector>

#include "fedx/data.hpp"
#include "fedx/model.hpp"

namespace fedx {

struct ScoredEval {
  std::vector<double> pos_scores;
  std::vector<double> neg_scores;
};

// Wilcoxon-Mann-Whitney statistic; a tie counts one half.
double auc(const ScoredEval& eval);

// One-way partial AUC: the win rate of every positive against the
// floor(fpr_max * Q) highest-scoring negatives, same tie rule. Normalized by
// P * floor(fpr_max * Q), so fpr_max = 1 gives auc().
double partial_auc(const ScoredEval& eval, double fpr_max);

ScoredEval score_eval_split(const ScorerSpec& scorer, std::span<const double> w,
                            std::span<const Sample> pos, std::span<const Sample> neg);

}  // namespace fedx
