#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "cpmi/scores.hpp"
#include "cpmi/tree.hpp"
#include "cpmi/treebank.hpp"

namespace cpmi {

/// |pred ∩ gold| / (n - 1). Defined as 1 for n = 1.
double uuas(const UndirectedTree& pred, const UndirectedTree& gold);

/// Precision/recall over one arc-length partition. An empty denominator
/// leaves the value unset (Table-style "–").
struct PrecisionRecall {
  std::size_t predicted = 0;
  std::size_t gold = 0;
  std::size_t hits = 0;

  std::optional<double> precision() const;
  std::optional<double> recall() const;

  PrecisionRecall& operator+=(const PrecisionRecall& o);
};

struct LengthBreakdown {
  PrecisionRecall adjacent;     // length 1
  PrecisionRecall nonadjacent;  // length > 1
};

LengthBreakdown pr_by_length(const UndirectedTree& pred, const UndirectedTree& gold);

struct RelationStats {
  std::size_t count = 0;
  std::size_t hits = 0;
  double recall = 0.0;
  double mean_arc_length = 0.0;
};

/// Recall of predicted edges on gold arcs grouped by relation label. Labels
/// with `min_count` or fewer observations are dropped. With exclude_len1,
/// adjacent gold arcs are removed before counting.
std::map<std::string, RelationStats> recall_by_relation(std::span<const UndirectedTree> preds,
                                                        std::span<const Sentence> golds,
                                                        std::size_t min_count = 60,
                                                        bool exclude_len1 = false);

struct LengthHistogram {
  std::map<int, std::size_t> counts;
  std::size_t total = 0;

  double fraction_at(int length) const;
};

LengthHistogram length_histogram(std::span<const UndirectedTree> trees);

using CorpusEdge = std::tuple<std::string, int, int>;  // (sentence_id, lo, hi)

/// |A ∩ B| / |A ∪ B|; 1 when both are empty.
double jaccard_similarity(const std::set<CorpusEdge>& a, const std::set<CorpusEdge>& b);

/// exp(-mean(base_loglik)) of a bidirectional record.
double pseudo_perplexity(const ScoreRecord& r);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares of y on x. R² is 0 when y is constant.
LinearFit ols_fit(std::span<const double> x, std::span<const double> y);

struct PplPoint {
  double log_ppl;
  double uuas;
};
LinearFit ppl_accuracy_correlation(std::span<const PplPoint> points);

struct EvalOptions {
  bool exclude_punct = false;
  std::size_t relation_min_count = 60;
};

/// Corpus report. mean_uuas is the unweighted mean over sentences with at
/// least one scorable gold edge; the length partitions are pooled (micro)
/// with the per-sentence macro averages kept alongside.
struct EvalReport {
  std::vector<std::string> sentence_ids;
  std::vector<double> per_sentence_uuas;
  double mean_uuas = 0.0;
  LengthBreakdown micro;
  struct MacroPr {
    std::optional<double> precision, recall;
  };
  MacroPr macro_adjacent, macro_nonadjacent;
  std::map<std::string, RelationStats> relations;
  std::map<std::string, RelationStats> relations_nonadjacent;
  LengthHistogram pred_histogram;
  LengthHistogram gold_histogram;
  bool exclude_punct = false;
};

EvalReport evaluate(std::span<const UndirectedTree> preds, std::span<const Sentence> golds,
                    const EvalOptions& options = {});

/// Drops edges touching punctuation tokens (used when exclude_punct is set).
UndirectedTree without_punctuation(const UndirectedTree& t, const Sentence& s);

}  // namespace cpmi
