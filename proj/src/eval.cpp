#include "cpmi/eval.hpp"

#include <algorithm>
#include <cmath>

namespace cpmi {

namespace {

std::size_t intersection_size(const std::vector<Edge>& a, const std::vector<Edge>& b) {
  std::size_t hits = 0;
  for (const Edge& e : a) {
    if (std::binary_search(b.begin(), b.end(), e)) ++hits;
  }
  return hits;
}

void require_same_n(const UndirectedTree& pred, const UndirectedTree& gold) {
  if (pred.n != gold.n) {
    throw Error("tree size mismatch: predicted n=" + std::to_string(pred.n) +
                ", gold n=" + std::to_string(gold.n));
  }
}

std::optional<double> mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

double uuas(const UndirectedTree& pred, const UndirectedTree& gold) {
  require_same_n(pred, gold);
  if (gold.n <= 1) return 1.0;
  return static_cast<double>(intersection_size(pred.edges, gold.edges)) / (gold.n - 1);
}

std::optional<double> PrecisionRecall::precision() const {
  if (predicted == 0) return std::nullopt;
  return static_cast<double>(hits) / static_cast<double>(predicted);
}

std::optional<double> PrecisionRecall::recall() const {
  if (gold == 0) return std::nullopt;
  return static_cast<double>(hits) / static_cast<double>(gold);
}

PrecisionRecall& PrecisionRecall::operator+=(const PrecisionRecall& o) {
  predicted += o.predicted;
  gold += o.gold;
  hits += o.hits;
  return *this;
}

LengthBreakdown pr_by_length(const UndirectedTree& pred, const UndirectedTree& gold) {
  require_same_n(pred, gold);
  LengthBreakdown out;
  for (const Edge& e : pred.edges) {
    auto& part = e.length() == 1 ? out.adjacent : out.nonadjacent;
    ++part.predicted;
    if (gold.contains(e)) ++part.hits;
  }
  for (const Edge& e : gold.edges) {
    ++(e.length() == 1 ? out.adjacent : out.nonadjacent).gold;
  }
  return out;
}

std::map<std::string, RelationStats> recall_by_relation(std::span<const UndirectedTree> preds,
                                                        std::span<const Sentence> golds,
                                                        std::size_t min_count, bool exclude_len1) {
  if (preds.size() != golds.size()) throw Error("prediction and gold corpora differ in size");
  std::map<std::string, RelationStats> table;
  std::map<std::string, double> length_sums;
  for (std::size_t k = 0; k < golds.size(); ++k) {
    const Sentence& s = golds[k];
    if (s.relations.size() != s.tokens.size() ||
        std::any_of(s.relations.begin(), s.relations.end(),
                    [](const std::string& r) { return r.empty() || r == "_"; })) {
      throw Error("sentence '" + s.id + "' lacks relation annotations");
    }
    require_same_n(preds[k], gold_edges(s));
    for (int i = 1; i <= s.size(); ++i) {
      const int h = s.heads[static_cast<std::size_t>(i - 1)];
      if (h == 0) continue;
      const Edge e(i, h);
      if (exclude_len1 && e.length() == 1) continue;
      auto& stats = table[s.relations[static_cast<std::size_t>(i - 1)]];
      ++stats.count;
      if (preds[k].contains(e)) ++stats.hits;
      length_sums[s.relations[static_cast<std::size_t>(i - 1)]] += e.length();
    }
  }
  for (auto it = table.begin(); it != table.end();) {
    if (it->second.count <= min_count) {
      it = table.erase(it);
      continue;
    }
    auto& st = it->second;
    st.recall = static_cast<double>(st.hits) / static_cast<double>(st.count);
    st.mean_arc_length = length_sums[it->first] / static_cast<double>(st.count);
    ++it;
  }
  return table;
}

double LengthHistogram::fraction_at(int length) const {
  if (total == 0) return 0.0;
  auto it = counts.find(length);
  return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
}

LengthHistogram length_histogram(std::span<const UndirectedTree> trees) {
  LengthHistogram h;
  for (const auto& t : trees) {
    for (const Edge& e : t.edges) {
      ++h.counts[e.length()];
      ++h.total;
    }
  }
  return h;
}

double jaccard_similarity(const std::set<CorpusEdge>& a, const std::set<CorpusEdge>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t common = 0;
  for (const auto& e : a) common += b.count(e);
  const std::size_t united = a.size() + b.size() - common;
  return static_cast<double>(common) / static_cast<double>(united);
}

double pseudo_perplexity(const ScoreRecord& r) {
  if (r.mode != ScoreMode::bidirectional) {
    throw Error("pseudo-perplexity needs a bidirectional record ('" + r.sentence_id + "')");
  }
  if (r.base_loglik.empty()) throw Error("pseudo-perplexity of an empty record");
  double sum = 0.0;
  for (double x : r.base_loglik) sum += x;
  return std::exp(-sum / static_cast<double>(r.base_loglik.size()));
}

LinearFit ols_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("regression inputs differ in length");
  if (x.size() < 3) throw Error("regression needs at least 3 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx == 0.0) throw Error("regression predictor is constant");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 0.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

LinearFit ppl_accuracy_correlation(std::span<const PplPoint> points) {
  std::vector<double> x, y;
  for (const auto& p : points) {
    x.push_back(p.log_ppl);
    y.push_back(p.uuas);
  }
  return ols_fit(x, y);
}

UndirectedTree without_punctuation(const UndirectedTree& t, const Sentence& s) {
  std::vector<Edge> kept;
  for (const Edge& e : t.edges) {
    if (!is_punctuation(s, e.lo) && !is_punctuation(s, e.hi)) kept.push_back(e);
  }
  return UndirectedTree(t.n, std::move(kept));
}

EvalReport evaluate(std::span<const UndirectedTree> preds, std::span<const Sentence> golds,
                    const EvalOptions& options) {
  if (preds.size() != golds.size()) throw Error("prediction and gold corpora differ in size");
  EvalReport report;
  report.exclude_punct = options.exclude_punct;
  std::vector<double> adj_p, adj_r, non_p, non_r;
  std::vector<UndirectedTree> gold_trees, pred_trees;

  for (std::size_t k = 0; k < golds.size(); ++k) {
    UndirectedTree gold = gold_edges(golds[k]);
    UndirectedTree pred = preds[k];
    require_same_n(pred, gold);
    if (options.exclude_punct) {
      gold = without_punctuation(gold, golds[k]);
      pred = without_punctuation(pred, golds[k]);
    }
    gold_trees.push_back(gold);
    pred_trees.push_back(pred);
    if (gold.edges.empty()) continue;  // n = 1, or nothing left after filtering

    const double score =
        static_cast<double>(intersection_size(pred.edges, gold.edges)) / gold.edges.size();
    report.sentence_ids.push_back(golds[k].id);
    report.per_sentence_uuas.push_back(score);

    auto parts = pr_by_length(pred, gold);
    report.micro.adjacent += parts.adjacent;
    report.micro.nonadjacent += parts.nonadjacent;
    if (auto v = parts.adjacent.precision()) adj_p.push_back(*v);
    if (auto v = parts.adjacent.recall()) adj_r.push_back(*v);
    if (auto v = parts.nonadjacent.precision()) non_p.push_back(*v);
    if (auto v = parts.nonadjacent.recall()) non_r.push_back(*v);
  }
  report.mean_uuas = mean_of(report.per_sentence_uuas).value_or(0.0);
  report.macro_adjacent = {mean_of(adj_p), mean_of(adj_r)};
  report.macro_nonadjacent = {mean_of(non_p), mean_of(non_r)};

  const bool have_relations = std::all_of(golds.begin(), golds.end(), [](const Sentence& s) {
    return std::none_of(s.relations.begin(), s.relations.end(),
                        [](const std::string& r) { return r.empty() || r == "_"; });
  });
  if (have_relations && !golds.empty()) {
    report.relations = recall_by_relation(preds, golds, options.relation_min_count, false);
    report.relations_nonadjacent =
        recall_by_relation(preds, golds, options.relation_min_count, true);
  }
  report.pred_histogram = length_histogram(pred_trees);
  report.gold_histogram = length_histogram(gold_trees);
  return report;
}

}  // namespace cpmi
