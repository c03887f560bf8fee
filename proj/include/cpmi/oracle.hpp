#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpmi/scores.hpp"

namespace cpmi {

/// A finite distribution over fixed-length sentences, given as an explicit
/// table. Symbols are indices into `vocab`.
struct SyntheticLanguage {
  struct Entry {
    std::vector<int> symbols;
    double prob = 0.0;
  };

  std::vector<std::string> vocab;
  int length = 0;
  std::vector<Entry> entries;
  nlohmann::json generator;  // how the table was produced, seeds included

  /// Throws Error unless probabilities are nonnegative, sum to 1 within
  /// 1e-12, and every sentence has `length` in-vocabulary symbols.
  void validate() const;

  std::vector<int> encode(const std::vector<std::string>& words) const;
  std::vector<std::string> decode(const std::vector<int>& symbols) const;
  double probability(const std::vector<int>& symbols) const;
};

/// The two-position language {"a b": .5, "a c": .25, "d c": .25}.
SyntheticLanguage language_l0();

/// Dense random table over vocab^length with positive probabilities.
SyntheticLanguage random_language(int vocab_size, int length, std::uint64_t seed);

/// Positions independent: p(s) = prod_i marginal_i(s_i), each marginal random.
SyntheticLanguage product_language(int vocab_size, int length, std::uint64_t seed);

/// Invariant under swapping positions `a` and `b` (1-based).
SyntheticLanguage exchangeable_language(int vocab_size, int length, int a, int b,
                                        std::uint64_t seed);

nlohmann::json language_to_json(const SyntheticLanguage& lang);
SyntheticLanguage language_from_json(const nlohmann::json& j);
SyntheticLanguage load_language(const std::string& path);

/// Partial sentence: observed[k] holds the symbol at position k+1, if observed.
using Observation = std::vector<std::optional<int>>;

/// Distribution of the symbol at `target` (1-based) given the observed
/// positions, marginalizing everything else. Throws on a zero-probability
/// context or an observed target.
std::vector<double> exact_conditional(const SyntheticLanguage& lang, const Observation& observed,
                                      int target);

/// Two-mask record: base(i) conditions on every other word, drop(i, j) on
/// every other word except w_j.
ScoreRecord exact_record(const SyntheticLanguage& lang, const std::vector<int>& sentence,
                         const std::string& sentence_id = "s");

/// Prefix conditioning: base(i) uses w_1..w_{i-1}; drop(i, j), j < i, uses
/// that prefix without w_j.
ScoreRecord exact_ltor_record(const SyntheticLanguage& lang, const std::vector<int>& sentence,
                              const std::string& sentence_id = "s");

/// Same two-mask scheme over tags: entries are log p(tag(w_i) = tag_i | ...)
/// where `tag_of` maps each vocabulary symbol to its tag.
PosScoreRecord exact_pos_record(const SyntheticLanguage& lang, const std::vector<int>& sentence,
                                const std::vector<std::string>& tag_of,
                                const std::string& sentence_id = "s");

/// Head function over positions 1..n: heads[k] is the head of word k+1, with
/// 0 marking the single root.
using HeadFunction = std::vector<int>;

/// Calls visit(heads) for every rooted tree on n words.
void for_each_head_function(int n, const std::function<void(const HeadFunction&)>& visit);

/// Marginal of dependent word `dependent` as used by the pmi objective; the
/// default is the tree-independent positional marginal. Overriding it with a
/// tree-dependent value breaks the equivalence assumption.
using MarginalOverride =
    std::function<double(const HeadFunction& heads, int dependent, double marginal)>;

struct SentenceEquivalence {
  std::vector<int> sentence;
  std::size_t trees = 0;
  std::vector<HeadFunction> argmax_pmi;
  std::vector<HeadFunction> argmax_cond;
  bool coincident = false;
  bool assumption_holds = true;  // cond(t) - pmi(t) constant over t
};

struct EquivalenceReport {
  std::vector<SentenceEquivalence> sentences;
  std::size_t coincident = 0;
  bool assumption_holds = true;

  bool all_coincident() const { return coincident == sentences.size(); }
};

/// For each positive-probability sentence, compares the argmax sets of
/// sum_i pmi(w_i; w_t(i)) and sum_i log p(w_i | w_t(i)) over all head
/// functions t. The root word is treated as depending on an uninformative
/// root symbol, so it contributes pmi 0 and log p(w_root).
EquivalenceReport verify_equivalence(const SyntheticLanguage& lang, std::size_t max_trees = 200000,
                                     const MarginalOverride& marginal = {},
                                     double tolerance = 1e-9);

nlohmann::json equivalence_to_json(const SyntheticLanguage& lang, const EquivalenceReport& r);

}  // namespace cpmi
