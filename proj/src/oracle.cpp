#include "cpmi/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "cpmi/rng.hpp"

namespace cpmi {

using nlohmann::json;

namespace {

constexpr int kMaxVocab = 8;
constexpr int kMaxLength = 6;

void check_generator_size(int vocab_size, int length) {
  if (vocab_size < 1 || vocab_size > kMaxVocab || length < 1 || length > kMaxLength) {
    throw Error("synthetic languages are limited to vocab 1.." + std::to_string(kMaxVocab) +
                " and length 1.." + std::to_string(kMaxLength));
  }
}

std::vector<std::string> letters(int vocab_size) {
  std::vector<std::string> v;
  for (int k = 0; k < vocab_size; ++k) v.push_back(std::string(1, static_cast<char>('a' + k)));
  return v;
}

// Calls visit with every sequence in [0, base)^length, in odometer order.
template <class Visit>
void for_each_sequence(int base, int length, Visit&& visit) {
  std::vector<int> seq(static_cast<std::size_t>(length), 0);
  while (true) {
    visit(static_cast<const std::vector<int>&>(seq));
    int pos = length - 1;
    while (pos >= 0 && seq[static_cast<std::size_t>(pos)] == base - 1) {
      seq[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) return;
    ++seq[static_cast<std::size_t>(pos)];
  }
}

double dirichlet_weight(CounterRng& rng) {
  // Exponential(1) draw; normalized draws give a flat Dirichlet.
  return -std::log1p(-rng.uniform());
}

void normalize(SyntheticLanguage& lang) {
  double total = 0.0;
  for (const auto& e : lang.entries) total += e.prob;
  for (auto& e : lang.entries) e.prob /= total;
}

Observation observe_all(const std::vector<int>& sentence) {
  return Observation(sentence.begin(), sentence.end());
}

void check_sentence_symbols(const SyntheticLanguage& lang, const std::vector<int>& sentence) {
  if (static_cast<int>(sentence.size()) != lang.length) {
    throw Error("sentence length " + std::to_string(sentence.size()) + " does not match language length " +
                std::to_string(lang.length));
  }
  if (lang.probability(sentence) <= 0.0) throw Error("sentence has zero probability");
}

}  // namespace

void SyntheticLanguage::validate() const {
  if (length < 1) throw Error("language length must be positive");
  if (vocab.empty()) throw Error("language vocabulary is empty");
  double total = 0.0;
  std::set<std::vector<int>> seen;
  for (const auto& e : entries) {
    if (!(e.prob >= 0.0) || !std::isfinite(e.prob)) throw Error("language has a negative or non-finite probability");
    if (static_cast<int>(e.symbols.size()) != length) throw Error("language sentence has wrong length");
    for (int s : e.symbols) {
      if (s < 0 || s >= static_cast<int>(vocab.size())) throw Error("language symbol out of vocabulary");
    }
    if (!seen.insert(e.symbols).second) throw Error("language lists a sentence twice");
    total += e.prob;
  }
  if (std::fabs(total - 1.0) > 1e-12) {
    throw Error("language probabilities sum to " + std::to_string(total) + ", not 1");
  }
}

std::vector<int> SyntheticLanguage::encode(const std::vector<std::string>& words) const {
  std::vector<int> out;
  for (const auto& w : words) {
    auto it = std::find(vocab.begin(), vocab.end(), w);
    if (it == vocab.end()) throw Error("symbol '" + w + "' not in language vocabulary");
    out.push_back(static_cast<int>(it - vocab.begin()));
  }
  return out;
}

std::vector<std::string> SyntheticLanguage::decode(const std::vector<int>& symbols) const {
  std::vector<std::string> out;
  for (int s : symbols) out.push_back(vocab.at(static_cast<std::size_t>(s)));
  return out;
}

double SyntheticLanguage::probability(const std::vector<int>& symbols) const {
  for (const auto& e : entries) {
    if (e.symbols == symbols) return e.prob;
  }
  return 0.0;
}

SyntheticLanguage language_l0() {
  SyntheticLanguage l;
  l.vocab = {"a", "b", "c", "d"};
  l.length = 2;
  l.entries = {{{0, 1}, 0.5}, {{0, 2}, 0.25}, {{3, 2}, 0.25}};
  l.generator = {{"kind", "L0"}};
  return l;
}

SyntheticLanguage random_language(int vocab_size, int length, std::uint64_t seed) {
  check_generator_size(vocab_size, length);
  SyntheticLanguage l;
  l.vocab = letters(vocab_size);
  l.length = length;
  l.generator = {{"kind", "random"}, {"vocab", vocab_size}, {"length", length}, {"seed", seed}};
  CounterRng rng(mix64(seed));
  for_each_sequence(vocab_size, length, [&](const std::vector<int>& s) {
    l.entries.push_back({s, dirichlet_weight(rng)});
  });
  normalize(l);
  return l;
}

SyntheticLanguage product_language(int vocab_size, int length, std::uint64_t seed) {
  check_generator_size(vocab_size, length);
  SyntheticLanguage l;
  l.vocab = letters(vocab_size);
  l.length = length;
  l.generator = {{"kind", "product"}, {"vocab", vocab_size}, {"length", length}, {"seed", seed}};
  CounterRng rng(mix64(seed));
  std::vector<std::vector<double>> marginals(static_cast<std::size_t>(length));
  for (auto& m : marginals) {
    double total = 0.0;
    for (int k = 0; k < vocab_size; ++k) {
      m.push_back(dirichlet_weight(rng));
      total += m.back();
    }
    for (double& x : m) x /= total;
  }
  for_each_sequence(vocab_size, length, [&](const std::vector<int>& s) {
    double p = 1.0;
    for (int i = 0; i < length; ++i) {
      p *= marginals[static_cast<std::size_t>(i)][static_cast<std::size_t>(s[static_cast<std::size_t>(i)])];
    }
    l.entries.push_back({s, p});
  });
  normalize(l);
  return l;
}

SyntheticLanguage exchangeable_language(int vocab_size, int length, int a, int b,
                                        std::uint64_t seed) {
  check_generator_size(vocab_size, length);
  if (a < 1 || b < 1 || a > length || b > length || a == b) throw Error("invalid swap positions");
  SyntheticLanguage base = random_language(vocab_size, length, seed);
  std::map<std::vector<int>, double> weights;
  for (const auto& e : base.entries) weights[e.symbols] = e.prob;
  SyntheticLanguage l;
  l.vocab = base.vocab;
  l.length = length;
  l.generator = {{"kind", "exchangeable"}, {"vocab", vocab_size}, {"length", length},
                 {"swap", {a, b}}, {"seed", seed}};
  for (const auto& e : base.entries) {
    auto swapped = e.symbols;
    std::swap(swapped[static_cast<std::size_t>(a - 1)], swapped[static_cast<std::size_t>(b - 1)]);
    // Same operands in the same order for a sentence and its swap.
    const double lo = std::min(e.prob, weights[swapped]);
    const double hi = std::max(e.prob, weights[swapped]);
    l.entries.push_back({e.symbols, lo + hi});
  }
  normalize(l);
  return l;
}

json language_to_json(const SyntheticLanguage& lang) {
  json entries = json::array();
  for (const auto& e : lang.entries) entries.push_back(json::array({lang.decode(e.symbols), e.prob}));
  json j = {{"vocab", lang.vocab}, {"n", lang.length}, {"entries", std::move(entries)}};
  if (!lang.generator.is_null()) j["generator"] = lang.generator;
  return j;
}

SyntheticLanguage language_from_json(const json& j) {
  try {
    SyntheticLanguage l;
    l.vocab = j.at("vocab").get<std::vector<std::string>>();
    l.length = j.at("n").get<int>();
    for (const auto& e : j.at("entries")) {
      l.entries.push_back({l.encode(e.at(0).get<std::vector<std::string>>()), e.at(1).get<double>()});
    }
    if (j.contains("generator")) l.generator = j.at("generator");
    l.validate();
    return l;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed language file: ") + e.what());
  }
}

SyntheticLanguage load_language(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open language file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("malformed language file '" + path + "': " + e.what());
  }
  return language_from_json(j);
}

std::vector<double> exact_conditional(const SyntheticLanguage& lang, const Observation& observed,
                                      int target) {
  if (static_cast<int>(observed.size()) != lang.length) throw Error("observation length mismatch");
  if (target < 1 || target > lang.length) throw Error("target position out of range");
  if (observed[static_cast<std::size_t>(target - 1)]) throw Error("target position is observed");
  std::vector<double> dist(lang.vocab.size(), 0.0);
  double total = 0.0;
  for (const auto& e : lang.entries) {
    bool match = true;
    for (std::size_t k = 0; k < observed.size() && match; ++k) {
      if (observed[k] && *observed[k] != e.symbols[k]) match = false;
    }
    if (!match) continue;
    dist[static_cast<std::size_t>(e.symbols[static_cast<std::size_t>(target - 1)])] += e.prob;
    total += e.prob;
  }
  if (total <= 0.0) throw Error("conditioning context has zero probability");
  for (double& p : dist) p /= total;
  return dist;
}

namespace {

// log p(tag at target is in `accept`) under the observation.
double log_prob_of(const SyntheticLanguage& lang, const Observation& obs, int target,
                   const std::function<bool(int)>& accept) {
  auto dist = exact_conditional(lang, obs, target);
  double p = 0.0;
  for (std::size_t s = 0; s < dist.size(); ++s) {
    if (accept(static_cast<int>(s))) p += dist[s];
  }
  return std::log(p);
}

ScoreRecord two_mask_record(const SyntheticLanguage& lang, const std::vector<int>& sentence,
                            const std::string& sentence_id,
                            const std::function<bool(int target, int symbol)>& accept,
                            const std::string& provenance) {
  check_sentence_symbols(lang, sentence);
  const int n = lang.length;
  ScoreRecord r = ScoreRecord::empty(sentence_id, n, ScoreMode::bidirectional);
  r.provenance = provenance;
  for (int i = 1; i <= n; ++i) {
    auto is_target = [&](int s) { return accept(i, s); };
    Observation obs = observe_all(sentence);
    obs[static_cast<std::size_t>(i - 1)].reset();
    r.base_loglik[static_cast<std::size_t>(i - 1)] = log_prob_of(lang, obs, i, is_target);
    for (int j = 1; j <= n; ++j) {
      if (j == i) continue;
      Observation dropped = obs;
      dropped[static_cast<std::size_t>(j - 1)].reset();
      r.drop(i, j) = log_prob_of(lang, dropped, i, is_target);
    }
  }
  return r;
}

}  // namespace

ScoreRecord exact_record(const SyntheticLanguage& lang, const std::vector<int>& sentence,
                         const std::string& sentence_id) {
  return two_mask_record(
      lang, sentence, sentence_id,
      [&](int target, int s) { return s == sentence[static_cast<std::size_t>(target - 1)]; },
      "oracle_lab exact enumeration (no renormalization beyond conditioning)");
}

PosScoreRecord exact_pos_record(const SyntheticLanguage& lang, const std::vector<int>& sentence,
                                const std::vector<std::string>& tag_of,
                                const std::string& sentence_id) {
  if (tag_of.size() != lang.vocab.size()) throw Error("tag map must cover the vocabulary");
  return PosScoreRecord{two_mask_record(
      lang, sentence, sentence_id,
      [&](int target, int s) {
        return tag_of[static_cast<std::size_t>(s)] ==
               tag_of[static_cast<std::size_t>(sentence[static_cast<std::size_t>(target - 1)])];
      },
      "oracle_lab exact enumeration over tags")};
}

ScoreRecord exact_ltor_record(const SyntheticLanguage& lang, const std::vector<int>& sentence,
                              const std::string& sentence_id) {
  check_sentence_symbols(lang, sentence);
  const int n = lang.length;
  ScoreRecord r = ScoreRecord::empty(sentence_id, n, ScoreMode::left_to_right);
  r.provenance = "oracle_lab exact enumeration, prefix conditioning";
  for (int i = 1; i <= n; ++i) {
    const int w = sentence[static_cast<std::size_t>(i - 1)];
    auto is_word = [w](int s) { return s == w; };
    Observation prefix(static_cast<std::size_t>(n));
    for (int k = 1; k < i; ++k) prefix[static_cast<std::size_t>(k - 1)] = sentence[static_cast<std::size_t>(k - 1)];
    r.base_loglik[static_cast<std::size_t>(i - 1)] = log_prob_of(lang, prefix, i, is_word);
    for (int j = 1; j < i; ++j) {
      Observation dropped = prefix;
      dropped[static_cast<std::size_t>(j - 1)].reset();
      r.drop(i, j) = log_prob_of(lang, dropped, i, is_word);
    }
  }
  return r;
}

void for_each_head_function(int n, const std::function<void(const HeadFunction&)>& visit) {
  if (n < 1) return;
  HeadFunction heads(static_cast<std::size_t>(n), 0);
  auto valid = [&] {
    int roots = 0;
    for (int k = 0; k < n; ++k) {
      if (heads[static_cast<std::size_t>(k)] == k + 1) return false;
      if (heads[static_cast<std::size_t>(k)] == 0) ++roots;
    }
    if (roots != 1) return false;
    for (int start = 1; start <= n; ++start) {
      int cur = start;
      for (int steps = 0; cur != 0; ++steps) {
        if (steps > n) return false;
        cur = heads[static_cast<std::size_t>(cur - 1)];
      }
    }
    return true;
  };
  while (true) {
    if (valid()) visit(heads);
    int pos = n - 1;
    while (pos >= 0 && heads[static_cast<std::size_t>(pos)] == n) {
      heads[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) return;
    ++heads[static_cast<std::size_t>(pos)];
  }
}

EquivalenceReport verify_equivalence(const SyntheticLanguage& lang, std::size_t max_trees,
                                     const MarginalOverride& marginal_override, double tolerance) {
  lang.validate();
  const int n = lang.length;
  const double tree_count = std::pow(static_cast<double>(n), n - 1);
  if (tree_count > static_cast<double>(max_trees)) {
    throw Error("language length " + std::to_string(n) + " needs " +
                std::to_string(static_cast<long long>(tree_count)) +
                " head functions, above the enumeration bound " + std::to_string(max_trees));
  }
  const auto V = lang.vocab.size();
  const auto N = static_cast<std::size_t>(n);

  // Positional marginals p(X_i = a) and pairwise joints p(X_i = a, X_j = b).
  std::vector<double> marg(N * V, 0.0);
  std::vector<double> joint(N * N * V * V, 0.0);
  auto marg_at = [&](std::size_t i, std::size_t a) -> double& { return marg[i * V + a]; };
  auto joint_at = [&](std::size_t i, std::size_t j, std::size_t a, std::size_t b) -> double& {
    return joint[((i * N + j) * V + a) * V + b];
  };
  for (const auto& e : lang.entries) {
    for (std::size_t i = 0; i < N; ++i) {
      const auto a = static_cast<std::size_t>(e.symbols[i]);
      marg_at(i, a) += e.prob;
      for (std::size_t j = i + 1; j < N; ++j) {
        joint_at(i, j, a, static_cast<std::size_t>(e.symbols[j])) += e.prob;
      }
    }
  }

  std::vector<HeadFunction> trees;
  for_each_head_function(n, [&](const HeadFunction& h) { trees.push_back(h); });

  EquivalenceReport report;
  for (const auto& entry : lang.entries) {
    if (entry.prob <= 0.0) continue;
    const auto& s = entry.symbols;
    std::vector<double> log_marg(N);
    std::vector<double> pmi(N * N, 0.0), log_cond(N * N, 0.0);  // log_cond[i*N+h] = log p(w_i | w_h)
    for (std::size_t i = 0; i < N; ++i) log_marg[i] = std::log(marg_at(i, static_cast<std::size_t>(s[i])));
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = i + 1; j < N; ++j) {
        const double lj = std::log(joint_at(i, j, static_cast<std::size_t>(s[i]), static_cast<std::size_t>(s[j])));
        const double p = lj - log_marg[i] - log_marg[j];
        pmi[i * N + j] = pmi[j * N + i] = p;
        log_cond[i * N + j] = lj - log_marg[j];
        log_cond[j * N + i] = lj - log_marg[i];
      }
    }

    SentenceEquivalence se;
    se.sentence = s;
    se.trees = trees.size();
    std::vector<double> pmi_obj, cond_obj;
    pmi_obj.reserve(trees.size());
    cond_obj.reserve(trees.size());
    double gap_min = 0.0, gap_max = 0.0;
    for (std::size_t t = 0; t < trees.size(); ++t) {
      const auto& heads = trees[t];
      double p = 0.0, c = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const int h = heads[i];
        if (h == 0) {
          c += log_marg[i];
          continue;
        }
        const auto hh = static_cast<std::size_t>(h - 1);
        double term = pmi[i * N + hh];
        if (marginal_override) {
          const double m = marginal_override(heads, static_cast<int>(i) + 1, std::exp(log_marg[i]));
          term += log_marg[i] - std::log(m);
        }
        p += term;
        c += log_cond[i * N + hh];
      }
      pmi_obj.push_back(p);
      cond_obj.push_back(c);
      const double gap = c - p;
      if (t == 0 || gap < gap_min) gap_min = gap;
      if (t == 0 || gap > gap_max) gap_max = gap;
    }
    se.assumption_holds = gap_max - gap_min <= tolerance;

    auto argmax_set = [&](const std::vector<double>& obj) {
      const double best = *std::max_element(obj.begin(), obj.end());
      const double slack = tolerance * std::max(1.0, std::fabs(best));
      std::vector<HeadFunction> out;
      for (std::size_t t = 0; t < obj.size(); ++t) {
        if (obj[t] >= best - slack) out.push_back(trees[t]);
      }
      return out;
    };
    se.argmax_pmi = argmax_set(pmi_obj);
    se.argmax_cond = argmax_set(cond_obj);
    se.coincident = se.argmax_pmi == se.argmax_cond;
    if (se.coincident) ++report.coincident;
    if (!se.assumption_holds) report.assumption_holds = false;
    report.sentences.push_back(std::move(se));
  }
  return report;
}

json equivalence_to_json(const SyntheticLanguage& lang, const EquivalenceReport& r) {
  json sentences = json::array();
  for (const auto& s : r.sentences) {
    json argmax = json::array();
    for (const auto& h : s.argmax_pmi) argmax.push_back(h);
    sentences.push_back({{"sentence", lang.decode(s.sentence)},
                         {"trees", s.trees},
                         {"coincident", s.coincident},
                         {"assumption_holds", s.assumption_holds},
                         {"argmax_pmi_size", s.argmax_pmi.size()},
                         {"argmax_cond_size", s.argmax_cond.size()},
                         {"argmax_pmi_heads", std::move(argmax)}});
  }
  return {{"sentences_checked", r.sentences.size()},
          {"coincident", r.coincident},
          {"all_coincident", r.all_coincident()},
          {"assumption_holds", r.assumption_holds},
          {"root_convention", "root word depends on an uninformative root symbol"},
          {"details", std::move(sentences)}};
}

}  // namespace cpmi
