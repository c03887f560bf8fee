#include "cpmi/w2v.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "cpmi/rng.hpp"

namespace cpmi {

static_assert(std::endian::native == std::endian::little, "embedding files assume little-endian");

namespace {

constexpr char kMagic[8] = {'C', 'P', 'M', 'I', 'W', '2', 'V', '1'};
constexpr std::uint32_t kVersion = 1;

double dot(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += static_cast<double>(a[k]) * b[k];
  return s;
}

float sigmoid(float x) {
  if (x > 30.0f) return 1.0f;
  if (x < -30.0f) return 0.0f;
  return 1.0f / (1.0f + std::exp(-x));
}

template <class T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) throw Error("truncated embedding file");
  return value;
}

}  // namespace

std::span<const float> EmbeddingTable::target_row(const std::string& word) const {
  auto it = index.find(word);
  if (it == index.end()) return unk_target;
  return {target.data() + it->second * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
}

std::span<const float> EmbeddingTable::context_row(const std::string& word) const {
  auto it = index.find(word);
  if (it == index.end()) return unk_context;
  return {context.data() + it->second * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
}

void EmbeddingTable::recompute_unk() {
  const auto d = static_cast<std::size_t>(dim);
  std::vector<double> t(d, 0.0), c(d, 0.0);
  for (std::size_t w = 0; w < size(); ++w) {
    for (std::size_t k = 0; k < d; ++k) {
      t[k] += target[w * d + k];
      c[k] += context[w * d + k];
    }
  }
  unk_target.assign(d, 0.0f);
  unk_context.assign(d, 0.0f);
  if (size() == 0) return;
  for (std::size_t k = 0; k < d; ++k) {
    unk_target[k] = static_cast<float>(t[k] / static_cast<double>(size()));
    unk_context[k] = static_cast<float>(c[k] / static_cast<double>(size()));
  }
}

EmbeddingTable train_sgns(const std::vector<std::vector<std::string>>& corpus,
                          const SgnsConfig& config) {
  if (config.dim < 2) throw Error("embedding dimension must be at least 2");
  if (config.window < 1) throw Error("window must be at least 1");
  if (config.negatives < 1) throw Error("negative sample count must be at least 1");
  if (config.epochs < 1) throw Error("epochs must be at least 1");

  std::map<std::string, std::size_t> counts;
  std::size_t tokens = 0;
  for (const auto& sentence : corpus) {
    for (const auto& w : sentence) {
      ++counts[w];
      ++tokens;
    }
  }
  if (tokens == 0) throw Error("cannot train embeddings on an empty corpus");
  if (counts.size() < 2) throw Error("vocabulary needs at least 2 word types");

  EmbeddingTable e;
  e.dim = config.dim;
  e.config = config;
  std::vector<std::pair<std::string, std::size_t>> by_freq(counts.begin(), counts.end());
  std::stable_sort(by_freq.begin(), by_freq.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<double> freq;
  for (const auto& [word, count] : by_freq) {
    e.index.emplace(word, e.vocabulary.size());
    e.vocabulary.push_back(word);
    freq.push_back(static_cast<double>(count));
  }

  // Negative sampling from unigram^(3/4).
  std::vector<double> cumulative;
  double acc = 0.0;
  for (double f : freq) {
    acc += std::pow(f, 0.75);
    cumulative.push_back(acc);
  }

  const auto V = e.size();
  const auto d = static_cast<std::size_t>(config.dim);
  CounterRng init_rng = CounterRng::substream(config.seed, 0);
  e.target.resize(V * d);
  for (float& x : e.target) x = static_cast<float>((init_rng.uniform() - 0.5) / config.dim);
  e.context.assign(V * d, 0.0f);

  std::vector<std::vector<std::size_t>> ids;
  for (const auto& sentence : corpus) {
    std::vector<std::size_t> row;
    for (const auto& w : sentence) row.push_back(e.index.at(w));
    ids.push_back(std::move(row));
  }

  CounterRng rng = CounterRng::substream(config.seed, 1);
  const double total_steps = static_cast<double>(tokens) * config.epochs;
  double processed = 0.0;
  std::vector<float> grad(d);

  auto train_pair = [&](std::size_t center, std::size_t positive, float lr) {
    float* w = &e.target[center * d];
    std::fill(grad.begin(), grad.end(), 0.0f);
    for (int s = 0; s <= config.negatives; ++s) {
      std::size_t out;
      float label;
      if (s == 0) {
        out = positive;
        label = 1.0f;
      } else {
        const double u = rng.uniform() * acc;
        out = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                       cumulative.begin());
        if (out >= V) out = V - 1;
        if (out == positive) continue;
        label = 0.0f;
      }
      float* c = &e.context[out * d];
      float f = 0.0f;
      for (std::size_t k = 0; k < d; ++k) f += w[k] * c[k];
      const float g = (label - sigmoid(f)) * lr;
      for (std::size_t k = 0; k < d; ++k) grad[k] += g * c[k];
      for (std::size_t k = 0; k < d; ++k) c[k] += g * w[k];
    }
    for (std::size_t k = 0; k < d; ++k) w[k] += grad[k];
  };

  std::vector<std::size_t> kept;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& sentence : ids) {
      kept.clear();
      for (std::size_t id : sentence) {
        if (config.subsample > 0.0) {
          const double f = freq[id] / static_cast<double>(tokens);
          const double keep = std::sqrt(config.subsample / f) + config.subsample / f;
          if (rng.uniform() >= keep) continue;
        }
        kept.push_back(id);
      }
      for (std::size_t pos = 0; pos < kept.size(); ++pos) {
        const float lr = config.learning_rate *
                         static_cast<float>(std::max(1e-4, 1.0 - processed / total_steps));
        processed += 1.0;
        const std::size_t lo = pos >= static_cast<std::size_t>(config.window) ? pos - config.window : 0;
        const std::size_t hi = std::min(kept.size() - 1, pos + config.window);
        for (std::size_t ctx = lo; ctx <= hi; ++ctx) {
          if (ctx != pos) train_pair(kept[pos], kept[ctx], lr);
        }
      }
      processed += static_cast<double>(sentence.size() - kept.size());
    }
  }
  e.recompute_unk();
  return e;
}

double pmi_estimate(const EmbeddingTable& e, const std::string& a, const std::string& b) {
  return dot(e.target_row(a), e.context_row(b));
}

CpmiMatrix pmi_matrix(const Sentence& s, const EmbeddingTable& e, Symmetrization sym,
                      Variant variant) {
  if (variant == Variant::absolute) {
    throw Error("the Word2Vec PMI estimate is only meaningful signed: w.c equals PMI shifted by "
                "-log k, so absolute values depend on the arbitrary shift");
  }
  CpmiMatrix m = CpmiMatrix::zeros(s.size());
  m.sentence_id = s.id;
  m.variant = Variant::signed_score;
  m.symmetrization = sym;
  m.source = "w2v-pmi(d=" + std::to_string(e.dim) + ",k=" + std::to_string(e.config.negatives) + ")";
  for (int i = 1; i <= s.size(); ++i) {
    for (int j = i + 1; j <= s.size(); ++j) {
      const auto& a = s.tokens[static_cast<std::size_t>(i - 1)];
      const auto& b = s.tokens[static_cast<std::size_t>(j - 1)];
      const double forward = pmi_estimate(e, a, b);
      const double backward = pmi_estimate(e, b, a);
      double v = forward + backward;
      if (sym == Symmetrization::max) v = std::max(forward, backward);
      if (sym == Symmetrization::single_direction) v = forward;
      m.set_pair(i, j, v);
    }
  }
  return m;
}

void save_embeddings(std::ostream& out, const EmbeddingTable& e) {
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, e.size());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(e.dim));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(e.config.negatives));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(e.config.window));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(e.config.epochs));
  put<std::uint64_t>(out, e.config.seed);
  put<double>(out, e.config.subsample);
  put<float>(out, e.config.learning_rate);
  for (const auto& w : e.vocabulary) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(w.size()));
    out.write(w.data(), static_cast<std::streamsize>(w.size()));
  }
  out.write(reinterpret_cast<const char*>(e.target.data()),
            static_cast<std::streamsize>(e.target.size() * sizeof(float)));
  out.write(reinterpret_cast<const char*>(e.context.data()),
            static_cast<std::streamsize>(e.context.size() * sizeof(float)));
  if (!out) throw Error("failed writing embedding table");
}

EmbeddingTable load_embeddings(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw Error("not an embedding table (bad magic)");
  }
  if (get<std::uint32_t>(in) != kVersion) throw Error("unsupported embedding table version");
  EmbeddingTable e;
  const auto V = get<std::uint64_t>(in);
  e.dim = static_cast<int>(get<std::uint32_t>(in));
  e.config.dim = e.dim;
  e.config.negatives = static_cast<int>(get<std::uint32_t>(in));
  e.config.window = static_cast<int>(get<std::uint32_t>(in));
  e.config.epochs = static_cast<int>(get<std::uint32_t>(in));
  e.config.seed = get<std::uint64_t>(in);
  e.config.subsample = get<double>(in);
  e.config.learning_rate = get<float>(in);
  if (e.dim < 1 || V > (1ULL << 32)) throw Error("corrupt embedding header");
  for (std::uint64_t w = 0; w < V; ++w) {
    const auto len = get<std::uint32_t>(in);
    std::string word(len, '\0');
    if (!in.read(word.data(), len)) throw Error("truncated embedding vocabulary");
    e.index.emplace(word, e.vocabulary.size());
    e.vocabulary.push_back(std::move(word));
  }
  const auto cells = static_cast<std::size_t>(V) * static_cast<std::size_t>(e.dim);
  e.target.resize(cells);
  e.context.resize(cells);
  if (!in.read(reinterpret_cast<char*>(e.target.data()), static_cast<std::streamsize>(cells * sizeof(float))) ||
      !in.read(reinterpret_cast<char*>(e.context.data()), static_cast<std::streamsize>(cells * sizeof(float)))) {
    throw Error("truncated embedding matrices");
  }
  for (float x : e.target) if (!std::isfinite(x)) throw Error("non-finite embedding entry");
  for (float x : e.context) if (!std::isfinite(x)) throw Error("non-finite embedding entry");
  e.recompute_unk();
  return e;
}

void save_embeddings(const std::string& path, const EmbeddingTable& e) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write embedding table '" + path + "'");
  save_embeddings(out, e);
}

EmbeddingTable load_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open embedding table '" + path + "'");
  return load_embeddings(in);
}

}  // namespace cpmi
