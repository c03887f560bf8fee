#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cpmi/matrix.hpp"
#include "cpmi/treebank.hpp"

namespace cpmi {

struct SgnsConfig {
  int dim = 100;
  int window = 5;
  int negatives = 5;
  int epochs = 5;
  float learning_rate = 0.025f;
  std::uint64_t seed = 1;
  // Frequent-word subsampling threshold; 0 disables it.
  double subsample = 0.0;
};

/// Target (w) and context (c) embeddings from skip-gram with negative
/// sampling. At the optimum w_i . c_j = pmi(i, j) - log k.
struct EmbeddingTable {
  std::vector<std::string> vocabulary;
  std::unordered_map<std::string, std::size_t> index;
  int dim = 0;
  SgnsConfig config;  // hyperparameters the table was trained with
  std::vector<float> target;   // |V| x dim, row-major
  std::vector<float> context;  // |V| x dim, row-major
  std::vector<float> unk_target;   // mean of all target rows
  std::vector<float> unk_context;  // mean of all context rows

  std::size_t size() const { return vocabulary.size(); }
  std::span<const float> target_row(const std::string& word) const;
  std::span<const float> context_row(const std::string& word) const;

  void recompute_unk();
};

/// Trains on sentences (windows never cross a sentence boundary).
/// Deterministic for a fixed config: single-threaded, counter-based RNG.
EmbeddingTable train_sgns(const std::vector<std::vector<std::string>>& corpus,
                          const SgnsConfig& config);

/// w_a . c_b
double pmi_estimate(const EmbeddingTable& e, const std::string& a, const std::string& b);

/// Non-contextual PMI matrix for a sentence. Always signed: the -log k shift
/// makes magnitudes meaningless, so Variant::absolute is rejected.
CpmiMatrix pmi_matrix(const Sentence& s, const EmbeddingTable& e,
                      Symmetrization sym = Symmetrization::sum,
                      Variant variant = Variant::signed_score);

// Binary format: magic "CPMIW2V1", u32 version, u64 |V|, u32 dim, u32 k,
// u32 window, u32 epochs, u64 seed, f64 subsample, f32 learning rate; then
// each word as u32 byte length + bytes; then target and context as
// row-major float32. All little-endian.
void save_embeddings(std::ostream& out, const EmbeddingTable& e);
EmbeddingTable load_embeddings(std::istream& in);
void save_embeddings(const std::string& path, const EmbeddingTable& e);
EmbeddingTable load_embeddings(const std::string& path);

}  // namespace cpmi
