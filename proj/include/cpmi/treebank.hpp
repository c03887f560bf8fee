#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "cpmi/tree.hpp"

namespace cpmi {

/// One treebank sentence. Positions are 1-based; heads[k] is the head of
/// token k+1, with 0 marking the root.
struct Sentence {
  std::string id;
  std::vector<std::string> tokens;
  std::vector<std::string> pos;  // empty when the source has no tags
  std::vector<int> heads;
  std::vector<std::string> relations;

  int size() const { return static_cast<int>(tokens.size()); }
  bool has_pos() const { return !pos.empty(); }
};

/// Throws Error describing the first violated invariant.
void check_sentence(const Sentence& s);

class ConlluError : public Error {
 public:
  ConlluError(std::size_t sentence_index, const std::string& what)
      : Error("sentence " + std::to_string(sentence_index) + ": " + what),
        sentence_index_(sentence_index) {}

  std::size_t sentence_index() const { return sentence_index_; }

 private:
  std::size_t sentence_index_;
};

struct ConlluReadResult {
  std::vector<Sentence> sentences;
  std::vector<ConlluError> errors;  // malformed blocks that were skipped
};

/// Reads every block, collecting malformed ones into `errors` instead of
/// throwing. Sentence indices are 0-based block counts.
ConlluReadResult read_conllu(std::istream& in);

/// Strict variant: throws the first ConlluError.
std::vector<Sentence> parse_conllu(std::istream& in);
std::vector<Sentence> load_conllu(const std::string& path);

/// Word-word gold edges; the root attachment is dropped.
UndirectedTree gold_edges(const Sentence& s);

/// Line format `id<TAB>token<TAB>pos<TAB>head<TAB>relation`, one token per
/// line, blank line between sentences. Missing POS is written as `_`.
void write_internal(std::ostream& out, const std::vector<Sentence>& sentences);
std::vector<Sentence> read_internal(std::istream& in);

bool is_punctuation(const Sentence& s, int position);

}  // namespace cpmi
