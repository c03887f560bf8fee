#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cpmi/tree.hpp"

namespace cpmi {

enum class ScoreMode { bidirectional, left_to_right };

const char* to_string(ScoreMode mode);
ScoreMode parse_score_mode(const std::string& text);

/// Word-level conditional log-probabilities (nats) for one sentence.
///
/// base_loglik[i-1] is log p(w_i | C_i), where C_i is the rest of the
/// sentence (bidirectional) or the prefix before w_i (left_to_right).
/// drop(i, j) is log p(w_i | C_i without w_j); it is never defined on the
/// diagonal, and in left_to_right mode only for j < i.
struct ScoreRecord {
  std::string sentence_id;
  int n = 0;
  ScoreMode mode = ScoreMode::bidirectional;
  std::vector<double> base_loglik;
  std::vector<std::optional<double>> drop_loglik;  // n*n row-major
  std::string provenance;

  static ScoreRecord empty(std::string sentence_id, int n, ScoreMode mode);

  const std::optional<double>& drop(int i, int j) const {
    return drop_loglik[static_cast<std::size_t>((i - 1) * n + (j - 1))];
  }
  std::optional<double>& drop(int i, int j) {
    return drop_loglik[static_cast<std::size_t>((i - 1) * n + (j - 1))];
  }
  double base(int i) const { return base_loglik[static_cast<std::size_t>(i - 1)]; }
};

/// Same shape as ScoreRecord, but entries are log-probabilities of the gold
/// POS tag of w_i under a tagging probe.
struct PosScoreRecord {
  ScoreRecord scores;
};

struct Violation {
  std::string code;
  std::string detail;
};

/// Empty iff the record is well formed. Never throws.
std::vector<Violation> validate_record(const ScoreRecord& r);

/// base(i) - drop(i, j): CPMI of w_i and w_j given the rest of the sentence.
double cpmi_pair(const ScoreRecord& r, int i, int j);

// JSON Lines exchange format (`.cpmi-scores.jsonl`, schema "v": 1).
// A record carries "target": "word" or "pos".
struct ScoreFileEntry {
  ScoreRecord record;
  bool is_pos = false;
};

std::string record_to_json_line(const ScoreRecord& r, bool is_pos = false);
ScoreFileEntry record_from_json_line(const std::string& line);

void write_score_file(std::ostream& out, const std::vector<ScoreFileEntry>& entries);
std::vector<ScoreFileEntry> read_score_file(std::istream& in);
std::vector<ScoreFileEntry> load_score_file(const std::string& path);

}  // namespace cpmi
