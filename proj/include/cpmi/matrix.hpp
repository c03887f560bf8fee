#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cpmi/scores.hpp"

namespace cpmi {

enum class Variant { signed_score, absolute };
enum class Symmetrization { sum, max, single_direction };

const char* to_string(Variant v);
const char* to_string(Symmetrization s);
Variant parse_variant(const std::string& text);  // "signed" | "abs" | "absolute"
Symmetrization parse_symmetrization(const std::string& text);

/// Value stored on the diagonal. Decoders never read it.
inline constexpr double kNoSelfEdge = 0.0;

/// Symmetric pairwise score matrix over positions 1..n.
struct CpmiMatrix {
  std::string sentence_id;
  int n = 0;
  Variant variant = Variant::absolute;
  Symmetrization symmetrization = Symmetrization::sum;
  std::string source;
  std::vector<double> score;  // n*n row-major

  static CpmiMatrix zeros(int n);

  double at(int i, int j) const { return score[static_cast<std::size_t>((i - 1) * n + (j - 1))]; }
  double& at(int i, int j) { return score[static_cast<std::size_t>((i - 1) * n + (j - 1))]; }

  /// Writes value to (i, j) and (j, i).
  void set_pair(int i, int j, double value);
  bool is_symmetric() const;
};

/// Combines the two CPMI directions of a bidirectional record.
/// single_direction keeps cpmi(i; j) for i < j, i.e. the lower position as
/// the predicted word. The absolute value is taken after combining.
CpmiMatrix build_matrix(const ScoreRecord& r, Symmetrization sym = Symmetrization::sum,
                        Variant variant = Variant::absolute);

/// Left-to-right records only carry cpmi(i; j) for j < i; that direction is
/// mirrored into both cells.
CpmiMatrix build_ltor_matrix(const ScoreRecord& r, Variant variant = Variant::absolute);

CpmiMatrix build_pos_matrix(const PosScoreRecord& r, Symmetrization sym = Symmetrization::sum,
                            Variant variant = Variant::absolute);

/// Returns a copy with `shift` added to every off-diagonal entry.
CpmiMatrix shifted(const CpmiMatrix& m, double shift);

// `.cpmi-matrix.jsonl` cache format; undefined diagonal written as null.
std::string matrix_to_json_line(const CpmiMatrix& m, const std::string& config_hash = {});
CpmiMatrix matrix_from_json_line(const std::string& line);
std::vector<CpmiMatrix> read_matrix_file(std::istream& in);
std::vector<CpmiMatrix> load_matrix_file(const std::string& path);

}  // namespace cpmi
