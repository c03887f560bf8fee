#include "cpmi/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>

#include <json.hpp>

namespace cpmi {

using nlohmann::json;

const char* to_string(Variant v) { return v == Variant::absolute ? "absolute" : "signed"; }

const char* to_string(Symmetrization s) {
  switch (s) {
    case Symmetrization::sum: return "sum";
    case Symmetrization::max: return "max";
    case Symmetrization::single_direction: return "single_direction";
  }
  return "?";
}

Variant parse_variant(const std::string& text) {
  if (text == "abs" || text == "absolute") return Variant::absolute;
  if (text == "signed") return Variant::signed_score;
  throw Error("unknown variant '" + text + "' (expected abs or signed)");
}

Symmetrization parse_symmetrization(const std::string& text) {
  if (text == "sum") return Symmetrization::sum;
  if (text == "max") return Symmetrization::max;
  if (text == "single" || text == "single_direction") return Symmetrization::single_direction;
  throw Error("unknown symmetrization '" + text + "' (expected sum, max or single)");
}

CpmiMatrix CpmiMatrix::zeros(int n) {
  CpmiMatrix m;
  m.n = n;
  m.score.assign(static_cast<std::size_t>(n) * n, 0.0);
  return m;
}

void CpmiMatrix::set_pair(int i, int j, double value) {
  at(i, j) = value;
  at(j, i) = value;
}

bool CpmiMatrix::is_symmetric() const {
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      if (at(i, j) != at(j, i)) return false;
    }
  }
  return true;
}

namespace {

double combine(double forward, double backward, Symmetrization sym) {
  switch (sym) {
    case Symmetrization::sum: return forward + backward;
    case Symmetrization::max: return std::max(forward, backward);
    case Symmetrization::single_direction: return forward;
  }
  return forward;
}

CpmiMatrix symmetrize(const ScoreRecord& r, Symmetrization sym, Variant variant,
                      const std::string& kind) {
  if (r.mode != ScoreMode::bidirectional) {
    throw Error("record '" + r.sentence_id +
                "' is left_to_right; use build_ltor_matrix for left-to-right scores");
  }
  if (auto v = validate_record(r); !v.empty()) {
    throw Error("record '" + r.sentence_id + "' is invalid: " + v.front().detail);
  }
  CpmiMatrix m = CpmiMatrix::zeros(r.n);
  m.sentence_id = r.sentence_id;
  m.variant = variant;
  m.symmetrization = sym;
  m.source = kind + ":" + r.provenance;
  for (int i = 1; i <= r.n; ++i) {
    for (int j = i + 1; j <= r.n; ++j) {
      double s = combine(cpmi_pair(r, i, j), cpmi_pair(r, j, i), sym);
      if (variant == Variant::absolute) s = std::fabs(s);
      m.set_pair(i, j, s);
    }
  }
  return m;
}

}  // namespace

CpmiMatrix build_matrix(const ScoreRecord& r, Symmetrization sym, Variant variant) {
  return symmetrize(r, sym, variant, "cpmi");
}

CpmiMatrix build_pos_matrix(const PosScoreRecord& r, Symmetrization sym, Variant variant) {
  return symmetrize(r.scores, sym, variant, "pos-cpmi");
}

CpmiMatrix build_ltor_matrix(const ScoreRecord& r, Variant variant) {
  if (r.mode != ScoreMode::left_to_right) {
    throw Error("record '" + r.sentence_id + "' is bidirectional; use build_matrix");
  }
  if (auto v = validate_record(r); !v.empty()) {
    throw Error("record '" + r.sentence_id + "' is invalid: " + v.front().detail);
  }
  CpmiMatrix m = CpmiMatrix::zeros(r.n);
  m.sentence_id = r.sentence_id;
  m.variant = variant;
  m.symmetrization = Symmetrization::single_direction;
  m.source = "ltor-cpmi(mirrored):" + r.provenance;
  for (int i = 2; i <= r.n; ++i) {
    for (int j = 1; j < i; ++j) {
      double s = cpmi_pair(r, i, j);
      if (variant == Variant::absolute) s = std::fabs(s);
      m.set_pair(i, j, s);
    }
  }
  return m;
}

CpmiMatrix shifted(const CpmiMatrix& m, double shift) {
  CpmiMatrix out = m;
  for (int i = 1; i <= m.n; ++i) {
    for (int j = 1; j <= m.n; ++j) {
      if (i != j) out.at(i, j) += shift;
    }
  }
  return out;
}

std::string matrix_to_json_line(const CpmiMatrix& m, const std::string& config_hash) {
  json rows = json::array();
  for (int i = 1; i <= m.n; ++i) {
    json row = json::array();
    for (int j = 1; j <= m.n; ++j) row.push_back(i == j ? json(nullptr) : json(m.at(i, j)));
    rows.push_back(std::move(row));
  }
  json j = {{"v", 1},
            {"sentence_id", m.sentence_id},
            {"n", m.n},
            {"variant", to_string(m.variant)},
            {"symmetrization", to_string(m.symmetrization)},
            {"source", m.source},
            {"score", std::move(rows)}};
  if (!config_hash.empty()) j["config_hash"] = config_hash;
  return j.dump();
}

CpmiMatrix matrix_from_json_line(const std::string& line) {
  try {
    json j = json::parse(line);
    if (j.at("v").get<int>() != 1) throw Error("unsupported matrix schema version");
    CpmiMatrix m = CpmiMatrix::zeros(j.at("n").get<int>());
    m.sentence_id = j.at("sentence_id").get<std::string>();
    m.variant = parse_variant(j.at("variant").get<std::string>());
    m.symmetrization = parse_symmetrization(j.at("symmetrization").get<std::string>());
    m.source = j.value("source", "");
    const auto& rows = j.at("score");
    if (static_cast<int>(rows.size()) != m.n) throw Error("matrix row count does not match n");
    for (int i = 1; i <= m.n; ++i) {
      const auto& row = rows[static_cast<std::size_t>(i - 1)];
      if (static_cast<int>(row.size()) != m.n) throw Error("matrix row length does not match n");
      for (int k = 1; k <= m.n; ++k) {
        const auto& cell = row[static_cast<std::size_t>(k - 1)];
        m.at(i, k) = cell.is_null() ? kNoSelfEdge : cell.get<double>();
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed matrix record: ") + e.what());
  }
}

std::vector<CpmiMatrix> read_matrix_file(std::istream& in) {
  std::vector<CpmiMatrix> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(matrix_from_json_line(line));
  }
  return out;
}

std::vector<CpmiMatrix> load_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open matrix file '" + path + "'");
  return read_matrix_file(in);
}

}  // namespace cpmi
