#include "cpmi/scores.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace cpmi {

using nlohmann::json;

const char* to_string(ScoreMode mode) {
  return mode == ScoreMode::bidirectional ? "bidirectional" : "left_to_right";
}

ScoreMode parse_score_mode(const std::string& text) {
  if (text == "bidirectional") return ScoreMode::bidirectional;
  if (text == "left_to_right") return ScoreMode::left_to_right;
  throw Error("unknown score mode '" + text + "'");
}

ScoreRecord ScoreRecord::empty(std::string sentence_id, int n, ScoreMode mode) {
  ScoreRecord r;
  r.sentence_id = std::move(sentence_id);
  r.n = n;
  r.mode = mode;
  r.base_loglik.assign(static_cast<std::size_t>(n), 0.0);
  r.drop_loglik.assign(static_cast<std::size_t>(n) * n, std::nullopt);
  return r;
}

std::vector<Violation> validate_record(const ScoreRecord& r) {
  std::vector<Violation> out;
  const auto n = static_cast<std::size_t>(r.n < 0 ? 0 : r.n);
  if (r.n < 1) out.push_back({"shape_mismatch", "n must be at least 1"});
  if (r.base_loglik.size() != n) {
    out.push_back({"shape_mismatch", "base_loglik has " + std::to_string(r.base_loglik.size()) +
                                         " entries for n=" + std::to_string(r.n)});
  }
  if (r.drop_loglik.size() != n * n) {
    out.push_back({"shape_mismatch", "drop_loglik has " + std::to_string(r.drop_loglik.size()) +
                                         " cells for n=" + std::to_string(r.n)});
  }
  if (!out.empty()) return out;

  for (int i = 1; i <= r.n; ++i) {
    if (!std::isfinite(r.base(i))) {
      out.push_back({"non_finite", "base_loglik[" + std::to_string(i) + "] is not finite"});
    }
    for (int j = 1; j <= r.n; ++j) {
      const auto& cell = r.drop(i, j);
      const std::string where = "(" + std::to_string(i) + "," + std::to_string(j) + ")";
      if (i == j) {
        if (cell) out.push_back({"diagonal_defined", "diagonal defined at " + where});
        continue;
      }
      const bool expected = r.mode == ScoreMode::bidirectional || j < i;
      if (cell && !expected) {
        out.push_back({"future_conditioner", "future conditioner in LtoR mode at " + where});
      } else if (!cell && expected) {
        out.push_back({"missing_entry", "drop_loglik undefined at " + where});
      }
      if (cell && !std::isfinite(*cell)) {
        out.push_back({"non_finite", "drop_loglik" + where + " is not finite"});
      }
    }
  }
  return out;
}

double cpmi_pair(const ScoreRecord& r, int i, int j) {
  if (i < 1 || j < 1 || i > r.n || j > r.n || i == j || !r.drop(i, j)) {
    throw Error("direction unavailable: (" + std::to_string(i) + "," + std::to_string(j) +
                ") in record '" + r.sentence_id + "'");
  }
  return r.base(i) - *r.drop(i, j);
}

std::string record_to_json_line(const ScoreRecord& r, bool is_pos) {
  json drop = json::array();
  for (int i = 1; i <= r.n; ++i) {
    json row = json::array();
    for (int j = 1; j <= r.n; ++j) {
      const auto& cell = r.drop(i, j);
      row.push_back(cell ? json(*cell) : json(nullptr));
    }
    drop.push_back(std::move(row));
  }
  json j = {{"v", 1},
            {"sentence_id", r.sentence_id},
            {"n", r.n},
            {"mode", to_string(r.mode)},
            {"target", is_pos ? "pos" : "word"},
            {"base_loglik", r.base_loglik},
            {"drop_loglik", std::move(drop)},
            {"provenance", r.provenance}};
  return j.dump();
}

ScoreFileEntry record_from_json_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(std::string("malformed score record: ") + e.what());
  }
  try {
    if (j.at("v").get<int>() != 1) throw Error("unsupported score schema version");
    ScoreFileEntry entry;
    auto& r = entry.record;
    r.sentence_id = j.at("sentence_id").get<std::string>();
    r.n = j.at("n").get<int>();
    r.mode = parse_score_mode(j.at("mode").get<std::string>());
    r.provenance = j.value("provenance", "");
    entry.is_pos = j.value("target", "word") == "pos";
    r.base_loglik = j.at("base_loglik").get<std::vector<double>>();
    for (const auto& row : j.at("drop_loglik")) {
      for (const auto& cell : row) {
        r.drop_loglik.push_back(cell.is_null() ? std::nullopt
                                               : std::optional<double>(cell.get<double>()));
      }
    }
    return entry;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed score record: ") + e.what());
  }
}

void write_score_file(std::ostream& out, const std::vector<ScoreFileEntry>& entries) {
  for (const auto& e : entries) out << record_to_json_line(e.record, e.is_pos) << '\n';
}

std::vector<ScoreFileEntry> read_score_file(std::istream& in) {
  std::vector<ScoreFileEntry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      entries.push_back(record_from_json_line(line));
    } catch (const Error& e) {
      throw Error("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return entries;
}

std::vector<ScoreFileEntry> load_score_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open score file '" + path + "'");
  return read_score_file(in);
}

}  // namespace cpmi
