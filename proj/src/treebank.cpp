#include "cpmi/treebank.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace cpmi {
namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::optional<int> to_int(const std::string& text) {
  if (text.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    int v = std::stoi(text, &used);
    if (used != text.size()) return std::nullopt;
    return v;
  } catch (const std::logic_error&) {
    return std::nullopt;
  }
}

// Returns an empty string when the heads form a single rooted tree.
std::string tree_problem(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  int roots = 0;
  for (int h : heads) {
    if (h < 0 || h > n) return "head " + std::to_string(h) + " out of range";
    if (h == 0) ++roots;
  }
  for (int start = 1; start <= n; ++start) {
    int cur = start;
    for (int steps = 0; cur != 0; ++steps) {
      if (steps > n) return "cyclic heads";
      cur = heads[cur - 1];
    }
  }
  if (roots != 1) return "expected exactly one root, found " + std::to_string(roots);
  return {};
}

struct RawToken {
  std::string id;
  std::vector<std::string> fields;
};

Sentence build_sentence(const std::vector<RawToken>& raw, const std::string& sent_id,
                        std::size_t index) {
  std::map<int, int> dense;  // original id -> dense 1-based position
  std::vector<const RawToken*> kept;
  for (const RawToken& t : raw) {
    if (t.fields.size() != 10) {
      throw ConlluError(index, "expected 10 columns, got " + std::to_string(t.fields.size()));
    }
    if (t.id.find('-') != std::string::npos || t.id.find('.') != std::string::npos) continue;
    auto id = to_int(t.id);
    if (!id) throw ConlluError(index, "non-integer ID '" + t.id + "'");
    dense[*id] = static_cast<int>(kept.size()) + 1;
    kept.push_back(&t);
  }
  if (kept.empty()) throw ConlluError(index, "block has no word tokens");

  Sentence s;
  s.id = sent_id.empty() ? "s" + std::to_string(index + 1) : sent_id;
  bool any_pos = false;
  for (const RawToken* t : kept) {
    const auto& f = *t;
    s.tokens.push_back(f.fields[1]);
    s.pos.push_back(f.fields[3]);
    if (f.fields[3] != "_") any_pos = true;
    auto head = to_int(f.fields[6]);
    if (!head) throw ConlluError(index, "non-integer HEAD '" + f.fields[6] + "'");
    if (*head == 0) {
      s.heads.push_back(0);
    } else {
      auto it = dense.find(*head);
      if (it == dense.end()) {
        throw ConlluError(index, "HEAD " + std::to_string(*head) + " names no word token");
      }
      s.heads.push_back(it->second);
    }
    s.relations.push_back(f.fields[7]);
  }
  if (!any_pos) s.pos.clear();
  if (auto problem = tree_problem(s.heads); !problem.empty()) throw ConlluError(index, problem);
  return s;
}

}  // namespace

void check_sentence(const Sentence& s) {
  const std::size_t n = s.tokens.size();
  if (n == 0) throw Error("sentence '" + s.id + "' is empty");
  if (s.heads.size() != n || s.relations.size() != n || (!s.pos.empty() && s.pos.size() != n)) {
    throw Error("sentence '" + s.id + "' has misaligned columns");
  }
  if (auto problem = tree_problem(s.heads); !problem.empty()) {
    throw Error("sentence '" + s.id + "': " + problem);
  }
}

ConlluReadResult read_conllu(std::istream& in) {
  ConlluReadResult result;
  std::vector<RawToken> block;
  std::string sent_id;
  std::size_t index = 0;
  bool in_block = false;

  auto flush = [&] {
    if (!in_block) return;
    try {
      result.sentences.push_back(build_sentence(block, sent_id, index));
    } catch (const ConlluError& e) {
      result.errors.push_back(e);
    }
    ++index;
    block.clear();
    sent_id.clear();
    in_block = false;
  };

  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    in_block = true;
    if (line[0] == '#') {
      const std::string key = "# sent_id = ";
      if (line.rfind(key, 0) == 0) sent_id = line.substr(key.size());
      continue;
    }
    RawToken t;
    t.fields = split_tabs(line);
    t.id = t.fields[0];
    block.push_back(std::move(t));
  }
  flush();
  return result;
}

std::vector<Sentence> parse_conllu(std::istream& in) {
  auto result = read_conllu(in);
  if (!result.errors.empty()) throw result.errors.front();
  return std::move(result.sentences);
}

std::vector<Sentence> load_conllu(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open treebank '" + path + "'");
  return parse_conllu(in);
}

UndirectedTree gold_edges(const Sentence& s) {
  check_sentence(s);
  std::vector<Edge> edges;
  for (int i = 1; i <= s.size(); ++i) {
    int h = s.heads[i - 1];
    if (h != 0) edges.emplace_back(i, h);
  }
  return UndirectedTree(s.size(), std::move(edges));
}

void write_internal(std::ostream& out, const std::vector<Sentence>& sentences) {
  for (const Sentence& s : sentences) {
    for (int i = 0; i < s.size(); ++i) {
      out << s.id << '\t' << s.tokens[i] << '\t' << (s.has_pos() ? s.pos[i] : "_") << '\t'
          << s.heads[i] << '\t' << s.relations[i] << '\n';
    }
    out << '\n';
  }
}

std::vector<Sentence> read_internal(std::istream& in) {
  std::vector<Sentence> sentences;
  Sentence cur;
  bool any_pos = false;
  auto flush = [&] {
    if (cur.tokens.empty()) return;
    if (!any_pos) cur.pos.clear();
    check_sentence(cur);
    sentences.push_back(std::move(cur));
    cur = Sentence{};
    any_pos = false;
  };
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) {
      flush();
      continue;
    }
    auto f = split_tabs(line);
    if (f.size() != 5) throw Error("internal format expects 5 columns: '" + line + "'");
    if (cur.tokens.empty()) cur.id = f[0];
    cur.tokens.push_back(f[1]);
    cur.pos.push_back(f[2]);
    if (f[2] != "_") any_pos = true;
    auto head = to_int(f[3]);
    if (!head) throw Error("non-integer head '" + f[3] + "'");
    cur.heads.push_back(*head);
    cur.relations.push_back(f[4]);
  }
  flush();
  return sentences;
}

bool is_punctuation(const Sentence& s, int position) {
  const auto k = static_cast<std::size_t>(position - 1);
  return (s.has_pos() && s.pos[k] == "PUNCT") || s.relations[k] == "punct";
}

}  // namespace cpmi
