#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cpmi/baselines.hpp"
#include "cpmi/decode.hpp"
#include "cpmi/eval.hpp"
#include "cpmi/matrix.hpp"
#include "cpmi/oracle.hpp"
#include "cpmi/run.hpp"
#include "cpmi/scores.hpp"
#include "cpmi/treebank.hpp"
#include "cpmi/w2v.hpp"

namespace cpmi {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

struct CommonFlags {
  std::string out_dir;
  int threads = 1;
  std::uint64_t seed = 42;
};

// Collects inputs/config, derives the config hash, writes artifacts and the
// manifest. Thread count and output directory are execution details and
// stay out of the hash.
class RunContext {
 public:
  RunContext(std::string command, const CommonFlags& flags, std::ostream& out, std::ostream& err)
      : command_(std::move(command)), flags_(flags), out_(out), err_(err) {}

  std::ostream& out() { return out_; }
  std::ostream& err() { return err_; }
  int threads() const { return flags_.threads; }
  std::uint64_t seed() const { return flags_.seed; }

  void input(const std::string& role, const std::string& path) {
    if (!fs::exists(path)) throw Error("input '" + path + "' does not exist");
    inputs_.push_back({{"role", role}, {"path", path}, {"sha256", sha256_file(path)}});
  }

  template <class T>
  void set(const std::string& key, const T& value) {
    config_[key] = value;
  }

  const std::string& config_hash() {
    if (hash_.empty()) {
      // Inputs enter by content so relocated files hash the same.
      ordered_json contents = ordered_json::array();
      for (const auto& in : inputs_) contents.push_back({{"role", in["role"]}, {"sha256", in["sha256"]}});
      ordered_json basis = {{"command", command_}, {"config", config_}, {"inputs", contents},
                            {"seed", flags_.seed}, {"version", kToolVersion}};
      hash_ = sha256_hex(basis.dump());
    }
    return hash_;
  }

  std::string header() {
    return "# config_hash=" + config_hash() + " seed=" + std::to_string(flags_.seed) + "\n";
  }

  void write(const std::string& name, const std::string& content) {
    fs::create_directories(flags_.out_dir);
    const fs::path path = fs::path(flags_.out_dir) / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write '" + path.string() + "'");
    f << content;
    f.close();
    artifacts_.push_back({{"name", name}, {"sha256", sha256_hex(content)}});
    out_ << "wrote " << path.string() << "\n";
  }

  void write_binary(const std::string& name, const std::function<void(std::ostream&)>& fill) {
    std::ostringstream buf(std::ios::binary);
    fill(buf);
    write(name, buf.str());
  }

  void finish() {
    ordered_json manifest = {{"tool", "cpmi"},
                             {"version", kToolVersion},
                             {"command", command_},
                             {"config", config_},
                             {"inputs", inputs_},
                             {"seed", flags_.seed},
                             {"config_hash", config_hash()},
                             {"artifacts", artifacts_}};
    fs::create_directories(flags_.out_dir);
    std::ofstream f(fs::path(flags_.out_dir) / "manifest.json", std::ios::binary);
    f << manifest.dump(2) << "\n";
  }

 private:
  std::string command_;
  CommonFlags flags_;
  std::ostream& out_;
  std::ostream& err_;
  ordered_json config_ = ordered_json::object();
  ordered_json inputs_ = ordered_json::array();
  ordered_json artifacts_ = ordered_json::array();
  std::string hash_;
};

const CLI::IsMember kSymChoices({"sum", "max", "single", "single_direction"});
const CLI::IsMember kVariantChoices({"abs", "absolute", "signed"});

std::string fmt_double(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt_double(*v) : "NA"; }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::vector<Sentence> read_corpus(const std::string& path, bool strict, std::ostream& err) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open treebank '" + path + "'");
  auto result = read_conllu(in);
  if (!result.errors.empty()) {
    if (strict) throw result.errors.front();
    for (const auto& e : result.errors) err << "skipped " << e.what() << "\n";
  }
  return std::move(result.sentences);
}

std::vector<UndirectedTree> corpus_baseline(const std::vector<Sentence>& corpus, const std::string& kind,
                                            bool projective, std::uint64_t seed, int threads) {
  std::vector<UndirectedTree> trees(corpus.size());
  parallel_for(corpus.size(), threads, [&](std::size_t k) {
    const int n = corpus[k].size();
    CounterRng rng = CounterRng::substream(seed, k);
    if (kind == "linear") {
      trees[k] = linear_tree(n);
    } else if (kind == "random") {
      trees[k] = random_tree(n, rng, projective).tree;
    } else if (kind == "length-matched") {
      trees[k] = length_matched_tree(gold_edges(corpus[k]), rng);
    } else {
      throw Error("unknown baseline '" + kind + "' (linear, random, length-matched)");
    }
  });
  return trees;
}

std::vector<UndirectedTree> align_predictions(const std::vector<TreeLine>& lines,
                                              const std::vector<Sentence>& gold) {
  std::map<std::string, const TreeLine*> by_id;
  for (const auto& l : lines) by_id[l.sentence_id] = &l;
  std::vector<UndirectedTree> out;
  for (const auto& s : gold) {
    auto it = by_id.find(s.id);
    if (it == by_id.end()) throw Error("no predicted tree for sentence '" + s.id + "'");
    UndirectedTree t(s.size(), it->second->edges);
    if (!t.is_spanning_tree()) throw Error("predicted tree for '" + s.id + "' is not a spanning tree");
    out.push_back(std::move(t));
  }
  return out;
}

std::string trees_tsv(RunContext& ctx, const std::vector<std::string>& ids,
                      const std::vector<UndirectedTree>& trees) {
  std::string body = ctx.header();
  for (std::size_t k = 0; k < trees.size(); ++k) body += tree_line(ids[k], trees[k].edges) + "\n";
  return body;
}

std::string histogram_csv(RunContext& ctx, const LengthHistogram& h) {
  std::string body = ctx.header() + "length,count\n";
  for (const auto& [len, count] : h.counts) body += std::to_string(len) + "," + std::to_string(count) + "\n";
  return body;
}

void add_metric_rows(std::string& csv, const std::string& model, const EvalReport& r) {
  auto row = [&](const std::string& metric, const std::string& value) {
    csv += model + "," + metric + "," + value + "\n";
  };
  row("uuas", fmt_double(r.mean_uuas));
  row("sentences", std::to_string(r.per_sentence_uuas.size()));
  row("len1_precision", fmt_opt(r.micro.adjacent.precision()));
  row("len1_recall", fmt_opt(r.micro.adjacent.recall()));
  row("len_gt1_precision", fmt_opt(r.micro.nonadjacent.precision()));
  row("len_gt1_recall", fmt_opt(r.micro.nonadjacent.recall()));
  row("macro_len1_precision", fmt_opt(r.macro_adjacent.precision));
  row("macro_len1_recall", fmt_opt(r.macro_adjacent.recall));
  row("macro_len_gt1_precision", fmt_opt(r.macro_nonadjacent.precision));
  row("macro_len_gt1_recall", fmt_opt(r.macro_nonadjacent.recall));
  row("pred_len1_fraction", fmt_double(r.pred_histogram.fraction_at(1)));
  row("gold_len1_fraction", fmt_double(r.gold_histogram.fraction_at(1)));
}

json relations_json(const std::map<std::string, RelationStats>& table) {
  json j = json::object();
  for (const auto& [rel, st] : table) {
    j[rel] = {{"count", st.count}, {"recall", st.recall}, {"mean_arc_length", st.mean_arc_length}};
  }
  return j;
}

json histogram_json(const LengthHistogram& h) {
  json counts = json::object();
  for (const auto& [len, c] : h.counts) counts[std::to_string(len)] = c;
  return {{"counts", counts}, {"total", h.total}, {"fraction_len1", h.fraction_at(1)}};
}

json report_json(const EvalReport& r) {
  json per_sentence = json::array();
  for (std::size_t k = 0; k < r.per_sentence_uuas.size(); ++k) {
    per_sentence.push_back({{"sentence_id", r.sentence_ids[k]}, {"uuas", r.per_sentence_uuas[k]}});
  }
  auto pr = [](const PrecisionRecall& p) {
    return json{{"precision", opt_json(p.precision())}, {"recall", opt_json(p.recall())},
                {"predicted", p.predicted}, {"gold", p.gold}, {"hits", p.hits}};
  };
  return {{"mean_uuas", r.mean_uuas},
          {"per_sentence", per_sentence},
          {"length_partition_average", "micro (pooled counts); macro reported alongside"},
          {"len1", pr(r.micro.adjacent)},
          {"len_gt1", pr(r.micro.nonadjacent)},
          {"macro_len1", {{"precision", opt_json(r.macro_adjacent.precision)},
                          {"recall", opt_json(r.macro_adjacent.recall)}}},
          {"macro_len_gt1", {{"precision", opt_json(r.macro_nonadjacent.precision)},
                             {"recall", opt_json(r.macro_nonadjacent.recall)}}},
          {"relations", relations_json(r.relations)},
          {"relations_nonadjacent", relations_json(r.relations_nonadjacent)},
          {"pred_histogram", histogram_json(r.pred_histogram)},
          {"gold_histogram", histogram_json(r.gold_histogram)},
          {"exclude_punct", r.exclude_punct}};
}

std::string relations_csv(RunContext& ctx, const EvalReport& r) {
  std::string csv = ctx.header() + "filter,relation,count,recall,mean_arc_length\n";
  auto add = [&](const std::string& filter, const std::map<std::string, RelationStats>& t) {
    for (const auto& [rel, st] : t) {
      csv += filter + "," + rel + "," + std::to_string(st.count) + "," + fmt_double(st.recall) + "," +
             fmt_double(st.mean_arc_length) + "\n";
    }
  };
  add("all", r.relations);
  add("nonadjacent", r.relations_nonadjacent);
  return csv;
}

// Matrices from a score file, routed by mode and target.
std::vector<CpmiMatrix> matrices_from_scores(const std::vector<ScoreFileEntry>& entries,
                                             Symmetrization sym, Variant variant, int threads) {
  std::vector<CpmiMatrix> out(entries.size());
  parallel_for(entries.size(), threads, [&](std::size_t k) {
    const auto& e = entries[k];
    if (e.record.mode == ScoreMode::left_to_right) {
      out[k] = build_ltor_matrix(e.record, variant);
    } else if (e.is_pos) {
      out[k] = build_pos_matrix(PosScoreRecord{e.record}, sym, variant);
    } else {
      out[k] = build_matrix(e.record, sym, variant);
    }
  });
  return out;
}

std::vector<std::vector<std::string>> read_text_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus '" + path + "'");
  std::vector<std::vector<std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream words(line);
    std::vector<std::string> sentence;
    for (std::string w; words >> w;) sentence.push_back(w);
    if (!sentence.empty()) out.push_back(std::move(sentence));
  }
  return out;
}

std::pair<std::string, std::string> split_named(const std::string& spec) {
  auto eq = spec.find('=');
  if (eq == std::string::npos) return {fs::path(spec).stem().string(), spec};
  return {spec.substr(0, eq), spec.substr(eq + 1)};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"cpmi: dependency trees from contextualized pointwise mutual information", "cpmi"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  CommonFlags common;
  const char* env_out = std::getenv("CPMI_OUT_DIR");
  common.out_dir = env_out && *env_out ? env_out : "cpmi-out";
  auto add_common = [&](CLI::App* sub, bool seeded) {
    sub->add_option("--out", common.out_dir, "Output directory (default: $CPMI_OUT_DIR or cpmi-out)");
    sub->add_option("--threads", common.threads, "Worker threads; results do not depend on it")
        ->check(CLI::PositiveNumber);
    if (seeded) sub->add_option("--seed", common.seed, "Random seed");
  };

  // treebank stats
  auto* treebank = app.add_subcommand("treebank", "Treebank utilities");
  treebank->require_subcommand(1);
  auto* stats = treebank->add_subcommand("stats", "Sentence, token and gold arc-length statistics");
  std::string corpus_path;
  bool strict = false, exclude_punct = false;
  stats->add_option("--corpus", corpus_path, "CoNLL-U treebank")->required();
  stats->add_flag("--strict", strict, "Abort on the first malformed sentence");
  stats->add_flag("--exclude-punct", exclude_punct, "Drop arcs touching punctuation");
  add_common(stats, false);

  // validate-scores
  auto* validate = app.add_subcommand("validate-scores", "Check a .cpmi-scores.jsonl file");
  std::string scores_path;
  validate->add_option("--scores", scores_path, "Score file")->required();
  add_common(validate, false);

  // build-matrix
  auto* build = app.add_subcommand("build-matrix", "Symmetrized CPMI matrices from a score file");
  std::string sym_text = "sum", variant_text = "abs";
  build->add_option("--scores", scores_path, "Score file")->required();
  build->add_option("--sym", sym_text, "sum | max | single")->capture_default_str()->check(kSymChoices);
  build->add_option("--variant", variant_text, "abs | signed")->capture_default_str()->check(kVariantChoices);
  add_common(build, false);

  // decode
  auto* decode = app.add_subcommand("decode", "Maximum spanning trees from scores or matrices");
  std::string matrices_path;
  bool projective = false, mst = false;
  decode->add_option("--scores", scores_path, "Score file");
  decode->add_option("--matrices", matrices_path, "Matrix file (.cpmi-matrix.jsonl)");
  decode->add_flag("--projective", projective, "Eisner projective decoding (default)");
  decode->add_flag("--mst", mst, "Unrestricted maximum spanning tree");
  decode->add_option("--sym", sym_text, "sum | max | single")->capture_default_str()->check(kSymChoices);
  decode->add_option("--variant", variant_text, "abs | signed")->capture_default_str()->check(kVariantChoices);
  add_common(decode, false);

  // baseline
  auto* baseline = app.add_subcommand("baseline", "Linear, random and length-matched trees");
  std::string kind = "linear";
  baseline->add_option("--corpus", corpus_path, "CoNLL-U treebank")->required();
  baseline->add_option("--kind", kind, "linear | random | length-matched")->capture_default_str();
  baseline->add_flag("--projective", projective, "Projective random trees (default)");
  baseline->add_flag("--mst", mst, "Unrestricted random trees");
  baseline->add_flag("--strict", strict, "Abort on the first malformed sentence");
  add_common(baseline, true);

  // w2v
  auto* w2v = app.add_subcommand("w2v", "Word2Vec (SGNS) PMI control");
  w2v->require_subcommand(1);
  auto* w2v_train = w2v->add_subcommand("train", "Train SGNS embeddings");
  SgnsConfig sgns;
  std::string corpus_format = "conllu";
  w2v_train->add_option("--corpus", corpus_path, "Training corpus")->required();
  w2v_train->add_option("--format", corpus_format, "conllu | text (one sentence per line)")
      ->capture_default_str();
  w2v_train->add_option("--dim", sgns.dim)->capture_default_str();
  w2v_train->add_option("--window", sgns.window)->capture_default_str();
  w2v_train->add_option("--negative", sgns.negatives, "Negative samples k")->capture_default_str();
  w2v_train->add_option("--epochs", sgns.epochs)->capture_default_str();
  w2v_train->add_option("--lr", sgns.learning_rate, "Initial learning rate")->capture_default_str();
  w2v_train->add_option("--subsample", sgns.subsample, "Frequent-word subsampling threshold (0 = off)")
      ->capture_default_str();
  add_common(w2v_train, true);
  auto* w2v_pmi = w2v->add_subcommand("pmi", "Signed PMI matrices from embeddings");
  std::string embeddings_path;
  w2v_pmi->add_option("--embeddings", embeddings_path, "Embedding table")->required();
  w2v_pmi->add_option("--corpus", corpus_path, "CoNLL-U treebank")->required();
  w2v_pmi->add_option("--sym", sym_text, "sum | max | single")->capture_default_str()->check(kSymChoices);
  add_common(w2v_pmi, false);

  // eval
  auto* eval = app.add_subcommand("eval", "Score predicted trees against gold");
  std::string pred_spec, gold_path, model_name;
  std::size_t min_count = 60;
  eval->add_option("--pred", pred_spec, "Tree file, or linear | random | length-matched")->required();
  eval->add_option("--gold", gold_path, "Gold CoNLL-U treebank")->required();
  eval->add_option("--name", model_name, "Model name used in report rows");
  eval->add_option("--min-count", min_count, "Relations need more than this many arcs")
      ->capture_default_str();
  eval->add_flag("--projective", projective, "Projective random baseline (default)");
  eval->add_flag("--mst", mst, "Unrestricted random baseline");
  eval->add_flag("--exclude-punct", exclude_punct, "Drop arcs touching punctuation");
  eval->add_flag("--strict", strict, "Abort on the first malformed sentence");
  add_common(eval, true);

  // report
  auto* report = app.add_subcommand("report", "Compare several models: metrics, Jaccard, pseudo-perplexity");
  std::vector<std::string> pred_specs, score_specs;
  report->add_option("--gold", gold_path, "Gold CoNLL-U treebank")->required();
  report->add_option("--pred", pred_specs, "name=trees.tsv (repeatable)")->required();
  report->add_option("--scores", score_specs, "name=scores.jsonl for pseudo-perplexity (repeatable)");
  report->add_flag("--exclude-punct", exclude_punct, "Drop arcs touching punctuation");
  report->add_flag("--strict", strict, "Abort on the first malformed sentence");
  add_common(report, false);

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Exactly solvable synthetic languages");
  oracle->require_subcommand(1);
  auto* oracle_gen = oracle->add_subcommand("gen", "Generate a synthetic language");
  std::string lang_kind = "random";
  int vocab_size = 4, length = 4;
  oracle_gen->add_option("--kind", lang_kind, "random | product | l0")->capture_default_str();
  oracle_gen->add_option("--vocab", vocab_size)->capture_default_str();
  oracle_gen->add_option("--length", length)->capture_default_str();
  add_common(oracle_gen, true);
  auto* oracle_verify = oracle->add_subcommand("verify", "Max-PMI vs max-conditional equivalence");
  std::string lang_path;
  oracle_verify->add_option("--lang", lang_path, "Language file (.lang.json)")->required();
  add_common(oracle_verify, false);
  auto* oracle_score = oracle->add_subcommand("score", "Exact score records for every sentence");
  bool ltor = false;
  oracle_score->add_option("--lang", lang_path, "Language file (.lang.json)")->required();
  oracle_score->add_flag("--ltor", ltor, "Left-to-right (prefix) conditioning");
  add_common(oracle_score, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << "run 'cpmi --help' for usage\n";
    return 2;
  }
  if (projective && mst) {
    err << "usage error: --projective and --mst are exclusive\n";
    return 2;
  }
  const bool use_projective = !mst;

  try {
    if (stats->parsed()) {
      RunContext ctx("treebank stats", common, out, err);
      ctx.input("corpus", corpus_path);
      ctx.set("exclude_punct", exclude_punct);
      auto corpus = read_corpus(corpus_path, strict, err);
      std::vector<UndirectedTree> gold;
      std::size_t tokens = 0;
      for (const auto& s : corpus) {
        tokens += static_cast<std::size_t>(s.size());
        gold.push_back(exclude_punct ? without_punctuation(gold_edges(s), s) : gold_edges(s));
      }
      auto hist = length_histogram(gold);
      ordered_json j = {{"config_hash", ctx.config_hash()},
                        {"sentences", corpus.size()},
                        {"tokens", tokens},
                        {"gold_arcs", hist.total},
                        {"gold_len1_fraction", hist.fraction_at(1)}};
      ctx.write("stats.json", j.dump(2) + "\n");
      ctx.write("hist.csv", histogram_csv(ctx, hist));
      out << "sentences=" << corpus.size() << " tokens=" << tokens
          << " gold_len1_fraction=" << fmt_double(hist.fraction_at(1)) << "\n";
      ctx.finish();
      return 0;
    }

    if (validate->parsed()) {
      RunContext ctx("validate-scores", common, out, err);
      ctx.input("scores", scores_path);
      auto entries = load_score_file(scores_path);
      ordered_json problems = ordered_json::array();
      for (const auto& e : entries) {
        for (const auto& v : validate_record(e.record)) {
          problems.push_back({{"sentence_id", e.record.sentence_id}, {"code", v.code}, {"detail", v.detail}});
        }
      }
      ordered_json j = {{"config_hash", ctx.config_hash()},
                        {"records", entries.size()},
                        {"violations", problems}};
      ctx.write("validation.json", j.dump(2) + "\n");
      ctx.finish();
      out << entries.size() << " records, " << problems.size() << " violations\n";
      return problems.empty() ? 0 : 1;
    }

    if (build->parsed()) {
      RunContext ctx("build-matrix", common, out, err);
      ctx.input("scores", scores_path);
      const auto sym = parse_symmetrization(sym_text);
      const auto variant = parse_variant(variant_text);
      ctx.set("symmetrization", to_string(sym));
      ctx.set("variant", to_string(variant));
      auto matrices = matrices_from_scores(load_score_file(scores_path), sym, variant, ctx.threads());
      std::string body;
      for (const auto& m : matrices) body += matrix_to_json_line(m, ctx.config_hash()) + "\n";
      ctx.write("matrices.cpmi-matrix.jsonl", body);
      ctx.finish();
      return 0;
    }

    if (decode->parsed()) {
      if (scores_path.empty() == matrices_path.empty()) {
        err << "usage error: decode needs exactly one of --scores or --matrices\n";
        return 2;
      }
      RunContext ctx("decode", common, out, err);
      std::vector<CpmiMatrix> matrices;
      ctx.set("decoder", use_projective ? "projective" : "mst");
      if (!scores_path.empty()) {
        ctx.input("scores", scores_path);
        const auto sym = parse_symmetrization(sym_text);
        const auto variant = parse_variant(variant_text);
        ctx.set("symmetrization", to_string(sym));
        ctx.set("variant", to_string(variant));
        matrices = matrices_from_scores(load_score_file(scores_path), sym, variant, ctx.threads());
      } else {
        ctx.input("matrices", matrices_path);
        matrices = load_matrix_file(matrices_path);
      }
      std::vector<DecodedTree> trees(matrices.size());
      parallel_for(matrices.size(), ctx.threads(), [&](std::size_t k) {
        trees[k] = use_projective ? eisner_projective(matrices[k]) : max_spanning_tree(matrices[k]);
      });
      std::string body = ctx.header();
      ordered_json scores = ordered_json::array();
      for (const auto& t : trees) {
        body += tree_line(t.sentence_id, t.tree.edges) + "\n";
        scores.push_back({{"sentence_id", t.sentence_id},
                          {"total_score", t.total_score},
                          {"decoder", to_string(t.decoder)},
                          {"tie_break_trace", t.tie_break_trace}});
      }
      ctx.write("trees.tsv", body);
      ctx.write("trees.json", ordered_json{{"config_hash", ctx.config_hash()}, {"trees", scores}}.dump(2) + "\n");
      ctx.finish();
      return 0;
    }

    if (baseline->parsed()) {
      RunContext ctx("baseline", common, out, err);
      ctx.input("corpus", corpus_path);
      ctx.set("kind", kind);
      if (kind == "random") ctx.set("decoder", use_projective ? "projective" : "mst");
      auto corpus = read_corpus(corpus_path, strict, err);
      auto trees = corpus_baseline(corpus, kind, use_projective, ctx.seed(), ctx.threads());
      std::vector<std::string> ids;
      for (const auto& s : corpus) ids.push_back(s.id);
      ctx.write("trees.tsv", trees_tsv(ctx, ids, trees));
      ctx.finish();
      return 0;
    }

    if (w2v_train->parsed()) {
      RunContext ctx("w2v train", common, out, err);
      ctx.input("corpus", corpus_path);
      sgns.seed = ctx.seed();
      ctx.set("format", corpus_format);
      ctx.set("dim", sgns.dim);
      ctx.set("window", sgns.window);
      ctx.set("negative", sgns.negatives);
      ctx.set("epochs", sgns.epochs);
      ctx.set("lr", sgns.learning_rate);
      ctx.set("subsample", sgns.subsample);
      std::vector<std::vector<std::string>> sentences;
      if (corpus_format == "text") {
        sentences = read_text_corpus(corpus_path);
      } else if (corpus_format == "conllu") {
        for (auto& s : read_corpus(corpus_path, false, err)) sentences.push_back(std::move(s.tokens));
      } else {
        throw Error("unknown corpus format '" + corpus_format + "'");
      }
      auto table = train_sgns(sentences, sgns);
      ctx.write_binary("embeddings.bin", [&](std::ostream& o) { save_embeddings(o, table); });
      ctx.finish();
      out << "vocabulary=" << table.size() << " dim=" << table.dim << "\n";
      return 0;
    }

    if (w2v_pmi->parsed()) {
      RunContext ctx("w2v pmi", common, out, err);
      ctx.input("embeddings", embeddings_path);
      ctx.input("corpus", corpus_path);
      const auto sym = parse_symmetrization(sym_text);
      ctx.set("symmetrization", to_string(sym));
      auto table = load_embeddings(embeddings_path);
      auto corpus = read_corpus(corpus_path, false, err);
      std::vector<CpmiMatrix> matrices(corpus.size());
      parallel_for(corpus.size(), ctx.threads(), [&](std::size_t k) {
        matrices[k] = pmi_matrix(corpus[k], table, sym);
      });
      std::string body;
      for (const auto& m : matrices) body += matrix_to_json_line(m, ctx.config_hash()) + "\n";
      ctx.write("matrices.cpmi-matrix.jsonl", body);
      ctx.finish();
      return 0;
    }

    if (eval->parsed()) {
      RunContext ctx("eval", common, out, err);
      ctx.input("gold", gold_path);
      const bool builtin = pred_spec == "linear" || pred_spec == "random" || pred_spec == "length-matched";
      if (builtin) {
        ctx.set("baseline", pred_spec);
        if (pred_spec == "random") ctx.set("decoder", use_projective ? "projective" : "mst");
      } else {
        ctx.input("pred", pred_spec);
      }
      ctx.set("exclude_punct", exclude_punct);
      ctx.set("min_count", min_count);
      const std::string name = !model_name.empty() ? model_name
                               : builtin           ? pred_spec
                                                   : fs::path(pred_spec).stem().string();
      ctx.set("name", name);
      auto gold = read_corpus(gold_path, strict, err);
      std::vector<UndirectedTree> preds =
          builtin ? corpus_baseline(gold, pred_spec, use_projective, ctx.seed(), ctx.threads())
                  : align_predictions(load_tree_lines(pred_spec), gold);
      EvalOptions options;
      options.exclude_punct = exclude_punct;
      options.relation_min_count = min_count;
      auto r = evaluate(preds, gold, options);
      std::string csv = ctx.header() + "model,metric,value\n";
      add_metric_rows(csv, name, r);
      ctx.write("report.csv", csv);
      json j = report_json(r);
      j["model"] = name;
      j["config_hash"] = ctx.config_hash();
      j["seed"] = ctx.seed();
      ctx.write("report.json", j.dump(2) + "\n");
      ctx.write("hist.csv", histogram_csv(ctx, r.pred_histogram));
      ctx.write("gold_hist.csv", histogram_csv(ctx, r.gold_histogram));
      ctx.write("relations.csv", relations_csv(ctx, r));
      out << name << " uuas=" << fmt_double(r.mean_uuas) << "\n";
      ctx.finish();
      return 0;
    }

    if (report->parsed()) {
      RunContext ctx("report", common, out, err);
      ctx.input("gold", gold_path);
      ctx.set("exclude_punct", exclude_punct);
      auto gold = read_corpus(gold_path, strict, err);
      std::map<std::string, std::string> score_files;
      for (const auto& spec : score_specs) {
        auto [name, path] = split_named(spec);
        ctx.input("scores:" + name, path);
        score_files[name] = path;
      }
      std::vector<std::string> names;
      std::vector<std::vector<UndirectedTree>> all_preds;
      for (const auto& spec : pred_specs) {
        auto [name, path] = split_named(spec);
        ctx.input("pred:" + name, path);
        names.push_back(name);
        all_preds.push_back(align_predictions(load_tree_lines(path), gold));
      }
      EvalOptions options;
      options.exclude_punct = exclude_punct;
      std::string csv = ctx.header() + "model,metric,value\n";
      ordered_json models = ordered_json::object();
      std::vector<EvalReport> reports;
      for (std::size_t m = 0; m < names.size(); ++m) {
        reports.push_back(evaluate(all_preds[m], gold, options));
        add_metric_rows(csv, names[m], reports.back());
        models[names[m]] = report_json(reports.back());
      }
      // Pseudo-perplexity against accuracy, per model with scores.
      ordered_json ppl = ordered_json::object();
      for (std::size_t m = 0; m < names.size(); ++m) {
        auto it = score_files.find(names[m]);
        if (it == score_files.end()) continue;
        std::map<std::string, double> log_ppl;
        for (const auto& e : load_score_file(it->second)) {
          if (e.record.mode == ScoreMode::bidirectional && !e.is_pos) {
            log_ppl[e.record.sentence_id] = std::log(pseudo_perplexity(e.record));
          }
        }
        std::vector<PplPoint> points;
        const auto& r = reports[m];
        for (std::size_t k = 0; k < r.sentence_ids.size(); ++k) {
          auto p = log_ppl.find(r.sentence_ids[k]);
          if (p != log_ppl.end()) points.push_back({p->second, r.per_sentence_uuas[k]});
        }
        if (points.size() < 3) {
          err << "model " << names[m] << ": fewer than 3 sentences with pseudo-perplexity, no fit\n";
          continue;
        }
        auto fit = ppl_accuracy_correlation(points);
        csv += names[m] + ",ppl_uuas_slope," + fmt_double(fit.slope) + "\n";
        csv += names[m] + ",ppl_uuas_intercept," + fmt_double(fit.intercept) + "\n";
        csv += names[m] + ",ppl_uuas_r2," + fmt_double(fit.r_squared) + "\n";
        ppl[names[m]] = {{"points", points.size()}, {"slope", fit.slope},
                         {"intercept", fit.intercept}, {"r_squared", fit.r_squared}};
      }
      // Pairwise Jaccard over (sentence, edge) sets.
      std::vector<std::set<CorpusEdge>> edge_sets(names.size());
      for (std::size_t m = 0; m < names.size(); ++m) {
        for (std::size_t k = 0; k < gold.size(); ++k) {
          for (const Edge& e : all_preds[m][k].edges) edge_sets[m].insert({gold[k].id, e.lo, e.hi});
        }
      }
      std::string jac = ctx.header() + "model_a,model_b,jaccard\n";
      ordered_json jac_json = ordered_json::array();
      for (std::size_t a = 0; a < names.size(); ++a) {
        for (std::size_t b = a + 1; b < names.size(); ++b) {
          const double v = jaccard_similarity(edge_sets[a], edge_sets[b]);
          jac += names[a] + "," + names[b] + "," + fmt_double(v) + "\n";
          jac_json.push_back({{"a", names[a]}, {"b", names[b]}, {"jaccard", v}});
        }
      }
      ctx.write("report.csv", csv);
      ctx.write("jaccard.csv", jac);
      ordered_json j = {{"config_hash", ctx.config_hash()}, {"models", models},
                        {"pseudo_perplexity_fit", ppl}, {"jaccard", jac_json}};
      ctx.write("report.json", j.dump(2) + "\n");
      ctx.finish();
      return 0;
    }

    if (oracle_gen->parsed()) {
      RunContext ctx("oracle gen", common, out, err);
      ctx.set("kind", lang_kind);
      ctx.set("vocab", vocab_size);
      ctx.set("length", length);
      SyntheticLanguage lang;
      if (lang_kind == "l0") {
        lang = language_l0();
      } else if (lang_kind == "random") {
        lang = random_language(vocab_size, length, ctx.seed());
      } else if (lang_kind == "product") {
        lang = product_language(vocab_size, length, ctx.seed());
      } else {
        throw Error("unknown language kind '" + lang_kind + "'");
      }
      json j = language_to_json(lang);
      j["config_hash"] = ctx.config_hash();
      ctx.write("language.lang.json", j.dump(2) + "\n");
      ctx.finish();
      return 0;
    }

    if (oracle_verify->parsed()) {
      RunContext ctx("oracle verify", common, out, err);
      ctx.input("lang", lang_path);
      auto lang = load_language(lang_path);
      auto r = verify_equivalence(lang);
      json j = equivalence_to_json(lang, r);
      j["config_hash"] = ctx.config_hash();
      ctx.write("equivalence.json", j.dump(2) + "\n");
      ctx.finish();
      out << r.coincident << "/" << r.sentences.size() << " sentences with coincident argmax sets"
          << (r.assumption_holds ? "" : " (tree-independence assumption violated)") << "\n";
      // Coincidence is guaranteed when the assumption holds; anything else is a fault.
      return (r.assumption_holds && !r.all_coincident()) ? 1 : 0;
    }

    if (oracle_score->parsed()) {
      RunContext ctx("oracle score", common, out, err);
      ctx.input("lang", lang_path);
      ctx.set("mode", ltor ? "left_to_right" : "bidirectional");
      auto lang = load_language(lang_path);
      std::vector<ScoreFileEntry> entries(lang.entries.size());
      parallel_for(lang.entries.size(), ctx.threads(), [&](std::size_t k) {
        const auto& s = lang.entries[k].symbols;
        std::string id;
        for (const auto& w : lang.decode(s)) id += (id.empty() ? "" : "_") + w;
        if (lang.entries[k].prob > 0.0) {
          entries[k].record = ltor ? exact_ltor_record(lang, s, id) : exact_record(lang, s, id);
        }
      });
      std::string body;
      for (const auto& e : entries) {
        if (e.record.n > 0) body += record_to_json_line(e.record) + "\n";
      }
      ctx.write("scores.cpmi-scores.jsonl", body);
      ctx.finish();
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << "usage error: no command given\n";
  return 2;
}

}  // namespace cpmi
