#include <doctest.h>

#include <algorithm>

#include <json.hpp>

#include "cli_util.hpp"
#include "cpmi/decode.hpp"
#include "cpmi/scores.hpp"

using namespace clitest;

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).status == 2);
  CHECK(run({"bogus"}).status == 2);
  CHECK(run({"decode", "--nonsense"}).status == 2);
  CHECK(run({"decode", "--scores", data("sample.cpmi-scores.jsonl"), "--matrices", "x"}).status == 2);
  CHECK(run({"decode"}).status == 2);
  auto dir = scratch("usage");
  CHECK(run({"decode", "--scores", data("sample.cpmi-scores.jsonl"), "--projective", "--mst", "--out",
             dir.string()})
            .status == 2);
  CHECK(run({"decode", "--scores", data("sample.cpmi-scores.jsonl"), "--sym", "median", "--out", dir.string()})
            .status == 2);
}

TEST_CASE("data errors exit with 1") {
  auto dir = scratch("data-errors");
  auto r = run({"decode", "--scores", (dir / "missing.jsonl").string(), "--out", (dir / "o").string()});
  CHECK(r.status == 1);
  CHECK(r.err.find("missing.jsonl") != std::string::npos);

  auto bad = dir / "bad.cpmi-scores.jsonl";
  std::ofstream(bad) << R"({"v":1,"sentence_id":"s","n":2,"mode":"bidirectional","target":"word",)"
                     << R"("base_loglik":[-1,-1],"drop_loglik":[[-1,-2],[-2,null]],"provenance":"x"})" << "\n";
  auto v = run({"validate-scores", "--scores", bad.string(), "--out", (dir / "v").string()});
  CHECK(v.status == 1);
  auto report = nlohmann::json::parse(slurp(dir / "v" / "validation.json"));
  CHECK(report.dump().find("diagonal_defined") != std::string::npos);
}

TEST_CASE("decode on the bundled sample writes trees and a manifest") {
  auto dir = scratch("decode");
  auto r = run({"decode", "--scores", data("sample.cpmi-scores.jsonl"), "--projective", "--variant", "abs", "--sym",
                "sum", "--out", dir.string()});
  REQUIRE(r.status == 0);
  auto trees = cpmi::load_tree_lines((dir / "trees.tsv").string());
  CHECK(trees.size() == 14);
  for (const auto& t : trees) {
    int n = 0;
    for (const auto& e : t.edges) n = std::max(n, e.hi);
    if (!t.edges.empty()) CHECK(cpmi::UndirectedTree(n, t.edges).is_projective());
  }
  auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["command"] == "decode");
  CHECK(manifest["seed"] == 42);
  CHECK(manifest["config_hash"].get<std::string>().size() == 64);
  CHECK(manifest["inputs"][0]["sha256"] == cpmi::sha256_file(data("sample.cpmi-scores.jsonl")));
  CHECK(slurp(dir / "trees.tsv").rfind("# config_hash=", 0) == 0);
}

TEST_CASE("oracle verify on L0") {
  auto dir = scratch("verify");
  auto r = run({"oracle", "verify", "--lang", data("l0.lang.json"), "--out", dir.string()});
  CHECK(r.status == 0);
  auto report = nlohmann::json::parse(slurp(dir / "equivalence.json"));
  CHECK(report.dump().find("\"coincident\"") != std::string::npos);
}

TEST_CASE("linear baseline on the released sentence reports 0.5") {
  auto dir = scratch("eval-released");
  auto r = run({"eval", "--pred", "linear", "--gold", data("released.conllu"), "--out", dir.string()});
  REQUIRE(r.status == 0);
  CHECK(slurp(dir / "report.csv").find("linear,uuas,0.5\n") != std::string::npos);
}

TEST_CASE("oracle scores round trip through decode") {
  auto dir = scratch("oracle-pipeline");
  REQUIRE(run({"oracle", "gen", "--kind", "random", "--vocab", "3", "--length", "4", "--seed", "5", "--out",
               (dir / "gen").string()})
              .status == 0);
  REQUIRE(run({"oracle", "score", "--lang", (dir / "gen" / "language.lang.json").string(), "--out",
               (dir / "score").string()})
              .status == 0);
  auto entries = cpmi::load_score_file((dir / "score" / "scores.cpmi-scores.jsonl").string());
  CHECK(entries.size() == 81);
  CHECK(run({"validate-scores", "--scores", (dir / "score" / "scores.cpmi-scores.jsonl").string(), "--out",
             (dir / "v").string()})
            .status == 0);
  CHECK(run({"decode", "--scores", (dir / "score" / "scores.cpmi-scores.jsonl").string(), "--mst", "--out",
             (dir / "d").string()})
            .status == 0);
  REQUIRE(run({"oracle", "score", "--ltor", "--lang", (dir / "gen" / "language.lang.json").string(), "--out",
               (dir / "ltor").string()})
              .status == 0);
  CHECK(run({"decode", "--scores", (dir / "ltor" / "scores.cpmi-scores.jsonl").string(), "--out",
             (dir / "dl").string()})
            .status == 0);
}

TEST_CASE("report compares models") {
  auto dir = scratch("report");
  REQUIRE(run({"decode", "--scores", data("sample.cpmi-scores.jsonl"), "--out", (dir / "a").string()}).status == 0);
  REQUIRE(run({"baseline", "--corpus", data("sample.conllu"), "--kind", "linear", "--out", (dir / "b").string()})
              .status == 0);
  auto r = run({"report", "--gold", data("sample.conllu"), "--pred", "cpmi=" + (dir / "a" / "trees.tsv").string(),
                "--pred", "linear=" + (dir / "b" / "trees.tsv").string(), "--scores",
                "cpmi=" + data("sample.cpmi-scores.jsonl"), "--out", (dir / "r").string()});
  REQUIRE(r.status == 0);
  auto jaccard = slurp(dir / "r" / "jaccard.csv");
  CHECK(jaccard.find("cpmi,linear") != std::string::npos);
}

TEST_CASE("artifacts do not depend on the thread count") {
  auto one = scratch("threads-1");
  auto eight = scratch("threads-8");
  REQUIRE(pipeline(one, "1") == 0);
  REQUIRE(pipeline(eight, "8") == 0);
  auto a = snapshot(one);
  auto b = snapshot(eight);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].first == b[k].first);
    CHECK_MESSAGE(a[k].second == b[k].second, a[k].first);
  }
}
