#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cpmi/matrix.hpp"
#include "cpmi/oracle.hpp"
#include "cpmi/rng.hpp"

using namespace cpmi;

namespace {

// Record with base = 0 so that cpmi(i; j) = -drop(i, j).
ScoreRecord record_from_cpmi(int n, const std::vector<std::tuple<int, int, double>>& cpmi, ScoreMode mode) {
  auto r = ScoreRecord::empty("s", n, mode);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      if (i != j && (mode == ScoreMode::bidirectional || j < i)) r.drop(i, j) = 0.0;
  for (auto [i, j, v] : cpmi) r.drop(i, j) = -v;
  return r;
}

ScoreRecord random_record(CounterRng& rng, int n) {
  auto r = ScoreRecord::empty("r", n, ScoreMode::bidirectional);
  for (auto& b : r.base_loglik) b = -5.0 * rng.uniform();
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      if (i != j) r.drop(i, j) = -5.0 * rng.uniform();
  return r;
}

}  // namespace

TEST_CASE("build_matrix combines both directions") {
  auto r = record_from_cpmi(2, {{1, 2, 0.5}, {2, 1, 0.3}}, ScoreMode::bidirectional);
  auto m = build_matrix(r, Symmetrization::sum, Variant::signed_score);
  CHECK(m.at(1, 2) == doctest::Approx(0.8));
  CHECK(m.at(2, 1) == m.at(1, 2));
  CHECK(m.at(1, 1) == kNoSelfEdge);

  auto r2 = record_from_cpmi(2, {{1, 2, -0.5}, {2, 1, 0.3}}, ScoreMode::bidirectional);
  CHECK(build_matrix(r2, Symmetrization::sum, Variant::absolute).at(1, 2) == doctest::Approx(0.2));
  CHECK(build_matrix(r2, Symmetrization::max, Variant::signed_score).at(1, 2) == doctest::Approx(0.3));
  CHECK(build_matrix(r2, Symmetrization::single_direction, Variant::signed_score).at(1, 2) ==
        doctest::Approx(-0.5));
  CHECK(build_matrix(r2, Symmetrization::single_direction, Variant::absolute).at(1, 2) == doctest::Approx(0.5));
}

TEST_CASE("defaults are sum and absolute") {
  auto r = record_from_cpmi(2, {{1, 2, -0.5}, {2, 1, -0.25}}, ScoreMode::bidirectional);
  auto m = build_matrix(r);
  CHECK(m.symmetrization == Symmetrization::sum);
  CHECK(m.variant == Variant::absolute);
  CHECK(m.at(1, 2) == doctest::Approx(0.75));
}

TEST_CASE("build_matrix on L0 equals the two enumerated directions") {
  auto l0 = language_l0();
  auto m = build_matrix(exact_record(l0, l0.encode({"a", "b"})), Symmetrization::sum, Variant::signed_score);
  // cpmi(1;2) = log(1 / .75), cpmi(2;1) = log((2/3) / .5); both log(4/3).
  CHECK(std::fabs(m.at(1, 2) - 2.0 * std::log(4.0 / 3.0)) < 1e-12);
}

TEST_CASE("mode routing errors") {
  auto ltor = record_from_cpmi(2, {{2, 1, 0.4}}, ScoreMode::left_to_right);
  CHECK_THROWS_WITH(build_matrix(ltor), doctest::Contains("build_ltor_matrix"));
  auto bi = record_from_cpmi(2, {}, ScoreMode::bidirectional);
  CHECK_THROWS_AS(build_ltor_matrix(bi), Error);
}

TEST_CASE("build_ltor_matrix mirrors the single direction") {
  auto r = record_from_cpmi(3, {{2, 1, 0.4}, {3, 1, 0.1}, {3, 2, 0.7}}, ScoreMode::left_to_right);
  auto m = build_ltor_matrix(r, Variant::signed_score);
  CHECK(m.at(1, 2) == doctest::Approx(0.4));
  CHECK(m.at(1, 3) == doctest::Approx(0.1));
  CHECK(m.at(2, 3) == doctest::Approx(0.7));
  CHECK(m.is_symmetric());
  CHECK(m.source.find("mirrored") != std::string::npos);

  auto neg = record_from_cpmi(2, {{2, 1, -0.4}}, ScoreMode::left_to_right);
  CHECK(build_ltor_matrix(neg, Variant::absolute).at(1, 2) == doctest::Approx(0.4));
}

TEST_CASE("left-to-right oracle equals the bidirectional (i > j) direction for two-word languages") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto lang = random_language(3, 2, seed);
    for (const auto& e : lang.entries) {
      auto bi = exact_record(lang, e.symbols);
      auto lr = exact_ltor_record(lang, e.symbols);
      CHECK(std::fabs(cpmi_pair(bi, 2, 1) - cpmi_pair(lr, 2, 1)) < 1e-12);
      auto m = build_ltor_matrix(lr, Variant::signed_score);
      CHECK(std::fabs(m.at(1, 2) - cpmi_pair(bi, 2, 1)) < 1e-12);
    }
  }
}

TEST_CASE("POS matrices") {
  SUBCASE("zero-information probe gives an all-zero matrix") {
    auto r = ScoreRecord::empty("p", 4, ScoreMode::bidirectional);
    r.base_loglik = {-1.0, -0.5, -2.0, -0.1};
    for (int i = 1; i <= 4; ++i)
      for (int j = 1; j <= 4; ++j)
        if (i != j) r.drop(i, j) = r.base(i);
    auto m = build_pos_matrix(PosScoreRecord{r});
    for (double v : m.score) CHECK(v == 0.0);
  }
  SUBCASE("mirror of the word example") {
    auto r = record_from_cpmi(2, {{1, 2, 0.5}, {2, 1, 0.3}}, ScoreMode::bidirectional);
    CHECK(build_pos_matrix(PosScoreRecord{r}, Symmetrization::sum, Variant::signed_score).at(1, 2) ==
          doctest::Approx(0.8));
  }
  SUBCASE("tag = word identity reproduces the word record") {
    auto lang = random_language(3, 3, 5);
    std::vector<std::string> identity = lang.vocab;
    for (const auto& e : lang.entries) {
      auto word = build_matrix(exact_record(lang, e.symbols));
      auto pos = build_pos_matrix(exact_pos_record(lang, e.symbols, identity));
      for (std::size_t k = 0; k < word.score.size(); ++k) CHECK(pos.score[k] == word.score[k]);
    }
  }
}

TEST_CASE("matrix properties over random records") {
  CounterRng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(6));
    auto r = random_record(rng, n);
    for (auto sym : {Symmetrization::sum, Symmetrization::max, Symmetrization::single_direction}) {
      auto s = build_matrix(r, sym, Variant::signed_score);
      auto a = build_matrix(r, sym, Variant::absolute);
      CHECK(s.is_symmetric());
      CHECK(a.is_symmetric());
      for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
          if (i != j) {
            CHECK(a.at(i, j) == std::fabs(s.at(i, j)));
            CHECK(a.at(i, j) >= 0.0);
          }
    }
    // Scaling every log-likelihood gap by a power of two scales the sum matrix exactly.
    auto scaled = r;
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j)
        if (i != j) *scaled.drop(i, j) = r.base(i) - 4.0 * (r.base(i) - *r.drop(i, j));
    auto base_m = build_matrix(r, Symmetrization::sum, Variant::signed_score);
    auto scaled_m = build_matrix(scaled, Symmetrization::sum, Variant::signed_score);
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j) CHECK(scaled_m.at(i, j) == doctest::Approx(4.0 * base_m.at(i, j)).epsilon(1e-12));
  }
}

TEST_CASE("matrix JSON lines round trip") {
  CounterRng rng(3);
  auto m = build_matrix(random_record(rng, 5), Symmetrization::max, Variant::signed_score);
  auto back = matrix_from_json_line(matrix_to_json_line(m, "abc"));
  CHECK(back.score == m.score);
  CHECK(back.variant == m.variant);
  CHECK(back.symmetrization == m.symmetrization);
  CHECK(back.source == m.source);
}
