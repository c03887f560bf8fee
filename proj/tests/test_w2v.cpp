#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <sstream>

#include "cpmi/decode.hpp"
#include "cpmi/rng.hpp"
#include "cpmi/w2v.hpp"

using namespace cpmi;

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t k = 0; k < order.size();) {
    std::size_t e = k;
    while (e + 1 < order.size() && v[order[e + 1]] == v[order[k]]) ++e;
    for (std::size_t t = k; t <= e; ++t) r[order[t]] = (k + e) / 2.0;
    k = e + 1;
  }
  return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += rx[k] / n;
    my += ry[k] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (rx[k] - mx) * (ry[k] - my);
    sxx += (rx[k] - mx) * (rx[k] - mx);
    syy += (ry[k] - my) * (ry[k] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

std::vector<std::vector<std::string>> toy_corpus() {
  return {{"the", "cat", "sat"}, {"the", "dog", "ran"}, {"a", "cat", "ran"}};
}

Sentence sentence_of(std::vector<std::string> tokens) {
  Sentence s;
  s.id = "x";
  s.tokens = std::move(tokens);
  s.heads.assign(s.tokens.size(), 0);
  s.relations.assign(s.tokens.size(), "dep");
  return s;
}

}  // namespace

TEST_CASE("training preconditions") {
  SgnsConfig cfg;
  CHECK_THROWS_AS(train_sgns({}, cfg), Error);
  CHECK_THROWS_AS(train_sgns({{}, {}}, cfg), Error);
  CHECK_THROWS_AS(train_sgns({{"x", "x", "x"}}, cfg), Error);
  cfg.dim = 1;
  CHECK_THROWS_AS(train_sgns(toy_corpus(), cfg), Error);
}

TEST_CASE("training is bit-reproducible") {
  SgnsConfig cfg;
  cfg.dim = 2;
  cfg.epochs = 1;
  cfg.seed = 17;
  auto a = train_sgns(toy_corpus(), cfg);
  auto b = train_sgns(toy_corpus(), cfg);
  CHECK(a.vocabulary == b.vocabulary);
  CHECK(std::memcmp(a.target.data(), b.target.data(), a.target.size() * sizeof(float)) == 0);
  CHECK(std::memcmp(a.context.data(), b.context.data(), a.context.size() * sizeof(float)) == 0);
  cfg.seed = 18;
  CHECK(train_sgns(toy_corpus(), cfg).target != a.target);
  // Frequency order, ties alphabetical.
  CHECK(a.vocabulary == std::vector<std::string>{"cat", "ran", "the", "a", "dog", "sat"});
}

TEST_CASE("table invariants and file round trip") {
  SgnsConfig cfg;
  cfg.dim = 8;
  cfg.epochs = 3;
  cfg.negatives = 3;
  cfg.window = 2;
  auto e = train_sgns(toy_corpus(), cfg);
  CHECK(e.target.size() == e.context.size());
  CHECK(e.target.size() == e.size() * 8);
  for (float x : e.target) CHECK(std::isfinite(x));
  for (std::size_t k = 0; k < 8; ++k) {
    double t = 0.0;
    for (std::size_t w = 0; w < e.size(); ++w) t += e.target[w * 8 + k];
    CHECK(e.unk_target[k] == doctest::Approx(t / e.size()));
  }

  std::stringstream buf;
  save_embeddings(buf, e);
  auto back = load_embeddings(buf);
  CHECK(back.vocabulary == e.vocabulary);
  CHECK(back.target == e.target);
  CHECK(back.context == e.context);
  CHECK(back.config.negatives == 3);
  CHECK(back.config.window == 2);
  CHECK(back.unk_context == e.unk_context);

  std::stringstream bad("NOTMAGIC");
  CHECK_THROWS_AS(load_embeddings(bad), Error);
  std::string truncated = buf.str().substr(0, 40);
  std::stringstream cut(truncated);
  CHECK_THROWS_AS(load_embeddings(cut), Error);
}

TEST_CASE("pmi matrix") {
  SgnsConfig cfg;
  cfg.dim = 4;
  cfg.epochs = 2;
  auto e = train_sgns(toy_corpus(), cfg);
  auto s = sentence_of({"the", "zebra", "the"});
  auto m = pmi_matrix(s, e);
  CHECK(m.variant == Variant::signed_score);
  CHECK(m.is_symmetric());
  const double unk = pmi_estimate(e, "the", "zebra") + pmi_estimate(e, "zebra", "the");
  double manual = 0.0;
  for (int k = 0; k < 4; ++k)
    manual += static_cast<double>(e.target_row("the")[k]) * e.unk_context[k] +
              static_cast<double>(e.unk_target[k]) * e.context_row("the")[k];
  CHECK(m.at(1, 2) == doctest::Approx(manual));
  CHECK(m.at(1, 2) == unk);
  CHECK(m.at(1, 3) == 2.0 * pmi_estimate(e, "the", "the"));
  CHECK_THROWS_WITH(pmi_matrix(s, e, Symmetrization::sum, Variant::absolute), doctest::Contains("log k"));
}

TEST_CASE("decoded w2v trees ignore the -log k shift") {
  SgnsConfig cfg;
  cfg.dim = 6;
  cfg.epochs = 3;
  auto e = train_sgns(toy_corpus(), cfg);
  auto m = pmi_matrix(sentence_of({"the", "cat", "sat", "a", "dog", "ran"}), e);
  for (double c : {std::log(5.0), -std::log(5.0), 10.0}) {
    CHECK(eisner_projective(shifted(m, c)).tree.edges == eisner_projective(m).tree.edges);
    CHECK(max_spanning_tree(shifted(m, c)).tree.edges == max_spanning_tree(m).tree.edges);
  }
}

TEST_CASE("planted collocations outrank independent pairs") {
  // Two interleaved independent streams over disjoint alphabets; pairs
  // (p_k, q_k) are planted next to each other.
  CounterRng rng(12);
  std::vector<std::vector<std::string>> corpus;
  for (int s = 0; s < 600; ++s) {
    std::vector<std::string> sent;
    for (int t = 0; t < 10; ++t) {
      if (rng.below(5) == 0) {
        const auto k = std::to_string(rng.below(4));
        sent.push_back("p" + k);
        sent.push_back("q" + k);
      } else {
        sent.push_back((t % 2 ? "a" : "b") + std::to_string(rng.below(8)));
      }
    }
    corpus.push_back(sent);
  }
  SgnsConfig cfg;
  cfg.dim = 16;
  cfg.window = 1;
  cfg.epochs = 10;
  auto e = train_sgns(corpus, cfg);
  std::vector<double> background;
  for (int x = 0; x < 8; ++x)
    for (int y = 0; y < 8; ++y)
      background.push_back(pmi_estimate(e, "a" + std::to_string(x), "b" + std::to_string(y)));
  std::sort(background.begin(), background.end());
  const double p90 = background[background.size() * 9 / 10];
  for (int k = 0; k < 4; ++k) {
    const auto kk = std::to_string(k);
    CHECK(pmi_estimate(e, "p" + kk, "q" + kk) > p90);
  }
}

TEST_CASE("dot products track true PMI of a bigram source") {
  // Markov chain over 8 symbols; with window 1 the true co-occurrence PMI of
  // (x, y) is log(((pi_x P_xy + pi_y P_yx) / 2) / (pi_x pi_y)).
  const int V = 8;
  CounterRng rng(99);
  std::vector<std::vector<double>> P(V, std::vector<double>(V));
  for (auto& row : P) {
    double z = 0.0;
    for (double& p : row) {
      p = std::pow(rng.uniform(), 3.0) + 0.02;
      z += p;
    }
    for (double& p : row) p /= z;
  }
  std::vector<double> pi(V, 1.0 / V);
  for (int it = 0; it < 500; ++it) {
    std::vector<double> next(V, 0.0);
    for (int x = 0; x < V; ++x)
      for (int y = 0; y < V; ++y) next[y] += pi[x] * P[x][y];
    pi = next;
  }
  auto name = [](int x) { return "s" + std::to_string(x); };
  std::vector<std::vector<std::string>> corpus;
  int state = 0;
  for (int s = 0; s < 2000; ++s) {
    std::vector<std::string> sent;
    for (int t = 0; t < 20; ++t) {
      double u = rng.uniform(), acc = 0.0;
      int next = V - 1;
      for (int y = 0; y < V; ++y) {
        acc += P[state][y];
        if (u < acc) {
          next = y;
          break;
        }
      }
      state = next;
      sent.push_back(name(state));
    }
    corpus.push_back(sent);
  }
  SgnsConfig cfg;
  cfg.dim = 16;
  cfg.window = 1;
  cfg.negatives = 5;
  cfg.epochs = 10;
  auto e = train_sgns(corpus, cfg);
  std::vector<double> truth, estimate;
  for (int x = 0; x < V; ++x)
    for (int y = 0; y < V; ++y) {
      const double joint = (pi[x] * P[x][y] + pi[y] * P[y][x]) / 2.0;
      if (joint * 20 * 2000 < 100) continue;  // frequent pairs only
      truth.push_back(std::log(joint / (pi[x] * pi[y])));
      estimate.push_back(pmi_estimate(e, name(x), name(y)));
    }
  REQUIRE(truth.size() >= 20);
  const double rho = spearman(truth, estimate);
  MESSAGE("spearman = " << rho << " over " << truth.size() << " pairs");
  CHECK(rho >= 0.6);
}
