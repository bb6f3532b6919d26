#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <json.hpp>

#include "dnazen/eval.hpp"
#include "dnazen/training.hpp"
#include "support/testutil.hpp"

using namespace dnazen;

namespace {

eval::ConfusionCounts table(int classes, std::vector<int64_t> cells) {
  auto c = eval::ConfusionCounts::zeros(classes);
  REQUIRE(cells.size() == c.table.size());
  c.table = std::move(cells);
  return c;
}

// Gorodkin's R_K form written as the literal triple sum, as an independent
// check on the marginal-based evaluation.
double mcc_triple_sum(const eval::ConfusionCounts& c) {
  const int k = c.classes;
  double num = 0.0;
  for (int a = 0; a < k; ++a)
    for (int l = 0; l < k; ++l)
      for (int m = 0; m < k; ++m)
        num += static_cast<double>(c.at(a, a)) * c.at(m, l) -
               static_cast<double>(c.at(l, a)) * c.at(a, m);
  double s = 0.0;
  std::vector<double> gold(k, 0.0), pred(k, 0.0);
  for (int g = 0; g < k; ++g)
    for (int p = 0; p < k; ++p) {
      s += c.at(g, p);
      gold[g] += c.at(g, p);
      pred[p] += c.at(g, p);
    }
  double dx = 0.0, dy = 0.0;
  for (int a = 0; a < k; ++a) {
    dx += pred[a] * (s - pred[a]);
    dy += gold[a] * (s - gold[a]);
  }
  if (dx <= 0.0 || dy <= 0.0) return 0.0;
  return num / std::sqrt(dx * dy);
}

bpe::TokenVocab base_vocab() {
  bpe::TokenVocab v;
  v.alphabet = {"A", "C", "G", "T"};
  v.rebuild_index();
  return v;
}

ggram::GGramVocab gvocab_from(std::vector<std::vector<int>> tuples) {
  ggram::GGramVocab v;
  int max_len = 2;
  for (auto& t : tuples) {
    max_len = std::max(max_len, static_cast<int>(t.size()));
    v.entries.push_back({std::move(t), 5});
  }
  v.max_len = max_len;
  v.rebuild_index();
  return v;
}

corpus::LabeledDataset make_split(corpus::Split split,
                                  std::vector<std::pair<std::string, int>> rows,
                                  int classes) {
  corpus::LabeledDataset ds;
  ds.split = split;
  ds.num_classes = classes;
  int i = 0;
  for (auto& [bases, label] : rows)
    ds.records.push_back({{"r" + std::to_string(i++), bases}, label});
  return ds;
}

model::ModelConfig eval_config(int token_vocab, int ggram_vocab) {
  model::ModelConfig c;
  c.hidden = 8;
  c.token_layers = 2;
  c.ggram_layers = 1;
  c.heads = 2;
  c.token_vocab = token_vocab;
  c.ggram_vocab = ggram_vocab;
  c.max_positions = 24;
  c.max_ggrams = 8;
  c.num_classes = 2;
  return c;
}

}  // namespace

TEST_CASE("confusion counts accumulate and validate") {
  auto c = eval::ConfusionCounts::zeros(3);
  c.add(0, 0);
  c.add(0, 2, 4);
  CHECK(c.at(0, 0) == 1);
  CHECK(c.at(0, 2) == 4);
  CHECK(c.total() == 5);
  CHECK_THROWS_AS(c.add(3, 0), ValidationError);
  CHECK_THROWS_AS(c.add(0, -1), ValidationError);
  CHECK_THROWS_AS(eval::ConfusionCounts::zeros(0), ValidationError);
}

TEST_CASE("mcc anchors") {
  CHECK(eval::mcc(table(2, {7, 0, 0, 9})) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eval::mcc(table(3, {4, 0, 0, 0, 4, 0, 0, 0, 4})) == doctest::Approx(1.0));
  // TP=TN=FP=FN=1
  CHECK(eval::mcc(table(2, {1, 1, 1, 1})) == doctest::Approx(0.0));
  // all predictions one class -> degenerate -> 0
  CHECK(eval::mcc(table(2, {5, 0, 3, 0})) == 0.0);
  // all gold one class -> degenerate -> 0
  CHECK(eval::mcc(table(2, {5, 3, 0, 0})) == 0.0);
  // perfect anti-diagonal binary -> -1
  CHECK(eval::mcc(table(2, {0, 4, 4, 0})) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(eval::mcc(table(2, {0, 0, 0, 0})), ValidationError);
  CHECK_THROWS_AS(eval::mcc(eval::ConfusionCounts{}), ValidationError);
}

TEST_CASE("mcc equals the literal covariance triple sum on random tables") {
  Rng rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    const int k = 2 + static_cast<int>(rng.uniform_below(3));
    auto c = eval::ConfusionCounts::zeros(k);
    for (auto& cell : c.table) cell = static_cast<int64_t>(rng.uniform_below(30));
    if (c.total() == 0) c.table[0] = 1;
    CHECK(std::abs(eval::mcc(c) - mcc_triple_sum(c)) < 1e-12);
  }
}

TEST_CASE("mcc is invariant under class permutation and negates under flips") {
  Rng rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    auto c = eval::ConfusionCounts::zeros(3);
    for (auto& cell : c.table) cell = static_cast<int64_t>(rng.uniform_below(20)) + 1;
    std::vector<int> perm{2, 0, 1};
    auto permuted = eval::ConfusionCounts::zeros(3);
    for (int g = 0; g < 3; ++g)
      for (int p = 0; p < 3; ++p) permuted.add(perm[g], perm[p], c.at(g, p));
    CHECK(eval::mcc(c) == doctest::Approx(eval::mcc(permuted)).epsilon(1e-12));
  }
  for (int trial = 0; trial < 30; ++trial) {
    auto c = eval::ConfusionCounts::zeros(2);
    for (auto& cell : c.table) cell = static_cast<int64_t>(rng.uniform_below(20)) + 1;
    auto flipped = eval::ConfusionCounts::zeros(2);
    for (int g = 0; g < 2; ++g)
      for (int p = 0; p < 2; ++p) flipped.add(g, 1 - p, c.at(g, p));
    CHECK(eval::mcc(flipped) == doctest::Approx(-eval::mcc(c)).epsilon(1e-12));
  }
}

TEST_CASE("prepare_example wraps, truncates, and matches") {
  auto tok = base_vocab();
  const int a = tok.id_of("A"), c = tok.id_of("C");
  auto gv = gvocab_from({{a, c}});
  ggram::GGramMatcher matcher(gv);
  corpus::Sequence seq{"s", "ACAC"};
  auto ex = eval::prepare_example(seq, tok, matcher, 24, 8);
  CHECK(ex.token_ids == std::vector<int>{bpe::kCls, a, c, a, c, bpe::kSep});
  REQUIRE(ex.matches.matches.size() == 2);
  CHECK(ex.matches.matches[0].start == 1);
  CHECK(ex.matches.source_len == 6);
  // truncation: max_positions 4 keeps CLS + 2 tokens + SEP
  auto cut = eval::prepare_example(seq, tok, matcher, 4, 8);
  CHECK(cut.token_ids == std::vector<int>{bpe::kCls, a, c, bpe::kSep});
  CHECK_THROWS_AS(eval::prepare_example(seq, tok, matcher, 2, 8), ValidationError);
  // cap: at most one match kept
  auto capped = eval::prepare_example(seq, tok, matcher, 24, 1);
  CHECK(capped.matches.matches.size() == 1);
}

TEST_CASE("a constant-class model scores zero mcc by the degenerate rule") {
  auto tok = base_vocab();
  const int a = tok.id_of("A"), c = tok.id_of("C");
  auto gv = gvocab_from({{a, c}});
  Rng rng(7);
  auto state = model::make_model(eval_config(tok.size(), gv.size()), rng);
  // forcing class 1: zero weights, bias strongly favoring index 1
  std::fill(state.cls_w.values().begin(), state.cls_w.values().end(), 0.0f);
  state.cls_b.values()[0] = 0.0f;
  state.cls_b.values()[1] = 5.0f;
  auto ds = make_split(corpus::Split::test,
                       {{"ACACAC", 0}, {"GTGTGT", 1}, {"ACGTAC", 0}, {"TTTTCC", 1}}, 2);
  std::vector<model::ModelState> models;
  models.push_back(std::move(state));
  auto report = eval::evaluate(models, {}, {&ds, 1}, tok, gv);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].values[0] == 0.0);
  CHECK(report.rows[0].mean == 0.0);
  CHECK(report.rows[0].split == std::string("test"));
}

TEST_CASE("evaluate reports the ggram_stats average and rejects class mismatch") {
  auto tok = base_vocab();
  const int a = tok.id_of("A"), c = tok.id_of("C");
  auto gv = gvocab_from({{a, c}, {c, a}});
  Rng rng(8);
  auto state = model::make_model(eval_config(tok.size(), gv.size()), rng);
  auto ds = make_split(corpus::Split::dev, {{"ACAC", 0}, {"ACACA", 1}, {"GGGG", 0}}, 2);
  std::vector<model::ModelState> models;
  models.push_back(std::move(state));
  auto report = eval::evaluate(models, {}, {&ds, 1}, tok, gv, "toy", "synthetic");
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].avg_ggrams ==
        doctest::Approx(ggram::ggram_stats(ds, tok, gv).avg).epsilon(1e-12));
  CHECK(report.rows[0].task == "toy");
  CHECK(report.rows[0].dataset == "synthetic");

  auto bad = make_split(corpus::Split::dev, {{"ACAC", 0}}, 3);
  CHECK_THROWS_AS(eval::evaluate(models, {}, {&bad, 1}, tok, gv), ValidationError);
  CHECK_THROWS_AS(eval::evaluate({}, {}, {&ds, 1}, tok, gv), ValidationError);
}

TEST_CASE("evaluate leaves the model untouched") {
  auto tok = base_vocab();
  const int a = tok.id_of("A"), c = tok.id_of("C");
  auto gv = gvocab_from({{a, c}});
  Rng rng(9);
  auto state = model::make_model(eval_config(tok.size(), gv.size()), rng);
  std::vector<std::vector<float>> before;
  for (auto& [name, t] : state.named())
    before.emplace_back(t.values().begin(), t.values().end());
  auto ds = make_split(corpus::Split::test, {{"ACACAC", 0}, {"GTGTGT", 1}}, 2);
  std::vector<model::ModelState> models{model::clone(state)};
  eval::evaluate(models, {}, {&ds, 1}, tok, gv);
  std::size_t i = 0;
  for (auto& [name, t] : models[0].named()) {
    CHECK(std::equal(t.values().begin(), t.values().end(), before[i].begin()));
    ++i;
  }
}

TEST_CASE("report serializations carry every row field") {
  eval::EvalReport report;
  eval::ReportRow row;
  row.task = "prom";
  row.dataset = "core";
  row.split = "test";
  row.metric = "mcc-covariance";
  row.seeds = {3, 5};
  row.values = {0.25, 0.75};
  row.mean = 0.5;
  row.avg_ggrams = 3.4;
  report.rows.push_back(row);
  auto tsv = eval::report_tsv(report);
  CHECK(tsv.find("Avg. G-gram per Case") != std::string::npos);
  CHECK(tsv.find("prom\tcore\ttest\tmcc-covariance\t3;5\t0.250000;0.750000\t0.500000\t3.4") !=
        std::string::npos);
  auto parsed = nlohmann::json::parse(eval::report_json(report));
  REQUIRE(parsed.at("rows").size() == 1);
  CHECK(parsed["rows"][0]["mean"].get<double>() == doctest::Approx(0.5));
  CHECK(parsed["rows"][0]["avg_ggrams_per_case"].get<double>() == doctest::Approx(3.4));
  CHECK(parsed["rows"][0]["seeds"].size() == 2);
}

TEST_CASE("attention report ranks, flags motifs, and notices empty matches") {
  auto tok = base_vocab();
  const int a = tok.id_of("A"), c = tok.id_of("C"), t = tok.id_of("T");
  // entry 0 text "AC", entry 1 text "TAT"
  auto gv = gvocab_from({{a, c}, {t, a, t}});
  Rng rng(10);
  auto state = model::make_model(eval_config(tok.size(), gv.size()), rng);

  std::vector<corpus::Sequence> examples{{"one", "GGACGG"}, {"none", "GGGGGG"}};
  auto report = eval::attention_report(state, examples, tok, gv, "TAT", 0);
  REQUIRE(report.size() == 2);
  CHECK(report[0].has_matches);
  REQUIRE(report[0].layers.size() == 1);
  REQUIRE(report[0].layers[0].entries.size() == 1);
  CHECK(report[0].layers[0].entries[0].text == "AC");
  CHECK(report[0].layers[0].entries[0].weight == doctest::Approx(1.0));
  CHECK_FALSE(report[0].layers[0].entries[0].motif);
  CHECK_FALSE(report[1].has_matches);
  CHECK(!report[1].notice.empty());
  CHECK(report[1].layers.empty());

  // symmetric pair: identical embedding rows split weight evenly, motif flagged
  auto twin = model::clone(state);
  auto table = twin.ggram_embedding.values();
  std::copy_n(table.begin(), 8, table.begin() + 8);
  std::vector<corpus::Sequence> both{{"two", "ACTATGG"}};
  auto rep2 = eval::attention_report(twin, both, tok, gv, "TAT", 0);
  REQUIRE(rep2[0].layers.size() == 1);
  REQUIRE(rep2[0].layers[0].entries.size() == 2);
  CHECK(rep2[0].layers[0].entries[0].weight == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(rep2[0].layers[0].entries[1].weight == doctest::Approx(0.5).epsilon(1e-5));
  bool motif_seen = false;
  for (auto& e : rep2[0].layers[0].entries)
    if (e.text == "TAT") motif_seen = e.motif;
  CHECK(motif_seen);

  // top_k truncates
  auto rep3 = eval::attention_report(state, both, tok, gv, "", 1);
  CHECK(rep3[0].layers[0].entries.size() == 1);
}
