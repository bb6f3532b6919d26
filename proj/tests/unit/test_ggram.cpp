#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "dnazen/ggram.hpp"
#include "dnazen/rng.hpp"
#include "support/testutil.hpp"

using namespace dnazen;
using namespace dnazen::ggram;
using testutil::TempDir;

namespace {

// Pair scorer backed by an explicit table; pairs absent from the table score
// below any threshold.
class FixedScorer : public PairScorer {
 public:
  void set(int l, int r, double s) { table_[{l, r}] = s; }
  double score(int l, int r) const override {
    const auto it = table_.find({l, r});
    return it == table_.end() ? -std::numeric_limits<double>::infinity() : it->second;
  }

 private:
  std::map<std::pair<int, int>, double> table_;
};

// Deterministic pseudo-score so property tests can cover many shapes.
class HashScorer : public PairScorer {
 public:
  double score(int l, int r) const override {
    return static_cast<double>((l * 31 + r * 7) % 11) - 5.0;
  }
};

std::vector<std::vector<int>> random_token_corpus(uint64_t seed, int count, int max_len,
                                                  int alphabet) {
  Rng rng(seed);
  std::vector<std::vector<int>> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const int len = 1 + static_cast<int>(rng.uniform_below(max_len));
    std::vector<int> seq(len);
    for (auto& t : seq) t = static_cast<int>(rng.uniform_below(alphabet));
    out.push_back(std::move(seq));
  }
  return out;
}

// Naive delimiter-then-split segmentation.
std::vector<TokenSpan> naive_segment(const std::vector<int>& tokens, const PairScorer& scorer,
                                     double theta) {
  const int n = static_cast<int>(tokens.size());
  std::vector<bool> boundary_after(std::max(n - 1, 0), false);
  for (int i = 0; i + 1 < n; ++i)
    boundary_after[i] = scorer.score(tokens[i], tokens[i + 1]) < theta;
  std::vector<TokenSpan> spans;
  int start = 0;
  for (int i = 0; i < n; ++i) {
    const bool cut = (i == n - 1) || boundary_after[i];
    if (cut) {
      if (i + 1 - start >= 2) spans.push_back({start, i + 1});
      start = i + 1;
    }
  }
  return spans;
}

// O(N * |V| * L) scan: test every position against every vocab entry.
std::vector<GGramMatch> naive_match(const std::vector<int>& tokens, const GGramVocab& vocab) {
  std::vector<GGramMatch> out;
  const int n = static_cast<int>(tokens.size());
  for (int start = 0; start < n; ++start) {
    for (int id = 0; id < vocab.size(); ++id) {
      const auto& pat = vocab.entries[id].tokens;
      const int len = static_cast<int>(pat.size());
      if (start + len > n) continue;
      bool ok = true;
      for (int k = 0; k < len; ++k)
        if (tokens[start + k] != pat[k]) {
          ok = false;
          break;
        }
      if (ok) out.push_back({id, start, start + len});
    }
  }
  std::sort(out.begin(), out.end(), [](const GGramMatch& a, const GGramMatch& b) {
    if (a.start != b.start) return a.start < b.start;
    return a.end < b.end;
  });
  return out;
}

GGramVocab vocab_from_tuples(std::vector<std::vector<int>> tuples) {
  GGramVocab v;
  for (auto& t : tuples) v.entries.push_back({std::move(t), 1});
  v.rebuild_index();
  return v;
}

bool same_matches(const std::vector<GGramMatch>& a, const std::vector<GGramMatch>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].ggram_id != b[i].ggram_id || a[i].start != b[i].start || a[i].end != b[i].end)
      return false;
  return true;
}

}  // namespace

TEST_CASE("statistics count unigrams and within-sequence bigrams") {
  PmiStatistics stats;
  stats.add(std::vector<int>{0, 1, 0, 1});
  CHECK(stats.unigram_count(0) == 2);
  CHECK(stats.unigram_count(1) == 2);
  CHECK(stats.bigram_count(0, 1) == 2);
  CHECK(stats.bigram_count(1, 0) == 1);
  CHECK(stats.total_tokens() == 4);
  CHECK(stats.total_bigrams() == 3);

  PmiStatistics two;
  two.add(std::vector<int>{0, 1});
  two.add(std::vector<int>{1, 0});
  CHECK(two.bigram_count(0, 1) == 1);
  CHECK(two.bigram_count(1, 0) == 1);
  CHECK(two.bigram_count(1, 1) == 0);  // no adjacency across sequences
}

TEST_CASE("count_statistics equals a brute-force recount and is worker-invariant") {
  auto corpus = random_token_corpus(17, 50, 30, 10);
  auto stats = count_statistics(corpus, 1);
  auto stats4 = count_statistics(corpus, 4);

  std::map<int, int64_t> uni;
  std::map<std::pair<int, int>, int64_t> bi;
  int64_t tt = 0, tb = 0;
  for (const auto& s : corpus)
    for (std::size_t i = 0; i < s.size(); ++i) {
      ++uni[s[i]];
      ++tt;
      if (i + 1 < s.size()) {
        ++bi[{s[i], s[i + 1]}];
        ++tb;
      }
    }

  CHECK(stats.total_tokens() == tt);
  CHECK(stats.total_bigrams() == tb);
  for (int a = 0; a < 10; ++a) {
    CHECK(stats.unigram_count(a) == (uni.count(a) ? uni[a] : 0));
    CHECK(stats4.unigram_count(a) == stats.unigram_count(a));
    for (int b = 0; b < 10; ++b) {
      const auto key = std::make_pair(a, b);
      CHECK(stats.bigram_count(a, b) == (bi.count(key) ? bi[key] : 0));
      CHECK(stats4.bigram_count(a, b) == stats.bigram_count(a, b));
    }
  }
  CHECK(stats4.total_tokens() == tt);
  CHECK(stats4.total_bigrams() == tb);

  CHECK_THROWS_AS(count_statistics({}, 1), ValidationError);
}

TEST_CASE("pmi is zero under exact independence") {
  PmiStatistics stats;
  stats.add(std::vector<int>{0, 1});
  stats.add(std::vector<int>{0, 0});
  stats.add(std::vector<int>{1, 1});
  stats.add(std::vector<int>{1, 0});
  // p(0 1) = 1/4, p(0) = p(1) = 1/2
  CHECK(stats.pmi(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("pmi sign, sentinel, and error cases") {
  PmiStatistics stats;
  stats.add(std::vector<int>{0, 1, 0, 1, 0, 1, 0, 1});
  CHECK(stats.pmi(0, 1) > 0.0);

  PmiStatistics pair_only;
  pair_only.add(std::vector<int>{0, 1});
  pair_only.add(std::vector<int>{0, 1});
  CHECK(pair_only.pmi(1, 1) == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(pair_only.pmi(0, 7), ValidationError);
}

TEST_CASE("pmi uses the ordered bigram only") {
  PmiStatistics stats;
  for (int i = 0; i < 3; ++i) stats.add(std::vector<int>{0, 1});
  stats.add(std::vector<int>{1, 0});
  CHECK(stats.bigram_count(0, 1) == 3);
  CHECK(stats.bigram_count(1, 0) == 1);
  CHECK(stats.pmi(0, 1) == doctest::Approx(std::log(3.0 / 4.0 / (0.5 * 0.5))));
  CHECK(stats.pmi(1, 0) == doctest::Approx(std::log(1.0 / 4.0 / (0.5 * 0.5))));
  CHECK(stats.pmi(0, 1) != stats.pmi(1, 0));
}

TEST_CASE("pmi matches a direct evaluation of the formula") {
  auto corpus = random_token_corpus(29, 40, 25, 4);
  auto stats = count_statistics(corpus, 1);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      if (stats.bigram_count(a, b) == 0) {
        CHECK(stats.pmi(a, b) == -std::numeric_limits<double>::infinity());
        continue;
      }
      const double p_pair =
          double(stats.bigram_count(a, b)) / double(stats.total_bigrams());
      const double pa = double(stats.unigram_count(a)) / double(stats.total_tokens());
      const double pb = double(stats.unigram_count(b)) / double(stats.total_tokens());
      const double expected = std::log(p_pair / (pa * pb));
      CHECK(stats.pmi(a, b) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("segmentation reproduces the worked example") {
  // Tokens ATA CGGT TGTA GGTT AGGA as ids 0..4 with pair scores
  // 0.7, 1.3, 1.1, 0.1 and threshold 1: one run CGGT TGTA GGTT.
  FixedScorer scorer;
  scorer.set(0, 1, 0.7);
  scorer.set(1, 2, 1.3);
  scorer.set(2, 3, 1.1);
  scorer.set(3, 4, 0.1);
  const std::vector<int> tokens{0, 1, 2, 3, 4};
  auto spans = segment_ggrams(tokens, scorer, 1.0);
  REQUIRE(spans.size() == 1);
  CHECK(spans[0].start == 1);
  CHECK(spans[0].end == 4);
}

TEST_CASE("segmentation edge cases") {
  FixedScorer low;  // every pair scores -inf
  CHECK(segment_ggrams(std::vector<int>{0, 1, 2}, low, 0.0).empty());
  CHECK(segment_ggrams(std::vector<int>{0}, low, 0.0).empty());
  CHECK(segment_ggrams(std::vector<int>{}, low, 0.0).empty());

  HashScorer hash;
  auto corpus = random_token_corpus(31, 200, 40, 8);
  for (const auto& seq : corpus) {
    auto got = segment_ggrams(seq, hash, 0.0);
    auto want = naive_segment(seq, hash, 0.0);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].start == want[i].start);
      CHECK(got[i].end == want[i].end);
    }
    // spans are disjoint, in order, length >= 2
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].end - got[i].start >= 2);
      if (i > 0) CHECK(got[i].start >= got[i - 1].end);
    }
  }
}

TEST_CASE("build_vocab collects the worked example tuple") {
  FixedScorer scorer;
  scorer.set(0, 1, 0.7);
  scorer.set(1, 2, 1.3);
  scorer.set(2, 3, 1.1);
  scorer.set(3, 4, 0.1);
  std::vector<std::vector<int>> corpus(10, std::vector<int>{0, 1, 2, 3, 4});
  BuildOptions opts;
  opts.theta = 1.0;
  opts.min_freq = 1;
  auto vocab = build_vocab(corpus, scorer, opts);
  REQUIRE(vocab.size() == 1);
  CHECK(vocab.entries[0].tokens == std::vector<int>{1, 2, 3});
  CHECK(vocab.entries[0].freq == 10);
  CHECK(vocab.index.at(std::vector<int>{1, 2, 3}) == 0);

  opts.min_freq = 11;
  CHECK(build_vocab(corpus, scorer, opts).size() == 0);

  opts.min_freq = 1;
  opts.min_len = 1;
  CHECK_THROWS_AS(build_vocab(corpus, scorer, opts), ConfigError);
  opts.min_len = 4;
  opts.max_len = 3;
  CHECK_THROWS_AS(build_vocab(corpus, scorer, opts), ConfigError);
}

TEST_CASE("build_vocab slides windows over long runs") {
  FixedScorer high;
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) high.set(a, b, 100.0);
  std::vector<std::vector<int>> corpus{{0, 1, 2, 3, 4, 5, 6}};
  BuildOptions opts;
  opts.theta = 1.0;
  opts.min_freq = 1;
  auto vocab = build_vocab(corpus, high, opts);
  REQUIRE(vocab.size() == 3);
  // equal frequency: ordered lexicographically
  CHECK(vocab.entries[0].tokens == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(vocab.entries[1].tokens == std::vector<int>{1, 2, 3, 4, 5});
  CHECK(vocab.entries[2].tokens == std::vector<int>{2, 3, 4, 5, 6});

  opts.excluded_tokens = {0};
  auto excl = build_vocab(corpus, high, opts);
  REQUIRE(excl.size() == 2);
  CHECK(excl.entries[0].tokens == std::vector<int>{1, 2, 3, 4, 5});
}

TEST_CASE("build_vocab orders by descending frequency then token tuple") {
  FixedScorer scorer;
  scorer.set(0, 1, 5.0);
  scorer.set(2, 3, 5.0);
  std::vector<std::vector<int>> corpus;
  for (int i = 0; i < 3; ++i) corpus.push_back({0, 1});
  for (int i = 0; i < 5; ++i) corpus.push_back({2, 3});
  BuildOptions opts;
  opts.theta = 1.0;
  opts.min_freq = 1;
  auto vocab = build_vocab(corpus, scorer, opts);
  REQUIRE(vocab.size() == 2);
  CHECK(vocab.entries[0].tokens == std::vector<int>{2, 3});  // freq 5 first
  CHECK(vocab.entries[0].freq == 5);
  CHECK(vocab.entries[1].tokens == std::vector<int>{0, 1});
}

TEST_CASE("build_vocab matches an enumeration oracle on random corpora") {
  HashScorer scorer;
  auto corpus = random_token_corpus(53, 120, 30, 6);
  BuildOptions opts;
  opts.theta = -1.0;
  opts.min_freq = 2;
  opts.min_len = 2;
  opts.max_len = 4;
  auto vocab = build_vocab(corpus, scorer, opts);

  std::map<std::vector<int>, int64_t> expected;
  for (const auto& seq : corpus)
    for (const auto& span : naive_segment(seq, scorer, opts.theta)) {
      const int len = span.end - span.start;
      if (len < opts.min_len) continue;
      const int w = std::min(len, opts.max_len);
      if (len <= opts.max_len) {
        expected[std::vector<int>(seq.begin() + span.start, seq.begin() + span.end)] += 1;
      } else {
        for (int s = span.start; s + w <= span.end; ++s)
          expected[std::vector<int>(seq.begin() + s, seq.begin() + s + w)] += 1;
      }
    }
  std::erase_if(expected, [&](const auto& kv) { return kv.second < opts.min_freq; });

  REQUIRE(vocab.size() == static_cast<int>(expected.size()));
  for (const auto& e : vocab.entries) {
    REQUIRE(expected.count(e.tokens) == 1);
    CHECK(expected[e.tokens] == e.freq);
    CHECK(static_cast<int>(e.tokens.size()) >= opts.min_len);
    CHECK(static_cast<int>(e.tokens.size()) <= opts.max_len);
    CHECK(e.freq >= opts.min_freq);
  }
  // ids follow (freq desc, tuple asc)
  for (int i = 1; i < vocab.size(); ++i) {
    const auto& a = vocab.entries[i - 1];
    const auto& b = vocab.entries[i];
    CHECK((a.freq > b.freq || (a.freq == b.freq && a.tokens < b.tokens)));
  }
}

TEST_CASE("matcher finds repeated and overlapping patterns") {
  auto vocab = vocab_from_tuples({{1, 2}});
  auto set = match_ggrams(std::vector<int>{0, 1, 2, 1, 2}, vocab);
  REQUIRE(set.matches.size() == 2);
  CHECK(set.matches[0].start == 1);
  CHECK(set.matches[0].end == 3);
  CHECK(set.matches[1].start == 3);
  CHECK(set.matches[1].end == 5);
  CHECK(set.source_len == 5);

  auto nested = vocab_from_tuples({{0, 1}, {0, 1, 2}});
  auto both = match_ggrams(std::vector<int>{0, 1, 2}, nested);
  REQUIRE(both.matches.size() == 2);
  CHECK(both.matches[0].end == 2);  // (start, length) order
  CHECK(both.matches[1].end == 3);

  // suffix pattern found via failure links
  auto suffix = vocab_from_tuples({{1, 2}, {0, 1, 2}});
  auto hits = match_ggrams(std::vector<int>{0, 1, 2}, suffix);
  REQUIRE(hits.matches.size() == 2);
  CHECK(hits.matches[0].start == 0);
  CHECK(hits.matches[0].end == 3);
  CHECK(hits.matches[1].start == 1);
  CHECK(hits.matches[1].end == 3);

  CHECK(match_ggrams(std::vector<int>{}, vocab).matches.empty());
  GGramVocab empty;
  CHECK(match_ggrams(std::vector<int>{0, 1, 2}, empty).matches.empty());
}

TEST_CASE("matcher agrees with a naive scan on random corpora") {
  Rng rng(71);
  std::vector<std::vector<int>> tuples;
  std::set<std::vector<int>> seen;
  while (tuples.size() < 500) {
    const int len = 2 + static_cast<int>(rng.uniform_below(4));
    std::vector<int> t(len);
    for (auto& x : t) x = static_cast<int>(rng.uniform_below(6));
    if (seen.insert(t).second) tuples.push_back(t);
  }
  auto vocab = vocab_from_tuples(tuples);
  GGramMatcher matcher(vocab);

  auto corpus = random_token_corpus(73, 300, 60, 6);
  corpus.push_back({});
  for (const auto& seq : corpus) {
    auto fast = matcher.match(seq);
    auto slow = naive_match(seq, vocab);
    CHECK(same_matches(fast.matches, slow));
    CHECK(fast.source_len == static_cast<int>(seq.size()));
  }
}

TEST_CASE("cap_matches keeps longest then leftmost, re-sorted") {
  GGramMatchSet set;
  set.source_len = 8;
  set.matches = {{0, 0, 2}, {1, 1, 4}, {2, 2, 7}, {3, 4, 6}};
  auto capped = cap_matches(set, 2);
  REQUIRE(capped.matches.size() == 2);
  CHECK(capped.matches[0].start == 1);  // length 3
  CHECK(capped.matches[1].start == 2);  // length 5
  CHECK(capped.source_len == 8);

  auto untouched = cap_matches(set, 10);
  CHECK(untouched.matches.size() == 4);

  // ties on length break toward the leftmost
  GGramMatchSet ties;
  ties.source_len = 9;
  ties.matches = {{0, 0, 2}, {1, 3, 5}, {2, 6, 8}};
  auto two = cap_matches(ties, 2);
  REQUIRE(two.matches.size() == 2);
  CHECK(two.matches[0].start == 0);
  CHECK(two.matches[1].start == 3);
}

TEST_CASE("matching matrix marks tokens inside each match span") {
  GGramMatchSet none;
  none.source_len = 4;
  auto m0 = matching_matrix(none);
  CHECK(m0.rows == 4);
  CHECK(m0.cols == 0);

  GGramMatchSet full;
  full.source_len = 3;
  full.matches = {{0, 0, 3}};
  auto m1 = matching_matrix(full);
  for (int n = 0; n < 3; ++n) CHECK(m1.at(n, 0));

  Rng rng(91);
  for (int trial = 0; trial < 20; ++trial) {
    GGramMatchSet set;
    set.source_len = 10 + static_cast<int>(rng.uniform_below(20));
    const int t_count = static_cast<int>(rng.uniform_below(12));
    for (int t = 0; t < t_count; ++t) {
      const int len = 2 + static_cast<int>(rng.uniform_below(4));
      const int start = static_cast<int>(rng.uniform_below(set.source_len - len));
      set.matches.push_back({t, start, start + len});
    }
    auto m = matching_matrix(set);
    REQUIRE(m.rows == set.source_len);
    REQUIRE(m.cols == t_count);
    for (int n = 0; n < m.rows; ++n)
      for (int t = 0; t < m.cols; ++t) {
        const bool inside = n >= set.matches[t].start && n < set.matches[t].end;
        CHECK(m.at(n, t) == inside);
      }
    for (int t = 0; t < m.cols; ++t) {
      int ones = 0;
      for (int n = 0; n < m.rows; ++n) ones += m.at(n, t) ? 1 : 0;
      CHECK(ones == set.matches[t].end - set.matches[t].start);
    }
  }
}

TEST_CASE("ggram stats report hand-counted totals") {
  bpe::TokenVocab tokvocab;
  tokvocab.alphabet = {"A", "C", "G", "T"};
  tokvocab.rebuild_index();

  const int a = tokvocab.id_of("A");
  const int c = tokvocab.id_of("C");
  auto vocab = vocab_from_tuples({{a, c}, {c, a}});

  corpus::LabeledDataset ds;
  ds.split = corpus::Split::train;
  ds.num_classes = 2;
  ds.records.push_back({{"1", "ACAC"}, 0});   // AC@0, CA@1, AC@2 -> 3 matches
  ds.records.push_back({{"2", "ACACA"}, 1});  // 4 matches
  auto stats = ggram_stats(ds, tokvocab, vocab);
  CHECK(stats.total == 7);
  CHECK(stats.distinct == 2);
  CHECK(stats.avg == doctest::Approx(3.5));

  const std::string tsv = stats_table_tsv(std::vector<SplitStats>{stats});
  CHECK(tsv ==
        "Split\tTotal G-gram\tDistinct G-gram\tAvg. G-gram\n"
        "train\t7\t2\t3.5\n");

  corpus::LabeledDataset none;
  none.split = corpus::Split::dev;
  none.records.push_back({{"1", "TTTT"}, 0});
  auto zero = ggram_stats(none, tokvocab, vocab);
  CHECK(zero.total == 0);
  CHECK(zero.distinct == 0);
  CHECK(zero.avg == doctest::Approx(0.0));
  CHECK(stats_table_tsv(std::vector<SplitStats>{zero}) ==
        "Split\tTotal G-gram\tDistinct G-gram\tAvg. G-gram\n"
        "dev\t0\t0\t0.0\n");
}

TEST_CASE("ggram vocab JSONL round-trips and validates") {
  TempDir tmp;
  bpe::TokenVocab tokvocab;
  tokvocab.alphabet = {"A", "C", "G", "T"};
  tokvocab.rebuild_index();
  const int a = tokvocab.id_of("A");
  const int g = tokvocab.id_of("G");

  GGramVocab vocab = vocab_from_tuples({{a, g}, {g, a, g}});
  vocab.entries[0].freq = 12;
  vocab.entries[1].freq = 4;
  save_ggram_vocab(vocab, tokvocab, tmp.file("ggrams.jsonl"));

  auto back = load_ggram_vocab(tmp.file("ggrams.jsonl"));
  REQUIRE(back.size() == 2);
  CHECK(back.entries[0].tokens == vocab.entries[0].tokens);
  CHECK(back.entries[0].freq == 12);
  CHECK(back.entries[1].tokens == vocab.entries[1].tokens);
  CHECK(back.index.at(std::vector<int>{g, a, g}) == 1);
  CHECK(back.min_len == 2);
  CHECK(back.max_len == 3);
  CHECK(back.text(0, tokvocab) == "AG");
  CHECK(back.text(1, tokvocab) == "GAG");

  testutil::write_file(tmp.file("bad.jsonl"), "{\"id\":0,\"tokens\":[1,2],\"freq\":1}\nnot json\n");
  try {
    load_ggram_vocab(tmp.file("bad.jsonl"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }

  testutil::write_file(tmp.file("sparse.jsonl"), "{\"id\":1,\"tokens\":[1,2],\"freq\":1}\n");
  CHECK_THROWS_AS(load_ggram_vocab(tmp.file("sparse.jsonl")), ParseError);

  testutil::write_file(tmp.file("short.jsonl"), "{\"id\":0,\"tokens\":[1],\"freq\":1}\n");
  CHECK_THROWS_AS(load_ggram_vocab(tmp.file("short.jsonl")), ParseError);

  CHECK_THROWS_AS(load_ggram_vocab(tmp.file("missing.jsonl")), ValidationError);
}

TEST_CASE("default exclusions cover specials and N-containing tokens") {
  bpe::TokenVocab tokvocab;
  tokvocab.alphabet = {"A", "C", "G", "N", "T"};
  tokvocab.merges = {{"A", "N"}, {"A", "C"}};
  tokvocab.rebuild_index();
  auto excluded = default_excluded_tokens(tokvocab);
  for (int s = 0; s < bpe::kNumSpecials; ++s) CHECK(excluded.count(s) == 1);
  CHECK(excluded.count(tokvocab.id_of("N")) == 1);
  CHECK(excluded.count(tokvocab.id_of("AN")) == 1);
  CHECK(excluded.count(tokvocab.id_of("AC")) == 0);
  CHECK(excluded.count(tokvocab.id_of("A")) == 0);
}
