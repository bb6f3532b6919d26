#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dnazen/common.hpp"
#include "dnazen/corpus.hpp"
#include "dnazen/tokenizer.hpp"

namespace dnazen::ggram {

// Adjacent-pair association score; PMI in production, fixed tables in tests.
class PairScorer {
 public:
  virtual ~PairScorer() = default;
  virtual double score(int left, int right) const = 0;
};

// Unigram and adjacent-bigram counts over a tokenized corpus. Bigrams are
// counted within sequences only; there is no cross-sequence adjacency.
class PmiStatistics : public PairScorer {
 public:
  void add(std::span<const int> tokens);
  void merge(const PmiStatistics& other);

  // ln( p(l r) / (p(l) p(r)) ). Zero bigram count gives -inf; a token absent
  // from the unigram table is an error.
  double pmi(int left, int right) const;
  double score(int left, int right) const override { return pmi(left, right); }

  int64_t unigram_count(int token) const;
  int64_t bigram_count(int left, int right) const;
  int64_t total_tokens() const { return total_tokens_; }
  int64_t total_bigrams() const { return total_bigrams_; }

 private:
  std::unordered_map<int, int64_t> unigram_;
  std::unordered_map<uint64_t, int64_t> bigram_;
  int64_t total_tokens_ = 0;
  int64_t total_bigrams_ = 0;
};

// Shards across workers and merges by summation, so the result does not
// depend on the worker count. Empty corpus is an error.
PmiStatistics count_statistics(std::span<const std::vector<int>> corpus, int workers = 1);

struct TokenSpan {
  int start;
  int end;  // exclusive
};

// Inserts a delimiter between each adjacent pair scoring below theta and
// returns the maximal undelimited runs of length >= 2.
std::vector<TokenSpan> segment_ggrams(std::span<const int> tokens, const PairScorer& scorer,
                                      double theta);

struct GGramEntry {
  std::vector<int> tokens;
  int64_t freq = 0;
};

struct TokenTupleHash {
  std::size_t operator()(const std::vector<int>& v) const {
    std::size_t h = v.size();
    for (int t : v) h ^= static_cast<std::size_t>(t) + 0x9e3779b9 + (h << 6) + (h >> 2);
    return h;
  }
};

struct GGramVocab {
  std::vector<GGramEntry> entries;  // position == ggram id
  std::unordered_map<std::vector<int>, int, TokenTupleHash> index;
  int min_len = 2;
  int max_len = 5;
  double theta = 0.0;
  int64_t min_freq = 1;

  int size() const { return static_cast<int>(entries.size()); }
  std::string text(int id, const bpe::TokenVocab& tokvocab) const;
  void rebuild_index();
};

struct BuildOptions {
  double theta = 2.0;
  int min_len = 2;
  int max_len = 5;
  int64_t min_freq = 2;
  // Token ids excluded from entries ("cleaning"); the pipeline bans tokens
  // containing the N base.
  std::unordered_set<int> excluded_tokens;
};

// Segments every sequence, slides a max_len window over longer runs, counts
// distinct tuples, filters by min_freq and exclusions, and assigns dense ids
// ordered by (frequency desc, token tuple asc).
GGramVocab build_vocab(std::span<const std::vector<int>> corpus, const PairScorer& scorer,
                       const BuildOptions& opts);

// Specials plus every token whose text contains the ambiguous base N; the
// standard exclusion set for build_vocab.
std::unordered_set<int> default_excluded_tokens(const bpe::TokenVocab& vocab);

struct GGramMatch {
  int ggram_id;
  int start;
  int end;  // exclusive
};

struct GGramMatchSet {
  std::vector<GGramMatch> matches;  // ordered by (start, length)
  int source_len = 0;
};

// Aho-Corasick automaton over token ids; immutable after construction.
class GGramMatcher {
 public:
  explicit GGramMatcher(const GGramVocab& vocab);
  // Every occurrence of every vocab entry, overlaps included.
  GGramMatchSet match(std::span<const int> tokens) const;

 private:
  struct State {
    std::unordered_map<int, int> next;
    int fail = 0;
    int output_link = -1;          // nearest suffix state with patterns
    std::vector<int> pattern_ids;  // ggram ids ending here
  };
  std::vector<State> states_;
  std::vector<int> pattern_lengths_;
};

// Convenience wrapper that builds a matcher per call; pipelines should hold
// a GGramMatcher.
GGramMatchSet match_ggrams(std::span<const int> tokens, const GGramVocab& vocab);

// Deterministic keep-longest-then-leftmost truncation to at most max_matches.
GGramMatchSet cap_matches(const GGramMatchSet& set, std::size_t max_matches);

struct MatchingMatrix {
  int rows = 0;  // N tokens
  int cols = 0;  // T matches
  std::vector<uint8_t> bits;  // row-major

  bool at(int n, int t) const {
    return bits[static_cast<std::size_t>(n) * static_cast<std::size_t>(cols) +
                static_cast<std::size_t>(t)] != 0;
  }
};

// m[n][t] = 1 iff token n lies inside match t's span; N = matches.source_len.
MatchingMatrix matching_matrix(const GGramMatchSet& matches);

struct SplitStats {
  corpus::Split split = corpus::Split::train;
  int64_t total = 0;
  int64_t distinct = 0;
  double avg = 0.0;  // total / records, rounded to one decimal
};

SplitStats ggram_stats(const corpus::LabeledDataset& dataset, const bpe::TokenVocab& tokvocab,
                       const GGramVocab& vocab);
std::string stats_table_tsv(std::span<const SplitStats> rows);

// JSON-lines, one entry per line: {"id":..,"tokens":[..],"text":..,"freq":..}
void save_ggram_vocab(const GGramVocab& vocab, const bpe::TokenVocab& tokvocab,
                      const std::filesystem::path& path);
GGramVocab load_ggram_vocab(const std::filesystem::path& path);

}  // namespace dnazen::ggram
