#include "dnazen/ggram.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace dnazen::ggram {

namespace {

uint64_t pack_pair(int left, int right) {
  return (static_cast<uint64_t>(static_cast<uint32_t>(left)) << 32) |
         static_cast<uint32_t>(right);
}

}  // namespace

void PmiStatistics::add(std::span<const int> tokens) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    ++unigram_[tokens[i]];
    ++total_tokens_;
    if (i + 1 < tokens.size()) {
      ++bigram_[pack_pair(tokens[i], tokens[i + 1])];
      ++total_bigrams_;
    }
  }
}

void PmiStatistics::merge(const PmiStatistics& other) {
  for (const auto& [tok, c] : other.unigram_) unigram_[tok] += c;
  for (const auto& [pair, c] : other.bigram_) bigram_[pair] += c;
  total_tokens_ += other.total_tokens_;
  total_bigrams_ += other.total_bigrams_;
}

int64_t PmiStatistics::unigram_count(int token) const {
  const auto it = unigram_.find(token);
  return it == unigram_.end() ? 0 : it->second;
}

int64_t PmiStatistics::bigram_count(int left, int right) const {
  const auto it = bigram_.find(pack_pair(left, right));
  return it == bigram_.end() ? 0 : it->second;
}

double PmiStatistics::pmi(int left, int right) const {
  const int64_t ul = unigram_count(left);
  const int64_t ur = unigram_count(right);
  if (ul == 0 || ur == 0)
    throw ValidationError("token without unigram count in PMI query");
  const int64_t b = bigram_count(left, right);
  if (b == 0) return -std::numeric_limits<double>::infinity();
  const double p_pair = static_cast<double>(b) / static_cast<double>(total_bigrams_);
  const double p_left = static_cast<double>(ul) / static_cast<double>(total_tokens_);
  const double p_right = static_cast<double>(ur) / static_cast<double>(total_tokens_);
  return std::log(p_pair / (p_left * p_right));
}

PmiStatistics count_statistics(std::span<const std::vector<int>> corpus, int workers) {
  if (corpus.empty()) throw ValidationError("cannot count statistics over an empty corpus");
  const std::size_t n = corpus.size();
  std::size_t shards = std::max<std::size_t>(1, std::min<std::size_t>(workers, n));
  if (shards == 1) {
    PmiStatistics stats;
    for (const auto& seq : corpus) stats.add(seq);
    return stats;
  }
  std::vector<PmiStatistics> partial(shards);
  std::vector<std::thread> pool;
  pool.reserve(shards);
  for (std::size_t w = 0; w < shards; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += shards) partial[w].add(corpus[i]);
    });
  }
  for (auto& t : pool) t.join();
  PmiStatistics stats;
  for (const auto& p : partial) stats.merge(p);
  return stats;
}

std::vector<TokenSpan> segment_ggrams(std::span<const int> tokens, const PairScorer& scorer,
                                      double theta) {
  std::vector<TokenSpan> spans;
  const int n = static_cast<int>(tokens.size());
  int run_start = 0;
  for (int i = 0; i < n - 1; ++i) {
    if (scorer.score(tokens[i], tokens[i + 1]) < theta) {
      if (i + 1 - run_start >= 2) spans.push_back({run_start, i + 1});
      run_start = i + 1;
    }
  }
  if (n - run_start >= 2) spans.push_back({run_start, n});
  return spans;
}

std::string GGramVocab::text(int id, const bpe::TokenVocab& tokvocab) const {
  if (id < 0 || id >= size()) throw ValidationError("ggram id out of range");
  std::string out;
  for (int tok : entries[id].tokens) out += tokvocab.token_of(tok);
  return out;
}

void GGramVocab::rebuild_index() {
  index.clear();
  for (int i = 0; i < size(); ++i) {
    const auto [it, inserted] = index.emplace(entries[i].tokens, i);
    (void)it;
    if (!inserted) throw ValidationError("duplicate token tuple in ggram vocab");
  }
}

GGramVocab build_vocab(std::span<const std::vector<int>> corpus, const PairScorer& scorer,
                       const BuildOptions& opts) {
  if (opts.min_len < 2) throw ConfigError("ggram min_len must be at least 2");
  if (opts.max_len < opts.min_len) throw ConfigError("ggram max_len must be >= min_len");
  if (opts.min_freq < 1) throw ConfigError("ggram min_freq must be at least 1");

  std::unordered_map<std::vector<int>, int64_t, TokenTupleHash> counts;
  std::vector<int> window;
  const auto count_window = [&](std::span<const int> tokens, int start, int len) {
    for (int k = start; k < start + len; ++k)
      if (opts.excluded_tokens.count(tokens[k])) return;
    window.assign(tokens.begin() + start, tokens.begin() + start + len);
    ++counts[window];
  };

  for (const auto& seq : corpus) {
    for (const TokenSpan& span : segment_ggrams(seq, scorer, opts.theta)) {
      const int len = span.end - span.start;
      if (len < opts.min_len) continue;
      if (len <= opts.max_len) {
        count_window(seq, span.start, len);
      } else {
        for (int s = span.start; s + opts.max_len <= span.end; ++s)
          count_window(seq, s, opts.max_len);
      }
    }
  }

  GGramVocab vocab;
  vocab.min_len = opts.min_len;
  vocab.max_len = opts.max_len;
  vocab.theta = opts.theta;
  vocab.min_freq = opts.min_freq;
  for (auto& [tokens, freq] : counts) {
    if (freq < opts.min_freq) continue;
    vocab.entries.push_back({tokens, freq});
  }
  std::sort(vocab.entries.begin(), vocab.entries.end(),
            [](const GGramEntry& a, const GGramEntry& b) {
              if (a.freq != b.freq) return a.freq > b.freq;
              return a.tokens < b.tokens;
            });
  vocab.rebuild_index();
  return vocab;
}

std::unordered_set<int> default_excluded_tokens(const bpe::TokenVocab& vocab) {
  std::unordered_set<int> excluded;
  for (int s = 0; s < bpe::kNumSpecials; ++s) excluded.insert(s);
  for (int id = bpe::kNumSpecials; id < vocab.size(); ++id)
    if (vocab.token_of(id).find('N') != std::string::npos) excluded.insert(id);
  return excluded;
}

GGramMatcher::GGramMatcher(const GGramVocab& vocab) {
  states_.emplace_back();
  pattern_lengths_.reserve(vocab.size());
  for (int id = 0; id < vocab.size(); ++id) {
    pattern_lengths_.push_back(static_cast<int>(vocab.entries[id].tokens.size()));
    int cur = 0;
    for (int tok : vocab.entries[id].tokens) {
      const auto it = states_[cur].next.find(tok);
      if (it == states_[cur].next.end()) {
        states_[cur].next.emplace(tok, static_cast<int>(states_.size()));
        cur = static_cast<int>(states_.size());
        states_.emplace_back();
      } else {
        cur = it->second;
      }
    }
    states_[cur].pattern_ids.push_back(id);
  }

  std::deque<int> queue;
  for (const auto& [tok, child] : states_[0].next) {
    (void)tok;
    states_[child].fail = 0;
    queue.push_back(child);
  }
  while (!queue.empty()) {
    const int s = queue.front();
    queue.pop_front();
    for (const auto& [tok, child] : states_[s].next) {
      int f = states_[s].fail;
      while (f != 0 && !states_[f].next.count(tok)) f = states_[f].fail;
      const auto it = states_[f].next.find(tok);
      states_[child].fail = (it != states_[f].next.end() && it->second != child) ? it->second : 0;
      const int fl = states_[child].fail;
      states_[child].output_link =
          states_[fl].pattern_ids.empty() ? states_[fl].output_link : fl;
      queue.push_back(child);
    }
  }
}

GGramMatchSet GGramMatcher::match(std::span<const int> tokens) const {
  GGramMatchSet out;
  out.source_len = static_cast<int>(tokens.size());
  int cur = 0;
  for (int i = 0; i < out.source_len; ++i) {
    const int tok = tokens[i];
    while (cur != 0 && !states_[cur].next.count(tok)) cur = states_[cur].fail;
    const auto it = states_[cur].next.find(tok);
    cur = it == states_[cur].next.end() ? 0 : it->second;
    for (int s = states_[cur].pattern_ids.empty() ? states_[cur].output_link : cur; s != -1;
         s = states_[s].output_link) {
      for (int pid : states_[s].pattern_ids) {
        const int len = pattern_lengths_[pid];
        out.matches.push_back({pid, i + 1 - len, i + 1});
      }
    }
  }
  std::sort(out.matches.begin(), out.matches.end(),
            [](const GGramMatch& a, const GGramMatch& b) {
              if (a.start != b.start) return a.start < b.start;
              return a.end < b.end;
            });
  return out;
}

GGramMatchSet match_ggrams(std::span<const int> tokens, const GGramVocab& vocab) {
  return GGramMatcher(vocab).match(tokens);
}

GGramMatchSet cap_matches(const GGramMatchSet& set, std::size_t max_matches) {
  if (set.matches.size() <= max_matches) return set;
  std::vector<GGramMatch> kept = set.matches;
  std::sort(kept.begin(), kept.end(), [](const GGramMatch& a, const GGramMatch& b) {
    const int la = a.end - a.start;
    const int lb = b.end - b.start;
    if (la != lb) return la > lb;
    return a.start < b.start;
  });
  kept.resize(max_matches);
  std::sort(kept.begin(), kept.end(), [](const GGramMatch& a, const GGramMatch& b) {
    if (a.start != b.start) return a.start < b.start;
    return a.end < b.end;
  });
  return {std::move(kept), set.source_len};
}

MatchingMatrix matching_matrix(const GGramMatchSet& matches) {
  MatchingMatrix m;
  m.rows = matches.source_len;
  m.cols = static_cast<int>(matches.matches.size());
  m.bits.assign(static_cast<std::size_t>(m.rows) * static_cast<std::size_t>(m.cols), 0);
  for (int t = 0; t < m.cols; ++t) {
    const GGramMatch& g = matches.matches[t];
    if (g.start < 0 || g.end > m.rows || g.start >= g.end)
      throw ValidationError("match span outside token range");
    for (int n = g.start; n < g.end; ++n)
      m.bits[static_cast<std::size_t>(n) * m.cols + t] = 1;
  }
  return m;
}

SplitStats ggram_stats(const corpus::LabeledDataset& dataset, const bpe::TokenVocab& tokvocab,
                       const GGramVocab& vocab) {
  SplitStats stats;
  stats.split = dataset.split;
  const GGramMatcher matcher(vocab);
  std::unordered_set<int> distinct;
  for (const auto& rec : dataset.records) {
    const auto enc = bpe::encode(tokvocab, rec.seq, /*add_specials=*/false);
    const auto matches = matcher.match(enc.ids);
    stats.total += static_cast<int64_t>(matches.matches.size());
    for (const auto& m : matches.matches) distinct.insert(m.ggram_id);
  }
  stats.distinct = static_cast<int64_t>(distinct.size());
  if (!dataset.records.empty()) {
    const double avg = static_cast<double>(stats.total) / dataset.records.size();
    stats.avg = std::round(avg * 10.0) / 10.0;
  }
  return stats;
}

std::string stats_table_tsv(std::span<const SplitStats> rows) {
  std::ostringstream out;
  out << "Split\tTotal G-gram\tDistinct G-gram\tAvg. G-gram\n";
  out << std::fixed << std::setprecision(1);
  for (const auto& r : rows)
    out << corpus::split_name(r.split) << '\t' << r.total << '\t' << r.distinct << '\t' << r.avg
        << '\n';
  return out.str();
}

void save_ggram_vocab(const GGramVocab& vocab, const bpe::TokenVocab& tokvocab,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path.string());
  for (int id = 0; id < vocab.size(); ++id) {
    const GGramEntry& e = vocab.entries[id];
    nlohmann::json line{{"id", id},
                        {"tokens", e.tokens},
                        {"text", vocab.text(id, tokvocab)},
                        {"freq", e.freq}};
    out << line.dump() << '\n';
  }
  if (!out) throw ValidationError("write failed: " + path.string());
}

GGramVocab load_ggram_vocab(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open ggram vocab: " + path.string());
  GGramVocab vocab;
  std::string line;
  std::size_t lineno = 0;
  int observed_min = std::numeric_limits<int>::max();
  int observed_max = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("invalid ggram vocab line: ") + e.what(), lineno);
    }
    if (!obj.is_object() || !obj.contains("id") || !obj.contains("tokens") ||
        !obj.contains("freq"))
      throw ParseError("ggram vocab line missing id/tokens/freq", lineno);
    if (obj["id"].get<int>() != vocab.size())
      throw ParseError("ggram vocab ids must be dense and ascending from 0", lineno);
    GGramEntry entry;
    entry.tokens = obj["tokens"].get<std::vector<int>>();
    entry.freq = obj["freq"].get<int64_t>();
    if (entry.tokens.size() < 2)
      throw ParseError("ggram entry shorter than two tokens", lineno);
    observed_min = std::min(observed_min, static_cast<int>(entry.tokens.size()));
    observed_max = std::max(observed_max, static_cast<int>(entry.tokens.size()));
    vocab.entries.push_back(std::move(entry));
  }
  if (vocab.size() > 0) {
    vocab.min_len = observed_min;
    vocab.max_len = observed_max;
  }
  vocab.rebuild_index();
  return vocab;
}

}  // namespace dnazen::ggram
