#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dnazen/common.hpp"
#include "dnazen/corpus.hpp"

namespace dnazen::bpe {

// Special ids are fixed so vocab files stay stable across runs.
enum Special : int { kPad = 0, kUnk = 1, kCls = 2, kSep = 3, kMask = 4 };
constexpr int kNumSpecials = 5;
const char* special_text(int id);

struct TokenVocab {
  std::vector<std::pair<std::string, std::string>> merges;  // in training order
  std::vector<std::string> alphabet;                        // sorted single-symbol tokens
  std::vector<std::string> id_to_token;                     // dense: specials, alphabet, merges
  std::unordered_map<std::string, int> token_to_id;

  int size() const { return static_cast<int>(id_to_token.size()); }
  bool is_special(int id) const { return id >= 0 && id < kNumSpecials; }
  int id_of(const std::string& token) const;
  const std::string& token_of(int id) const;

  // Rebuilds id_to_token/token_to_id from specials + alphabet + merges.
  void rebuild_index();
};

// Greedy highest-frequency pair merging until vocab_size is reached or no
// pair occurs at least twice. Ties break on the lexicographically smaller
// merged text. The single-symbol alphabet is whatever the corpus contains.
TokenVocab train_bpe(const std::vector<corpus::Sequence>& corpus, int vocab_size);

struct TokenSeq {
  std::vector<int> ids;
  std::vector<std::string> texts;                 // parallel to ids
  std::vector<std::pair<int, int>> offsets;       // [base_start, base_end) per token
};

// Applies merges in training order. With add_specials the result is
// CLS + tokens + SEP; truncation is a pipeline concern, not done here.
TokenSeq encode(const TokenVocab& vocab, const corpus::Sequence& seq, bool add_specials);

// Concatenation of token texts; special ids are skipped.
std::string decode(const TokenVocab& vocab, std::span<const int> ids);

void save_vocab(const TokenVocab& vocab, const std::filesystem::path& path);
TokenVocab load_vocab(const std::filesystem::path& path);

}  // namespace dnazen::bpe
