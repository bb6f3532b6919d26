#include "dnazen/tokenizer.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

namespace dnazen::bpe {

const char* special_text(int id) {
  switch (id) {
    case kPad: return "[PAD]";
    case kUnk: return "[UNK]";
    case kCls: return "[CLS]";
    case kSep: return "[SEP]";
    case kMask: return "[MASK]";
  }
  throw ValidationError("not a special id: " + std::to_string(id));
}

int TokenVocab::id_of(const std::string& token) const {
  const auto it = token_to_id.find(token);
  if (it == token_to_id.end()) throw ValidationError("unknown token: " + token);
  return it->second;
}

const std::string& TokenVocab::token_of(int id) const {
  if (id < 0 || id >= size()) throw ValidationError("unknown token id: " + std::to_string(id));
  return id_to_token[static_cast<std::size_t>(id)];
}

void TokenVocab::rebuild_index() {
  id_to_token.clear();
  token_to_id.clear();
  const auto push = [this](const std::string& text) {
    const auto [it, inserted] = token_to_id.emplace(text, size());
    (void)it;
    if (!inserted) throw ValidationError("duplicate token in vocab: " + text);
    id_to_token.push_back(text);
  };
  for (int s = 0; s < kNumSpecials; ++s) push(special_text(s));
  for (const auto& sym : alphabet) push(sym);
  for (const auto& [l, r] : merges) {
    if (!token_to_id.count(l) || !token_to_id.count(r))
      throw ValidationError("merge rule (" + l + ", " + r + ") references unknown parts");
    push(l + r);
  }
}

namespace {

uint64_t pack_pair(int a, int b) {
  return (static_cast<uint64_t>(static_cast<uint32_t>(a)) << 32) | static_cast<uint32_t>(b);
}

// Linked-list token storage so merges are O(occurrences), not O(corpus).
struct MergeBuffer {
  std::vector<int> token;
  std::vector<int32_t> prev;
  std::vector<int32_t> next;
  std::vector<int32_t> seq_start;  // index of each sequence's first node
};

struct Occurrence {
  int32_t node;  // left node of the pair
};

}  // namespace

TokenVocab train_bpe(const std::vector<corpus::Sequence>& corpus, int vocab_size) {
  if (corpus.empty()) throw ValidationError("BPE training corpus is empty");

  std::set<char> symbols;
  for (const auto& seq : corpus)
    for (char c : seq.bases) symbols.insert(c);

  TokenVocab vocab;
  for (char c : symbols) vocab.alphabet.emplace_back(1, c);
  vocab.rebuild_index();

  const int base_size = vocab.size();
  if (vocab_size <= base_size)
    throw ConfigError("vocab_size " + std::to_string(vocab_size) +
                      " must exceed alphabet + specials (" + std::to_string(base_size) + ")");

  MergeBuffer buf;
  {
    std::size_t total = 0;
    for (const auto& seq : corpus) total += seq.bases.size();
    buf.token.reserve(total);
    buf.prev.reserve(total);
    buf.next.reserve(total);
  }
  for (const auto& seq : corpus) {
    const int32_t start = static_cast<int32_t>(buf.token.size());
    buf.seq_start.push_back(start);
    for (std::size_t i = 0; i < seq.bases.size(); ++i) {
      buf.token.push_back(vocab.token_to_id.at(std::string(1, seq.bases[i])));
      buf.prev.push_back(i == 0 ? -1 : static_cast<int32_t>(buf.token.size()) - 2);
      buf.next.push_back(i + 1 == seq.bases.size() ? -1
                                                   : static_cast<int32_t>(buf.token.size()));
    }
  }

  std::unordered_map<uint64_t, int64_t> pair_count;
  std::unordered_map<uint64_t, std::vector<Occurrence>> pair_where;
  for (std::size_t s = 0; s < buf.seq_start.size(); ++s) {
    for (int32_t i = buf.seq_start[s]; i != -1 && buf.next[i] != -1; i = buf.next[i]) {
      const uint64_t key = pack_pair(buf.token[i], buf.token[buf.next[i]]);
      ++pair_count[key];
      pair_where[key].push_back(Occurrence{i});
    }
  }

  const auto bump = [&](int a, int b, int64_t delta, int32_t node) {
    const uint64_t key = pack_pair(a, b);
    pair_count[key] += delta;
    if (delta > 0 && node >= 0) pair_where[key].push_back(Occurrence{node});
  };

  while (vocab.size() < vocab_size) {
    int64_t best_count = 0;
    for (const auto& [key, count] : pair_count) {
      (void)key;
      best_count = std::max(best_count, count);
    }
    if (best_count < 2) break;

    // Tie-break on the merged text among max-count pairs.
    uint64_t best_key = 0;
    std::string best_text;
    for (const auto& [key, count] : pair_count) {
      if (count != best_count) continue;
      const int a = static_cast<int>(key >> 32);
      const int b = static_cast<int>(key & 0xffffffffu);
      std::string text = vocab.id_to_token[a] + vocab.id_to_token[b];
      if (best_text.empty() || text < best_text) {
        best_text = std::move(text);
        best_key = key;
      }
    }

    const int left = static_cast<int>(best_key >> 32);
    const int right = static_cast<int>(best_key & 0xffffffffu);
    const int merged = vocab.size();
    vocab.merges.emplace_back(vocab.id_to_token[left], vocab.id_to_token[right]);
    vocab.id_to_token.push_back(best_text);
    vocab.token_to_id.emplace(best_text, merged);

    auto occurrences = std::move(pair_where[best_key]);
    pair_where.erase(best_key);
    pair_count.erase(best_key);

    for (const Occurrence occ : occurrences) {
      const int32_t i = occ.node;
      const int32_t j = buf.next[i];
      // Stale entries are skipped: the list is not pruned on earlier merges.
      if (j == -1 || buf.token[i] != left || buf.token[j] != right) continue;

      const int32_t p = buf.prev[i];
      const int32_t q = buf.next[j];
      if (p != -1) {
        bump(buf.token[p], left, -1, -1);
        bump(buf.token[p], merged, +1, p);
      }
      if (q != -1) {
        bump(right, buf.token[q], -1, -1);
        bump(merged, buf.token[q], +1, i);
      }
      buf.token[i] = merged;
      buf.token[j] = -1;
      buf.next[i] = q;
      if (q != -1) buf.prev[q] = i;
    }
  }

  return vocab;
}

TokenSeq encode(const TokenVocab& vocab, const corpus::Sequence& seq, bool add_specials) {
  struct Piece {
    int id;
    int start, end;
  };
  std::vector<Piece> pieces;
  pieces.reserve(seq.bases.size());
  for (std::size_t i = 0; i < seq.bases.size(); ++i) {
    const auto it = vocab.token_to_id.find(std::string(1, seq.bases[i]));
    const int id = it == vocab.token_to_id.end() ? kUnk : it->second;
    pieces.push_back(Piece{id, static_cast<int>(i), static_cast<int>(i) + 1});
  }

  for (const auto& [l, r] : vocab.merges) {
    const int lid = vocab.token_to_id.at(l);
    const int rid = vocab.token_to_id.at(r);
    const int zid = vocab.token_to_id.at(l + r);
    std::size_t w = 0;
    for (std::size_t i = 0; i < pieces.size();) {
      if (i + 1 < pieces.size() && pieces[i].id == lid && pieces[i + 1].id == rid) {
        pieces[w++] = Piece{zid, pieces[i].start, pieces[i + 1].end};
        i += 2;
      } else {
        pieces[w++] = pieces[i++];
      }
    }
    pieces.resize(w);
  }

  TokenSeq out;
  const auto push = [&](int id, int start, int end) {
    out.ids.push_back(id);
    out.texts.push_back(vocab.id_to_token[static_cast<std::size_t>(id)]);
    out.offsets.emplace_back(start, end);
  };
  if (add_specials) push(kCls, 0, 0);
  for (const Piece& p : pieces) push(p.id, p.start, p.end);
  if (add_specials) {
    const int n = static_cast<int>(seq.bases.size());
    push(kSep, n, n);
  }
  return out;
}

std::string decode(const TokenVocab& vocab, std::span<const int> ids) {
  std::string out;
  for (int id : ids) {
    if (id < 0 || id >= vocab.size())
      throw ValidationError("unknown token id: " + std::to_string(id));
    if (vocab.is_special(id)) continue;
    out += vocab.id_to_token[static_cast<std::size_t>(id)];
  }
  return out;
}

void save_vocab(const TokenVocab& vocab, const std::filesystem::path& path) {
  nlohmann::json j;
  j["version"] = 1;
  j["alphabet"] = vocab.alphabet;
  j["merges"] = nlohmann::json::array();
  for (const auto& [l, r] : vocab.merges) j["merges"].push_back({l, r});
  nlohmann::json specials;
  for (int s = 0; s < kNumSpecials; ++s) specials[special_text(s)] = s;
  j["specials"] = specials;
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write vocab file: " + path.string());
  out << j.dump(2) << '\n';
}

TokenVocab load_vocab(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open vocab file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("invalid vocab JSON in " + path.string() + ": " + e.what());
  }
  if (!j.contains("version") || j["version"] != 1)
    throw ParseError("unsupported vocab file version in " + path.string());
  TokenVocab vocab;
  vocab.alphabet = j.at("alphabet").get<std::vector<std::string>>();
  for (const auto& m : j.at("merges")) {
    if (!m.is_array() || m.size() != 2) throw ParseError("malformed merge rule in " + path.string());
    vocab.merges.emplace_back(m[0].get<std::string>(), m[1].get<std::string>());
  }
  vocab.rebuild_index();
  for (const auto& [text, id] : j.at("specials").items()) {
    if (vocab.token_to_id.find(text) == vocab.token_to_id.end() ||
        vocab.token_to_id.at(text) != id.get<int>())
      throw ParseError("special token mismatch in " + path.string());
  }
  return vocab;
}

}  // namespace dnazen::bpe
