#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dnazen/common.hpp"

namespace dnazen::corpus {

struct Sequence {
  std::string id;
  std::string bases;  // over {A,C,G,T,N}, non-empty
};

enum class SequenceFormat { fasta, lines };

SequenceFormat parse_format(std::string_view name);

// Uppercases and maps anything outside {A,C,G,T} to N. Empty input is an error.
std::string clean_sequence(std::string_view raw);

// Streams one record at a time; memory stays bounded by the largest record.
class SequenceReader {
 public:
  SequenceReader(const std::filesystem::path& path, SequenceFormat format);
  std::optional<Sequence> next();

 private:
  std::optional<Sequence> next_fasta();
  std::optional<Sequence> next_lines();

  std::ifstream in_;
  SequenceFormat format_;
  std::size_t line_no_ = 0;
  std::string pending_header_;
  bool have_pending_header_ = false;
  bool done_ = false;
};

std::vector<Sequence> load_sequences(const std::filesystem::path& path, SequenceFormat format);

enum class Split { train, dev, test };
const char* split_name(Split s);
Split parse_split(std::string_view name);

struct LabeledRecord {
  Sequence seq;
  int label;
};

struct LabeledDataset {
  std::vector<LabeledRecord> records;
  int num_classes = 0;
  Split split = Split::train;
};

// CSV with header "sequence,label". num_classes defaults to 1 + max label;
// a declared value turns labels >= num_classes into validation errors.
LabeledDataset load_labeled_dataset(const std::filesystem::path& path, Split split,
                                    std::optional<int> num_classes = std::nullopt);

void save_labeled_dataset(const LabeledDataset& ds, const std::filesystem::path& path);

}  // namespace dnazen::corpus
