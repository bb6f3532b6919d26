#include "dnazen/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

namespace dnazen::corpus {

SequenceFormat parse_format(std::string_view name) {
  if (name == "fasta") return SequenceFormat::fasta;
  if (name == "lines") return SequenceFormat::lines;
  throw ConfigError("unknown sequence format: " + std::string(name));
}

std::string clean_sequence(std::string_view raw) {
  if (raw.empty()) throw ValidationError("empty sequence");
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case 'A': case 'C': case 'G': case 'T': case 'N':
        out.push_back(c);
        break;
      case 'a': case 'c': case 'g': case 't': case 'n':
        out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        break;
      default:
        out.push_back('N');
        break;
    }
  }
  return out;
}

namespace {

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

std::string fasta_id(const std::string& header, std::size_t line_no) {
  // id is the first whitespace-delimited token after '>'
  std::size_t start = 1;
  while (start < header.size() && std::isspace(static_cast<unsigned char>(header[start]))) ++start;
  std::size_t end = start;
  while (end < header.size() && !std::isspace(static_cast<unsigned char>(header[end]))) ++end;
  if (start == end) throw ParseError("FASTA header has no id", line_no);
  return header.substr(start, end - start);
}

}  // namespace

SequenceReader::SequenceReader(const std::filesystem::path& path, SequenceFormat format)
    : in_(path), format_(format) {
  if (!in_) throw ValidationError("cannot open sequence file: " + path.string());
}

std::optional<Sequence> SequenceReader::next() {
  if (done_) return std::nullopt;
  return format_ == SequenceFormat::fasta ? next_fasta() : next_lines();
}

std::optional<Sequence> SequenceReader::next_fasta() {
  std::string line;
  std::string header;
  std::size_t header_line = 0;

  if (have_pending_header_) {
    header = pending_header_;
    header_line = line_no_;
    have_pending_header_ = false;
  } else {
    while (std::getline(in_, line)) {
      ++line_no_;
      strip_cr(line);
      if (is_blank(line)) continue;
      if (line[0] != '>') throw ParseError("sequence data before FASTA header", line_no_);
      header = line;
      header_line = line_no_;
      break;
    }
    if (header.empty()) {
      done_ = true;
      return std::nullopt;
    }
  }

  std::string raw;
  while (std::getline(in_, line)) {
    ++line_no_;
    strip_cr(line);
    if (is_blank(line)) continue;
    if (line[0] == '>') {
      pending_header_ = line;
      have_pending_header_ = true;
      break;
    }
    raw += line;
  }
  if (raw.empty()) throw ParseError("FASTA record has no sequence data", header_line);
  return Sequence{fasta_id(header, header_line), clean_sequence(raw)};
}

std::optional<Sequence> SequenceReader::next_lines() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    strip_cr(line);
    if (is_blank(line)) continue;
    return Sequence{std::to_string(line_no_), clean_sequence(line)};
  }
  done_ = true;
  return std::nullopt;
}

std::vector<Sequence> load_sequences(const std::filesystem::path& path, SequenceFormat format) {
  SequenceReader reader(path, format);
  std::vector<Sequence> out;
  while (auto seq = reader.next()) out.push_back(std::move(*seq));
  return out;
}

const char* split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
  }
  return "?";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::train;
  if (name == "dev") return Split::dev;
  if (name == "test") return Split::test;
  throw ConfigError("unknown split: " + std::string(name));
}

LabeledDataset load_labeled_dataset(const std::filesystem::path& path, Split split,
                                    std::optional<int> num_classes) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open dataset file: " + path.string());

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty dataset file: " + path.string());
  ++line_no;
  strip_cr(line);
  if (line != "sequence,label")
    throw ParseError("expected header \"sequence,label\", got \"" + line + "\"", line_no);

  LabeledDataset ds;
  ds.split = split;
  int max_label = -1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (is_blank(line)) continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) throw ParseError("missing label column", line_no);
    const std::string_view label_text = std::string_view(line).substr(comma + 1);
    int label = 0;
    const auto [ptr, ec] =
        std::from_chars(label_text.data(), label_text.data() + label_text.size(), label);
    if (ec != std::errc{} || ptr != label_text.data() + label_text.size())
      throw ParseError("non-integer label \"" + std::string(label_text) + "\"", line_no);
    if (label < 0) throw ValidationError("negative label at line " + std::to_string(line_no));
    if (num_classes && label >= *num_classes)
      throw ValidationError("label " + std::to_string(label) + " out of range for " +
                            std::to_string(*num_classes) + " classes (line " +
                            std::to_string(line_no) + ")");
    max_label = std::max(max_label, label);
    Sequence seq{std::to_string(line_no), clean_sequence(line.substr(0, comma))};
    ds.records.push_back(LabeledRecord{std::move(seq), label});
  }
  ds.num_classes = num_classes ? *num_classes : max_label + 1;
  if (ds.num_classes < 2)
    throw ValidationError("dataset must have at least 2 classes, found " +
                          std::to_string(ds.num_classes));
  return ds;
}

void save_labeled_dataset(const LabeledDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write dataset file: " + path.string());
  out << "sequence,label\n";
  for (const auto& rec : ds.records) out << rec.seq.bases << ',' << rec.label << '\n';
}

}  // namespace dnazen::corpus
