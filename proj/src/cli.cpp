#include "dnazen/cli.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dnazen/config.hpp"
#include "dnazen/corpus.hpp"
#include "dnazen/eval.hpp"
#include "dnazen/ggram.hpp"
#include "dnazen/model.hpp"
#include "dnazen/tokenizer.hpp"
#include "dnazen/training.hpp"

namespace dnazen::cli {

namespace {

namespace fs = std::filesystem;
using config::PipelineConfig;

[[noreturn]] void missing(const char* what, const char* flag) {
  throw ValidationError(std::string(what) + " is not set; pass " + flag +
                        " or set it in the config file");
}

const std::string& require(const std::string& value, const char* what, const char* flag) {
  if (value.empty()) missing(what, flag);
  return value;
}

corpus::SequenceFormat pick_format(const std::string& flag, const fs::path& file) {
  if (flag != "auto") return corpus::parse_format(flag);
  std::string ext = file.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".fa" || ext == ".fasta" || ext == ".fna") return corpus::SequenceFormat::fasta;
  return corpus::SequenceFormat::lines;
}

std::vector<corpus::Sequence> read_corpus(const std::string& path, const std::string& format) {
  const fs::path p = require(path, "the corpus path", "--corpus");
  if (!fs::exists(p)) throw ValidationError("corpus file " + p.string() + " does not exist");
  return corpus::load_sequences(p, pick_format(format, p));
}

// The resolved configuration goes to the log before any work starts.
void echo_config(const PipelineConfig& cfg, const std::vector<std::string>& extras = {}) {
  std::cerr << "# effective configuration (defaults < config file < DNAZEN_* < flags)\n"
            << config::to_toml(cfg);
  for (const auto& line : extras) std::cerr << "# " << line << '\n';
  std::cerr.flush();
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  const fs::path p(out_path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + out_path);
  out << text;
}

bpe::TokenVocab load_token_vocab(const PipelineConfig& cfg) {
  return bpe::load_vocab(require(cfg.paths.token_vocab, "the token vocabulary path",
                                 "--token-vocab"));
}

ggram::GGramVocab load_ggram_vocab_file(const PipelineConfig& cfg) {
  return ggram::load_ggram_vocab(require(cfg.paths.ggram_vocab, "the ggram vocabulary path",
                                         "--ggram-vocab"));
}

// model.token_vocab/ggram_vocab are 0 by default: derive them from the
// vocabulary files; explicit nonzero values must agree with those files.
model::ModelConfig resolve_model_config(const PipelineConfig& cfg, const bpe::TokenVocab& tok,
                                        const ggram::GGramVocab& gv) {
  model::ModelConfig mc = cfg.model;
  if (mc.token_vocab == 0)
    mc.token_vocab = tok.size();
  else if (mc.token_vocab != tok.size())
    throw ValidationError("model.token_vocab (" + std::to_string(mc.token_vocab) +
                          ") disagrees with the token vocabulary file (" +
                          std::to_string(tok.size()) + " entries)");
  if (mc.ggram_vocab == 0)
    mc.ggram_vocab = gv.size();
  else if (mc.ggram_vocab != gv.size())
    throw ValidationError("model.ggram_vocab (" + std::to_string(mc.ggram_vocab) +
                          ") disagrees with the ggram vocabulary file (" +
                          std::to_string(gv.size()) + " entries)");
  mc.validate();
  return mc;
}

void check_checkpoint_vocabs(const model::ModelState& state, const bpe::TokenVocab& tok,
                             const ggram::GGramVocab& gv, const std::string& path) {
  if (state.config.token_vocab != tok.size())
    throw ValidationError("checkpoint " + path + " was trained with " +
                          std::to_string(state.config.token_vocab) +
                          " tokens but the vocabulary file has " + std::to_string(tok.size()));
  if (state.config.ggram_vocab != gv.size())
    throw ValidationError("checkpoint " + path + " was trained with " +
                          std::to_string(state.config.ggram_vocab) +
                          " ggrams but the vocabulary file has " + std::to_string(gv.size()));
}

// train.csv + dev.csv required, test.csv optional; every split is validated
// against the class count the model expects.
train::TaskData load_task(const std::string& dir_flag, int num_classes) {
  const fs::path dir = require(dir_flag, "the task directory", "--task");
  auto load = [&](const char* name, corpus::Split split) {
    const fs::path p = dir / name;
    if (!fs::exists(p)) throw ValidationError("task file " + p.string() + " is missing");
    return corpus::load_labeled_dataset(p, split, num_classes);
  };
  train::TaskData data;
  data.train = load("train.csv", corpus::Split::train);
  data.dev = load("dev.csv", corpus::Split::dev);
  if (fs::exists(dir / "test.csv"))
    data.test = corpus::load_labeled_dataset(dir / "test.csv", corpus::Split::test, num_classes);
  return data;
}

int run_tokenizer_train(const PipelineConfig& cfg, const std::string& format,
                        const std::string& import_path) {
  const auto& out = require(cfg.paths.token_vocab, "the vocabulary output path",
                            "--token-vocab");
  if (!import_path.empty()) {
    echo_config(cfg, {"importing an existing vocabulary from " + import_path});
    auto vocab = bpe::load_vocab(import_path);
    bpe::save_vocab(vocab, out);
    std::cout << "imported token vocabulary: " << vocab.size() << " entries -> " << out << '\n';
    return 0;
  }
  echo_config(cfg, {"corpus format = " + format});
  auto sequences = read_corpus(cfg.paths.corpus, format);
  auto vocab = bpe::train_bpe(sequences, cfg.tokenizer.vocab_size);
  bpe::save_vocab(vocab, out);
  std::cout << "trained token vocabulary: " << vocab.size() << " entries -> " << out << '\n';
  return 0;
}

int run_ggram_build(const PipelineConfig& cfg, const std::string& format) {
  if (cfg.workers < 1) throw ConfigError("workers must be positive");
  echo_config(cfg, {"corpus format = " + format});
  const auto& out = require(cfg.paths.ggram_vocab, "the ggram vocabulary output path",
                            "--ggram-vocab");
  auto tok = load_token_vocab(cfg);
  auto sequences = read_corpus(cfg.paths.corpus, format);
  std::vector<std::vector<int>> tokenized;
  tokenized.reserve(sequences.size());
  for (const auto& seq : sequences) tokenized.push_back(bpe::encode(tok, seq, false).ids);
  auto stats = ggram::count_statistics(tokenized, cfg.workers);
  ggram::BuildOptions opts;
  opts.theta = cfg.extraction.theta;
  opts.min_len = cfg.extraction.min_len;
  opts.max_len = cfg.extraction.max_len;
  opts.min_freq = cfg.extraction.min_freq;
  opts.excluded_tokens = ggram::default_excluded_tokens(tok);
  auto vocab = ggram::build_vocab(tokenized, stats, opts);
  ggram::save_ggram_vocab(vocab, tok, out);
  std::cout << "ggram vocabulary: " << vocab.size() << " entries (lengths " << opts.min_len
            << "-" << opts.max_len << ", theta " << opts.theta << ", min freq "
            << opts.min_freq << ") -> " << out << '\n';
  return 0;
}

int run_ggram_match(const PipelineConfig& cfg, const std::string& format,
                    const std::vector<std::string>& raw_sequences,
                    const std::string& out_path) {
  echo_config(cfg);
  auto tok = load_token_vocab(cfg);
  auto gv = load_ggram_vocab_file(cfg);
  ggram::GGramMatcher matcher(gv);

  std::vector<corpus::Sequence> sequences;
  if (!raw_sequences.empty()) {
    int i = 0;
    for (const auto& bases : raw_sequences)
      sequences.push_back({"arg" + std::to_string(i++), corpus::clean_sequence(bases)});
  } else {
    sequences = read_corpus(cfg.paths.corpus, format);
  }

  std::string out;
  for (const auto& seq : sequences) {
    auto encoded = bpe::encode(tok, seq, false);
    auto matches = matcher.match(encoded.ids);
    nlohmann::json entry{{"id", seq.id}, {"tokens", encoded.ids.size()},
                         {"matches", nlohmann::json::array()}};
    for (const auto& m : matches.matches)
      entry["matches"].push_back({{"ggram_id", m.ggram_id},
                                  {"start", m.start},
                                  {"end", m.end},
                                  {"text", gv.text(m.ggram_id, tok)}});
    out += entry.dump();
    out += '\n';
  }
  write_output(out, out_path);
  return 0;
}

int run_ggram_stats(const PipelineConfig& cfg, const std::string& out_path) {
  echo_config(cfg);
  auto tok = load_token_vocab(cfg);
  auto gv = load_ggram_vocab_file(cfg);
  const fs::path dir = require(cfg.paths.dataset, "the task directory", "--task");
  std::vector<ggram::SplitStats> rows;
  for (auto split : {corpus::Split::train, corpus::Split::dev, corpus::Split::test}) {
    const fs::path p = dir / (std::string(corpus::split_name(split)) + ".csv");
    if (!fs::exists(p)) continue;
    auto ds = corpus::load_labeled_dataset(p, split);
    rows.push_back(ggram::ggram_stats(ds, tok, gv));
  }
  if (rows.empty())
    throw ValidationError("no train.csv/dev.csv/test.csv under " + dir.string());
  write_output(ggram::stats_table_tsv(rows), out_path);
  return 0;
}

int run_pretrain(PipelineConfig& cfg, const std::string& format,
                 const std::string& init_path) {
  cfg.training.seed = cfg.seed;
  echo_config(cfg, init_path.empty()
                       ? std::vector<std::string>{"corpus format = " + format}
                       : std::vector<std::string>{"corpus format = " + format,
                                                  "initial state from " + init_path});
  const auto& out_dir = require(cfg.paths.out_dir, "the output directory", "--out-dir");
  auto tok = load_token_vocab(cfg);
  auto gv = load_ggram_vocab_file(cfg);
  auto mcfg = resolve_model_config(cfg, tok, gv);
  auto sequences = read_corpus(cfg.paths.corpus, format);

  std::optional<model::ModelState> init;
  if (!init_path.empty()) {
    init = model::load_model(init_path);
    check_checkpoint_vocabs(*init, tok, gv, init_path);
  }

  const int64_t total =
      cfg.training.max_steps > 0
          ? cfg.training.max_steps
          : (static_cast<int64_t>(sequences.size()) + cfg.training.batch_size - 1) /
                cfg.training.batch_size * cfg.training.epochs;
  const int64_t stride = std::max<int64_t>(1, total / 10);
  auto progress = [&](const train::StepMetric& m) {
    if (m.step % stride == 0 || m.step == total)
      std::cerr << "step " << m.step << "/" << total << " loss " << m.loss << '\n';
  };

  auto res = train::pretrain(sequences, tok, gv, mcfg, cfg.training, out_dir,
                             init ? &*init : nullptr, progress);
  if (res.aborted) {
    std::string note = "pre-training aborted at step " +
                       std::to_string(res.metrics.size() + 1) + ": non-finite loss";
    if (!res.final_checkpoint.empty())
      note += "; last good checkpoint " + res.final_checkpoint.string();
    throw NumericError(note);
  }
  std::cout << "pre-training complete: " << res.metrics.size() << " steps, final loss "
            << (res.metrics.empty() ? 0.0 : res.metrics.back().loss) << " -> "
            << res.final_checkpoint.string() << '\n';
  return 0;
}

int run_finetune(PipelineConfig& cfg, std::vector<uint64_t> seeds) {
  cfg.training.seed = cfg.seed;
  if (seeds.empty()) seeds.push_back(cfg.seed);
  echo_config(cfg, cfg.paths.checkpoint.empty()
                       ? std::vector<std::string>{"no checkpoint given: starting from a "
                                                  "fresh random state"}
                       : std::vector<std::string>{"model configuration taken from checkpoint " +
                                                  cfg.paths.checkpoint});

  auto tok = load_token_vocab(cfg);
  auto gv = load_ggram_vocab_file(cfg);
  std::optional<model::ModelState> init;
  if (!cfg.paths.checkpoint.empty()) {
    init = model::load_model(cfg.paths.checkpoint);
    check_checkpoint_vocabs(*init, tok, gv, cfg.paths.checkpoint);
  } else {
    auto mcfg = resolve_model_config(cfg, tok, gv);
    Rng rng(cfg.seed);
    init = model::make_model(mcfg, rng);
  }

  auto data = load_task(cfg.paths.dataset, init->config.num_classes);
  auto summary = train::finetune_seeds(data, *init, tok, gv, cfg.training, seeds);

  for (const auto& run : summary.runs) {
    std::cerr << "seed " << run.seed << " dev mcc by epoch:";
    for (double v : run.dev_history) std::cerr << ' ' << v;
    std::cerr << '\n';
  }

  std::ostringstream table;
  table << "Seed\tBest dev MCC\tTest MCC\n";
  for (const auto& run : summary.runs) {
    table << run.seed << '\t' << run.best_dev_mcc << '\t';
    if (run.test_mcc)
      table << *run.test_mcc;
    else
      table << "-";
    table << '\n';
  }
  table << "mean\t" << summary.mean_dev_mcc << '\t';
  if (summary.mean_test_mcc)
    table << *summary.mean_test_mcc;
  else
    table << "-";
  table << '\n';
  std::cout << table.str();

  if (!cfg.paths.out_dir.empty()) {
    const fs::path dir(cfg.paths.out_dir);
    fs::create_directories(dir);
    nlohmann::json doc{{"mean_dev_mcc", summary.mean_dev_mcc},
                       {"runs", nlohmann::json::array()}};
    if (summary.mean_test_mcc) doc["mean_test_mcc"] = *summary.mean_test_mcc;
    for (const auto& run : summary.runs) {
      const fs::path model_path = dir / ("finetune_seed" + std::to_string(run.seed) + ".dzck");
      model::save_model(model_path, run.state);
      nlohmann::json entry{{"seed", run.seed},
                           {"best_dev_mcc", run.best_dev_mcc},
                           {"dev_history", run.dev_history},
                           {"model", model_path.string()}};
      if (run.test_mcc) entry["test_mcc"] = *run.test_mcc;
      doc["runs"].push_back(entry);
    }
    std::ofstream out(dir / "finetune_summary.json", std::ios::binary);
    if (!out) throw ValidationError("cannot write under " + dir.string());
    out << doc.dump(2) << '\n';
  }
  return 0;
}

int run_eval(const PipelineConfig& cfg, const std::vector<std::string>& checkpoints,
             std::vector<uint64_t> seeds, const std::vector<std::string>& split_names,
             std::string task_name, std::string dataset_name, const std::string& json_path) {
  echo_config(cfg);
  auto tok = load_token_vocab(cfg);
  auto gv = load_ggram_vocab_file(cfg);

  std::vector<std::string> paths = checkpoints;
  if (paths.empty() && !cfg.paths.checkpoint.empty()) paths.push_back(cfg.paths.checkpoint);
  if (paths.empty()) missing("the checkpoint path", "--checkpoint");
  std::vector<model::ModelState> models;
  for (const auto& p : paths) {
    models.push_back(model::load_model(p));
    check_checkpoint_vocabs(models.back(), tok, gv, p);
  }

  const fs::path dir = require(cfg.paths.dataset, "the task directory", "--task");
  if (dataset_name.empty()) dataset_name = dir.filename().string();
  std::vector<corpus::LabeledDataset> splits;
  if (split_names.empty()) {
    for (auto split : {corpus::Split::train, corpus::Split::dev, corpus::Split::test}) {
      const fs::path p = dir / (std::string(corpus::split_name(split)) + ".csv");
      if (fs::exists(p))
        splits.push_back(corpus::load_labeled_dataset(p, split,
                                                      models.front().config.num_classes));
    }
    if (splits.empty())
      throw ValidationError("no train.csv/dev.csv/test.csv under " + dir.string());
  } else {
    for (const auto& name : split_names) {
      auto split = corpus::parse_split(name);
      const fs::path p = dir / (std::string(corpus::split_name(split)) + ".csv");
      if (!fs::exists(p)) throw ValidationError("task file " + p.string() + " is missing");
      splits.push_back(corpus::load_labeled_dataset(p, split,
                                                    models.front().config.num_classes));
    }
  }

  auto report = eval::evaluate(models, seeds, splits, tok, gv, task_name, dataset_name);
  std::cout << eval::report_tsv(report);
  if (!json_path.empty()) write_output(eval::report_json(report) + "\n", json_path);
  return 0;
}

int run_attention_report(const PipelineConfig& cfg, const std::string& format,
                         const std::vector<std::string>& raw_sequences,
                         const std::string& motif, int top_k, const std::string& out_path) {
  echo_config(cfg, motif.empty() ? std::vector<std::string>{}
                                 : std::vector<std::string>{"motif = " + motif});
  auto tok = load_token_vocab(cfg);
  auto gv = load_ggram_vocab_file(cfg);
  auto state = model::load_model(
      require(cfg.paths.checkpoint, "the checkpoint path", "--checkpoint"));
  check_checkpoint_vocabs(state, tok, gv, cfg.paths.checkpoint);

  std::vector<corpus::Sequence> sequences;
  if (!raw_sequences.empty()) {
    int i = 0;
    for (const auto& bases : raw_sequences)
      sequences.push_back({"arg" + std::to_string(i++), corpus::clean_sequence(bases)});
  } else {
    sequences = read_corpus(cfg.paths.corpus, format);
  }

  auto report = eval::attention_report(state, sequences, tok, gv, motif, top_k);
  nlohmann::json doc = nlohmann::json::array();
  for (std::size_t i = 0; i < report.size(); ++i) {
    const auto& ex = report[i];
    nlohmann::json entry{{"example_index", ex.example_index},
                         {"id", sequences[i].id},
                         {"has_matches", ex.has_matches},
                         {"layers", nlohmann::json::array()}};
    if (!ex.notice.empty()) entry["notice"] = ex.notice;
    for (std::size_t l = 0; l < ex.layers.size(); ++l) {
      nlohmann::json layer{{"layer", l + 1}, {"entries", nlohmann::json::array()}};
      for (const auto& e : ex.layers[l].entries)
        layer["entries"].push_back({{"ggram_id", e.ggram_id},
                                    {"text", e.text},
                                    {"weight", e.weight},
                                    {"motif", e.motif}});
      entry["layers"].push_back(layer);
    }
    doc.push_back(entry);
  }
  write_output(doc.dump(2) + "\n", out_path);
  return 0;
}

int dispatch(const std::vector<std::string>& args) {
  PipelineConfig cfg;
  try {
    // --config applies before every other source, wherever it appears
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config") {
        if (i + 1 >= args.size()) throw ValidationError("--config needs a file path");
        cfg = config::load_file(args[i + 1]);
      } else if (args[i].starts_with("--config=")) {
        cfg = config::load_file(args[i].substr(9));
      }
    }
    config::apply_env(cfg);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  CLI::App app{"DNAZEN: G-gram enhanced genomic representation pipeline"};
  app.name("dnazen");
  app.require_subcommand(1);
  std::string config_sink;
  app.add_option("--config", config_sink, "TOML config file, applied before flags");

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_sink, "TOML config file, applied before flags");
    cmd->add_option("--seed", cfg.seed, "global random seed");
  };
  auto add_vocab_flags = [&](CLI::App* cmd) {
    cmd->add_option("--token-vocab", cfg.paths.token_vocab, "token vocabulary JSON");
    cmd->add_option("--ggram-vocab", cfg.paths.ggram_vocab, "ggram vocabulary JSON-lines");
  };
  auto add_model_flags = [&](CLI::App* cmd) {
    cmd->add_option("--hidden", cfg.model.hidden, "hidden width");
    cmd->add_option("--token-layers", cfg.model.token_layers, "token encoder depth");
    cmd->add_option("--ggram-layers", cfg.model.ggram_layers, "ggram encoder depth");
    cmd->add_option("--heads", cfg.model.heads, "attention heads");
    cmd->add_option("--max-positions", cfg.model.max_positions, "token sequence capacity");
    cmd->add_option("--max-ggrams", cfg.model.max_ggrams, "matched ggram capacity");
    cmd->add_option("--num-classes", cfg.model.num_classes, "classification classes");
  };

  std::string format = "auto";
  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", format, "corpus format")
        ->check(CLI::IsMember({"auto", "fasta", "lines"}));
  };

  // tokenizer-train
  auto* tok_cmd = app.add_subcommand("tokenizer-train",
                                     "learn a BPE token vocabulary from a corpus");
  std::string import_vocab;
  add_common(tok_cmd);
  add_format(tok_cmd);
  tok_cmd->add_option("--corpus", cfg.paths.corpus, "raw sequence corpus");
  tok_cmd->add_option("--vocab-size", cfg.tokenizer.vocab_size, "target vocabulary size");
  tok_cmd->add_option("--out,--token-vocab", cfg.paths.token_vocab,
                      "where to write the vocabulary");
  tok_cmd->add_option("--import-vocab", import_vocab,
                      "copy an existing vocabulary file instead of training");
  tok_cmd->callback([&] { run_tokenizer_train(cfg, format, import_vocab); });

  // ggram-build
  auto* build_cmd = app.add_subcommand("ggram-build",
                                       "extract a G-gram vocabulary by association score");
  add_common(build_cmd);
  add_format(build_cmd);
  build_cmd->add_option("--corpus", cfg.paths.corpus, "raw sequence corpus");
  build_cmd->add_option("--token-vocab", cfg.paths.token_vocab, "token vocabulary JSON");
  build_cmd->add_option("--out,--ggram-vocab", cfg.paths.ggram_vocab,
                        "where to write the ggram vocabulary");
  build_cmd->add_option("--theta", cfg.extraction.theta, "association threshold");
  build_cmd->add_option("--min-len", cfg.extraction.min_len, "shortest kept ggram");
  build_cmd->add_option("--max-len", cfg.extraction.max_len, "longest kept ggram");
  build_cmd->add_option("--min-freq", cfg.extraction.min_freq, "lowest kept frequency");
  build_cmd->add_option("--workers", cfg.workers, "statistics counting workers");
  build_cmd->callback([&] { run_ggram_build(cfg, format); });

  // ggram-match
  auto* match_cmd = app.add_subcommand("ggram-match",
                                       "report vocabulary matches in sequences as JSON lines");
  std::vector<std::string> match_sequences;
  std::string match_out;
  add_common(match_cmd);
  add_format(match_cmd);
  add_vocab_flags(match_cmd);
  match_cmd->add_option("--corpus", cfg.paths.corpus, "sequences to scan");
  match_cmd->add_option("--sequence", match_sequences,
                        "scan this base string instead of a corpus file");
  match_cmd->add_option("--out", match_out, "output file (default stdout)");
  match_cmd->callback([&] { run_ggram_match(cfg, format, match_sequences, match_out); });

  // ggram-stats
  auto* stats_cmd = app.add_subcommand("ggram-stats",
                                       "per-split match statistics for a labeled task");
  std::string stats_out;
  add_common(stats_cmd);
  add_vocab_flags(stats_cmd);
  stats_cmd->add_option("--task,--dataset", cfg.paths.dataset,
                        "task directory with train/dev/test CSVs");
  stats_cmd->add_option("--out", stats_out, "output file (default stdout)");
  stats_cmd->callback([&] { run_ggram_stats(cfg, stats_out); });

  // pretrain
  auto* pre_cmd = app.add_subcommand("pretrain",
                                     "masked-language-model pre-training over a corpus");
  std::string init_path;
  add_common(pre_cmd);
  add_format(pre_cmd);
  add_vocab_flags(pre_cmd);
  add_model_flags(pre_cmd);
  pre_cmd->add_option("--corpus", cfg.paths.corpus, "raw sequence corpus");
  pre_cmd->add_option("--out-dir", cfg.paths.out_dir, "artifact directory");
  pre_cmd->add_option("--init", init_path, "checkpoint to continue from");
  pre_cmd->add_option("--lr", cfg.training.lr, "learning rate");
  pre_cmd->add_option("--batch-size", cfg.training.batch_size, "examples per step");
  pre_cmd->add_option("--epochs", cfg.training.epochs, "corpus passes");
  pre_cmd->add_option("--max-steps", cfg.training.max_steps,
                      "stop after this many steps (0 = run every epoch)");
  pre_cmd->add_option("--checkpoint-every", cfg.training.checkpoint_every,
                      "steps between periodic checkpoints");
  pre_cmd->add_option("--mask-ratio", cfg.training.mask_ratio, "masked token fraction");
  pre_cmd->callback([&] { run_pretrain(cfg, format, init_path); });

  // finetune
  auto* fine_cmd = app.add_subcommand("finetune",
                                      "supervised classification from an initial state");
  std::vector<uint64_t> fine_seeds;
  add_common(fine_cmd);
  add_vocab_flags(fine_cmd);
  add_model_flags(fine_cmd);
  fine_cmd->add_option("--task,--dataset", cfg.paths.dataset,
                       "task directory with train/dev/test CSVs");
  fine_cmd->add_option("--checkpoint", cfg.paths.checkpoint, "initial (pre-trained) state");
  fine_cmd->add_option("--out-dir", cfg.paths.out_dir,
                       "where to save fine-tuned models and the summary");
  fine_cmd->add_option("--seeds", fine_seeds, "run once per seed (comma separated)")
      ->delimiter(',');
  fine_cmd->add_option("--lr", cfg.training.lr, "learning rate");
  fine_cmd->add_option("--batch-size", cfg.training.batch_size, "examples per step");
  fine_cmd->add_option("--epochs", cfg.training.epochs, "training epochs");
  fine_cmd->callback([&] { run_finetune(cfg, fine_seeds); });

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "score checkpoints on a labeled task");
  std::vector<std::string> eval_checkpoints, eval_splits;
  std::vector<uint64_t> eval_seeds;
  std::string eval_task_name, eval_dataset_name, eval_json;
  add_common(eval_cmd);
  add_vocab_flags(eval_cmd);
  eval_cmd->add_option("--checkpoint", eval_checkpoints, "checkpoint to score (repeatable)");
  eval_cmd->add_option("--task,--dataset", cfg.paths.dataset,
                       "task directory with train/dev/test CSVs");
  eval_cmd->add_option("--splits", eval_splits,
                       "splits to score (default: every split present)")
      ->delimiter(',');
  eval_cmd->add_option("--seeds", eval_seeds,
                       "seed labels parallel to --checkpoint (default 0,1,...)")
      ->delimiter(',');
  eval_cmd->add_option("--task-name", eval_task_name, "task label for the report");
  eval_cmd->add_option("--dataset-name", eval_dataset_name,
                       "dataset label for the report (default: task directory name)");
  eval_cmd->add_option("--json", eval_json, "also write the report as JSON here");
  eval_cmd->callback([&] {
    run_eval(cfg, eval_checkpoints, eval_seeds, eval_splits, eval_task_name,
             eval_dataset_name, eval_json);
  });

  // attention-report
  auto* attn_cmd = app.add_subcommand("attention-report",
                                      "rank ggram attention per example as JSON");
  std::vector<std::string> attn_sequences;
  std::string attn_motif, attn_out;
  int attn_top_k = 0;
  add_common(attn_cmd);
  add_format(attn_cmd);
  add_vocab_flags(attn_cmd);
  attn_cmd->add_option("--checkpoint", cfg.paths.checkpoint, "model to inspect");
  attn_cmd->add_option("--corpus,--input", cfg.paths.corpus, "sequences to inspect");
  attn_cmd->add_option("--sequence", attn_sequences,
                       "inspect this base string instead of a corpus file");
  attn_cmd->add_option("--motif", attn_motif, "flag ggrams containing this base string");
  attn_cmd->add_option("--top-k", attn_top_k, "keep only the strongest entries per layer")
      ->check(CLI::NonNegativeNumber);
  attn_cmd->add_option("--out", attn_out, "output file (default stdout)");
  attn_cmd->callback([&] {
    run_attention_report(cfg, format, attn_sequences, attn_motif, attn_top_k, attn_out);
  });

  if (!args.empty() && !args.front().starts_with('-') &&
      app.get_subcommand_no_throw(args.front()) == nullptr) {
    std::cerr << "error: unknown subcommand '" << args.front() << "'\n\n" << app.help();
    return 1;
  }

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.push_back("dnazen");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(argv_storage.size());
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  const int code = dispatch(args);
  // embedders (tests, python) read the streams right after the call returns
  std::cout.flush();
  std::cerr.flush();
  return code;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  args.reserve(argc > 0 ? static_cast<std::size_t>(argc - 1) : 0);
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace dnazen::cli
