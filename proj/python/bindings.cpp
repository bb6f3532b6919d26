#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dnazen/cli.hpp"
#include "dnazen/corpus.hpp"
#include "dnazen/eval.hpp"
#include "dnazen/ggram.hpp"
#include "dnazen/model.hpp"
#include "dnazen/rng.hpp"
#include "dnazen/tokenizer.hpp"
#include "dnazen/training.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace dnazen;

namespace {

namespace fs = std::filesystem;

std::vector<corpus::Sequence> to_sequences(const std::vector<std::string>& raw) {
  std::vector<corpus::Sequence> out;
  out.reserve(raw.size());
  int i = 0;
  for (const auto& bases : raw)
    out.push_back({"seq" + std::to_string(i++), corpus::clean_sequence(bases)});
  return out;
}

train::TaskData load_task_dir(const fs::path& dir, int num_classes) {
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

py::dict run_to_dict(const train::FinetuneResult& run) {
  py::dict d("seed"_a = run.seed, "best_dev_mcc"_a = run.best_dev_mcc,
             "dev_history"_a = run.dev_history);
  if (run.test_mcc) d["test_mcc"] = *run.test_mcc;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "G-gram enhanced genomic representation learning: BPE tokenization, "
            "association-scored G-gram extraction and matching, and a dual-encoder "
            "model with masked pre-training and fine-tuning.";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.attr("PAD_ID") = static_cast<int>(bpe::kPad);
  m.attr("UNK_ID") = static_cast<int>(bpe::kUnk);
  m.attr("CLS_ID") = static_cast<int>(bpe::kCls);
  m.attr("SEP_ID") = static_cast<int>(bpe::kSep);
  m.attr("MASK_ID") = static_cast<int>(bpe::kMask);
  m.attr("NUM_SPECIALS") = bpe::kNumSpecials;

  m.def("clean_sequence", &corpus::clean_sequence, "bases"_a,
        "Uppercase a base string and map anything outside ACGT to N.");

  // tokenizer
  py::class_<bpe::TokenVocab>(m, "TokenVocab")
      .def("__len__", [](const bpe::TokenVocab& v) { return v.size(); })
      .def("id_of", &bpe::TokenVocab::id_of, "token"_a)
      .def_readonly("id_to_token", &bpe::TokenVocab::id_to_token);

  m.def(
      "train_tokenizer",
      [](const std::vector<std::string>& sequences, int vocab_size) {
        return bpe::train_bpe(to_sequences(sequences), vocab_size);
      },
      "sequences"_a, "vocab_size"_a, "Learn a BPE vocabulary from raw base strings.");
  m.def("save_token_vocab", &bpe::save_vocab, "vocab"_a, "path"_a);
  m.def("load_token_vocab", &bpe::load_vocab, "path"_a);
  m.def(
      "encode",
      [](const bpe::TokenVocab& vocab, const std::string& sequence, bool add_specials) {
        return bpe::encode(vocab, {"py", corpus::clean_sequence(sequence)}, add_specials).ids;
      },
      "vocab"_a, "sequence"_a, "add_specials"_a = true,
      "Token ids for a base string, optionally wrapped in CLS/SEP.");
  m.def(
      "decode",
      [](const bpe::TokenVocab& vocab, const std::vector<int>& ids) {
        return bpe::decode(vocab, ids);
      },
      "vocab"_a, "ids"_a, "Concatenated token texts; special ids are skipped.");

  // ggrams
  py::class_<ggram::GGramVocab>(m, "GGramVocab")
      .def("__len__", [](const ggram::GGramVocab& v) { return v.size(); })
      .def("text", &ggram::GGramVocab::text, "id"_a, "vocab"_a);

  m.def(
      "build_ggram_vocab",
      [](const std::vector<std::string>& sequences, const bpe::TokenVocab& vocab,
         double theta, int min_len, int max_len, int64_t min_freq, int workers) {
        std::vector<std::vector<int>> tokenized;
        tokenized.reserve(sequences.size());
        for (const auto& seq : to_sequences(sequences))
          tokenized.push_back(bpe::encode(vocab, seq, false).ids);
        auto stats = ggram::count_statistics(tokenized, workers);
        ggram::BuildOptions opts;
        opts.theta = theta;
        opts.min_len = min_len;
        opts.max_len = max_len;
        opts.min_freq = min_freq;
        opts.excluded_tokens = ggram::default_excluded_tokens(vocab);
        return ggram::build_vocab(tokenized, stats, opts);
      },
      "sequences"_a, "vocab"_a, "theta"_a = 2.0, "min_len"_a = 2, "max_len"_a = 5,
      "min_freq"_a = 2, "workers"_a = 1,
      "Extract recurring token tuples whose association score clears theta.");
  m.def("save_ggram_vocab", &ggram::save_ggram_vocab, "ggrams"_a, "vocab"_a, "path"_a);
  m.def("load_ggram_vocab", &ggram::load_ggram_vocab, "path"_a);
  m.def(
      "match_ggrams",
      [](const ggram::GGramVocab& ggrams, const std::vector<int>& ids) {
        ggram::GGramMatcher matcher(ggrams);
        auto set = matcher.match(ids);
        py::list out;
        for (const auto& match : set.matches)
          out.append(py::dict("ggram_id"_a = match.ggram_id, "start"_a = match.start,
                              "end"_a = match.end));
        return out;
      },
      "ggrams"_a, "ids"_a, "Every vocabulary occurrence in a token id sequence.");

  // model
  py::class_<model::ModelConfig>(m, "ModelConfig")
      .def(py::init<>())
      .def_readwrite("hidden", &model::ModelConfig::hidden)
      .def_readwrite("token_layers", &model::ModelConfig::token_layers)
      .def_readwrite("ggram_layers", &model::ModelConfig::ggram_layers)
      .def_readwrite("heads", &model::ModelConfig::heads)
      .def_readwrite("token_vocab", &model::ModelConfig::token_vocab)
      .def_readwrite("ggram_vocab", &model::ModelConfig::ggram_vocab)
      .def_readwrite("max_positions", &model::ModelConfig::max_positions)
      .def_readwrite("max_ggrams", &model::ModelConfig::max_ggrams)
      .def_readwrite("num_classes", &model::ModelConfig::num_classes)
      .def("validate", &model::ModelConfig::validate);

  py::class_<model::ModelState>(m, "ModelState")
      .def_property_readonly("config",
                             [](const model::ModelState& s) { return s.config; });

  m.def(
      "make_model",
      [](const model::ModelConfig& config, uint64_t seed) {
        Rng rng(seed);
        return model::make_model(config, rng);
      },
      "config"_a, "seed"_a = 0);
  m.def("save_model", &model::save_model, "path"_a, "state"_a);
  m.def("load_model", &model::load_model, "path"_a);

  // training
  py::class_<train::TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("mask_ratio", &train::TrainConfig::mask_ratio)
      .def_readwrite("mask_prob", &train::TrainConfig::mask_prob)
      .def_readwrite("random_prob", &train::TrainConfig::random_prob)
      .def_readwrite("keep_prob", &train::TrainConfig::keep_prob)
      .def_readwrite("lr", &train::TrainConfig::lr)
      .def_readwrite("batch_size", &train::TrainConfig::batch_size)
      .def_readwrite("epochs", &train::TrainConfig::epochs)
      .def_readwrite("max_steps", &train::TrainConfig::max_steps)
      .def_readwrite("checkpoint_every", &train::TrainConfig::checkpoint_every)
      .def_readwrite("seed", &train::TrainConfig::seed)
      .def("validate", &train::TrainConfig::validate);

  m.def(
      "pretrain",
      [](const std::vector<std::string>& sequences, const bpe::TokenVocab& vocab,
         const ggram::GGramVocab& ggrams, const model::ModelConfig& mcfg,
         const train::TrainConfig& tcfg, const std::optional<fs::path>& out_dir,
         const model::ModelState* init) {
        auto res = train::pretrain(to_sequences(sequences), vocab, ggrams, mcfg, tcfg,
                                   out_dir.value_or(fs::path{}), init);
        py::list losses;
        for (const auto& metric : res.metrics) losses.append(metric.loss);
        return py::dict("steps"_a = res.metrics.size(), "losses"_a = losses,
                        "aborted"_a = res.aborted,
                        "checkpoint"_a = res.final_checkpoint.string());
      },
      "sequences"_a, "vocab"_a, "ggrams"_a, "model_config"_a, "train_config"_a,
      "out_dir"_a = py::none(), "init"_a = py::none(),
      "Masked pre-training over raw base strings; returns per-step losses.");

  m.def(
      "finetune",
      [](const fs::path& task_dir, const model::ModelState& init,
         const bpe::TokenVocab& vocab, const ggram::GGramVocab& ggrams,
         const train::TrainConfig& tcfg, const std::vector<uint64_t>& seeds) {
        auto data = load_task_dir(task_dir, init.config.num_classes);
        auto summary = train::finetune_seeds(data, init, vocab, ggrams, tcfg, seeds);
        py::list runs;
        for (const auto& run : summary.runs) runs.append(run_to_dict(run));
        py::dict d("mean_dev_mcc"_a = summary.mean_dev_mcc, "runs"_a = runs);
        if (summary.mean_test_mcc) d["mean_test_mcc"] = *summary.mean_test_mcc;
        return d;
      },
      "task_dir"_a, "init"_a, "vocab"_a, "ggrams"_a, "train_config"_a, "seeds"_a,
      "Supervised training from a task directory (train.csv, dev.csv, optional "
      "test.csv); one run per seed, best-dev state scored on test.");

  m.def(
      "predict",
      [](const model::ModelState& state, const bpe::TokenVocab& vocab,
         const ggram::GGramVocab& ggrams, const std::string& sequence) {
        ggram::GGramMatcher matcher(ggrams);
        auto ex = eval::prepare_example({"py", corpus::clean_sequence(sequence)}, vocab,
                                        matcher, state.config.max_positions,
                                        state.config.max_ggrams);
        return eval::predict(state, ex);
      },
      "state"_a, "vocab"_a, "ggrams"_a, "sequence"_a,
      "Class label the model assigns to a base string.");

  m.def(
      "mcc",
      [](const std::vector<std::vector<int64_t>>& table) {
        auto counts = eval::ConfusionCounts::zeros(static_cast<int>(table.size()));
        for (std::size_t g = 0; g < table.size(); ++g) {
          if (table[g].size() != table.size())
            throw ValidationError("confusion table must be square");
          for (std::size_t p = 0; p < table[g].size(); ++p)
            counts.add(static_cast<int>(g), static_cast<int>(p), table[g][p]);
        }
        return eval::mcc(counts);
      },
      "table"_a, "Matthews correlation over a gold-major confusion table.");

  m.def(
      "cli_run", [](const std::vector<std::string>& args) { return cli::run(args); },
      "args"_a, "Run a command-line subcommand in-process; returns its exit code.");
}
