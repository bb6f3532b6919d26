#include "dnazen/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <set>

#include "dnazen/common.hpp"
#include "dnazen/optimizer.hpp"

namespace dnazen::train {

using nn::Tensor;

void TrainConfig::validate() const {
  if (!(mask_ratio > 0.0 && mask_ratio < 1.0))
    throw ConfigError("mask ratio must lie strictly between 0 and 1");
  if (mask_prob < 0.0 || random_prob < 0.0 || keep_prob < 0.0)
    throw ConfigError("replacement probabilities must be nonnegative");
  if (std::abs(mask_prob + random_prob + keep_prob - 1.0) > 1e-9)
    throw ConfigError("replacement probabilities must sum to 1");
  if (lr < 0.0) throw ConfigError("learning rate must be nonnegative");
  if (batch_size < 1) throw ConfigError("batch size must be positive");
  if (epochs < 1) throw ConfigError("epoch count must be positive");
  if (max_steps < 0) throw ConfigError("max_steps must be nonnegative");
  if (checkpoint_every < 0) throw ConfigError("checkpoint_every must be nonnegative");
}

MaskedExample whole_ggram_mask(std::span<const int> tokens,
                               const ggram::GGramMatchSet& matches,
                               const bpe::TokenVocab& vocab, const TrainConfig& cfg,
                               uint64_t seed) {
  cfg.validate();
  const int n = static_cast<int>(tokens.size());
  if (matches.source_len != n)
    throw ValidationError("match set covers " + std::to_string(matches.source_len) +
                          " tokens but the sequence has " + std::to_string(n));
  for (const auto& m : matches.matches)
    if (m.start < 0 || m.end > n || m.start >= m.end)
      throw ValidationError("match span outside the sequence");
  for (int id : tokens)
    if (id < 0 || id >= vocab.size())
      throw ValidationError("token id " + std::to_string(id) + " outside vocabulary");

  MaskedExample ex;
  ex.input_ids.assign(tokens.begin(), tokens.end());
  ex.labels.assign(static_cast<std::size_t>(n), nn::kIgnoreLabel);
  ex.kept_matches = matches;

  const int64_t budget = static_cast<int64_t>(std::ceil(cfg.mask_ratio * n));
  std::vector<int> candidates;
  for (int p = 0; p < n; ++p)
    if (!vocab.is_special(tokens[p])) candidates.push_back(p);
  if (budget <= 0 || candidates.empty()) return ex;

  std::vector<std::vector<int>> covering(static_cast<std::size_t>(n));
  for (std::size_t t = 0; t < matches.matches.size(); ++t)
    for (int p = matches.matches[t].start; p < matches.matches[t].end; ++p)
      covering[static_cast<std::size_t>(p)].push_back(static_cast<int>(t));

  Rng rng(seed);
  rng.shuffle(candidates);
  std::vector<char> masked(static_cast<std::size_t>(n), 0);
  int64_t count = 0;
  auto mask_pos = [&](int p) {
    if (!masked[static_cast<std::size_t>(p)] && !vocab.is_special(tokens[p])) {
      masked[static_cast<std::size_t>(p)] = 1;
      ++count;
    }
  };
  // Stage 1+2: each seed masks itself plus every match span covering it; a
  // new seed is drawn only while the budget is unmet, so overshoot stays
  // bounded by a single seed's expansion.
  for (int c : candidates) {
    if (count >= budget) break;
    if (masked[static_cast<std::size_t>(c)]) continue;
    ex.seed_positions.push_back(c);
    mask_pos(c);
    for (int t : covering[static_cast<std::size_t>(c)])
      for (int p = matches.matches[static_cast<std::size_t>(t)].start;
           p < matches.matches[static_cast<std::size_t>(t)].end; ++p)
        mask_pos(p);
  }
  std::sort(ex.seed_positions.begin(), ex.seed_positions.end());

  // Stage 3: per masked position, independently.
  const int ordinary = vocab.size() - bpe::kNumSpecials;
  for (int p = 0; p < n; ++p) {
    if (!masked[static_cast<std::size_t>(p)]) continue;
    ex.masked_positions.push_back(p);
    ex.labels[static_cast<std::size_t>(p)] = tokens[p];
    const double u = rng.uniform();
    if (u < cfg.mask_prob) {
      ex.input_ids[static_cast<std::size_t>(p)] = bpe::kMask;
    } else if (u < cfg.mask_prob + cfg.random_prob && ordinary > 0) {
      ex.input_ids[static_cast<std::size_t>(p)] =
          bpe::kNumSpecials +
          static_cast<int>(rng.uniform_below(static_cast<uint64_t>(ordinary)));
    }  // otherwise the original id stays
  }

  // A match whose every token is masked must not be modeled: drop all matches
  // carrying its ggram id so the encoder never sees the identity it covers.
  std::set<int> withheld;
  for (const auto& m : matches.matches) {
    bool full = true;
    for (int p = m.start; p < m.end; ++p)
      if (!masked[static_cast<std::size_t>(p)]) {
        full = false;
        break;
      }
    if (full) withheld.insert(m.ggram_id);
  }
  if (!withheld.empty()) {
    ex.withheld_ggram_ids.assign(withheld.begin(), withheld.end());
    ggram::GGramMatchSet kept;
    kept.source_len = n;
    for (const auto& m : matches.matches)
      if (!withheld.count(m.ggram_id)) kept.matches.push_back(m);
    ex.kept_matches = std::move(kept);
  }
  return ex;
}

MlmLossResult mlm_loss(const Tensor& logits, std::span<const int> labels) {
  MlmLossResult res;
  res.positions = static_cast<int>(
      std::count_if(labels.begin(), labels.end(), [](int l) { return l != nn::kIgnoreLabel; }));
  res.skipped = res.positions == 0;
  res.loss = nn::cross_entropy_rows(logits, labels);
  return res;
}

std::string metrics_jsonl(std::span<const StepMetric> metrics) {
  std::string out;
  for (const auto& m : metrics) {
    nlohmann::json j{
        {"step", m.step}, {"loss", m.loss}, {"lr", m.lr}, {"masked_frac", m.masked_frac}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

namespace {

struct PreparedBatchItem {
  std::vector<int> token_ids;
  ggram::GGramMatchSet matches;
};

std::vector<PreparedBatchItem> prepare_all(const std::vector<corpus::Sequence>& sequences,
                                           const bpe::TokenVocab& tokvocab,
                                           const ggram::GGramVocab& gvocab,
                                           const model::ModelConfig& mcfg) {
  ggram::GGramMatcher matcher(gvocab);
  std::vector<PreparedBatchItem> out;
  out.reserve(sequences.size());
  for (const auto& seq : sequences) {
    auto ex = eval::prepare_example(seq, tokvocab, matcher, mcfg.max_positions,
                                    mcfg.max_ggrams);
    out.push_back({std::move(ex.token_ids), std::move(ex.matches)});
  }
  return out;
}

}  // namespace

PretrainResult pretrain(const std::vector<corpus::Sequence>& sequences,
                        const bpe::TokenVocab& tokvocab, const ggram::GGramVocab& gvocab,
                        const model::ModelConfig& mcfg, const TrainConfig& cfg,
                        const std::filesystem::path& out_dir,
                        const model::ModelState* init,
                        const std::function<void(const StepMetric&)>& on_step) {
  cfg.validate();
  mcfg.validate();
  if (sequences.empty()) throw ValidationError("pre-training corpus is empty");
  if (init && !(init->config == mcfg))
    throw ValidationError("initial state disagrees with the model configuration");

  auto data = prepare_all(sequences, tokvocab, gvocab, mcfg);

  Rng rng(cfg.seed);
  auto state = init ? model::clone(*init) : model::make_model(mcfg, rng);
  nn::Adam opt(state.parameters(), {.lr = cfg.lr});

  const int64_t n = static_cast<int64_t>(data.size());
  const int64_t steps_per_epoch = (n + cfg.batch_size - 1) / cfg.batch_size;
  const int64_t total_steps =
      cfg.max_steps > 0 ? cfg.max_steps : steps_per_epoch * cfg.epochs;

  const bool writing = !out_dir.empty();
  std::ofstream metrics_out;
  if (writing) {
    std::filesystem::create_directories(out_dir);
    metrics_out.open(out_dir / "metrics.jsonl", std::ios::binary | std::ios::trunc);
    if (!metrics_out) throw ValidationError("cannot write metrics under " + out_dir.string());
  }

  PretrainResult result;
  int64_t cursor = 0;
  for (int64_t step = 1; step <= total_steps; ++step) {
    Tensor batch_loss;
    int valid = 0;
    int64_t masked_count = 0, token_count = 0;
    for (int b = 0; b < cfg.batch_size; ++b) {
      const int64_t pos = cursor++;
      const auto idx = static_cast<std::size_t>(pos % n);
      const auto epoch = static_cast<uint64_t>(pos / n);
      auto ex = whole_ggram_mask(data[idx].token_ids, data[idx].matches, tokvocab, cfg,
                                 Rng::mix(Rng::mix(cfg.seed, epoch), idx));
      auto hidden = model::dnazen_forward(state, ex.input_ids, ex.kept_matches);
      auto item = mlm_loss(model::mlm_logits(state, hidden), ex.labels);
      masked_count += item.positions;
      token_count += static_cast<int64_t>(ex.input_ids.size());
      if (item.skipped) continue;
      batch_loss = valid ? nn::add(batch_loss, item.loss) : item.loss;
      ++valid;
    }
    StepMetric metric{step, 0.0, cfg.lr,
                      token_count ? static_cast<double>(masked_count) / token_count : 0.0};
    if (valid) {
      auto mean_loss = nn::scale(batch_loss, 1.0 / valid);
      metric.loss = mean_loss.item();
      if (!std::isfinite(metric.loss)) {
        result.aborted = true;
        break;
      }
      nn::backward(mean_loss);
      opt.step();
    }
    result.metrics.push_back(metric);
    if (on_step) on_step(metric);
    if (writing) {
      metrics_out << metrics_jsonl({&metric, 1});
      if (cfg.checkpoint_every > 0 && step % cfg.checkpoint_every == 0) {
        auto p = out_dir / ("checkpoint_" + std::to_string(step) + ".dzck");
        model::save_model(p, state);
        result.final_checkpoint = p;
      }
    }
  }
  if (writing && !result.aborted) {
    auto p = out_dir / "model.dzck";
    model::save_model(p, state);
    result.final_checkpoint = p;
  }
  result.state = std::move(state);
  return result;
}

namespace {

double dev_mcc_for(const model::ModelState& state,
                   const std::vector<PreparedBatchItem>& prepared,
                   const corpus::LabeledDataset& split) {
  auto counts = eval::ConfusionCounts::zeros(state.config.num_classes);
  for (std::size_t i = 0; i < prepared.size(); ++i) {
    eval::PreparedExample ex{prepared[i].token_ids, prepared[i].matches};
    counts.add(split.records[i].label, eval::predict(state, ex));
  }
  return eval::mcc(counts);
}

std::vector<corpus::Sequence> split_sequences(const corpus::LabeledDataset& ds) {
  std::vector<corpus::Sequence> out;
  out.reserve(ds.records.size());
  for (const auto& r : ds.records) out.push_back(r.seq);
  return out;
}

}  // namespace

FinetuneResult finetune(const TaskData& data, const model::ModelState& init,
                        const bpe::TokenVocab& tokvocab, const ggram::GGramVocab& gvocab,
                        const TrainConfig& cfg) {
  cfg.validate();
  if (data.train.records.empty()) throw ValidationError("training split is empty");
  if (data.dev.records.empty()) throw ValidationError("dev split is empty");
  std::set<int> train_classes;
  for (const auto& r : data.train.records) train_classes.insert(r.label);
  if (train_classes.size() < 2)
    throw ValidationError("training split contains a single class");
  const auto& mc = init.config;
  auto check_labels = [&](const corpus::LabeledDataset& ds) {
    for (const auto& r : ds.records)
      if (r.label < 0 || r.label >= mc.num_classes)
        throw ValidationError("label " + std::to_string(r.label) +
                              " outside the model's " + std::to_string(mc.num_classes) +
                              " classes");
  };
  check_labels(data.train);
  check_labels(data.dev);
  if (data.test) check_labels(*data.test);

  auto train_prep = prepare_all(split_sequences(data.train), tokvocab, gvocab, mc);
  auto dev_prep = prepare_all(split_sequences(data.dev), tokvocab, gvocab, mc);
  std::vector<PreparedBatchItem> test_prep;
  if (data.test) test_prep = prepare_all(split_sequences(*data.test), tokvocab, gvocab, mc);

  auto state = model::clone(init);
  nn::Adam opt(state.parameters(), {.lr = cfg.lr});

  FinetuneResult res;
  res.seed = cfg.seed;
  model::ModelState best = model::clone(state);
  double best_mcc = -2.0;
  const std::size_t n = train_prep.size();
  int64_t step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng(Rng::mix(cfg.seed, static_cast<uint64_t>(epoch)));
    shuffle_rng.shuffle(order);
    for (std::size_t at = 0; at < n; at += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop = std::min(n, at + static_cast<std::size_t>(cfg.batch_size));
      Tensor batch_loss;
      int count = 0;
      for (std::size_t i = at; i < stop; ++i) {
        const auto idx = order[i];
        model::ForwardTrace trace;
        model::dnazen_forward(state, train_prep[idx].token_ids, train_prep[idx].matches,
                              &trace);
        auto logits = model::classify(state, trace);
        const int label[1] = {data.train.records[idx].label};
        auto loss = nn::cross_entropy_rows(logits, label);
        batch_loss = count ? nn::add(batch_loss, loss) : loss;
        ++count;
      }
      auto mean_loss = nn::scale(batch_loss, 1.0 / count);
      const double loss_value = mean_loss.item();
      ++step;
      res.metrics.push_back({step, loss_value, cfg.lr, 0.0});
      if (!std::isfinite(loss_value)) continue;  // Adam would skip anyway
      nn::backward(mean_loss);
      opt.step();
    }
    const double dev = dev_mcc_for(state, dev_prep, data.dev);
    res.dev_history.push_back(dev);
    if (dev > best_mcc) {
      best_mcc = dev;
      best = model::clone(state);
    }
  }
  res.best_dev_mcc = best_mcc;
  res.state = std::move(best);
  if (data.test) res.test_mcc = dev_mcc_for(res.state, test_prep, *data.test);
  return res;
}

MultiSeedSummary finetune_seeds(const TaskData& data, const model::ModelState& init,
                                const bpe::TokenVocab& tokvocab,
                                const ggram::GGramVocab& gvocab, const TrainConfig& cfg,
                                std::span<const uint64_t> seeds) {
  if (seeds.empty()) throw ValidationError("finetune needs at least one seed");
  MultiSeedSummary summary;
  double dev_sum = 0.0, test_sum = 0.0;
  bool have_test = true;
  for (uint64_t s : seeds) {
    TrainConfig run_cfg = cfg;
    run_cfg.seed = s;
    summary.runs.push_back(finetune(data, init, tokvocab, gvocab, run_cfg));
    dev_sum += summary.runs.back().best_dev_mcc;
    if (summary.runs.back().test_mcc)
      test_sum += *summary.runs.back().test_mcc;
    else
      have_test = false;
  }
  summary.mean_dev_mcc = dev_sum / static_cast<double>(seeds.size());
  if (have_test) summary.mean_test_mcc = test_sum / static_cast<double>(seeds.size());
  return summary;
}

}  // namespace dnazen::train
