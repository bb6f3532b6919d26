#include "dnazen/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "dnazen/common.hpp"

namespace dnazen::eval {

ConfusionCounts ConfusionCounts::zeros(int classes) {
  if (classes < 1) throw ValidationError("confusion table needs at least one class");
  ConfusionCounts c;
  c.classes = classes;
  c.table.assign(static_cast<std::size_t>(classes) * classes, 0);
  return c;
}

void ConfusionCounts::add(int gold, int predicted, int64_t n) {
  if (gold < 0 || gold >= classes || predicted < 0 || predicted >= classes)
    throw ValidationError("confusion cell (" + std::to_string(gold) + "," +
                          std::to_string(predicted) + ") outside " +
                          std::to_string(classes) + " classes");
  table[static_cast<std::size_t>(gold) * classes + predicted] += n;
}

int64_t ConfusionCounts::total() const {
  int64_t s = 0;
  for (auto v : table) s += v;
  return s;
}

double mcc(const ConfusionCounts& counts) {
  if (counts.classes < 1 || counts.table.empty())
    throw ValidationError("mcc needs a populated confusion table");
  const int k = counts.classes;
  double s = 0.0, correct = 0.0;
  std::vector<double> gold(k, 0.0), pred(k, 0.0);
  for (int g = 0; g < k; ++g)
    for (int p = 0; p < k; ++p) {
      const double v = static_cast<double>(counts.at(g, p));
      if (v < 0) throw ValidationError("confusion counts must be nonnegative");
      s += v;
      gold[g] += v;
      pred[p] += v;
      if (g == p) correct += v;
    }
  if (s == 0.0) throw ValidationError("mcc needs a populated confusion table");
  double cross = 0.0, gold_sq = 0.0, pred_sq = 0.0;
  for (int c = 0; c < k; ++c) {
    cross += gold[c] * pred[c];
    gold_sq += gold[c] * gold[c];
    pred_sq += pred[c] * pred[c];
  }
  const double cov_xy = correct * s - cross;
  const double cov_xx = s * s - pred_sq;
  const double cov_yy = s * s - gold_sq;
  if (cov_xx <= 0.0 || cov_yy <= 0.0) return 0.0;  // degenerate marginal
  return cov_xy / std::sqrt(cov_xx * cov_yy);
}

PreparedExample prepare_example(const corpus::Sequence& seq, const bpe::TokenVocab& tokvocab,
                                const ggram::GGramMatcher& matcher, int max_positions,
                                int max_ggrams) {
  if (max_positions < 3)
    throw ValidationError("max_positions leaves no room for tokens between CLS and SEP");
  auto enc = bpe::encode(tokvocab, seq, false);
  const std::size_t body = static_cast<std::size_t>(max_positions) - 2;
  if (enc.ids.size() > body) enc.ids.resize(body);
  PreparedExample ex;
  ex.token_ids.reserve(enc.ids.size() + 2);
  ex.token_ids.push_back(bpe::kCls);
  ex.token_ids.insert(ex.token_ids.end(), enc.ids.begin(), enc.ids.end());
  ex.token_ids.push_back(bpe::kSep);
  ex.matches = ggram::cap_matches(matcher.match(ex.token_ids),
                                  static_cast<std::size_t>(max_ggrams));
  return ex;
}

int predict(const model::ModelState& state, const PreparedExample& ex) {
  model::ForwardTrace trace;
  model::dnazen_forward(state, ex.token_ids, ex.matches, &trace);
  auto logits = model::classify(state, trace);
  auto v = logits.values();
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

EvalReport evaluate(std::span<const model::ModelState> models, std::span<const uint64_t> seeds,
                    std::span<const corpus::LabeledDataset> splits,
                    const bpe::TokenVocab& tokvocab, const ggram::GGramVocab& gvocab,
                    const std::string& task, const std::string& dataset) {
  if (models.empty()) throw ValidationError("evaluate needs at least one checkpoint");
  if (splits.empty()) throw ValidationError("evaluate needs at least one split");
  if (!seeds.empty() && seeds.size() != models.size())
    throw ValidationError("seed list and checkpoint list differ in length");
  const auto& cfg = models[0].config;
  for (const auto& m : models)
    if (m.config.num_classes != cfg.num_classes)
      throw ValidationError("checkpoints disagree on class count");
  for (const auto& split : splits)
    if (split.num_classes != cfg.num_classes)
      throw ValidationError("dataset has " + std::to_string(split.num_classes) +
                            " classes but the model was built for " +
                            std::to_string(cfg.num_classes));

  ggram::GGramMatcher matcher(gvocab);
  EvalReport report;
  for (const auto& split : splits) {
    ReportRow row;
    row.task = task;
    row.dataset = dataset;
    row.split = corpus::split_name(split.split);
    row.metric = "mcc-covariance";
    for (std::size_t i = 0; i < models.size(); ++i)
      row.seeds.push_back(seeds.empty() ? static_cast<uint64_t>(i) : seeds[i]);

    std::vector<PreparedExample> prepared;
    prepared.reserve(split.records.size());
    for (const auto& rec : split.records)
      prepared.push_back(
          prepare_example(rec.seq, tokvocab, matcher, cfg.max_positions, cfg.max_ggrams));

    double sum = 0.0;
    for (const auto& m : models) {
      auto counts = ConfusionCounts::zeros(cfg.num_classes);
      for (std::size_t i = 0; i < prepared.size(); ++i)
        counts.add(split.records[i].label, predict(m, prepared[i]));
      const double value = mcc(counts);
      row.values.push_back(value);
      sum += value;
    }
    row.mean = sum / static_cast<double>(models.size());
    row.avg_ggrams = ggram::ggram_stats(split, tokvocab, gvocab).avg;
    report.rows.push_back(std::move(row));
  }
  return report;
}

namespace {

template <class T, class F>
std::string joined(const std::vector<T>& xs, F format) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ";";
    out += format(xs[i]);
  }
  return out;
}

std::string fixed6(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << v;
  return os.str();
}

}  // namespace

std::string report_tsv(const EvalReport& report) {
  std::string out =
      "Task\tDataset\tSplit\tMetric\tSeeds\tValues\tMean\tAvg. G-gram per Case\n";
  for (const auto& r : report.rows) {
    out += r.task + "\t" + r.dataset + "\t" + r.split + "\t" + r.metric + "\t";
    out += joined(r.seeds, [](uint64_t s) { return std::to_string(s); }) + "\t";
    out += joined(r.values, fixed6) + "\t";
    out += fixed6(r.mean) + "\t";
    std::ostringstream avg;
    avg << std::fixed << std::setprecision(1) << r.avg_ggrams;
    out += avg.str() + "\n";
  }
  return out;
}

std::string report_json(const EvalReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows)
    rows.push_back({{"task", r.task},
                    {"dataset", r.dataset},
                    {"split", r.split},
                    {"metric", r.metric},
                    {"seeds", r.seeds},
                    {"values", r.values},
                    {"mean", r.mean},
                    {"avg_ggrams_per_case", r.avg_ggrams}});
  return nlohmann::json{{"rows", rows}}.dump(2);
}

std::vector<ExampleAttention> attention_report(const model::ModelState& state,
                                               std::span<const corpus::Sequence> examples,
                                               const bpe::TokenVocab& tokvocab,
                                               const ggram::GGramVocab& gvocab,
                                               const std::string& motif, int top_k) {
  ggram::GGramMatcher matcher(gvocab);
  std::vector<ExampleAttention> out;
  out.reserve(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    ExampleAttention ea;
    ea.example_index = static_cast<int>(i);
    auto ex = prepare_example(examples[i], tokvocab, matcher, state.config.max_positions,
                              state.config.max_ggrams);
    if (ex.matches.matches.empty()) {
      ea.notice = "no ggram matches in this example";
      out.push_back(std::move(ea));
      continue;
    }
    ea.has_matches = true;
    std::vector<int> ids;
    ids.reserve(ex.matches.matches.size());
    for (const auto& m : ex.matches.matches) ids.push_back(m.ggram_id);
    model::ForwardTrace trace;
    model::ggram_encoder_forward(state, ids, &trace);
    auto summary = model::ggram_attention_summary(trace);
    for (const auto& layer_weights : summary) {
      LayerAttention layer;
      for (std::size_t t = 0; t < layer_weights.size(); ++t) {
        AttentionEntry e;
        e.ggram_id = ids[t];
        e.text = gvocab.text(ids[t], tokvocab);
        e.weight = layer_weights[t];
        e.motif = !motif.empty() && e.text.find(motif) != std::string::npos;
        layer.entries.push_back(std::move(e));
      }
      std::sort(layer.entries.begin(), layer.entries.end(), [](const auto& a, const auto& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        return a.ggram_id < b.ggram_id;
      });
      if (top_k > 0 && layer.entries.size() > static_cast<std::size_t>(top_k))
        layer.entries.resize(static_cast<std::size_t>(top_k));
      ea.layers.push_back(std::move(layer));
    }
    out.push_back(std::move(ea));
  }
  return out;
}

}  // namespace dnazen::eval
