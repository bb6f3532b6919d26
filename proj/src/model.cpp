#include "dnazen/model.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <sstream>

#include "dnazen/checkpoint.hpp"
#include "dnazen/common.hpp"

namespace dnazen::model {

using nn::Tensor;

void ModelConfig::validate() const {
  if (hidden <= 0) throw ConfigError("hidden size must be positive");
  if (heads <= 0) throw ConfigError("head count must be positive");
  if (hidden % heads != 0)
    throw ConfigError("head count " + std::to_string(heads) + " must divide hidden size " +
                      std::to_string(hidden));
  if (token_layers < 1) throw ConfigError("token encoder needs at least one layer");
  if (ggram_layers < 1) throw ConfigError("ggram encoder needs at least one layer");
  if (ggram_layers > token_layers)
    throw ConfigError("ggram encoder depth " + std::to_string(ggram_layers) +
                      " exceeds token encoder depth " + std::to_string(token_layers));
  if (token_vocab < 1) throw ConfigError("token vocabulary must be nonempty");
  if (ggram_vocab < 1) throw ConfigError("ggram vocabulary must be nonempty");
  if (max_positions < 1) throw ConfigError("max_positions must be positive");
  if (max_ggrams < 1) throw ConfigError("max_ggrams must be positive");
  if (num_classes < 2) throw ConfigError("classifier needs at least two classes");
}

ModelState make_model(const ModelConfig& config, Rng& rng) {
  config.validate();
  constexpr double kInitStd = 0.02;
  ModelState s;
  s.config = config;
  s.token_embedding = Tensor::randn({config.token_vocab, config.hidden}, rng, kInitStd, true);
  s.position_embedding =
      Tensor::randn({config.max_positions, config.hidden}, rng, kInitStd, true);
  s.ggram_embedding = Tensor::randn({config.ggram_vocab, config.hidden}, rng, kInitStd, true);
  s.ggram_encoder.reserve(config.ggram_layers);
  for (int l = 0; l < config.ggram_layers; ++l)
    s.ggram_encoder.push_back(nn::make_layer(config.hidden, config.heads, rng));
  s.token_encoder.reserve(config.token_layers);
  for (int l = 0; l < config.token_layers; ++l)
    s.token_encoder.push_back(nn::make_layer(config.hidden, config.heads, rng));
  s.mlm_w = Tensor::randn({config.token_vocab, config.hidden}, rng, kInitStd, true);
  s.mlm_b = Tensor::zeros({config.token_vocab}, true);
  s.cls_w = Tensor::randn({config.num_classes, config.hidden}, rng, kInitStd, true);
  s.cls_b = Tensor::zeros({config.num_classes}, true);
  return s;
}

ModelState clone(const ModelState& state) {
  Rng rng(0);  // placeholder values, all overwritten below
  ModelState copy = make_model(state.config, rng);
  auto src = state.named();
  auto dst = copy.named();
  for (std::size_t i = 0; i < src.size(); ++i) {
    auto sv = src[i].second.values();
    std::copy(sv.begin(), sv.end(), dst[i].second.values().begin());
  }
  return copy;
}

std::vector<std::pair<std::string, Tensor>> ModelState::named() const {
  std::vector<std::pair<std::string, Tensor>> out;
  out.emplace_back("token_embedding", token_embedding);
  out.emplace_back("position_embedding", position_embedding);
  out.emplace_back("ggram_embedding", ggram_embedding);
  for (std::size_t i = 0; i < ggram_encoder.size(); ++i)
    for (auto& [name, t] : ggram_encoder[i].named())
      out.emplace_back("ggram_encoder." + std::to_string(i) + "." + name, t);
  for (std::size_t i = 0; i < token_encoder.size(); ++i)
    for (auto& [name, t] : token_encoder[i].named())
      out.emplace_back("token_encoder." + std::to_string(i) + "." + name, t);
  out.emplace_back("mlm.w", mlm_w);
  out.emplace_back("mlm.b", mlm_b);
  out.emplace_back("cls.w", cls_w);
  out.emplace_back("cls.b", cls_b);
  return out;
}

std::vector<Tensor> ModelState::parameters() const {
  std::vector<Tensor> out;
  for (auto& [name, t] : named()) out.push_back(t);
  return out;
}

std::vector<Tensor> ggram_encoder_forward(const ModelState& state,
                                          std::span<const int> ggram_ids,
                                          ForwardTrace* trace) {
  if (ggram_ids.empty()) return {};
  if (static_cast<int>(ggram_ids.size()) > state.config.max_ggrams)
    throw ValidationError("ggram encoder got " + std::to_string(ggram_ids.size()) +
                          " items, limit is " + std::to_string(state.config.max_ggrams));
  for (int id : ggram_ids)
    if (id < 0 || id >= state.config.ggram_vocab)
      throw ValidationError("ggram id " + std::to_string(id) +
                            " outside vocabulary of " +
                            std::to_string(state.config.ggram_vocab));
  // No positional signal: matched ggrams form an unordered set.
  Tensor x = nn::embedding_gather(state.ggram_embedding, ggram_ids);
  std::vector<Tensor> per_layer;
  per_layer.reserve(state.ggram_encoder.size());
  for (std::size_t l = 0; l < state.ggram_encoder.size(); ++l) {
    nn::AttentionRecord rec;
    x = nn::transformer_layer_forward(state.ggram_encoder[l], x, {},
                                      trace ? &rec : nullptr, static_cast<int>(l) + 1);
    per_layer.push_back(x);
    if (trace) {
      trace->ggram_hidden.push_back(x);
      trace->ggram_attention.push_back(std::move(rec));
    }
  }
  return per_layer;
}

Tensor e4bu_forward(const ModelState& state, std::span<const int> token_ids,
                    const ggram::MatchingMatrix& m,
                    std::span<const Tensor> ggram_hidden,
                    std::span<const int> pad_mask, ForwardTrace* trace) {
  const auto& cfg = state.config;
  const int n = static_cast<int>(token_ids.size());
  if (n == 0) throw ValidationError("token encoder got an empty sequence");
  if (n > cfg.max_positions)
    throw ValidationError("sequence of " + std::to_string(n) + " tokens exceeds limit " +
                          std::to_string(cfg.max_positions));
  for (int id : token_ids)
    if (id < 0 || id >= cfg.token_vocab)
      throw ValidationError("token id " + std::to_string(id) + " outside vocabulary of " +
                            std::to_string(cfg.token_vocab));
  if (m.rows != n)
    throw ValidationError("matching matrix covers " + std::to_string(m.rows) +
                          " tokens but the sequence has " + std::to_string(n));
  const int t = m.cols;
  if (t > 0) {
    if (static_cast<int>(ggram_hidden.size()) != cfg.ggram_layers)
      throw ValidationError("expected " + std::to_string(cfg.ggram_layers) +
                            " ggram layer outputs, got " +
                            std::to_string(ggram_hidden.size()));
    for (const auto& mu : ggram_hidden)
      if (mu.rank() != 2 || mu.dim(0) != t || mu.dim(1) != cfg.hidden)
        throw ValidationError("ggram layer output shape does not match the matching matrix");
  } else if (!ggram_hidden.empty()) {
    throw ValidationError("matching matrix has no columns but ggram outputs were supplied");
  }
  if (!pad_mask.empty() && static_cast<int>(pad_mask.size()) != n)
    throw ValidationError("pad mask length does not match the sequence");

  Tensor mask_bias;
  if (!pad_mask.empty()) {
    std::vector<float> bias(pad_mask.size());
    for (std::size_t i = 0; i < pad_mask.size(); ++i) {
      if (pad_mask[i] != 0 && pad_mask[i] != 1)
        throw ValidationError("pad mask entries must be 0 or 1");
      bias[i] = pad_mask[i] ? 0.0f : -1e9f;
    }
    mask_bias = Tensor::from_values({n}, std::move(bias));
  }

  Tensor match_matrix;
  if (t > 0) {
    std::vector<float> cells(static_cast<std::size_t>(n) * t);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < t; ++c)
        cells[static_cast<std::size_t>(r) * t + c] = m.at(r, c) ? 1.0f : 0.0f;
    match_matrix = Tensor::from_values({n, t}, std::move(cells));
  }

  Tensor x = nn::add(nn::embedding_gather(state.token_embedding, token_ids),
                     nn::slice_rows(state.position_embedding, 0, n));
  for (std::size_t l = 0; l < state.token_encoder.size(); ++l) {
    Tensor block = nn::transformer_layer_forward(state.token_encoder[l], x, mask_bias,
                                                 nullptr, static_cast<int>(l) + 1);
    // Enhancement, lowest layers only: each token absorbs the representations
    // of every matched ggram covering it. With no matches the block output
    // passes through untouched so the model degenerates to a plain encoder.
    Tensor fused = (t > 0 && l < static_cast<std::size_t>(cfg.ggram_layers))
                       ? nn::add(block, nn::matmul(match_matrix, ggram_hidden[l]))
                       : block;
    if (trace) {
      trace->token_hidden.push_back(block);
      trace->fused_hidden.push_back(fused);
    }
    x = fused;
  }
  if (trace) trace->final_hidden = x;
  return x;
}

Tensor dnazen_forward(const ModelState& state, std::span<const int> token_ids,
                      const ggram::GGramMatchSet& matches, ForwardTrace* trace) {
  if (matches.source_len != static_cast<int>(token_ids.size()))
    throw ValidationError("match set covers " + std::to_string(matches.source_len) +
                          " tokens but the sequence has " +
                          std::to_string(token_ids.size()));
  std::vector<int> ids;
  ids.reserve(matches.matches.size());
  for (const auto& m : matches.matches) ids.push_back(m.ggram_id);
  auto mu = ggram_encoder_forward(state, ids, trace);
  return e4bu_forward(state, token_ids, ggram::matching_matrix(matches), mu, {}, trace);
}

Tensor mlm_logits(const ModelState& state, const Tensor& hidden) {
  if (!hidden.defined() || hidden.rank() != 2 || hidden.dim(1) != state.config.hidden)
    throw ValidationError("mlm head expects [n, hidden] representations");
  return nn::add_bias(nn::matmul_nt(hidden, state.mlm_w), state.mlm_b);
}

Tensor classify(const ModelState& state, const ForwardTrace& trace) {
  if (!trace.final_hidden.defined())
    throw ValidationError("classify needs a completed forward trace");
  Tensor pooled = nn::slice_rows(trace.final_hidden, 0, 1);
  return nn::add_bias(nn::matmul_nt(pooled, state.cls_w), state.cls_b);
}

std::vector<std::vector<double>> ggram_attention_summary(const ForwardTrace& trace) {
  std::vector<std::vector<double>> out;
  out.reserve(trace.ggram_attention.size());
  for (const auto& rec : trace.ggram_attention) {
    std::vector<double> weights(static_cast<std::size_t>(rec.keys), 0.0);
    for (int h = 0; h < rec.heads; ++h)
      for (int q = 0; q < rec.queries; ++q)
        for (int k = 0; k < rec.keys; ++k) weights[k] += rec.at(h, q, k);
    const double denom = static_cast<double>(rec.heads) * rec.queries;
    for (auto& w : weights) w /= denom;
    out.push_back(std::move(weights));
  }
  return out;
}

namespace {

nlohmann::json config_to_json(const ModelConfig& c) {
  return {{"hidden", c.hidden},
          {"token_layers", c.token_layers},
          {"ggram_layers", c.ggram_layers},
          {"heads", c.heads},
          {"token_vocab", c.token_vocab},
          {"ggram_vocab", c.ggram_vocab},
          {"max_positions", c.max_positions},
          {"max_ggrams", c.max_ggrams},
          {"num_classes", c.num_classes}};
}

ModelConfig config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.hidden = j.at("hidden").get<int>();
  c.token_layers = j.at("token_layers").get<int>();
  c.ggram_layers = j.at("ggram_layers").get<int>();
  c.heads = j.at("heads").get<int>();
  c.token_vocab = j.at("token_vocab").get<int>();
  c.ggram_vocab = j.at("ggram_vocab").get<int>();
  c.max_positions = j.at("max_positions").get<int>();
  c.max_ggrams = j.at("max_ggrams").get<int>();
  c.num_classes = j.at("num_classes").get<int>();
  return c;
}

}  // namespace

void save_model(const std::filesystem::path& path, const ModelState& state) {
  nlohmann::json manifest = {
      {"format", "dnazen-model"}, {"version", 1}, {"config", config_to_json(state.config)}};
  auto tensors = state.named();
  nn::save_checkpoint(path, manifest.dump(), tensors);
}

ModelState load_model(const std::filesystem::path& path) {
  auto ckpt = nn::load_checkpoint(path);
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(ckpt.manifest_json);
    if (manifest.at("format").get<std::string>() != "dnazen-model")
      throw ParseError("checkpoint manifest is not a model archive");
    if (manifest.at("version").get<int>() != 1)
      throw ParseError("unsupported model archive version");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad checkpoint manifest: ") + e.what());
  }
  ModelConfig config;
  try {
    config = config_from_json(manifest.at("config"));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad checkpoint manifest: ") + e.what());
  }
  config.validate();

  Rng rng(0);  // placeholder values, all overwritten below
  ModelState state = make_model(config, rng);

  std::vector<std::string> problems;
  auto wanted = state.named();
  for (auto& [name, tensor] : wanted) {
    const auto* entry = ckpt.find(name);
    if (!entry) {
      problems.push_back("missing tensor '" + name + "'");
      continue;
    }
    if (entry->shape != tensor.shape()) {
      std::ostringstream os;
      os << "shape mismatch for '" << name << "' (archive [";
      for (std::size_t i = 0; i < entry->shape.size(); ++i)
        os << (i ? "," : "") << entry->shape[i];
      os << "], model [";
      for (int i = 0; i < tensor.rank(); ++i) os << (i ? "," : "") << tensor.dim(i);
      os << "])";
      problems.push_back(os.str());
      continue;
    }
    std::copy(entry->values.begin(), entry->values.end(), tensor.values().begin());
  }
  for (const auto& [name, entry] : ckpt.entries) {
    bool known = std::any_of(wanted.begin(), wanted.end(),
                             [&](const auto& p) { return p.first == name; });
    if (!known) problems.push_back("unexpected tensor '" + name + "'");
  }
  if (!problems.empty()) {
    std::string msg = "checkpoint does not match the model configuration:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ValidationError(msg);
  }
  return state;
}

}  // namespace dnazen::model
