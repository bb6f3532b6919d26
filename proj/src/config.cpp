#include "dnazen/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace dnazen::config {

namespace {

bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// One value within a single line; leaves the cursor after the value.
struct ValueScanner {
  std::string_view s;
  std::size_t i = 0;
  std::size_t line;

  void skip_ws() {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line); }

  TomlValue parse_value() {
    skip_ws();
    if (i >= s.size()) fail("missing value");
    if (s[i] == '"') return parse_string();
    if (s[i] == '[') return parse_array();
    return parse_scalar();
  }

  TomlValue parse_string() {
    ++i;  // opening quote
    TomlValue v;
    v.kind = TomlValue::Kind::string;
    while (i < s.size() && s[i] != '"') {
      char c = s[i++];
      if (c != '\\') {
        v.str.push_back(c);
        continue;
      }
      if (i >= s.size()) fail("unterminated escape in string");
      switch (s[i++]) {
        case '"': v.str.push_back('"'); break;
        case '\\': v.str.push_back('\\'); break;
        case 'n': v.str.push_back('\n'); break;
        case 't': v.str.push_back('\t'); break;
        case 'r': v.str.push_back('\r'); break;
        default: fail("unsupported escape in string");
      }
    }
    if (i >= s.size()) fail("unterminated string");
    ++i;  // closing quote
    return v;
  }

  TomlValue parse_array() {
    ++i;  // opening bracket
    TomlValue v;
    v.kind = TomlValue::Kind::array;
    skip_ws();
    if (i < s.size() && s[i] == ']') {
      ++i;
      return v;
    }
    while (true) {
      skip_ws();
      if (i < s.size() && s[i] == '[') fail("nested arrays are not supported");
      v.items.push_back(parse_value());
      skip_ws();
      if (i >= s.size()) fail("unterminated array");
      if (s[i] == ']') {
        ++i;
        return v;
      }
      if (s[i] != ',') fail("expected ',' or ']' in array");
      ++i;
    }
  }

  TomlValue parse_scalar() {
    const std::size_t start = i;
    while (i < s.size() && s[i] != ',' && s[i] != ']' && s[i] != '#' && s[i] != ' ' &&
           s[i] != '\t')
      ++i;
    std::string_view token = s.substr(start, i - start);
    if (token.empty()) fail("missing value");
    TomlValue v;
    if (token == "true" || token == "false") {
      v.kind = TomlValue::Kind::boolean;
      v.boolean = token == "true";
      return v;
    }
    auto [int_end, int_ec] =
        std::from_chars(token.data(), token.data() + token.size(), v.integer);
    if (int_ec == std::errc() && int_end == token.data() + token.size()) {
      v.kind = TomlValue::Kind::integer;
      return v;
    }
    auto [dbl_end, dbl_ec] =
        std::from_chars(token.data(), token.data() + token.size(), v.floating);
    if (dbl_ec == std::errc() && dbl_end == token.data() + token.size()) {
      v.kind = TomlValue::Kind::floating;
      return v;
    }
    fail("'" + std::string(token) + "' is not a valid value");
  }

  void expect_end() {
    skip_ws();
    if (i < s.size() && s[i] != '#') fail("unexpected text after value");
  }
};

}  // namespace

TomlTable parse_toml(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  TomlTable out;
  std::string section;
  std::size_t line_no = 0;
  std::size_t at = 0;
  while (at <= text.size()) {
    const auto nl = text.find('\n', at);
    std::string_view line = text.substr(at, nl == std::string_view::npos ? nl : nl - at);
    at = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;

    if (body.front() == '[') {
      const auto close = body.find(']');
      if (close == std::string_view::npos) throw ParseError("unterminated section header", line_no);
      std::string_view name = trim(body.substr(1, close - 1));
      std::string_view rest = trim(body.substr(close + 1));
      if (!rest.empty() && rest.front() != '#')
        throw ParseError("unexpected text after section header", line_no);
      if (name.empty() || !std::all_of(name.begin(), name.end(), is_bare_key_char))
        throw ParseError("invalid section name '" + std::string(name) + "'", line_no);
      section = std::string(name);
      continue;
    }

    std::size_t k = 0;
    while (k < body.size() && is_bare_key_char(body[k])) ++k;
    if (k == 0) throw ParseError("expected a key", line_no);
    std::string key(body.substr(0, k));
    std::string_view rest = trim(body.substr(k));
    if (rest.empty() || rest.front() != '=')
      throw ParseError("expected '=' after key '" + key + "'", line_no);

    ValueScanner scanner{rest.substr(1), 0, line_no};
    TomlValue value = scanner.parse_value();
    scanner.expect_end();

    std::string full = section.empty() ? key : section + "." + key;
    if (!out.emplace(std::move(full), std::move(value)).second)
      throw ParseError("duplicate key '" + (section.empty() ? key : section + "." + key) + "'",
                       line_no);
  }
  return out;
}

namespace {

const char* kind_name(TomlValue::Kind k) {
  switch (k) {
    case TomlValue::Kind::string: return "a string";
    case TomlValue::Kind::integer: return "an integer";
    case TomlValue::Kind::floating: return "a float";
    case TomlValue::Kind::boolean: return "a boolean";
    case TomlValue::Kind::array: return "an array";
  }
  return "a value";
}

[[noreturn]] void kind_error(const std::string& key, const TomlValue& v, const char* want) {
  throw ConfigError("'" + key + "' must be " + want + ", got " + kind_name(v.kind));
}

// One settable/renderable configuration field; the schema below drives file
// parsing, environment overrides, and the effective-config echo alike.
struct Field {
  std::string key;
  std::function<void(PipelineConfig&, const TomlValue&, const std::string&)> set;
  std::function<std::string(const PipelineConfig&)> render;
};

template <typename Get>
Field string_field(std::string key, Get get) {
  return {key,
          [get, key](PipelineConfig& c, const TomlValue& v, const std::string&) {
            if (v.kind != TomlValue::Kind::string) kind_error(key, v, "a string");
            get(c) = v.str;
          },
          [get](const PipelineConfig& c) {
            return nlohmann::json(get(const_cast<PipelineConfig&>(c))).dump();
          }};
}

template <typename Get>
Field int_field(std::string key, Get get) {
  return {key,
          [get, key](PipelineConfig& c, const TomlValue& v, const std::string&) {
            if (v.kind != TomlValue::Kind::integer) kind_error(key, v, "an integer");
            get(c) = static_cast<std::remove_reference_t<decltype(get(c))>>(v.integer);
          },
          [get](const PipelineConfig& c) {
            return nlohmann::json(get(const_cast<PipelineConfig&>(c))).dump();
          }};
}

template <typename Get>
Field uint_field(std::string key, Get get) {
  return {key,
          [get, key](PipelineConfig& c, const TomlValue& v, const std::string&) {
            if (v.kind != TomlValue::Kind::integer || v.integer < 0)
              kind_error(key, v, "a nonnegative integer");
            get(c) = static_cast<uint64_t>(v.integer);
          },
          [get](const PipelineConfig& c) {
            return nlohmann::json(get(const_cast<PipelineConfig&>(c))).dump();
          }};
}

template <typename Get>
Field float_field(std::string key, Get get) {
  return {key,
          [get, key](PipelineConfig& c, const TomlValue& v, const std::string&) {
            if (v.kind == TomlValue::Kind::floating)
              get(c) = v.floating;
            else if (v.kind == TomlValue::Kind::integer)
              get(c) = static_cast<double>(v.integer);
            else
              kind_error(key, v, "a number");
          },
          [get](const PipelineConfig& c) {
            return nlohmann::json(get(const_cast<PipelineConfig&>(c))).dump();
          }};
}

const std::vector<Field>& schema() {
  static const std::vector<Field> fields = [] {
    std::vector<Field> f;
    f.push_back(uint_field("seed", [](PipelineConfig& c) -> uint64_t& { return c.seed; }));
    f.push_back(int_field("workers", [](PipelineConfig& c) -> int& { return c.workers; }));

    f.push_back(string_field("paths.corpus",
                             [](PipelineConfig& c) -> std::string& { return c.paths.corpus; }));
    f.push_back(string_field(
        "paths.token_vocab",
        [](PipelineConfig& c) -> std::string& { return c.paths.token_vocab; }));
    f.push_back(string_field(
        "paths.ggram_vocab",
        [](PipelineConfig& c) -> std::string& { return c.paths.ggram_vocab; }));
    f.push_back(string_field(
        "paths.checkpoint",
        [](PipelineConfig& c) -> std::string& { return c.paths.checkpoint; }));
    f.push_back(string_field("paths.dataset",
                             [](PipelineConfig& c) -> std::string& { return c.paths.dataset; }));
    f.push_back(string_field("paths.out_dir",
                             [](PipelineConfig& c) -> std::string& { return c.paths.out_dir; }));

    f.push_back(int_field("model.hidden",
                          [](PipelineConfig& c) -> int& { return c.model.hidden; }));
    f.push_back(int_field("model.token_layers",
                          [](PipelineConfig& c) -> int& { return c.model.token_layers; }));
    f.push_back(int_field("model.ggram_layers",
                          [](PipelineConfig& c) -> int& { return c.model.ggram_layers; }));
    f.push_back(
        int_field("model.heads", [](PipelineConfig& c) -> int& { return c.model.heads; }));
    f.push_back(int_field("model.token_vocab",
                          [](PipelineConfig& c) -> int& { return c.model.token_vocab; }));
    f.push_back(int_field("model.ggram_vocab",
                          [](PipelineConfig& c) -> int& { return c.model.ggram_vocab; }));
    f.push_back(int_field("model.max_positions",
                          [](PipelineConfig& c) -> int& { return c.model.max_positions; }));
    f.push_back(int_field("model.max_ggrams",
                          [](PipelineConfig& c) -> int& { return c.model.max_ggrams; }));
    f.push_back(int_field("model.num_classes",
                          [](PipelineConfig& c) -> int& { return c.model.num_classes; }));

    f.push_back(float_field("training.mask_ratio", [](PipelineConfig& c) -> double& {
      return c.training.mask_ratio;
    }));
    f.push_back(float_field("training.mask_prob", [](PipelineConfig& c) -> double& {
      return c.training.mask_prob;
    }));
    f.push_back(float_field("training.random_prob", [](PipelineConfig& c) -> double& {
      return c.training.random_prob;
    }));
    f.push_back(float_field("training.keep_prob", [](PipelineConfig& c) -> double& {
      return c.training.keep_prob;
    }));
    f.push_back(
        float_field("training.lr", [](PipelineConfig& c) -> double& { return c.training.lr; }));
    f.push_back(int_field("training.batch_size",
                          [](PipelineConfig& c) -> int& { return c.training.batch_size; }));
    f.push_back(int_field("training.epochs",
                          [](PipelineConfig& c) -> int& { return c.training.epochs; }));
    f.push_back(int_field("training.max_steps",
                          [](PipelineConfig& c) -> int& { return c.training.max_steps; }));
    f.push_back(int_field("training.checkpoint_every", [](PipelineConfig& c) -> int& {
      return c.training.checkpoint_every;
    }));

    f.push_back(float_field(
        "extraction.theta", [](PipelineConfig& c) -> double& { return c.extraction.theta; }));
    f.push_back(int_field("extraction.min_len",
                          [](PipelineConfig& c) -> int& { return c.extraction.min_len; }));
    f.push_back(int_field("extraction.max_len",
                          [](PipelineConfig& c) -> int& { return c.extraction.max_len; }));
    f.push_back(int_field("extraction.min_freq", [](PipelineConfig& c) -> int64_t& {
      return c.extraction.min_freq;
    }));

    f.push_back(int_field("tokenizer.vocab_size", [](PipelineConfig& c) -> int& {
      return c.tokenizer.vocab_size;
    }));
    return f;
  }();
  return fields;
}

const Field* find_field(const std::string& key) {
  for (const auto& f : schema())
    if (f.key == key) return &f;
  return nullptr;
}

std::string env_name(const std::string& key) {
  std::string name = "DNAZEN_";
  for (char c : key)
    name.push_back(c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return name;
}

}  // namespace

void apply_toml(PipelineConfig& cfg, const TomlTable& table) {
  for (const auto& [key, value] : table) {
    const Field* field = find_field(key);
    if (!field) throw ParseError("unknown configuration key '" + key + "'");
    field->set(cfg, value, key);
  }
}

PipelineConfig load_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  PipelineConfig cfg;
  apply_toml(cfg, parse_toml(buffer.str()));
  return cfg;
}

void apply_env(PipelineConfig& cfg, const EnvLookup& lookup) {
  for (const auto& field : schema()) {
    const std::string name = env_name(field.key);
    const char* raw = lookup(name);
    if (!raw) continue;
    // strings pass through verbatim; everything else re-uses the value parser
    TomlValue value;
    const bool is_string_field = field.key.starts_with("paths.");
    if (is_string_field) {
      value.kind = TomlValue::Kind::string;
      value.str = raw;
    } else {
      ValueScanner scanner{raw, 0, 0};
      try {
        value = scanner.parse_value();
        scanner.expect_end();
      } catch (const ParseError&) {
        throw ConfigError("environment variable " + name + " holds an invalid value");
      }
    }
    try {
      field.set(cfg, value, field.key);
    } catch (const ConfigError&) {
      throw ConfigError("environment variable " + name + " holds the wrong type for '" +
                        field.key + "'");
    }
  }
}

void apply_env(PipelineConfig& cfg) {
  apply_env(cfg, [](const std::string& name) { return std::getenv(name.c_str()); });
}

std::string to_toml(const PipelineConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& field : schema()) {
    const auto dot = field.key.find('.');
    std::string fs = dot == std::string::npos ? std::string() : field.key.substr(0, dot);
    if (fs != section) {
      section = fs;
      out += "\n[" + section + "]\n";
    }
    out += (dot == std::string::npos ? field.key : field.key.substr(dot + 1)) + " = " +
           field.render(cfg) + "\n";
  }
  return out;
}

}  // namespace dnazen::config
