#include "codesum/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "codesum/error.hpp"

namespace codesum {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    if (!value.empty() && value[0] == '-') throw std::invalid_argument(value);
    auto v = std::stoull(value, &used, 10);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
  }
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

template <typename Field>
void add_shared(std::map<std::string, Setter>& table, const std::string& name, Field ExtractorConfig::*ex,
                Field AbstracterConfig::*ab) {
  auto parse = [](const std::string& key, const std::string& value) -> Field {
    if constexpr (std::is_same_v<Field, double>) {
      return parse_real(key, value);
    } else {
      return static_cast<Field>(parse_uint(key, value));
    }
  };
  table[name] = [=](RunConfig& c, const std::string& k, const std::string& v) {
    c.extractor.*ex = parse(k, v);
    c.abstracter.*ab = parse(k, v);
  };
  table["extractor." + name] = [=](RunConfig& c, const std::string& k, const std::string& v) {
    c.extractor.*ex = parse(k, v);
  };
  table["abstracter." + name] = [=](RunConfig& c, const std::string& k, const std::string& v) {
    c.abstracter.*ab = parse(k, v);
  };
}

const std::map<std::string, Setter>& setters() {
  static const auto table = [] {
    std::map<std::string, Setter> t;
    add_shared(t, "embed_dim", &ExtractorConfig::embed_dim, &AbstracterConfig::embed_dim);
    add_shared(t, "hidden_dim", &ExtractorConfig::hidden_dim, &AbstracterConfig::hidden_dim);
    add_shared(t, "batch_size", &ExtractorConfig::batch_size, &AbstracterConfig::batch_size);
    add_shared(t, "lr", &ExtractorConfig::lr, &AbstracterConfig::lr);
    add_shared(t, "dropout", &ExtractorConfig::dropout, &AbstracterConfig::dropout);
    add_shared(t, "weight_decay", &ExtractorConfig::weight_decay, &AbstracterConfig::weight_decay);
    add_shared(t, "clip_norm", &ExtractorConfig::clip_norm, &AbstracterConfig::clip_norm);
    add_shared(t, "epochs", &ExtractorConfig::epochs, &AbstracterConfig::epochs);
    // The abstracter must rebuild the extractor's vocabulary, so these two
    // are deliberately not prefixable.
    t["min_freq"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.extractor.min_freq = c.abstracter.min_freq = parse_uint(k, v);
    };
    t["max_vocab"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.extractor.max_vocab = c.abstracter.max_vocab = parse_uint(k, v);
    };
    t["max_statement_tokens"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.extractor.max_statement_tokens = parse_uint(k, v);
    };
    t["max_statements"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.extractor.max_statements = parse_uint(k, v);
    };
    t["max_code_tokens"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.abstracter.max_code_tokens = parse_uint(k, v);
    };
    t["max_extract_tokens"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.abstracter.max_extract_tokens = parse_uint(k, v);
    };
    t["max_comment_len"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.abstracter.max_comment_len = parse_uint(k, v);
    };
    t["share_embeddings"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.abstracter.share_embeddings = parse_bool(k, v);
    };
    t["fusion"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      try {
        c.abstracter.fusion = parse_fusion(v);
      } catch (const UsageError&) {
        throw ConfigError(k + ": expected abex or exab, got '" + v + "'");
      }
    };
    t["language"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      try {
        c.language = parse_language(v);
      } catch (const UsageError&) {
        throw ConfigError(k + ": unknown language '" + v + "'");
      }
    };
    t["seed"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = parse_uint(k, v); };
    t["corpus"] = [](RunConfig& c, const std::string&, const std::string& v) { c.corpus = v; };
    t["valid_corpus"] = [](RunConfig& c, const std::string&, const std::string& v) { c.valid_corpus = v; };
    return t;
  }();
  return table;
}

}  // namespace

Preset parse_preset(std::string_view name) {
  if (name == "desk") return Preset::kDesk;
  if (name == "full") return Preset::kFull;
  throw UsageError("unknown preset '" + std::string(name) + "' (expected desk or full)");
}

void RunConfig::finalize() {
  extractor.seed = seed;
  abstracter.seed = seed;
  if (extractor.min_freq != abstracter.min_freq || extractor.max_vocab != abstracter.max_vocab) {
    throw ConfigError("extractor and abstracter must share min_freq and max_vocab");
  }
  extractor.validate();
  abstracter.validate();
}

RunConfig preset_config(Preset preset) {
  RunConfig c;
  if (preset == Preset::kFull) {
    for (auto* dims : {&c.extractor.embed_dim, &c.extractor.hidden_dim, &c.abstracter.embed_dim,
                       &c.abstracter.hidden_dim}) {
      *dims = 512;
    }
    c.extractor.batch_size = c.abstracter.batch_size = 32;
    c.extractor.lr = c.abstracter.lr = 3e-4;
    c.extractor.dropout = c.abstracter.dropout = 0.1;
    c.extractor.max_vocab = c.abstracter.max_vocab = 50000;
    return c;
  }
  // Desk scale: a few hundred epochs over a small corpus, so steps are
  // larger and more frequent than in the full-size setting.
  c.extractor.batch_size = c.abstracter.batch_size = 8;
  c.extractor.lr = c.abstracter.lr = 5e-3;
  c.extractor.dropout = c.abstracter.dropout = 0.1;
  c.extractor.clip_norm = c.abstracter.clip_norm = 5.0;
  return c;
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  const auto& table = setters();
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(std::string_view(body).substr(0, eq));
    const auto value = trim(std::string_view(body).substr(eq + 1));
    auto it = table.find(key);
    if (it == table.end()) throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    it->second(base, key, value);
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

void apply_seed_override(RunConfig& config, const char* value) {
  if (value == nullptr || *value == '\0') return;
  config.seed = parse_uint("EACS_SEED", value);
}

}  // namespace codesum
