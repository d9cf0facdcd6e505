#include "codesum/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"

#include "codesum/error.hpp"

namespace codesum {
namespace {

using nlohmann::json;

constexpr std::string_view kFormat = "codesum-checkpoint";

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xFFu));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + k])) << (8 * k);
    pos_ += 4;
    return v;
  }

  std::string_view take(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw CorruptCheckpoint("file is truncated");
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

template <typename T>
std::vector<NamedArray> export_params(const ParameterSet<T>& params) {
  std::vector<NamedArray> out;
  for (const auto& p : params) out.push_back({p.name, p.shape, std::vector<float>(p.value.begin(), p.value.end())});
  return out;
}

template <typename T>
void import_params(ParameterSet<T>& params, const std::vector<NamedArray>& arrays) {
  if (arrays.size() != params.size()) {
    throw CorruptCheckpoint("expected " + std::to_string(params.size()) + " parameters, found " +
                            std::to_string(arrays.size()));
  }
  for (std::size_t k = 0; k < arrays.size(); ++k) {
    auto& p = params[k];
    const auto& a = arrays[k];
    if (a.name != p.name || a.shape != p.shape) {
      throw CorruptCheckpoint("parameter " + std::to_string(k) + " is " + a.name + " " + to_string(a.shape) +
                              ", expected " + p.name + " " + to_string(p.shape));
    }
    p.value.assign(a.values.begin(), a.values.end());
  }
}

const std::string& field(const Checkpoint& ckpt, const std::string& key) {
  auto it = ckpt.hyperparameters.find(key);
  if (it == ckpt.hyperparameters.end()) throw CorruptCheckpoint("missing hyperparameter '" + key + "'");
  return it->second;
}

std::size_t size_field(const Checkpoint& ckpt, const std::string& key) {
  const auto& s = field(ckpt, key);
  try {
    std::size_t used = 0;
    auto v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::logic_error&) {
    throw CorruptCheckpoint("hyperparameter '" + key + "' is not an integer: " + s);
  }
}

double double_field(const Checkpoint& ckpt, const std::string& key) {
  const auto& s = field(ckpt, key);
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw CorruptCheckpoint("hyperparameter '" + key + "' is not a number: " + s);
  }
}

Vocabulary vocabulary_of(const Checkpoint& ckpt) {
  try {
    return Vocabulary::from_tokens(ckpt.vocabulary);
  } catch (const Error& e) {
    throw CorruptCheckpoint(std::string("bad vocabulary: ") + e.what());
  }
}

}  // namespace

std::string_view model_kind_name(ModelKind kind) { return kind == ModelKind::kExtractor ? "extractor" : "abstracter"; }

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  json header;
  header["format"] = kFormat;
  header["version"] = ckpt.version;
  header["kind"] = model_kind_name(ckpt.kind);
  header["hyperparameters"] = ckpt.hyperparameters;
  header["fusion"] = ckpt.fusion ? json(std::string(fusion_name(*ckpt.fusion))) : json(nullptr);
  header["language"] = language_name(ckpt.language);
  header["vocabulary"] = ckpt.vocabulary;
  header["best_epoch"] = ckpt.best_epoch;
  header["param_count"] = ckpt.params.size();

  std::string out = header.dump();
  out.push_back('\n');
  for (const auto& p : ckpt.params) {
    if (p.values.size() != p.shape.rows * p.shape.cols) throw ShapeError("checkpoint array " + p.name + " size mismatch");
    put_u32(out, static_cast<std::uint32_t>(p.name.size()));
    out += p.name;
    put_u32(out, 2);
    put_u32(out, static_cast<std::uint32_t>(p.shape.rows));
    put_u32(out, static_cast<std::uint32_t>(p.shape.cols));
    for (float v : p.values) {
      std::uint32_t bits = 0;
      std::memcpy(&bits, &v, sizeof bits);
      put_u32(out, bits);
    }
  }
  return out;
}

Checkpoint parse_checkpoint(std::string_view bytes) {
  const auto newline = bytes.find('\n');
  if (newline == std::string_view::npos) throw CorruptCheckpoint("missing header line");
  json header;
  try {
    header = json::parse(bytes.substr(0, newline));
  } catch (const json::exception& e) {
    throw CorruptCheckpoint(std::string("unreadable header: ") + e.what());
  }

  Checkpoint ckpt;
  std::size_t count = 0;
  try {
    if (!header.is_object() || header.value("format", std::string()) != kFormat) {
      throw CorruptCheckpoint("not a codesum checkpoint");
    }
    ckpt.version = header.at("version").get<int>();
    if (ckpt.version != kCheckpointVersion) {
      throw VersionError("unsupported checkpoint version " + std::to_string(ckpt.version) + " (expected " +
                         std::to_string(kCheckpointVersion) + ")");
    }
    const auto kind = header.at("kind").get<std::string>();
    if (kind == "extractor") {
      ckpt.kind = ModelKind::kExtractor;
    } else if (kind == "abstracter") {
      ckpt.kind = ModelKind::kAbstracter;
    } else {
      throw CorruptCheckpoint("unknown model kind '" + kind + "'");
    }
    ckpt.hyperparameters = header.at("hyperparameters").get<std::map<std::string, std::string>>();
    if (!header.at("fusion").is_null()) ckpt.fusion = parse_fusion(header.at("fusion").get<std::string>());
    ckpt.language = parse_language(header.at("language").get<std::string>());
    ckpt.vocabulary = header.at("vocabulary").get<std::vector<std::string>>();
    ckpt.best_epoch = header.at("best_epoch").get<std::size_t>();
    count = header.at("param_count").get<std::size_t>();
  } catch (const json::exception& e) {
    throw CorruptCheckpoint(std::string("bad header: ") + e.what());
  } catch (const UsageError& e) {
    throw CorruptCheckpoint(std::string("bad header: ") + e.what());
  }

  Reader in(bytes.substr(newline + 1));
  for (std::size_t k = 0; k < count; ++k) {
    NamedArray a;
    a.name = std::string(in.take(in.u32()));
    if (in.u32() != 2) throw CorruptCheckpoint("array " + a.name + " is not rank 2");
    a.shape.rows = in.u32();
    a.shape.cols = in.u32();
    const std::size_t n = a.shape.rows * a.shape.cols;
    const auto raw = in.take(n * 4);
    a.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(raw[4 * i + b])) << (8 * b);
      std::memcpy(&a.values[i], &bits, sizeof bits);
    }
    ckpt.params.push_back(std::move(a));
  }
  if (!in.done()) throw CorruptCheckpoint("trailing bytes after the last parameter");
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const auto bytes = serialize_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_checkpoint(bytes);
}

Checkpoint to_checkpoint(const TrainedExtractor& model) {
  const auto& c = model.model.config();
  Checkpoint ckpt;
  ckpt.kind = ModelKind::kExtractor;
  ckpt.hyperparameters = {
      {"embed_dim", std::to_string(c.embed_dim)},
      {"hidden_dim", std::to_string(c.hidden_dim)},
      {"batch_size", std::to_string(c.batch_size)},
      {"lr", format_double(c.lr)},
      {"dropout", format_double(c.dropout)},
      {"weight_decay", format_double(c.weight_decay)},
      {"clip_norm", format_double(c.clip_norm)},
      {"epochs", std::to_string(c.epochs)},
      {"max_statement_tokens", std::to_string(c.max_statement_tokens)},
      {"max_statements", std::to_string(c.max_statements)},
      {"min_freq", std::to_string(c.min_freq)},
      {"max_vocab", std::to_string(c.max_vocab)},
      {"seed", std::to_string(c.seed)},
  };
  ckpt.language = model.language;
  ckpt.vocabulary = model.vocab.tokens();
  ckpt.best_epoch = model.best_epoch;
  ckpt.params = export_params(model.model.params());
  return ckpt;
}

Checkpoint to_checkpoint(const TrainedAbstracter& model) {
  const auto& c = model.model.config();
  Checkpoint ckpt;
  ckpt.kind = ModelKind::kAbstracter;
  ckpt.hyperparameters = {
      {"embed_dim", std::to_string(c.embed_dim)},
      {"hidden_dim", std::to_string(c.hidden_dim)},
      {"batch_size", std::to_string(c.batch_size)},
      {"lr", format_double(c.lr)},
      {"dropout", format_double(c.dropout)},
      {"weight_decay", format_double(c.weight_decay)},
      {"clip_norm", format_double(c.clip_norm)},
      {"epochs", std::to_string(c.epochs)},
      {"max_code_tokens", std::to_string(c.max_code_tokens)},
      {"max_extract_tokens", std::to_string(c.max_extract_tokens)},
      {"max_comment_len", std::to_string(c.max_comment_len)},
      {"min_freq", std::to_string(c.min_freq)},
      {"max_vocab", std::to_string(c.max_vocab)},
      {"share_embeddings", c.share_embeddings ? "true" : "false"},
      {"seed", std::to_string(c.seed)},
  };
  ckpt.fusion = c.fusion;
  ckpt.language = model.language;
  ckpt.vocabulary = model.vocab.tokens();
  ckpt.best_epoch = model.best_epoch;
  ckpt.params = export_params(model.model.params());
  return ckpt;
}

TrainedExtractor extractor_from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.kind != ModelKind::kExtractor) throw CorruptCheckpoint("checkpoint holds an abstracter, not an extractor");
  ExtractorConfig c;
  c.embed_dim = size_field(ckpt, "embed_dim");
  c.hidden_dim = size_field(ckpt, "hidden_dim");
  c.batch_size = size_field(ckpt, "batch_size");
  c.lr = double_field(ckpt, "lr");
  c.dropout = double_field(ckpt, "dropout");
  c.weight_decay = double_field(ckpt, "weight_decay");
  c.clip_norm = double_field(ckpt, "clip_norm");
  c.epochs = size_field(ckpt, "epochs");
  c.max_statement_tokens = size_field(ckpt, "max_statement_tokens");
  c.max_statements = size_field(ckpt, "max_statements");
  c.min_freq = size_field(ckpt, "min_freq");
  c.max_vocab = size_field(ckpt, "max_vocab");
  c.seed = size_field(ckpt, "seed");
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw CorruptCheckpoint(e.what());
  }
  auto vocab = vocabulary_of(ckpt);
  TrainedExtractor out{ExtractorModel<float>(c, vocab.size()), std::move(vocab), ckpt.language, {}, ckpt.best_epoch};
  import_params(out.model.params(), ckpt.params);
  return out;
}

TrainedAbstracter abstracter_from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.kind != ModelKind::kAbstracter) throw CorruptCheckpoint("checkpoint holds an extractor, not an abstracter");
  if (!ckpt.fusion) throw CorruptCheckpoint("abstracter checkpoint has no fusion order");
  AbstracterConfig c;
  c.embed_dim = size_field(ckpt, "embed_dim");
  c.hidden_dim = size_field(ckpt, "hidden_dim");
  c.batch_size = size_field(ckpt, "batch_size");
  c.lr = double_field(ckpt, "lr");
  c.dropout = double_field(ckpt, "dropout");
  c.weight_decay = double_field(ckpt, "weight_decay");
  c.clip_norm = double_field(ckpt, "clip_norm");
  c.epochs = size_field(ckpt, "epochs");
  c.max_code_tokens = size_field(ckpt, "max_code_tokens");
  c.max_extract_tokens = size_field(ckpt, "max_extract_tokens");
  c.max_comment_len = size_field(ckpt, "max_comment_len");
  c.min_freq = size_field(ckpt, "min_freq");
  c.max_vocab = size_field(ckpt, "max_vocab");
  const auto& share = field(ckpt, "share_embeddings");
  if (share != "true" && share != "false") throw CorruptCheckpoint("share_embeddings must be true or false");
  c.share_embeddings = share == "true";
  c.seed = size_field(ckpt, "seed");
  c.fusion = *ckpt.fusion;
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw CorruptCheckpoint(e.what());
  }
  auto vocab = vocabulary_of(ckpt);
  TrainedAbstracter out{AbstracterModel<float>(c, vocab.size()), std::move(vocab), ckpt.language, {}, ckpt.best_epoch};
  import_params(out.model.params(), ckpt.params);
  return out;
}

}  // namespace codesum
