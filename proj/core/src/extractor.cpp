#include "codesum/extractor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "codesum/error.hpp"

namespace codesum {
namespace {

bool is_bias(const std::string& name) { return name.size() >= 4 && name.compare(name.size() - 4, 4, "bias") == 0; }

template <typename T>
void initialize(ParameterSet<T>& params, std::uint64_t seed) {
  Rng rng(seed);
  for (auto& p : params) {
    if (!is_bias(p.name)) xavier_uniform(p, rng);
  }
}

std::vector<std::int32_t> encode_tokens(const TokenSequence& tokens, const Vocabulary& vocab, std::size_t max_len) {
  const auto batch = encode_and_pad(std::span<const TokenSequence>(&tokens, 1), vocab, max_len);
  auto row = batch.row(0);
  return {row.begin(), row.end()};
}

}  // namespace

void ExtractorConfig::validate() const {
  if (embed_dim == 0 || hidden_dim == 0) throw ConfigError("extractor dimensions must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must be in [0, 1)");
  if (!(lr >= 0.0)) throw ConfigError("lr must be non-negative");
  if (max_statement_tokens == 0) throw ConfigError("max_statement_tokens must be positive");
  if (max_statements == 0) throw ConfigError("max_statements must be positive");
  if (max_vocab < Vocabulary::kReserved) throw ConfigError("max_vocab must be at least 4");
}

template <typename T>
ExtractorModel<T>::ExtractorModel(const ExtractorConfig& config, std::size_t vocab_size)
    : config_(config), vocab_size_(vocab_size) {
  config_.validate();
  const std::size_t e = config_.embed_dim;
  const std::size_t h = config_.hidden_dim;
  embedding_ = params_.add("extractor.embedding", {vocab_size, e});
  token_encoder_ = declare_lstm(params_, "extractor.token_lstm", e, h);
  context_forward_ = declare_lstm(params_, "extractor.context_fwd", h, h);
  context_backward_ = declare_lstm(params_, "extractor.context_bwd", h, h);
  classifier_weights_ = params_.add("extractor.classifier.weight", {h, 2});
  classifier_bias_ = params_.add("extractor.classifier.bias", {1, 2});
  initialize(params_, config_.seed);
}

template <typename T>
StatementEncoding<T> encode_statements(Tape<T>& tape, const ExtractorModel<T>& model, const SegmentedSnippet& snippet,
                                       const Vocabulary& vocab) {
  if (snippet.statements.empty()) throw EmptySnippet();
  const auto& cfg = model.config();
  const auto& params = model.params();
  StatementEncoding<T> out;
  out.encoded = std::min(snippet.statements.size(), cfg.max_statements);
  out.truncated = snippet.statements.size() > cfg.max_statements;

  auto table = tape.param(params[model.embedding()]);
  auto token_lstm = bind_lstm(tape, params, model.token_encoder());
  std::vector<Var<T>> statement_vectors;
  statement_vectors.reserve(out.encoded);
  for (std::size_t i = 0; i < out.encoded; ++i) {
    const auto ids = encode_tokens(snippet.statements[i].tokens, vocab, cfg.max_statement_tokens);
    auto emb = ops::dropout(ops::embedding(table, std::span<const std::int32_t>(ids)), cfg.dropout);
    statement_vectors.push_back(lstm_run(emb, zero_state(tape, cfg.hidden_dim), token_lstm).h);
  }
  auto sequence = ops::stack_rows<T>(statement_vectors);

  auto fwd = bind_lstm(tape, params, model.context_forward());
  auto bwd = bind_lstm(tape, params, model.context_backward());
  auto forward_states = lstm_states(sequence, zero_state(tape, cfg.hidden_dim), fwd);
  std::vector<Var<T>> reversed(statement_vectors.rbegin(), statement_vectors.rend());
  auto backward_states = lstm_states(ops::stack_rows<T>(reversed), zero_state(tape, cfg.hidden_dim), bwd);
  std::vector<Var<T>> rows;
  rows.reserve(out.encoded);
  for (std::size_t i = 0; i < out.encoded; ++i) {
    rows.push_back(ops::add(forward_states[i], backward_states[out.encoded - 1 - i]));
  }
  out.embeddings = ops::dropout(ops::stack_rows<T>(rows), cfg.dropout);
  return out;
}

template <typename T>
Var<T> classify_statements(Tape<T>& tape, const ExtractorModel<T>& model, Var<T> embeddings) {
  if (embeddings.cols() != model.config().hidden_dim) {
    throw ShapeError("classify_statements: embedding width " + std::to_string(embeddings.cols()) + " != hidden " +
                     std::to_string(model.config().hidden_dim));
  }
  const auto& params = model.params();
  auto logits = ops::add(ops::matmul(embeddings, tape.param(params[model.classifier_weights()])),
                         tape.param(params[model.classifier_bias()]));
  return ops::softmax(logits);
}

template <typename T>
Var<T> extractor_loss(Var<T> prob_important, std::span<const std::uint8_t> gold) {
  return ops::binary_cross_entropy(prob_important, gold);
}

double extractor_loss(std::span<const double> prob_important, std::span<const std::uint8_t> gold) {
  if (prob_important.size() != gold.size() || gold.empty()) {
    throw ShapeError("extractor_loss: " + std::to_string(prob_important.size()) + " probabilities vs " +
                     std::to_string(gold.size()) + " labels");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const double p = std::clamp(prob_important[i], kProbClamp, 1.0 - kProbClamp);
    total += gold[i] ? std::log(p) : std::log(1.0 - p);
  }
  return -total / static_cast<double>(gold.size());
}

template <typename T>
Var<T> snippet_loss(Tape<T>& tape, const ExtractorModel<T>& model, const LabeledSnippet& sample,
                    const Vocabulary& vocab) {
  const auto enc = encode_statements(tape, model, sample.snippet, vocab);
  auto probs = classify_statements(tape, model, enc.embeddings);
  return extractor_loss(ops::slice_cols(probs, 1, 1),
                        std::span<const std::uint8_t>(sample.labels).first(enc.encoded));
}

template <typename T>
std::vector<std::uint8_t> predict_labels(const ExtractorModel<T>& model, const SegmentedSnippet& snippet,
                                         const Vocabulary& vocab, std::vector<double>* prob_important) {
  Tape<T> tape(false, 0, false);
  const auto enc = encode_statements(tape, model, snippet, vocab);
  auto probs = classify_statements(tape, model, enc.embeddings).value();
  std::vector<std::uint8_t> labels(enc.encoded, 0);
  if (prob_important) prob_important->assign(enc.encoded, 0.0);
  for (std::size_t i = 0; i < enc.encoded; ++i) {
    labels[i] = probs[2 * i + 1] > probs[2 * i] ? 1 : 0;
    if (prob_important) (*prob_important)[i] = static_cast<double>(probs[2 * i + 1]);
  }
  return labels;
}

template <typename T>
StatementSelection select_important(const ExtractorModel<T>& model, const SegmentedSnippet& snippet,
                                    const Vocabulary& vocab) {
  StatementSelection sel;
  const auto labels = predict_labels(model, snippet, vocab, &sel.prob_important);
  sel.truncated = snippet.statements.size() > labels.size();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) sel.indices.push_back(i);
  }
  if (sel.indices.empty()) {
    sel.fallback = true;
    const auto best = std::max_element(sel.prob_important.begin(), sel.prob_important.end());
    sel.indices.push_back(static_cast<std::size_t>(best - sel.prob_important.begin()));
  }
  for (auto i : sel.indices) sel.statements.push_back(snippet.statements[i]);
  return sel;
}

std::vector<LabeledSnippet> label_corpus(std::span<const RawPair> pairs, Language language) {
  std::vector<LabeledSnippet> out;
  out.reserve(pairs.size());
  for (const auto& pair : pairs) {
    try {
      out.push_back(label_statements(segment(pair.code, language), tokenize_comment(pair.comment)));
    } catch (const EmptySnippet&) {
    } catch (const EmptyComment&) {
    }
  }
  return out;
}

namespace {

template <typename T>
double mean_loss(const ExtractorModel<T>& model, std::span<const LabeledSnippet> samples, const Vocabulary& vocab) {
  double total = 0.0;
  for (const auto& s : samples) {
    Tape<T> tape(false, 0, false);
    total += static_cast<double>(snippet_loss(tape, model, s, vocab).item());
  }
  return samples.empty() ? 0.0 : total / static_cast<double>(samples.size());
}

}  // namespace

TrainedExtractor train_extractor(std::span<const RawPair> corpus, const ExtractorConfig& config, Language language,
                                 std::span<const RawPair> validation, const EpochCallback& on_epoch) {
  config.validate();
  const auto train = label_corpus(corpus, language);
  if (train.empty()) throw EmptyCorpus("extractor");
  auto valid = validation.empty() ? train : label_corpus(validation, language);
  if (valid.empty()) valid = train;

  auto vocab = build_vocabulary(corpus, config.min_freq, config.max_vocab);
  TrainedExtractor out{ExtractorModel<float>(config, vocab.size()), vocab, language, {}, 0};
  auto& model = out.model;
  auto& params = model.params();
  auto opt = make_optimizer(params, AdamWConfig{config.lr, 0.9, 0.999, 1e-8, config.weight_decay, config.clip_norm});

  double best = mean_loss(model, valid, out.vocab);
  std::vector<std::vector<float>> best_values;
  for (const auto& p : params) best_values.push_back(p.value);

  std::vector<std::size_t> order(train.size());
  std::uint64_t step = 0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    Rng shuffler(mix_seed(config.seed, epoch));
    shuffler.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      params.zero_grad();
      Tape<float> tape(true, mix_seed(config.seed ^ 0xD1B54A32D192ED03ull, step++));
      Var<float> total;
      for (std::size_t k = start; k < end; ++k) {
        auto loss = snippet_loss(tape, model, train[order[k]], out.vocab);
        total = k == start ? loss : ops::add(total, loss);
      }
      auto loss = ops::scale(total, 1.0f / static_cast<float>(end - start));
      epoch_loss += static_cast<double>(loss.item()) * static_cast<double>(end - start);
      tape.backward(loss);
      adamw_step(params, opt);
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = epoch_loss / static_cast<double>(order.size());
    stats.valid_loss = mean_loss(model, valid, out.vocab);
    if (stats.valid_loss < best) {
      best = stats.valid_loss;
      stats.best = true;
      out.best_epoch = epoch;
      for (std::size_t k = 0; k < params.size(); ++k) best_values[k] = params[k].value;
    }
    out.history.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  for (std::size_t k = 0; k < params.size(); ++k) params[k].value = best_values[k];
  params.zero_grad();
  return out;
}

StatementSelection predict_important(std::string_view code, const TrainedExtractor& extractor) {
  return select_important(extractor.model, segment(code, extractor.language), extractor.vocab);
}

double label_accuracy(const TrainedExtractor& extractor, std::span<const LabeledSnippet> samples) {
  std::size_t correct = 0;
  std::size_t total = 0;
  for (const auto& s : samples) {
    const auto labels = predict_labels(extractor.model, s.snippet, extractor.vocab);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      correct += labels[i] == s.labels[i] ? 1 : 0;
      ++total;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

#define CODESUM_INSTANTIATE_EXTRACTOR(T)                                                                         \
  template class ExtractorModel<T>;                                                                              \
  template StatementEncoding<T> encode_statements<T>(Tape<T>&, const ExtractorModel<T>&, const SegmentedSnippet&, \
                                                     const Vocabulary&);                                         \
  template Var<T> classify_statements<T>(Tape<T>&, const ExtractorModel<T>&, Var<T>);                            \
  template Var<T> extractor_loss<T>(Var<T>, std::span<const std::uint8_t>);                                      \
  template Var<T> snippet_loss<T>(Tape<T>&, const ExtractorModel<T>&, const LabeledSnippet&, const Vocabulary&); \
  template std::vector<std::uint8_t> predict_labels<T>(const ExtractorModel<T>&, const SegmentedSnippet&,        \
                                                       const Vocabulary&, std::vector<double>*);                 \
  template StatementSelection select_important<T>(const ExtractorModel<T>&, const SegmentedSnippet&,            \
                                                  const Vocabulary&);

CODESUM_INSTANTIATE_EXTRACTOR(float)
CODESUM_INSTANTIATE_EXTRACTOR(double)
#undef CODESUM_INSTANTIATE_EXTRACTOR

}  // namespace codesum
