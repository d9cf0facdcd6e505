#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "codesum/corpus.hpp"
#include "codesum/nn.hpp"
#include "codesum/oracle.hpp"
#include "codesum/optim.hpp"
#include "codesum/segmenter.hpp"
#include "codesum/tensor.hpp"

namespace codesum {

struct ExtractorConfig {
  std::size_t embed_dim = 64;
  std::size_t hidden_dim = 64;
  std::size_t batch_size = 32;
  double lr = 3e-4;
  double dropout = 0.1;
  double weight_decay = 0.01;
  double clip_norm = 0.0;
  std::size_t epochs = 300;
  std::size_t max_statement_tokens = 32;  // including the EOS terminator
  std::size_t max_statements = 64;
  std::size_t min_freq = 1;
  std::size_t max_vocab = 2000;
  std::uint64_t seed = 1;

  void validate() const;  // throws ConfigError
};

// Token embedding -> per-statement LSTM (final hidden state) -> bidirectional
// LSTM across statement vectors (directions summed) -> H x 2 projection and
// softmax.
template <typename T>
class ExtractorModel {
 public:
  ExtractorModel(const ExtractorConfig& config, std::size_t vocab_size);

  const ExtractorConfig& config() const noexcept { return config_; }
  std::size_t vocab_size() const noexcept { return vocab_size_; }
  ParameterSet<T>& params() noexcept { return params_; }
  const ParameterSet<T>& params() const noexcept { return params_; }

  std::size_t embedding() const noexcept { return embedding_; }
  const LstmLayer& token_encoder() const noexcept { return token_encoder_; }
  const LstmLayer& context_forward() const noexcept { return context_forward_; }
  const LstmLayer& context_backward() const noexcept { return context_backward_; }
  std::size_t classifier_weights() const noexcept { return classifier_weights_; }
  std::size_t classifier_bias() const noexcept { return classifier_bias_; }

 private:
  ExtractorConfig config_;
  std::size_t vocab_size_;
  ParameterSet<T> params_;
  std::size_t embedding_ = 0;
  LstmLayer token_encoder_;
  LstmLayer context_forward_;
  LstmLayer context_backward_;
  std::size_t classifier_weights_ = 0;
  std::size_t classifier_bias_ = 0;
};

template <typename T>
struct StatementEncoding {
  Var<T> embeddings;         // n x H
  std::size_t encoded = 0;   // statements actually encoded
  bool truncated = false;    // snippet had more than max_statements
};

template <typename T>
StatementEncoding<T> encode_statements(Tape<T>& tape, const ExtractorModel<T>& model, const SegmentedSnippet& snippet,
                                       const Vocabulary& vocab);

// Row-wise [P(label 0), P(label 1)].
template <typename T>
Var<T> classify_statements(Tape<T>& tape, const ExtractorModel<T>& model, Var<T> embeddings);

// Binary cross-entropy of P(label 1) against the gold labels, averaged over
// statements; probabilities are clamped to [1e-7, 1 - 1e-7].
template <typename T>
Var<T> extractor_loss(Var<T> prob_important, std::span<const std::uint8_t> gold);

double extractor_loss(std::span<const double> prob_important, std::span<const std::uint8_t> gold);

// Loss of one labeled snippet through the full model.
template <typename T>
Var<T> snippet_loss(Tape<T>& tape, const ExtractorModel<T>& model, const LabeledSnippet& sample, const Vocabulary& vocab);

struct StatementSelection {
  std::vector<std::size_t> indices;  // strictly increasing
  std::vector<Statement> statements;
  std::vector<double> prob_important;  // per encoded statement
  bool fallback = false;               // no statement predicted 1; best P(1) taken
  bool truncated = false;
};

// Per-statement predicted labels: 1 iff P(1) > P(0).
template <typename T>
std::vector<std::uint8_t> predict_labels(const ExtractorModel<T>& model, const SegmentedSnippet& snippet,
                                         const Vocabulary& vocab, std::vector<double>* prob_important = nullptr);

template <typename T>
StatementSelection select_important(const ExtractorModel<T>& model, const SegmentedSnippet& snippet,
                                    const Vocabulary& vocab);

struct EpochStats {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double valid_loss = 0.0;
  bool best = false;
};

using EpochCallback = std::function<void(const EpochStats&)>;

struct TrainedExtractor {
  ExtractorModel<float> model;
  Vocabulary vocab;
  Language language = Language::kGeneric;
  std::vector<EpochStats> history;
  std::size_t best_epoch = 0;  // 0 when the initial parameters were never improved on
};

// Labels every pair with the greedy oracle. Pairs whose snippet segments to
// nothing are dropped.
std::vector<LabeledSnippet> label_corpus(std::span<const RawPair> pairs, Language language);

// Oracle labeling, minibatch AdamW training, and best-validation selection.
// Without a validation corpus the training set is used for validation.
// Throws EmptyCorpus when no usable pair remains.
TrainedExtractor train_extractor(std::span<const RawPair> corpus, const ExtractorConfig& config, Language language,
                                 std::span<const RawPair> validation = {}, const EpochCallback& on_epoch = {});

StatementSelection predict_important(std::string_view code, const TrainedExtractor& extractor);

// Fraction of statements whose predicted label equals the oracle label.
double label_accuracy(const TrainedExtractor& extractor, std::span<const LabeledSnippet> samples);

}  // namespace codesum
