#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "codesum/corpus.hpp"
#include "codesum/extractor.hpp"
#include "codesum/nn.hpp"
#include "codesum/segmenter.hpp"
#include "codesum/tensor.hpp"

namespace codesum {

// Order of the two encodings inside the fused vector.
enum class FusionOrder {
  kExAb,  // [e_ex; e_ab]
  kAbEx,  // [e_ab; e_ex]
};

FusionOrder parse_fusion(std::string_view tag);  // "exab" | "abex"
std::string_view fusion_name(FusionOrder order);

struct AbstracterConfig {
  std::size_t embed_dim = 64;
  std::size_t hidden_dim = 64;
  std::size_t batch_size = 32;
  double lr = 3e-4;
  double dropout = 0.1;
  double weight_decay = 0.01;
  double clip_norm = 0.0;
  std::size_t epochs = 300;
  std::size_t max_code_tokens = 200;     // whole-snippet encoder input, including EOS
  std::size_t max_extract_tokens = 100;  // important-statement encoder input, including EOS
  std::size_t max_comment_len = 32;      // training targets, including BOS and EOS
  std::size_t min_freq = 1;
  std::size_t max_vocab = 2000;
  bool share_embeddings = true;
  FusionOrder fusion = FusionOrder::kAbEx;
  std::uint64_t seed = 1;

  void validate() const;  // throws ConfigError
};

// Two LSTM encoders (important statements, whole snippet) whose final hidden
// states are concatenated, projected to the decoder's initial state, and fed
// to an LSTM decoder at every step next to the previous token's embedding.
template <typename T>
class AbstracterModel {
 public:
  AbstracterModel(const AbstracterConfig& config, std::size_t vocab_size);

  const AbstracterConfig& config() const noexcept { return config_; }
  std::size_t vocab_size() const noexcept { return vocab_size_; }
  ParameterSet<T>& params() noexcept { return params_; }
  const ParameterSet<T>& params() const noexcept { return params_; }

  std::size_t extract_embedding() const noexcept { return extract_embedding_; }
  std::size_t snippet_embedding() const noexcept { return snippet_embedding_; }
  std::size_t decoder_embedding() const noexcept { return decoder_embedding_; }
  const LstmLayer& extract_encoder() const noexcept { return extract_encoder_; }
  const LstmLayer& snippet_encoder() const noexcept { return snippet_encoder_; }
  const LstmLayer& decoder() const noexcept { return decoder_; }
  std::size_t context_weights() const noexcept { return context_weights_; }
  std::size_t context_bias() const noexcept { return context_bias_; }
  std::size_t output_weights() const noexcept { return output_weights_; }
  std::size_t output_bias() const noexcept { return output_bias_; }

 private:
  AbstracterConfig config_;
  std::size_t vocab_size_;
  ParameterSet<T> params_;
  std::size_t extract_embedding_ = 0;
  std::size_t snippet_embedding_ = 0;
  std::size_t decoder_embedding_ = 0;
  LstmLayer extract_encoder_;
  LstmLayer snippet_encoder_;
  LstmLayer decoder_;
  std::size_t context_weights_ = 0;
  std::size_t context_bias_ = 0;
  std::size_t output_weights_ = 0;
  std::size_t output_bias_ = 0;
};

// Encodes the important statements, concatenated in source order. Throws
// EmptyInput when `important` is empty.
template <typename T>
Var<T> encode_extractive(Tape<T>& tape, const AbstracterModel<T>& model, std::span<const Statement> important,
                         const Vocabulary& vocab);

template <typename T>
Var<T> encode_abstractive(Tape<T>& tape, const AbstracterModel<T>& model, const SegmentedSnippet& snippet,
                          const Vocabulary& vocab);

template <typename T>
Var<T> fuse(Var<T> e_ex, Var<T> e_ab, FusionOrder order);

template <typename T>
struct DecoderState {
  LstmState<T> lstm;
  Var<T> context;  // tanh(e_fu W + b), fed at every step
};

// h_0 = tanh(e_fu W + b), c_0 = 0.
template <typename T>
DecoderState<T> init_decoder(Tape<T>& tape, const AbstracterModel<T>& model, Var<T> e_fu);

template <typename T>
struct DecodeStep {
  DecoderState<T> state;
  Var<T> logits;  // 1 x V
};

// One step from the previous token. Throws IndexError on an invalid token.
template <typename T>
DecodeStep<T> decode_step(Tape<T>& tape, const AbstracterModel<T>& model, std::int32_t previous,
                          const DecoderState<T>& state);

struct AbstracterSample {
  SegmentedSnippet snippet;
  std::vector<Statement> important;
  TokenSequence comment;
};

// Teacher-forced negative log-likelihood of one sample, averaged over its
// target tokens.
template <typename T>
Var<T> sequence_loss(Tape<T>& tape, const AbstracterModel<T>& model, const AbstracterSample& sample,
                     const Vocabulary& vocab);

// Mean of sequence_loss over the batch.
template <typename T>
Var<T> abstracter_loss(Tape<T>& tape, const AbstracterModel<T>& model, std::span<const AbstracterSample> batch,
                       const Vocabulary& vocab);

struct DecodeResult {
  std::vector<std::int32_t> ids;  // without BOS/EOS
  TokenSequence tokens;
  std::vector<double> step_log_probs;  // one per emitted token, plus EOS when emitted
  double total_log_prob = 0.0;
  bool finished = false;  // EOS emitted before max_len
};

template <typename T>
DecodeResult greedy_decode(const AbstracterModel<T>& model, const AbstracterSample& sample, const Vocabulary& vocab,
                           std::size_t max_len);

// Keeps the top `beam_width` prefixes by total log-probability (ties: lower
// token id). The result is never worse than the greedy decode.
template <typename T>
DecodeResult beam_decode(const AbstracterModel<T>& model, const AbstracterSample& sample, const Vocabulary& vocab,
                         std::size_t max_len, std::size_t beam_width);

struct TrainedAbstracter {
  AbstracterModel<float> model;
  Vocabulary vocab;
  Language language = Language::kGeneric;
  std::vector<EpochStats> history;
  std::size_t best_epoch = 0;
};

// Runs the frozen extractor over every pair to obtain the important statements.
std::vector<AbstracterSample> prepare_samples(std::span<const RawPair> pairs, const TrainedExtractor& extractor);

// Throws EmptyCorpus, or VocabMismatch when the corpus vocabulary built with
// `config` differs from the extractor's.
TrainedAbstracter train_abstracter(std::span<const RawPair> corpus, const TrainedExtractor& extractor,
                                   const AbstracterConfig& config, std::span<const RawPair> validation = {},
                                   const EpochCallback& on_epoch = {});

// Extract important statements, then decode (greedy when beam_width <= 1).
// Throws EmptySnippet or VocabMismatch.
DecodeResult generate_summary(std::string_view code, const TrainedExtractor& extractor,
                              const TrainedAbstracter& abstracter, std::size_t max_len, std::size_t beam_width = 1);

}  // namespace codesum
