#include "codesum/abstracter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "codesum/error.hpp"

namespace codesum {
namespace {

bool is_bias(const std::string& name) { return name.size() >= 4 && name.compare(name.size() - 4, 4, "bias") == 0; }

std::vector<std::int32_t> encode_tokens(const TokenSequence& tokens, const Vocabulary& vocab, std::size_t max_len,
                                        SequenceSide side = SequenceSide::kCode) {
  const auto batch = encode_and_pad(std::span<const TokenSequence>(&tokens, 1), vocab, max_len, side);
  auto row = batch.row(0);
  return {row.begin(), row.end()};
}

template <typename T>
Var<T> encode_sequence(Tape<T>& tape, const AbstracterModel<T>& model, std::size_t table, const LstmLayer& layer,
                       const TokenSequence& tokens, const Vocabulary& vocab, std::size_t max_len) {
  const auto& cfg = model.config();
  const auto ids = encode_tokens(tokens, vocab, max_len);
  auto emb = ops::dropout(ops::embedding(tape.param(model.params()[table]), std::span<const std::int32_t>(ids)),
                          cfg.dropout);
  return lstm_run(emb, zero_state(tape, cfg.hidden_dim), bind_lstm(tape, model.params(), layer)).h;
}

bool emittable(std::int32_t id) { return id != Vocabulary::kPad && id != Vocabulary::kBos; }

std::vector<double> log_softmax(std::span<const float> logits) {
  std::vector<double> out(logits.begin(), logits.end());
  const double mx = *std::max_element(out.begin(), out.end());
  double z = 0.0;
  for (double x : out) z += std::exp(x - mx);
  const double log_z = mx + std::log(z);
  for (auto& x : out) x -= log_z;
  return out;
}

template <typename T>
DecoderState<T> start(Tape<T>& tape, const AbstracterModel<T>& model, const AbstracterSample& sample,
                      const Vocabulary& vocab) {
  auto e_ex = encode_extractive(tape, model, std::span<const Statement>(sample.important), vocab);
  auto e_ab = encode_abstractive(tape, model, sample.snippet, vocab);
  return init_decoder(tape, model, fuse(e_ex, e_ab, model.config().fusion));
}

}  // namespace

FusionOrder parse_fusion(std::string_view tag) {
  if (tag == "abex") return FusionOrder::kAbEx;
  if (tag == "exab") return FusionOrder::kExAb;
  throw UsageError("unknown fusion order '" + std::string(tag) + "' (expected abex or exab)");
}

std::string_view fusion_name(FusionOrder order) { return order == FusionOrder::kAbEx ? "abex" : "exab"; }

void AbstracterConfig::validate() const {
  if (embed_dim == 0 || hidden_dim == 0) throw ConfigError("abstracter dimensions must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must be in [0, 1)");
  if (!(lr >= 0.0)) throw ConfigError("lr must be non-negative");
  if (max_code_tokens == 0 || max_extract_tokens == 0) throw ConfigError("encoder lengths must be positive");
  if (max_comment_len < 2) throw ConfigError("max_comment_len must be at least 2");
  if (max_vocab < Vocabulary::kReserved) throw ConfigError("max_vocab must be at least 4");
}

template <typename T>
AbstracterModel<T>::AbstracterModel(const AbstracterConfig& config, std::size_t vocab_size)
    : config_(config), vocab_size_(vocab_size) {
  config_.validate();
  const std::size_t e = config_.embed_dim;
  const std::size_t h = config_.hidden_dim;
  if (config_.share_embeddings) {
    extract_embedding_ = params_.add("abstracter.embedding", {vocab_size, e});
    snippet_embedding_ = decoder_embedding_ = extract_embedding_;
  } else {
    extract_embedding_ = params_.add("abstracter.ex_encoder.embedding", {vocab_size, e});
    snippet_embedding_ = params_.add("abstracter.ab_encoder.embedding", {vocab_size, e});
    decoder_embedding_ = params_.add("abstracter.decoder.embedding", {vocab_size, e});
  }
  extract_encoder_ = declare_lstm(params_, "abstracter.ex_encoder.lstm", e, h);
  snippet_encoder_ = declare_lstm(params_, "abstracter.ab_encoder.lstm", e, h);
  context_weights_ = params_.add("abstracter.context.weight", {2 * h, h});
  context_bias_ = params_.add("abstracter.context.bias", {1, h});
  decoder_ = declare_lstm(params_, "abstracter.decoder.lstm", e + h, h);
  output_weights_ = params_.add("abstracter.output.weight", {h, vocab_size});
  output_bias_ = params_.add("abstracter.output.bias", {1, vocab_size});
  Rng rng(config_.seed);
  for (auto& p : params_) {
    if (!is_bias(p.name)) xavier_uniform(p, rng);
  }
}

template <typename T>
Var<T> encode_extractive(Tape<T>& tape, const AbstracterModel<T>& model, std::span<const Statement> important,
                         const Vocabulary& vocab) {
  if (important.empty()) throw EmptyInput("encode_extractive");
  std::vector<const Statement*> ordered;
  for (const auto& s : important) ordered.push_back(&s);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const Statement* a, const Statement* b) { return a->position < b->position; });
  TokenSequence tokens;
  for (const auto* s : ordered) tokens.insert(tokens.end(), s->tokens.begin(), s->tokens.end());
  return encode_sequence(tape, model, model.extract_embedding(), model.extract_encoder(), tokens, vocab,
                         model.config().max_extract_tokens);
}

template <typename T>
Var<T> encode_abstractive(Tape<T>& tape, const AbstracterModel<T>& model, const SegmentedSnippet& snippet,
                          const Vocabulary& vocab) {
  if (snippet.statements.empty()) throw EmptyInput("encode_abstractive");
  return encode_sequence(tape, model, model.snippet_embedding(), model.snippet_encoder(), snippet.full_tokens, vocab,
                         model.config().max_code_tokens);
}

template <typename T>
Var<T> fuse(Var<T> e_ex, Var<T> e_ab, FusionOrder order) {
  if (e_ex.shape() != e_ab.shape() || e_ex.rows() != 1) {
    throw ShapeError("fuse: " + to_string(e_ex.shape()) + " and " + to_string(e_ab.shape()));
  }
  return order == FusionOrder::kExAb ? ops::concat(e_ex, e_ab) : ops::concat(e_ab, e_ex);
}

template <typename T>
DecoderState<T> init_decoder(Tape<T>& tape, const AbstracterModel<T>& model, Var<T> e_fu) {
  const auto& params = model.params();
  if (e_fu.cols() != 2 * model.config().hidden_dim) throw ShapeError("init_decoder: fused width mismatch");
  auto context = ops::tanh(ops::add(ops::matmul(e_fu, tape.param(params[model.context_weights()])),
                                    tape.param(params[model.context_bias()])));
  const std::size_t h = model.config().hidden_dim;
  return {{context, tape.constant({1, h}, std::vector<T>(h, T{0}))}, context};
}

template <typename T>
DecodeStep<T> decode_step(Tape<T>& tape, const AbstracterModel<T>& model, std::int32_t previous,
                          const DecoderState<T>& state) {
  const auto& params = model.params();
  const auto& cfg = model.config();
  if (state.lstm.h.cols() != cfg.hidden_dim) throw ShapeError("decode_step: hidden width mismatch");
  const std::int32_t ids[1] = {previous};
  auto emb = ops::dropout(ops::embedding(tape.param(params[model.decoder_embedding()]), std::span<const std::int32_t>(ids)),
                          cfg.dropout);
  auto lstm = lstm_cell(ops::concat(emb, state.context), state.lstm, bind_lstm(tape, params, model.decoder()));
  auto logits = ops::add(ops::matmul(ops::dropout(lstm.h, cfg.dropout), tape.param(params[model.output_weights()])),
                         tape.param(params[model.output_bias()]));
  return {{lstm, state.context}, logits};
}

template <typename T>
Var<T> sequence_loss(Tape<T>& tape, const AbstracterModel<T>& model, const AbstracterSample& sample,
                     const Vocabulary& vocab) {
  const auto& params = model.params();
  const auto& cfg = model.config();
  const auto target = encode_tokens(sample.comment, vocab, cfg.max_comment_len, SequenceSide::kComment);
  auto state = start(tape, model, sample, vocab);
  auto table = tape.param(params[model.decoder_embedding()]);
  auto decoder = bind_lstm(tape, params, model.decoder());
  auto inputs = ops::dropout(
      ops::embedding(table, std::span<const std::int32_t>(target).first(target.size() - 1)), cfg.dropout);
  std::vector<Var<T>> hidden;
  hidden.reserve(target.size() - 1);
  LstmState<T> lstm = state.lstm;
  for (std::size_t t = 0; t + 1 < target.size(); ++t) {
    lstm = lstm_cell(ops::concat(ops::row(inputs, t), state.context), lstm, decoder);
    hidden.push_back(lstm.h);
  }
  auto h = ops::dropout(ops::stack_rows<T>(hidden), cfg.dropout);
  auto logits = ops::add(ops::matmul(h, tape.param(params[model.output_weights()])),
                         tape.param(params[model.output_bias()]));
  return ops::cross_entropy(logits, std::span<const std::int32_t>(target).subspan(1));
}

template <typename T>
Var<T> abstracter_loss(Tape<T>& tape, const AbstracterModel<T>& model, std::span<const AbstracterSample> batch,
                       const Vocabulary& vocab) {
  if (batch.empty()) throw ShapeError("abstracter_loss: empty batch");
  Var<T> total = sequence_loss(tape, model, batch[0], vocab);
  for (std::size_t i = 1; i < batch.size(); ++i) total = ops::add(total, sequence_loss(tape, model, batch[i], vocab));
  return ops::scale(total, static_cast<T>(1.0 / static_cast<double>(batch.size())));
}

template <typename T>
DecodeResult greedy_decode(const AbstracterModel<T>& model, const AbstracterSample& sample, const Vocabulary& vocab,
                           std::size_t max_len) {
  Tape<T> tape(false, 0, false);
  auto state = start(tape, model, sample, vocab);
  DecodeResult out;
  std::int32_t previous = Vocabulary::kBos;
  for (std::size_t t = 0; t < max_len; ++t) {
    auto step = decode_step(tape, model, previous, state);
    std::vector<float> logits(step.logits.value().begin(), step.logits.value().end());
    const auto lp = log_softmax(logits);
    std::int32_t best = -1;
    for (std::size_t v = 0; v < lp.size(); ++v) {
      const auto id = static_cast<std::int32_t>(v);
      if (emittable(id) && (best < 0 || lp[v] > lp[static_cast<std::size_t>(best)])) best = id;
    }
    out.step_log_probs.push_back(lp[static_cast<std::size_t>(best)]);
    out.total_log_prob += lp[static_cast<std::size_t>(best)];
    if (best == Vocabulary::kEos) {
      out.finished = true;
      break;
    }
    out.ids.push_back(best);
    out.tokens.push_back(vocab.token(best));
    previous = best;
    state = step.state;
  }
  return out;
}

template <typename T>
DecodeResult beam_decode(const AbstracterModel<T>& model, const AbstracterSample& sample, const Vocabulary& vocab,
                         std::size_t max_len, std::size_t beam_width) {
  auto greedy = greedy_decode(model, sample, vocab, max_len);
  if (beam_width <= 1) return greedy;

  struct Hypothesis {
    std::vector<std::int32_t> ids;
    std::vector<double> log_probs;
    double score = 0.0;
    DecoderState<T> state;
  };
  struct Candidate {
    double score;
    std::int32_t token;
    std::size_t parent;
    double log_prob;
  };

  Tape<T> tape(false, 0, false);
  std::vector<Hypothesis> live{{{}, {}, 0.0, start(tape, model, sample, vocab)}};
  std::vector<Hypothesis> finished;
  for (std::size_t t = 0; t < max_len && !live.empty(); ++t) {
    std::vector<Candidate> candidates;
    std::vector<DecoderState<T>> next_states;
    for (std::size_t b = 0; b < live.size(); ++b) {
      const auto& hyp = live[b];
      const std::int32_t previous = hyp.ids.empty() ? Vocabulary::kBos : hyp.ids.back();
      auto step = decode_step(tape, model, previous, hyp.state);
      next_states.push_back(step.state);
      std::vector<float> logits(step.logits.value().begin(), step.logits.value().end());
      const auto lp = log_softmax(logits);
      std::vector<std::int32_t> ids;
      for (std::size_t v = 0; v < lp.size(); ++v) {
        if (emittable(static_cast<std::int32_t>(v))) ids.push_back(static_cast<std::int32_t>(v));
      }
      const std::size_t keep = std::min(beam_width, ids.size());
      std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(keep), ids.end(),
                        [&lp](std::int32_t a, std::int32_t b) {
                          return lp[static_cast<std::size_t>(a)] != lp[static_cast<std::size_t>(b)]
                                     ? lp[static_cast<std::size_t>(a)] > lp[static_cast<std::size_t>(b)]
                                     : a < b;
                        });
      for (std::size_t k = 0; k < keep; ++k) {
        const auto v = static_cast<std::size_t>(ids[k]);
        candidates.push_back({hyp.score + lp[v], ids[k], b, lp[v]});
      }
    }
    std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      return a.score != b.score ? a.score > b.score : a.token < b.token;
    });
    std::vector<Hypothesis> next;
    for (const auto& c : candidates) {
      if (next.size() + finished.size() >= beam_width && next.size() >= beam_width) break;
      if (next.size() >= beam_width) break;
      Hypothesis h{live[c.parent].ids, live[c.parent].log_probs, c.score, next_states[c.parent]};
      h.log_probs.push_back(c.log_prob);
      if (c.token == Vocabulary::kEos) {
        finished.push_back(std::move(h));
      } else {
        h.ids.push_back(c.token);
        next.push_back(std::move(h));
      }
      if (finished.size() >= beam_width) break;
    }
    live = std::move(next);
    if (finished.size() >= beam_width) break;
    // Scores only decrease, so no live prefix can overtake the best finished one.
    if (!finished.empty() && !live.empty()) {
      double best_finished = finished.front().score;
      for (const auto& f : finished) best_finished = std::max(best_finished, f.score);
      double best_live = live.front().score;
      for (const auto& l : live) best_live = std::max(best_live, l.score);
      if (best_finished >= best_live) break;
    }
  }

  const Hypothesis* best = nullptr;
  bool best_finished = false;
  for (const auto& f : finished) {
    if (!best || f.score > best->score) {
      best = &f;
      best_finished = true;
    }
  }
  for (const auto& l : live) {
    if (l.ids.size() == max_len && (!best || l.score > best->score)) {
      best = &l;
      best_finished = false;
    }
  }
  if (!best || greedy.total_log_prob > best->score) return greedy;

  DecodeResult out;
  out.ids = best->ids;
  for (auto id : out.ids) out.tokens.push_back(vocab.token(id));
  out.step_log_probs = best->log_probs;
  out.total_log_prob = std::accumulate(out.step_log_probs.begin(), out.step_log_probs.end(), 0.0);
  out.finished = best_finished;
  return out;
}

std::vector<AbstracterSample> prepare_samples(std::span<const RawPair> pairs, const TrainedExtractor& extractor) {
  std::vector<AbstracterSample> out;
  out.reserve(pairs.size());
  for (const auto& pair : pairs) {
    AbstracterSample s;
    try {
      s.snippet = segment(pair.code, extractor.language);
      s.comment = tokenize_comment(pair.comment);
    } catch (const EmptySnippet&) {
      continue;
    } catch (const EmptyComment&) {
      continue;
    }
    s.important = select_important(extractor.model, s.snippet, extractor.vocab).statements;
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

double mean_loss(const AbstracterModel<float>& model, std::span<const AbstracterSample> samples,
                 const Vocabulary& vocab) {
  double total = 0.0;
  for (const auto& s : samples) {
    Tape<float> tape(false, 0, false);
    total += static_cast<double>(sequence_loss(tape, model, s, vocab).item());
  }
  return samples.empty() ? 0.0 : total / static_cast<double>(samples.size());
}

}  // namespace

TrainedAbstracter train_abstracter(std::span<const RawPair> corpus, const TrainedExtractor& extractor,
                                   const AbstracterConfig& config, std::span<const RawPair> validation,
                                   const EpochCallback& on_epoch) {
  config.validate();
  if (corpus.empty()) throw EmptyCorpus("abstracter");
  auto vocab = build_vocabulary(corpus, config.min_freq, config.max_vocab);
  if (!(vocab == extractor.vocab)) {
    throw VocabMismatch("corpus vocabulary (" + std::to_string(vocab.size()) +
                        " entries) differs from the extractor checkpoint's (" +
                        std::to_string(extractor.vocab.size()) + ")");
  }
  const auto train = prepare_samples(corpus, extractor);
  if (train.empty()) throw EmptyCorpus("abstracter");
  auto valid = validation.empty() ? train : prepare_samples(validation, extractor);
  if (valid.empty()) valid = train;

  TrainedAbstracter out{AbstracterModel<float>(config, vocab.size()), vocab, extractor.language, {}, 0};
  auto& params = out.model.params();
  auto opt = make_optimizer(params, AdamWConfig{config.lr, 0.9, 0.999, 1e-8, config.weight_decay, config.clip_norm});

  double best = mean_loss(out.model, valid, out.vocab);
  std::vector<std::vector<float>> best_values;
  for (const auto& p : params) best_values.push_back(p.value);

  std::vector<std::size_t> order(train.size());
  std::uint64_t step = 0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    Rng shuffler(mix_seed(config.seed, epoch));
    shuffler.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start_idx = 0; start_idx < order.size(); start_idx += config.batch_size) {
      const std::size_t end = std::min(order.size(), start_idx + config.batch_size);
      std::vector<AbstracterSample> batch;
      for (std::size_t k = start_idx; k < end; ++k) batch.push_back(train[order[k]]);
      params.zero_grad();
      Tape<float> tape(true, mix_seed(config.seed ^ 0xA0761D6478BD642Full, step++));
      auto loss = abstracter_loss(tape, out.model, std::span<const AbstracterSample>(batch), out.vocab);
      epoch_loss += static_cast<double>(loss.item()) * static_cast<double>(batch.size());
      tape.backward(loss);
      adamw_step(params, opt);
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = epoch_loss / static_cast<double>(order.size());
    stats.valid_loss = mean_loss(out.model, valid, out.vocab);
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

DecodeResult generate_summary(std::string_view code, const TrainedExtractor& extractor,
                              const TrainedAbstracter& abstracter, std::size_t max_len, std::size_t beam_width) {
  if (!(extractor.vocab == abstracter.vocab)) {
    throw VocabMismatch("extractor and abstracter checkpoints use different vocabularies");
  }
  if (max_len == 0) throw UsageError("max_len must be at least 1");
  AbstracterSample sample;
  sample.snippet = segment(code, extractor.language);
  sample.important = select_important(extractor.model, sample.snippet, extractor.vocab).statements;
  return beam_width <= 1 ? greedy_decode(abstracter.model, sample, abstracter.vocab, max_len)
                         : beam_decode(abstracter.model, sample, abstracter.vocab, max_len, beam_width);
}

#define CODESUM_INSTANTIATE_ABSTRACTER(T)                                                                             \
  template class AbstracterModel<T>;                                                                                  \
  template Var<T> encode_extractive<T>(Tape<T>&, const AbstracterModel<T>&, std::span<const Statement>,               \
                                       const Vocabulary&);                                                            \
  template Var<T> encode_abstractive<T>(Tape<T>&, const AbstracterModel<T>&, const SegmentedSnippet&,                 \
                                        const Vocabulary&);                                                           \
  template Var<T> fuse<T>(Var<T>, Var<T>, FusionOrder);                                                               \
  template DecoderState<T> init_decoder<T>(Tape<T>&, const AbstracterModel<T>&, Var<T>);                              \
  template DecodeStep<T> decode_step<T>(Tape<T>&, const AbstracterModel<T>&, std::int32_t, const DecoderState<T>&);   \
  template Var<T> sequence_loss<T>(Tape<T>&, const AbstracterModel<T>&, const AbstracterSample&, const Vocabulary&);  \
  template Var<T> abstracter_loss<T>(Tape<T>&, const AbstracterModel<T>&, std::span<const AbstracterSample>,          \
                                     const Vocabulary&);                                                              \
  template DecodeResult greedy_decode<T>(const AbstracterModel<T>&, const AbstracterSample&, const Vocabulary&,       \
                                         std::size_t);                                                                \
  template DecodeResult beam_decode<T>(const AbstracterModel<T>&, const AbstracterSample&, const Vocabulary&,         \
                                       std::size_t, std::size_t);

CODESUM_INSTANTIATE_ABSTRACTER(float)
CODESUM_INSTANTIATE_ABSTRACTER(double)
#undef CODESUM_INSTANTIATE_ABSTRACTER

}  // namespace codesum
