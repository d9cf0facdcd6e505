#include <cmath>

#include "codesum/abstracter.hpp"
#include "codesum/extractor.hpp"
#include "codesum/gradcheck.hpp"
#include "codesum/nn.hpp"
#include "codesum/oracle.hpp"

namespace codesum {
namespace {

using V = Var<double>;

std::vector<double> random_values(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::vector<double> out(n);
  for (auto& x : out) x = rng.uniform(lo, hi);
  return out;
}

std::size_t random_param(ParameterSet<double>& params, Rng& rng, const std::string& name, Shape shape,
                         double lo = -1.0, double hi = 1.0) {
  auto idx = params.add(name, shape);
  params[idx].value = random_values(rng, shape.rows * shape.cols, lo, hi);
  return idx;
}

// Contracts an arbitrary output with fixed random weights so every element
// contributes a distinct gradient.
V project(Tape<double>& tape, V out, std::uint64_t seed) {
  Rng rng(seed);
  auto w = tape.constant(out.shape(), random_values(rng, out.rows() * out.cols()));
  return ops::sum(ops::mul(out, w));
}

struct Case {
  std::string name;
  ParameterSet<double> params;
  LossFunction loss;
};

const char* kJava =
    "public int count(List<String> items) {\n"
    "  int total = 0;\n"
    "  for (String item : items) { if (item.isEmpty()) continue; total += item.length(); }\n"
    "  return total;\n"
    "}\n";
const char* kComment = "Returns the total length of all non empty items.";

}  // namespace

std::vector<GradCheckCase> standard_gradcheck_suite(const GradCheckOptions& options) {
  std::vector<GradCheckCase> out;
  Rng rng(options.seed);

  auto run = [&](const std::string& name, auto&& declare, auto&& loss, bool training = false) {
    auto params = std::make_shared<ParameterSet<double>>();
    declare(*params);
    auto opts = options;
    opts.training = training;
    auto fn = [params, loss](Tape<double>& tape) { return loss(tape, *params); };
    out.push_back({name, finite_difference_check(fn, *params, opts)});
  };

  auto unary = [&](const std::string& name, Shape shape, auto&& op, double lo = -1.0, double hi = 1.0,
                   bool training = false) {
    run(
        name, [&](ParameterSet<double>& p) { random_param(p, rng, "a", shape, lo, hi); },
        [op](Tape<double>& t, const ParameterSet<double>& p) { return project(t, op(t.param(p[0])), 11); },
        training);
  };
  auto binary = [&](const std::string& name, Shape sa, Shape sb, auto&& op) {
    run(
        name,
        [&](ParameterSet<double>& p) {
          random_param(p, rng, "a", sa);
          random_param(p, rng, "b", sb);
        },
        [op](Tape<double>& t, const ParameterSet<double>& p) {
          return project(t, op(t.param(p[0]), t.param(p[1])), 12);
        });
  };

  binary("add", {3, 4}, {3, 4}, [](V a, V b) { return ops::add(a, b); });
  binary("add_broadcast", {3, 4}, {1, 4}, [](V a, V b) { return ops::add(a, b); });
  binary("mul", {3, 4}, {3, 4}, [](V a, V b) { return ops::mul(a, b); });
  binary("matmul", {3, 5}, {5, 2}, [](V a, V b) { return ops::matmul(a, b); });
  binary("concat", {2, 3}, {2, 4}, [](V a, V b) { return ops::concat(a, b); });
  unary("scale", {3, 4}, [](V a) { return ops::scale(a, -1.7); });
  unary("slice_cols", {3, 6}, [](V a) { return ops::slice_cols(a, 2, 3); });
  unary("row", {4, 3}, [](V a) { return ops::row(a, 2); });
  unary("stack_rows", {3, 4}, [](V a) {
    std::vector<V> rows{ops::row(a, 2), ops::row(a, 0), ops::row(a, 2)};
    return ops::stack_rows<double>(rows);
  });
  unary("tanh", {3, 4}, [](V a) { return ops::tanh(a); }, -2.0, 2.0);
  unary("sigmoid", {3, 4}, [](V a) { return ops::sigmoid(a); }, -4.0, 4.0);
  unary("embedding", {6, 3}, [](V a) {
    const std::int32_t ids[] = {4, 0, 4, 2};
    return ops::embedding(a, std::span<const std::int32_t>(ids));
  });
  unary("dropout", {4, 5}, [](V a) { return ops::dropout(a, 0.3); }, -1.0, 1.0, true);
  unary("softmax", {3, 5}, [](V a) { return ops::softmax(a); }, -2.0, 2.0);
  unary("sum", {3, 4}, [](V a) { return ops::scale(ops::sum(a), 0.5); });
  unary("mean", {3, 4}, [](V a) { return ops::scale(ops::mean(a), 3.0); });
  run(
      "binary_cross_entropy", [&](ParameterSet<double>& p) { random_param(p, rng, "p", {1, 6}, 0.05, 0.95); },
      [](Tape<double>& t, const ParameterSet<double>& p) {
        const std::uint8_t gold[] = {1, 0, 0, 1, 1, 0};
        return ops::binary_cross_entropy(t.param(p[0]), std::span<const std::uint8_t>(gold));
      });
  run(
      "nll", [&](ParameterSet<double>& p) { random_param(p, rng, "p", {3, 4}, 0.05, 0.95); },
      [](Tape<double>& t, const ParameterSet<double>& p) {
        const std::int32_t targets[] = {3, 0, 1};
        return ops::nll(t.param(p[0]), std::span<const std::int32_t>(targets));
      });
  run(
      "cross_entropy", [&](ParameterSet<double>& p) { random_param(p, rng, "z", {3, 5}, -2.0, 2.0); },
      [](Tape<double>& t, const ParameterSet<double>& p) {
        const std::int32_t targets[] = {4, 0, 2};
        return ops::cross_entropy(t.param(p[0]), std::span<const std::int32_t>(targets));
      });

  run(
      "lstm_cell",
      [&](ParameterSet<double>& p) {
        declare_lstm(p, "cell", 3, 4);
        for (auto& q : p) q.value = random_values(rng, q.value.size(), -0.8, 0.8);
        random_param(p, rng, "x", {1, 3});
        random_param(p, rng, "h", {1, 4});
        random_param(p, rng, "c", {1, 4});
      },
      [](Tape<double>& t, const ParameterSet<double>& p) {
        LstmLayer layer{0, 1, 2, 3, 4};
        auto w = bind_lstm(t, p, layer);
        auto next = lstm_cell(t.param(p[3]), {t.param(p[4]), t.param(p[5])}, w);
        return ops::add(project(t, next.h, 13), project(t, next.c, 14));
      });

  // Full model losses on a single toy snippet.
  const auto snippet = segment(kJava, Language::kJava);
  const auto comment = tokenize_comment(kComment);
  std::vector<TokenSequence> seqs{snippet.full_tokens, comment};
  const auto vocab = build_vocabulary(std::span<const TokenSequence>(seqs), 1, 2000);
  const auto labeled = label_statements(snippet, comment);

  ExtractorConfig ec;
  ec.embed_dim = 4;
  ec.hidden_dim = 5;
  ec.dropout = 0.1;
  ec.seed = options.seed;
  auto extractor = std::make_shared<ExtractorModel<double>>(ec, vocab.size());
  {
    auto opts = options;
    opts.training = true;
    auto fn = [extractor, labeled, vocab](Tape<double>& t) { return snippet_loss(t, *extractor, labeled, vocab); };
    out.push_back({"extractor_loss", finite_difference_check(fn, extractor->params(), opts)});
  }

  AbstracterSample sample;
  sample.snippet = snippet;
  for (std::size_t i = 0; i < labeled.labels.size(); ++i) {
    if (labeled.labels[i]) sample.important.push_back(snippet.statements[i]);
  }
  sample.comment = comment;
  for (bool share : {true, false}) {
    AbstracterConfig ac;
    ac.embed_dim = 4;
    ac.hidden_dim = 5;
    ac.dropout = 0.1;
    ac.max_comment_len = 12;
    ac.max_code_tokens = 24;
    ac.share_embeddings = share;
    ac.seed = options.seed;
    auto model = std::make_shared<AbstracterModel<double>>(ac, vocab.size());
    auto opts = options;
    opts.training = true;
    auto fn = [model, sample, vocab](Tape<double>& t) { return sequence_loss(t, *model, sample, vocab); };
    out.push_back({share ? "abstracter_loss" : "abstracter_loss_unshared",
                   finite_difference_check(fn, model->params(), opts)});
  }
  return out;
}

}  // namespace codesum
