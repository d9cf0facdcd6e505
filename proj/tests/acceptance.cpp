// Acceptance run: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when everything passes).
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "codesum/abstracter.hpp"
#include "codesum/checkpoint.hpp"
#include "codesum/config.hpp"
#include "codesum/extractor.hpp"
#include "codesum/gradcheck.hpp"
#include "codesum/metrics.hpp"
#include "codesum/oracle.hpp"
#include "codesum/stats.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace codesum;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned tolerances and budgets.
constexpr double kScoreTol = 1e-9;
constexpr double kBpTol = 1e-12;
constexpr double kMeteorIdentityTol = 1e-9;
constexpr double kGradTol = 1e-4;
constexpr double kGradEps = 1e-5;
constexpr double kGradFloor = 1e-5;
constexpr double kApproxTol = 0.02;
constexpr double kLossAnchorTol = 1e-6;
constexpr double kMetricBudget = 30.0;
constexpr double kLabelBudget = 30.0;
constexpr double kGradBudget = 120.0;
constexpr double kOverfitBudget = 600.0;
constexpr double kAbstracterExactFraction = 0.9;
constexpr std::size_t kDeterminismEpochs = 20;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int cli(std::vector<std::string> args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int status = cli::run_pipeline(args, o, e);
  if (out) *out = o.str();
  if (status != 0) std::fprintf(stderr, "  cli %s -> %d: %s", args[0].c_str(), status, e.str().c_str());
  return status;
}

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %d %s (%.1fs)%s%s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), seconds_since(start),
              o.detail.empty() ? "" : ": ", o.detail.c_str());
  std::fflush(stdout);
}

// Shared between criteria 5, 6 and 8.
struct Toy {
  std::vector<RawPair> pairs = load_corpus(testing_support::toy_corpus()).pairs;
  std::filesystem::path dir = testing_support::scratch_dir("acceptance");
  std::filesystem::path extractor_ckpt = dir / "extractor.ckpt";
  std::filesystem::path abex_ckpt = dir / "abex.ckpt";
};

Toy& toy() {
  static Toy t;
  return t;
}

Outcome metric_oracles() {
  Outcome o;
  const auto start = Clock::now();
  std::mt19937_64 rng(20240601);
  std::size_t mismatches = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto r = testing_support::random_tokens(rng, 1, 15, 10);
    const auto g = testing_support::random_tokens(rng, 1, 15, 10);
    bool ok = lcs_length(r, g) == oracle::lcs(r, g);
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto m = ngram_matches(r, g, n);
      const auto [om, ot] = oracle::ngram_counts(r, g, n);
      ok = ok && m.matched == om && m.total == ot;
    }
    const auto a = meteor_alignment(r, g);
    const auto oa = oracle::meteor_alignment(r, g);
    ok = ok && a.matches == oa.matches && a.chunks == oa.chunks;
    for (double d : {std::abs(bleu4(r, g) - oracle::bleu4(r, g)), std::abs(rouge_l(r, g) - oracle::rouge_l(r, g)),
                     std::abs(meteor(r, g) - oracle::meteor(r, g))}) {
      worst = std::max(worst, d);
      ok = ok && d <= kScoreTol;
    }
    mismatches += ok ? 0 : 1;
  }
  const double elapsed = seconds_since(start);
  o.require(mismatches == 0, std::to_string(mismatches) + " of 1000 pairs disagree");
  o.require(elapsed < kMetricBudget, "took " + fmt("%.1f", elapsed) + "s");
  if (o.pass) o.detail = "1000 pairs, max score diff " + fmt("%.1e", worst);
  return o;
}

Outcome metric_anchors() {
  Outcome o;
  const TokenSequence r{"get", "the", "name"};
  o.require(rouge_l(r, r) == 1.0, "rouge_l(r,r) != 1");
  o.require(rouge_l(r, TokenSequence{"x", "y"}) == 0.0, "rouge_l at LCS 0 != 0");
  const double bp = brevity_penalty(4, 2);
  o.require(std::abs(bp - std::exp(-1.0)) <= kBpTol, "BP(4,2) = " + fmt("%.15f", bp));
  const double m = meteor(r, r);
  o.require(std::abs(m - (1.0 - 0.5 / 27.0)) <= kMeteorIdentityTol, "meteor identity = " + fmt("%.12f", m));
  return o;
}

Outcome oracle_labeling() {
  Outcome o;
  const auto start = Clock::now();
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> count(1, 8);
  std::size_t bad_increase = 0, bad_match = 0, fallbacks_missed = 0, fallbacks_seen = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<TokenSequence> stmts(count(rng));
    for (auto& s : stmts) s = testing_support::random_tokens(rng, 1, 6, 15);
    const bool disjoint = trial % 10 == 0;
    const auto comment = testing_support::random_tokens(rng, 1, 10, 15, disjoint ? "c" : "w");
    const auto snippet = testing_support::snippet_of(stmts);
    const auto out = label_statements(snippet, comment);
    if (disjoint) {
      ++fallbacks_seen;
      if (!out.fallback || out.trace.size() != 1 || out.labels[out.trace[0].statement] != 1) ++fallbacks_missed;
    } else {
      double prev = 0.0;
      std::vector<std::size_t> accepted;
      for (const auto& step : out.trace) {
        accepted.push_back(step.statement);
        const double joint = informativity(accepted, snippet, comment);
        if (!(out.fallback || (joint > prev && joint == step.informativity))) ++bad_increase;
        prev = joint;
      }
    }
    const auto ref = oracle::greedy_labels(stmts, comment);
    bool same = std::vector<int>(out.labels.begin(), out.labels.end()) == ref.labels &&
                out.fallback == ref.fallback && out.trace.size() == ref.trace.size();
    for (std::size_t k = 0; same && k < ref.trace.size(); ++k) {
      same = out.trace[k].statement == ref.trace[k].first && out.trace[k].informativity == ref.trace[k].second;
    }
    bad_match += same ? 0 : 1;
  }
  const double elapsed = seconds_since(start);
  o.require(bad_increase == 0, std::to_string(bad_increase) + " non-increasing accepts");
  o.require(bad_match == 0, std::to_string(bad_match) + " traces differ from the reference");
  o.require(fallbacks_missed == 0, std::to_string(fallbacks_missed) + " missed fallbacks");
  o.require(elapsed < kLabelBudget, "took " + fmt("%.1f", elapsed) + "s");
  if (o.pass) o.detail = "200 snippets, " + std::to_string(fallbacks_seen) + " disjoint-comment fallbacks";
  return o;
}

Outcome gradients() {
  Outcome o;
  const auto start = Clock::now();
  double worst = 0.0;
  std::string worst_case;
  std::size_t cases = 0;
  GradCheckOptions options;
  options.eps = kGradEps;
  options.floor = kGradFloor;
  for (const auto& c : standard_gradcheck_suite(options)) {
    ++cases;
    if (c.result.max_relative_error > worst) {
      worst = c.result.max_relative_error;
      worst_case = c.name;
    }
    o.require(c.result.max_relative_error <= kGradTol, c.name + " " + fmt("%.2e", c.result.max_relative_error));
  }
  const double elapsed = seconds_since(start);
  o.require(elapsed < kGradBudget, "took " + fmt("%.1f", elapsed) + "s");
  if (o.pass) o.detail = std::to_string(cases) + " checks, worst " + fmt("%.2e", worst) + " (" + worst_case + ")";
  return o;
}

Outcome overfit() {
  Outcome o;
  auto& t = toy();
  const auto rc = [] {
    auto c = preset_config(Preset::kDesk);
    c.finalize();
    return c;
  }();
  o.require(rc.extractor.embed_dim == 64 && rc.extractor.hidden_dim == 64 && rc.extractor.epochs <= 300,
            "desk preset is not E=H=64 within 300 epochs");

  auto start = Clock::now();
  const auto extractor = train_extractor(t.pairs, rc.extractor, Language::kJava);
  const double ex_time = seconds_since(start);
  const double accuracy = label_accuracy(extractor, label_corpus(t.pairs, Language::kJava));
  save_checkpoint(to_checkpoint(extractor), t.extractor_ckpt);
  o.require(accuracy == 1.0, "extractor label accuracy " + fmt("%.4f", accuracy));
  o.require(ex_time < kOverfitBudget, "extractor took " + fmt("%.0f", ex_time) + "s");

  auto abs_cfg = rc.abstracter;
  abs_cfg.fusion = FusionOrder::kAbEx;
  start = Clock::now();
  const auto abstracter = train_abstracter(t.pairs, extractor, abs_cfg);
  const double ab_time = seconds_since(start);
  save_checkpoint(to_checkpoint(abstracter), t.abex_ckpt);
  std::size_t exact = 0;
  std::size_t first_exact = t.pairs.size();
  for (std::size_t i = 0; i < t.pairs.size(); ++i) {
    const auto result = generate_summary(t.pairs[i].code, extractor, abstracter, abs_cfg.max_comment_len);
    if (result.tokens == tokenize_comment(t.pairs[i].comment)) {
      ++exact;
      first_exact = std::min(first_exact, i);
    }
  }
  const double fraction = static_cast<double>(exact) / static_cast<double>(t.pairs.size());
  o.require(fraction >= kAbstracterExactFraction, "abstracter reproduced " + std::to_string(exact) + "/32");
  o.require(ab_time < kOverfitBudget, "abstracter took " + fmt("%.0f", ab_time) + "s");

  // The CLI on the same checkpoints prints the gold comment and exits 0.
  if (first_exact < t.pairs.size()) {
    const auto code = t.dir / "exact.java";
    std::ofstream(code) << t.pairs[first_exact].code;
    std::string printed;
    const int status = cli({"summarize", "--extractor", t.extractor_ckpt.string(), "--abstracter",
                            t.abex_ckpt.string(), "--code", code.string()},
                           &printed);
    const auto gold = join_tokens(tokenize_comment(t.pairs[first_exact].comment)) + "\n";
    o.require(status == 0 && printed == gold, "summarize printed '" + printed + "'");
  }
  if (o.pass) {
    o.detail = "label accuracy 100% in " + fmt("%.0f", ex_time) + "s; " + std::to_string(exact) +
               "/32 exact comments in " + fmt("%.0f", ab_time) + "s";
  }
  return o;
}

Outcome fusion_ablation() {
  Outcome o;
  auto& t = toy();
  {
    Tape<double> tape;
    auto ex = tape.constant({1, 4}, {1, 2, 3, 4});
    auto ab = tape.constant({1, 4}, {5, 6, 7, 8});
    const auto a = fuse(ex, ab, FusionOrder::kExAb).value();
    const auto b = fuse(ex, ab, FusionOrder::kAbEx).value();
    bool swapped = true;
    for (std::size_t i = 0; i < 4; ++i) swapped = swapped && a[i] == b[i + 4] && a[i + 4] == b[i];
    o.require(swapped, "fuse block swap identity");
  }
  if (!std::filesystem::exists(t.extractor_ckpt) || !std::filesystem::exists(t.abex_ckpt)) {
    o.require(false, "overfit checkpoints missing");
    return o;
  }
  const auto corpus = testing_support::toy_corpus().string();
  const auto exab_ckpt = (t.dir / "exab.ckpt").string();
  o.require(cli({"train-abstracter", "--corpus", corpus, "--extractor", t.extractor_ckpt.string(), "--fusion", "exab",
                 "--out", exab_ckpt, "--quiet"}) == 0,
            "train-abstracter --fusion exab failed");

  std::ofstream refs(t.dir / "refs.txt");
  for (const auto& p : t.pairs) refs << join_tokens(tokenize_comment(p.comment)) << "\n";
  refs.close();
  std::vector<std::string> reports;
  for (const auto& [name, ckpt] : {std::pair<std::string, std::string>{"abex", t.abex_ckpt.string()},
                                   std::pair<std::string, std::string>{"exab", exab_ckpt}}) {
    std::string hyps;
    o.require(cli({"summarize", "--extractor", t.extractor_ckpt.string(), "--abstracter", ckpt, "--corpus", corpus},
                  &hyps) == 0,
              "summarize " + name);
    std::ofstream(t.dir / (name + ".txt")) << hyps;
  }
  std::string table;
  const auto record = (t.dir / "ablation.json").string();
  o.require(cli({"evaluate", "--refs", (t.dir / "refs.txt").string(), "--hyps", (t.dir / "abex.txt").string(),
                 "--compare", (t.dir / "exab.txt").string(), "--buckets", "comment", "--record", record},
                &table) == 0,
            "evaluate --compare");
  o.require(table.find("samples: 32") != std::string::npos && table.find("ROUGE-L  U=") != std::string::npos,
            "report lacks samples or significance");
  if (o.pass) {
    const auto at = table.find("mean");
    std::istringstream row(table.substr(at, table.find('\n', at) - at));
    std::string label, bleu, meteor_s, rouge;
    row >> label >> bleu >> meteor_s >> rouge;
    o.detail = "both fusions trained and scored; AbEx BLEU/METEOR/ROUGE-L " + bleu + "/" + meteor_s + "/" + rouge +
               ", rank-sum test against ExAb";
  }
  return o;
}

Outcome statistics() {
  Outcome o;
  const auto small = mann_whitney_u_test(std::vector<double>{1, 2, 3}, std::vector<double>{4, 5, 6});
  o.require(small.method == TestMethod::kExact && std::abs(small.p_value - 0.1) < 1e-12,
            "exact p = " + fmt("%.6f", small.p_value));
  o.require(std::abs(oracle::mann_whitney_exact({1, 2, 3}, {4, 5, 6}) - 0.1) < 1e-12, "enumeration p != 0.1");
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> xs(10), ys(10);
    for (auto& x : xs) x = u(rng);
    for (auto& y : ys) y = u(rng) + 0.02 * trial;
    const auto exact = mann_whitney_u_test(xs, ys);
    const auto approx = mann_whitney_u_normal(xs, ys);
    o.require(exact.method == TestMethod::kExact, "10+10 not exact");
    worst = std::max(worst, std::abs(exact.p_value - approx.p_value));
    o.require(std::abs(exact.p_value - oracle::mann_whitney_exact(xs, ys)) < 1e-12, "exact p != enumeration");
  }
  o.require(worst <= kApproxTol, "exact vs normal diff " + fmt("%.4f", worst));
  const std::pair<double, const char*> bands[] = {{0.2, "ns"},     {0.05, "ns"},     {0.03, "*"},    {0.01, "**"},
                                                  {0.002, "**"},   {0.001, "***"},  {0.0001, "***"}, {0.00005, "****"}};
  for (const auto& [p, label] : bands) {
    o.require(band_label(significance_band(p)) == label, "band for p=" + fmt("%g", p));
  }
  if (o.pass) o.detail = "p({1,2,3},{4,5,6}) = 0.1, max exact/normal gap " + fmt("%.4f", worst);
  return o;
}

Outcome determinism() {
  Outcome o;
  auto& t = toy();
  const auto corpus = testing_support::toy_corpus().string();
  const auto cfg = (t.dir / "det.cfg").string();
  std::ofstream(cfg) << "epochs = " << kDeterminismEpochs << "\nseed = 99\n";
  std::vector<std::string> ex_bytes, ab_bytes, summaries;
  for (int runno = 0; runno < 2; ++runno) {
    const auto ex = (t.dir / ("det_ex" + std::to_string(runno) + ".ckpt")).string();
    const auto ab = (t.dir / ("det_ab" + std::to_string(runno) + ".ckpt")).string();
    o.require(cli({"train-extractor", "--corpus", corpus, "--lang", "java", "--config", cfg, "--out", ex, "--quiet"}) ==
                  0,
              "train-extractor run " + std::to_string(runno));
    o.require(cli({"train-abstracter", "--corpus", corpus, "--extractor", ex, "--config", cfg, "--fusion", "abex",
                   "--out", ab, "--quiet"}) == 0,
              "train-abstracter run " + std::to_string(runno));
    std::string out;
    o.require(cli({"summarize", "--extractor", ex, "--abstracter", ab, "--corpus", corpus, "--beam", "3"}, &out) == 0,
              "summarize run " + std::to_string(runno));
    ex_bytes.push_back(read_bytes(ex));
    ab_bytes.push_back(read_bytes(ab));
    summaries.push_back(out);
  }
  o.require(!ex_bytes[0].empty() && ex_bytes[0] == ex_bytes[1], "extractor checkpoints differ");
  o.require(!ab_bytes[0].empty() && ab_bytes[0] == ab_bytes[1], "abstracter checkpoints differ");
  o.require(summaries[0] == summaries[1], "summaries differ");

  for (const auto* bytes : {&ex_bytes[0], &ab_bytes[0]}) {
    const auto ckpt = parse_checkpoint(*bytes);
    const auto again = ckpt.kind == ModelKind::kExtractor ? to_checkpoint(extractor_from_checkpoint(ckpt))
                                                          : to_checkpoint(abstracter_from_checkpoint(ckpt));
    const auto path = t.dir / "roundtrip.ckpt";
    save_checkpoint(again, path);
    o.require(read_bytes(path) == *bytes, std::string(model_kind_name(ckpt.kind)) + " round trip not byte-identical");
  }
  if (o.pass) {
    o.detail = "two " + std::to_string(kDeterminismEpochs) + "-epoch pipelines: " + std::to_string(ex_bytes[0].size()) +
               "+" + std::to_string(ab_bytes[0].size()) + " checkpoint bytes identical, summaries identical";
  }
  return o;
}

Outcome loss_anchors() {
  Outcome o;
  const auto& pairs = toy().pairs;
  const auto vocab = build_vocabulary(pairs, 1, 2000);
  ExtractorConfig ec;
  ExtractorModel<double> ex(ec, vocab.size());
  auto& cw = ex.params()[ex.classifier_weights()].value;
  std::fill(cw.begin(), cw.end(), 0.0);
  const auto labeled = label_corpus(pairs, Language::kJava);
  double worst_ex = 0.0;
  for (const auto& s : labeled) {
    Tape<double> tape;
    worst_ex = std::max(worst_ex, std::abs(snippet_loss(tape, ex, s, vocab).item() - std::log(2.0)));
  }
  o.require(worst_ex <= kLossAnchorTol, "extractor loss off ln 2 by " + fmt("%.2e", worst_ex));

  const TrainedExtractor frozen{ExtractorModel<float>(ec, vocab.size()), vocab, Language::kJava, {}, 0};
  const auto samples = prepare_samples(pairs, frozen);
  AbstracterConfig ac;
  ac.dropout = 0.0;
  AbstracterModel<double> ab(ac, vocab.size());
  auto& ow = ab.params()[ab.output_weights()].value;
  std::fill(ow.begin(), ow.end(), 0.0);
  Tape<double> tape;
  const double loss = abstracter_loss(tape, ab, std::span<const AbstracterSample>(samples), vocab).item();
  const double ln_v = std::log(static_cast<double>(vocab.size()));
  o.require(std::abs(loss - ln_v) <= kLossAnchorTol, "abstracter loss " + fmt("%.9f", loss) + " vs ln V " +
                                                         fmt("%.9f", ln_v));
  if (o.pass) {
    o.detail = "ln 2 gap " + fmt("%.1e", worst_ex) + ", ln V (V=" + std::to_string(vocab.size()) + ") gap " +
               fmt("%.1e", std::abs(loss - ln_v));
  }
  return o;
}

}  // namespace

int main() {
  report(1, "metric oracle equivalence", metric_oracles);
  report(2, "metric anchor values", metric_anchors);
  report(3, "oracle labeling", oracle_labeling);
  report(4, "gradient verification", gradients);
  report(5, "overfit capability", overfit);
  report(6, "fusion ablation harness", fusion_ablation);
  report(7, "statistics", statistics);
  report(8, "determinism and persistence", determinism);
  report(9, "loss anchors", loss_anchors);
  std::printf("%d/9 criteria passed\n", 9 - failures);
  return failures;
}
