#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "codesum/abstracter.hpp"
#include "codesum/checkpoint.hpp"
#include "codesum/config.hpp"
#include "codesum/error.hpp"
#include "codesum/extractor.hpp"
#include "codesum/gradcheck.hpp"
#include "codesum/metrics.hpp"
#include "codesum/oracle.hpp"
#include "codesum/report.hpp"
#include "codesum/segmenter.hpp"
#include "json.hpp"

namespace codesum::cli {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> read_lines(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::size_t nonblank_lines(std::string_view code) {
  std::size_t count = 0;
  bool blank = true;
  for (char c : code) {
    if (c == '\n') {
      count += blank ? 0 : 1;
      blank = true;
    } else if (c != ' ' && c != '\t' && c != '\r') {
      blank = false;
    }
  }
  return count + (blank ? 0 : 1);
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

struct TrainFlags {
  std::string corpus;
  std::string valid;
  std::string config;
  std::string preset = "desk";
  std::string out;
  std::optional<std::size_t> epochs;
  bool quiet = false;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--corpus", f.corpus, "training corpus (JSON lines)")->required();
  cmd->add_option("--valid", f.valid, "validation corpus; defaults to the training corpus");
  cmd->add_option("--config", f.config, "key = value hyperparameter file");
  cmd->add_option("--preset", f.preset, "base hyperparameters: desk or full");
  cmd->add_option("--epochs", f.epochs, "override the configured epoch count");
  cmd->add_option("--out", f.out, "checkpoint to write")->required();
  cmd->add_flag("--quiet", f.quiet, "no per-epoch log");
}

RunConfig resolve_config(const TrainFlags& f) {
  auto rc = preset_config(parse_preset(f.preset));
  if (!f.config.empty()) rc = load_config(f.config, rc);
  apply_seed_override(rc, std::getenv("EACS_SEED"));
  if (f.epochs) rc.extractor.epochs = rc.abstracter.epochs = *f.epochs;
  rc.finalize();
  return rc;
}

std::vector<RawPair> load_pairs(const std::string& path, std::ostream& err) {
  auto loaded = load_corpus(path);
  if (loaded.skipped > 0) err << "codesum: corpus: skipped " << loaded.skipped << " unusable pair(s) in " << path << "\n";
  return std::move(loaded.pairs);
}

EpochCallback epoch_logger(bool quiet, std::ostream& err) {
  if (quiet) return {};
  return [&err](const EpochStats& s) {
    err << "epoch " << s.epoch << " train " << fmt("%.6f", s.train_loss) << " valid " << fmt("%.6f", s.valid_loss)
        << (s.best ? " *" : "") << "\n";
  };
}

int cmd_segment(const std::string& lang, const std::string& file, std::ostream& out) {
  const auto language = parse_language(lang);
  const auto code = file.empty() || file == "-"
                        ? std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>())
                        : read_file(file);
  const auto snippet = segment(code, language);
  for (const auto& s : snippet.statements) out << s.text << "\n";
  return 0;
}

int cmd_label(const std::string& corpus, const std::string& lang, const std::string& out_path, std::ostream& out,
              std::ostream& err) {
  const auto pairs = load_pairs(corpus, err);
  const auto language = parse_language(lang);
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw IoError("cannot write " + out_path);
  }
  std::ostream& sink = out_path.empty() ? out : file;
  for (const auto& pair : pairs) {
    SegmentedSnippet snippet;
    try {
      snippet = segment(pair.code, language);
    } catch (const EmptySnippet&) {
      continue;
    }
    const auto labeled = label_statements(snippet, tokenize_comment(pair.comment));
    nlohmann::json rec;
    rec["id"] = pair.id;
    std::vector<std::string> texts;
    for (const auto& s : snippet.statements) texts.push_back(s.text);
    rec["statements"] = texts;
    rec["labels"] = labeled.labels;
    auto trace = nlohmann::json::array();
    for (const auto& t : labeled.trace) trace.push_back({{"statement", t.statement}, {"informativity", t.informativity}});
    rec["trace"] = trace;
    rec["fallback"] = labeled.fallback;
    sink << rec.dump() << "\n";
  }
  if (!sink) throw IoError("write failed");
  return 0;
}

int cmd_train_extractor(const TrainFlags& f, const std::string& lang, std::ostream& out, std::ostream& err) {
  auto rc = resolve_config(f);
  if (!lang.empty()) rc.language = parse_language(lang);
  const auto corpus = load_pairs(f.corpus, err);
  const auto valid = f.valid.empty() ? std::vector<RawPair>{} : load_pairs(f.valid, err);
  auto trained = train_extractor(corpus, rc.extractor, rc.language, valid, epoch_logger(f.quiet, err));
  save_checkpoint(to_checkpoint(trained), f.out);
  const auto samples = label_corpus(corpus, rc.language);
  out << "best epoch " << trained.best_epoch << ", training label accuracy "
      << fmt("%.2f", 100.0 * label_accuracy(trained, samples)) << "%\n";
  return 0;
}

int cmd_extract(const std::string& ckpt, const std::string& code_path, std::ostream& out) {
  const auto extractor = extractor_from_checkpoint(load_checkpoint(ckpt));
  const auto selection = predict_important(read_file(code_path), extractor);
  for (const auto& s : selection.statements) out << s.text << "\n";
  return 0;
}

int cmd_train_abstracter(const TrainFlags& f, const std::string& extractor_path, const std::string& fusion,
                         std::ostream& out, std::ostream& err) {
  auto rc = resolve_config(f);
  if (!fusion.empty()) rc.abstracter.fusion = parse_fusion(fusion);
  const auto extractor = extractor_from_checkpoint(load_checkpoint(extractor_path));
  const auto corpus = load_pairs(f.corpus, err);
  const auto valid = f.valid.empty() ? std::vector<RawPair>{} : load_pairs(f.valid, err);
  auto trained = train_abstracter(corpus, extractor, rc.abstracter, valid, epoch_logger(f.quiet, err));
  save_checkpoint(to_checkpoint(trained), f.out);
  std::size_t exact = 0;
  for (const auto& pair : corpus) {
    try {
      const auto result = generate_summary(pair.code, extractor, trained, rc.abstracter.max_comment_len);
      exact += result.tokens == tokenize_comment(pair.comment) ? 1 : 0;
    } catch (const EmptySnippet&) {
    }
  }
  out << "best epoch " << trained.best_epoch << ", fusion " << fusion_name(rc.abstracter.fusion)
      << ", exact training reproductions " << exact << "/" << corpus.size() << "\n";
  return 0;
}

int cmd_summarize(const std::string& ex_path, const std::string& ab_path, const std::string& code_path,
                  const std::string& corpus_path, std::size_t max_len, std::size_t beam, std::ostream& out,
                  std::ostream& err) {
  if (code_path.empty() == corpus_path.empty()) throw UsageError("summarize needs exactly one of --code or --corpus");
  const auto extractor = extractor_from_checkpoint(load_checkpoint(ex_path));
  const auto abstracter = abstracter_from_checkpoint(load_checkpoint(ab_path));
  if (!code_path.empty()) {
    out << join_tokens(generate_summary(read_file(code_path), extractor, abstracter, max_len, beam).tokens) << "\n";
    return 0;
  }
  for (const auto& pair : load_pairs(corpus_path, err)) {
    try {
      out << join_tokens(generate_summary(pair.code, extractor, abstracter, max_len, beam).tokens) << "\n";
    } catch (const EmptySnippet&) {
      out << "\n";
    }
  }
  return 0;
}

struct EvalFlags {
  std::string refs;
  std::string hyps;
  std::string compare;
  std::string buckets;
  std::string corpus;
  std::string record;
};

int cmd_evaluate(const EvalFlags& f, std::ostream& out) {
  auto sentences = [](const std::string& path) {
    std::vector<TokenSequence> seqs;
    for (const auto& line : read_lines(path)) seqs.push_back(split_whitespace(line));
    return seqs;
  };
  const auto refs = sentences(f.refs);
  const auto hyps = sentences(f.hyps);
  std::optional<BucketSpec> spec;
  if (f.buckets == "comment") {
    spec = BucketSpec::comment_length();
  } else if (f.buckets == "code") {
    if (f.corpus.empty()) throw UsageError("--buckets code needs --corpus for code line counts");
    std::vector<std::size_t> lines;
    for (const auto& pair : load_corpus(f.corpus).pairs) lines.push_back(nonblank_lines(pair.code));
    spec = BucketSpec::code_length(std::move(lines));
  } else if (!f.buckets.empty()) {
    throw UsageError("--buckets must be code or comment");
  }
  const auto report = evaluate_corpus(refs, hyps, spec);
  std::optional<MetricComparison> comparison;
  if (!f.compare.empty()) comparison = compare_reports(report, evaluate_corpus(refs, sentences(f.compare), spec));
  emit_report(report, comparison, out, f.record.empty() ? f.hyps + ".report.json" : f.record);
  return 0;
}

int cmd_gradcheck(double tolerance, std::ostream& out) {
  bool ok = true;
  for (const auto& c : standard_gradcheck_suite()) {
    const bool pass = c.result.max_relative_error <= tolerance;
    ok = ok && pass;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-26s %-4s max_rel_err=%.3e coords=%zu worst=%s[%zu]\n", c.name.c_str(),
                  pass ? "ok" : "FAIL", c.result.max_relative_error, c.result.coordinates,
                  c.result.worst_parameter.c_str(), c.result.worst_index);
    out << buf;
  }
  return ok ? 0 : 1;
}

}  // namespace

int run_pipeline(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Extractive-abstractive code summarization", "codesum"};
  app.require_subcommand(1);

  std::string lang, file, corpus, out_path, ckpt, code, extractor, abstracter, fusion;
  std::size_t max_len = 30, beam = 1;
  double tolerance = 1e-4;
  TrainFlags train_ex, train_ab;
  EvalFlags eval;

  auto* seg = app.add_subcommand("segment", "split a snippet into statements");
  seg->add_option("--lang", lang, "java, python or generic")->required();
  seg->add_option("file", file, "source file (stdin when omitted)");

  auto* label = app.add_subcommand("label", "oracle-label every statement of a corpus");
  label->add_option("--corpus", corpus)->required();
  label->add_option("--lang", lang)->required();
  label->add_option("--out", out_path, "JSON lines output (stdout when omitted)");

  auto* tex = app.add_subcommand("train-extractor", "train the statement classifier");
  add_train_flags(tex, train_ex);
  tex->add_option("--lang", lang, "overrides the config language");

  auto* ext = app.add_subcommand("extract", "print the important statements of a snippet");
  ext->add_option("--ckpt", ckpt)->required();
  ext->add_option("--code", code)->required();

  auto* tab = app.add_subcommand("train-abstracter", "train the summary generator");
  add_train_flags(tab, train_ab);
  tab->add_option("--extractor", extractor, "extractor checkpoint")->required();
  tab->add_option("--fusion", fusion, "abex or exab");

  auto* sum = app.add_subcommand("summarize", "generate a summary");
  sum->add_option("--extractor", extractor)->required();
  sum->add_option("--abstracter", abstracter)->required();
  sum->add_option("--code", code, "one snippet");
  sum->add_option("--corpus", corpus, "JSON lines corpus; one summary per line");
  sum->add_option("--max-len", max_len);
  sum->add_option("--beam", beam);

  auto* evl = app.add_subcommand("evaluate", "score hypotheses against references");
  evl->add_option("--refs", eval.refs)->required();
  evl->add_option("--hyps", eval.hyps)->required();
  evl->add_option("--compare", eval.compare, "baseline hypotheses for significance tests");
  evl->add_option("--buckets", eval.buckets, "code or comment");
  evl->add_option("--corpus", eval.corpus, "corpus aligned with --refs, for code line counts");
  evl->add_option("--record", eval.record, "JSON record path (default <hyps>.report.json)");

  auto* grad = app.add_subcommand("gradcheck", "finite-difference gradient checks");
  grad->add_option("--tol", tolerance);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::string what = e.what();
    std::replace(what.begin(), what.end(), '\n', ' ');
    err << "codesum: usage: " << what << "\n";
    return 2;
  }

  try {
    if (seg->parsed()) return cmd_segment(lang, file, out);
    if (label->parsed()) return cmd_label(corpus, lang, out_path, out, err);
    if (tex->parsed()) return cmd_train_extractor(train_ex, lang, out, err);
    if (ext->parsed()) return cmd_extract(ckpt, code, out);
    if (tab->parsed()) return cmd_train_abstracter(train_ab, extractor, fusion, out, err);
    if (sum->parsed()) return cmd_summarize(extractor, abstracter, code, corpus, max_len, beam, out, err);
    if (evl->parsed()) return cmd_evaluate(eval, out);
    if (grad->parsed()) return cmd_gradcheck(tolerance, out);
  } catch (const UsageError& e) {
    err << "codesum: usage: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::string what = e.what();
    std::replace(what.begin(), what.end(), '\n', ' ');
    err << "codesum: " << e.stage() << ": " << what << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "codesum: internal: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace codesum::cli
