#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nordiclid/corpus.hpp"
#include "nordiclid/eval.hpp"
#include "nordiclid/features.hpp"
#include "nordiclid/pipeline.hpp"
#include "nordiclid/reduce.hpp"
#include "nordiclid/synthetic.hpp"

namespace fs = std::filesystem;
using namespace nordiclid;

namespace {

void print_counts(const PerLabel<std::size_t>& counts) {
  for (auto l : kAllLabels) std::cout << code_of(l) << '\t' << counts[index_of(l)] << '\n';
}

PerLabel<std::size_t> pool_counts(const SentencePool& pool) {
  PerLabel<std::size_t> c{};
  for (auto l : kAllLabels) c[index_of(l)] = pool[index_of(l)].size();
  return c;
}

// Pool -> dataset, optionally stratified to n per label.
Dataset finish_pool(const SentencePool& pool, std::optional<std::size_t> per_class, std::uint64_t seed) {
  if (per_class) return stratified_sample(pool, *per_class, seed);
  return pool_to_dataset(pool, seed);
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

struct Options {
  std::uint64_t seed = 42;

  // corpus
  std::string raw_dir, in, out, abbreviations, train_out, test_out, out_dir, genre = "encyclopedic";
  std::optional<std::size_t> per_class;
  double ratio = 0.8;
  std::size_t synth_per_class = 1000;

  // train / eval / predict
  std::string train, test, cross, model_path, input, features = "char2", model = "logreg", name;
  bool iso = false;
  PipelineConfig pipeline;
  std::optional<double> lr;
  std::optional<std::size_t> epochs;

  // reduce
  std::string method = "pca", data;
  double perplexity = 30.0;
  std::size_t iterations = 1000;
  std::optional<std::size_t> limit;

  // sweep
  std::vector<std::size_t> grams{1, 2}, kernels{1, 2, 3};
};

// Shared hyperparameter flags; --lr and --epochs apply to whichever model is
// selected.
void add_model_flags(CLI::App* cmd, Options& o) {
  auto& p = o.pipeline;
  cmd->add_option("--features", o.features, "char1|char2|char3|bow|cbow|skipgram")->capture_default_str();
  cmd->add_option("--model", o.model, "knn|logreg|nb|svm|mlp|cnn|fasttext")->capture_default_str();
  cmd->add_option("--seed", o.seed)->capture_default_str();
  cmd->add_option("--vocab-cap", p.vocab_cap, "keep the most frequent N features");
  cmd->add_option("--k", p.knn_k, "knn neighbours")->capture_default_str();
  cmd->add_option("--alpha", p.nb_alpha, "naive Bayes smoothing")->capture_default_str();
  cmd->add_option("--lambda", p.svm.lambda, "svm regularisation")->capture_default_str();
  cmd->add_option("--lr", o.lr, "learning rate");
  cmd->add_option("--epochs", o.epochs, "training epochs");
  cmd->add_option("--batch", p.mlp.batch_size, "mini-batch size (mlp, cnn)")->capture_default_str();
  cmd->add_option("--hidden", p.mlp_hidden, "mlp hidden layer widths")->capture_default_str();
  cmd->add_option("--kernel", p.cnn.kernel, "cnn kernel width")->capture_default_str();
  cmd->add_option("--filters", p.cnn.filters, "cnn filter count")->capture_default_str();
  cmd->add_option("--embed-dim", p.cnn.embed_dim, "cnn token embedding size")->capture_default_str();
  cmd->add_option("--seq-len", p.cnn.seq_len, "cnn sequence length")->capture_default_str();
  cmd->add_option("--dim", p.embedding.dim, "cbow/skipgram/fasttext embedding size")->capture_default_str();
  cmd->add_option("--window", p.embedding.window, "cbow/skipgram context radius")->capture_default_str();
  cmd->add_option("--ngram-max", p.fasttext.max_n, "fasttext char n-gram upper bound")->capture_default_str();
}

PipelineConfig resolve_pipeline(Options& o) {
  PipelineConfig p = o.pipeline;
  p.features = parse_feature_kind(o.features);
  p.model = parse_model_kind(o.model);
  p.seed = o.seed;
  p.cnn_train.batch_size = p.mlp.batch_size;
  p.fasttext.dim = p.embedding.dim;
  if (o.lr) {
    p.logreg.learning_rate = p.mlp.learning_rate = p.cnn_train.learning_rate = *o.lr;
    p.fasttext.learning_rate = *o.lr;
  }
  if (o.epochs) {
    p.logreg.epochs = p.svm.epochs = p.mlp.epochs = p.cnn_train.epochs = *o.epochs;
    p.fasttext.epochs = *o.epochs;
  }
  return p;
}

Genre parse_genre(const std::string& s) {
  if (s == "encyclopedic") return Genre::kEncyclopedic;
  if (s == "conversational") return Genre::kConversational;
  throw InvalidArgument("unknown genre '" + s + "'");
}

int cmd_corpus_clean(const Options& o) {
  const auto abbr = o.abbreviations.empty() ? AbbreviationList::defaults() : AbbreviationList::load(o.abbreviations);
  const auto pool = ingest_raw_dir(o.raw_dir, abbr);
  const auto d = finish_pool(pool, o.per_class, o.seed);
  ensure_parent(o.out);
  write_dataset(o.out, d);
  print_counts(d.per_class_count());
  return 0;
}

int cmd_corpus_split(const Options& o) {
  const auto d = read_dataset(o.in, o.seed);
  const auto [train, test] = train_test_split(d, o.ratio, o.seed);
  ensure_parent(o.train_out);
  ensure_parent(o.test_out);
  write_dataset(o.train_out, train);
  write_dataset(o.test_out, test);
  std::cout << "train\t" << train.size() << "\ntest\t" << test.size() << '\n';
  return 0;
}

int cmd_corpus_tatoeba(const Options& o) {
  const auto imported = ingest_tatoeba(o.in);
  const auto d = finish_pool(imported.pool, o.per_class, o.seed);
  ensure_parent(o.out);
  write_dataset(o.out, d);
  print_counts(d.per_class_count());
  std::cout << "skipped_unknown_label\t" << imported.skipped_unknown_label << "\ndropped_too_short\t"
            << imported.dropped_too_short << '\n';
  return 0;
}

int cmd_corpus_synth(const Options& o) {
  const SyntheticCorpus corpus;
  const Genre genre = parse_genre(o.genre);
  fs::create_directories(o.out_dir);
  for (auto l : kAllLabels) {
    write_text_file(fs::path(o.out_dir) / (std::string(code_of(l)) + ".txt"),
                    corpus.raw_text(l, o.synth_per_class, genre, o.seed));
  }
  std::cout << "wrote " << o.synth_per_class << " sentences per label to " << o.out_dir << '\n';
  return 0;
}

int cmd_train(Options& o) {
  const auto cfg = resolve_pipeline(o);
  check_compatible(cfg.features, cfg.model);
  const auto train = read_dataset(o.train);
  const auto model = train_pipeline(train, cfg);
  ensure_parent(o.out);
  save_model(o.out, model);
  std::cout << "trained " << model.id() << " on " << train.size() << " sentences\n";
  return 0;
}

int cmd_predict(const Options& o) {
  const auto model = load_model(o.model_path);
  std::vector<std::string> lines;
  if (o.input.empty() || o.input == "-") {
    lines = read_lines(std::cin);
  } else {
    std::ifstream in(o.input, std::ios::binary);
    if (!in) throw FileError(o.input);
    lines = read_lines(in);
  }
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (auto bad = utf8::find_invalid(lines[i])) throw InvalidUtf8("input line " + std::to_string(i + 1), *bad);
    Label l;
    try {
      l = predict_label(model, clean_sentence(lines[i]));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(i + 1) + ": " + e.what());
    }
    out += o.iso ? iso_code_of(l) : code_of(l);
    out += '\n';
  }
  std::cout << out;
  return 0;
}

void write_eval(const fs::path& dir, const std::string& stem, const EvalReport& r, const LengthStats& lengths) {
  write_text_file(dir / (stem + "_confusion.csv"), format_confusion_csv(r.confusion));
  write_text_file(dir / (stem + "_report.json"), format_report_json(r, lengths));
}

int cmd_eval(const Options& o) {
  const auto model = load_model(o.model_path);
  const auto test = read_dataset(o.test);
  auto predict_fn = [&](const Sentence& s) { return predict_label(model, s.text); };
  const std::string test_id = o.name.empty() ? fs::path(o.test).stem().string() : o.name;
  const auto report = evaluate(predict_fn, test, test_id, model.id());
  fs::create_directories(o.out_dir);
  write_eval(o.out_dir, "eval", report, length_stats(test, report.predictions));
  std::cout << "accuracy\t" << format_double(report.accuracy) << '\n';
  if (!o.cross.empty()) {
    const auto out_domain = read_dataset(o.cross);
    auto cross = evaluate(predict_fn, out_domain, fs::path(o.cross).stem().string(), model.id());
    write_eval(o.out_dir, "cross", cross, length_stats(out_domain, cross.predictions));
    std::cout << "cross_accuracy\t" << format_double(cross.accuracy) << "\ndelta\t"
              << format_double(report.accuracy - cross.accuracy) << '\n';
  }
  return 0;
}

int cmd_reduce(const Options& o) {
  auto d = read_dataset(o.data);
  if (o.limit && *o.limit < d.size()) {
    d = Dataset(std::vector<Sentence>(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(*o.limit)));
  }
  PipelineConfig cfg = o.pipeline;
  cfg.features = parse_feature_kind(o.features);
  cfg.seed = o.seed;
  const auto featurizer = build_featurizer(d, cfg, Normalize::kYes);
  DenseData x;
  std::vector<Label> labels;
  x.reserve(d.size());
  for (const auto& s : d) {
    x.push_back(featurizer(s.text).dense());
    labels.push_back(s.label);
  }
  Matrix coords;
  if (o.method == "pca") {
    coords = pca_project(x, 2);
  } else if (o.method == "tsne") {
    TsneConfig tc;
    tc.iterations = o.iterations;
    tc.seed = o.seed;
    const auto result = tsne_optimize(tsne_affinities(x, o.perplexity).p, tc);
    if (result.clamped > 0) std::cerr << "warning: gradient clamped in " << result.clamped << " iterations\n";
    coords = result.y;
  } else {
    throw InvalidArgument("unknown reduction method '" + o.method + "'");
  }
  ensure_parent(o.out);
  write_text_file(o.out, format_projection(make_projection(labels, coords)));
  std::cout << "projected " << d.size() << " points with " << o.method << '\n';
  return 0;
}

int cmd_sweep(Options& o) {
  auto cfg = resolve_pipeline(o);
  const auto train = read_dataset(o.train);
  const auto test = read_dataset(o.test);
  TrainConfig t = cfg.cnn_train;
  t.seed = o.seed;
  const auto result = kernel_size_sweep(train, test, o.grams, o.kernels, cfg.cnn, t);
  ensure_parent(o.out);
  write_text_file(o.out, format_sweep_csv(result));
  std::cout << format_sweep_csv(result);
  return 0;
}

int cmd_profile(const Options& o) {
  const auto d = read_dataset(o.data);
  const auto profile = char_frequency_profile(d.by_label());
  std::string out = "char";
  for (auto l : kAllLabels) out += "," + std::string(code_of(l));
  out += "\n";
  for (std::size_t c = 0; c < kAlphabetSize; ++c) {
    const char32_t cp = kCharset.at(c);
    out += cp == U' ' ? std::string("space") : utf8::encode(std::u32string(1, cp));
    for (auto l : kAllLabels) out += "," + format_double(profile.normalized[index_of(l)][c]);
    out += "\n";
  }
  if (o.out.empty()) {
    std::cout << out;
  } else {
    ensure_parent(o.out);
    write_text_file(o.out, out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Language identification for Danish, Swedish, Nynorsk, Bokmål, Faroese and Icelandic"};
  app.require_subcommand(1);
  Options o;

  auto* corpus = app.add_subcommand("corpus", "prepare datasets");
  corpus->require_subcommand(1);
  auto* clean = corpus->add_subcommand("clean", "extract and clean sentences from <code>.txt files");
  clean->add_option("--raw-dir", o.raw_dir)->required();
  clean->add_option("--out", o.out)->required();
  clean->add_option("--abbreviations", o.abbreviations, "extra abbreviations, one per line");
  clean->add_option("--per-class", o.per_class, "stratified sample size per label");
  clean->add_option("--seed", o.seed)->capture_default_str();

  auto* split = corpus->add_subcommand("split", "per-label train/test split");
  split->add_option("--in", o.in)->required();
  split->add_option("--ratio", o.ratio)->capture_default_str();
  split->add_option("--train-out", o.train_out)->required();
  split->add_option("--test-out", o.test_out)->required();
  split->add_option("--seed", o.seed)->capture_default_str();

  auto* tatoeba = corpus->add_subcommand("tatoeba", "import a <code>\\t<sentence> file");
  tatoeba->add_option("--in", o.in)->required();
  tatoeba->add_option("--out", o.out)->required();
  tatoeba->add_option("--per-class", o.per_class, "stratified sample size per label");
  tatoeba->add_option("--seed", o.seed)->capture_default_str();

  auto* synth = corpus->add_subcommand("synth", "write a seeded synthetic raw corpus");
  synth->add_option("--out-dir", o.out_dir)->required();
  synth->add_option("--per-class", o.synth_per_class)->capture_default_str();
  synth->add_option("--genre", o.genre, "encyclopedic|conversational")->capture_default_str();
  synth->add_option("--seed", o.seed)->capture_default_str();

  auto* train = app.add_subcommand("train", "train a model and write it to a file");
  train->add_option("--train", o.train)->required();
  train->add_option("--out", o.out)->required();
  add_model_flags(train, o);

  auto* predict = app.add_subcommand("predict", "label one sentence per input line");
  predict->add_option("--model", o.model_path)->required();
  predict->add_option("--input", o.input, "input file (default: standard input)");
  predict->add_flag("--iso", o.iso, "print ISO 639-1 codes");

  auto* eval = app.add_subcommand("eval", "evaluate a model on a test set");
  eval->add_option("--model", o.model_path)->required();
  eval->add_option("--test", o.test)->required();
  eval->add_option("--cross", o.cross, "out-of-domain test set");
  eval->add_option("--out-dir", o.out_dir)->required();
  eval->add_option("--name", o.name, "dataset identifier for the report");

  auto* reduce = app.add_subcommand("reduce", "project a dataset to 2-D");
  reduce->add_option("--method", o.method, "pca|tsne")->capture_default_str();
  reduce->add_option("--data", o.data)->required();
  reduce->add_option("--out", o.out)->required();
  reduce->add_option("--features", o.features)->capture_default_str();
  reduce->add_option("--perplexity", o.perplexity)->capture_default_str();
  reduce->add_option("--iterations", o.iterations)->capture_default_str();
  reduce->add_option("--limit", o.limit, "use only the first N sentences");
  reduce->add_option("--seed", o.seed)->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "cnn accuracy over kernel sizes and gram orders");
  sweep->add_option("--train", o.train)->required();
  sweep->add_option("--test", o.test)->required();
  sweep->add_option("--out", o.out)->required();
  sweep->add_option("--grams", o.grams)->delimiter(',')->capture_default_str();
  sweep->add_option("--kernels", o.kernels)->delimiter(',')->capture_default_str();
  add_model_flags(sweep, o);

  auto* profile = app.add_subcommand("profile", "per-label character frequency profile");
  profile->add_option("--data", o.data)->required();
  profile->add_option("--out", o.out, "output CSV (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ExitCode::kConfig);
  }

  try {
    if (clean->parsed()) return cmd_corpus_clean(o);
    if (split->parsed()) return cmd_corpus_split(o);
    if (tatoeba->parsed()) return cmd_corpus_tatoeba(o);
    if (synth->parsed()) return cmd_corpus_synth(o);
    if (train->parsed()) return cmd_train(o);
    if (predict->parsed()) return cmd_predict(o);
    if (eval->parsed()) return cmd_eval(o);
    if (reduce->parsed()) return cmd_reduce(o);
    if (sweep->parsed()) return cmd_sweep(o);
    if (profile->parsed()) return cmd_profile(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
