#pragma once

// End-to-end training and prediction over named feature and model specs,
// plus persistence of trained models.

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nordiclid/classifiers.hpp"
#include "nordiclid/corpus.hpp"
#include "nordiclid/embeddings.hpp"
#include "nordiclid/error.hpp"
#include "nordiclid/features.hpp"
#include "nordiclid/neural.hpp"
#include "nordiclid/serialize.hpp"

namespace nordiclid {

enum class FeatureKind { kChar1, kChar2, kChar3, kBow, kCbow, kSkipgram };
enum class ModelKind { kKnn, kLogReg, kNb, kSvm, kMlp, kCnn, kFastText };

inline constexpr std::array<std::string_view, 6> kFeatureNames{"char1", "char2", "char3", "bow", "cbow", "skipgram"};
inline constexpr std::array<std::string_view, 7> kModelNames{"knn", "logreg", "nb", "svm", "mlp", "cnn", "fasttext"};

inline std::string_view name_of(FeatureKind f) { return kFeatureNames[static_cast<std::size_t>(f)]; }
inline std::string_view name_of(ModelKind m) { return kModelNames[static_cast<std::size_t>(m)]; }

inline FeatureKind parse_feature_kind(std::string_view s) {
  for (std::size_t i = 0; i < kFeatureNames.size(); ++i) {
    if (kFeatureNames[i] == s) return static_cast<FeatureKind>(i);
  }
  throw InvalidArgument("unknown feature spec '" + std::string(s) + "'");
}

inline ModelKind parse_model_kind(std::string_view s) {
  for (std::size_t i = 0; i < kModelNames.size(); ++i) {
    if (kModelNames[i] == s) return static_cast<ModelKind>(i);
  }
  throw InvalidArgument("unknown model spec '" + std::string(s) + "'");
}

inline std::optional<std::size_t> char_order(FeatureKind f) {
  switch (f) {
    case FeatureKind::kChar1: return 1;
    case FeatureKind::kChar2: return 2;
    case FeatureKind::kChar3: return 3;
    default: return std::nullopt;
  }
}

inline bool is_embedding(FeatureKind f) { return f == FeatureKind::kCbow || f == FeatureKind::kSkipgram; }

// Throws InvalidArgument (exit 3) for combinations that cannot work.
inline void check_compatible(FeatureKind f, ModelKind m) {
  const std::string pair = std::string(name_of(m)) + " with " + std::string(name_of(f));
  if (m == ModelKind::kCnn && !char_order(f)) {
    throw InvalidArgument(pair + ": cnn needs character n-gram token sequences (char1|char2|char3)");
  }
  if (m == ModelKind::kNb && is_embedding(f)) {
    throw InvalidArgument(pair + ": naive Bayes needs non-negative counts");
  }
  if (m == ModelKind::kFastText && is_embedding(f)) {
    throw InvalidArgument(pair + ": fasttext learns its own embeddings from bow or char features");
  }
}

struct PipelineConfig {
  FeatureKind features = FeatureKind::kChar2;
  ModelKind model = ModelKind::kLogReg;
  std::uint64_t seed = 42;
  std::optional<std::size_t> vocab_cap;
  std::size_t knn_k = 3;
  LogRegConfig logreg;
  double nb_alpha = 1.0;
  SvmConfig svm;
  std::vector<std::size_t> mlp_hidden{128};
  TrainConfig mlp;
  CnnConfig cnn;
  TrainConfig cnn_train;
  EmbeddingConfig embedding;
  FastTextConfig fasttext;
};

// Maps text to the vector a classical model or MLP consumes.
struct Featurizer {
  FeatureKind kind = FeatureKind::kChar2;
  Normalize normalize = Normalize::kNo;
  NgramVocabulary ngrams;
  WordVocabulary words;
  WordVectors embeddings;

  std::size_t dim() const {
    if (char_order(kind)) return ngrams.size();
    if (kind == FeatureKind::kBow) return words.size();
    return embeddings.vectors.cols();
  }

  FeatureVector operator()(std::string_view text) const {
    if (char_order(kind)) return vectorize(text, ngrams, normalize);
    if (kind == FeatureKind::kBow) return vectorize_words(text, words, normalize);
    return FeatureVector::from_dense(sentence_embedding(text, embeddings));
  }
};

inline Featurizer build_featurizer(const Dataset& train, const PipelineConfig& cfg, Normalize normalize) {
  Featurizer f;
  f.kind = cfg.features;
  f.normalize = normalize;
  if (auto n = char_order(cfg.features)) {
    f.ngrams = NgramVocabulary::build(train, *n, cfg.vocab_cap);
  } else if (cfg.features == FeatureKind::kBow) {
    f.words = WordVocabulary::build(train, cfg.vocab_cap);
    if (f.words.size() == 0) throw EmptyVocabulary();
  } else {
    EmbeddingConfig ec = cfg.embedding;
    ec.seed = cfg.seed;
    ec.mode = cfg.features == FeatureKind::kCbow ? EmbeddingMode::kCbow : EmbeddingMode::kSkipgram;
    f.embeddings = word_vectors(train_embedding(train.sentences(), ec));
  }
  return f;
}

using ModelParams = std::variant<KnnModel, LogRegModel, NbModel, SvmModel, MlpModel, CnnModel, FastTextModel>;

struct TrainedModel {
  FeatureKind features = FeatureKind::kChar2;
  ModelKind model = ModelKind::kLogReg;
  Featurizer featurizer;  // unused by cnn and fasttext, which own their tokenisation
  ModelParams params;

  std::string id() const { return std::string(name_of(model)) + "-" + std::string(name_of(features)); }
};

inline std::vector<Example> featurize_all(const Featurizer& f, const Dataset& d) {
  std::vector<Example> out;
  out.reserve(d.size());
  for (const auto& s : d) out.push_back({f(s.text), s.label});
  return out;
}

// `test` is only used for per-epoch accuracy in `history` (mlp and cnn).
inline TrainedModel train_pipeline(const Dataset& train, const PipelineConfig& cfg, const Dataset& test = {},
                                   TrainHistory* history = nullptr) {
  check_compatible(cfg.features, cfg.model);
  if (train.empty()) throw InputError("training set is empty");
  TrainedModel tm;
  tm.features = cfg.features;
  tm.model = cfg.model;
  switch (cfg.model) {
    case ModelKind::kCnn: {
      CnnConfig c = cfg.cnn;
      c.gram_order = *char_order(cfg.features);
      TrainConfig t = cfg.cnn_train;
      t.seed = cfg.seed;
      tm.params = cnn_train(train, test, c, t, history);
      return tm;
    }
    case ModelKind::kFastText: {
      FastTextConfig c = cfg.fasttext;
      c.seed = cfg.seed;
      c.features = cfg.features == FeatureKind::kBow ? FastTextFeatures::kWords : FastTextFeatures::kCharNgrams;
      tm.params = train_fasttext_supervised(train, c);
      return tm;
    }
    default:
      break;
  }
  const Normalize norm = cfg.model == ModelKind::kNb ? Normalize::kNo : Normalize::kYes;
  tm.featurizer = build_featurizer(train, cfg, norm);
  const auto data = featurize_all(tm.featurizer, train);
  switch (cfg.model) {
    case ModelKind::kKnn: tm.params = train_knn(data, cfg.knn_k); break;
    case ModelKind::kLogReg: tm.params = train_logreg(data, cfg.logreg); break;
    case ModelKind::kNb: tm.params = train_nb(data, cfg.nb_alpha); break;
    case ModelKind::kSvm: {
      SvmConfig c = cfg.svm;
      c.seed = cfg.seed;
      tm.params = train_svm(data, c);
      break;
    }
    case ModelKind::kMlp: {
      TrainConfig t = cfg.mlp;
      t.seed = cfg.seed;
      const auto test_data = featurize_all(tm.featurizer, test);
      tm.params = mlp_train(data, test_data, cfg.mlp_hidden, t, history);
      break;
    }
    default:
      break;
  }
  return tm;
}

// Label plus per-label scores. Scores are posteriors for probabilistic
// models, decision values for svm and neighbour votes for knn.
inline Prediction predict(const TrainedModel& tm, std::string_view text) {
  return std::visit(
      [&](const auto& m) -> Prediction {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, CnnModel>) {
          return cnn_predict(m, text);
        } else if constexpr (std::is_same_v<M, FastTextModel>) {
          return predict_fasttext(m, text);
        } else {
          const auto x = tm.featurizer(text);
          if constexpr (std::is_same_v<M, KnnModel>) {
            return {knn_predict(m, x), {}};
          } else if constexpr (std::is_same_v<M, LogRegModel>) {
            return logreg_predict(m, x);
          } else if constexpr (std::is_same_v<M, NbModel>) {
            return nb_predict(m, x);
          } else if constexpr (std::is_same_v<M, SvmModel>) {
            auto s = svm_scores(m, x);
            return {argmax_label(s), std::move(s)};
          } else {
            return mlp_predict(m, x);
          }
        }
      },
      tm.params);
}

inline Label predict_label(const TrainedModel& tm, std::string_view text) { return predict(tm, text).label; }

// --- persistence -----------------------------------------------------------

namespace detail {

inline void write_examples(ModelWriter& w, const std::vector<Example>& points) {
  std::vector<std::uint64_t> labels, offsets{0}, indices;
  std::vector<double> values;
  for (const auto& p : points) {
    labels.push_back(index_of(p.y));
    for (const auto& [i, v] : p.x.entries) {
      indices.push_back(i);
      values.push_back(v);
    }
    offsets.push_back(indices.size());
  }
  w.u64s("point_labels", labels);
  w.u64s("point_offsets", offsets);
  w.u64s("point_indices", indices);
  w.f64s("point_values", values);
}

inline std::vector<Example> read_examples(ModelReader& r, std::size_t dim) {
  const auto labels = r.u64s("point_labels");
  const auto offsets = r.u64s("point_offsets");
  const auto indices = r.u64s("point_indices");
  const auto values = r.f64s("point_values");
  if (offsets.size() != labels.size() + 1 || indices.size() != values.size() || offsets.back() != indices.size()) {
    throw ParseError("model file: inconsistent knn points");
  }
  std::vector<Example> out;
  out.reserve(labels.size());
  for (std::size_t p = 0; p < labels.size(); ++p) {
    if (labels[p] >= kNumLabels || offsets[p] > offsets[p + 1]) throw ParseError("model file: bad knn point");
    FeatureVector x{dim, {}};
    for (auto k = offsets[p]; k < offsets[p + 1]; ++k) {
      if (indices[k] >= dim) throw ParseError("model file: knn index out of range");
      x.entries.emplace_back(static_cast<std::uint32_t>(indices[k]), values[k]);
    }
    out.push_back({std::move(x), label_at(labels[p])});
  }
  return out;
}

inline void check_shape(const Matrix& m, std::size_t rows, std::size_t cols) {
  if (m.rows() != rows) throw DimensionMismatch(rows, m.rows());
  if (m.cols() != cols) throw DimensionMismatch(cols, m.cols());
}

inline std::array<double, kNumLabels> to_label_array(const std::vector<double>& v) {
  if (v.size() != kNumLabels) throw DimensionMismatch(kNumLabels, v.size());
  std::array<double, kNumLabels> out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

}  // namespace detail

inline std::string serialize_model(const TrainedModel& tm) {
  ModelWriter w;
  w.str("kind", name_of(tm.model));
  w.str("features", name_of(tm.features));
  const auto& f = tm.featurizer;
  const bool own_tokens = tm.model == ModelKind::kCnn || tm.model == ModelKind::kFastText;
  if (!own_tokens) {
    w.u64("normalize", f.normalize == Normalize::kYes);
    if (auto n = char_order(f.kind)) {
      w.strings("vocabulary", f.ngrams.index().tokens());
    } else if (f.kind == FeatureKind::kBow) {
      w.strings("vocabulary", f.words.index().tokens());
    } else {
      w.strings("vocabulary", f.embeddings.words.index().tokens());
      w.matrix("word_vectors", f.embeddings.vectors);
    }
  }
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, KnnModel>) {
          w.u64("k", m.k);
          w.u64("dim", m.dim);
          detail::write_examples(w, m.points);
        } else if constexpr (std::is_same_v<M, LogRegModel>) {
          w.u64("dim", m.dim);
          w.matrix("weights", m.weights);
        } else if constexpr (std::is_same_v<M, NbModel>) {
          w.u64("dim", m.dim);
          w.f64("alpha", m.alpha);
          w.f64s("log_prior", m.log_prior);
          w.matrix("log_likelihood", m.log_likelihood);
        } else if constexpr (std::is_same_v<M, SvmModel>) {
          w.u64("dim", m.dim);
          w.f64("lambda", m.lambda);
          w.matrix("weights", m.weights);
        } else if constexpr (std::is_same_v<M, MlpModel>) {
          std::vector<std::uint64_t> sizes(m.sizes.begin(), m.sizes.end());
          w.u64s("sizes", sizes);
          for (std::size_t l = 0; l < m.num_layers(); ++l) {
            w.matrix("weights", m.weights[l]);
            w.f64s("biases", m.biases[l]);
          }
        } else if constexpr (std::is_same_v<M, CnnModel>) {
          const auto& c = m.config;
          w.u64s("config", std::vector<std::uint64_t>{c.gram_order, c.embed_dim, c.filters, c.kernel, c.seq_len});
          w.strings("vocabulary", m.vocabulary.tokens());
          w.matrix("embedding", m.embedding);
          w.matrix("conv", m.conv);
          w.f64s("conv_bias", m.conv_bias);
          w.matrix("dense", m.dense);
          w.f64s("dense_bias", m.dense_bias);
        } else {
          const auto& c = m.config;
          w.u64s("config", std::vector<std::uint64_t>{c.features == FastTextFeatures::kWords ? 0u : 1u, c.min_n,
                                                       c.max_n, c.dim, c.epochs, c.seed});
          w.f64("learning_rate", c.learning_rate);
          w.strings("vocabulary", m.features.tokens());
          w.matrix("input", m.input);
          w.matrix("output", m.output);
          w.f64s("bias", m.bias);
        }
      },
      tm.params);
  return w.bytes();
}

inline TrainedModel deserialize_model(std::string data) {
  ModelReader r(std::move(data));
  TrainedModel tm;
  tm.model = parse_model_kind(r.str("kind"));
  tm.features = parse_feature_kind(r.str("features"));
  check_compatible(tm.features, tm.model);
  auto& f = tm.featurizer;
  f.kind = tm.features;
  if (tm.model != ModelKind::kCnn && tm.model != ModelKind::kFastText) {
    f.normalize = r.u64("normalize") ? Normalize::kYes : Normalize::kNo;
    auto vocab = r.strings("vocabulary");
    if (auto n = char_order(f.kind)) {
      f.ngrams = NgramVocabulary(*n, std::move(vocab));
    } else if (f.kind == FeatureKind::kBow) {
      f.words = WordVocabulary(std::move(vocab));
    } else {
      f.embeddings.words = WordVocabulary(std::move(vocab));
      f.embeddings.vectors = r.matrix("word_vectors");
      if (f.embeddings.vectors.rows() != f.embeddings.words.size()) {
        throw DimensionMismatch(f.embeddings.words.size(), f.embeddings.vectors.rows());
      }
    }
  }
  auto read_dim = [&] {
    const std::size_t dim = r.u64("dim");
    if (dim != f.dim()) throw DimensionMismatch(f.dim(), dim);
    return dim;
  };
  switch (tm.model) {
    case ModelKind::kKnn: {
      KnnModel m;
      m.k = r.u64("k");
      m.dim = read_dim();
      m.points = detail::read_examples(r, m.dim);
      if (m.k < 1 || m.k > m.points.size()) throw ParseError("model file: bad knn k");
      tm.params = std::move(m);
      break;
    }
    case ModelKind::kLogReg: {
      LogRegModel m;
      m.dim = read_dim();
      m.weights = r.matrix("weights");
      detail::check_shape(m.weights, kNumLabels, m.dim + 1);
      tm.params = std::move(m);
      break;
    }
    case ModelKind::kNb: {
      NbModel m;
      m.dim = read_dim();
      m.alpha = r.f64("alpha");
      m.log_prior = detail::to_label_array(r.f64s("log_prior"));
      m.log_likelihood = r.matrix("log_likelihood");
      detail::check_shape(m.log_likelihood, kNumLabels, m.dim);
      tm.params = std::move(m);
      break;
    }
    case ModelKind::kSvm: {
      SvmModel m;
      m.dim = read_dim();
      m.lambda = r.f64("lambda");
      m.weights = r.matrix("weights");
      detail::check_shape(m.weights, kNumLabels, m.dim + 1);
      tm.params = std::move(m);
      break;
    }
    case ModelKind::kMlp: {
      const auto sizes = r.u64s("sizes");
      MlpModel m = make_mlp(std::vector<std::size_t>(sizes.begin(), sizes.end()));
      if (m.input_dim() != f.dim()) throw DimensionMismatch(f.dim(), m.input_dim());
      for (std::size_t l = 0; l < m.num_layers(); ++l) {
        auto w = r.matrix("weights");
        detail::check_shape(w, m.sizes[l], m.sizes[l + 1]);
        m.weights[l] = std::move(w);
        m.biases[l] = r.f64s("biases");
        if (m.biases[l].size() != m.sizes[l + 1]) throw DimensionMismatch(m.sizes[l + 1], m.biases[l].size());
      }
      tm.params = std::move(m);
      break;
    }
    case ModelKind::kCnn: {
      const auto c = r.u64s("config");
      if (c.size() != 5) throw ParseError("model file: bad cnn config");
      CnnConfig cfg{c[0], c[1], c[2], c[3], c[4]};
      CnnModel m = make_cnn(cfg, TokenIndex(r.strings("vocabulary")));
      auto load = [&](std::string_view name, Matrix& dst) {
        auto src = r.matrix(name);
        detail::check_shape(src, dst.rows(), dst.cols());
        dst = std::move(src);
      };
      auto load_bias = [&](std::string_view name, std::vector<double>& dst) {
        auto src = r.f64s(name);
        if (src.size() != dst.size()) throw DimensionMismatch(dst.size(), src.size());
        dst = std::move(src);
      };
      load("embedding", m.embedding);
      load("conv", m.conv);
      load_bias("conv_bias", m.conv_bias);
      load("dense", m.dense);
      load_bias("dense_bias", m.dense_bias);
      tm.params = std::move(m);
      break;
    }
    case ModelKind::kFastText: {
      const auto c = r.u64s("config");
      if (c.size() != 6) throw ParseError("model file: bad fasttext config");
      FastTextModel m;
      m.config.features = c[0] == 0 ? FastTextFeatures::kWords : FastTextFeatures::kCharNgrams;
      m.config.min_n = c[1];
      m.config.max_n = c[2];
      m.config.dim = c[3];
      m.config.epochs = c[4];
      m.config.seed = c[5];
      m.config.learning_rate = r.f64("learning_rate");
      validate(m.config);
      m.features = TokenIndex(r.strings("vocabulary"));
      m.input = r.matrix("input");
      m.output = r.matrix("output");
      m.bias = r.f64s("bias");
      detail::check_shape(m.input, m.features.size(), m.config.dim);
      detail::check_shape(m.output, m.config.dim, kNumLabels);
      if (m.bias.size() != kNumLabels) throw DimensionMismatch(kNumLabels, m.bias.size());
      tm.params = std::move(m);
      break;
    }
  }
  if (!r.at_end()) throw ParseError("model file: trailing data");
  return tm;
}

inline void save_model(const std::filesystem::path& path, const TrainedModel& tm) {
  write_text_file(path, serialize_model(tm));
}

inline TrainedModel load_model(const std::filesystem::path& path) { return deserialize_model(read_file(path)); }

}  // namespace nordiclid
