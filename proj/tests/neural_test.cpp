#include "nordiclid/neural.hpp"

#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"

namespace nordiclid {
namespace {

using testing::adjacency_corpus;
using testing::cnn_near_kink;
using testing::flatten;
using testing::random_tiny_cnn;
using testing::unflatten;

TEST(Activations, Relu) {
  EXPECT_EQ(relu(std::vector<double>{-1, 0, 2}), (std::vector<double>{0, 0, 2}));
  EXPECT_EQ(relu(std::vector<double>{-3, -0.5}), (std::vector<double>{0, 0}));
  const std::vector<double> z = {-2, 4, 0.5, -0.1};
  EXPECT_EQ(relu(relu(z)), relu(z));
}

TEST(Activations, Softmax) {
  for (double v : softmax(std::vector<double>{3, 3, 3, 3})) EXPECT_DOUBLE_EQ(v, 0.25);
  const auto p = softmax(std::vector<double>{0.0, std::log(2.0)});
  EXPECT_NEAR(p[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(p[1], 2.0 / 3.0, 1e-15);
  std::mt19937 gen(1);
  std::normal_distribution<double> g(0.0, 5.0);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> z(6), shifted(6);
    const double c = g(gen) * 100.0;
    for (std::size_t k = 0; k < 6; ++k) {
      z[k] = g(gen);
      shifted[k] = z[k] + c;
    }
    const auto a = softmax(z), b = softmax(shifted);
    double sum = 0.0;
    for (std::size_t k = 0; k < 6; ++k) {
      EXPECT_NEAR(a[k], b[k], 1e-12);
      sum += a[k];
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
  const auto big = softmax(std::vector<double>{1000.0, 0.0});
  EXPECT_DOUBLE_EQ(big[0], 1.0);
}

TEST(Losses, CategoricalCrossEntropy) {
  EXPECT_EQ(cce_loss(std::vector<double>{0, 1, 0, 0, 0, 0}, Label::kSv), 0.0);
  EXPECT_NEAR(cce_loss(std::vector<double>(6, 1.0 / 6.0), Label::kIs), std::log(6.0), 1e-15);
  EXPECT_NEAR(std::log(6.0), 1.7918, 1e-4);
  // E = -(1/2)(ln 0.7 + ln 0.2)
  const std::vector<std::vector<double>> preds = {{0.7, 0.3, 0, 0, 0, 0}, {0.1, 0.2, 0.7, 0, 0, 0}};
  const std::vector<Label> ys = {Label::kDk, Label::kSv};
  EXPECT_NEAR(cce_loss(preds, ys), -(std::log(0.7) + std::log(0.2)) / 2.0, 1e-15);
  EXPECT_GT(cce_loss(std::vector<double>{1, 0, 0, 0, 0, 0}, Label::kSv), 0.0);
  EXPECT_TRUE(std::isfinite(cce_loss(std::vector<double>{1, 0, 0, 0, 0, 0}, Label::kSv)));
}

TEST(Losses, MeanSquaredError) {
  EXPECT_EQ(mse_loss(std::vector<double>{1, 2}, std::vector<double>{1, 2}), 0.0);
  EXPECT_EQ(mse_loss(std::vector<double>{1, 0}, std::vector<double>{0, 0}), 0.5);
  EXPECT_NEAR(mse_loss(std::vector<double>{0.5, -1, 2}, std::vector<double>{1, 1, 1}),
              (0.25 + 4.0 + 1.0) / 3.0, 1e-15);
  EXPECT_NEAR(mse_loss(std::vector<double>{3, 3}, std::vector<double>{0, 1}), (9.0 + 4.0) / 2.0, 1e-15);
  EXPECT_NEAR(mse_loss(std::vector<double>{-0.2}, std::vector<double>{0.3}), 0.25, 1e-15);
  EXPECT_THROW(mse_loss(std::vector<double>{1}, std::vector<double>{1, 2}), LengthMismatch);
}

TEST(Mlp, ZeroWeightsGiveUniformPosterior) {
  const auto m = make_mlp({4, 5, 6});
  for (double v : mlp_forward(m, FeatureVector::from_dense(std::vector<double>{1, -2, 3, 0.5}))) {
    EXPECT_DOUBLE_EQ(v, 1.0 / 6.0);
  }
  EXPECT_THROW(make_mlp({4, 6}), InvalidArgument);
  EXPECT_THROW(mlp_forward(m, FeatureVector::from_dense(std::vector<double>{1})), DimensionMismatch);
}

TEST(Mlp, GradientMatchesFiniteDifferences) {
  std::mt19937 gen(31);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> label(0, 5);
  for (int instance = 0; instance < 20; ++instance) {
    auto m = init_mlp({4, 5, 3 + static_cast<std::size_t>(instance % 3), 6}, instance);
    for (auto& b : m.biases) {
      for (auto& v : b) v = 0.1 * g(gen);
    }
    std::vector<Example> data;
    for (int i = 0; i < 4; ++i) {
      data.push_back({FeatureVector::from_dense(std::vector<double>{g(gen), g(gen), 0.0, g(gen)}),
                      label_at(label(gen))});
    }
    MlpModel grad;
    mlp_objective(m, data, &grad);
    const auto numeric = oracle::numeric_gradient(
        [&](const std::vector<double>& p) {
          auto copy = m;
          unflatten(copy, p);
          return mlp_objective(copy, data);
        },
        flatten(m));
    EXPECT_LT(oracle::relative_error(flatten(grad), numeric), 1e-4) << "instance " << instance;
  }
}

std::vector<Example> separable_examples() {
  std::vector<Example> out;
  std::mt19937 gen(8);
  std::normal_distribution<double> noise(0.0, 0.3);
  for (int i = 0; i < 60; ++i) {
    const auto y = label_at(static_cast<std::size_t>(i % 3));
    std::vector<double> x(3, 0.0);
    x[index_of(y)] = 2.0;
    for (auto& v : x) v += noise(gen);
    out.push_back({FeatureVector::from_dense(x), y});
  }
  return out;
}

TEST(Mlp, TrainingLossDecreases) {
  const auto data = separable_examples();
  TrainHistory history;
  const auto m = mlp_train(data, data, {8}, {0.1, 10, 8, 3}, &history);
  ASSERT_EQ(history.train_loss.size(), 10u);
  for (std::size_t e = 1; e < history.train_loss.size(); ++e) {
    EXPECT_LT(history.train_loss[e], history.train_loss[e - 1]);
  }
  EXPECT_GT(history.test_accuracy.back(), 0.9);
  const auto again = mlp_train(data, data, {8}, {0.1, 10, 8, 3});
  EXPECT_EQ(flatten(m), flatten(again));
}

TEST(Cnn, ConvOutputShape) {
  for (std::size_t h = 1; h <= 6; ++h) {
    auto c = testing::tiny_cnn_config();
    c.kernel = h;
    const auto m = init_cnn(c, TokenIndex({"a", "b", "c"}), 1);
    const auto t = cnn_trace(m, std::vector<std::uint32_t>{2, 3, 4});
    EXPECT_EQ(t.conv.rows(), 6 - h + 1);
    EXPECT_EQ(t.conv.cols(), 2u);
  }
  auto bad = testing::tiny_cnn_config();
  bad.kernel = 7;
  EXPECT_THROW(make_cnn(bad, TokenIndex{}), InvalidArgument);
}

TEST(Cnn, KernelOneIsPositionLocal) {
  auto c = testing::tiny_cnn_config();
  c.kernel = 1;
  c.filters = 1;
  auto m = init_cnn(c, TokenIndex({"a", "b", "c"}), 2);
  const std::vector<std::uint32_t> base = {2, 3, 4, 2, 3};
  const auto t0 = cnn_trace(m, base);
  auto perturbed = base;
  perturbed[2] = 3;
  const auto t1 = cnn_trace(m, perturbed);
  for (std::size_t p = 0; p < t0.conv.rows(); ++p) {
    if (p == 2) {
      EXPECT_NE(t0.conv(p, 0), t1.conv(p, 0));
    } else {
      EXPECT_EQ(t0.conv(p, 0), t1.conv(p, 0));
    }
  }
}

TEST(Cnn, GradientMatchesFiniteDifferences) {
  std::mt19937 gen(5);
  std::uniform_int_distribution<std::uint32_t> tok(1, 4);
  std::uniform_int_distribution<std::size_t> len(1, 8), label(0, 5);
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 20; ++seed) {
    auto m = random_tiny_cnn(seed);
    std::vector<SequenceExample> data;
    for (int i = 0; i < 3; ++i) {
      SequenceExample e;
      for (std::size_t j = 0, n = len(gen); j < n; ++j) e.tokens.push_back(tok(gen));
      e.y = label_at(label(gen));
      data.push_back(e);
    }
    CnnModel grad;
    cnn_objective(m, data, &grad);
    const auto numeric = oracle::numeric_gradient(
        [&](const std::vector<double>& p) {
          auto copy = m;
          unflatten(copy, p);
          return cnn_objective(copy, data);
        },
        flatten(m), 1e-6);
    const double err = oracle::relative_error(flatten(grad), numeric);
    // A finite-difference step that crosses a ReLU kink or a max-pool switch
    // does not measure the derivative; such instances are skipped.
    if (cnn_near_kink(m, data)) continue;
    EXPECT_LT(err, 1e-4) << "seed " << seed;
    ++checked;
  }
}

TEST(Cnn, MaxPoolRoutesOnlyThroughArgmax) {
  auto m = random_tiny_cnn(3);
  const std::vector<std::uint32_t> tokens = {2, 3, 4, 3, 2};
  const auto t = cnn_trace(m, tokens);
  // Nudging a conv bias shifts every position equally; perturbing a single
  // embedding only touches windows that contain it. Pooled values move only
  // when the argmax window changes value.
  for (std::size_t f = 0; f < t.pooled.size(); ++f) {
    const std::size_t arg = t.argmax[f];
    for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
      const bool in_arg_window = pos >= arg && pos < arg + m.config.kernel;
      if (in_arg_window) continue;
      // Token at `pos` only influences windows not at the argmax; a small
      // change keeps those below the pooled maximum.
      double gap = std::numeric_limits<double>::infinity();
      for (std::size_t p = 0; p < t.conv.rows(); ++p) {
        if (p != arg) gap = std::min(gap, t.pooled[f] - std::max(0.0, t.conv(p, f)));
      }
      if (!(gap > 1e-6)) continue;
      auto copy = m;
      for (auto& v : copy.embedding.row(tokens[pos])) v += 1e-9;
      // Only valid when that token does not also occur inside the argmax window.
      bool shared = false;
      for (std::size_t j = 0; j < m.config.kernel && arg + j < tokens.size(); ++j) {
        shared |= tokens[arg + j] == tokens[pos];
      }
      if (shared) continue;
      EXPECT_EQ(cnn_trace(copy, tokens).pooled[f], t.pooled[f]);
    }
  }
}

TEST(Cnn, EncodingAndErrors) {
  auto c = testing::tiny_cnn_config();
  c.gram_order = 2;
  const auto m = init_cnn(c, TokenIndex({"ab", "ba"}), 1);
  EXPECT_EQ(cnn_encode(m, "abax"), (std::vector<std::uint32_t>{2, 3, kUnknownToken}));
  EXPECT_EQ(cnn_encode(m, "a"), (std::vector<std::uint32_t>{kUnknownToken}));
  EXPECT_TRUE(cnn_encode(m, "").empty());
  EXPECT_EQ(cnn_encode(m, "abababababab").size(), c.seq_len);
  EXPECT_THROW(cnn_forward(m, std::vector<std::uint32_t>{}), SequenceTooShort);
  EXPECT_THROW(cnn_forward(m, std::vector<std::uint32_t>{9}), DimensionMismatch);
  double sum = 0.0;
  for (double p : cnn_forward(m, std::vector<std::uint32_t>{2, 3})) sum += p;
  EXPECT_NEAR(sum, 1.0, 1e-9);
}

TEST(Cnn, AdjacencySignalNeedsBigramInput) {
  const auto train = adjacency_corpus(60, 1);
  const auto test = adjacency_corpus(40, 2);
  CnnConfig c;
  c.embed_dim = 4;
  c.filters = 8;
  c.seq_len = 20;
  const TrainConfig cfg{0.2, 40, 8, 42};

  c.gram_order = 2;
  for (std::size_t h : {1, 2}) {
    c.kernel = h;
    const auto bigram = cnn_train(train, test, c, cfg);
    EXPECT_EQ(cnn_accuracy(bigram, test), 1.0) << "kernel " << h;
  }
  c.gram_order = 1;
  c.kernel = 1;
  const auto unigram = cnn_train(train, test, c, cfg);
  EXPECT_NEAR(cnn_accuracy(unigram, test), 0.5, 0.1);
}

TEST(Cnn, TrainingIsDeterministic) {
  const auto train = adjacency_corpus(20, 3);
  CnnConfig c;
  c.embed_dim = 4;
  c.filters = 4;
  c.seq_len = 20;
  const TrainConfig cfg{0.1, 3, 4, 9};
  auto a = cnn_train(train, Dataset{}, c, cfg);
  auto b = cnn_train(train, Dataset{}, c, cfg);
  EXPECT_EQ(flatten(a), flatten(b));
}

TEST(Sweep, CardinalityAndRange) {
  const auto train = adjacency_corpus(20, 4);
  const auto test = adjacency_corpus(10, 5);
  CnnConfig c;
  c.embed_dim = 4;
  c.filters = 4;
  c.seq_len = 20;
  const auto r = kernel_size_sweep(train, test, {1}, {1, 2}, c, {0.1, 2, 8, 1});
  ASSERT_EQ(r.entries.size(), 2u);
  EXPECT_EQ(r.entries[0].kernel, 1u);
  EXPECT_EQ(r.entries[1].kernel, 2u);
  for (const auto& e : r.entries) {
    EXPECT_GE(e.accuracy, 0.0);
    EXPECT_LE(e.accuracy, 1.0);
  }
  const auto csv = format_sweep_csv(r);
  EXPECT_EQ(csv.substr(0, 21), "gram,kernel,accuracy\n");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

}  // namespace
}  // namespace nordiclid
