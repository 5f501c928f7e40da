// End-to-end runs of the nordiclid executable.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <string>

#include "nordiclid/pipeline.hpp"
#include "test_support.hpp"

namespace nordiclid {
namespace {

using testing::TempDir;

struct Run {
  int code;
  std::string out;
};

Run cli(const std::string& args, const std::string& stdin_file = "") {
  std::string cmd = std::string("'") + NORDICLID_CLI + "' " + args + " 2>/dev/null";
  if (!stdin_file.empty()) cmd += " < '" + stdin_file + "'";
  FILE* pipe = popen(cmd.c_str(), "r");
  Run r{-1, ""};
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

// Ten cleaned sentences per label.
std::filesystem::path write_small_dataset(const TempDir& dir) {
  std::vector<Sentence> s;
  const std::array<std::string, kNumLabels> stems = {"hvad er det", "vad är det", "kva er det",
                                                     "hva er det", "hvat er tað", "hvað er það"};
  for (std::size_t l = 0; l < kNumLabels; ++l) {
    for (int i = 0; i < 10; ++i) s.push_back(testing::sentence(label_at(l), stems[l] + " " + std::string(i + 1, 'a')));
  }
  const auto path = dir / "small.tsv";
  write_dataset(path, Dataset(std::move(s)));
  return path;
}

TEST(Cli, HelpAndBadUsage) {
  EXPECT_EQ(cli("--help").code, 0);
  EXPECT_EQ(cli("").code, 3);
  EXPECT_EQ(cli("train --train x.tsv").code, 3);  // --out missing
  EXPECT_EQ(cli("frobnicate").code, 3);
}

TEST(Cli, SplitIsStratified) {
  TempDir dir;
  const auto data = write_small_dataset(dir);
  const auto r = cli("corpus split --in " + q(data) + " --train-out " + q(dir / "tr.tsv") + " --test-out " +
                     q(dir / "te.tsv"));
  ASSERT_EQ(r.code, 0);
  const auto train = read_dataset(dir / "tr.tsv"), test = read_dataset(dir / "te.tsv");
  EXPECT_EQ(train.size(), 48u);
  EXPECT_EQ(test.size(), 12u);
  for (auto c : test.per_class_count()) EXPECT_EQ(c, 2u);
  EXPECT_EQ(cli("corpus split --in " + q(data) + " --ratio 1.5 --train-out " + q(dir / "a") + " --test-out " +
                q(dir / "b"))
                .code,
            3);
}

TEST(Cli, ExitCodesForBadInputs) {
  TempDir dir;
  const auto data = write_small_dataset(dir);
  EXPECT_EQ(cli("train --train " + q(dir / "missing.tsv") + " --out " + q(dir / "m.bin")).code, 2);
  EXPECT_EQ(cli("train --train " + q(data) + " --features cbow --model nb --out " + q(dir / "m.bin")).code, 3);
  EXPECT_EQ(cli("train --train " + q(data) + " --features char4 --out " + q(dir / "m.bin")).code, 3);
  EXPECT_EQ(cli("predict --model " + q(dir / "missing.bin")).code, 2);
  write_text_file(dir / "garbage.bin", "not a model");
  EXPECT_EQ(cli("predict --model " + q(dir / "garbage.bin")).code, 2);
  EXPECT_EQ(cli("reduce --method tsne --perplexity 100 --data " + q(data) + " --out " + q(dir / "p.tsv")).code, 4);
}

TEST(Cli, TrainPredictMatchesLibrary) {
  TempDir dir;
  const auto data = write_small_dataset(dir);
  ASSERT_EQ(cli("train --train " + q(data) + " --model nb --features char2 --out " + q(dir / "m.bin")).code, 0);
  write_text_file(dir / "in.txt", "Hvad er det aaa?\nVad är det!\nHvað er það 12.\n");
  const auto r = cli("predict --model " + q(dir / "m.bin") + " --input " + q(dir / "in.txt"));
  ASSERT_EQ(r.code, 0);
  const auto model = load_model(dir / "m.bin");
  std::string expected;
  for (const char* line : {"Hvad er det aaa?", "Vad är det!", "Hvað er það 12."}) {
    expected += std::string(code_of(predict_label(model, clean_sentence(line)))) + "\n";
  }
  EXPECT_EQ(r.out, expected);
  EXPECT_EQ(r.out, "dk\nsv\nis\n");
  EXPECT_EQ(cli("predict --iso --model " + q(dir / "m.bin") + " --input " + q(dir / "in.txt")).out, "da\nsv\nis\n");
}

TEST(Cli, EmptyPredictInputGivesEmptyOutput) {
  TempDir dir;
  const auto data = write_small_dataset(dir);
  ASSERT_EQ(cli("train --train " + q(data) + " --model knn --features char1 --out " + q(dir / "m.bin")).code, 0);
  write_text_file(dir / "empty.txt", "");
  const auto r = cli("predict --model " + q(dir / "m.bin"), (dir / "empty.txt").string());
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "");
}

TEST(Cli, RerunsAreByteIdentical) {
  TempDir dir;
  for (const char* run : {"a", "b"}) {
    const std::string raw = std::string("raw_") + run;
    ASSERT_EQ(cli("corpus synth --per-class 30 --out-dir " + q(dir / raw)).code, 0);
    ASSERT_EQ(cli("corpus clean --raw-dir " + q(dir / raw) + " --out " + q(dir / (raw + ".tsv"))).code, 0);
    ASSERT_EQ(cli("train --train " + q(dir / (raw + ".tsv")) + " --model svm --out " +
                  q(dir / (std::string(run) + ".bin")))
                  .code,
              0);
    ASSERT_EQ(cli("eval --model " + q(dir / (std::string(run) + ".bin")) + " --test " + q(dir / (raw + ".tsv")) +
                  " --name mini --out-dir " + q(dir / (std::string(run) + "_eval")))
                  .code,
              0);
  }
  EXPECT_EQ(read_file(dir / "raw_a.tsv"), read_file(dir / "raw_b.tsv"));
  EXPECT_EQ(read_file(dir / "a.bin"), read_file(dir / "b.bin"));
  EXPECT_EQ(read_file(dir / "a_eval/eval_report.json"), read_file(dir / "b_eval/eval_report.json"));
  EXPECT_EQ(read_file(dir / "a_eval/eval_confusion.csv"), read_file(dir / "b_eval/eval_confusion.csv"));
}

TEST(Cli, TatoebaImportCountsSkippedRows) {
  TempDir dir;
  write_text_file(dir / "t.tsv", "dk\tJeg hedder Ole.\nen\tHello there.\nis\t7\nsv\tJag heter Eva.\n");
  const auto r = cli("corpus tatoeba --in " + q(dir / "t.tsv") + " --out " + q(dir / "o.tsv"));
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("skipped_unknown_label\t1"), std::string::npos);
  EXPECT_NE(r.out.find("dropped_too_short\t1"), std::string::npos);
  EXPECT_EQ(read_dataset(dir / "o.tsv").size(), 2u);
}

TEST(Cli, ProfileHasOneRowPerCharacter) {
  TempDir dir;
  const auto r = cli("profile --data " + q(write_small_dataset(dir)));
  ASSERT_EQ(r.code, 0);
  std::size_t lines = 0;
  for (char c : r.out) lines += c == '\n';
  EXPECT_EQ(lines, 1 + kAlphabetSize);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "char,dk,sv,nn,nb,fo,is");
}

}  // namespace
}  // namespace nordiclid
