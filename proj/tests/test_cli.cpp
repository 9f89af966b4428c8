// End-to-end tests driving the installed binary. The binary path arrives in
// CSKIT_BIN; scratch space in CSKIT_TEST_TMP.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

std::string bin_path() {
  const char* bin = std::getenv("CSKIT_BIN");
  REQUIRE(bin != nullptr);
  return bin;
}

fs::path tmp_dir() {
  const char* dir = std::getenv("CSKIT_TEST_TMP");
  REQUIRE(dir != nullptr);
  fs::create_directories(dir);
  return dir;
}

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run(const std::string& args) {
  const fs::path out_file = tmp_dir() / "stdout.txt";
  const std::string cmd =
      bin_path() + " " + args + " > " + out_file.string() + " 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  std::ifstream f(out_file);
  std::ostringstream buf;
  buf << f.rdbuf();
  return {WEXITSTATUS(rc), buf.str()};
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  f << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

const std::string kSegCorpus =
    "la2 ||| AR elly ||| AR natural ||| EN wconditional ||| AR:1 EN:11\n"
    "elgame ||| AR:2 EN:4 kda ||| AR\n";

const std::string kConllCorpus =
    "cairo B-LOC\nis O\nnice O\n\nsarah B-PER\nwent O\nto O\ncairo B-LOC\n\n"
    "google B-ORG\nhired O\nsarah B-PER\n";

}  // namespace

TEST_CASE("stats subcommand", "[cli]") {
  const auto dir = tmp_dir();
  write_file(dir / "corpus.seglid", kSegCorpus);
  const auto r = run("stats " + (dir / "corpus.seglid").string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("sentences\t2") != std::string::npos);
  CHECK(r.out.find("tokens\t6") != std::string::npos);
  CHECK(r.out.find("pattern\tAR-EN\t2") != std::string::npos);
}

TEST_CASE("normalize subcommand", "[cli]") {
  const auto dir = tmp_dir();
  write_file(dir / "text.txt", "أحمد يلعب\n");
  const auto r = run("normalize " + (dir / "text.txt").string());
  CHECK(r.exit_code == 0);
  CHECK(r.out == "احمد يلعب\n");
}

TEST_CASE("help and error exit codes", "[cli]") {
  CHECK(run("train-ner --help").exit_code == 0);
  CHECK(run("definitely-not-a-command").exit_code == 1);
  CHECK(run("train-ner --train x").exit_code == 1);  // missing --out
  const auto dir = tmp_dir();
  write_file(dir / "in.conll", kConllCorpus);
  // missing model file -> data error
  CHECK(run("tag-ner --model " + (dir / "missing.crf").string() + " --in " +
            (dir / "in.conll").string())
            .exit_code == 2);
  // malformed corpus -> data error
  write_file(dir / "bad.conll", "a b c d\n");
  CHECK(run("train-ner --train " + (dir / "bad.conll").string() + " --out " +
            (dir / "m.crf").string())
            .exit_code == 2);
}

TEST_CASE("train/tag/eval-ner pipeline with manifest", "[cli]") {
  const auto dir = tmp_dir();
  write_file(dir / "train.conll", kConllCorpus);
  const std::string model = (dir / "model.crf").string();
  const auto train = run("--seed 7 train-ner --train " +
                         (dir / "train.conll").string() + " --out " + model +
                         " --epochs 80 --sigma 10");
  REQUIRE(train.exit_code == 0);
  CHECK(fs::exists(model));
  REQUIRE(fs::exists(model + ".manifest"));
  const std::string manifest = read_file(model + ".manifest");
  CHECK(manifest.find("seed\t7") != std::string::npos);
  CHECK(manifest.find("fnv1a64:") != std::string::npos);

  const auto tag = run("tag-ner --model " + model + " --in " +
                       (dir / "train.conll").string() + " --out " +
                       (dir / "pred.conll").string());
  REQUIRE(tag.exit_code == 0);

  const auto eval = run("eval-ner --gold " + (dir / "train.conll").string() +
                        " --pred " + (dir / "pred.conll").string() +
                        " --format tsv");
  REQUIRE(eval.exit_code == 0);
  // separable training corpus decoded at full accuracy
  CHECK(eval.out.find("token_accuracy\t1.0000") != std::string::npos);
  CHECK(eval.out.find("entity_f1\t1.0000") != std::string::npos);
}

TEST_CASE("train/tag/eval-lid pipeline", "[cli]") {
  const auto dir = tmp_dir();
  std::string train_corpus;
  for (int i = 0; i < 10; ++i)
    train_corpus += "elgame ||| AR:2 EN:4 la2 ||| AR game ||| EN\n";
  write_file(dir / "train.seglid", train_corpus);
  const std::string model = (dir / "model.seglid").string();
  const auto train = run("--seed 3 train-lid --train " +
                         (dir / "train.seglid").string() + " --out " + model +
                         " --epochs 60");
  REQUIRE(train.exit_code == 0);
  CHECK(fs::exists(model + ".manifest"));

  write_file(dir / "tokens.txt", "elgame la2 game\n");
  const auto tag = run("tag-lid --model " + model + " --in " +
                       (dir / "tokens.txt").string() + " --out " +
                       (dir / "pred.seglid").string());
  REQUIRE(tag.exit_code == 0);
  const std::string pred = read_file(dir / "pred.seglid");
  CHECK(pred.find("elgame ||| AR:2 EN:4") != std::string::npos);

  write_file(dir / "gold.seglid", "elgame ||| AR:2 EN:4 la2 ||| AR game ||| EN\n");
  const auto eval = run("eval-lid --gold " + (dir / "gold.seglid").string() +
                        " --pred " + (dir / "pred.seglid").string() +
                        " --format tsv");
  REQUIRE(eval.exit_code == 0);
  CHECK(eval.out.find("accuracy\t1.0000") != std::string::npos);
}

TEST_CASE("coarse-ne training accepts NE-collapsed data", "[cli]") {
  const auto dir = tmp_dir();
  write_file(dir / "ne.seglid",
             "Masr ||| NE.AR Egypt ||| NE.EN la2 ||| AR\n"
             "Masr ||| NE.AR game ||| EN\n");
  const std::string model = (dir / "coarse.seglid").string();
  const auto train = run("train-lid --train " + (dir / "ne.seglid").string() +
                         " --out " + model + " --coarse-ne --epochs 30");
  REQUIRE(train.exit_code == 0);
  write_file(dir / "tok.txt", "Masr\n");
  const auto tag =
      run("tag-lid --model " + model + " --in " + (dir / "tok.txt").string());
  REQUIRE(tag.exit_code == 0);
  CHECK(tag.out.find("NE") != std::string::npos);
  CHECK(tag.out.find("NE.AR") == std::string::npos);
}

TEST_CASE("cluster subcommand is deterministic", "[cli]") {
  const auto dir = tmp_dir();
  write_file(dir / "emb.txt",
             "cairo 10.0 0.1\ngiza 10.0 -0.1\npen -10.0 0.1\nink -10.0 -0.1\n");
  const std::string m1 = (dir / "c1.clusters").string();
  const std::string m2 = (dir / "c2.clusters").string();
  REQUIRE(run("--seed 5 cluster --embeddings " + (dir / "emb.txt").string() +
              " --k 2 --out " + m1)
              .exit_code == 0);
  REQUIRE(run("--seed 5 --threads 4 cluster --embeddings " +
              (dir / "emb.txt").string() + " --k 2 --out " + m2)
              .exit_code == 0);
  CHECK(read_file(m1) == read_file(m2));  // byte identical across threads
}

TEST_CASE("augment eda via files", "[cli]") {
  const auto dir = tmp_dir();
  write_file(dir / "in.conll", "the O\ngame O\nis O\ngood O\n\n");
  write_file(dir / "lex.txt",
             "[lang=en]\ngame\tmatch,play\ngood\tfine,nice\n");
  write_file(dir / "emb.txt",
             "game 1.0 0.0\nmatch 0.9 0.1\nplay 0.5 0.5\ngood 0.0 1.0\n"
             "fine 0.1 0.9\nnice 0.3 0.7\n");
  const auto r = run("--seed 11 augment --method eda --alpha 0.4 --num-aug 4"
                     " --in " + (dir / "in.conll").string() +
                     " --lexicon " + (dir / "lex.txt").string() +
                     " --embeddings " + (dir / "emb.txt").string());
  REQUIRE(r.exit_code == 0);
  // 4 variants of a single sentence, blank-line separated
  std::size_t blank_lines = 0;
  std::istringstream lines(r.out);
  std::string line;
  std::size_t nonempty = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) ++blank_lines;
    else ++nonempty;
  }
  CHECK(blank_lines == 3);
  CHECK(nonempty >= 4);
}

TEST_CASE("augment bt with a dictionary stub preserves latin count", "[cli]") {
  const auto dir = tmp_dir();
  write_file(dir / "in.conll", "عندي O\nlab O\nبكرة O\n\n");
  write_file(dir / "mt.dict",
             "[en-ar]\nlab\tمعمل\n"
             "[ar-fr]\nعندي معمل بكرة\tj'ai un labo demain\n"
             "[fr-ar]\nj'ai un labo demain\tعندي معمل غدا\n"
             "[ar-en]\nمعمل\tlab\nغدا\ttomorrow\nعندي\tihave\n");
  const auto r = run("--seed 2 augment --method bt --in " +
                     (dir / "in.conll").string() + " --mt-dict " +
                     (dir / "mt.dict").string());
  REQUIRE(r.exit_code == 0);
  // exactly one Latin token in the output sentence
  std::istringstream lines(r.out);
  std::string line;
  int latin = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    const char c = line[0];
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) ++latin;
  }
  CHECK(latin == 1);

  // bt without a client is a usage-level validation error
  CHECK(run("augment --method bt --in " + (dir / "in.conll").string())
            .exit_code == 2);
}

TEST_CASE("byte-identical reruns across seeds and threads", "[cli]") {
  const auto dir = tmp_dir();
  write_file(dir / "train.conll", kConllCorpus);
  const std::string m1 = (dir / "d1.crf").string();
  const std::string m2 = (dir / "d2.crf").string();
  const std::string m3 = (dir / "d3.crf").string();
  const std::string base = "train-ner --train " + (dir / "train.conll").string() +
                           " --epochs 40 --lexical --stem";
  REQUIRE(run("--seed 9 " + base + " --out " + m1).exit_code == 0);
  REQUIRE(run("--seed 9 " + base + " --out " + m2).exit_code == 0);
  REQUIRE(run("--seed 9 --threads 4 " + base + " --out " + m3).exit_code == 0);
  CHECK(read_file(m1) == read_file(m2));
  CHECK(read_file(m1) == read_file(m3));

  // augmentation reruns are byte-identical too
  write_file(dir / "lex.txt", "[lang=en]\ncairo\tgiza\n");
  write_file(dir / "emb.txt", "cairo 1 0\ngiza 0.9 0.1\n");
  const std::string args = "--seed 4 augment --method eda --num-aug 3 --in " +
                           (dir / "train.conll").string() + " --lexicon " +
                           (dir / "lex.txt").string() + " --embeddings " +
                           (dir / "emb.txt").string();
  const auto a1 = run(args);
  const auto a2 = run(args);
  REQUIRE(a1.exit_code == 0);
  CHECK(a1.out == a2.out);
}

TEST_CASE("config file supplies defaults, flags win", "[cli]") {
  const auto dir = tmp_dir();
  write_file(dir / "text.txt", "أحمد.\n");
  write_file(dir / "cfg.ini", "threads = 1\n");
  const auto r = run("--config " + (dir / "cfg.ini").string() + " normalize " +
                     (dir / "text.txt").string());
  CHECK(r.exit_code == 0);
  CHECK(r.out == "احمد.\n");
}
