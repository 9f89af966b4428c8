#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "cskit/corpus.hpp"

using namespace cskit;

namespace {

NerCorpus parse_conll(const std::string& text) {
  std::istringstream in(text);
  return read_conll(in);
}

SegLidCorpus parse_seglid(const std::string& text) {
  std::istringstream in(text);
  return read_seglid(in);
}

// Random well-formed corpora for the round-trip properties.
NerCorpus random_ner_corpus(std::mt19937_64& gen, std::size_t sentences) {
  static const std::vector<std::string> surfaces = {"مصر", "game", "el",
                                                    "قال", "Sarah", "x1"};
  static const std::vector<std::string> types = {"PER", "LOC", "ORG", "MISC"};
  NerCorpus corpus;
  for (std::size_t s = 0; s < sentences; ++s) {
    LabeledSentence sent;
    const std::size_t len = 1 + gen() % 6;
    std::string prev = "O";
    for (std::size_t i = 0; i < len; ++i) {
      Token t;
      t.surface = surfaces[gen() % surfaces.size()];
      if (gen() % 3 == 0) t.pos = "NN";
      const int r = static_cast<int>(gen() % 3);
      if (r == 0) {
        t.tag = "O";
      } else if (r == 1 || prev == "O" || prev == "") {
        t.tag = "B-" + types[gen() % types.size()];
      } else {
        t.tag = "I-" + prev.substr(2);
      }
      prev = t.tag;
      sent.tokens.push_back(t);
    }
    corpus.push_back(sent);
  }
  return corpus;
}

SegLidCorpus random_seglid_corpus(std::mt19937_64& gen, std::size_t sentences) {
  static const std::vector<std::string> labels = {"AR", "EN", "OTHER", "NE.AR"};
  static const std::u32string pool = U"abcdefgxyz";
  SegLidCorpus corpus;
  for (std::size_t s = 0; s < sentences; ++s) {
    SegLidSentence sent;
    const std::size_t count = 1 + gen() % 5;
    for (std::size_t t = 0; t < count; ++t) {
      SegLidRecord rec;
      const std::size_t nsegs = 1 + gen() % 3;
      for (std::size_t k = 0; k < nsegs; ++k) {
        const std::size_t len = 1 + gen() % 4;
        for (std::size_t c = 0; c < len; ++c)
          rec.token += static_cast<char>(pool[gen() % pool.size()]);
        rec.segments.push_back({labels[gen() % labels.size()], len});
      }
      sent.push_back(rec);
    }
    corpus.push_back(sent);
  }
  return corpus;
}

}  // namespace

TEST_CASE("read_conll parses tokens, POS and sentences", "[corpus]") {
  const auto corpus = parse_conll("مصر B-LOC\n\nI NN O\nplay VB O\n");
  REQUIRE(corpus.size() == 2);
  CHECK(corpus[0].tokens[0].surface == "مصر");
  CHECK(corpus[0].tokens[0].tag == "B-LOC");
  CHECK_FALSE(corpus[0].tokens[0].pos.has_value());
  REQUIRE(corpus[1].tokens.size() == 2);
  CHECK(corpus[1].tokens[0].pos == "NN");
}

TEST_CASE("read_conll rejects malformed input", "[corpus]") {
  CHECK_THROWS_AS(parse_conll("a b c d\n"), ParseError);
  CHECK_THROWS_AS(parse_conll("a B-FOO\n"), ParseError);
  // I-LOC directly after O
  CHECK_THROWS_AS(parse_conll("a O\nb I-LOC\n"), ValidationError);
  // I-PER after B-LOC (type clash)
  CHECK_THROWS_AS(parse_conll("a B-LOC\nb I-PER\n"), ValidationError);
  try {
    parse_conll("a b c d\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
  }
}

TEST_CASE("conll round-trip", "[corpus]") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    const NerCorpus corpus = random_ner_corpus(gen, 1 + gen() % 5);
    std::ostringstream out;
    write_conll(out, corpus);
    CHECK(parse_conll(out.str()) == corpus);
  }
}

TEST_CASE("read_seglid parses records and validates lengths", "[corpus]") {
  const auto corpus = parse_seglid("wconditional ||| AR:1 EN:11\n");
  REQUIRE(corpus.size() == 1);
  REQUIRE(corpus[0].size() == 1);
  const SegLidRecord& rec = corpus[0][0];
  REQUIRE(rec.segments.size() == 2);
  CHECK(rec.segments[0] == Segment{"AR", 1});
  CHECK(rec.segments[1] == Segment{"EN", 11});

  // bare label spans the whole token
  const auto bare = parse_seglid("la2 ||| AR\n");
  CHECK(bare[0][0].segments == std::vector<Segment>{{"AR", 3}});

  // Arabic surfaces count code points, not bytes
  const auto ar = parse_seglid("لابتوب ||| AR\n");
  CHECK(ar[0][0].segments[0].length == 6);

  CHECK_THROWS_AS(parse_seglid("game ||| EN:3\n"), ParseError);
  CHECK_THROWS_AS(parse_seglid("game ||| XX\n"), ParseError);
  CHECK_THROWS_AS(parse_seglid("game EN\n"), ParseError);
}

TEST_CASE("read_seglid handles multi-record sentences", "[corpus]") {
  const auto corpus = parse_seglid(
      "la2 ||| AR elly ||| AR 3alena ||| AR natural ||| EN wconditional ||| "
      "AR:1 EN:11\n");
  REQUIRE(corpus.size() == 1);
  REQUIRE(corpus[0].size() == 5);
  CHECK(corpus[0][3].token == "natural");
  CHECK(corpus[0][4].segments.size() == 2);
}

TEST_CASE("seglid round-trip and byte-identical re-serialization", "[corpus]") {
  const std::string fig = "wconditional ||| AR:1 EN:11\n";
  const auto corpus = parse_seglid(fig);
  std::ostringstream out;
  write_seglid(out, corpus);
  CHECK(out.str() == fig);

  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 50; ++trial) {
    const SegLidCorpus c = random_seglid_corpus(gen, 1 + gen() % 4);
    std::ostringstream o;
    write_seglid(o, c);
    CHECK(parse_seglid(o.str()) == c);
  }
}

TEST_CASE("pool_corpora concatenates in order", "[corpus]") {
  std::mt19937_64 gen(9);
  const NerCorpus a = random_ner_corpus(gen, 2);
  const NerCorpus b = random_ner_corpus(gen, 3);
  const NerCorpus pooled = pool_corpora(std::vector<NerCorpus>{a, b});
  REQUIRE(pooled.size() == 5);
  CHECK(pooled[0] == a[0]);
  CHECK(pooled[2] == b[0]);
  CHECK(pool_corpora(std::vector<NerCorpus>{a}) == a);
  CHECK(pool_corpora(std::vector<NerCorpus>{}).empty());

  NerCorpus bad = b;
  bad[0].tokens[0].tag = "B-FOO";
  CHECK_THROWS_AS(pool_corpora(std::vector<NerCorpus>{a, bad}), ValidationError);
}

TEST_CASE("split is exact, disjoint and seed-deterministic", "[corpus]") {
  std::mt19937_64 gen(1);
  const NerCorpus corpus = random_ner_corpus(gen, 10);
  const auto parts = split(corpus, 0.8, 0.1, 0.1, 1);
  CHECK(parts.train.size() == 8);
  CHECK(parts.val.size() == 1);
  CHECK(parts.test.size() == 1);

  const auto again = split(corpus, 0.8, 0.1, 0.1, 1);
  CHECK(again.train == parts.train);
  CHECK(again.val == parts.val);
  CHECK(again.test == parts.test);

  // partition: multiset union equals the input
  auto key = [](const LabeledSentence& s) {
    std::string k;
    for (const auto& t : s.tokens) k += t.surface + "/" + t.tag + " ";
    return k;
  };
  std::multiset<std::string> input, output;
  for (const auto& s : corpus) input.insert(key(s));
  for (const auto& s : parts.train) output.insert(key(s));
  for (const auto& s : parts.val) output.insert(key(s));
  for (const auto& s : parts.test) output.insert(key(s));
  CHECK(input == output);

  CHECK_THROWS_AS(split(corpus, 0.5, 0.6, 0.1, 1), ValidationError);
}

TEST_CASE("corpus_stats counts tags, patterns and uniques", "[corpus]") {
  // 5 records: 3 AR (2 unique), 1 EN, 1 AR-EN mixed
  const auto corpus = parse_seglid(
      "la2 ||| AR la2 ||| AR kda ||| AR game ||| EN elgame ||| AR:2 EN:4\n");
  const StatsReport r = corpus_stats(corpus);
  CHECK(r.sentences == 1);
  CHECK(r.tokens == 5);
  CHECK(r.tag_tokens.at("AR") == 3);
  CHECK(r.tag_tokens.at("EN") == 1);
  CHECK(r.tag_tokens.at("MIXED") == 1);
  CHECK(r.tag_unique.at("AR") == 2);
  CHECK(r.pattern_tokens.at("AR-EN") == 1);
  CHECK(r.tokens_per_sentence == 5.0);

  const StatsReport empty = corpus_stats({});
  CHECK(empty.tokens == 0);
  CHECK(empty.sentences == 0);

  // histogram total equals multi-segment record count
  std::size_t histogram_total = 0;
  for (const auto& [p, c] : r.pattern_tokens) histogram_total += c;
  CHECK(histogram_total == r.tag_tokens.at("MIXED"));
}
