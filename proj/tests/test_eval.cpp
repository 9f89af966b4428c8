#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cskit/eval.hpp"

using namespace cskit;
using Catch::Approx;

namespace {

LabeledSentence with_tags(const std::vector<std::string>& tags) {
  LabeledSentence s;
  for (std::size_t i = 0; i < tags.size(); ++i)
    s.tokens.push_back({"w" + std::to_string(i), std::nullopt, tags[i]});
  return s;
}

}  // namespace

TEST_CASE("token_metrics on the TP=3 FP=1 FN=2 fixture", "[eval]") {
  // 3 entity hits, 1 spurious entity, 2 missed entities, 1 O hit
  const std::vector<std::string> gold = {"B-PER", "B-LOC", "B-ORG", "O",
                                         "B-PER", "B-LOC", "O"};
  const std::vector<std::string> pred = {"B-PER", "B-LOC", "B-ORG", "B-PER",
                                         "O",     "O",     "O"};
  const auto r = token_metrics(gold, pred);
  CHECK(r.precision == Approx(0.75).margin(1e-9));
  CHECK(r.recall == Approx(0.6).margin(1e-9));
  CHECK(r.f1 == Approx(2.0 * 0.75 * 0.6 / 1.35).margin(1e-9));
  CHECK(r.accuracy == Approx(4.0 / 7.0).margin(1e-9));
}

TEST_CASE("token_metrics conventions and errors", "[eval]") {
  const auto perfect = token_metrics({"B-PER", "O"}, {"B-PER", "O"});
  CHECK(perfect.accuracy == 1.0);
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.recall == 1.0);
  CHECK(perfect.f1 == 1.0);

  // all-O prediction: precision 0/0 -> 0 by convention, recall 0
  const auto allo = token_metrics({"B-PER", "O"}, {"O", "O"});
  CHECK(allo.precision == 0.0);
  CHECK(allo.recall == 0.0);
  CHECK(allo.f1 == 0.0);

  CHECK_THROWS_AS(token_metrics({"O"}, {"O", "O"}), ValidationError);
}

TEST_CASE("f1 lies between precision and recall", "[eval]") {
  std::mt19937_64 gen(5);
  const std::vector<std::string> tagset = {"O", "B-PER", "B-LOC"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> gold, pred;
    const std::size_t n = 1 + gen() % 20;
    for (std::size_t i = 0; i < n; ++i) {
      gold.push_back(tagset[gen() % tagset.size()]);
      pred.push_back(tagset[gen() % tagset.size()]);
    }
    const auto r = token_metrics(gold, pred);
    if (r.precision > 0.0 && r.recall > 0.0) {
      CHECK(r.f1 <= std::max(r.precision, r.recall) + 1e-12);
      CHECK(r.f1 >= std::min(r.precision, r.recall) - 1e-12);
    }
    if (r.precision == r.recall)
      CHECK(r.f1 == Approx(r.precision).margin(1e-12));
  }
}

TEST_CASE("entity_f1_conll exact match", "[eval]") {
  // exact span match
  const NerCorpus gold1 = {with_tags({"B-LOC", "I-LOC", "O"})};
  const auto exact = entity_f1_conll(gold1, {{"B-LOC", "I-LOC", "O"}});
  CHECK(exact.per_class.at("LOC").tp == 1);
  CHECK(exact.f1 == 1.0);

  // boundary off by one: FP=1 and FN=1, no partial credit
  const auto off = entity_f1_conll(gold1, {{"B-LOC", "O", "O"}});
  CHECK(off.per_class.at("LOC").fp == 1);
  CHECK(off.per_class.at("LOC").fn == 1);
  CHECK(off.f1 == 0.0);
}

TEST_CASE("entity_f1_conll on the 2 PER + 1 LOC fixture", "[eval]") {
  // gold: two PER spans and one LOC span; pred hits 1 PER exactly, misses
  // the boundary of the second, and gets LOC right -> P = R = F1 = 2/3
  const NerCorpus gold = {
      with_tags({"B-PER", "I-PER", "O", "B-PER", "O", "B-LOC"})};
  const std::vector<std::vector<std::string>> pred = {
      {"B-PER", "I-PER", "O", "B-PER", "I-PER", "B-LOC"}};
  const auto r = entity_f1_conll(gold, pred);
  CHECK(r.precision == Approx(2.0 / 3.0).margin(1e-9));
  CHECK(r.recall == Approx(2.0 / 3.0).margin(1e-9));
  CHECK(r.f1 == Approx(2.0 / 3.0).margin(1e-9));
  CHECK(r.per_class.at("PER").tp == 1);
  CHECK(r.per_class.at("LOC").tp == 1);
}

TEST_CASE("entity_f1_conll invariant under sentence reordering", "[eval]") {
  const NerCorpus gold = {with_tags({"B-PER", "O"}),
                          with_tags({"B-LOC", "I-LOC"}),
                          with_tags({"O", "B-ORG", "O"})};
  const std::vector<std::vector<std::string>> pred = {
      {"B-PER", "O"}, {"B-LOC", "O"}, {"O", "B-ORG", "B-MISC"}};
  const auto base = entity_f1_conll(gold, pred);

  const std::vector<std::size_t> order = {2, 0, 1};
  NerCorpus gold2;
  std::vector<std::vector<std::string>> pred2;
  for (std::size_t i : order) {
    gold2.push_back(gold[i]);
    pred2.push_back(pred[i]);
  }
  const auto shuffled = entity_f1_conll(gold2, pred2);
  CHECK(shuffled.precision == Approx(base.precision).margin(1e-15));
  CHECK(shuffled.recall == Approx(base.recall).margin(1e-15));
  CHECK(shuffled.f1 == Approx(base.f1).margin(1e-15));

  CHECK_THROWS_AS(entity_f1_conll(gold, {{"O"}}), ValidationError);
}

TEST_CASE("each gold entity is matched at most once", "[eval]") {
  // two identical predicted spans cannot both claim the one gold span
  const NerCorpus gold = {with_tags({"B-PER", "O", "B-PER"})};
  const auto r = entity_f1_conll(gold, {{"B-PER", "O", "B-PER"}});
  CHECK(r.per_class.at("PER").tp == 2);
  const NerCorpus gold_one = {with_tags({"B-PER", "O", "O"})};
  const auto dup = entity_f1_conll(gold_one, {{"B-PER", "O", "B-PER"}});
  CHECK(dup.per_class.at("PER").tp == 1);
  CHECK(dup.per_class.at("PER").fp == 1);
}

TEST_CASE("seg_metrics reproduces the laptopy example", "[eval]") {
  // prediction EN:5 AR:2 against gold EN:6 AR:1: exact-match tag failure,
  // char accuracy contribution 6/7
  const std::vector<SegLidRecord> gold = {{"laptopy", {{"EN", 6}, {"AR", 1}}}};
  const std::vector<SegLidRecord> pred = {{"laptopy", {{"EN", 5}, {"AR", 2}}}};
  const auto r = seg_metrics(gold, pred);
  CHECK(r.accuracy == 0.0);
  CHECK(r.tag_f1 == 0.0);
  CHECK(r.char_acc == Approx(6.0 / 7.0).margin(1e-9));
  REQUIRE(r.mixed_char_acc.has_value());
  CHECK(*r.mixed_char_acc == Approx(6.0 / 7.0).margin(1e-9));
}

TEST_CASE("seg_metrics identical records give all ones", "[eval]") {
  const std::vector<SegLidRecord> gold = {{"elgame", {{"AR", 2}, {"EN", 4}}},
                                          {"la2", {{"AR", 3}}}};
  const auto r = seg_metrics(gold, gold);
  CHECK(r.accuracy == 1.0);
  CHECK(r.tag_f1 == 1.0);
  CHECK(r.seg_f1 == 1.0);
  CHECK(r.char_acc == 1.0);
  REQUIRE(r.mixed_acc.has_value());
  CHECK(*r.mixed_acc == 1.0);
}

TEST_CASE("seg_f1 ignores labels; mixed metrics key on gold", "[eval]") {
  // boundaries right, labels wrong -> seg_f1 1, tag accuracy 0
  const std::vector<SegLidRecord> gold = {{"elgame", {{"AR", 2}, {"EN", 4}}}};
  const std::vector<SegLidRecord> pred = {{"elgame", {{"EN", 2}, {"AR", 4}}}};
  const auto r = seg_metrics(gold, pred);
  CHECK(r.seg_f1 == 1.0);
  CHECK(r.accuracy == 0.0);

  // single-segment gold corpus: mixed metrics absent
  const std::vector<SegLidRecord> single = {{"la2", {{"AR", 3}}}};
  const auto none = seg_metrics(single, single);
  CHECK_FALSE(none.mixed_acc.has_value());
  CHECK_FALSE(none.mixed_tag_f1.has_value());

  // surface mismatch
  const std::vector<SegLidRecord> other = {{"la3", {{"AR", 3}}}};
  CHECK_THROWS_AS(seg_metrics(single, other), ValidationError);
}

TEST_CASE("char_acc single wrong character on an n-char token", "[eval]") {
  for (std::size_t n : {3u, 5u, 9u}) {
    std::string token(n, 'x');
    const std::vector<SegLidRecord> gold = {
        {token, {{"EN", n}}}};
    const std::vector<SegLidRecord> pred = {
        {token, {{"EN", n - 1}, {"AR", 1}}}};
    const auto r = seg_metrics(gold, pred);
    CHECK(r.char_acc ==
          Approx(static_cast<double>(n - 1) / static_cast<double>(n))
              .margin(1e-12));
  }
}

TEST_CASE("confusion matrix one-vs-rest counts", "[eval]") {
  // binary 4-item fixture: 2 right, 1 FP, 1 FN for the positive class
  const std::vector<std::string> gold = {"P", "P", "N", "P"};
  const std::vector<std::string> pred = {"P", "P", "P", "N"};
  const auto cm = confusion(gold, pred);
  CHECK(cm.per_class.at("P").tp == 2);
  CHECK(cm.per_class.at("P").fp == 1);
  CHECK(cm.per_class.at("P").fn == 1);
  CHECK(cm.per_class.at("P").tn == 0);

  const auto perfect = confusion({"A", "B"}, {"A", "B"});
  CHECK(perfect.per_class.at("A").fp == 0);
  CHECK(perfect.per_class.at("A").fn == 0);

  const auto empty = confusion({}, {});
  CHECK(empty.total == 0);
  CHECK(empty.per_class.empty());

  CHECK_THROWS_AS(confusion({"A"}, {}), ValidationError);

  // per class: TP+FP+FN+TN = total
  for (const auto& [cls, c] : cm.per_class)
    CHECK(c.tp + c.fp + c.fn + c.tn == cm.total);
}
