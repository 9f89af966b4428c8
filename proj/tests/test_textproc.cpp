#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "cskit/textproc.hpp"
#include "cskit/utf8.hpp"

using namespace cskit;

TEST_CASE("normalize unifies alef variants", "[textproc]") {
  CHECK(normalize("أحمد") == "احمد");
  CHECK(normalize("آمال") == "امال");
  CHECK(normalize("إلى") == "الي");  // alef + alef-maqsura unification
  CHECK(normalize("") == "");
  CHECK(normalize("hello") == "hello");
}

TEST_CASE("normalize flags act independently", "[textproc]") {
  NormalizationConfig keep_alef;
  keep_alef.unify_alef = false;
  CHECK(normalize("أحمد", keep_alef) == "أحمد");

  NormalizationConfig punct;
  punct.punctuation_removal = true;
  CHECK(normalize("a.b,c", punct) == "abc");
  CHECK(normalize("a.b,c") == "a.b,c");  // off by default

  NormalizationConfig tatweel;
  CHECK(normalize("كـتب", tatweel) == "كتب");
}

TEST_CASE("normalize is idempotent and length-non-increasing", "[textproc]") {
  std::mt19937_64 gen(7);
  const std::u32string alphabet = utf8::decode(
      "abcXYZ123 .،؟أإآاىيكتبوسلمنهتر８ًٌٍَُِّْـق");
  for (int trial = 0; trial < 200; ++trial) {
    std::u32string raw;
    const std::size_t len = gen() % 24;
    for (std::size_t i = 0; i < len; ++i)
      raw.push_back(alphabet[gen() % alphabet.size()]);
    const std::string text = utf8::encode(raw);
    NormalizationConfig cfg;
    cfg.punctuation_removal = (gen() % 2) == 0;
    cfg.unify_alef = (gen() % 2) == 0;
    const std::string once = normalize(text, cfg);
    CHECK(normalize(once, cfg) == once);
    CHECK(once.size() <= text.size());

    const std::string stripped = strip_diacritics(text);
    CHECK(strip_diacritics(stripped) == stripped);
    CHECK(stripped.size() <= text.size());
  }
}

TEST_CASE("strip_diacritics removes exactly the combining marks", "[textproc]") {
  CHECK(strip_diacritics("كَتَبَ") == "كتب");
  CHECK(strip_diacritics("كتب") == "كتب");
  CHECK(strip_diacritics("abc") == "abc");
  // preserved order of the rest
  CHECK(strip_diacritics("aَb") == "ab");
}

TEST_CASE("detect_script classification", "[textproc]") {
  CHECK(detect_script("مصر") == Script::Arabic);
  CHECK(detect_script("laptop") == Script::Latin);
  CHECK(detect_script("لابtop") == Script::Mixed);
  CHECK(detect_script("مصر2024") == Script::Arabic);  // digits ignored
  CHECK(detect_script("123") == Script::Digit);
  CHECK(detect_script("٤٥") == Script::Digit);
  CHECK(detect_script("!?") == Script::Punct);
  CHECK(detect_script("🙂") == Script::Other);
  CHECK_THROWS_AS(detect_script(""), ValidationError);
}

TEST_CASE("detect_script is permutation invariant on letters", "[textproc]") {
  std::mt19937_64 gen(11);
  const std::u32string pool = utf8::decode("abyzمصرك12.");
  for (int trial = 0; trial < 200; ++trial) {
    std::u32string tok;
    const std::size_t len = 1 + gen() % 8;
    for (std::size_t i = 0; i < len; ++i) tok.push_back(pool[gen() % pool.size()]);
    const Script before = detect_script(utf8::encode(tok));
    std::shuffle(tok.begin(), tok.end(), gen);
    CHECK(detect_script(utf8::encode(tok)) == before);
  }
}

TEST_CASE("light_stem strips the affix inventory", "[textproc]") {
  CHECK(light_stem("وبمصرنا") == "مصر");
  CHECK(light_stem("نحتاجهم") == "نحتاج");
  CHECK(light_stem("quiz") == "quiz");
  CHECK(light_stem("المدرسة") == "مدرس");
  // never below two letters
  CHECK(light_stem("لك") == "لك");
}

TEST_CASE("light_stem result is a contiguous substring", "[textproc]") {
  std::mt19937_64 gen(13);
  const std::u32string pool = utf8::decode("والبفكلمصرنهتج");
  for (int trial = 0; trial < 300; ++trial) {
    std::u32string tok;
    const std::size_t len = 1 + gen() % 10;
    for (std::size_t i = 0; i < len; ++i) tok.push_back(pool[gen() % pool.size()]);
    const std::string word = utf8::encode(tok);
    const std::string stem = light_stem(word);
    CHECK(word.find(stem) != std::string::npos);
  }
}

TEST_CASE("affix table loads from file", "[textproc]") {
  std::istringstream file(
      "[prefix]\nel\nal\n[suffix]\nat\n# comment\n");
  const AffixTable t = AffixTable::load(file);
  REQUIRE(t.prefixes.size() == 2);
  REQUIRE(t.suffixes.size() == 1);
  CHECK(light_stem("elgame", t) == "elgame");  // Latin tokens unchanged
}

TEST_CASE("tokenize splits whitespace and punctuation", "[textproc]") {
  CHECK(tokenize("I played elgame.") ==
        std::vector<std::string>{"I", "played", "elgame", "."});
  CHECK(tokenize("") == std::vector<std::string>{});
  CHECK(tokenize("مصر، جميلة") == std::vector<std::string>{"مصر", "،", "جميلة"});
  CHECK(tokenize("  a   b ") == std::vector<std::string>{"a", "b"});
}
