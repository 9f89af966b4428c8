#pragma once

#include <algorithm>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cskit/error.hpp"
#include "cskit/utf8.hpp"

namespace cskit {

// Script class of a token. Mixed means the token carries letters from both
// the Arabic and Latin blocks; Digit/Punct/Other apply only to letterless
// tokens.
enum class Script { Arabic, Latin, Digit, Punct, Mixed, Other };

inline const char* to_string(Script s) {
  switch (s) {
    case Script::Arabic: return "Arabic";
    case Script::Latin: return "Latin";
    case Script::Digit: return "Digit";
    case Script::Punct: return "Punct";
    case Script::Mixed: return "Mixed";
    default: return "Other";
  }
}

namespace uni {

inline bool is_arabic_letter(char32_t c) {
  return (c >= 0x0620 && c <= 0x064A && c != 0x0640) ||
         (c >= 0x066E && c <= 0x066F) || (c >= 0x0671 && c <= 0x06D3) ||
         c == 0x06D5 || (c >= 0x06EE && c <= 0x06EF) ||
         (c >= 0x06FA && c <= 0x06FF) || (c >= 0x0750 && c <= 0x077F) ||
         (c >= 0xFB50 && c <= 0xFDC7) || (c >= 0xFE70 && c <= 0xFEFC);
}

inline bool is_latin_letter(char32_t c) {
  return (c >= U'A' && c <= U'Z') || (c >= U'a' && c <= U'z') ||
         (c >= 0x00C0 && c <= 0x00D6) || (c >= 0x00D8 && c <= 0x00F6) ||
         (c >= 0x00F8 && c <= 0x024F);
}

inline bool is_digit(char32_t c) {
  return (c >= U'0' && c <= U'9') || (c >= 0x0660 && c <= 0x0669) ||
         (c >= 0x06F0 && c <= 0x06F9);
}

inline bool is_punct(char32_t c) {
  if ((c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) ||
      (c >= 0x5B && c <= 0x60) || (c >= 0x7B && c <= 0x7E)) {
    return true;
  }
  switch (c) {
    case 0x060C:  // Arabic comma
    case 0x061B:  // Arabic semicolon
    case 0x061F:  // Arabic question mark
    case 0x066A:  // Arabic percent
    case 0x066B:
    case 0x066C:
    case 0x066D:
    case 0x00A1:
    case 0x00BF:
    case 0x00AB:
    case 0x00BB:
      return true;
    default:
      break;
  }
  return (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E);
}

inline bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' ||
         c == U'\v' || c == 0x00A0 || (c >= 0x2000 && c <= 0x200A) ||
         c == 0x202F || c == 0x3000;
}

// The diacritic inventory stripped by preprocessing: the Arabic tashkeel
// range U+064B..U+0652 plus the superscript alef U+0670.
inline bool is_arabic_diacritic(char32_t c) {
  return (c >= 0x064B && c <= 0x0652) || c == 0x0670;
}

inline constexpr char32_t kTatweel = 0x0640;
inline constexpr char32_t kAlef = 0x0627;          // ا
inline constexpr char32_t kAlefMadda = 0x0622;     // آ
inline constexpr char32_t kAlefHamzaAbove = 0x0623;  // أ
inline constexpr char32_t kAlefHamzaBelow = 0x0625;  // إ
inline constexpr char32_t kYa = 0x064A;            // ي
inline constexpr char32_t kAlefMaqsura = 0x0649;   // ى

}  // namespace uni

struct NormalizationConfig {
  bool unify_alef = true;
  bool unify_ya_alefmaqsura = true;
  bool strip_diacritics = true;
  bool strip_tatweel = true;
  bool punctuation_removal = false;
};

// Letter-shape unification and mark stripping. Idempotent; Latin text is a
// fixed point unless punctuation_removal is set.
inline std::string normalize(std::string_view text,
                             const NormalizationConfig& cfg = {}) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    char32_t c = utf8::decode_one(text, i);
    if (cfg.unify_alef && (c == uni::kAlefMadda || c == uni::kAlefHamzaAbove ||
                           c == uni::kAlefHamzaBelow)) {
      c = uni::kAlef;
    }
    if (cfg.unify_ya_alefmaqsura && c == uni::kAlefMaqsura) c = uni::kYa;
    if (cfg.strip_diacritics && uni::is_arabic_diacritic(c)) continue;
    if (cfg.strip_tatweel && c == uni::kTatweel) continue;
    if (cfg.punctuation_removal && uni::is_punct(c)) continue;
    utf8::append(out, c);
  }
  return out;
}

// Removes the Arabic combining marks (U+064B..U+0652, U+0670) only.
inline std::string strip_diacritics(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const char32_t c = utf8::decode_one(text, i);
    if (!uni::is_arabic_diacritic(c)) utf8::append(out, c);
  }
  return out;
}

// Script of a token. Digits, punctuation and marks are ignored whenever the
// token carries letters; a token mixing Arabic and Latin letters is Mixed.
// Letterless tokens: all digits -> Digit, all punctuation -> Punct,
// anything else -> Other.
inline Script detect_script(std::string_view token) {
  if (token.empty()) throw ValidationError("detect_script: empty token");
  bool arabic = false, latin = false, all_digit = true, all_punct = true;
  std::size_t i = 0;
  while (i < token.size()) {
    const char32_t c = utf8::decode_one(token, i);
    arabic |= uni::is_arabic_letter(c);
    latin |= uni::is_latin_letter(c);
    all_digit &= uni::is_digit(c);
    all_punct &= uni::is_punct(c);
  }
  if (arabic && latin) return Script::Mixed;
  if (arabic) return Script::Arabic;
  if (latin) return Script::Latin;
  if (all_digit) return Script::Digit;
  if (all_punct) return Script::Punct;
  return Script::Other;
}

// Affix inventory for the light stemmer and the segment-feature lexicon.
// Loadable from a UTF-8 file with "[prefix]" / "[suffix]" sections, one
// affix per line.
struct AffixTable {
  std::vector<std::u32string> prefixes;
  std::vector<std::u32string> suffixes;

  static AffixTable stemmer_defaults() {
    AffixTable t;
    for (const char* p : {"وال", "لل", "ال", "و", "ب", "ف", "ك", "ل"})
      t.prefixes.push_back(utf8::decode(p));
    for (const char* s : {"ات", "ون", "ين", "ها", "هم", "نا", "ة"})
      t.suffixes.push_back(utf8::decode(s));
    t.sort_by_length();
    return t;
  }

  static AffixTable load(std::istream& in) {
    AffixTable t;
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::u32string>* section = nullptr;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      // trim ASCII whitespace
      const auto b = line.find_first_not_of(" \t");
      if (b == std::string::npos) continue;
      const auto e = line.find_last_not_of(" \t");
      const std::string item = line.substr(b, e - b + 1);
      if (item == "[prefix]") {
        section = &t.prefixes;
      } else if (item == "[suffix]") {
        section = &t.suffixes;
      } else if (item[0] == '#') {
        continue;
      } else if (!section) {
        throw ParseError("affix before [prefix]/[suffix] section", lineno);
      } else {
        section->push_back(utf8::decode(item));
      }
    }
    t.sort_by_length();
    return t;
  }

  void sort_by_length() {
    auto longer = [](const std::u32string& a, const std::u32string& b) {
      return a.size() != b.size() ? a.size() > b.size() : a < b;
    };
    std::sort(prefixes.begin(), prefixes.end(), longer);
    std::sort(suffixes.begin(), suffixes.end(), longer);
  }

  // One-line encoding for model files; affixes never contain spaces.
  std::string to_line() const {
    std::string s = "prefixes";
    for (const auto& p : prefixes) s += ' ' + utf8::encode(p);
    s += " suffixes";
    for (const auto& x : suffixes) s += ' ' + utf8::encode(x);
    return s;
  }

  static AffixTable from_line(const std::string& line) {
    AffixTable t;
    std::vector<std::u32string>* section = nullptr;
    std::string item;
    std::istringstream in(line);
    while (in >> item) {
      if (item == "prefixes") section = &t.prefixes;
      else if (item == "suffixes") section = &t.suffixes;
      else if (section) section->push_back(utf8::decode(item));
    }
    t.sort_by_length();
    return t;
  }
};

inline const AffixTable& default_affixes() {
  static const AffixTable table = AffixTable::stemmer_defaults();
  return table;
}

// Transparent affix stripping: repeatedly removes the longest matching
// prefix, then the longest matching suffix, never leaving fewer than two
// characters. Tokens without Arabic letters are returned unchanged. The
// result is always a contiguous substring of the input.
inline std::string light_stem(std::string_view token,
                              const AffixTable& affixes = default_affixes()) {
  std::u32string w = utf8::decode(token);
  const bool has_arabic = std::any_of(w.begin(), w.end(), uni::is_arabic_letter);
  if (!has_arabic) return std::string(token);

  std::size_t begin = 0, end = w.size();
  auto remaining = [&] { return end - begin; };
  bool stripped = true;
  while (stripped) {
    stripped = false;
    for (const auto& p : affixes.prefixes) {
      if (p.size() < remaining() && remaining() - p.size() >= 2 &&
          w.compare(begin, p.size(), p) == 0) {
        begin += p.size();
        stripped = true;
        break;
      }
    }
  }
  stripped = true;
  while (stripped) {
    stripped = false;
    for (const auto& s : affixes.suffixes) {
      if (s.size() < remaining() && remaining() - s.size() >= 2 &&
          w.compare(end - s.size(), s.size(), s) == 0) {
        end -= s.size();
        stripped = true;
        break;
      }
    }
  }
  return utf8::encode(std::u32string_view(w).substr(begin, end - begin));
}

// Whitespace tokenization with punctuation split into single-character
// tokens.
inline std::vector<std::string> tokenize(std::string_view sentence) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t i = 0;
  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(current);
      current.clear();
    }
  };
  while (i < sentence.size()) {
    const char32_t c = utf8::decode_one(sentence, i);
    if (uni::is_space(c)) {
      flush();
    } else if (uni::is_punct(c)) {
      flush();
      tokens.push_back(utf8::encode(c));
    } else {
      utf8::append(current, c);
    }
  }
  flush();
  return tokens;
}

}  // namespace cskit
