#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "cskit/corpus.hpp"
#include "cskit/embedding.hpp"
#include "cskit/error.hpp"
#include "cskit/rng.hpp"
#include "cskit/textproc.hpp"

namespace cskit {

// ---------------------------------------------------------------------------
// Synonym lexicon
// ---------------------------------------------------------------------------

// Per-language synonym map. File format: `[lang=ar]` / `[lang=en]` section
// headers, then `word<TAB>syn1,syn2,...` lines. Lookups strip diacritics and
// fall back to the light stem, mirroring how the source lexica were matched.
class SynonymLexicon {
 public:
  void add(Script lang, const std::string& word,
           const std::vector<std::string>& synonyms) {
    auto& list = table_[lang][strip_diacritics(word)];
    for (const std::string& s : synonyms) {
      const std::string clean = strip_diacritics(s);
      if (clean == strip_diacritics(word)) continue;  // no self-synonyms
      if (std::find(list.begin(), list.end(), clean) == list.end())
        list.push_back(clean);
    }
  }

  static SynonymLexicon load(std::istream& in) {
    SynonymLexicon lex;
    std::string line;
    std::size_t lineno = 0;
    std::optional<Script> lang;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      if (line == "[lang=ar]") {
        lang = Script::Arabic;
        continue;
      }
      if (line == "[lang=en]") {
        lang = Script::Latin;
        continue;
      }
      if (!lang) throw ParseError("entry before [lang=..] header", lineno);
      const auto tab = line.find('\t');
      if (tab == std::string::npos)
        throw ParseError("expected word<TAB>synonyms", lineno);
      const std::string word = line.substr(0, tab);
      std::vector<std::string> syns;
      std::string item;
      std::istringstream rest(line.substr(tab + 1));
      while (std::getline(rest, item, ','))
        if (!item.empty()) syns.push_back(item);
      lex.add(word, syns, lineno);
    }
    return lex;
  }

  // Synonyms for a word of the given script; empty when unknown. Exact
  // diacritic-free match first, then the light stem.
  std::vector<std::string> lookup(const std::string& word, Script lang) const {
    const auto lt = table_.find(lang);
    if (lt == table_.end()) return {};
    const std::string clean = strip_diacritics(word);
    auto it = lt->second.find(clean);
    if (it != lt->second.end()) return it->second;
    it = lt->second.find(light_stem(clean));
    if (it != lt->second.end()) return it->second;
    return {};
  }

 private:
  void add(const std::string& word, const std::vector<std::string>& syns,
           std::size_t lineno) {
    Script s = Script::Latin;
    try {
      s = detect_script(word);
    } catch (const ValidationError&) {
      throw ParseError("empty lexicon word", lineno);
    }
    add(s == Script::Arabic ? Script::Arabic : Script::Latin, word, syns);
  }

  std::map<Script, std::unordered_map<std::string, std::vector<std::string>>>
      table_;
};

// ---------------------------------------------------------------------------
// Machine-translation client
// ---------------------------------------------------------------------------

class MtClient {
 public:
  virtual ~MtClient() = default;
  // Translation errors must surface as exceptions, never be dropped.
  virtual std::string translate(const std::string& text, const std::string& src,
                                const std::string& tgt) const = 0;
};

// File-backed dictionary stub for offline runs and tests. Format: `[src-tgt]`
// section headers, then `text<TAB>translation` lines. Lookup tries the whole
// text, then token-by-token; unknown tokens pass through unchanged.
class DictMtClient final : public MtClient {
 public:
  DictMtClient() = default;

  static DictMtClient load(std::istream& in) {
    DictMtClient client;
    std::string line, pair;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      if (line.front() == '[' && line.back() == ']') {
        pair = line.substr(1, line.size() - 2);
        continue;
      }
      if (pair.empty()) throw ParseError("entry before [src-tgt] header", lineno);
      const auto tab = line.find('\t');
      if (tab == std::string::npos)
        throw ParseError("expected text<TAB>translation", lineno);
      client.tables_[pair][line.substr(0, tab)] = line.substr(tab + 1);
    }
    return client;
  }

  void add(const std::string& src, const std::string& tgt,
           const std::string& text, const std::string& translation) {
    tables_[src + "-" + tgt][text] = translation;
  }

  std::string translate(const std::string& text, const std::string& src,
                        const std::string& tgt) const override {
    const auto table = tables_.find(src + "-" + tgt);
    if (table == tables_.end())
      throw ValidationError("mt dictionary has no section [" + src + "-" + tgt +
                            "]");
    const auto whole = table->second.find(text);
    if (whole != table->second.end()) return whole->second;
    std::string out;
    for (const std::string& tok : tokenize(text)) {
      if (!out.empty()) out += ' ';
      const auto it = table->second.find(tok);
      out += it != table->second.end() ? it->second : tok;
    }
    return out;
  }

 private:
  std::map<std::string, std::unordered_map<std::string, std::string>> tables_;
};

// Arabic function words that statistically precede a code-switch point,
// with their switch percentages.
struct TriggerTable {
  std::vector<std::pair<std::string, double>> entries;

  static TriggerTable defaults() {
    TriggerTable t;
    t.entries = {{"ال", 31.0}, {"el", 31.0}, {"في", 4.8},
                 {"و", 3.4},   {"يعني", 1.5}, {"هو", 1.3}};
    return t;
  }

  std::optional<double> weight(const std::string& word) const {
    for (const auto& [w, p] : entries)
      if (w == word) return p;
    return std::nullopt;
  }
};

// Entity surfaces harvested per type; the donor pool for analogy
// substitution.
struct EntityTypeLists {
  std::map<std::string, std::vector<std::string>> by_type;

  static EntityTypeLists harvest(const NerCorpus& corpus) {
    EntityTypeLists lists;
    std::map<std::string, std::set<std::string>> seen;
    for (const LabeledSentence& s : corpus) {
      for (const Token& t : s.tokens) {
        if (t.tag == "O") continue;
        const std::string type = t.tag.substr(2);
        if (seen[type].insert(t.surface).second)
          lists.by_type[type].push_back(t.surface);
      }
    }
    return lists;
  }
};

// ---------------------------------------------------------------------------
// Modified EDA
// ---------------------------------------------------------------------------

enum class EdaOp { SR, RI, RS, RD };

struct EdaConfig {
  double alpha = 0.1;              // fraction of words edited per variant
  int num_aug = 4;                 // variants per sentence
  std::vector<EdaOp> ops = {EdaOp::SR, EdaOp::RI, EdaOp::RS, EdaOp::RD};
  double rd_prob = 0.1;
  std::uint64_t seed = 0;
};

namespace aug_detail {

inline int edit_budget(double alpha, std::size_t sentence_len) {
  const double n = alpha * static_cast<double>(sentence_len);
  const int rounded = static_cast<int>(n + 0.5);
  return std::max(1, rounded);
}

inline bool is_entity(const Token& t) { return t.tag != "O"; }

// Candidate synonyms ranked by cosine to the original (descending, then
// lexicographic). Synonyms missing from the table rank below embedded ones.
inline std::vector<std::string> ranked_synonyms(const std::string& word,
                                                const SynonymLexicon& lex,
                                                const EmbeddingTable& emb) {
  Script s;
  try {
    s = detect_script(word);
  } catch (const ValidationError&) {
    return {};
  }
  if (s == Script::Mixed) s = Script::Arabic;
  std::vector<std::string> syns =
      lex.lookup(word, s == Script::Arabic ? Script::Arabic : Script::Latin);
  std::vector<std::pair<double, std::string>> scored;
  for (const std::string& syn : syns) {
    double cos = -2.0;  // below any real cosine
    if (emb.contains(word) && emb.contains(syn)) {
      try {
        cos = emb.cosine(word, syn);
      } catch (const ValidationError&) {
        cos = -2.0;  // zero vector
      }
    }
    scored.emplace_back(cos, syn);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<std::string> out;
  for (auto& [cos, syn] : scored) out.push_back(std::move(syn));
  return out;
}

}  // namespace aug_detail

// Modified EDA: emits exactly num_aug variants, distributed over the enabled
// ops in order (remainder to earlier ops). Entity tokens are exempt from
// deletion; swaps move tags with their tokens. SR picks the synonym with the
// highest embedding cosine and steps down the ranking when the same word is
// replaced again. Edits that find no synonym are skipped, never fatal.
inline std::vector<LabeledSentence> eda_augment(const LabeledSentence& sentence,
                                                const EdaConfig& cfg,
                                                const SynonymLexicon& lex,
                                                const EmbeddingTable& emb) {
  if (sentence.tokens.empty())
    throw ValidationError("eda_augment: empty sentence");
  if (cfg.ops.empty()) throw ValidationError("eda_augment: no ops enabled");
  if (cfg.num_aug < 1) throw ValidationError("eda_augment: num_aug must be >= 1");
  if (cfg.alpha <= 0.0 || cfg.alpha > 1.0)
    throw ValidationError("eda_augment: alpha must be in (0,1]");

  std::mt19937_64 gen(cfg.seed);
  const int per_op = cfg.num_aug / static_cast<int>(cfg.ops.size());
  const int remainder = cfg.num_aug % static_cast<int>(cfg.ops.size());

  std::vector<LabeledSentence> variants;
  for (std::size_t op_idx = 0; op_idx < cfg.ops.size(); ++op_idx) {
    const int repeats = per_op + (static_cast<int>(op_idx) < remainder ? 1 : 0);
    for (int rep = 0; rep < repeats; ++rep) {
      LabeledSentence v = sentence;
      const int budget = aug_detail::edit_budget(cfg.alpha, sentence.tokens.size());
      switch (cfg.ops[op_idx]) {
        case EdaOp::SR: {
          std::map<std::string, std::size_t> used;  // word -> next rank
          for (int e = 0; e < budget; ++e) {
            std::vector<std::size_t> eligible;
            for (std::size_t i = 0; i < v.tokens.size(); ++i)
              if (!aug_detail::is_entity(v.tokens[i])) eligible.push_back(i);
            if (eligible.empty()) break;
            const std::size_t pos = eligible[next_index(gen, eligible.size())];
            const std::string original = sentence.tokens[pos].surface;
            const auto ranked = aug_detail::ranked_synonyms(original, lex, emb);
            if (ranked.empty()) continue;  // no synonyms: skip this edit
            const std::size_t rank = std::min(used[original], ranked.size() - 1);
            ++used[original];
            v.tokens[pos].surface = ranked[rank];
          }
          break;
        }
        case EdaOp::RI: {
          for (int e = 0; e < budget; ++e) {
            std::vector<std::size_t> sources;
            for (std::size_t i = 0; i < v.tokens.size(); ++i)
              if (!aug_detail::is_entity(v.tokens[i])) sources.push_back(i);
            if (sources.empty()) break;
            const std::size_t src = sources[next_index(gen, sources.size())];
            const auto ranked =
                aug_detail::ranked_synonyms(v.tokens[src].surface, lex, emb);
            if (ranked.empty()) continue;
            const std::string& syn = ranked[next_index(gen, ranked.size())];
            // Insertion points outside entity spans keep the IOB chain intact.
            std::vector<std::size_t> slots;
            for (std::size_t p = 0; p <= v.tokens.size(); ++p) {
              const bool inside = p > 0 && p < v.tokens.size() &&
                                  v.tokens[p].tag.size() > 1 &&
                                  v.tokens[p].tag[0] == 'I';
              if (!inside) slots.push_back(p);
            }
            const std::size_t at = slots[next_index(gen, slots.size())];
            v.tokens.insert(v.tokens.begin() + static_cast<std::ptrdiff_t>(at),
                            Token{syn, std::nullopt, "O"});
          }
          break;
        }
        case EdaOp::RS: {
          if (v.tokens.size() >= 2) {
            for (int e = 0; e < budget; ++e) {
              const std::size_t a = next_index(gen, v.tokens.size());
              const std::size_t b = next_index(gen, v.tokens.size());
              std::swap(v.tokens[a], v.tokens[b]);  // tags travel with tokens
            }
            repair_iob(v);
          }
          break;
        }
        case EdaOp::RD: {
          LabeledSentence kept;
          for (const Token& t : v.tokens) {
            const bool deletable = !aug_detail::is_entity(t);
            if (deletable && next_unit(gen) < cfg.rd_prob) continue;
            kept.tokens.push_back(t);
          }
          if (kept.tokens.empty())
            kept.tokens.push_back(v.tokens[next_index(gen, v.tokens.size())]);
          v = std::move(kept);
          repair_iob(v);
          break;
        }
      }
      variants.push_back(std::move(v));
    }
  }
  return variants;
}

// ---------------------------------------------------------------------------
// Word-embedding substitution
// ---------------------------------------------------------------------------

struct SubstitutionNote {
  std::size_t position;
  std::string message;
};

// Replaces every entity token e of type T by analogy(a, b, e), with a and b
// distinct seeded draws from the harvested list of T (same script as e).
// Non-entities are untouched; tags stay in place. Entities whose list has
// fewer than two usable donors are left unchanged with a warning.
inline LabeledSentence analogies_we_sub(const LabeledSentence& sentence,
                                        const EntityTypeLists& lists,
                                        const EmbeddingTable& emb,
                                        std::uint64_t seed,
                                        std::vector<SubstitutionNote>* notes =
                                            nullptr) {
  std::mt19937_64 gen(seed);
  LabeledSentence out = sentence;
  for (std::size_t i = 0; i < out.tokens.size(); ++i) {
    Token& tok = out.tokens[i];
    if (!aug_detail::is_entity(tok)) continue;
    const std::string type = tok.tag.substr(2);
    auto warn = [&](const std::string& msg) {
      if (notes) notes->push_back({i, msg});
    };
    const auto lt = lists.by_type.find(type);
    if (lt == lists.by_type.end()) {
      warn("no entity list for type " + type);
      continue;
    }
    Script script;
    try {
      script = detect_script(tok.surface);
    } catch (const ValidationError&) {
      continue;
    }
    std::vector<std::string> donors;
    for (const std::string& cand : lt->second) {
      if (cand == tok.surface) continue;
      try {
        if (detect_script(cand) == script && emb.contains(cand))
          donors.push_back(cand);
      } catch (const ValidationError&) {
      }
    }
    if (donors.size() < 2) {
      warn("fewer than 2 donors for type " + type);
      continue;
    }
    if (!emb.contains(tok.surface)) {
      warn("entity '" + tok.surface + "' not in embedding table");
      continue;
    }
    const std::size_t ai = next_index(gen, donors.size());
    std::size_t bi = next_index(gen, donors.size() - 1);
    if (bi >= ai) ++bi;  // distinct draws
    try {
      tok.surface = emb.analogy(donors[ai], donors[bi], tok.surface);
    } catch (const ValidationError& e) {
      warn(e.what());
    }
  }
  return out;
}

// Entity substitution as above, plus every in-vocabulary non-entity replaced
// by its rank-n nearest neighbor (the deepest available when fewer exist).
inline LabeledSentence full_we_sub(const LabeledSentence& sentence,
                                   const EntityTypeLists& lists,
                                   const EmbeddingTable& emb, std::size_t n,
                                   std::uint64_t seed,
                                   std::vector<SubstitutionNote>* notes =
                                       nullptr) {
  if (n < 1) throw ValidationError("full_we_sub: n must be >= 1");
  LabeledSentence out = analogies_we_sub(sentence, lists, emb, seed, notes);
  for (std::size_t i = 0; i < out.tokens.size(); ++i) {
    Token& tok = out.tokens[i];
    if (aug_detail::is_entity(tok)) continue;
    if (!emb.contains(tok.surface)) {
      if (notes) notes->push_back({i, "'" + tok.surface + "' not in table"});
      continue;
    }
    try {
      const auto neighbors = emb.nearest(tok.surface, n, {});
      if (!neighbors.empty()) tok.surface = neighbors.back().first;
    } catch (const ValidationError& e) {
      if (notes) notes->push_back({i, e.what()});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Back-translation with code-switch re-injection
// ---------------------------------------------------------------------------

struct BackTranslateConfig {
  std::vector<std::string> chain = {"ar", "fr", "ar"};  // must start/end at ar
  TriggerTable triggers = TriggerTable::defaults();
  std::uint64_t seed = 0;
};

// Paraphrases a code-switched sentence while preserving the number of
// code-switched (Latin-script) tokens exactly:
//   1. every Latin token is translated into Arabic in place,
//   2. the full sentence traverses the chain (ar->fr->ar or ar->fr->de->ar),
//   3. exactly k tokens of the result are translated to English, preferring
//      tokens right after trigger words (sampled by trigger weight), then
//      seeded-random content tokens.
// Tags are not handled here; reattach them with project_tags.
inline std::vector<std::string> back_translate(
    const std::vector<std::string>& tokens, const MtClient& mt,
    const BackTranslateConfig& cfg = {}) {
  if (cfg.chain.size() < 2 || cfg.chain.front() != "ar" || cfg.chain.back() != "ar")
    throw ValidationError("back_translate: chain must start and end at Arabic");

  std::mt19937_64 gen(cfg.seed);
  auto script_of = [](const std::string& tok) -> Script {
    try {
      return detect_script(tok);
    } catch (const ValidationError&) {
      return Script::Other;
    }
  };

  // 1. count and localize the code-switched tokens
  std::size_t k = 0;
  std::vector<std::string> arabicized;
  for (const std::string& tok : tokens) {
    if (script_of(tok) == Script::Latin) {
      ++k;
      arabicized.push_back(mt.translate(tok, "en", "ar"));
    } else {
      arabicized.push_back(tok);
    }
  }

  // 2. traverse the chain sentence-wise
  std::string text;
  for (const std::string& tok : arabicized) {
    if (!text.empty()) text += ' ';
    text += tok;
  }
  for (std::size_t leg = 0; leg + 1 < cfg.chain.size(); ++leg)
    text = mt.translate(text, cfg.chain[leg], cfg.chain[leg + 1]);
  std::vector<std::string> result = tokenize(text);
  if (result.empty() || k == 0) return result;

  // 3. re-inject exactly k switches
  std::vector<bool> latin(result.size());
  std::size_t already_latin = 0;
  for (std::size_t i = 0; i < result.size(); ++i) {
    latin[i] = script_of(result[i]) == Script::Latin;
    if (latin[i]) ++already_latin;
  }
  // A surplus can only come from a translator that emitted Latin script;
  // fold the excess back into Arabic from the right.
  for (std::size_t i = result.size(); i-- > 0 && already_latin > k;) {
    if (latin[i]) {
      result[i] = mt.translate(result[i], "en", "ar");
      latin[i] = script_of(result[i]) == Script::Latin;
      if (!latin[i]) --already_latin;
    }
  }

  std::size_t needed = k - std::min(k, already_latin);
  std::set<std::size_t> chosen;
  // trigger-adjacent candidates, weighted by the trigger's switch percentage
  std::vector<std::size_t> trig_pos;
  std::vector<double> trig_w;
  for (std::size_t i = 1; i < result.size(); ++i) {
    if (latin[i]) continue;
    if (script_of(result[i]) != Script::Arabic) continue;
    if (const auto w = cfg.triggers.weight(result[i - 1])) {
      trig_pos.push_back(i);
      trig_w.push_back(*w);
    }
  }
  while (needed > 0 && !trig_pos.empty()) {
    const std::size_t pick = next_weighted_index(gen, trig_w);
    chosen.insert(trig_pos[pick]);
    trig_pos.erase(trig_pos.begin() + static_cast<std::ptrdiff_t>(pick));
    trig_w.erase(trig_w.begin() + static_cast<std::ptrdiff_t>(pick));
    --needed;
  }
  // shortfall: seeded-random content tokens (Arabic, not triggers themselves)
  std::vector<std::size_t> content;
  for (std::size_t i = 0; i < result.size(); ++i) {
    if (latin[i] || chosen.count(i)) continue;
    if (script_of(result[i]) != Script::Arabic) continue;
    if (cfg.triggers.weight(result[i])) continue;
    content.push_back(i);
  }
  while (needed > 0 && !content.empty()) {
    const std::size_t pick = next_index(gen, content.size());
    chosen.insert(content[pick]);
    content.erase(content.begin() + static_cast<std::ptrdiff_t>(pick));
    --needed;
  }
  // last resort: any remaining non-Latin token
  for (std::size_t i = 0; i < result.size() && needed > 0; ++i) {
    if (latin[i] || chosen.count(i)) continue;
    chosen.insert(i);
    --needed;
  }
  for (std::size_t i : chosen) result[i] = mt.translate(result[i], "ar", "en");
  return result;
}

// ---------------------------------------------------------------------------
// Tag projection and accounting
// ---------------------------------------------------------------------------

using FallbackTagger = std::function<std::string(const std::string&)>;

// Tags for an augmented surface sequence: the original tag when the surface
// was seen, else the fallback tagger, else O. The result is repaired to
// well-formed IOB (orphan I-X promoted to B-X).
inline LabeledSentence project_tags(
    const std::vector<std::string>& tokens,
    const std::map<std::string, std::string>& original_tags,
    const FallbackTagger& fallback = nullptr) {
  LabeledSentence out;
  for (const std::string& surface : tokens) {
    std::string tag = "O";
    const auto it = original_tags.find(surface);
    if (it != original_tags.end()) {
      tag = it->second;
    } else if (fallback) {
      tag = fallback(surface);
      if (!is_valid_tag(tag)) tag = "O";
    }
    out.tokens.push_back({surface, std::nullopt, tag});
  }
  repair_iob(out);
  return out;
}

inline std::map<std::string, std::string> tag_dictionary(const NerCorpus& corpus) {
  std::map<std::string, std::string> dict;
  for (const LabeledSentence& s : corpus)
    for (const Token& t : s.tokens)
      dict.emplace(t.surface, t.tag);  // first occurrence wins
  return dict;
}

struct IncreaseFactorRow {
  std::size_t before = 0;
  std::size_t after = 0;
  double factor = 0.0;
  bool defined = true;
};

// Per-type growth y with after = y * before, plus a Total row over the
// summed counts. A type with before == 0 and after > 0 is undefined.
inline std::map<std::string, IncreaseFactorRow> increase_factor(
    const std::map<std::string, std::size_t>& before,
    const std::map<std::string, std::size_t>& after) {
  std::map<std::string, IncreaseFactorRow> rows;
  std::set<std::string> types;
  for (const auto& [t, c] : before) types.insert(t);
  for (const auto& [t, c] : after) types.insert(t);
  std::size_t total_before = 0, total_after = 0;
  for (const std::string& type : types) {
    IncreaseFactorRow row;
    const auto b = before.find(type);
    const auto a = after.find(type);
    row.before = b == before.end() ? 0 : b->second;
    row.after = a == after.end() ? 0 : a->second;
    total_before += row.before;
    total_after += row.after;
    if (row.before == 0) {
      row.defined = false;
      row.factor = 0.0;
    } else {
      row.factor = static_cast<double>(row.after) / static_cast<double>(row.before);
    }
    rows[type] = row;
  }
  IncreaseFactorRow total;
  total.before = total_before;
  total.after = total_after;
  if (total_before == 0) {
    total.defined = false;
  } else {
    total.factor = static_cast<double>(total_after) /
                   static_cast<double>(total_before);
  }
  rows["Total"] = total;
  return rows;
}

// Entity-token counts per type, the operand of increase_factor.
inline std::map<std::string, std::size_t> entity_counts(const NerCorpus& corpus) {
  std::map<std::string, std::size_t> counts;
  for (const LabeledSentence& s : corpus)
    for (const Token& t : s.tokens)
      if (t.tag != "O") ++counts[t.tag.substr(2)];
  return counts;
}

}  // namespace cskit
