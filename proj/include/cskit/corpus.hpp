#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cskit/error.hpp"
#include "cskit/rng.hpp"
#include "cskit/utf8.hpp"

namespace cskit {

// ---------------------------------------------------------------------------
// CoNLL-IOB corpus (NER)
// ---------------------------------------------------------------------------

struct Token {
  std::string surface;
  std::optional<std::string> pos;  // supplied by an external tagger, if at all
  std::string tag;                 // "O" or "B-X"/"I-X"

  bool operator==(const Token&) const = default;
};

struct LabeledSentence {
  std::vector<Token> tokens;

  bool operator==(const LabeledSentence&) const = default;
};

using NerCorpus = std::vector<LabeledSentence>;

inline const std::set<std::string>& entity_types() {
  static const std::set<std::string> types = {"PER", "LOC", "ORG", "MISC"};
  return types;
}

inline bool is_valid_tag(std::string_view tag) {
  if (tag == "O") return true;
  if (tag.size() < 3 || (tag[0] != 'B' && tag[0] != 'I') || tag[1] != '-')
    return false;
  return entity_types().count(std::string(tag.substr(2))) > 0;
}

// Positions (0-based) where the IOB chain is ill-formed: an I-X that does
// not continue a B-X/I-X of the same type.
inline std::vector<std::size_t> iob_violations(const LabeledSentence& s) {
  std::vector<std::size_t> bad;
  std::string prev = "O";
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    const std::string& tag = s.tokens[i].tag;
    if (tag.size() > 1 && tag[0] == 'I') {
      const std::string type = tag.substr(2);
      const bool continues =
          prev.size() > 1 && (prev[0] == 'B' || prev[0] == 'I') &&
          prev.substr(2) == type;
      if (!continues) bad.push_back(i);
    }
    prev = tag;
  }
  return bad;
}

// Promotes orphan I-X tags to B-X in place.
inline void repair_iob(LabeledSentence& s) {
  for (std::size_t i : iob_violations(s)) s.tokens[i].tag[0] = 'B';
}

inline std::vector<std::string> split_columns(const std::string& line) {
  std::vector<std::string> cols;
  std::string cur;
  for (char c : line) {
    if (c == ' ' || c == '\t') {
      if (!cur.empty()) {
        cols.push_back(cur);
        cur.clear();
      }
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) cols.push_back(cur);
  return cols;
}

// One token per line as `surface [pos] tag`; blank line ends a sentence.
inline NerCorpus read_conll(std::istream& in) {
  NerCorpus corpus;
  LabeledSentence current;
  std::string line;
  std::size_t lineno = 0;
  std::size_t sentence_start = 1;
  auto finish = [&] {
    if (current.tokens.empty()) return;
    const auto bad = iob_violations(current);
    if (!bad.empty()) {
      std::ostringstream msg;
      msg << "ill-formed IOB in sentence starting at line " << sentence_start
          << "; offending token positions:";
      for (std::size_t p : bad) msg << ' ' << p;
      throw ValidationError(msg.str());
    }
    corpus.push_back(std::move(current));
    current = {};
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto cols = split_columns(line);
    if (cols.empty()) {
      finish();
      sentence_start = lineno + 1;
      continue;
    }
    Token tok;
    if (cols.size() == 2) {
      tok.surface = cols[0];
      tok.tag = cols[1];
    } else if (cols.size() == 3) {
      tok.surface = cols[0];
      tok.pos = cols[1];
      tok.tag = cols[2];
    } else {
      throw ParseError("expected 2 or 3 columns, found " +
                           std::to_string(cols.size()),
                       lineno);
    }
    if (!is_valid_tag(tok.tag))
      throw ParseError("unknown IOB tag '" + tok.tag + "'", lineno);
    current.tokens.push_back(std::move(tok));
  }
  finish();
  return corpus;
}

inline void write_conll(std::ostream& out, const NerCorpus& corpus) {
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (i) out << '\n';
    for (const Token& t : corpus[i].tokens) {
      out << t.surface;
      if (t.pos) out << ' ' << *t.pos;
      out << ' ' << t.tag << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Segmentation + LID corpus ("token ||| LABEL:len ..." records)
// ---------------------------------------------------------------------------

struct Segment {
  std::string label;
  std::size_t length = 0;  // in code points

  bool operator==(const Segment&) const = default;
};

struct SegLidRecord {
  std::string token;
  std::vector<Segment> segments;

  bool operator==(const SegLidRecord&) const = default;

  std::size_t char_count() const { return utf8::length(token); }

  // Hyphen-joined segment labels, e.g. "AR-EN".
  std::string pattern() const {
    std::string p;
    for (std::size_t i = 0; i < segments.size(); ++i) {
      if (i) p += '-';
      p += segments[i].label;
    }
    return p;
  }
};

using SegLidSentence = std::vector<SegLidRecord>;
using SegLidCorpus = std::vector<SegLidSentence>;

// The eighth class, MIXED, is the emergent multi-segment pattern and never
// appears as a segment label. NE is accepted so coarse-grained corpora
// round-trip through the same reader.
inline const std::set<std::string>& seglid_labels() {
  static const std::set<std::string> labels = {
      "AR", "EN", "LANG3", "AMBIG", "NE.AR", "NE.EN", "OTHER", "NE"};
  return labels;
}

inline void validate_record(const SegLidRecord& rec,
                            const std::set<std::string>& labels,
                            std::size_t lineno) {
  if (rec.segments.empty())
    throw ParseError("record '" + rec.token + "' has no segments", lineno);
  std::size_t total = 0;
  for (const Segment& s : rec.segments) {
    if (!labels.count(s.label))
      throw ParseError("unknown label '" + s.label + "' on token '" +
                           rec.token + "'",
                       lineno);
    if (s.length == 0)
      throw ParseError("segment of token '" + rec.token +
                           "' is missing its length",
                       lineno);
    total += s.length;
  }
  if (total != rec.char_count()) {
    throw ParseError("segment lengths of token '" + rec.token + "' sum to " +
                         std::to_string(total) + ", expected " +
                         std::to_string(rec.char_count()),
                     lineno);
  }
}

namespace detail {

// Parses "LABEL" or "LABEL:len" into (label, len); len 0 means "whole token".
inline bool parse_segment_spec(const std::string& item,
                               const std::set<std::string>& labels,
                               Segment& out) {
  const auto colon = item.rfind(':');
  if (colon == std::string::npos) {
    if (!labels.count(item)) return false;
    out = {item, 0};
    return true;
  }
  const std::string label = item.substr(0, colon);
  const std::string len = item.substr(colon + 1);
  if (!labels.count(label) || len.empty()) return false;
  std::size_t value = 0;
  for (char c : len) {
    if (c < '0' || c > '9') return false;
    value = value * 10 + static_cast<std::size_t>(c - '0');
  }
  if (value == 0) return false;
  out = {label, value};
  return true;
}

}  // namespace detail

// One sentence per line; records are `token ||| LABEL:len [LABEL:len ...]`
// with a bare `token ||| LABEL` covering the whole token.
inline SegLidCorpus read_seglid(
    std::istream& in, const std::set<std::string>& labels = seglid_labels()) {
  SegLidCorpus corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto items = split_columns(line);
    if (items.empty()) continue;
    SegLidSentence sentence;
    std::size_t i = 0;
    while (i < items.size()) {
      SegLidRecord rec;
      rec.token = items[i];
      if (i + 1 >= items.size() || items[i + 1] != "|||")
        throw ParseError("expected '|||' after token '" + rec.token + "'",
                         lineno);
      std::size_t j = i + 2;
      while (j < items.size()) {
        // A following "|||" marks the start of the next record.
        if (j + 1 < items.size() && items[j + 1] == "|||") break;
        Segment seg;
        if (!detail::parse_segment_spec(items[j], labels, seg)) break;
        rec.segments.push_back(seg);
        ++j;
      }
      if (rec.segments.empty())
        throw ParseError("token '" + rec.token + "' has no label", lineno);
      if (rec.segments.size() == 1 && rec.segments[0].length == 0)
        rec.segments[0].length = rec.char_count();
      validate_record(rec, labels, lineno);
      sentence.push_back(std::move(rec));
      i = j;
    }
    corpus.push_back(std::move(sentence));
  }
  return corpus;
}

// Canonical form: single whole-token segments are written as a bare label.
inline void write_seglid(std::ostream& out, const SegLidCorpus& corpus) {
  for (const SegLidSentence& sentence : corpus) {
    bool first = true;
    for (const SegLidRecord& rec : sentence) {
      if (!first) out << ' ';
      first = false;
      out << rec.token << " |||";
      if (rec.segments.size() == 1) {
        out << ' ' << rec.segments[0].label;
      } else {
        for (const Segment& s : rec.segments)
          out << ' ' << s.label << ':' << s.length;
      }
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Pooling, splitting, statistics
// ---------------------------------------------------------------------------

// Concatenates corpora, preserving within-corpus order. All inputs must use
// one tag scheme; for NER that is the CoNLL IOB scheme.
inline NerCorpus pool_corpora(const std::vector<NerCorpus>& corpora) {
  NerCorpus pooled;
  for (const NerCorpus& c : corpora) {
    for (const LabeledSentence& s : c) {
      for (const Token& t : s.tokens) {
        if (!is_valid_tag(t.tag))
          throw ValidationError("tag scheme clash: unknown tag '" + t.tag +
                                "'");
      }
      pooled.push_back(s);
    }
  }
  return pooled;
}

inline SegLidCorpus pool_corpora(const std::vector<SegLidCorpus>& corpora) {
  SegLidCorpus pooled;
  for (const SegLidCorpus& c : corpora) {
    for (const SegLidSentence& s : c) {
      for (const SegLidRecord& r : s) {
        for (const Segment& seg : r.segments) {
          if (!seglid_labels().count(seg.label))
            throw ValidationError("tag scheme clash: unknown label '" +
                                  seg.label + "'");
        }
      }
      pooled.push_back(s);
    }
  }
  return pooled;
}

template <class Corpus>
struct SplitResult {
  Corpus train, val, test;
};

// Seeded shuffle + largest-remainder partition; exact and disjoint.
template <class Corpus>
SplitResult<Corpus> split(const Corpus& corpus, double train_frac,
                          double val_frac, double test_frac,
                          std::uint64_t seed) {
  const double sum = train_frac + val_frac + test_frac;
  if (train_frac <= 0 || val_frac <= 0 || test_frac <= 0 ||
      std::abs(sum - 1.0) > 1e-9) {
    throw ValidationError("split fractions must be positive and sum to 1");
  }
  const std::size_t n = corpus.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 gen(seed);
  shuffle(order, gen);

  const double fracs[3] = {train_frac, val_frac, test_frac};
  std::size_t counts[3];
  double rema[3];
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double exact = fracs[i] * static_cast<double>(n);
    counts[i] = static_cast<std::size_t>(exact);
    rema[i] = exact - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  while (assigned < n) {
    int best = 0;
    for (int i = 1; i < 3; ++i)
      if (rema[i] > rema[best]) best = i;
    ++counts[best];
    rema[best] = -1.0;
    ++assigned;
  }

  SplitResult<Corpus> result;
  std::size_t pos = 0;
  Corpus* parts[3] = {&result.train, &result.val, &result.test};
  for (int i = 0; i < 3; ++i) {
    for (std::size_t k = 0; k < counts[i]; ++k)
      parts[i]->push_back(corpus[order[pos++]]);
  }
  return result;
}

struct StatsReport {
  std::map<std::string, std::size_t> tag_tokens;   // MIXED groups multi-segment
  std::map<std::string, std::size_t> tag_unique;   // unique surfaces per tag
  std::map<std::string, std::size_t> pattern_tokens;  // "AR-EN" -> count
  std::size_t sentences = 0;
  std::size_t tokens = 0;
  double tokens_per_sentence = 0.0;
};

inline StatsReport corpus_stats(const SegLidCorpus& corpus) {
  StatsReport report;
  std::map<std::string, std::set<std::string>> unique;
  report.sentences = corpus.size();
  for (const SegLidSentence& sentence : corpus) {
    for (const SegLidRecord& rec : sentence) {
      ++report.tokens;
      const std::string key =
          rec.segments.size() > 1 ? "MIXED" : rec.segments[0].label;
      ++report.tag_tokens[key];
      unique[key].insert(rec.token);
      if (rec.segments.size() > 1) ++report.pattern_tokens[rec.pattern()];
    }
  }
  for (const auto& [tag, surfaces] : unique)
    report.tag_unique[tag] = surfaces.size();
  report.tokens_per_sentence =
      report.sentences
          ? static_cast<double>(report.tokens) / static_cast<double>(report.sentences)
          : 0.0;
  return report;
}

}  // namespace cskit
