#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "cskit/corpus.hpp"
#include "cskit/error.hpp"
#include "cskit/seglid.hpp"

namespace cskit {

struct ClassCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

struct ConfusionMatrix {
  std::map<std::string, ClassCounts> per_class;
  std::size_t total = 0;
};

// 0/0 resolves to 0 by convention (needed for the degenerate all-O cases).
inline double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

inline double f1_score(double p, double r) {
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

struct ClassMetrics {
  std::size_t tp = 0, fp = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};

struct MetricsReport {
  double accuracy = 0.0;
  double precision = 0.0;  // micro over the positive classes
  double recall = 0.0;
  double f1 = 0.0;
  std::map<std::string, ClassMetrics> per_class;
};

// One-vs-rest confusion counts per class.
inline ConfusionMatrix confusion(const std::vector<std::string>& gold,
                                 const std::vector<std::string>& pred) {
  if (gold.size() != pred.size())
    throw ValidationError("confusion: length mismatch");
  ConfusionMatrix cm;
  cm.total = gold.size();
  std::map<std::string, bool> classes;
  for (const auto& g : gold) classes[g] = true;
  for (const auto& p : pred) classes[p] = true;
  for (const auto& [cls, _] : classes) {
    ClassCounts& c = cm.per_class[cls];
    for (std::size_t i = 0; i < gold.size(); ++i) {
      const bool g = gold[i] == cls, p = pred[i] == cls;
      if (g && p) ++c.tp;
      else if (!g && p) ++c.fp;
      else if (g && !p) ++c.fn;
      else ++c.tn;
    }
  }
  return cm;
}

// Token-level accuracy over all positions plus micro P/R/F1 over the non-O
// classes.
inline MetricsReport token_metrics(const std::vector<std::string>& gold,
                                   const std::vector<std::string>& pred) {
  if (gold.size() != pred.size())
    throw ValidationError("token_metrics: length mismatch");
  MetricsReport report;
  std::size_t correct = 0, tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] == pred[i]) ++correct;
    const bool gold_pos = gold[i] != "O";
    const bool pred_pos = pred[i] != "O";
    if (pred_pos && pred[i] == gold[i]) {
      ++tp;
      ++report.per_class[pred[i]].tp;
    } else {
      if (pred_pos) {
        ++fp;
        ++report.per_class[pred[i]].fp;
      }
      if (gold_pos) {
        ++fn;
        ++report.per_class[gold[i]].fn;
      }
    }
  }
  report.accuracy = safe_div(static_cast<double>(correct),
                             static_cast<double>(gold.size()));
  report.precision = safe_div(static_cast<double>(tp), static_cast<double>(tp + fp));
  report.recall = safe_div(static_cast<double>(tp), static_cast<double>(tp + fn));
  report.f1 = f1_score(report.precision, report.recall);
  for (auto& [cls, c] : report.per_class) {
    c.precision = safe_div(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fp));
    c.recall = safe_div(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn));
    c.f1 = f1_score(c.precision, c.recall);
  }
  return report;
}

namespace eval_detail {

struct Span {
  std::size_t sentence, begin, end;  // [begin, end)
  std::string type;

  bool operator==(const Span&) const = default;
  bool operator<(const Span& o) const {
    return std::tie(sentence, begin, end, type) <
           std::tie(o.sentence, o.begin, o.end, o.type);
  }
};

// Maximal IOB spans. Following conlleval, an I-X that does not continue an
// entity of the same type starts a new one.
inline std::vector<Span> extract_spans(const std::vector<std::string>& tags,
                                       std::size_t sentence) {
  std::vector<Span> spans;
  std::string open_type;
  std::size_t open_begin = 0;
  auto close = [&](std::size_t end) {
    if (!open_type.empty()) spans.push_back({sentence, open_begin, end, open_type});
    open_type.clear();
  };
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const std::string& t = tags[i];
    if (t == "O" || t.size() < 3) {
      close(i);
      continue;
    }
    const std::string type = t.substr(2);
    if (t[0] == 'B' || open_type != type) {
      close(i);
      open_type = type;
      open_begin = i;
    }
  }
  close(tags.size());
  return spans;
}

}  // namespace eval_detail

// CoNLL exact-match entity F1: an entity counts only when both boundaries
// and type match a gold entity; every gold entity is matched at most once.
inline MetricsReport entity_f1_conll(
    const NerCorpus& gold, const std::vector<std::vector<std::string>>& pred) {
  if (gold.size() != pred.size())
    throw ValidationError("entity_f1_conll: corpus size mismatch");
  std::vector<eval_detail::Span> gold_spans, pred_spans;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].tokens.size() != pred[s].size())
      throw ValidationError("entity_f1_conll: sentence " + std::to_string(s) +
                            " length mismatch");
    std::vector<std::string> gt;
    for (const Token& t : gold[s].tokens) gt.push_back(t.tag);
    auto gs = eval_detail::extract_spans(gt, s);
    auto ps = eval_detail::extract_spans(pred[s], s);
    gold_spans.insert(gold_spans.end(), gs.begin(), gs.end());
    pred_spans.insert(pred_spans.end(), ps.begin(), ps.end());
  }

  std::set<eval_detail::Span> unmatched(gold_spans.begin(), gold_spans.end());
  MetricsReport report;
  std::size_t tp = 0;
  for (const auto& span : pred_spans) {
    const auto it = unmatched.find(span);
    if (it != unmatched.end()) {
      unmatched.erase(it);
      ++tp;
      ++report.per_class[span.type].tp;
    } else {
      ++report.per_class[span.type].fp;
    }
  }
  for (const auto& span : unmatched) ++report.per_class[span.type].fn;

  const std::size_t fp = pred_spans.size() - tp;
  const std::size_t fn = gold_spans.size() - tp;
  report.precision = safe_div(static_cast<double>(tp), static_cast<double>(tp + fp));
  report.recall = safe_div(static_cast<double>(tp), static_cast<double>(tp + fn));
  report.f1 = f1_score(report.precision, report.recall);
  std::size_t total_tokens = 0, correct_tokens = 0;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    for (std::size_t i = 0; i < pred[s].size(); ++i) {
      ++total_tokens;
      if (gold[s].tokens[i].tag == pred[s][i]) ++correct_tokens;
    }
  }
  report.accuracy = safe_div(static_cast<double>(correct_tokens),
                             static_cast<double>(total_tokens));
  for (auto& [cls, c] : report.per_class) {
    c.precision = safe_div(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fp));
    c.recall = safe_div(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn));
    c.f1 = f1_score(c.precision, c.recall);
  }
  return report;
}

// LID metric suite. Tag correctness is all-or-nothing over the full labeled
// segmentation (labels and lengths); seg_f1 scores segment boundaries
// ignoring labels; char_acc compares per-character label expansions. The
// mixed_* variants restrict to tokens whose GOLD record has two or more
// segments and are absent when no such token exists.
struct SegMetricsReport {
  double tag_f1 = 0.0;
  double accuracy = 0.0;
  double seg_f1 = 0.0;
  double char_acc = 0.0;
  std::optional<double> mixed_tag_f1;
  std::optional<double> mixed_seg_f1;
  std::optional<double> mixed_acc;
  std::optional<double> mixed_char_acc;
  std::size_t tokens = 0;
  std::size_t mixed_tokens = 0;
};

namespace eval_detail {

struct SegTally {
  std::size_t tokens = 0, correct = 0;
  std::size_t span_tp = 0, span_gold = 0, span_pred = 0;
  std::size_t chars = 0, chars_correct = 0;

  void add(const SegLidRecord& gold, const SegLidRecord& pred) {
    ++tokens;
    if (gold.segments == pred.segments) ++correct;
    std::set<std::pair<std::size_t, std::size_t>> gold_bounds;
    std::size_t pos = 0;
    for (const Segment& s : gold.segments) {
      gold_bounds.insert({pos, pos + s.length});
      pos += s.length;
    }
    span_gold += gold.segments.size();
    span_pred += pred.segments.size();
    pos = 0;
    for (const Segment& s : pred.segments) {
      if (gold_bounds.count({pos, pos + s.length})) ++span_tp;
      pos += s.length;
    }
    const auto gtags = expand_char_tags(gold);
    const auto ptags = expand_char_tags(pred);
    chars += gtags.size();
    for (std::size_t i = 0; i < gtags.size() && i < ptags.size(); ++i)
      if (gtags[i] == ptags[i]) ++chars_correct;
  }

  double acc() const {
    return safe_div(static_cast<double>(correct), static_cast<double>(tokens));
  }
  double seg_f1() const {
    const double p = safe_div(static_cast<double>(span_tp),
                              static_cast<double>(span_pred));
    const double r = safe_div(static_cast<double>(span_tp),
                              static_cast<double>(span_gold));
    return f1_score(p, r);
  }
  double char_acc() const {
    return safe_div(static_cast<double>(chars_correct),
                    static_cast<double>(chars));
  }
};

}  // namespace eval_detail

inline SegMetricsReport seg_metrics(const std::vector<SegLidRecord>& gold,
                                    const std::vector<SegLidRecord>& pred) {
  if (gold.size() != pred.size())
    throw ValidationError("seg_metrics: token stream size mismatch");
  eval_detail::SegTally all, mixed;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i].token != pred[i].token)
      throw ValidationError("seg_metrics: surface mismatch at position " +
                            std::to_string(i) + " ('" + gold[i].token +
                            "' vs '" + pred[i].token + "')");
    all.add(gold[i], pred[i]);
    if (gold[i].segments.size() >= 2) mixed.add(gold[i], pred[i]);
  }
  SegMetricsReport report;
  report.tokens = all.tokens;
  report.mixed_tokens = mixed.tokens;
  report.accuracy = all.acc();
  // With one prediction per token, micro P = R = exact-match accuracy; both
  // fields are kept so reports stay comparable with the usual metric tables.
  report.tag_f1 = all.acc();
  report.seg_f1 = all.seg_f1();
  report.char_acc = all.char_acc();
  if (mixed.tokens > 0) {
    report.mixed_acc = mixed.acc();
    report.mixed_tag_f1 = mixed.acc();
    report.mixed_seg_f1 = mixed.seg_f1();
    report.mixed_char_acc = mixed.char_acc();
  }
  return report;
}

// Flattens a seglid corpus for evaluation.
inline std::vector<SegLidRecord> flatten(const SegLidCorpus& corpus) {
  std::vector<SegLidRecord> records;
  for (const SegLidSentence& s : corpus)
    records.insert(records.end(), s.begin(), s.end());
  return records;
}

}  // namespace cskit
