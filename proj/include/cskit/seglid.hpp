#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "cskit/corpus.hpp"
#include "cskit/error.hpp"
#include "cskit/numeric.hpp"
#include "cskit/optimize.hpp"
#include "cskit/parallel.hpp"
#include "cskit/textproc.hpp"
#include "cskit/utf8.hpp"

namespace cskit {

// Longest token a segmental decoder will accept.
inline constexpr std::size_t kSegLidHardCap = 4096;

// Segment labels. MIXED is never a segment label; it is the emergent
// multi-segment pattern.
struct LidLabelSet {
  std::vector<std::string> labels;

  static LidLabelSet defaults() {
    return {{"AR", "EN", "LANG3", "AMBIG", "NE.AR", "NE.EN", "OTHER"}};
  }

  std::size_t size() const { return labels.size(); }

  std::size_t id(const std::string& label) const {
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end())
      throw ValidationError("unknown LID label '" + label + "'");
    return static_cast<std::size_t>(it - labels.begin());
  }

  bool contains(const std::string& label) const {
    return std::find(labels.begin(), labels.end(), label) != labels.end();
  }
};

// Scoring interface for the segmental dynamic programs: additive segment
// scores plus a first-order transition between adjacent segment labels.
class SegScorer {
 public:
  virtual ~SegScorer() = default;
  virtual const LidLabelSet& labels() const = 0;
  virtual std::size_t max_seg_len() const = 0;
  // Score of labeling chars[i..j) with the given label.
  virtual double score(const std::u32string& chars, std::size_t i,
                       std::size_t j, std::size_t label) const = 0;
  virtual double transition(std::size_t prev_label, std::size_t label) const = 0;
};

// ---------------------------------------------------------------------------
// Exact decoding and partition
// ---------------------------------------------------------------------------

// Exact argmax over all labeled segmentations with segment lengths <= L.
// Ties resolve to fewer segments, then to the earlier candidate in scan
// order (start position, then label order), so an all-zero scorer yields one
// whole-token segment with the first label.
inline SegLidRecord decode_segmental(const SegScorer& scorer,
                                     const std::string& token) {
  const std::u32string chars = utf8::decode(token);
  const std::size_t n = chars.size();
  if (n == 0) throw ValidationError("decode_segmental: empty token");
  if (n > kSegLidHardCap)
    throw ValidationError("token longer than the " +
                          std::to_string(kSegLidHardCap) + "-char cap");
  const std::size_t Y = scorer.labels().size();
  const std::size_t L = std::max<std::size_t>(1, scorer.max_seg_len());

  struct Cell {
    double score = kNegInf;
    std::size_t segs = 0;
    std::size_t back_i = 0;  // segment start
    std::size_t back_y = 0;  // previous label
  };
  std::vector<Cell> dp((n + 1) * Y);
  auto cell = [&](std::size_t j, std::size_t y) -> Cell& { return dp[j * Y + y]; };

  for (std::size_t j = 1; j <= n; ++j) {
    for (std::size_t y = 0; y < Y; ++y) {
      Cell best;
      const std::size_t lo = j > L ? j - L : 0;
      for (std::size_t i = lo; i < j; ++i) {
        const double seg = scorer.score(chars, i, j, y);
        if (i == 0) {
          const double s = seg;
          if (s > best.score || (s == best.score && 1 < best.segs)) {
            best = {s, 1, 0, 0};
          }
          continue;
        }
        for (std::size_t yp = 0; yp < Y; ++yp) {
          const Cell& prev = cell(i, yp);
          if (prev.segs == 0) continue;
          const double s = (prev.score + scorer.transition(yp, y)) + seg;
          const std::size_t segs = prev.segs + 1;
          if (s > best.score || (s == best.score && segs < best.segs)) {
            best = {s, segs, i, yp};
          }
        }
      }
      cell(j, y) = best;
    }
  }

  double final_score = kNegInf;
  std::size_t final_segs = 0, final_y = 0;
  bool found = false;
  for (std::size_t y = 0; y < Y; ++y) {
    const Cell& c = cell(n, y);
    if (c.segs == 0) continue;
    if (!found || c.score > final_score ||
        (c.score == final_score && c.segs < final_segs)) {
      found = true;
      final_score = c.score;
      final_segs = c.segs;
      final_y = y;
    }
  }
  if (!found) throw ValidationError("decode_segmental: no feasible segmentation");

  SegLidRecord rec;
  rec.token = token;
  std::vector<Segment> rev;
  std::size_t j = n, y = final_y;
  while (j > 0) {
    const Cell& c = cell(j, y);
    rev.push_back({scorer.labels().labels[y], j - c.back_i});
    y = c.back_y;
    j = c.back_i;
  }
  rec.segments.assign(rev.rbegin(), rev.rend());
  return rec;
}

// Path score accumulated in decode order (segment score, then transition),
// so it compares bitwise against the decoder's DP.
inline double path_score(const SegScorer& scorer, const std::u32string& chars,
                         const SegLidRecord& rec) {
  double total = 0.0;
  std::size_t pos = 0;
  std::size_t prev = 0;
  for (std::size_t k = 0; k < rec.segments.size(); ++k) {
    const std::size_t y = scorer.labels().id(rec.segments[k].label);
    const double seg = scorer.score(chars, pos, pos + rec.segments[k].length, y);
    if (k == 0)
      total = seg;
    else
      total = (total + scorer.transition(prev, y)) + seg;
    pos += rec.segments[k].length;
    prev = y;
  }
  return total;
}

inline double decode_score(const SegScorer& scorer, const std::string& token) {
  const SegLidRecord rec = decode_segmental(scorer, token);
  return path_score(scorer, utf8::decode(token), rec);
}

// log sum over all labeled segmentations of exp(path score).
inline double partition_segmental(const SegScorer& scorer,
                                  const std::string& token) {
  const std::u32string chars = utf8::decode(token);
  const std::size_t n = chars.size();
  if (n == 0) throw ValidationError("partition_segmental: empty token");
  if (n > kSegLidHardCap)
    throw ValidationError("token longer than the " +
                          std::to_string(kSegLidHardCap) + "-char cap");
  const std::size_t Y = scorer.labels().size();
  const std::size_t L = std::max<std::size_t>(1, scorer.max_seg_len());

  std::vector<double> fwd((n + 1) * Y, kNegInf);
  for (std::size_t j = 1; j <= n; ++j) {
    for (std::size_t y = 0; y < Y; ++y) {
      double acc = kNegInf;
      const std::size_t lo = j > L ? j - L : 0;
      for (std::size_t i = lo; i < j; ++i) {
        const double seg = scorer.score(chars, i, j, y);
        if (i == 0) {
          acc = log_sum_exp(acc, seg);
          continue;
        }
        for (std::size_t yp = 0; yp < Y; ++yp) {
          const double prev = fwd[i * Y + yp];
          if (prev == kNegInf) continue;
          acc = log_sum_exp(acc, prev + scorer.transition(yp, y) + seg);
        }
      }
      fwd[j * Y + y] = acc;
    }
  }
  double log_z = kNegInf;
  for (std::size_t y = 0; y < Y; ++y) log_z = log_sum_exp(log_z, fwd[n * Y + y]);
  return log_z;
}

// ---------------------------------------------------------------------------
// Segment features
// ---------------------------------------------------------------------------

// Affixes observed around intra-word switch points; shares the textproc
// file format.
inline const AffixTable& seglid_affix_defaults() {
  static const AffixTable table = [] {
    AffixTable t;
    for (const char* p : {"el", "l", "ال", "fl", "fel", "lel", "لل"})
      t.prefixes.push_back(utf8::decode(p));
    t.suffixes.push_back(utf8::decode("ات"));
    t.sort_by_length();
    return t;
  }();
  return table;
}

// Feature strings for labeling chars[i..j) with `label`: short segment
// surface, character 1..3-grams, length bucket, script, position flag, and
// affix-lexicon membership, each conjoined with the label.
inline std::vector<std::string> segment_features(
    const std::u32string& chars, std::size_t i, std::size_t j,
    const std::string& label,
    const AffixTable& affixes = seglid_affix_defaults()) {
  std::vector<std::string> base;
  const std::size_t len = j - i;
  const std::u32string seg = chars.substr(i, len);
  if (len <= 8) base.push_back("seg=" + utf8::encode(seg));
  for (std::size_t n = 1; n <= 3 && n <= len; ++n)
    for (std::size_t p = i; p + n <= j; ++p)
      base.push_back("ng" + std::to_string(n) + "=" +
                     utf8::encode(std::u32string_view(chars).substr(p, n)));
  const char* bucket = len == 1   ? "1"
                       : len == 2 ? "2"
                       : len == 3 ? "3"
                       : len == 4 ? "4"
                       : len == 5 ? "5"
                       : len <= 8 ? "6-8"
                                  : "9+";
  base.push_back(std::string("len=") + bucket);
  base.push_back(std::string("script=") + to_string(detect_script(utf8::encode(seg))));
  const bool at_start = i == 0, at_end = j == chars.size();
  base.push_back(std::string("pos=") + (at_start && at_end ? "whole"
                                        : at_start         ? "prefix"
                                        : at_end           ? "suffix"
                                                           : "inner"));
  const auto& pre = affixes.prefixes;
  const auto& suf = affixes.suffixes;
  if (std::find(pre.begin(), pre.end(), seg) != pre.end())
    base.push_back("affix_hit=prefix");
  if (std::find(suf.begin(), suf.end(), seg) != suf.end())
    base.push_back("affix_hit=suffix");

  std::vector<std::string> out;
  out.reserve(base.size());
  for (std::string& b : base) out.push_back(b + "|y=" + label);
  return out;
}

// ---------------------------------------------------------------------------
// Trainable log-linear segment scorer (semi-Markov CRF)
// ---------------------------------------------------------------------------

class SegLidModel final : public SegScorer {
 public:
  LidLabelSet label_set = LidLabelSet::defaults();
  std::size_t max_len = 20;
  AffixTable affixes = seglid_affix_defaults();
  std::unordered_map<std::string, std::size_t> feature_index;
  std::vector<std::string> feature_names;
  std::vector<double> weights;      // per feature
  std::vector<double> trans_w;      // Y x Y

  const LidLabelSet& labels() const override { return label_set; }
  std::size_t max_seg_len() const override { return max_len; }

  double score(const std::u32string& chars, std::size_t i, std::size_t j,
               std::size_t label) const override {
    double s = 0.0;
    for (const std::string& f :
         segment_features(chars, i, j, label_set.labels[label], affixes)) {
      const auto it = feature_index.find(f);
      if (it != feature_index.end()) s += weights[it->second];
    }
    return s;
  }

  double transition(std::size_t prev, std::size_t label) const override {
    return trans_w[prev * label_set.size() + label];
  }

  void save(std::ostream& out) const {
    out << "CSKIT-SEGLID v1\n";
    out << "labels";
    for (const auto& l : label_set.labels) out << ' ' << l;
    out << '\n';
    out << "L=" << max_len << '\n';
    out << "affixes " << affixes.to_line() << '\n';
    out.precision(17);
    for (std::size_t f = 0; f < feature_names.size(); ++f)
      if (weights[f] != 0.0)
        out << feature_names[f] << '\t' << weights[f] << '\n';
    const std::size_t Y = label_set.size();
    for (std::size_t yp = 0; yp < Y; ++yp)
      for (std::size_t y = 0; y < Y; ++y)
        out << "TRANS\t" << label_set.labels[yp] << '\t' << label_set.labels[y]
            << '\t' << trans_w[yp * Y + y] << '\n';
  }

  static SegLidModel load(std::istream& in) {
    SegLidModel m;
    std::string line;
    if (!std::getline(in, line) || line != "CSKIT-SEGLID v1")
      throw ParseError("bad segmental model header", 1);
    if (!std::getline(in, line) || line.rfind("labels", 0) != 0)
      throw ParseError("expected labels line", 2);
    m.label_set.labels.clear();
    {
      std::istringstream ls(line);
      std::string kw, label;
      ls >> kw;
      while (ls >> label) m.label_set.labels.push_back(label);
    }
    if (!std::getline(in, line) || line.rfind("L=", 0) != 0)
      throw ParseError("expected L= line", 3);
    m.max_len = static_cast<std::size_t>(std::stoul(line.substr(2)));
    if (!std::getline(in, line) || line.rfind("affixes ", 0) != 0)
      throw ParseError("expected affixes line", 4);
    m.affixes = AffixTable::from_line(line.substr(8));
    const std::size_t Y = m.label_set.size();
    m.trans_w.assign(Y * Y, 0.0);
    std::size_t lineno = 3;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      std::vector<std::string> cols;
      std::size_t start = 0;
      for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == '\t') {
          cols.push_back(line.substr(start, i - start));
          start = i + 1;
        }
      }
      if (cols.size() == 4 && cols[0] == "TRANS") {
        m.trans_w[m.label_set.id(cols[1]) * Y + m.label_set.id(cols[2])] =
            std::stod(cols[3]);
      } else if (cols.size() == 2) {
        m.feature_index[cols[0]] = m.feature_names.size();
        m.feature_names.push_back(cols[0]);
        m.weights.push_back(std::stod(cols[1]));
      } else {
        throw ParseError("unrecognized model line", lineno);
      }
    }
    return m;
  }
};

struct SegLidTrainConfig {
  double l2_sigma = 10.0;
  std::size_t max_epochs = 150;
  double tol = 1e-7;
  std::uint64_t seed = 0;
  int threads = 1;
  std::size_t max_seg_len = 20;
  // Optional context variant: additionally trains on adjacent tokens joined
  // by a boundary sentinel (labeled OTHER). Off by default.
  bool phrase_context = false;
  LidLabelSet label_set = LidLabelSet::defaults();
  AffixTable affixes = seglid_affix_defaults();
};

namespace seglid_detail {

inline constexpr char32_t kBoundarySentinel = 0x241F;  // ␟

// Joins a sentence into one record with sentinel OTHER segments between
// tokens (the phrase-context training variant).
inline SegLidRecord join_with_sentinels(const SegLidSentence& sentence) {
  SegLidRecord joined;
  for (std::size_t t = 0; t < sentence.size(); ++t) {
    if (t) {
      utf8::append(joined.token, kBoundarySentinel);
      joined.segments.push_back({"OTHER", 1});
    }
    joined.token += sentence[t].token;
    for (const Segment& s : sentence[t].segments) joined.segments.push_back(s);
  }
  return joined;
}

struct PreparedToken {
  std::u32string chars;
  // Candidate spans: feature ids per (start, length-1, label), flattened.
  // span_index(i, len, y) -> vector of feature ids
  std::vector<std::vector<std::size_t>> span_feats;
  std::vector<std::pair<std::size_t, std::size_t>> gold;  // (start, end)
  std::vector<std::size_t> gold_labels;
  std::size_t n = 0;
};

}  // namespace seglid_detail

// Semi-Markov CRF training: minimizes sum of (log-partition - gold path
// score) with L2, by full-batch gradient descent with line search. The
// gradient is expected-minus-empirical segment-feature counts computed with
// the segmental forward-backward recursions.
inline SegLidModel train_seglid(const SegLidCorpus& corpus,
                                const SegLidTrainConfig& cfg) {
  SegLidModel model;
  model.label_set = cfg.label_set;
  model.max_len = cfg.max_seg_len;
  model.affixes = cfg.affixes;
  const std::size_t Y = model.label_set.size();
  const std::size_t L = cfg.max_seg_len;

  std::vector<SegLidRecord> records;
  for (const SegLidSentence& sentence : corpus) {
    for (const SegLidRecord& rec : sentence) records.push_back(rec);
    if (cfg.phrase_context && sentence.size() > 1)
      records.push_back(seglid_detail::join_with_sentinels(sentence));
  }
  if (records.empty()) throw ValidationError("train_seglid: empty corpus");
  for (const SegLidRecord& rec : records) {
    if (rec.token.empty() || rec.segments.empty())
      throw ValidationError("train_seglid: malformed record");
    for (const Segment& s : rec.segments) {
      if (!model.label_set.contains(s.label))
        throw ValidationError("token '" + rec.token + "' uses label '" +
                              s.label + "' outside the model label set");
      if (s.length > L)
        throw ValidationError("gold segment of token '" + rec.token +
                              "' is longer than L=" + std::to_string(L));
    }
  }

  // Feature vocabulary over every candidate span of every training token.
  std::vector<seglid_detail::PreparedToken> prepared(records.size());
  for (std::size_t r = 0; r < records.size(); ++r) {
    auto& pt = prepared[r];
    pt.chars = utf8::decode(records[r].token);
    pt.n = pt.chars.size();
    pt.span_feats.resize(pt.n * std::min(L, pt.n) * Y);
    std::size_t pos = 0;
    for (const Segment& s : records[r].segments) {
      pt.gold.emplace_back(pos, pos + s.length);
      pt.gold_labels.push_back(model.label_set.id(s.label));
      pos += s.length;
    }
    for (std::size_t i = 0; i < pt.n; ++i) {
      for (std::size_t len = 1; len <= std::min(L, pt.n - i); ++len) {
        for (std::size_t y = 0; y < Y; ++y) {
          auto feats = segment_features(pt.chars, i, i + len,
                                        model.label_set.labels[y], cfg.affixes);
          std::vector<std::size_t> ids;
          ids.reserve(feats.size());
          for (const std::string& f : feats) {
            auto it = model.feature_index.find(f);
            if (it == model.feature_index.end()) {
              it = model.feature_index.emplace(f, model.feature_names.size()).first;
              model.feature_names.push_back(f);
            }
            ids.push_back(it->second);
          }
          pt.span_feats[(i * std::min(L, pt.n) + (len - 1)) * Y + y] =
              std::move(ids);
        }
      }
    }
  }

  const std::size_t F = model.feature_names.size();
  const std::size_t dim = F + Y * Y;
  const double inv_sigma2 = 1.0 / (cfg.l2_sigma * cfg.l2_sigma);

  // Per-record NLL and gradient in the packed layout [weights | trans].
  auto record_nll_grad = [&](const seglid_detail::PreparedToken& pt,
                             const std::vector<double>& theta,
                             std::vector<double>& grad) -> double {
    const std::size_t n = pt.n;
    const std::size_t maxlen = std::min(L, n);
    auto span_ids = [&](std::size_t i, std::size_t len,
                        std::size_t y) -> const std::vector<std::size_t>& {
      return pt.span_feats[(i * maxlen + (len - 1)) * Y + y];
    };
    auto span_score = [&](std::size_t i, std::size_t len, std::size_t y) {
      double s = 0.0;
      for (std::size_t f : span_ids(i, len, y)) s += theta[f];
      return s;
    };
    auto trans = [&](std::size_t yp, std::size_t y) {
      return theta[F + yp * Y + y];
    };

    std::vector<double> fwd((n + 1) * Y, kNegInf);
    std::vector<double> bwd((n + 1) * Y, kNegInf);
    for (std::size_t j = 1; j <= n; ++j) {
      for (std::size_t y = 0; y < Y; ++y) {
        double acc = kNegInf;
        const std::size_t lo = j > maxlen ? j - maxlen : 0;
        for (std::size_t i = lo; i < j; ++i) {
          const double seg = span_score(i, j - i, y);
          if (i == 0) {
            acc = log_sum_exp(acc, seg);
            continue;
          }
          for (std::size_t yp = 0; yp < Y; ++yp) {
            if (fwd[i * Y + yp] == kNegInf) continue;
            acc = log_sum_exp(acc, fwd[i * Y + yp] + trans(yp, y) + seg);
          }
        }
        fwd[j * Y + y] = acc;
      }
    }
    for (std::size_t y = 0; y < Y; ++y) bwd[n * Y + y] = 0.0;
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t yp = 0; yp < Y; ++yp) {
        double acc = kNegInf;
        for (std::size_t len = 1; len <= std::min(maxlen, n - i); ++len) {
          for (std::size_t y = 0; y < Y; ++y) {
            if (bwd[(i + len) * Y + y] == kNegInf) continue;
            acc = log_sum_exp(acc, trans(yp, y) + span_score(i, len, y) +
                                       bwd[(i + len) * Y + y]);
          }
        }
        bwd[i * Y + yp] = acc;
      }
    }
    double log_z = kNegInf;
    for (std::size_t y = 0; y < Y; ++y)
      log_z = log_sum_exp(log_z, fwd[n * Y + y]);

    // Gold score and empirical counts.
    double gold = 0.0;
    for (std::size_t k = 0; k < pt.gold.size(); ++k) {
      const auto [i, j] = pt.gold[k];
      const std::size_t y = pt.gold_labels[k];
      gold += span_score(i, j - i, y);
      for (std::size_t f : span_ids(i, j - i, y)) grad[f] -= 1.0;
      if (k) {
        gold += trans(pt.gold_labels[k - 1], y);
        grad[F + pt.gold_labels[k - 1] * Y + y] -= 1.0;
      }
    }

    // Expected counts via segment marginals.
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t len = 1; len <= std::min(maxlen, n - i); ++len) {
        const std::size_t j = i + len;
        for (std::size_t y = 0; y < Y; ++y) {
          if (bwd[j * Y + y] == kNegInf) continue;
          const double seg = span_score(i, len, y);
          double mass;
          if (i == 0) {
            mass = std::exp(seg + bwd[j * Y + y] - log_z);
          } else {
            mass = 0.0;
            for (std::size_t yp = 0; yp < Y; ++yp) {
              if (fwd[i * Y + yp] == kNegInf) continue;
              const double p = std::exp(fwd[i * Y + yp] + trans(yp, y) + seg +
                                        bwd[j * Y + y] - log_z);
              grad[F + yp * Y + y] += p;
              mass += p;
            }
          }
          if (mass == 0.0) continue;
          for (std::size_t f : span_ids(i, len, y)) grad[f] += mass;
        }
      }
    }
    return log_z - gold;
  };

  std::vector<double> theta(dim, 0.0);
  auto objective = [&](const std::vector<double>& th,
                       std::vector<double>& grad) -> double {
    std::vector<std::vector<double>> slot_grad(
        kReduceSlots, std::vector<double>(dim, 0.0));
    std::vector<double> slot_nll(kReduceSlots, 0.0);
    run_slots(kReduceSlots, cfg.threads, [&](std::size_t slot) {
      for (std::size_t r = slot; r < prepared.size(); r += kReduceSlots)
        slot_nll[slot] += record_nll_grad(prepared[r], th, slot_grad[slot]);
    });
    double value = 0.0;
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t slot = 0; slot < kReduceSlots; ++slot) {
      value += slot_nll[slot];
      for (std::size_t i = 0; i < dim; ++i) grad[i] += slot_grad[slot][i];
    }
    for (std::size_t i = 0; i < dim; ++i) {
      value += 0.5 * th[i] * th[i] * inv_sigma2;
      grad[i] += th[i] * inv_sigma2;
    }
    return value;
  };

  GdOptions opt;
  opt.max_epochs = cfg.max_epochs;
  opt.tol = cfg.tol;
  minimize_batch_gd(theta, objective, opt);

  model.weights.assign(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(F));
  model.trans_w.assign(theta.begin() + static_cast<std::ptrdiff_t>(F), theta.end());
  return model;
}

// NLL and gradient for one record against an existing model, packed as
// [weights | trans]. Used by the gradient-check oracles.
inline double seglid_nll_grad(const SegLidModel& model, const SegLidRecord& rec,
                              std::span<double> grad) {
  const std::u32string chars = utf8::decode(rec.token);
  const double log_z = partition_segmental(model, rec.token);
  const std::size_t Y = model.label_set.size();
  const std::size_t F = model.feature_names.size();
  const std::size_t n = chars.size();
  const std::size_t maxlen = std::min(model.max_len, n);

  double gold = 0.0;
  std::size_t pos = 0;
  for (std::size_t k = 0; k < rec.segments.size(); ++k) {
    const std::size_t y = model.label_set.id(rec.segments[k].label);
    gold += model.score(chars, pos, pos + rec.segments[k].length, y);
    if (!grad.empty()) {
      for (const std::string& f : segment_features(
               chars, pos, pos + rec.segments[k].length,
               rec.segments[k].label, model.affixes)) {
        const auto it = model.feature_index.find(f);
        if (it != model.feature_index.end()) grad[it->second] -= 1.0;
      }
      if (k) {
        const std::size_t yp = model.label_set.id(rec.segments[k - 1].label);
        grad[F + yp * Y + y] -= 1.0;
      }
    }
    if (k) gold += model.transition(model.label_set.id(rec.segments[k - 1].label),
                                    model.label_set.id(rec.segments[k].label));
    pos += rec.segments[k].length;
  }
  if (grad.empty()) return log_z - gold;

  // forward/backward for marginals
  std::vector<double> fwd((n + 1) * Y, kNegInf), bwd((n + 1) * Y, kNegInf);
  for (std::size_t j = 1; j <= n; ++j) {
    for (std::size_t y = 0; y < Y; ++y) {
      double acc = kNegInf;
      const std::size_t lo = j > maxlen ? j - maxlen : 0;
      for (std::size_t i = lo; i < j; ++i) {
        const double seg = model.score(chars, i, j, y);
        if (i == 0) {
          acc = log_sum_exp(acc, seg);
          continue;
        }
        for (std::size_t yp = 0; yp < Y; ++yp) {
          if (fwd[i * Y + yp] == kNegInf) continue;
          acc = log_sum_exp(acc, fwd[i * Y + yp] + model.transition(yp, y) + seg);
        }
      }
      fwd[j * Y + y] = acc;
    }
  }
  for (std::size_t y = 0; y < Y; ++y) bwd[n * Y + y] = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t yp = 0; yp < Y; ++yp) {
      double acc = kNegInf;
      for (std::size_t len = 1; len <= std::min(maxlen, n - i); ++len) {
        for (std::size_t y = 0; y < Y; ++y) {
          if (bwd[(i + len) * Y + y] == kNegInf) continue;
          acc = log_sum_exp(acc, model.transition(yp, y) +
                                     model.score(chars, i, i + len, y) +
                                     bwd[(i + len) * Y + y]);
        }
      }
      bwd[i * Y + yp] = acc;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t len = 1; len <= std::min(maxlen, n - i); ++len) {
      const std::size_t j = i + len;
      for (std::size_t y = 0; y < Y; ++y) {
        if (bwd[j * Y + y] == kNegInf) continue;
        const double seg = model.score(chars, i, j, y);
        double mass;
        if (i == 0) {
          mass = std::exp(seg + bwd[j * Y + y] - log_z);
        } else {
          mass = 0.0;
          for (std::size_t yp = 0; yp < Y; ++yp) {
            if (fwd[i * Y + yp] == kNegInf) continue;
            const double p = std::exp(fwd[i * Y + yp] + model.transition(yp, y) +
                                      seg + bwd[j * Y + y] - log_z);
            grad[F + yp * Y + y] += p;
            mass += p;
          }
        }
        if (mass == 0.0) continue;
        for (const std::string& f : segment_features(
                 chars, i, j, model.label_set.labels[y], model.affixes)) {
          const auto it = model.feature_index.find(f);
          if (it != model.feature_index.end()) grad[it->second] += mass;
        }
      }
    }
  }
  return log_z - gold;
}

// ---------------------------------------------------------------------------
// Corpus transforms
// ---------------------------------------------------------------------------

// NE.AR and NE.EN collapse to NE; lengths and all other labels untouched.
// Idempotent.
inline SegLidCorpus coarse_ne_transform(const SegLidCorpus& corpus) {
  SegLidCorpus out = corpus;
  for (SegLidSentence& sentence : out)
    for (SegLidRecord& rec : sentence)
      for (Segment& seg : rec.segments)
        if (seg.label == "NE.AR" || seg.label == "NE.EN") seg.label = "NE";
  return out;
}

// Per-character label list; each segment's label repeated `length` times.
inline std::vector<std::string> expand_char_tags(const SegLidRecord& rec) {
  std::vector<std::string> tags;
  tags.reserve(rec.char_count());
  for (const Segment& s : rec.segments)
    for (std::size_t k = 0; k < s.length; ++k) tags.push_back(s.label);
  if (tags.size() != rec.char_count())
    throw ValidationError("record '" + rec.token +
                          "' violates the length-sum invariant");
  return tags;
}

}  // namespace cskit
