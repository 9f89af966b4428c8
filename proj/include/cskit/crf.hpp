#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "cskit/corpus.hpp"
#include "cskit/error.hpp"
#include "cskit/kmeans.hpp"
#include "cskit/numeric.hpp"
#include "cskit/optimize.hpp"
#include "cskit/parallel.hpp"
#include "cskit/rng.hpp"
#include "cskit/textproc.hpp"

namespace cskit {

inline constexpr const char* kBosToken = "<BOS>";
inline constexpr const char* kEosToken = "<EOS>";

// Which observation templates fire at each position. Default contextual
// window is current + one previous word.
struct FeatureTemplateConfig {
  bool use_current = true;
  int prev_window = 1;  // 0..2
  int next_window = 0;  // 0..2
  bool use_stem = false;
  bool use_first_char = false;
  bool use_last_char = false;
  bool use_pos = false;
  std::vector<std::pair<std::string, const ClusterModel*>> cluster_models;
  std::shared_ptr<const AffixTable> affixes;  // stemmer table; default when null

  bool any_enabled() const {
    return use_current || prev_window > 0 || next_window > 0 || use_stem ||
           use_first_char || use_last_char || use_pos || !cluster_models.empty();
  }

  void validate() const {
    if (!any_enabled()) throw ValidationError("feature config enables no templates");
    if (prev_window < 0 || prev_window > 2 || next_window < 0 || next_window > 2)
      throw ValidationError("contextual windows must be in 0..2");
  }

  const AffixTable& effective_affixes() const {
    return affixes ? *affixes : default_affixes();
  }
};

// Observation features for one position: deterministic strings with stable
// prefixes (`w0=`, `w-1=`, `stem=`, `clu:<name>=`, ...). Window positions
// past the sentence edges emit the <BOS>/<EOS> sentinels.
inline std::vector<std::string> extract_features(
    const LabeledSentence& sentence, std::size_t position,
    const FeatureTemplateConfig& cfg) {
  cfg.validate();
  if (position >= sentence.tokens.size())
    throw ValidationError("feature position out of range");
  const auto& tokens = sentence.tokens;
  const std::string& surface = tokens[position].surface;
  std::vector<std::string> feats;

  auto word_at = [&](std::ptrdiff_t p) -> std::string {
    if (p < 0) return kBosToken;
    if (p >= static_cast<std::ptrdiff_t>(tokens.size())) return kEosToken;
    return tokens[static_cast<std::size_t>(p)].surface;
  };

  if (cfg.use_current) feats.push_back("w0=" + surface);
  for (int d = 1; d <= cfg.prev_window; ++d)
    feats.push_back("w-" + std::to_string(d) + "=" +
                    word_at(static_cast<std::ptrdiff_t>(position) - d));
  for (int d = 1; d <= cfg.next_window; ++d)
    feats.push_back("w+" + std::to_string(d) + "=" +
                    word_at(static_cast<std::ptrdiff_t>(position) + d));
  if (cfg.use_stem)
    feats.push_back("stem=" + light_stem(surface, cfg.effective_affixes()));
  if (cfg.use_first_char || cfg.use_last_char) {
    const std::u32string cps = utf8::decode(surface);
    if (!cps.empty()) {
      if (cfg.use_first_char)
        feats.push_back("c_first=" + utf8::encode(cps.front()));
      if (cfg.use_last_char)
        feats.push_back("c_last=" + utf8::encode(cps.back()));
    }
  }
  if (cfg.use_pos) {
    if (!tokens[position].pos)
      throw ValidationError("POS feature requested but token '" + surface +
                            "' carries no POS column");
    feats.push_back("pos=" + *tokens[position].pos);
  }
  for (const auto& [name, model] : cfg.cluster_models)
    feats.push_back("clu:" + name + "=" + model->cluster_id(surface));
  return feats;
}

// Linear-chain CRF with dedicated BOS/EOS transition rows. Unknown features
// score zero at decode time.
struct CrfModel {
  std::vector<std::string> labels;
  FeatureTemplateConfig templates;
  std::unordered_map<std::string, std::size_t> feature_index;
  std::vector<std::string> feature_names;
  std::vector<double> state_w;  // [feature][label]
  std::vector<double> trans_w;  // [label][label]
  std::vector<double> bos_w;    // [label]
  std::vector<double> eos_w;    // [label]

  std::size_t num_labels() const { return labels.size(); }
  std::size_t num_features() const { return feature_names.size(); }

  double state_weight(std::size_t feat, std::size_t label) const {
    return state_w[feat * labels.size() + label];
  }

  std::size_t label_id(const std::string& label) const {
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw ValidationError("unknown label " + label);
    return static_cast<std::size_t>(it - labels.begin());
  }

  void save(std::ostream& out) const;
  static CrfModel load(std::istream& in);
};

namespace crf_detail {

// Feature ids per position (unknown features dropped).
inline std::vector<std::vector<std::size_t>> featurize(
    const CrfModel& m, const LabeledSentence& sentence) {
  std::vector<std::vector<std::size_t>> ids(sentence.tokens.size());
  for (std::size_t t = 0; t < sentence.tokens.size(); ++t) {
    for (const std::string& f : extract_features(sentence, t, m.templates)) {
      const auto it = m.feature_index.find(f);
      if (it != m.feature_index.end()) ids[t].push_back(it->second);
    }
  }
  return ids;
}

// Per-position label scores from state features.
inline std::vector<double> state_scores(
    const CrfModel& m, const std::vector<std::vector<std::size_t>>& ids) {
  const std::size_t L = m.num_labels();
  std::vector<double> scores(ids.size() * L, 0.0);
  for (std::size_t t = 0; t < ids.size(); ++t)
    for (std::size_t f : ids[t])
      for (std::size_t y = 0; y < L; ++y)
        scores[t * L + y] += m.state_w[f * L + y];
  return scores;
}

struct Lattice {
  std::vector<double> alpha;  // T x L, log-space
  std::vector<double> beta;   // T x L
  double log_z = kNegInf;
};

inline Lattice forward_backward(const CrfModel& m,
                                const std::vector<double>& scores,
                                std::size_t T) {
  const std::size_t L = m.num_labels();
  Lattice lat;
  lat.alpha.assign(T * L, kNegInf);
  lat.beta.assign(T * L, kNegInf);
  for (std::size_t y = 0; y < L; ++y)
    lat.alpha[y] = m.bos_w[y] + scores[y];
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t y = 0; y < L; ++y) {
      double acc = kNegInf;
      for (std::size_t yp = 0; yp < L; ++yp)
        acc = log_sum_exp(acc, lat.alpha[(t - 1) * L + yp] + m.trans_w[yp * L + y]);
      lat.alpha[t * L + y] = acc + scores[t * L + y];
    }
  }
  for (std::size_t y = 0; y < L; ++y) lat.beta[(T - 1) * L + y] = m.eos_w[y];
  for (std::size_t t = T - 1; t-- > 0;) {
    for (std::size_t y = 0; y < L; ++y) {
      double acc = kNegInf;
      for (std::size_t yn = 0; yn < L; ++yn)
        acc = log_sum_exp(acc, m.trans_w[y * L + yn] + scores[(t + 1) * L + yn] +
                                   lat.beta[(t + 1) * L + yn]);
      lat.beta[t * L + y] = acc;
    }
  }
  for (std::size_t y = 0; y < L; ++y)
    lat.log_z = log_sum_exp(lat.log_z, lat.alpha[(T - 1) * L + y] + m.eos_w[y]);
  return lat;
}

}  // namespace crf_detail

// Exact argmax tag sequence (Viterbi in log space); ties resolve to the
// earlier label in the model's label order.
inline std::vector<std::string> decode(const CrfModel& model,
                                       const LabeledSentence& sentence) {
  if (sentence.tokens.empty())
    throw ValidationError("decode: empty sentence");
  const std::size_t T = sentence.tokens.size();
  const std::size_t L = model.num_labels();
  const auto ids = crf_detail::featurize(model, sentence);
  const auto scores = crf_detail::state_scores(model, ids);

  std::vector<double> best(T * L, kNegInf);
  std::vector<std::size_t> back(T * L, 0);
  for (std::size_t y = 0; y < L; ++y)
    best[y] = model.bos_w[y] + scores[y];
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t y = 0; y < L; ++y) {
      double b = kNegInf;
      std::size_t arg = 0;
      for (std::size_t yp = 0; yp < L; ++yp) {
        const double s = best[(t - 1) * L + yp] + model.trans_w[yp * L + y];
        if (s > b) {
          b = s;
          arg = yp;
        }
      }
      best[t * L + y] = b + scores[t * L + y];
      back[t * L + y] = arg;
    }
  }
  double final_best = kNegInf;
  std::size_t final_y = 0;
  for (std::size_t y = 0; y < L; ++y) {
    const double s = best[(T - 1) * L + y] + model.eos_w[y];
    if (s > final_best) {
      final_best = s;
      final_y = y;
    }
  }
  std::vector<std::string> tags(T);
  std::size_t y = final_y;
  for (std::size_t t = T; t-- > 0;) {
    tags[t] = model.labels[y];
    y = back[t * model.num_labels() + y];
  }
  return tags;
}

// Score of the Viterbi path (for the score <= log-partition invariant).
inline double viterbi_score(const CrfModel& model, const LabeledSentence& s) {
  const auto tags = decode(model, s);
  const auto ids = crf_detail::featurize(model, s);
  const auto scores = crf_detail::state_scores(model, ids);
  const std::size_t L = model.num_labels();
  double total = 0.0;
  std::size_t prev = 0;
  for (std::size_t t = 0; t < tags.size(); ++t) {
    const std::size_t y = model.label_id(tags[t]);
    total += scores[t * L + y];
    total += t == 0 ? model.bos_w[y] : model.trans_w[prev * L + y];
    prev = y;
  }
  total += model.eos_w[prev];
  return total;
}

inline double log_partition(const CrfModel& model, const LabeledSentence& s) {
  const auto ids = crf_detail::featurize(model, s);
  const auto scores = crf_detail::state_scores(model, ids);
  return crf_detail::forward_backward(model, scores, s.tokens.size()).log_z;
}

// Per-position posterior over labels; each row sums to 1.
inline std::vector<std::vector<double>> marginals(const CrfModel& model,
                                                  const LabeledSentence& s) {
  const std::size_t T = s.tokens.size();
  const std::size_t L = model.num_labels();
  const auto ids = crf_detail::featurize(model, s);
  const auto scores = crf_detail::state_scores(model, ids);
  const auto lat = crf_detail::forward_backward(model, scores, T);
  std::vector<std::vector<double>> out(T, std::vector<double>(L, 0.0));
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t y = 0; y < L; ++y)
      out[t][y] = std::exp(lat.alpha[t * L + y] + lat.beta[t * L + y] - lat.log_z);
  return out;
}

// Negative log-likelihood of the gold tags and its gradient with respect to
// the packed parameter vector [state_w | trans_w | bos_w | eos_w]. The
// gradient is expected-minus-empirical feature counts, accumulated into
// `grad` (which must match the packed layout).
inline double sequence_nll_grad(const CrfModel& model, const LabeledSentence& s,
                                std::span<double> grad) {
  const std::size_t T = s.tokens.size();
  const std::size_t L = model.num_labels();
  const std::size_t F = model.num_features();
  const auto ids = crf_detail::featurize(model, s);
  const auto scores = crf_detail::state_scores(model, ids);
  const auto lat = crf_detail::forward_backward(model, scores, T);

  const std::size_t trans_off = F * L;
  const std::size_t bos_off = trans_off + L * L;
  const std::size_t eos_off = bos_off + L;

  // Gold path score and empirical counts.
  double gold_score = 0.0;
  std::size_t prev = 0;
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t y = model.label_id(s.tokens[t].tag);
    gold_score += scores[t * L + y];
    for (std::size_t f : ids[t]) {
      if (!grad.empty()) grad[f * L + y] -= 1.0;
    }
    if (t == 0) {
      gold_score += model.bos_w[y];
      if (!grad.empty()) grad[bos_off + y] -= 1.0;
    } else {
      gold_score += model.trans_w[prev * L + y];
      if (!grad.empty()) grad[trans_off + prev * L + y] -= 1.0;
    }
    prev = y;
  }
  gold_score += model.eos_w[prev];
  if (!grad.empty()) grad[eos_off + prev] -= 1.0;

  if (grad.empty()) return lat.log_z - gold_score;

  // Expected counts.
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t y = 0; y < L; ++y) {
      const double p =
          std::exp(lat.alpha[t * L + y] + lat.beta[t * L + y] - lat.log_z);
      for (std::size_t f : ids[t]) grad[f * L + y] += p;
      if (t == 0) grad[bos_off + y] += p;
      if (t == T - 1) grad[eos_off + y] += p;
    }
  }
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t yp = 0; yp < L; ++yp) {
      for (std::size_t y = 0; y < L; ++y) {
        const double p = std::exp(lat.alpha[(t - 1) * L + yp] +
                                  model.trans_w[yp * L + y] + scores[t * L + y] +
                                  lat.beta[t * L + y] - lat.log_z);
        grad[trans_off + yp * L + y] += p;
      }
    }
  }
  return lat.log_z - gold_score;
}

inline double sequence_nll(const CrfModel& model, const LabeledSentence& s) {
  return sequence_nll_grad(model, s, {});
}

struct TrainConfig {
  double l2_sigma = 1.0;
  enum class Optimizer { BatchGd, Sgd } optimizer = Optimizer::BatchGd;
  double learning_rate = 0.05;  // SGD only
  std::size_t max_epochs = 200;
  double tol = 1e-7;
  std::uint64_t seed = 0;
  int threads = 1;
};

namespace crf_detail {

inline void pack(const CrfModel& m, std::vector<double>& theta) {
  theta.clear();
  theta.insert(theta.end(), m.state_w.begin(), m.state_w.end());
  theta.insert(theta.end(), m.trans_w.begin(), m.trans_w.end());
  theta.insert(theta.end(), m.bos_w.begin(), m.bos_w.end());
  theta.insert(theta.end(), m.eos_w.begin(), m.eos_w.end());
}

inline void unpack(const std::vector<double>& theta, CrfModel& m) {
  const std::size_t L = m.num_labels();
  const std::size_t F = m.num_features();
  std::copy_n(theta.begin(), F * L, m.state_w.begin());
  std::copy_n(theta.begin() + F * L, L * L, m.trans_w.begin());
  std::copy_n(theta.begin() + F * L + L * L, L, m.bos_w.begin());
  std::copy_n(theta.begin() + F * L + L * L + L, L, m.eos_w.begin());
}

}  // namespace crf_detail

// Maximum-likelihood training with L2 regularization (sigma is the Gaussian
// prior's standard deviation). Full-batch gradient descent with backtracking
// line search by default; the regularized NLL never increases across
// accepted steps. Per-sentence gradients are accumulated over fixed slots so
// results are bitwise identical for any thread count.
inline CrfModel train_crf(const NerCorpus& corpus, const TrainConfig& tcfg,
                          const FeatureTemplateConfig& fcfg) {
  if (corpus.empty()) throw ValidationError("train_crf: empty corpus");
  fcfg.validate();
  if (tcfg.l2_sigma <= 0 || tcfg.learning_rate <= 0 || tcfg.max_epochs == 0 ||
      tcfg.tol < 0)
    throw ValidationError("train_crf: hyperparameters must be positive");

  CrfModel model;
  model.templates = fcfg;

  // Label set in first-seen order, then feature vocabulary.
  std::map<std::string, std::size_t> seen_label;
  for (const LabeledSentence& s : corpus) {
    if (s.tokens.empty()) throw ValidationError("train_crf: empty sentence");
    const auto bad = iob_violations(s);
    if (!bad.empty()) throw ValidationError("train_crf: ill-formed IOB gold");
    for (const Token& t : s.tokens) {
      if (!seen_label.count(t.tag)) {
        seen_label[t.tag] = model.labels.size();
        model.labels.push_back(t.tag);
      }
    }
  }
  for (const LabeledSentence& s : corpus) {
    for (std::size_t t = 0; t < s.tokens.size(); ++t) {
      for (const std::string& f : extract_features(s, t, fcfg)) {
        if (!model.feature_index.count(f)) {
          model.feature_index[f] = model.feature_names.size();
          model.feature_names.push_back(f);
        }
      }
    }
  }

  const std::size_t L = model.num_labels();
  const std::size_t F = model.num_features();
  model.state_w.assign(F * L, 0.0);
  model.trans_w.assign(L * L, 0.0);
  model.bos_w.assign(L, 0.0);
  model.eos_w.assign(L, 0.0);

  const std::size_t dim = F * L + L * L + 2 * L;
  const double inv_sigma2 = 1.0 / (tcfg.l2_sigma * tcfg.l2_sigma);

  if (tcfg.optimizer == TrainConfig::Optimizer::Sgd) {
    // Stochastic passes; always sequential so runs stay reproducible.
    std::mt19937_64 gen(tcfg.seed);
    std::vector<std::size_t> order(corpus.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> grad(dim, 0.0), theta(dim, 0.0);
    crf_detail::pack(model, theta);
    const double n = static_cast<double>(corpus.size());
    for (std::size_t epoch = 0; epoch < tcfg.max_epochs; ++epoch) {
      shuffle(order, gen);
      const double lr = tcfg.learning_rate / (1.0 + static_cast<double>(epoch));
      for (std::size_t idx : order) {
        std::fill(grad.begin(), grad.end(), 0.0);
        crf_detail::unpack(theta, model);
        sequence_nll_grad(model, corpus[idx], grad);
        for (std::size_t i = 0; i < dim; ++i)
          theta[i] -= lr * (grad[i] + theta[i] * inv_sigma2 / n);
      }
    }
    crf_detail::unpack(theta, model);
    return model;
  }

  std::vector<double> theta(dim, 0.0);
  crf_detail::pack(model, theta);
  CrfModel scratch = model;
  auto objective = [&](const std::vector<double>& th,
                       std::vector<double>& grad) -> double {
    crf_detail::unpack(th, scratch);
    std::vector<std::vector<double>> slot_grad(
        kReduceSlots, std::vector<double>(dim, 0.0));
    std::vector<double> slot_nll(kReduceSlots, 0.0);
    run_slots(kReduceSlots, tcfg.threads, [&](std::size_t slot) {
      for (std::size_t i = slot; i < corpus.size(); i += kReduceSlots)
        slot_nll[slot] += sequence_nll_grad(scratch, corpus[i], slot_grad[slot]);
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
  opt.max_epochs = tcfg.max_epochs;
  opt.tol = tcfg.tol;
  minimize_batch_gd(theta, objective, opt);
  crf_detail::unpack(theta, model);
  return model;
}

// ---------------------------------------------------------------------------
// Serialization: versioned text format.
// ---------------------------------------------------------------------------

inline void CrfModel::save(std::ostream& out) const {
  out << "CSKIT-CRF v1\n";
  out << "labels";
  for (const auto& l : labels) out << ' ' << l;
  out << '\n';
  out << "templates current=" << templates.use_current
      << " prev=" << templates.prev_window << " next=" << templates.next_window
      << " stem=" << templates.use_stem << " first=" << templates.use_first_char
      << " last=" << templates.use_last_char << " pos=" << templates.use_pos
      << '\n';
  out << "affixes " << templates.effective_affixes().to_line() << '\n';
  out.precision(17);
  for (std::size_t f = 0; f < feature_names.size(); ++f)
    for (std::size_t y = 0; y < labels.size(); ++y)
      if (state_w[f * labels.size() + y] != 0.0)
        out << feature_names[f] << '\t' << labels[y] << '\t'
            << state_w[f * labels.size() + y] << '\n';
  for (std::size_t yp = 0; yp < labels.size(); ++yp)
    for (std::size_t y = 0; y < labels.size(); ++y)
      out << "TRANS\t" << labels[yp] << '\t' << labels[y] << '\t'
          << trans_w[yp * labels.size() + y] << '\n';
  for (std::size_t y = 0; y < labels.size(); ++y)
    out << "TRANS\t" << kBosToken << '\t' << labels[y] << '\t' << bos_w[y] << '\n';
  for (std::size_t y = 0; y < labels.size(); ++y)
    out << "TRANS\t" << labels[y] << '\t' << kEosToken << '\t' << eos_w[y] << '\n';
}

inline CrfModel CrfModel::load(std::istream& in) {
  CrfModel m;
  std::string line;
  if (!std::getline(in, line) || line != "CSKIT-CRF v1")
    throw ParseError("bad CRF model header", 1);
  if (!std::getline(in, line) || line.rfind("labels", 0) != 0)
    throw ParseError("expected labels line", 2);
  {
    std::istringstream ls(line);
    std::string kw, label;
    ls >> kw;
    while (ls >> label) m.labels.push_back(label);
  }
  if (!std::getline(in, line) || line.rfind("templates", 0) != 0)
    throw ParseError("expected templates line", 3);
  {
    std::istringstream ts(line.substr(9));
    std::string item;
    while (ts >> item) {
      const auto eq = item.find('=');
      const std::string key = item.substr(0, eq);
      const int value = std::stoi(item.substr(eq + 1));
      if (key == "current") m.templates.use_current = value;
      else if (key == "prev") m.templates.prev_window = value;
      else if (key == "next") m.templates.next_window = value;
      else if (key == "stem") m.templates.use_stem = value;
      else if (key == "first") m.templates.use_first_char = value;
      else if (key == "last") m.templates.use_last_char = value;
      else if (key == "pos") m.templates.use_pos = value;
    }
  }
  if (!std::getline(in, line) || line.rfind("affixes ", 0) != 0)
    throw ParseError("expected affixes line", 4);
  m.templates.affixes =
      std::make_shared<AffixTable>(AffixTable::from_line(line.substr(8)));
  const std::size_t L = m.labels.size();
  m.trans_w.assign(L * L, 0.0);
  m.bos_w.assign(L, 0.0);
  m.eos_w.assign(L, 0.0);
  std::vector<std::tuple<std::string, std::string, double>> state_entries;
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
      const double w = std::stod(cols[3]);
      if (cols[1] == kBosToken)
        m.bos_w[m.label_id(cols[2])] = w;
      else if (cols[2] == kEosToken)
        m.eos_w[m.label_id(cols[1])] = w;
      else
        m.trans_w[m.label_id(cols[1]) * L + m.label_id(cols[2])] = w;
    } else if (cols.size() == 3) {
      state_entries.emplace_back(cols[0], cols[1], std::stod(cols[2]));
    } else {
      throw ParseError("unrecognized model line", lineno);
    }
  }
  for (const auto& [feat, label, w] : state_entries) {
    if (!m.feature_index.count(feat)) {
      m.feature_index[feat] = m.feature_names.size();
      m.feature_names.push_back(feat);
    }
  }
  m.state_w.assign(m.feature_names.size() * L, 0.0);
  for (const auto& [feat, label, w] : state_entries)
    m.state_w[m.feature_index[feat] * L + m.label_id(label)] = w;
  return m;
}

// ---------------------------------------------------------------------------
// Language-routing baseline: run every monolingual tagger over the full
// sentence, then pick each token's tag from the model matching its script.
// ---------------------------------------------------------------------------

struct RoutingConfig {
  std::optional<Script> default_script;  // used for Mixed/Other/Digit/Punct
};

inline std::vector<std::string> route_tag(
    const LabeledSentence& sentence,
    const std::map<Script, const CrfModel*>& taggers,
    const RoutingConfig& cfg = {}) {
  if (taggers.empty()) throw ValidationError("route_tag: no taggers");
  std::map<Script, std::vector<std::string>> predictions;
  for (const auto& [script, model] : taggers)
    predictions[script] = decode(*model, sentence);
  std::vector<std::string> tags(sentence.tokens.size());
  for (std::size_t t = 0; t < sentence.tokens.size(); ++t) {
    Script s = detect_script(sentence.tokens[t].surface);
    if (!predictions.count(s)) {
      if (cfg.default_script && predictions.count(*cfg.default_script)) {
        s = *cfg.default_script;
      } else {
        throw ValidationError(std::string("no tagger for script ") +
                              to_string(s) + " and no default configured");
      }
    }
    tags[t] = predictions[s][t];
  }
  return tags;
}

}  // namespace cskit
