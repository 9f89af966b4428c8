#pragma once

#include <cmath>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "cskit/corpus.hpp"
#include "cskit/error.hpp"
#include "cskit/numeric.hpp"
#include "cskit/utf8.hpp"

namespace cskit {

struct NbConfig {
  std::size_t n_min = 1;
  std::size_t n_max = 3;
  double smoothing = 1.0;  // add-k
};

// Whole-token LID baseline: TF-IDF over character n-grams (n in [1,3]) fed
// into a multinomial Naive Bayes classifier. No segmentation; a
// multi-segment gold record is the single class "MIXED" here.
//
// TF is the raw n-gram count in the token; IDF is ln((1+N)/(1+df)) + 1 with
// N the number of training tokens. N-grams unseen in training are skipped at
// prediction time, so a token of entirely unseen n-grams falls back to the
// class priors.
class NbModel {
 public:
  static NbModel train(const std::vector<std::pair<std::string, std::string>>&
                           token_label_pairs,
                       const NbConfig& cfg = {}) {
    if (token_label_pairs.empty())
      throw ValidationError("train_nb: empty corpus");
    NbModel m;
    m.cfg_ = cfg;

    // Vocabulary and document frequencies.
    std::map<std::string, std::size_t> df;
    std::vector<std::map<std::string, std::size_t>> doc_tf;
    doc_tf.reserve(token_label_pairs.size());
    for (const auto& [token, label] : token_label_pairs) {
      if (token.empty()) throw ValidationError("train_nb: empty token");
      auto tf = ngram_counts(token, cfg);
      for (const auto& [g, c] : tf) ++df[g];
      doc_tf.push_back(std::move(tf));
      if (!m.class_index_.count(label)) {
        m.class_index_[label] = m.classes_.size();
        m.classes_.push_back(label);
      }
    }
    for (const auto& [g, d] : df) {
      m.vocab_[g] = m.idf_.size();
      m.idf_.push_back(std::log((1.0 + static_cast<double>(doc_tf.size())) /
                                (1.0 + static_cast<double>(d))) +
                       1.0);
    }

    // Per-class accumulated TF-IDF mass.
    const std::size_t C = m.classes_.size();
    const std::size_t V = m.vocab_.size();
    std::vector<double> mass(C * V, 0.0);
    std::vector<double> class_docs(C, 0.0);
    for (std::size_t d = 0; d < doc_tf.size(); ++d) {
      const std::size_t c = m.class_index_[token_label_pairs[d].second];
      class_docs[c] += 1.0;
      for (const auto& [g, tf] : doc_tf[d]) {
        const std::size_t f = m.vocab_[g];
        mass[c * V + f] += static_cast<double>(tf) * m.idf_[f];
      }
    }
    m.feature_log_prob_.assign(C * V, 0.0);
    m.class_log_prior_.resize(C);
    for (std::size_t c = 0; c < C; ++c) {
      double total = 0.0;
      for (std::size_t f = 0; f < V; ++f) total += mass[c * V + f];
      const double denom = total + cfg.smoothing * static_cast<double>(V);
      for (std::size_t f = 0; f < V; ++f)
        m.feature_log_prob_[c * V + f] =
            std::log((mass[c * V + f] + cfg.smoothing) / denom);
      m.class_log_prior_[c] =
          std::log(class_docs[c] / static_cast<double>(doc_tf.size()));
    }
    return m;
  }

  // Normalized posterior over classes, in class order.
  std::vector<double> posterior(const std::string& token) const {
    if (token.empty()) throw ValidationError("nb_tag: empty token");
    const std::size_t C = classes_.size();
    const std::size_t V = vocab_.size();
    std::vector<double> logp = class_log_prior_;
    for (const auto& [g, tf] : ngram_counts(token, cfg_)) {
      const auto it = vocab_.find(g);
      if (it == vocab_.end()) continue;  // unseen n-gram
      const double x = static_cast<double>(tf) * idf_[it->second];
      for (std::size_t c = 0; c < C; ++c)
        logp[c] += x * feature_log_prob_[c * V + it->second];
    }
    const double z = log_sum_exp(logp);
    for (double& v : logp) v = std::exp(v - z);
    return logp;
  }

  // Class with the highest posterior; ties go to the earlier class.
  std::string tag(const std::string& token) const {
    const auto post = posterior(token);
    std::size_t best = 0;
    for (std::size_t c = 1; c < post.size(); ++c)
      if (post[c] > post[best]) best = c;
    return classes_[best];
  }

  const std::vector<std::string>& classes() const { return classes_; }

  static std::map<std::string, std::size_t> ngram_counts(
      const std::string& token, const NbConfig& cfg) {
    const std::u32string chars = utf8::decode(token);
    std::map<std::string, std::size_t> counts;
    for (std::size_t n = cfg.n_min; n <= cfg.n_max && n <= chars.size(); ++n)
      for (std::size_t i = 0; i + n <= chars.size(); ++i)
        ++counts[utf8::encode(std::u32string_view(chars).substr(i, n))];
    return counts;
  }

 private:
  NbConfig cfg_;
  std::vector<std::string> classes_;
  std::unordered_map<std::string, std::size_t> class_index_;
  std::unordered_map<std::string, std::size_t> vocab_;
  std::vector<double> idf_;
  std::vector<double> feature_log_prob_;  // C x V
  std::vector<double> class_log_prior_;
};

// Whole-token training pairs from a seglid corpus; multi-segment records
// collapse to the MIXED class, matching the baseline that does not segment.
inline std::vector<std::pair<std::string, std::string>> nb_training_pairs(
    const SegLidCorpus& corpus) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const SegLidSentence& sentence : corpus)
    for (const SegLidRecord& rec : sentence)
      pairs.emplace_back(rec.token, rec.segments.size() > 1
                                        ? "MIXED"
                                        : rec.segments[0].label);
  return pairs;
}

}  // namespace cskit
