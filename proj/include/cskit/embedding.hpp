#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cskit/error.hpp"

namespace cskit {

// Static word-vector store in the usual text format: one `word v1 v2 ...`
// line per entry, optional leading `vocab dim` header.
class EmbeddingTable {
 public:
  static EmbeddingTable load(std::istream& in,
                             std::vector<std::string>* warnings = nullptr) {
    EmbeddingTable table;
    std::string line;
    std::size_t lineno = 0;
    bool first_line = true;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      std::istringstream fields(line);
      std::string word;
      if (!(fields >> word)) continue;
      std::vector<double> vec;
      double v;
      std::string extra;
      while (fields >> extra) {
        try {
          std::size_t used = 0;
          v = std::stod(extra, &used);
          if (used != extra.size()) throw std::invalid_argument(extra);
        } catch (const std::exception&) {
          throw ParseError("cannot parse '" + extra + "' as a real", lineno);
        }
        vec.push_back(v);
      }
      if (first_line && vec.size() == 1 && word.find_first_not_of("0123456789") ==
                                               std::string::npos) {
        // `vocab dim` header
        first_line = false;
        continue;
      }
      first_line = false;
      if (vec.empty()) throw ParseError("entry '" + word + "' has no vector", lineno);
      if (table.dim_ == 0) table.dim_ = vec.size();
      if (vec.size() != table.dim_)
        throw ParseError("vector length " + std::to_string(vec.size()) +
                             " does not match table dim " +
                             std::to_string(table.dim_),
                         lineno);
      if (table.index_.count(word)) {
        if (warnings)
          warnings->push_back("duplicate word '" + word + "' ignored (line " +
                              std::to_string(lineno) + ")");
        continue;
      }
      table.index_[word] = table.words_.size();
      table.words_.push_back(word);
      table.data_.insert(table.data_.end(), vec.begin(), vec.end());
    }
    return table;
  }

  void insert(const std::string& word, const std::vector<double>& vec) {
    if (dim_ == 0) dim_ = vec.size();
    if (vec.size() != dim_)
      throw ValidationError("vector length does not match table dim");
    if (index_.count(word)) throw ValidationError("duplicate word " + word);
    index_[word] = words_.size();
    words_.push_back(word);
    data_.insert(data_.end(), vec.begin(), vec.end());
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return words_.size(); }
  bool contains(const std::string& word) const { return index_.count(word) > 0; }
  const std::vector<std::string>& words() const { return words_; }

  std::span<const double> vector(std::size_t idx) const {
    return {data_.data() + idx * dim_, dim_};
  }

  std::span<const double> vector(const std::string& word) const {
    const auto it = index_.find(word);
    if (it == index_.end())
      throw ValidationError("out-of-vocabulary word '" + word + "'");
    return vector(it->second);
  }

  double cosine(const std::string& a, const std::string& b) const {
    return cosine_vec(vector(a), vector(b));
  }

  // Neighbors by descending cosine; ties broken lexicographically. The query
  // and `exclude` never appear; zero vectors are unrankable and skipped.
  std::vector<std::pair<std::string, double>> nearest(
      const std::string& word, std::size_t n,
      const std::set<std::string>& exclude = {}) const {
    const auto query = vector(word);
    if (norm(query) == 0.0)
      throw ValidationError("zero vector for word '" + word + "'");
    return rank_by_cosine(query, n, [&](const std::string& w) {
      return w == word || exclude.count(w) > 0;
    });
  }

  // 3CosAdd analogy: argmax over vocabulary \ {a,b,c} of
  // cosine(x, vec(b) - vec(a) + vec(c)).
  std::string analogy(const std::string& a, const std::string& b,
                      const std::string& c) const {
    const auto va = vector(a), vb = vector(b), vc = vector(c);
    std::vector<double> target(dim_);
    for (std::size_t d = 0; d < dim_; ++d) target[d] = vb[d] - va[d] + vc[d];
    if (norm(target) == 0.0)
      throw ValidationError("analogy target is the zero vector");
    const auto ranked = rank_by_cosine(
        target, 1, [&](const std::string& w) { return w == a || w == b || w == c; });
    if (ranked.empty())
      throw ValidationError("analogy: vocabulary exhausted by exclusions");
    return ranked[0].first;
  }

  static double cosine_vec(std::span<const double> a, std::span<const double> b) {
    const double na = norm(a), nb = norm(b);
    if (na == 0.0 || nb == 0.0)
      throw ValidationError("cosine of a zero vector is undefined");
    double dot = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) dot += a[d] * b[d];
    return dot / (na * nb);
  }

  static double norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  }

 private:
  template <class Skip>
  std::vector<std::pair<std::string, double>> rank_by_cosine(
      std::span<const double> target, std::size_t n, Skip&& skip) const {
    std::vector<std::pair<std::string, double>> scored;
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (skip(words_[i])) continue;
      const auto v = vector(i);
      if (norm(v) == 0.0) continue;
      scored.emplace_back(words_[i], cosine_vec(v, target));
    }
    std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
      if (x.second != y.second) return x.second > y.second;
      return x.first < y.first;
    });
    if (scored.size() > n) scored.resize(n);
    return scored;
  }

  std::size_t dim_ = 0;
  std::vector<std::string> words_;  // load order, drives determinism
  std::vector<double> data_;        // row-major words x dim
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace cskit
