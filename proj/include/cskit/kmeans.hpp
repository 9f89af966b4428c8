#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "cskit/embedding.hpp"
#include "cskit/error.hpp"
#include "cskit/parallel.hpp"
#include "cskit/rng.hpp"

namespace cskit {

// Fitted k-means over word vectors. Assignments are the categorical
// cluster-ID features consumed by the CRF; out-of-vocabulary words map to
// the reserved UNK symbol.
struct ClusterModel {
  static constexpr const char* kUnk = "UNK";

  std::size_t k = 0;
  std::size_t dim = 0;
  std::vector<double> centroids;          // k x dim, row-major
  std::vector<std::string> words;         // table order
  std::vector<int> assignments;           // parallel to words
  double inertia = 0.0;
  std::unordered_map<std::string, int> index;

  std::string cluster_id(const std::string& word) const {
    const auto it = index.find(word);
    return it == index.end() ? std::string(kUnk) : std::to_string(it->second);
  }

  void save(std::ostream& out) const {
    out << "CSKIT-CLUSTERS v1\n";
    out << "k " << k << " dim " << dim << " words " << words.size()
        << " inertia " << inertia << '\n';
    for (std::size_t i = 0; i < words.size(); ++i)
      out << words[i] << '\t' << assignments[i] << '\n';
    out << "[centroids]\n";
    out.precision(17);
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t d = 0; d < dim; ++d)
        out << (d ? " " : "") << centroids[c * dim + d];
      out << '\n';
    }
  }

  static ClusterModel load(std::istream& in) {
    ClusterModel m;
    std::string line;
    if (!std::getline(in, line) || line != "CSKIT-CLUSTERS v1")
      throw ParseError("bad cluster model header", 1);
    if (!std::getline(in, line)) throw ParseError("truncated cluster model", 2);
    std::istringstream hdr(line);
    std::string kw;
    std::size_t nwords = 0;
    hdr >> kw >> m.k >> kw >> m.dim >> kw >> nwords >> kw >> m.inertia;
    std::size_t lineno = 2;
    for (std::size_t i = 0; i < nwords; ++i) {
      if (!std::getline(in, line)) throw ParseError("truncated assignments", ++lineno);
      ++lineno;
      const auto tab = line.find('\t');
      if (tab == std::string::npos) throw ParseError("expected word<TAB>id", lineno);
      m.words.push_back(line.substr(0, tab));
      m.assignments.push_back(std::stoi(line.substr(tab + 1)));
      m.index[m.words.back()] = m.assignments.back();
    }
    if (!std::getline(in, line) || line != "[centroids]")
      throw ParseError("expected [centroids] block", ++lineno);
    m.centroids.resize(m.k * m.dim);
    for (std::size_t c = 0; c < m.k; ++c) {
      if (!std::getline(in, line)) throw ParseError("truncated centroids", ++lineno);
      ++lineno;
      std::istringstream row(line);
      for (std::size_t d = 0; d < m.dim; ++d) row >> m.centroids[c * m.dim + d];
    }
    return m;
  }
};

struct KmeansConfig {
  std::size_t k = 50;
  std::uint64_t seed = 0;
  std::size_t max_iters = 100;
  double tol = 1e-7;  // relative objective improvement
  int threads = 1;
};

namespace detail {

inline double sq_dist(std::span<const double> a, const double* b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    s += diff * diff;
  }
  return s;
}

}  // namespace detail

// Lloyd iterations over L2-normalized vectors with k-means++ seeding.
// Euclidean distance on the normalized sphere is rank-equivalent to cosine,
// which is all the cluster-ID features need. The objective is checked to be
// non-increasing on every iteration. Empty clusters are re-seeded to the
// point farthest from its centroid.
inline ClusterModel kmeans(const EmbeddingTable& table, const KmeansConfig& cfg,
                           std::vector<std::string>* warnings = nullptr) {
  const std::size_t n = table.size();
  const std::size_t dim = table.dim();
  if (cfg.k == 0) throw ValidationError("kmeans: k must be >= 1");
  if (n == 0) throw ValidationError("kmeans: empty vocabulary");

  ClusterModel model;
  model.dim = dim;
  model.words = table.words();

  // Normalized copies.
  std::vector<double> points(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = table.vector(i);
    const double nv = EmbeddingTable::norm(v);
    for (std::size_t d = 0; d < dim; ++d)
      points[i * dim + d] = nv > 0.0 ? v[d] / nv : 0.0;
  }
  const auto point = [&](std::size_t i) {
    return std::span<const double>(points.data() + i * dim, dim);
  };

  if (cfg.k >= n) {
    // Degenerate: every word its own cluster; surplus centroids unused.
    if (cfg.k > n && warnings)
      warnings->push_back("k=" + std::to_string(cfg.k) + " exceeds vocabulary " +
                          std::to_string(n) + "; extra clusters unused");
    model.k = cfg.k;
    model.centroids.assign(cfg.k * dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      std::copy_n(points.data() + i * dim, dim, model.centroids.data() + i * dim);
      model.assignments.push_back(static_cast<int>(i));
      model.index[model.words[i]] = static_cast<int>(i);
    }
    model.inertia = 0.0;
    return model;
  }

  model.k = cfg.k;
  const std::size_t k = cfg.k;
  std::mt19937_64 gen(cfg.seed);

  // k-means++ seeding.
  std::vector<double> centroids(k * dim);
  std::vector<double> d2(n);
  {
    const std::size_t first = next_index(gen, n);
    std::copy_n(points.data() + first * dim, dim, centroids.data());
    for (std::size_t i = 0; i < n; ++i)
      d2[i] = detail::sq_dist(point(i), centroids.data());
    for (std::size_t c = 1; c < k; ++c) {
      const std::size_t pick = next_weighted_index(gen, d2);
      std::copy_n(points.data() + pick * dim, dim, centroids.data() + c * dim);
      for (std::size_t i = 0; i < n; ++i)
        d2[i] = std::min(d2[i], detail::sq_dist(point(i), centroids.data() + c * dim));
    }
  }

  std::vector<int> assign(n, 0);
  double prev_obj = std::numeric_limits<double>::infinity();
  for (std::size_t iter = 0; iter < cfg.max_iters; ++iter) {
    // Assignment step (parallel over fixed slots, reduced in slot order).
    std::vector<double> slot_obj(kReduceSlots, 0.0);
    run_slots(kReduceSlots, cfg.threads, [&](std::size_t slot) {
      for (std::size_t i = slot; i < n; i += kReduceSlots) {
        double best = detail::sq_dist(point(i), centroids.data());
        int best_c = 0;
        for (std::size_t c = 1; c < k; ++c) {
          const double d = detail::sq_dist(point(i), centroids.data() + c * dim);
          if (d < best) {
            best = d;
            best_c = static_cast<int>(c);
          }
        }
        assign[i] = best_c;
        slot_obj[slot] += best;
      }
    });
    double obj = 0.0;
    for (double s : slot_obj) obj += s;
    if (obj > prev_obj + 1e-9 * (1.0 + std::abs(prev_obj)))
      throw std::logic_error("kmeans objective increased");
    const bool converged =
        prev_obj - obj <= cfg.tol * (1.0 + std::abs(prev_obj));
    prev_obj = obj;
    if (converged && iter > 0) break;

    // Update step.
    std::vector<double> sums(k * dim, 0.0);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[assign[i]];
      for (std::size_t d = 0; d < dim; ++d)
        sums[assign[i] * dim + d] += points[i * dim + d];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // Re-seed to the point farthest from its current centroid.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d =
              detail::sq_dist(point(i), centroids.data() + assign[i] * dim);
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        std::copy_n(points.data() + far * dim, dim, centroids.data() + c * dim);
        continue;
      }
      for (std::size_t d = 0; d < dim; ++d)
        centroids[c * dim + d] = sums[c * dim + d] / static_cast<double>(counts[c]);
    }
  }

  model.centroids = std::move(centroids);
  model.assignments = std::move(assign);
  model.inertia = prev_obj;
  for (std::size_t i = 0; i < n; ++i)
    model.index[model.words[i]] = model.assignments[i];
  return model;
}

}  // namespace cskit
