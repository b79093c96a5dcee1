#pragma once

// Brute-force reference implementations used only by the tests. They are
// written from the textbook definitions with plain loops and share no code
// with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <vector>

namespace oracle {

using Points = std::vector<std::vector<double>>;

inline double dist2(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

inline double dist(const std::vector<double>& a, const std::vector<double>& b) { return std::sqrt(dist2(a, b)); }

inline int max_label(const std::vector<int>& labels) { return *std::max_element(labels.begin(), labels.end()); }

inline Points means(const Points& x, const std::vector<int>& labels) {
  const int k = max_label(labels) + 1;
  Points m(k, std::vector<double>(x[0].size(), 0.0));
  std::vector<int> count(k, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    ++count[labels[i]];
    for (std::size_t c = 0; c < x[i].size(); ++c) m[labels[i]][c] += x[i][c];
  }
  for (int j = 0; j < k; ++j)
    for (double& v : m[j]) v /= count[j];
  return m;
}

inline double silhouette(const Points& x, const std::vector<int>& labels) {
  const int k = max_label(labels) + 1;
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<double> sum(k, 0.0);
    std::vector<int> cnt(k, 0);
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (j == i) continue;
      sum[labels[j]] += dist(x[i], x[j]);
      ++cnt[labels[j]];
    }
    if (cnt[labels[i]] == 0) continue;  // singleton: s = 0
    const double a = sum[labels[i]] / cnt[labels[i]];
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c)
      if (c != labels[i] && cnt[c] > 0) b = std::min(b, sum[c] / cnt[c]);
    total += (b - a) / std::max(a, b);
  }
  return total / static_cast<double>(x.size());
}

inline double davies_bouldin(const Points& x, const std::vector<int>& labels) {
  const auto m = means(x, labels);
  const int k = static_cast<int>(m.size());
  std::vector<double> s(k, 0.0);
  std::vector<int> cnt(k, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    s[labels[i]] += dist(x[i], m[labels[i]]);
    ++cnt[labels[i]];
  }
  for (int j = 0; j < k; ++j) s[j] /= cnt[j];
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    double worst = 0.0;
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      const double d = dist(m[i], m[j]);
      worst = std::max(worst, d == 0.0 ? std::numeric_limits<double>::infinity() : (s[i] + s[j]) / d);
    }
    total += worst;
  }
  return total / k;
}

inline double calinski_harabasz(const Points& x, const std::vector<int>& labels) {
  const auto m = means(x, labels);
  const int k = static_cast<int>(m.size());
  const auto n = static_cast<double>(x.size());
  std::vector<double> grand(x[0].size(), 0.0);
  for (const auto& p : x)
    for (std::size_t c = 0; c < p.size(); ++c) grand[c] += p[c] / n;
  double ssw = 0.0, ssb = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) ssw += dist2(x[i], m[labels[i]]);
  for (std::size_t i = 0; i < x.size(); ++i) ssb += dist2(m[labels[i]], grand);
  if (ssw == 0.0) return std::numeric_limits<double>::infinity();
  return (ssb / (k - 1)) / (ssw / (n - k));
}

inline double distortion(const Points& x, const std::vector<int>& labels, const Points& centroids) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += dist2(x[i], centroids[labels[i]]);
  return s;
}

struct Pairs {
  double a = 0, b = 0, c = 0, d = 0;
};

inline Pairs pairs(const std::vector<int>& u, const std::vector<int>& v) {
  Pairs p;
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = i + 1; j < u.size(); ++j) {
      const bool su = u[i] == u[j], sv = v[i] == v[j];
      if (su && sv) p.a += 1;
      else if (su) p.b += 1;
      else if (sv) p.c += 1;
      else p.d += 1;
    }
  return p;
}

inline double rand_index(const std::vector<int>& u, const std::vector<int>& v) {
  const auto p = pairs(u, v);
  return (p.a + p.d) / (p.a + p.b + p.c + p.d);
}

// Pair-count form of the adjusted Rand index.
inline double adjusted_rand_index(const std::vector<int>& u, const std::vector<int>& v) {
  const auto p = pairs(u, v);
  const double den = (p.a + p.b) * (p.b + p.d) + (p.a + p.c) * (p.c + p.d);
  if (den == 0.0) return 1.0;
  return 2.0 * (p.a * p.d - p.b * p.c) / den;
}

inline std::vector<int> nearest(const Points& x, const Points& c) {
  std::vector<int> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    int best = 0;
    for (std::size_t j = 1; j < c.size(); ++j)
      if (dist2(x[i], c[j]) < dist2(x[i], c[best])) best = static_cast<int>(j);
    out[i] = best;
  }
  return out;
}

/// Every labeling of n points into exactly two non-empty clusters with
/// point 0 in cluster 0.
inline std::vector<std::vector<int>> two_partitions(std::size_t n) {
  std::vector<std::vector<int>> out;
  for (std::uint32_t mask = 1; mask < (1u << (n - 1)); ++mask) {
    std::vector<int> labels(n, 0);
    for (std::size_t i = 1; i < n; ++i) labels[i] = (mask >> (i - 1)) & 1u;
    out.push_back(labels);
  }
  return out;
}

struct Optimum {
  double value = 0.0;
  std::vector<int> labels;
  Points centroids;
};

inline Optimum best_wcss_two(const Points& x) {
  Optimum best{std::numeric_limits<double>::infinity(), {}, {}};
  for (const auto& labels : two_partitions(x.size())) {
    const auto m = means(x, labels);
    const double v = distortion(x, labels, m);
    if (v < best.value) best = {v, labels, m};
  }
  return best;
}

/// Largest centroid objective sum t/(t+|c-x|) over all 2-partitions of 1-D
/// data. Between consecutive members each term is convex in c, so the
/// per-cluster maximum sits on a member and scanning members is exact.
inline Optimum best_rnkm_two_1d(const std::vector<double>& x, double t) {
  Optimum best{-1.0, {}, {}};
  for (const auto& labels : two_partitions(x.size())) {
    double total = 0.0;
    Points cents(2);
    for (int j = 0; j < 2; ++j) {
      double best_c = 0.0, best_v = -1.0;
      for (std::size_t p = 0; p < x.size(); ++p) {
        if (labels[p] != j) continue;
        double v = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
          if (labels[i] == j) v += t / (t + std::abs(x[p] - x[i]));
        if (v > best_v) best_v = v, best_c = x[p];
      }
      total += best_v;
      cents[j] = {best_c};
    }
    if (total > best.value) best = {total, labels, cents};
  }
  return best;
}

inline Points random_points(std::mt19937_64& gen, std::size_t n, std::size_t d, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Points p(n, std::vector<double>(d));
  for (auto& row : p)
    for (double& v : row) v = u(gen);
  return p;
}

}  // namespace oracle
