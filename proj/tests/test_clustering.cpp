#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "rnkm/clustering.hpp"
#include "rnkm/error.hpp"
#include "rnkm/validation.hpp"
#include "test_support.hpp"

using namespace rnkm;
using namespace rnkm::cluster;
using testutil::column;

namespace {

Matrix blobs(std::mt19937_64& gen, const std::vector<std::vector<double>>& centres, std::size_t per, double sd) {
  std::normal_distribution<double> g(0.0, sd);
  const std::size_t d = centres[0].size();
  Matrix x(centres.size() * per, d);
  for (std::size_t c = 0; c < centres.size(); ++c)
    for (std::size_t i = 0; i < per; ++i)
      for (std::size_t j = 0; j < d; ++j) x(c * per + i, j) = centres[c][j] + g(gen);
  return x;
}

std::vector<double> sorted_column(const Matrix& m) {
  std::vector<double> v(m.values().begin(), m.values().end());
  std::sort(v.begin(), v.end());
  return v;
}

bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  return oracle::adjusted_rand_index(a, b) == 1.0;
}

}  // namespace

TEST_CASE("partition validation") {
  const auto p = Partition::from_labels({0, 1, 1, 0}, 2);
  CHECK(p.is_valid());
  CHECK(p.counts() == std::vector<std::size_t>{2, 2});
  CHECK_THROWS_AS(Partition::from_labels({0, 0, 0}, 2), Error);
  CHECK_THROWS_AS(Partition::from_labels({0, 2}, 2), Error);
  CHECK_THROWS_AS(Partition::from_labels({0, -1}, 2), Error);
  Partition bad{{0, 0}, 2};
  CHECK_FALSE(bad.is_valid());
}

TEST_CASE("centroid objective") {
  const Matrix x = column({0.0, 1.0});
  CHECK(objective_rnkm(x, std::vector<int>{0, 0}, column({0.5}), 1.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  const Matrix y = column({0.0, 1.0, 10.0, 11.0});
  CHECK(objective_rnkm(y, std::vector<int>{0, 1, 2, 3}, y, 0.3) == 4.0);
  CHECK_THROWS_AS(objective_rnkm(x, std::vector<int>{0, 0}, column({0.5}), 0.0), Error);

  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pts = oracle::random_points(gen, 15, 3, -2, 2);
    const auto cs = oracle::random_points(gen, 3, 3, -2, 2);
    std::vector<int> labels(15);
    for (auto& l : labels) l = static_cast<int>(gen() % 3);
    double naive = 0.0;
    for (std::size_t i = 0; i < 15; ++i) naive += 0.7 / (0.7 + oracle::dist(pts[i], cs[labels[i]]));
    CHECK(objective_rnkm(testutil::to_matrix(pts), labels, testutil::to_matrix(cs), 0.7) ==
          doctest::Approx(naive).epsilon(1e-12));
  }
}

TEST_CASE("average within-cluster gamma") {
  CHECK(average_within_cluster_gamma(column({3.0}), 1.0) == 0.0);
  CHECK(average_within_cluster_gamma(column({0.0, 1.0}), 1.0) == 0.25);
  CHECK(average_within_cluster_gamma(column({2.0, 2.0, 2.0}), 5.0) == 1.0);
  const Matrix x = column({0.0, 1.0, 5.0, 5.0, 5.0});
  const auto p = Partition::from_labels({0, 0, 1, 1, 1}, 2);
  CHECK(objective_pairwise(x, p, 1.0) == doctest::Approx(1.25));
}

TEST_CASE("gamma assignment examples") {
  CHECK(rnkm_assign(column({0.0, 10.0}), column({0.0, 10.0}), 0.5) == std::vector<int>{0, 1});
  CHECK(rnkm_assign(column({1.0}), column({0.0, 2.0}), 3.0) == std::vector<int>{0});
  CHECK(rnkm_assign(column({5.0, 6.0}), column({0.0, 100.0}), 1.0) == std::vector<int>{0, 0});
  CHECK_THROWS_AS(rnkm_assign(column({1.0}), column({0.0}), 0.0), Error);
  CHECK_THROWS_AS(rnkm_assign(column({1.0}), column({0.0}), -2.0), Error);
}

TEST_CASE("gamma assignment equals nearest centroid") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 100; ++trial) {
    // Integer coordinates make exact ties common.
    std::uniform_int_distribution<int> u(-3, 3);
    oracle::Points pts(20, std::vector<double>(2)), cs(4, std::vector<double>(2));
    for (auto& p : pts)
      for (double& v : p) v = u(gen);
    for (auto& c : cs)
      for (double& v : c) v = u(gen);
    const auto expect = oracle::nearest(pts, cs);
    for (double t : {0.01, 1.0, 100.0}) {
      CHECK(rnkm_assign(testutil::to_matrix(pts), testutil::to_matrix(cs), t) == expect);
      CHECK(nearest_centroid(testutil::to_matrix(pts), testutil::to_matrix(cs)) == expect);
    }
  }
}

TEST_CASE("single-t run on the four-point line") {
  const Matrix x = column({0.0, 1.0, 10.0, 11.0});
  const auto r = rnkm_single_t(x, 2, 1.0, column({0.0, 10.0}));
  CHECK(r.partition.labels == std::vector<int>{0, 0, 1, 1});
  CHECK(r.t == 1.0);
  CHECK(r.converged);
  // The cluster means {0.5, 10.5} would give 8/3; the run keeps the
  // exhaustive optimum at the data points instead.
  const auto opt = oracle::best_rnkm_two_1d({0.0, 1.0, 10.0, 11.0}, 1.0);
  CHECK(opt.value == doctest::Approx(3.0));
  CHECK(r.objective_trace.back() == doctest::Approx(opt.value).epsilon(1e-12));
  CHECK(r.objective_trace.back() > objective_rnkm(x, r.partition.labels, column({0.5, 10.5}), 1.0));
  CHECK(sorted_column(r.centroids) == std::vector<double>{0.0, 10.0});
}

TEST_CASE("single-t run errors") {
  const Matrix x = column({0.0, 1.0, 2.0});
  CHECK_THROWS_AS(rnkm_single_t(x, 4, 1.0, column({0, 1, 2, 3})), Error);
  CHECK_THROWS_AS(rnkm_single_t(x, 1, 1.0, column({0})), Error);
  CHECK_THROWS_AS(rnkm_single_t(x, 2, 0.0, column({0, 1})), Error);
  CHECK_THROWS_AS(rnkm_single_t(x, 2, 1.0, column({0, 1, 2})), Error);
}

TEST_CASE("single-t traces never decrease and partitions stay full") {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 20 + gen() % 60, d = 1 + gen() % 4, k = 2 + gen() % 4;
    const Matrix x = testutil::to_matrix(oracle::random_points(gen, n, d, 0, 1));
    const double t = std::vector<double>{0.1, 1.0, 10.0}[trial % 3];
    const Matrix init = trial % 2 ? random_init(x, k, trial) : spectral_sampling_init(x, k, t, trial);
    const auto r = rnkm_single_t(x, k, t, init);
    for (std::size_t i = 1; i < r.objective_trace.size(); ++i)
      CHECK(r.objective_trace[i] >= r.objective_trace[i - 1] - 1e-9);
    CHECK(r.partition.is_valid());
    CHECK(r.centroids.rows() == k);
  }
}

TEST_CASE("observer sees the initial state and every iteration") {
  const Matrix x = column({0.0, 0.2, 5.0, 5.3, 9.0});
  std::vector<int> its;
  IterationOptions opts;
  opts.max_iters = 1;
  rnkm_single_t(x, 2, 1.0, column({0.0, 9.0}), opts, [&](const Frame& f) {
    its.push_back(f.iteration);
    CHECK(f.centroids->rows() == 2);
    CHECK(f.labels->size() == 5);
  });
  CHECK(its == std::vector<int>{0, 1});
}

TEST_CASE("stepper with a changing t keeps a valid state") {
  const Matrix x = column({0.0, 0.5, 4.0, 4.5, 9.0, 9.5});
  RnkmStepper s(x, column({0.0, 4.0, 9.0}), 0.5);
  for (double t : {0.5, 1.0, 2.0, 4.0}) {
    s.step(t);
    CHECK(s.t() == t);
    CHECK(s.labels().size() == 6);
  }
  CHECK_THROWS_AS(s.step(0.0), Error);
}

TEST_CASE("spectral sampling initialization") {
  const Matrix x = column({0.0, 0.1, 10.0, 10.1});
  const Matrix c = spectral_sampling_init(x, 2, 1.0, 3);
  const auto v = sorted_column(c);
  CHECK(v[0] == doctest::Approx(0.05));
  CHECK(v[1] == doctest::Approx(10.05));
  CHECK(spectral_sampling_init(x, 2, 1.0, 3) == c);

  const Matrix y = column({0.0, 3.0, 7.0});
  CHECK(sorted_column(spectral_sampling_init(y, 3, 1.0, 0)) == std::vector<double>{0.0, 3.0, 7.0});

  const std::vector<double> ts = {1.0};
  const EigenCache cache(x, ts);
  CHECK(cache.find(1.0) != nullptr);
  CHECK(cache.find(2.0) == nullptr);
  CHECK(spectral_sampling_init(x, 2, 1.0, 3, &cache) == c);
  CHECK_THROWS_AS(spectral_sampling_init(x, 2, 0.0, 3), Error);
}

TEST_CASE("t sweep selection") {
  std::mt19937_64 gen(19);
  const Matrix x = blobs(gen, {{0, 0}, {4, 4}}, 15, 0.5);

  SUBCASE("singleton grid equals the single-t pipeline") {
    const std::vector<double> ts = {1.0};
    const auto sweep = cluster::rnkm(x, 2, ts, {{}, 5});
    const auto single = rnkm_single_t(x, 2, 1.0, spectral_sampling_init(x, 2, 1.0, 5));
    CHECK(sweep.best.partition.labels == single.partition.labels);
    CHECK(sweep.best.centroids == single.centroids);
    CHECK(sweep.best.objective_trace == single.objective_trace);
    CHECK(sweep.runs.size() == 1);
  }
  SUBCASE("best silhouette dominates every run, ties go to the smallest t") {
    const std::vector<double> ts = {10.0, 0.1, 1.0};
    const auto sweep = cluster::rnkm(x, 2, ts, {{}, 2});
    REQUIRE(sweep.runs.size() == 3);
    CHECK(sweep.runs[0].t == 0.1);
    double best = -2.0;
    for (const auto& run : sweep.runs) {
      REQUIRE(run.result);
      const double s = validate::silhouette(x, run.result->partition);
      CHECK(s == *run.score);
      CHECK(sweep.best_score >= s);
      best = std::max(best, s);
    }
    CHECK(sweep.best_score == best);
    const auto first_best = std::find_if(sweep.runs.begin(), sweep.runs.end(),
                                         [&](const TRun& r) { return *r.score == best; });
    CHECK(*sweep.best.t == first_best->t);
  }
  SUBCASE("objective score") {
    const std::vector<double> ts = {0.5, 2.0};
    RnkmSweepOptions opts;
    opts.score = SelectionScore::Objective;
    const auto sweep = cluster::rnkm(x, 2, ts, opts);
    CHECK(sweep.best_score == sweep.best.objective_trace.back());
  }
  SUBCASE("bad grids") {
    CHECK_THROWS_AS(cluster::rnkm(x, 2, std::vector<double>{}), Error);
    CHECK_THROWS_AS(cluster::rnkm(x, 2, std::vector<double>{1.0, -1.0}), Error);
  }
  SUBCASE("every run failing is reported") {
    // k = n leaves no valid silhouette for any t.
    const Matrix tiny = column({0.0, 1.0});
    CHECK_THROWS_AS(cluster::rnkm(tiny, 2, std::vector<double>{1.0, 2.0}), Error);
  }
}

TEST_CASE("identical labels across t pick the smallest t") {
  const Matrix x = column({0.0, 0.1, 0.2, 50.0, 50.1, 50.2});
  const std::vector<double> ts = {3.0, 1.0, 2.0};
  const auto sweep = cluster::rnkm(x, 2, ts);
  CHECK(*sweep.best.t == 1.0);
}

TEST_CASE("t grid") {
  const auto g = t_grid(0.1, 10.0, 50, true);
  CHECK(g.size() == 50);
  CHECK(g.front() == 0.1);
  CHECK(g.back() == 10.0);
  CHECK(g[25] / g[24] == doctest::Approx(g[1] / g[0]));
  CHECK(t_grid(1.0, 3.0, 3, false) == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(t_grid(2.0, 5.0, 1) == std::vector<double>{2.0});
  CHECK_THROWS_AS(t_grid(0.0, 1.0, 3), Error);
  CHECK_THROWS_AS(t_grid(1.0, 1.0, 0), Error);
}

TEST_CASE("Lloyd k-means") {
  const Matrix x = column({0.0, 1.0, 10.0, 11.0});
  const auto r = lloyd_kmeans(x, 2, column({0.0, 10.0}));
  CHECK(r.partition.labels == std::vector<int>{0, 0, 1, 1});
  CHECK(r.centroids(0, 0) == 0.5);
  CHECK(r.centroids(1, 0) == 10.5);
  CHECK(r.objective_trace.back() == 1.0);
  CHECK(oracle::best_wcss_two({{0.0}, {1.0}, {10.0}, {11.0}}).value == 1.0);

  const auto self = lloyd_kmeans(x, 4, x);
  CHECK(self.objective_trace.back() == 0.0);

  const Matrix dup = column({1.0, 1.0, 1.0, 1.0, 2.0});
  const auto rd = lloyd_kmeans(dup, 2, column({1.0, 1.0}));
  CHECK(rd.partition.is_valid());

  CHECK_THROWS_AS(lloyd_kmeans(x, 5, column({0, 1, 2, 3, 4})), Error);
}

TEST_CASE("Lloyd WCSS traces never increase") {
  std::mt19937_64 gen(29);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix x = testutil::to_matrix(oracle::random_points(gen, 50, 3, 0, 1));
    const auto r = lloyd_kmeans(x, 4, kmeanspp_init(x, 4, trial));
    for (std::size_t i = 1; i < r.objective_trace.size(); ++i)
      CHECK(r.objective_trace[i] <= r.objective_trace[i - 1] + 1e-9);
    CHECK(r.objective_trace.back() == doctest::Approx(wcss(x, r.partition.labels, r.centroids)));
  }
}

TEST_CASE("k-means++ seeding") {
  const Matrix x = column({0.0, 0.0, 0.0, 10.0});
  for (std::uint64_t seed = 0; seed < 50; ++seed)
    CHECK(sorted_column(kmeanspp_init(x, 2, seed)) == std::vector<double>{0.0, 10.0});
  const Matrix one = kmeanspp_init(x, 1, 4);
  CHECK(one.rows() == 1);
  const Matrix same = column({2.0, 2.0, 2.0});
  CHECK(sorted_column(kmeanspp_init(same, 3, 1)) == std::vector<double>{2.0, 2.0, 2.0});
  CHECK(kmeanspp_init(x, 2, 9) == kmeanspp_init(x, 2, 9));
  CHECK_THROWS_AS(kmeanspp_init(x, 5, 0), Error);
}

TEST_CASE("random seeding draws distinct rows") {
  const Matrix x = column({0, 1, 2, 3, 4, 5, 6, 7});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto c = sorted_column(random_init(x, 5, seed));
    CHECK(std::adjacent_find(c.begin(), c.end()) == c.end());
  }
}

TEST_CASE("empty cluster repair") {
  const Matrix x = column({0.0, 1.0, 2.0, 9.0});
  std::vector<int> labels = {0, 0, 0, 0};
  Matrix c = column({1.0, 100.0});
  const bool repaired =
      repair_empty_clusters(x, labels, c, [&](const Matrix& cc) { return nearest_centroid(x, cc); });
  CHECK(repaired);
  CHECK(c(1, 0) == 9.0);
  CHECK(labels == std::vector<int>{0, 0, 0, 1});

  // Coincident centroids: the seed point is handed over directly.
  const Matrix y = column({3.0, 3.0, 3.0});
  std::vector<int> l2 = {0, 0, 0};
  Matrix c2 = column({3.0, 3.0});
  repair_empty_clusters(y, l2, c2, [&](const Matrix& cc) { return nearest_centroid(y, cc); });
  CHECK(Partition{l2, 2}.is_valid());

  // The new seed at 20 captures the only member of cluster 1, which must
  // then be refilled.
  const Matrix z = column({0.0, 1.0, 2.0, 3.0, 20.0, 18.0});
  std::vector<int> l4 = {0, 0, 0, 0, 0, 1};
  Matrix c4 = column({0.0, 30.0, 50.0});
  CHECK(repair_empty_clusters(z, l4, c4, [&](const Matrix& cc) { return nearest_centroid(z, cc); }));
  CHECK(Partition{l4, 3}.is_valid());
  CHECK(c4(2, 0) == 20.0);

  std::vector<int> fine = {0, 1, 0, 1};
  Matrix c3 = column({0.0, 9.0});
  CHECK_FALSE(repair_empty_clusters(x, fine, c3, [&](const Matrix& cc) { return nearest_centroid(x, cc); }));
}

TEST_CASE("harden fills empty clusters") {
  Matrix u(3, 3);
  u(0, 0) = 0.6, u(0, 1) = 0.1, u(0, 2) = 0.3;
  u(1, 0) = 0.5, u(1, 1) = 0.1, u(1, 2) = 0.4;
  u(2, 0) = 0.4, u(2, 1) = 0.35, u(2, 2) = 0.25;
  const auto p = harden(u);
  CHECK(p.is_valid());
  CHECK(p.labels[0] == 0);
}

TEST_CASE("FCM membership") {
  const Matrix c = column({0.0, 2.0});
  CHECK(fcm_membership(std::vector<double>{0.0}, c, 2.0) == std::vector<double>{1.0, 0.0});
  CHECK(fcm_membership(std::vector<double>{2.0}, c, 2.0) == std::vector<double>{0.0, 1.0});
  const auto half = fcm_membership(std::vector<double>{1.0}, c, 2.0);
  CHECK(half[0] == doctest::Approx(0.5));
  CHECK(half[1] == doctest::Approx(0.5));
  // Duplicate zero-distance centroids: lowest index wins.
  CHECK(fcm_membership(std::vector<double>{1.0}, column({1.0, 1.0}), 2.0) == std::vector<double>{1.0, 0.0});
  // d = (1, 3), m = 2: u0 = 1 / (1 + 1/9) = 0.9.
  const auto u = fcm_membership(std::vector<double>{1.0}, column({0.0, 4.0}), 2.0);
  CHECK(u[0] == doctest::Approx(0.9).epsilon(1e-14));
  CHECK_THROWS_AS(fcm_membership(std::vector<double>{1.0}, c, 1.0), Error);
}

TEST_CASE("FCM on the four-point line matches a fixed-point oracle") {
  const Matrix x = column({0.0, 1.0, 10.0, 11.0});
  const auto r = fcm(x, 2, 2.0, 0);
  // Independent fixed-point iteration from the end points.
  std::vector<double> c = {0.0, 11.0};
  const std::vector<double> xs = {0.0, 1.0, 10.0, 11.0};
  for (int it = 0; it < 10000; ++it) {
    std::vector<double> num(2, 0.0), den(2, 0.0);
    for (double v : xs) {
      const double d0 = (v - c[0]) * (v - c[0]), d1 = (v - c[1]) * (v - c[1]);
      double u0 = d0 == 0 ? 1.0 : d1 == 0 ? 0.0 : 1.0 / (1.0 + d0 / d1);
      const double w0 = u0 * u0, w1 = (1 - u0) * (1 - u0);
      num[0] += w0 * v, den[0] += w0, num[1] += w1 * v, den[1] += w1;
    }
    const std::vector<double> next = {num[0] / den[0], num[1] / den[1]};
    const double shift = std::max(std::abs(next[0] - c[0]), std::abs(next[1] - c[1]));
    c = next;
    if (shift < 1e-12) break;
  }
  CHECK(same_partition(r.result.partition.labels, {0, 0, 1, 1}));
  const auto got = sorted_column(r.result.centroids);
  CHECK(got[0] == doctest::Approx(c[0]).epsilon(1e-5));
  CHECK(got[1] == doctest::Approx(c[1]).epsilon(1e-5));
  CHECK_THROWS_AS(fcm(x, 2, 1.0, 0), Error);
}

TEST_CASE("FCM memberships and objective") {
  std::mt19937_64 gen(37);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix x = testutil::to_matrix(oracle::random_points(gen, 40, 2, 0, 1));
    const auto r = fcm(x, 3, 1.5 + 0.5 * trial, trial);
    for (std::size_t i = 0; i < 40; ++i) {
      double s = 0.0;
      for (double v : r.membership.u.row(i)) {
        CHECK((v >= 0.0 && v <= 1.0));
        s += v;
      }
      CHECK(std::abs(s - 1.0) <= 1e-9);
    }
    for (std::size_t i = 1; i < r.result.objective_trace.size(); ++i)
      CHECK(r.result.objective_trace[i] <= r.result.objective_trace[i - 1] + 1e-9);
    CHECK(r.result.partition.is_valid());
  }
}

TEST_CASE("RBF kernel and feature distances") {
  const Matrix x = column({0.0, 1.0});
  const Matrix k = rbf_kernel(x, 1.0);
  CHECK(k(0, 1) == doctest::Approx(std::exp(-0.5)));
  CHECK(k(0, 0) == 1.0);
  CHECK_THROWS_AS(rbf_kernel(x, 0.0), Error);

  // Against the explicit three-term formula.
  std::mt19937_64 gen(43);
  const Matrix y = testutil::to_matrix(oracle::random_points(gen, 12, 2, 0, 1));
  const Matrix ky = rbf_kernel(y, 0.4);
  Matrix u(12, 3);
  for (std::size_t i = 0; i < 12; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 3; ++j) s += (u(i, j) = std::uniform_real_distribution<double>(0.1, 1.0)(gen));
    for (std::size_t j = 0; j < 3; ++j) u(i, j) /= s;
  }
  const Matrix dist = kernel_feature_distances(ky, u);
  for (std::size_t j = 0; j < 3; ++j) {
    double mass = 0.0, quad = 0.0;
    for (std::size_t p = 0; p < 12; ++p) mass += u(p, j);
    for (std::size_t p = 0; p < 12; ++p)
      for (std::size_t q = 0; q < 12; ++q) quad += u(p, j) * u(q, j) * ky(p, q);
    for (std::size_t i = 0; i < 12; ++i) {
      double lin = 0.0;
      for (std::size_t p = 0; p < 12; ++p) lin += u(p, j) * ky(i, p);
      CHECK(dist(i, j) == doctest::Approx(ky(i, i) - 2 * lin / mass + quad / (mass * mass)).epsilon(1e-12));
    }
  }
}

TEST_CASE("KPKM") {
  SUBCASE("four-point line against a kernel-matrix oracle") {
    const std::vector<double> xs = {0.0, 1.0, 10.0, 11.0};
    const Matrix x = column({0.0, 1.0, 10.0, 11.0});
    const auto r = kpkm(x, 2, {5.0}, 0);
    // Oracle: explicit kernel, softmax updates from a split start.
    const double s2 = 2.0 * 25.0;
    double kk[4][4];
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) kk[i][j] = std::exp(-(xs[i] - xs[j]) * (xs[i] - xs[j]) / s2);
    // With sigma = 5 the memberships contract toward 0.5 from the split
    // start; the labels are read once the update moves by less than 1e-9.
    double u[4][2] = {{1, 0}, {1, 0}, {0, 1}, {0, 1}};
    for (double change = 1.0; change >= 1e-9;) {
      double dd[4][2];
      for (int j = 0; j < 2; ++j) {
        double m = 0, q = 0;
        for (int p = 0; p < 4; ++p) m += u[p][j];
        for (int p = 0; p < 4; ++p)
          for (int r2 = 0; r2 < 4; ++r2) q += u[p][j] * u[r2][j] * kk[p][r2];
        for (int i = 0; i < 4; ++i) {
          double l = 0;
          for (int p = 0; p < 4; ++p) l += u[p][j] * kk[i][p];
          dd[i][j] = kk[i][i] - 2 * l / m + q / (m * m);
        }
      }
      change = 0.0;
      for (int i = 0; i < 4; ++i) {
        const double e0 = std::exp(-dd[i][0] / s2), e1 = std::exp(-dd[i][1] / s2);
        change = std::max(change, std::abs(e0 / (e0 + e1) - u[i][0]));
        u[i][0] = e0 / (e0 + e1);
        u[i][1] = e1 / (e0 + e1);
      }
    }
    std::vector<int> oracle_labels(4);
    for (int i = 0; i < 4; ++i) oracle_labels[i] = u[i][1] > u[i][0];
    CHECK(oracle_labels == std::vector<int>{0, 0, 1, 1});
    CHECK(same_partition(r.result.partition.labels, oracle_labels));
  }
  SUBCASE("identical points give equal feature distances") {
    const Matrix x = column({2.0, 2.0, 2.0, 2.0});
    const Matrix k = rbf_kernel(x, 1.0);
    for (double v : k.values()) CHECK(v == 1.0);
    Matrix u(4, 2, 0.5);
    const Matrix d = kernel_feature_distances(k, u);
    for (double v : d.values()) CHECK(v == doctest::Approx(0.0));
    const auto r = kpkm(x, 2, {1.0}, 0);
    CHECK(r.result.partition.is_valid());
  }
  SUBCASE("rows sum to one and the regularized objective never increases") {
    std::mt19937_64 gen(47);
    for (int trial = 0; trial < 8; ++trial) {
      const Matrix x = testutil::to_matrix(oracle::random_points(gen, 40, 2, 0, 1));
      const auto r = kpkm(x, 3, {0.2 + 0.1 * trial}, trial);
      for (std::size_t i = 0; i < 40; ++i) {
        double s = 0.0;
        for (double v : r.membership.u.row(i)) s += v;
        CHECK(std::abs(s - 1.0) <= 1e-9);
      }
      for (std::size_t i = 1; i < r.result.objective_trace.size(); ++i)
        CHECK(r.result.objective_trace[i] <= r.result.objective_trace[i - 1] + 1e-9);
    }
  }
  SUBCASE("bandwidth must be positive") {
    CHECK_THROWS_AS(kpkm(column({0, 1, 2}), 2, {0.0}, 0), Error);
    CHECK_THROWS_AS(kpkm(column({0, 1, 2}), 2, {-1.0}, 0), Error);
  }
}

TEST_CASE("median pairwise distance") {
  CHECK(median_pairwise_distance(column({0.0, 1.0, 3.0})) == 2.0);
  CHECK(median_pairwise_distance(column({0.0, 1.0, 3.0, 6.0})) == 3.0);
}

TEST_CASE("knee detection") {
  const std::vector<double> xs = {2, 3, 4, 5, 6};
  CHECK(knee_index(xs, std::vector<double>{10, 8, 6, 4, 2}) == 0);
  CHECK(knee_index(xs, std::vector<double>{100, 20, 15, 12, 10}) == 1);
  CHECK(knee_index(std::vector<double>{4}, std::vector<double>{1.0}) == 0);
  CHECK_THROWS_AS(knee_index(xs, std::vector<double>{1.0}), Error);
}

TEST_CASE("elbow selection") {
  std::mt19937_64 gen(53);
  const Matrix x = blobs(gen, {{0, 0}, {6, 0}, {3, 6}}, 20, 0.4);
  const auto e = elbow_select_k(x, 2, 8, ElbowRunner::Lloyd, 1);
  CHECK(e.k == 3);
  CHECK(e.ks.size() == 7);
  CHECK(elbow_select_k(x, 4, 4, ElbowRunner::Lloyd, 1).k == 4);
  CHECK(elbow_select_k(x, 2, 6, ElbowRunner::Rnkm, 1, 1.0).ks.size() == 5);
  CHECK_THROWS_AS(elbow_select_k(x, 5, 4, ElbowRunner::Lloyd, 1), Error);
  CHECK_THROWS_AS(elbow_select_k(x, 1, 4, ElbowRunner::Lloyd, 1), Error);
}

TEST_CASE("runs are bit-identical under a fixed seed") {
  std::mt19937_64 gen(59);
  const Matrix x = testutil::to_matrix(oracle::random_points(gen, 60, 3, 0, 1));
  const std::vector<double> ts = {0.3, 1.0};
  const auto a = cluster::rnkm(x, 3, ts, {{}, 4});
  const auto b = cluster::rnkm(x, 3, ts, {{}, 4});
  CHECK(a.best.partition.labels == b.best.partition.labels);
  CHECK(a.best.centroids == b.best.centroids);
  CHECK(a.best.objective_trace == b.best.objective_trace);
  CHECK(fcm(x, 3, 2.0, 4).result.centroids == fcm(x, 3, 2.0, 4).result.centroids);
  CHECK(kpkm(x, 3, {0.5}, 4).membership.u == kpkm(x, 3, {0.5}, 4).membership.u);
}
