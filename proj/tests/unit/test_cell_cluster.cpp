#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "pdp/cell_cluster.hpp"
#include "pdp/error.hpp"

using namespace pdp;

namespace {

Points to_points(const std::vector<std::vector<double>>& rows) {
  Points p(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t d = 0; d < rows[i].size(); ++d) p.row(i)[d] = rows[i][d];
  return p;
}

const std::vector<std::vector<double>> kCentres = {
    {0, 0, 0}, {10, 0, 0}, {0, 12, 0}, {0, 0, 14}};

/// Points with the same true label share one cluster and vice versa.
bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<int, int> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (ab.count(a[i]) && ab[a[i]] != b[i]) return false;
    if (ba.count(b[i]) && ba[b[i]] != a[i]) return false;
    ab[a[i]] = b[i];
    ba[b[i]] = a[i];
  }
  return true;
}

/// First k >= 2 whose second difference drops below the square root of the
/// one at k = 2.
int oracle_elbow(const std::vector<double>& d, int k_max) {
  const double first = oracle::second_difference(d, 2);
  for (int k = 2; k <= k_max; ++k)
    if (oracle::second_difference(d, k) < std::sqrt(first)) return k;
  return k_max;
}

}  // namespace

TEST_CASE("elbow on the worked dispersion sequence") {
  const std::vector<double> d = {100, 60, 40, 34, 31, 30, 29.5};
  std::set<int> asked;
  const auto r = select_k(
      [&](int k) {
        asked.insert(k);
        return d[static_cast<std::size_t>(k - 1)];
      },
      6);
  CHECK(r.k == 4);
  CHECK(r.triggered);
  CHECK_FALSE(r.fallback);
  CHECK(*asked.rbegin() == 5);
  CHECK(decel(r.curve, 2) == doctest::Approx(20));
  CHECK(decel(r.curve, 3) == doctest::Approx(14));
  CHECK(decel(r.curve, 4) == doctest::Approx(3));
}

TEST_CASE("elbow agrees with a direct evaluation on random convex curves") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int k_max = 12;
    std::vector<double> drops;
    for (int i = 0; i < k_max + 1; ++i) drops.push_back(u(rng) * 100);
    std::sort(drops.rbegin(), drops.rend());
    std::vector<double> d = {2000};
    for (double x : drops) d.push_back(d.back() - x);
    const auto r = select_k([&](int k) { return d[static_cast<std::size_t>(k - 1)]; }, k_max);
    if (r.fallback) continue;
    CHECK(r.k == oracle_elbow(d, k_max));
    for (const auto& [k, v] : r.curve) CHECK(v == d[static_cast<std::size_t>(k - 1)]);
  }
}

TEST_CASE("elbow falls back to the sharpest bend when decel(2) is not positive") {
  const std::vector<double> d = {100, 90, 80, 40, 35, 33, 32};
  const auto r = select_k([&](int k) { return d[static_cast<std::size_t>(k - 1)]; }, 5);
  CHECK(r.fallback);
  CHECK(r.k == 4);
  CHECK_THROWS(select_k([](int) { return 1.0; }, 2));
}

TEST_CASE("elbow without a trigger returns k_max") {
  // Every bend stays above the square root of the first one.
  const std::vector<double> d = {300, 200, 150, 110, 80, 60};
  const auto r = select_k([&](int k) { return d[static_cast<std::size_t>(k - 1)]; }, 4);
  CHECK_FALSE(r.triggered);
  CHECK(r.k == 4);
}

TEST_CASE("decel needs both neighbours") {
  DispersionCurve c{{1, 5}, {2, 3}};
  CHECK_THROWS(decel(c, 2));
  c[3] = 2;
  CHECK(decel(c, 2) == doctest::Approx(1));
  CHECK_THROWS(decel(c, 1));
}

TEST_CASE("k-means recovers separated blobs") {
  std::vector<int> truth;
  const auto points = to_points(oracle::blobs(kCentres, 40, 0.5, 3, &truth));
  const auto r = kmeans(points, 4, 99);
  CHECK(same_partition(r.assignment, truth));
  for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1] + 1e-9);
  CHECK(r.dispersion == r.history.back());
}

TEST_CASE("k-means properties") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<std::vector<double>> rows(60, std::vector<double>(4));
  for (auto& r : rows)
    for (auto& x : r) x = g(rng);
  const auto p = to_points(rows);

  SUBCASE("k = n puts every point in its own cluster") {
    const auto r = kmeans(p, 60, 5);
    CHECK(std::set<int>(r.assignment.begin(), r.assignment.end()).size() == 60);
    CHECK(r.dispersion == doctest::Approx(0).epsilon(1e-12));
  }
  SUBCASE("no cluster is empty") {
    for (int k : {2, 7, 30}) {
      const auto r = kmeans(p, k, 11);
      CHECK(std::set<int>(r.assignment.begin(), r.assignment.end()).size() == static_cast<std::size_t>(k));
    }
  }
  SUBCASE("k = 1 dispersion is the total scatter") {
    std::vector<double> mean(4, 0);
    for (const auto& r : rows)
      for (std::size_t d = 0; d < 4; ++d) mean[d] += r[d] / 60;
    double scatter = 0;
    for (const auto& r : rows)
      for (std::size_t d = 0; d < 4; ++d) scatter += (r[d] - mean[d]) * (r[d] - mean[d]);
    CHECK(kmeans(p, 1, 3).dispersion == doctest::Approx(scatter));
  }
  SUBCASE("average dispersion is non-increasing in k on this data") {
    double prev = avg_dispersion(p, 1, 5, 2);
    for (int k = 2; k <= 8; ++k) {
      const double d = avg_dispersion(p, k, 5, 2);
      CHECK(d <= prev + 1e-9);
      prev = d;
    }
  }
  SUBCASE("seeded runs repeat and threads do not change the result") {
    CHECK(kmeans(p, 5, 17).assignment == kmeans(p, 5, 17).assignment);
    CHECK(avg_dispersion(p, 5, 9, 4, 1) == avg_dispersion(p, 5, 9, 4, 3));
  }
  CHECK_THROWS(kmeans(p, 0, 1));
  CHECK_THROWS(kmeans(p, 61, 1));
}

TEST_CASE("relabel orders clusters by size then first member") {
  const std::vector<int> a = {2, 2, 0, 1, 1, 1, 0, 2};
  CHECK(relabel_by_size(a, 3) == std::vector<int>{0, 0, 2, 1, 1, 1, 2, 0});
  const std::vector<int> tie = {1, 0, 1, 0};
  CHECK(relabel_by_size(tie, 2) == std::vector<int>{0, 1, 0, 1});
}

TEST_CASE("cluster_points with gold k") {
  std::vector<int> truth;
  const auto points = to_points(oracle::blobs(kCentres, 25, 0.4, 8, &truth));
  std::vector<std::string> forms;
  for (std::size_t i = 0; i < points.size(); ++i) forms.push_back("f" + std::to_string(1000 + i));
  CellClusterConfig cfg;
  cfg.gold_k = 4;
  const auto a = cluster_points(forms, points, cfg);
  CHECK(a.k == 4);
  std::vector<int> got;
  for (const auto& f : forms) got.push_back(a.cell_of.at(f));
  CHECK(same_partition(got, truth));
  CHECK(a.curve.empty());

  std::stringstream tsv;
  write_cells_tsv(tsv, a);
  const auto back = read_cells_tsv(tsv);
  CHECK(back.cell_of == a.cell_of);
  CHECK(back.k == 4);

  std::stringstream bad("f1\tx\n");
  CHECK_THROWS_AS(read_cells_tsv(bad), FormatError);
  CHECK_THROWS_AS(cluster_points({}, Points{}, cfg), PipelineError);
}

TEST_CASE("cluster_points picks k with the elbow and writes the curve") {
  const auto points = to_points(oracle::blobs(kCentres, 25, 0.4, 8));
  std::vector<std::string> forms;
  for (std::size_t i = 0; i < points.size(); ++i) forms.push_back("f" + std::to_string(1000 + i));
  CellClusterConfig cfg;
  cfg.k_max = 8;
  cfg.restarts = 5;
  const auto a = cluster_points(forms, points, cfg);
  CHECK(a.k >= 2);
  CHECK(a.k <= 8);
  CHECK(a.curve.count(1));
  std::vector<double> d;
  for (const auto& [k, v] : a.curve) d.push_back(v);
  CHECK(a.k == oracle_elbow(d, cfg.k_max));

  std::stringstream csv;
  write_curve_csv(csv, a.curve);
  std::string header;
  std::getline(csv, header);
  CHECK(header == "k,d_k,decel");

  Points few(3, 2);
  CHECK(cluster_points({"a", "b", "c"}, few, CellClusterConfig{}).k == 1);
}
