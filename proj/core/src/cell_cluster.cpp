#include "pdp/cell_cluster.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <spdlog/spdlog.h>

#include "pdp/error.hpp"
#include "pdp/hash.hpp"

namespace pdp {

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

Points plus_plus_seed(const Points& points, int k, std::mt19937_64& rng) {
  const std::size_t n = points.size();
  Points centroids(static_cast<std::size_t>(k), points.dim());
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t pick = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  for (int c = 0; c < k; ++c) {
    std::copy_n(points.row(pick).begin(), points.dim(), centroids.row(static_cast<std::size_t>(c)).begin());
    if (c + 1 == k) break;
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      best[i] = std::min(best[i], sq_dist(points.row(i), centroids.row(static_cast<std::size_t>(c))));
      total += best[i];
    }
    if (total <= 0) {
      // Every point coincides with a centroid; any choice is as good.
      pick = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
      continue;
    }
    double r = unit(rng) * total;
    pick = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      r -= best[i];
      if (r < 0 && best[i] > 0) {
        pick = i;
        break;
      }
    }
  }
  return centroids;
}

void update_centroids(const Points& points, std::span<const int> assignment, Points& centroids) {
  const std::size_t k = centroids.size();
  std::vector<std::size_t> count(k, 0);
  for (std::size_t c = 0; c < k; ++c) std::fill(centroids.row(c).begin(), centroids.row(c).end(), 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto c = static_cast<std::size_t>(assignment[i]);
    ++count[c];
    auto row = centroids.row(c);
    const auto p = points.row(i);
    for (std::size_t d = 0; d < row.size(); ++d) row[d] += p[d];
  }
  for (std::size_t c = 0; c < k; ++c)
    if (count[c])
      for (auto& x : centroids.row(c)) x /= static_cast<double>(count[c]);
}

double dispersion_of(const Points& points, std::span<const int> assignment, const Points& centroids) {
  double s = 0;
  for (std::size_t i = 0; i < points.size(); ++i)
    s += sq_dist(points.row(i), centroids.row(static_cast<std::size_t>(assignment[i])));
  return s;
}

}  // namespace

KMeansResult kmeans(const Points& points, int k, std::uint64_t seed, int max_iterations) {
  if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
  if (static_cast<std::size_t>(k) > points.size())
    throw std::invalid_argument("kmeans: k=" + std::to_string(k) + " exceeds " + std::to_string(points.size()) +
                                " points");
  const std::size_t n = points.size();
  std::mt19937_64 rng(seed);
  KMeansResult result;
  result.centroids = plus_plus_seed(points, k, rng);
  result.assignment.assign(n, -1);

  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    std::vector<std::size_t> count(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = sq_dist(points.row(i), result.centroids.row(static_cast<std::size_t>(c)));
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (result.assignment[i] != best) {
        result.assignment[i] = best;
        changed = true;
      }
      ++count[static_cast<std::size_t>(best)];
    }
    // Empty clusters take the point farthest from its own centroid.
    for (int c = 0; c < k; ++c) {
      if (count[static_cast<std::size_t>(c)]) continue;
      std::size_t far = 0;
      double far_d = -1;
      for (std::size_t i = 0; i < n; ++i) {
        if (count[static_cast<std::size_t>(result.assignment[i])] < 2) continue;
        const double d = sq_dist(points.row(i), result.centroids.row(static_cast<std::size_t>(result.assignment[i])));
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      --count[static_cast<std::size_t>(result.assignment[far])];
      result.assignment[far] = c;
      ++count[static_cast<std::size_t>(c)];
      std::copy_n(points.row(far).begin(), points.dim(), result.centroids.row(static_cast<std::size_t>(c)).begin());
      changed = true;
    }
    update_centroids(points, result.assignment, result.centroids);
    result.history.push_back(dispersion_of(points, result.assignment, result.centroids));
    result.iterations = iter + 1;
    if (!changed) break;
  }
  result.dispersion = result.history.back();
  return result;
}

double avg_dispersion(const Points& points, int k, int restarts, std::uint64_t seed, int threads) {
  if (restarts < 1) throw std::invalid_argument("avg_dispersion: restarts must be >= 1");
  std::vector<double> d(static_cast<std::size_t>(restarts));
  auto run = [&](int r) {
    const auto s = derive_seed(derive_seed(seed, static_cast<std::uint64_t>(k)), static_cast<std::uint64_t>(r));
    d[static_cast<std::size_t>(r)] = kmeans(points, k, s).dispersion;
  };
  if (threads <= 1) {
    for (int r = 0; r < restarts; ++r) run(r);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (int r = t; r < restarts; r += threads) run(r);
      });
    for (auto& th : pool) th.join();
  }
  // Summed in restart order so serial and parallel runs agree bit-for-bit.
  return std::accumulate(d.begin(), d.end(), 0.0) / restarts;
}

double decel(const DispersionCurve& curve, int k) {
  if (k < 2) throw std::invalid_argument("decel: k must be >= 2");
  const auto at = [&](int j) {
    const auto it = curve.find(j);
    if (it == curve.end()) throw std::out_of_range("decel: dispersion curve lacks d_" + std::to_string(j));
    return it->second;
  };
  return at(k - 1) - 2 * at(k) + at(k + 1);
}

ElbowResult select_k(const std::function<double(int)>& dispersion_at, int k_max) {
  if (k_max < 3) throw std::invalid_argument("select_k: k_max must be >= 3");
  ElbowResult result;
  auto ensure = [&](int k) {
    for (int j = 1; j <= k; ++j)
      if (!result.curve.count(j)) result.curve[j] = dispersion_at(j);
  };
  ensure(3);
  const double first = decel(result.curve, 2);
  if (first <= 0) {
    // Threshold undefined: take the sharpest bend over the whole range.
    ensure(k_max + 1);
    result.fallback = true;
    double best = -std::numeric_limits<double>::infinity();
    for (int k = 2; k <= k_max; ++k) {
      const double v = decel(result.curve, k);
      if (v > best) {
        best = v;
        result.k = k;
      }
    }
    spdlog::warn("elbow: decel(2) = {} <= 0; falling back to argmax decel, k = {}", first, result.k);
    return result;
  }
  const double threshold = std::sqrt(first);
  for (int k = 2; k <= k_max; ++k) {
    ensure(k + 1);
    if (decel(result.curve, k) < threshold) {
      result.k = k;
      result.triggered = true;
      return result;
    }
  }
  spdlog::warn("elbow: deceleration never fell below {:.4g} up to k_max = {}; using k_max", threshold, k_max);
  result.k = k_max;
  return result;
}

ElbowResult select_k(const Points& points, int k_max, int restarts, std::uint64_t seed, int threads) {
  return select_k([&](int k) { return avg_dispersion(points, k, restarts, seed, threads); }, k_max);
}

std::map<int, std::vector<std::string>> CellAssignment::cells() const {
  std::map<int, std::vector<std::string>> out;
  for (const auto& [form, cell] : cell_of) out[cell].push_back(form);
  return out;
}

std::vector<int> relabel_by_size(std::span<const int> assignment, int k) {
  std::vector<std::size_t> size(static_cast<std::size_t>(k), 0);
  std::vector<std::size_t> first(static_cast<std::size_t>(k), assignment.size());
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    const auto c = static_cast<std::size_t>(assignment[i]);
    ++size[c];
    first[c] = std::min(first[c], i);
  }
  std::vector<int> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
    return size[ua] != size[ub] ? size[ua] > size[ub] : first[ua] < first[ub];
  });
  std::vector<int> new_id(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) new_id[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i;
  std::vector<int> out(assignment.size());
  for (std::size_t i = 0; i < assignment.size(); ++i) out[i] = new_id[static_cast<std::size_t>(assignment[i])];
  return out;
}

CellAssignment cluster_points(const std::vector<std::string>& forms, const Points& points,
                              const CellClusterConfig& config) {
  if (forms.size() != points.size()) throw std::invalid_argument("cluster_points: forms/points size mismatch");
  if (forms.empty()) throw PipelineError("cannot cluster an empty lexicon");
  CellAssignment result;
  int k;
  if (config.gold_k) {
    k = std::min<int>(*config.gold_k, static_cast<int>(points.size()));
  } else if (points.size() < 4) {
    spdlog::warn("cell clustering: {} forms are too few for the elbow rule; using k = 1", points.size());
    k = 1;
  } else {
    const int k_max = std::min<int>(config.k_max, static_cast<int>(points.size()) - 1);
    auto elbow = select_k(points, std::max(3, k_max), config.restarts, config.seed, config.threads);
    k = elbow.k;
    result.curve = std::move(elbow.curve);
  }
  if (k < 1) throw std::invalid_argument("cell clustering: k must be >= 1");
  const auto final_run = kmeans(points, k, derive_seed(config.seed, "final"));
  const auto labels = relabel_by_size(final_run.assignment, k);
  for (std::size_t i = 0; i < forms.size(); ++i) result.cell_of[forms[i]] = labels[i];
  result.k = k;
  result.dispersion = final_run.dispersion;
  return result;
}

CellAssignment cluster_cells(const EmbeddingModel& model, const Lexicon& lexicon, const CellClusterConfig& config) {
  const auto forms = lexicon.forms();
  Points points(forms.size(), static_cast<std::size_t>(model.dim()));
  for (std::size_t i = 0; i < forms.size(); ++i) {
    const auto v = model.vector(forms[i]);
    auto row = points.row(i);
    double norm = 0;
    for (std::size_t d = 0; d < v.size(); ++d) {
      row[d] = v[d];
      norm += row[d] * row[d];
    }
    if (config.unit_normalize && norm > 0)
      for (auto& x : row) x /= std::sqrt(norm);
  }
  return cluster_points(forms, points, config);
}

void write_cells_tsv(std::ostream& out, const CellAssignment& cells) {
  for (const auto& [form, cell] : cells.cell_of) out << form << '\t' << cell << '\n';
}

CellAssignment read_cells_tsv(std::istream& in) {
  CellAssignment cells;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw FormatError("expected 'form<TAB>cell'", lineno);
    int cell = -1;
    try {
      cell = std::stoi(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw FormatError("cell id is not an integer", lineno);
    }
    if (cell < 0) throw FormatError("negative cell id", lineno);
    cells.cell_of[line.substr(0, tab)] = cell;
    cells.k = std::max(cells.k, cell + 1);
  }
  return cells;
}

void write_curve_csv(std::ostream& out, const DispersionCurve& curve) {
  out << "k,d_k,decel\n";
  for (const auto& [k, d] : curve) {
    std::ostringstream row;
    row.precision(17);
    row << k << ',' << d << ',';
    if (k >= 2 && curve.count(k - 1) && curve.count(k + 1)) row << decel(curve, k);
    out << row.str() << '\n';
  }
}

}  // namespace pdp
