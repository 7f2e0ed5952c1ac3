#pragma once

// k-means clustering of lexicon forms into cells, with the number of cells
// chosen where the dispersion curve stops decelerating.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdp/embeddings.hpp"
#include "pdp/ingest.hpp"

namespace pdp {

/// Dense row-major point set.
class Points {
 public:
  Points() = default;
  Points(std::size_t n, std::size_t dim) : n_(n), dim_(dim), data_(n * dim, 0.0) {}

  std::size_t size() const { return n_; }
  std::size_t dim() const { return dim_; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }

 private:
  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

struct KMeansResult {
  std::vector<int> assignment;
  Points centroids;
  /// Sum of squared Euclidean distances to assigned centroids.
  double dispersion = 0;
  /// Dispersion after every Lloyd update, first to last.
  std::vector<double> history;
  int iterations = 0;
};

/// k-means++ seeding then Lloyd iterations until no assignment changes or
/// `max_iterations` is reached.
KMeansResult kmeans(const Points& points, int k, std::uint64_t seed, int max_iterations = 100);

/// Mean dispersion over `restarts` runs with seeds derived from `seed` and k.
/// Restarts may run on `threads` workers with identical results.
double avg_dispersion(const Points& points, int k, int restarts, std::uint64_t seed, int threads = 1);

/// k -> d_k.
using DispersionCurve = std::map<int, double>;

/// Discrete second difference d_{k-1} - 2 d_k + d_{k+1}.
double decel(const DispersionCurve& curve, int k);

struct ElbowResult {
  int k = 1;
  DispersionCurve curve;
  bool triggered = false;  // the threshold rule fired
  bool fallback = false;   // decel(2) <= 0; k = argmax decel instead
};

/// Walks k = 2, 3, ... and returns the first k with
/// decel(k) < sqrt(decel(2)). `dispersion_at(k)` is evaluated lazily, at
/// most for k = 1 .. k_max + 1.
ElbowResult select_k(const std::function<double(int)>& dispersion_at, int k_max);
ElbowResult select_k(const Points& points, int k_max, int restarts, std::uint64_t seed, int threads = 1);

struct CellClusterConfig {
  int k_max = 40;
  int restarts = 25;
  std::optional<int> gold_k;
  /// Scale vectors to unit length before clustering.
  bool unit_normalize = true;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct CellAssignment {
  std::map<std::string, int> cell_of;
  int k = 0;
  double dispersion = 0;
  DispersionCurve curve;

  /// cell id -> member forms in lexicographic order.
  std::map<int, std::vector<std::string>> cells() const;
  bool operator==(const CellAssignment&) const = default;
};

/// Renumbers clusters by descending size (ties by first member).
std::vector<int> relabel_by_size(std::span<const int> assignment, int k);

CellAssignment cluster_points(const std::vector<std::string>& forms, const Points& points,
                              const CellClusterConfig& config);
CellAssignment cluster_cells(const EmbeddingModel& model, const Lexicon& lexicon, const CellClusterConfig& config);

/// "form\tcell" lines.
void write_cells_tsv(std::ostream& out, const CellAssignment& cells);
CellAssignment read_cells_tsv(std::istream& in);
/// "k,d_k,decel" rows; decel is empty where undefined.
void write_curve_csv(std::ostream& out, const DispersionCurve& curve);

}  // namespace pdp
