#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "resalloc/errors.hpp"
#include "resalloc/rng.hpp"

namespace resalloc {

struct Edge {
  std::size_t i = 0;
  std::size_t j = 0;
  double weight = 1.0;

  bool operator==(const Edge&) const = default;
};

struct Neighbor {
  std::size_t index;
  double weight;
};

/// First offending entry of a dense weight matrix, scanned row-major.
struct Violation {
  ErrorKind kind;
  std::size_t i;
  std::size_t j;
};

/// Checks symmetry, nonnegativity, finiteness and a zero diagonal of a dense
/// row-major n x n weight matrix.
std::optional<Violation> validate(std::size_t n, std::span<const double> weights);

/// Weighted undirected graph at one instant. Always valid once constructed:
/// W symmetric, W >= 0, zero diagonal. Dense storage plus a CSR neighbor list
/// that the kernels iterate over.
class GraphSnapshot {
 public:
  GraphSnapshot() = default;
  explicit GraphSnapshot(std::size_t n);

  /// Throws Error{SymmetryViolation | NegativeWeight | InvalidWeight | DimensionMismatch}.
  static GraphSnapshot from_dense(std::size_t n, std::vector<double> weights);
  /// Undirected edge list; a repeated pair accumulates its weight.
  static GraphSnapshot from_edges(std::size_t n, std::span<const Edge> edges);

  std::size_t size() const noexcept { return n_; }
  double weight(std::size_t i, std::size_t j) const { return weights_[i * n_ + j]; }
  std::span<const double> dense() const noexcept { return weights_; }

  std::span<const Neighbor> neighbors(std::size_t i) const {
    return {neighbors_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::size_t degree(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }

  /// Number of undirected edges.
  std::size_t edge_count() const noexcept { return neighbors_.size() / 2; }
  /// Edges with i < j, in row-major order.
  std::vector<Edge> edges() const;

  double max_row_sum() const;
  /// W / max_i sum_j W_ij. Symmetric and substochastic; the implicit
  /// diagonal 1 - rowsum makes it doubly stochastic without touching the flow.
  GraphSnapshot normalized() const;

  bool operator==(const GraphSnapshot& other) const { return n_ == other.n_ && weights_ == other.weights_; }

 private:
  void build_adjacency();

  std::size_t n_ = 0;
  std::vector<double> weights_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> neighbors_;
};

/// Edge set union; weights of shared edges add up.
GraphSnapshot union_of(std::span<const GraphSnapshot> snapshots);

/// Undirected graph has a spanning tree iff it is connected. Iterative DFS
/// from vertex 0.
bool has_spanning_tree(const GraphSnapshot& g);

/// Number of connected components.
std::size_t component_count(const GraphSnapshot& g);

struct Segment {
  double duration;
  GraphSnapshot snapshot;

  bool operator==(const Segment&) const = default;
};

/// Piecewise-constant topology. Segment k covers [start_k, start_k + duration_k).
/// A cyclic schedule repeats with period sum(duration); otherwise the last
/// snapshot persists forever.
class GraphSchedule {
 public:
  GraphSchedule() = default;
  GraphSchedule(std::vector<Segment> segments, bool cyclic);

  static GraphSchedule constant(GraphSnapshot g);

  std::size_t agents() const noexcept { return segments_.empty() ? 0 : segments_.front().snapshot.size(); }
  std::span<const Segment> segments() const noexcept { return segments_; }
  bool cyclic() const noexcept { return cyclic_; }
  double period() const noexcept { return period_; }

  std::size_t segment_index_at(double t) const;
  const GraphSnapshot& at(double t) const { return segments_[segment_index_at(t)].snapshot; }

  /// Same schedule with every snapshot normalized.
  GraphSchedule normalized() const;

  bool operator==(const GraphSchedule& other) const {
    return cyclic_ == other.cyclic_ && segments_ == other.segments_;
  }

 private:
  std::vector<Segment> segments_;
  std::vector<double> starts_;
  bool cyclic_ = false;
  double period_ = 0.0;
};

/// Throws Error{InvalidTime} for t < 0.
inline const GraphSnapshot& graph_at(const GraphSchedule& schedule, double t) { return schedule.at(t); }

/// Joint connectivity check: for every segment boundary within one cycle, the
/// union of the snapshots active on [boundary, boundary + window) is connected.
bool check_assumption_tree(const GraphSchedule& schedule, double window);

// Generators used by scenario builders.

GraphSnapshot cycle_graph(std::size_t n, Rng& rng, double weight_lo, double weight_hi);

/// Barabasi-Albert preferential attachment: starts from a clique on m+1 nodes,
/// each further node attaches m distinct links. Always connected.
std::vector<Edge> scale_free_edges(std::size_t n, std::size_t m, Rng& rng);

struct ThinningOptions {
  std::size_t snapshots = 4;
  double keep_probability = 0.5;
  double segment_length = 25.0;
  bool require_disconnected = true;
  std::size_t max_attempts = 10000;
};

/// Cyclic schedule built by independently dropping links of a connected base
/// graph per snapshot. Draws are repeated until the union over one cycle is
/// connected (and, if requested, every snapshot is disconnected).
/// Throws Error{ConfigError} when max_attempts is exhausted.
GraphSchedule thinned_schedule(std::size_t n, std::span<const Edge> base, const ThinningOptions& options,
                               Rng& rng);

}  // namespace resalloc
