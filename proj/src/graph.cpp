#include "resalloc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace resalloc {

std::optional<Violation> validate(std::size_t n, std::span<const double> weights) {
  if (weights.size() != n * n) {
    return Violation{ErrorKind::DimensionMismatch, 0, 0};
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double w = weights[i * n + j];
      if (!std::isfinite(w)) return Violation{ErrorKind::InvalidWeight, i, j};
      if (w < 0.0) return Violation{ErrorKind::NegativeWeight, i, j};
      if (i == j && w != 0.0) return Violation{ErrorKind::InvalidWeight, i, j};
      if (w != weights[j * n + i]) return Violation{ErrorKind::SymmetryViolation, i, j};
    }
  }
  return std::nullopt;
}

GraphSnapshot::GraphSnapshot(std::size_t n) : n_(n), weights_(n * n, 0.0), offsets_(n + 1, 0) {}

GraphSnapshot GraphSnapshot::from_dense(std::size_t n, std::vector<double> weights) {
  if (auto v = validate(n, weights)) {
    throw Error(v->kind, "weight matrix entry (" + std::to_string(v->i) + "," + std::to_string(v->j) + ")");
  }
  GraphSnapshot g;
  g.n_ = n;
  g.weights_ = std::move(weights);
  g.build_adjacency();
  return g;
}

GraphSnapshot GraphSnapshot::from_edges(std::size_t n, std::span<const Edge> edges) {
  std::vector<double> w(n * n, 0.0);
  for (const Edge& e : edges) {
    if (e.i >= n || e.j >= n) {
      throw Error(ErrorKind::DimensionMismatch,
                  "edge (" + std::to_string(e.i) + "," + std::to_string(e.j) + ") outside n=" + std::to_string(n));
    }
    if (e.i == e.j) throw Error(ErrorKind::InvalidWeight, "self loop at " + std::to_string(e.i));
    if (!std::isfinite(e.weight)) throw Error(ErrorKind::InvalidWeight, "non-finite edge weight");
    if (e.weight < 0.0) {
      throw Error(ErrorKind::NegativeWeight, "edge (" + std::to_string(e.i) + "," + std::to_string(e.j) + ")");
    }
    w[e.i * n + e.j] += e.weight;
    w[e.j * n + e.i] += e.weight;
  }
  return from_dense(n, std::move(w));
}

void GraphSnapshot::build_adjacency() {
  offsets_.assign(n_ + 1, 0);
  neighbors_.clear();
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      const double w = weights_[i * n_ + j];
      if (w > 0.0) neighbors_.push_back({j, w});
    }
    offsets_[i + 1] = neighbors_.size();
  }
}

std::vector<Edge> GraphSnapshot::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (std::size_t i = 0; i < n_; ++i) {
    for (const Neighbor& nb : neighbors(i)) {
      if (nb.index > i) out.push_back({i, nb.index, nb.weight});
    }
  }
  return out;
}

double GraphSnapshot::max_row_sum() const {
  double best = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (const Neighbor& nb : neighbors(i)) s += nb.weight;
    best = std::max(best, s);
  }
  return best;
}

GraphSnapshot GraphSnapshot::normalized() const {
  const double s = max_row_sum();
  if (s == 0.0) return *this;
  std::vector<double> w = weights_;
  for (double& x : w) x /= s;
  return from_dense(n_, std::move(w));
}

GraphSnapshot union_of(std::span<const GraphSnapshot> snapshots) {
  if (snapshots.empty()) throw Error(ErrorKind::DimensionMismatch, "union of an empty list");
  const std::size_t n = snapshots.front().size();
  std::vector<double> w(n * n, 0.0);
  for (const GraphSnapshot& g : snapshots) {
    if (g.size() != n) {
      throw Error(ErrorKind::DimensionMismatch,
                  "union of graphs with n=" + std::to_string(n) + " and n=" + std::to_string(g.size()));
    }
    const auto d = g.dense();
    for (std::size_t k = 0; k < w.size(); ++k) w[k] += d[k];
  }
  return GraphSnapshot::from_dense(n, std::move(w));
}

namespace {

// Labels each vertex with its component id; returns the component count.
std::size_t label_components(const GraphSnapshot& g, std::vector<std::size_t>& label) {
  constexpr auto unset = static_cast<std::size_t>(-1);
  const std::size_t n = g.size();
  label.assign(n, unset);
  std::vector<std::size_t> stack;
  std::size_t count = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (label[root] != unset) continue;
    label[root] = count;
    stack.push_back(root);
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (const Neighbor& nb : g.neighbors(v)) {
        if (label[nb.index] == unset) {
          label[nb.index] = count;
          stack.push_back(nb.index);
        }
      }
    }
    ++count;
  }
  return count;
}

}  // namespace

std::size_t component_count(const GraphSnapshot& g) {
  std::vector<std::size_t> label;
  return label_components(g, label);
}

bool has_spanning_tree(const GraphSnapshot& g) {
  if (g.size() == 0) return false;
  std::vector<bool> seen(g.size(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (const Neighbor& nb : g.neighbors(v)) {
      if (!seen[nb.index]) {
        seen[nb.index] = true;
        ++reached;
        stack.push_back(nb.index);
      }
    }
  }
  return reached == g.size();
}

GraphSchedule::GraphSchedule(std::vector<Segment> segments, bool cyclic)
    : segments_(std::move(segments)), cyclic_(cyclic) {
  if (segments_.empty()) throw Error(ErrorKind::ConfigError, "graph schedule has no segments");
  const std::size_t n = segments_.front().snapshot.size();
  double t = 0.0;
  for (const Segment& s : segments_) {
    if (s.snapshot.size() != n) throw Error(ErrorKind::DimensionMismatch, "schedule snapshots differ in n");
    if (!(s.duration > 0.0)) throw Error(ErrorKind::ConfigError, "segment duration must be > 0");
    starts_.push_back(t);
    t += s.duration;
  }
  period_ = t;
}

GraphSchedule GraphSchedule::constant(GraphSnapshot g) {
  std::vector<Segment> segs;
  segs.push_back({1.0, std::move(g)});
  return GraphSchedule(std::move(segs), false);
}

std::size_t GraphSchedule::segment_index_at(double t) const {
  if (!(t >= 0.0)) throw Error(ErrorKind::InvalidTime, "t=" + std::to_string(t));
  if (cyclic_) {
    t = std::fmod(t, period_);
  } else if (t >= period_) {
    return segments_.size() - 1;
  }
  // Last start <= t, so a boundary belongs to the later segment.
  auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
  return static_cast<std::size_t>(std::distance(starts_.begin(), it)) - 1;
}

GraphSchedule GraphSchedule::normalized() const {
  std::vector<Segment> segs;
  segs.reserve(segments_.size());
  for (const Segment& s : segments_) segs.push_back({s.duration, s.snapshot.normalized()});
  return GraphSchedule(std::move(segs), cyclic_);
}

bool check_assumption_tree(const GraphSchedule& schedule, double window) {
  if (!(window > 0.0)) return false;
  const auto segs = schedule.segments();
  const std::size_t m = segs.size();
  const double slack = 1e-12 * std::max(1.0, schedule.period());
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<GraphSnapshot> active;
    double elapsed = 0.0;
    for (std::size_t step = 0; step < m; ++step) {
      const std::size_t idx = k + step;
      if (idx >= m && !schedule.cyclic()) break;
      if (step > 0 && elapsed >= window - slack) break;
      const Segment& s = segs[idx % m];
      active.push_back(s.snapshot);
      elapsed += s.duration;
    }
    if (!has_spanning_tree(union_of(active))) return false;
  }
  return true;
}

GraphSnapshot cycle_graph(std::size_t n, Rng& rng, double weight_lo, double weight_hi) {
  std::vector<Edge> edges;
  if (n == 2) {
    edges.push_back({0, 1, rng.uniform(weight_lo, weight_hi)});
  } else if (n > 2) {
    for (std::size_t i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, rng.uniform(weight_lo, weight_hi)});
  }
  return GraphSnapshot::from_edges(n, edges);
}

std::vector<Edge> scale_free_edges(std::size_t n, std::size_t m, Rng& rng) {
  if (m == 0 || n <= m) throw Error(ErrorKind::ConfigError, "scale-free graph needs n > m >= 1");
  std::vector<Edge> edges;
  std::vector<std::size_t> endpoints;  // vertex repeated once per incident edge
  for (std::size_t i = 0; i <= m; ++i) {
    for (std::size_t j = i + 1; j <= m; ++j) {
      edges.push_back({i, j, 1.0});
      endpoints.push_back(i);
      endpoints.push_back(j);
    }
  }
  std::vector<std::size_t> targets;
  for (std::size_t v = m + 1; v < n; ++v) {
    targets.clear();
    while (targets.size() < m) {
      const std::size_t t = endpoints[rng.below(endpoints.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (std::size_t t : targets) {
      edges.push_back({std::min(t, v), std::max(t, v), 1.0});
      endpoints.push_back(t);
      endpoints.push_back(v);
    }
  }
  return edges;
}

GraphSchedule thinned_schedule(std::size_t n, std::span<const Edge> base, const ThinningOptions& options,
                               Rng& rng) {
  if (options.snapshots == 0) throw Error(ErrorKind::ConfigError, "thinned schedule needs >= 1 snapshot");
  if (!has_spanning_tree(GraphSnapshot::from_edges(n, base))) {
    throw Error(ErrorKind::ConfigError, "base graph for thinning is disconnected");
  }
  for (std::size_t attempt = 0; attempt < options.max_attempts; ++attempt) {
    std::vector<GraphSnapshot> snaps;
    bool ok = true;
    for (std::size_t s = 0; s < options.snapshots; ++s) {
      std::vector<Edge> kept;
      for (const Edge& e : base) {
        if (rng.canonical() < options.keep_probability) kept.push_back(e);
      }
      snaps.push_back(GraphSnapshot::from_edges(n, kept));
      if (options.require_disconnected && has_spanning_tree(snaps.back())) ok = false;
    }
    if (!ok || !has_spanning_tree(union_of(snaps))) continue;
    std::vector<Segment> segs;
    for (GraphSnapshot& g : snaps) segs.push_back({options.segment_length, std::move(g)});
    return GraphSchedule(std::move(segs), true);
  }
  throw Error(ErrorKind::ConfigError, "could not draw a thinned schedule with a connected union");
}

}  // namespace resalloc
