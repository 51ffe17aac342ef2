#pragma once

// Erdős–Rényi G(n, p) sampling and the dense matrices built from a graph.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "qwsearch/error.hpp"
#include "qwsearch/rng.hpp"

namespace qwsearch {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

/// Dense real symmetric matrix. Construction checks symmetry.
class SymmetricMatrix {
 public:
  static constexpr double kSymmetryTolerance = 1e-12;

  SymmetricMatrix() = default;
  explicit SymmetricMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
    detail::require(m_.rows() == m_.cols(), "SymmetricMatrix: matrix is not square");
    const double asym = m_.rows() == 0 ? 0.0 : (m_ - m_.transpose()).cwiseAbs().maxCoeff();
    detail::require(asym <= kSymmetryTolerance,
                    fmt::format("SymmetricMatrix: asymmetry {} exceeds {}", asym,
                                kSymmetryTolerance));
  }

  static SymmetricMatrix zero(Eigen::Index n) {
    return SymmetricMatrix(Eigen::MatrixXd::Zero(n, n));
  }
  static SymmetricMatrix identity(Eigen::Index n) {
    return SymmetricMatrix(Eigen::MatrixXd::Identity(n, n));
  }

  Eigen::Index size() const noexcept { return m_.rows(); }
  const Eigen::MatrixXd& dense() const noexcept { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  friend SymmetricMatrix operator*(double s, const SymmetricMatrix& a) {
    return SymmetricMatrix(Eigen::MatrixXd(s * a.m_), Unchecked{});
  }
  friend SymmetricMatrix operator+(const SymmetricMatrix& a, const SymmetricMatrix& b) {
    detail::require(a.size() == b.size(), "SymmetricMatrix: size mismatch");
    return SymmetricMatrix(Eigen::MatrixXd(a.m_ + b.m_), Unchecked{});
  }
  friend SymmetricMatrix operator-(const SymmetricMatrix& a, const SymmetricMatrix& b) {
    detail::require(a.size() == b.size(), "SymmetricMatrix: size mismatch");
    return SymmetricMatrix(Eigen::MatrixXd(a.m_ - b.m_), Unchecked{});
  }

 private:
  struct Unchecked {};
  SymmetricMatrix(Eigen::MatrixXd m, Unchecked) : m_(std::move(m)) {}

  Eigen::MatrixXd m_;
};

/// Simple undirected graph with the parameters it was sampled from.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph from an arbitrary edge list. Pairs are normalized to
  /// (min, max), duplicates are merged; self-loops and out-of-range ids throw.
  Graph(std::size_t n, std::vector<Edge> edges, double p_nominal = 0.0,
        std::uint64_t seed = 0)
      : n_(n), p_nominal_(p_nominal), seed_(seed) {
    detail::require(n >= 1, "Graph: n must be at least 1");
    for (auto& [u, v] : edges) {
      detail::require(u < n && v < n, fmt::format("Graph: edge ({}, {}) out of range", u, v));
      detail::require(u != v, fmt::format("Graph: self-loop at {}", u));
      if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);
  }

  std::size_t n() const noexcept { return n_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  double p_nominal() const noexcept { return p_nominal_; }
  std::uint64_t seed() const noexcept { return seed_; }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  double p_nominal_ = 0.0;
  std::uint64_t seed_ = 0;
};

/// Samples G(n, p): every one of the n(n-1)/2 pairs (i < j, row-major order)
/// consumes exactly one uniform draw and is kept iff the draw is below p.
inline Graph sample_gnp(std::size_t n, double p, std::uint64_t seed) {
  detail::require(n >= 1, "sample_gnp: n must be at least 1");
  detail::require(p >= 0.0 && p <= 1.0 && !std::isnan(p),
                  fmt::format("sample_gnp: p = {} outside [0, 1]", p));
  Engine eng(seed);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(p * static_cast<double>(n) * (n - 1) / 2 * 1.05) + 16);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (uniform01(eng) < p) edges.emplace_back(static_cast<Vertex>(i), static_cast<Vertex>(j));
    }
  }
  return Graph(n, std::move(edges), p, seed);
}

inline Graph complete_graph(std::size_t n, double p_nominal = 1.0) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      edges.emplace_back(static_cast<Vertex>(i), static_cast<Vertex>(j));
  return Graph(n, std::move(edges), p_nominal);
}

/// Same vertex set and provenance with every edge touching v removed.
inline Graph isolate_vertex(const Graph& g, Vertex v) {
  detail::require(v < g.n(), "isolate_vertex: vertex out of range");
  std::vector<Edge> kept;
  kept.reserve(g.edge_count());
  for (const auto& e : g.edges())
    if (e.first != v && e.second != v) kept.push_back(e);
  return Graph(g.n(), std::move(kept), g.p_nominal(), g.seed());
}

inline SymmetricMatrix adjacency(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.n());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [u, v] : g.edges()) {
    a(u, v) = 1.0;
    a(v, u) = 1.0;
  }
  return SymmetricMatrix(std::move(a));
}

inline std::vector<std::size_t> degrees(const Graph& g) {
  std::vector<std::size_t> deg(g.n(), 0);
  for (const auto& [u, v] : g.edges()) {
    ++deg[u];
    ++deg[v];
  }
  return deg;
}

/// L = D - A.
inline SymmetricMatrix laplacian(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.n());
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [u, v] : g.edges()) {
    l(u, v) = -1.0;
    l(v, u) = -1.0;
    l(u, u) += 1.0;
    l(v, v) += 1.0;
  }
  return SymmetricMatrix(std::move(l));
}

struct DegreeProfile {
  std::vector<std::size_t> degrees;
  std::size_t delta_min = 0;
  std::size_t delta_max = 0;
};

inline DegreeProfile degree_profile(const Graph& g) {
  DegreeProfile prof{degrees(g), 0, 0};
  const auto [lo, hi] = std::minmax_element(prof.degrees.begin(), prof.degrees.end());
  prof.delta_min = *lo;
  prof.delta_max = *hi;
  return prof;
}

inline std::vector<Vertex> isolated_vertices(const Graph& g) {
  const auto deg = degrees(g);
  std::vector<Vertex> out;
  for (std::size_t v = 0; v < deg.size(); ++v)
    if (deg[v] == 0) out.push_back(static_cast<Vertex>(v));
  return out;
}

inline bool is_connected(const Graph& g) {
  const std::size_t n = g.n();
  std::vector<std::vector<Vertex>> adj(n);
  for (const auto& [u, v] : g.edges()) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::vector<char> seen(n, 0);
  std::queue<Vertex> frontier;
  frontier.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const Vertex u = frontier.front();
    frontier.pop();
    for (Vertex v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == n;
}

// Edge-list text format: header line "n p seed", then one "u v" per line.

inline void write_edge_list(std::ostream& os, const Graph& g) {
  os << fmt::format("{} {} {}\n", g.n(), g.p_nominal(), g.seed());
  for (const auto& [u, v] : g.edges()) os << u << ' ' << v << '\n';
}

inline Graph read_edge_list(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("edge list: missing header line");
  std::istringstream header(line);
  std::size_t n = 0;
  double p = 0.0;
  std::uint64_t seed = 0;
  if (!(header >> n >> p >> seed)) throw IoError("edge list: malformed header '" + line + "'");
  std::vector<Edge> edges;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    Vertex u = 0, v = 0;
    if (!(row >> u >> v))
      throw IoError(fmt::format("edge list: malformed row at line {}", lineno));
    edges.emplace_back(u, v);
  }
  return Graph(n, std::move(edges), p, seed);
}

inline void save_edge_list(const std::string& path, const Graph& g) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path + " for writing");
  write_edge_list(os, g);
  if (!os) throw IoError("write failed: " + path);
}

inline Graph load_edge_list(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  return read_edge_list(is);
}

}  // namespace qwsearch
