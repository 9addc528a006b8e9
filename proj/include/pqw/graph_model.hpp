#pragma once

#include <Eigen/Dense>

#include <compare>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pqw {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Unordered vertex pair, stored with u < v.
struct Edge {
  int u = 0;
  int v = 0;
  auto operator<=>(const Edge&) const = default;
};

struct GraphValidity {
  bool connected = false;
  bool bipartite = false;
  bool ok_as_base() const { return connected && !bipartite; }
};

// Simple undirected graph on vertices 0..n-1. Immutable after construction.
class Graph {
 public:
  // Throws ValidationError on self-loops, duplicate edges, or
  // out-of-range endpoints. Edge endpoints may be given in either order.
  Graph(int n, std::vector<Edge> edges);

  static Graph complete(int n);
  static Graph odd_cycle(int n);
  static Graph path(int n);

  int n() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }
  bool has_edge(int u, int v) const;
  std::vector<int> degrees() const;

  GraphValidity check() const;
  // Throws ValidationError unless the graph is connected and non-bipartite.
  void require_base_graph() const;

  Graph complement() const;

  bool operator==(const Graph& other) const {
    return n_ == other.n_ && edges_ == other.edges_;
  }

 private:
  int n_;
  std::vector<Edge> edges_;
  std::vector<std::uint8_t> adjacency_;
};

// Row-stochastic matrix with nonnegative entries. The constructor enforces
// the invariants and reports the first offending row.
class TransitionMatrix {
 public:
  static constexpr double kRowSumTolerance = 1e-12;

  explicit TransitionMatrix(Matrix entries);

  // p_xy = 1/deg(x) on edges; an isolated vertex x gets p_xx = 1.
  static TransitionMatrix from_graph(const Graph& g);

  int n() const { return static_cast<int>(entries_.rows()); }
  const Matrix& entries() const { return entries_; }
  double operator()(int x, int y) const { return entries_(x, y); }
  bool symmetric() const { return symmetric_; }

 private:
  Matrix entries_;
  bool symmetric_ = false;
};

class MarkedSet {
 public:
  MarkedSet() = default;
  MarkedSet(int n, std::vector<int> members);
  static MarkedSet empty(int n) { return MarkedSet(n, {}); }
  static MarkedSet first(int m, int n);

  int n() const { return n_; }
  int m() const { return static_cast<int>(members_.size()); }
  double epsilon() const { return static_cast<double>(m()) / n_; }
  bool contains(int x) const { return mask_[static_cast<std::size_t>(x)] != 0; }
  bool is_empty() const { return members_.empty(); }
  const std::vector<int>& members() const { return members_; }
  // Unmarked vertices in increasing order.
  std::vector<int> complement() const;

  bool operator==(const MarkedSet& other) const {
    return n_ == other.n_ && members_ == other.members_;
  }

 private:
  int n_ = 0;
  std::vector<int> members_;
  std::vector<std::uint8_t> mask_;
};

TransitionMatrix build_transition_matrix(const Graph& g);

// Rows of marked vertices become standard basis rows.
TransitionMatrix apply_marking(const TransitionMatrix& p, const MarkedSet& marked);

// P with the rows and columns of marked vertices deleted. Throws
// ValidationError when every vertex is marked.
Matrix submatrix_PM(const TransitionMatrix& p, const MarkedSet& marked);

struct GraphSpec {
  enum class Kind { complete, odd_cycle, file };
  Kind kind = Kind::complete;
  int n = 0;
  std::filesystem::path file;

  // Accepts "complete:N", "cycle:N" and "file:PATH".
  static GraphSpec parse(std::string_view text);
  std::string to_string() const;
};

Graph generate_graph(const GraphSpec& spec);

// {"n": <int>, "edges": [[i, j], ...]} with i < j.
Graph graph_from_json(std::string_view text);
Graph load_graph_file(const std::filesystem::path& path);
std::string graph_to_json(const Graph& g);

}  // namespace pqw
