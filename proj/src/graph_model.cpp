#include "pqw/graph_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "pqw/errors.hpp"

namespace pqw {

namespace {

std::size_t pair_index(int n, int u, int v) {
  return static_cast<std::size_t>(u) * static_cast<std::size_t>(n) +
         static_cast<std::size_t>(v);
}

int parse_positive_int(std::string_view text, std::string_view what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

Graph::Graph(int n, std::vector<Edge> edges) : n_(n) {
  if (n < 2) throw ValidationError("graph needs at least two vertices");
  adjacency_.assign(static_cast<std::size_t>(n) * n, 0);
  for (auto& e : edges) {
    if (e.u == e.v) {
      throw ValidationError("self-loop at vertex " + std::to_string(e.u));
    }
    if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n) {
      throw ValidationError("edge {" + std::to_string(e.u) + "," + std::to_string(e.v) +
                            "} out of range for n=" + std::to_string(n));
    }
    if (e.u > e.v) std::swap(e.u, e.v);
    auto& slot = adjacency_[pair_index(n, e.u, e.v)];
    if (slot) {
      throw ValidationError("duplicate edge {" + std::to_string(e.u) + "," +
                            std::to_string(e.v) + "}");
    }
    slot = 1;
    adjacency_[pair_index(n, e.v, e.u)] = 1;
  }
  std::sort(edges.begin(), edges.end());
  edges_ = std::move(edges);
}

Graph Graph::complete(int n) {
  if (n < 3) throw ValidationError("complete graph requires n >= 3");
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) edges.push_back({u, v});
  }
  return Graph(n, std::move(edges));
}

Graph Graph::odd_cycle(int n) {
  if (n < 3 || n % 2 == 0) throw ValidationError("odd cycle requires odd n >= 3");
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n});
  return Graph(n, std::move(edges));
}

Graph Graph::path(int n) {
  if (n < 2) throw ValidationError("path requires n >= 2");
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return Graph(n, std::move(edges));
}

bool Graph::has_edge(int u, int v) const {
  return adjacency_[pair_index(n_, u, v)] != 0;
}

std::vector<int> Graph::degrees() const {
  std::vector<int> deg(static_cast<std::size_t>(n_), 0);
  for (const auto& e : edges_) {
    ++deg[static_cast<std::size_t>(e.u)];
    ++deg[static_cast<std::size_t>(e.v)];
  }
  return deg;
}

GraphValidity Graph::check() const {
  // BFS 2-colouring; an odd cycle anywhere makes the graph non-bipartite.
  std::vector<int> colour(static_cast<std::size_t>(n_), -1);
  GraphValidity result;
  result.bipartite = true;
  int components = 0;
  for (int start = 0; start < n_; ++start) {
    if (colour[static_cast<std::size_t>(start)] >= 0) continue;
    ++components;
    std::queue<int> queue;
    colour[static_cast<std::size_t>(start)] = 0;
    queue.push(start);
    while (!queue.empty()) {
      int x = queue.front();
      queue.pop();
      for (int y = 0; y < n_; ++y) {
        if (!has_edge(x, y)) continue;
        auto& cy = colour[static_cast<std::size_t>(y)];
        if (cy < 0) {
          cy = 1 - colour[static_cast<std::size_t>(x)];
          queue.push(y);
        } else if (cy == colour[static_cast<std::size_t>(x)]) {
          result.bipartite = false;
        }
      }
    }
  }
  result.connected = components == 1;
  return result;
}

void Graph::require_base_graph() const {
  auto validity = check();
  if (!validity.connected) throw ValidationError("base graph is not connected");
  if (validity.bipartite) throw ValidationError("base graph is bipartite");
}

Graph Graph::complement() const {
  std::vector<Edge> edges;
  for (int u = 0; u < n_; ++u) {
    for (int v = u + 1; v < n_; ++v) {
      if (!has_edge(u, v)) edges.push_back({u, v});
    }
  }
  return Graph(n_, std::move(edges));
}

TransitionMatrix::TransitionMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw InvariantError("transition matrix must be square and non-empty");
  }
  const Eigen::Index n = entries_.rows();
  for (Eigen::Index x = 0; x < n; ++x) {
    double sum = 0.0;
    for (Eigen::Index y = 0; y < n; ++y) {
      double v = entries_(x, y);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw InvariantError("row " + std::to_string(x) +
                             " has an entry outside [0,1] at column " + std::to_string(y));
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "row " << x << " is not stochastic (sum " << sum << ")";
      throw InvariantError(msg.str());
    }
  }
  symmetric_ = (entries_ - entries_.transpose()).cwiseAbs().maxCoeff() <= 1e-12;
}

TransitionMatrix TransitionMatrix::from_graph(const Graph& g) {
  const int n = g.n();
  Matrix p = Matrix::Zero(n, n);
  auto deg = g.degrees();
  for (int x = 0; x < n; ++x) {
    const int d = deg[static_cast<std::size_t>(x)];
    if (d == 0) {
      p(x, x) = 1.0;
      continue;
    }
    const double w = 1.0 / d;
    for (int y = 0; y < n; ++y) {
      if (g.has_edge(x, y)) p(x, y) = w;
    }
  }
  return TransitionMatrix(std::move(p));
}

TransitionMatrix build_transition_matrix(const Graph& g) {
  return TransitionMatrix::from_graph(g);
}

MarkedSet::MarkedSet(int n, std::vector<int> members) : n_(n) {
  if (n < 1) throw ValidationError("marked set needs n >= 1");
  mask_.assign(static_cast<std::size_t>(n), 0);
  for (int x : members) {
    if (x < 0 || x >= n) {
      throw ValidationError("marked vertex " + std::to_string(x) + " out of range for n=" +
                            std::to_string(n));
    }
    if (mask_[static_cast<std::size_t>(x)]) {
      throw ValidationError("marked vertex " + std::to_string(x) + " listed twice");
    }
    mask_[static_cast<std::size_t>(x)] = 1;
  }
  std::sort(members.begin(), members.end());
  members_ = std::move(members);
}

MarkedSet MarkedSet::first(int m, int n) {
  if (m < 0 || m > n) throw ValidationError("cannot mark " + std::to_string(m) + " of " +
                                            std::to_string(n) + " vertices");
  std::vector<int> members(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) members[static_cast<std::size_t>(i)] = i;
  return MarkedSet(n, std::move(members));
}

std::vector<int> MarkedSet::complement() const {
  std::vector<int> rest;
  for (int x = 0; x < n_; ++x) {
    if (!contains(x)) rest.push_back(x);
  }
  return rest;
}

TransitionMatrix apply_marking(const TransitionMatrix& p, const MarkedSet& marked) {
  if (marked.n() != p.n()) throw ValidationError("marked set and matrix sizes differ");
  Matrix out = p.entries();
  for (int x : marked.members()) {
    out.row(x).setZero();
    out(x, x) = 1.0;
  }
  return TransitionMatrix(std::move(out));
}

Matrix submatrix_PM(const TransitionMatrix& p, const MarkedSet& marked) {
  if (marked.n() != p.n()) throw ValidationError("marked set and matrix sizes differ");
  if (marked.m() == p.n()) throw ValidationError("P_M is empty: every vertex is marked");
  auto keep = marked.complement();
  const auto k = static_cast<Eigen::Index>(keep.size());
  Matrix out(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      out(i, j) = p(keep[static_cast<std::size_t>(i)], keep[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

GraphSpec GraphSpec::parse(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ParseError("graph spec '" + std::string(text) +
                     "' must look like complete:N, cycle:N or file:PATH");
  }
  auto family = text.substr(0, colon);
  auto arg = text.substr(colon + 1);
  GraphSpec spec;
  if (family == "complete") {
    spec.kind = Kind::complete;
    spec.n = parse_positive_int(arg, "vertex count");
  } else if (family == "cycle" || family == "odd_cycle") {
    spec.kind = Kind::odd_cycle;
    spec.n = parse_positive_int(arg, "vertex count");
  } else if (family == "file") {
    spec.kind = Kind::file;
    spec.file = std::filesystem::path(std::string(arg));
  } else {
    throw ParseError("unknown graph family '" + std::string(family) + "'");
  }
  return spec;
}

std::string GraphSpec::to_string() const {
  switch (kind) {
    case Kind::complete:
      return "complete:" + std::to_string(n);
    case Kind::odd_cycle:
      return "cycle:" + std::to_string(n);
    case Kind::file:
      return "file:" + file.string();
  }
  return {};
}

Graph generate_graph(const GraphSpec& spec) {
  switch (spec.kind) {
    case GraphSpec::Kind::complete:
      return Graph::complete(spec.n);
    case GraphSpec::Kind::odd_cycle:
      return Graph::odd_cycle(spec.n);
    case GraphSpec::Kind::file:
      return load_graph_file(spec.file);
  }
  throw ValidationError("unknown graph family");
}

Graph graph_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("graph JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("edges")) {
    throw ParseError("graph JSON must be an object with keys \"n\" and \"edges\"");
  }
  if (!doc["n"].is_number_integer()) throw ParseError("graph JSON: \"n\" must be an integer");
  const int n = doc["n"].get<int>();
  if (n < 2) throw ParseError("graph JSON: \"n\" must be at least 2");
  if (!doc["edges"].is_array()) throw ParseError("graph JSON: \"edges\" must be an array");
  std::vector<Edge> edges;
  std::size_t index = 0;
  for (const auto& item : doc["edges"]) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_number_integer() ||
        !item[1].is_number_integer()) {
      throw ParseError("graph JSON: edge #" + std::to_string(index) +
                       " must be a pair of integers");
    }
    Edge e{item[0].get<int>(), item[1].get<int>()};
    if (e.u >= e.v) {
      throw ParseError("graph JSON: edge #" + std::to_string(index) + " must satisfy i < j");
    }
    edges.push_back(e);
    ++index;
  }
  try {
    return Graph(n, std::move(edges));
  } catch (const ValidationError& e) {
    throw ParseError(std::string("graph JSON: ") + e.what());
  }
}

Graph load_graph_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open graph file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return graph_from_json(buffer.str());
}

std::string graph_to_json(const Graph& g) {
  nlohmann::json doc;
  doc["n"] = g.n();
  doc["edges"] = nlohmann::json::array();
  for (const auto& e : g.edges()) doc["edges"].push_back({e.u, e.v});
  return doc.dump();
}

}  // namespace pqw
