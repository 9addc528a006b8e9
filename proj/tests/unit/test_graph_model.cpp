#include <doctest.h>

#include <filesystem>

#include "pqw/errors.hpp"
#include "pqw/graph_model.hpp"
#include "pqw/text_io.hpp"

using namespace pqw;

TEST_CASE("graph construction normalises and rejects bad edges") {
  Graph g(4, {{2, 1}, {0, 3}});
  CHECK(g.edges() == std::vector<Edge>{{0, 3}, {1, 2}});
  CHECK(g.has_edge(3, 0));
  CHECK_FALSE(g.has_edge(0, 1));
  CHECK_THROWS_AS(Graph(3, {{1, 1}}), ValidationError);
  CHECK_THROWS_AS(Graph(3, {{0, 1}, {1, 0}}), ValidationError);
  CHECK_THROWS_AS(Graph(3, {{0, 3}}), ValidationError);
  CHECK_THROWS_AS(Graph(1, {}), ValidationError);
}

TEST_CASE("families") {
  CHECK(Graph::complete(5).edge_count() == 10);
  CHECK(Graph::odd_cycle(7).edge_count() == 7);
  CHECK(Graph::path(3).edge_count() == 2);
  CHECK_THROWS_AS(Graph::odd_cycle(6), ValidationError);
  CHECK_THROWS_AS(Graph::complete(2), ValidationError);
  CHECK(Graph::complete(4).complement().edge_count() == 0);
}

TEST_CASE("base graph validity") {
  CHECK(Graph::complete(3).check().ok_as_base());
  CHECK(Graph::odd_cycle(5).check().ok_as_base());
  const auto path = Graph::path(4).check();
  CHECK(path.connected);
  CHECK(path.bipartite);
  CHECK_THROWS_AS(Graph::path(4).require_base_graph(), ValidationError);
  CHECK_THROWS_AS(Graph(4, {{0, 1}, {1, 2}, {0, 2}}).require_base_graph(), ValidationError);
}

TEST_CASE("transition matrix of K3") {
  const auto p = build_transition_matrix(Graph::complete(3));
  for (int x = 0; x < 3; ++x) {
    for (int y = 0; y < 3; ++y) CHECK(p(x, y) == doctest::Approx(x == y ? 0.0 : 0.5));
  }
  CHECK(p.symmetric());
}

TEST_CASE("isolated vertex stays put") {
  const auto p = build_transition_matrix(Graph(3, {{0, 1}}));
  CHECK(p(2, 2) == 1.0);
  CHECK(p(0, 1) == 1.0);
}

TEST_CASE("transition matrix invariants name the row") {
  Matrix bad = Matrix::Zero(2, 2);
  bad << 0.5, 0.5, 0.7, 0.2;
  try {
    const TransitionMatrix p{bad};
    FAIL("expected an invariant error");
  } catch (const InvariantError& e) {
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
  }
  Matrix negative(2, 2);
  negative << 1.5, -0.5, 0.0, 1.0;
  CHECK_THROWS_AS(TransitionMatrix{negative}, InvariantError);
}

TEST_CASE("marking") {
  const auto p = build_transition_matrix(Graph::complete(4));
  const MarkedSet m(4, {2, 0});
  CHECK(m.members() == std::vector<int>{0, 2});
  CHECK(m.epsilon() == doctest::Approx(0.5));
  CHECK(m.complement() == std::vector<int>{1, 3});
  const auto pm = apply_marking(p, m);
  CHECK(pm(0, 0) == 1.0);
  CHECK(pm(2, 1) == 0.0);
  CHECK(pm(1, 0) == doctest::Approx(1.0 / 3));
  CHECK(apply_marking(pm, m).entries() == pm.entries());
  CHECK(apply_marking(p, MarkedSet::empty(4)).entries() == p.entries());
  const Matrix sub = submatrix_PM(p, m);
  CHECK(sub.rows() == 2);
  CHECK(sub(0, 1) == doctest::Approx(1.0 / 3));
  CHECK_THROWS_AS(MarkedSet(3, {3}), ValidationError);
  CHECK_THROWS_AS(MarkedSet(3, {1, 1}), ValidationError);
  CHECK_THROWS_AS(submatrix_PM(p, MarkedSet::first(4, 4)), ValidationError);
}

TEST_CASE("graph specs and JSON") {
  CHECK(generate_graph(GraphSpec::parse("complete:6")) == Graph::complete(6));
  CHECK(generate_graph(GraphSpec::parse("cycle:5")) == Graph::odd_cycle(5));
  CHECK(GraphSpec::parse("cycle:5").to_string() == "cycle:5");
  CHECK_THROWS_AS(GraphSpec::parse("star:4"), ParseError);
  CHECK_THROWS_AS(GraphSpec::parse("complete:x"), ParseError);

  const Graph g = Graph::odd_cycle(5);
  CHECK(graph_from_json(graph_to_json(g)) == g);
  CHECK_THROWS_AS(graph_from_json(R"({"n": 3, "edges": [[1, 0]]})"), ParseError);
  CHECK_THROWS_AS(graph_from_json(R"({"n": 3, "edges": [[0, 1], [0, 1]]})"), ValidationError);
  CHECK_THROWS_AS(graph_from_json("{"), ParseError);

  const auto dir = std::filesystem::temp_directory_path() / "pqw_graph_test";
  write_text_file(dir / "g.json", graph_to_json(g));
  CHECK(generate_graph(GraphSpec::parse("file:" + (dir / "g.json").string())) == g);
  CHECK_THROWS_AS(load_graph_file(dir / "missing.json"), ParseError);
}
