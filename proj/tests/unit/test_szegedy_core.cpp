#include <doctest.h>

#include <sstream>

#include "../support/fixtures.hpp"
#include "pqw/errors.hpp"
#include "pqw/szegedy_core.hpp"

using namespace pqw;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("walk operator matches the outer-product oracle on random instances") {
  CounterRng rng(11, 0);
  for (int i = 0; i < 25; ++i) {
    const Graph g = fixtures::random_base_graph(rng, 7);
    const MarkedSet m = fixtures::random_marked(rng, g.n());
    const auto p = apply_marking(build_transition_matrix(g), m);
    const Matrix expected = oracle::walk(oracle::mark(oracle::transition(fixtures::to_adjacency(g)),
                                                      m.members()));
    const auto op = build_walk_operator(p);
    CHECK(max_abs(op.U - expected) <= 1e-12);
    CHECK(max_abs(walk_unitary(p) - expected) <= 1e-12);
  }
}

TEST_CASE("walk operator structure") {
  const auto p = build_transition_matrix(Graph::odd_cycle(5));
  const auto op = build_walk_operator(p);
  const Matrix id = Matrix::Identity(25, 25);
  CHECK(max_abs(op.U.transpose() * op.U - id) <= 1e-12);
  CHECK(max_abs(op.RA * op.RA - id) <= 1e-12);
  CHECK(max_abs(op.RB * op.RB - id) <= 1e-12);
  CHECK(max_abs(op.A.transpose() * op.A - Matrix::Identity(5, 5)) <= 1e-12);
  CHECK(max_abs(op.U - op.RB * op.RA) <= 1e-14);
}

TEST_CASE("phi and psi states") {
  const auto p = build_transition_matrix(Graph::complete(3));
  const auto phi = phi_state(1, p);
  CHECK(phi(1, 0) == doctest::Approx(std::sqrt(0.5)));
  CHECK(phi(0, 1) == 0.0);
  const auto psi = psi_state(1, p);
  CHECK(psi(0, 1) == doctest::Approx(std::sqrt(0.5)));
  CHECK(psi(1, 0) == 0.0);
}

TEST_CASE("initial state is fixed by the unmarked walk") {
  for (const auto& g : {Graph::complete(4), Graph::odd_cycle(7), Graph::odd_cycle(5).complement()}) {
    const auto p = build_transition_matrix(g);
    const auto s = initial_state(p);
    CHECK(max_abs(s.amplitudes() - oracle::initial_state(p.entries())) <= 1e-15);
    CHECK((walk_unitary(p) * s.amplitudes() - s.amplitudes()).norm() <= 1e-12);
  }
}

TEST_CASE("evolution and position distribution") {
  const auto p = build_transition_matrix(Graph::complete(3));
  const auto pm = apply_marking(p, MarkedSet(3, {0}));
  const auto op = build_walk_operator(pm);
  const auto s0 = initial_state(p);
  const auto s3 = evolve(op, s0, 3);
  const Vector direct = op.U * (op.U * (op.U * s0.amplitudes()));
  CHECK((s3.amplitudes() - direct).norm() <= 1e-14);
  const auto dist = position_distribution(s3);
  double total = 0.0;
  for (double q : dist) total += q;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(evolve(op.U, s0.amplitudes(), 0) == s0.amplitudes());
}

TEST_CASE("state validation and CSV output") {
  CHECK_THROWS_AS(WalkState(2, Vector::Ones(4)), InvariantError);
  Vector v = Vector::Zero(4);
  v(1) = 1.0;
  std::ostringstream out;
  write_state_csv(out, WalkState(2, v));
  CHECK(out.str() == "index,x,y,amplitude\n0,0,0,0\n1,0,1,1\n2,1,0,0\n3,1,1,0\n");
}
