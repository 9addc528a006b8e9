#include <doctest.h>

#include <cmath>

#include "../support/fixtures.hpp"
#include "pqw/detection.hpp"
#include "pqw/hitting_time.hpp"
#include "pqw/spectral_bounds.hpp"
#include "pqw/szegedy_core.hpp"

using namespace pqw;

TEST_CASE("control register simulation matches the shortcut") {
  const Graph k4 = Graph::complete(4);
  const Vector psi0 = initial_state(build_transition_matrix(k4)).amplitudes();
  CounterRng rng(2, 2);
  const PercolationModel model(k4, 0.3, Variant::bond_flip);
  const MarkedSet m(4, {0});
  for (int k = 0; k <= 4; ++k) {
    std::vector<Matrix> ops;
    Vector v = psi0;
    for (int i = 0; i < k; ++i) {
      ops.push_back(marked_walk_unitary(sample_percolated_graph(model, rng), m));
      v = ops.back() * v;
    }
    const auto probs = simulate_control_register(psi0, ops);
    CHECK(probs.p0 + probs.p1 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(probs.p1 - 0.25 * (psi0 - v).squaredNorm()) <= 1e-14);
  }
}

TEST_CASE("single trials") {
  const PercolationModel model(Graph::complete(3), 0.0, Variant::bond_flip);
  CounterRng rng(5, 0);
  const auto zero = run_detection_trial(model, MarkedSet::empty(3), 10, rng);
  CHECK(zero.p1 <= 1e-28);
  CHECK(zero.outcome == 0);
  const auto t0 = run_detection_trial(model, MarkedSet(3, {0}), 0, rng);
  CHECK(t0.t_chosen == 0);
  CHECK(t0.p0 == doctest::Approx(1.0));
  TrialOptions opts;
  opts.reference_check = true;
  const PercolationModel noisy(Graph::complete(4), 0.2, Variant::bond_flip);
  for (int i = 0; i < 20; ++i) {
    const auto r = run_detection_trial(noisy, MarkedSet(4, {1}), 6, rng, opts);
    CHECK(r.p0 + r.p1 == doctest::Approx(1.0).epsilon(1e-14));
    REQUIRE(r.reference_p1);
    CHECK(std::abs(*r.reference_p1 - r.p1) <= 1e-12);
  }
}

TEST_CASE("exact mean p1 agrees with the averaged-operator curve") {
  const Graph k3 = Graph::complete(3);
  const auto p = build_transition_matrix(k3);
  for (double prob : {0.1, 0.3, 0.7}) {
    for (const auto& m : {MarkedSet::empty(3), MarkedSet(3, {0})}) {
      const PercolationModel model(k3, prob, Variant::bond_flip);
      const auto ubar = build_averaged_operator_exact(model, m);
      const auto F = decoherent_F_curve(ubar, p, 4);
      for (int T = 0; T <= 4; ++T) {
        const auto e = exact_mean_p1(model, m, T);
        CHECK(e.method == "enumeration");
        CHECK(std::abs(e.value - F[T] / 4.0) <= 1e-10);
      }
    }
  }
  CHECK(exact_mean_p1(PercolationModel(k3, 0.0, Variant::bond_flip), MarkedSet::empty(3), 7).value <= 1e-28);
  const auto fallback = exact_mean_p1(PercolationModel(k3, 0.2, Variant::bond_flip), MarkedSet(3, {0}), 12);
  CHECK(fallback.method == "averaged-operator");
}

TEST_CASE("marked K3 detection at the detection bound") {
  const Graph k3 = Graph::complete(3);
  const MarkedSet m(3, {0});
  const auto sd = spectral_data(build_transition_matrix(k3), m);
  const int T = static_cast<int>(std::ceil(detection_bound(sd, 3, 0.0)));
  const PercolationModel model(k3, 0.0, Variant::bond_flip);
  CHECK(exact_mean_p1(model, m, T).value >= 1.0 / 6.0 - 1e-10);
  const auto report = run_detection_campaign(model, m, T, 4000, 17);
  CHECK(report.pass);
  CHECK(report.mean_p1 >= 1.0 / 6.0 - 4 * report.sigma);
  CHECK(std::abs(report.frac_outcome1 - report.mean_p1) <= 5 * std::sqrt(0.25 / 4000));
}

TEST_CASE("empty marked set campaigns") {
  const PercolationModel flip(Graph::complete(3), 0.01, Variant::bond_flip);
  const auto r = run_detection_campaign(flip, MarkedSet::empty(3), 10, 3000, 1);
  CHECK(r.guarantee == doctest::Approx(std::pow(0.99, 30)));
  CHECK(r.pass);
  const auto j = to_json(r);
  CHECK_FALSE(j.contains("one_sided_claim"));

  const PercolationModel removal(Graph::complete(3), 0.3, Variant::removal_only);
  const auto rr = run_detection_campaign(removal, MarkedSet::empty(3), 10, 500, 1);
  const auto jr = to_json(rr);
  REQUIRE(jr.contains("one_sided_claim"));
  CHECK(jr["one_sided_claim"]["consistent"].get<bool>());
}

TEST_CASE("campaigns are deterministic across worker counts") {
  const PercolationModel model(Graph::complete(4), 0.1, Variant::bond_flip);
  CampaignOptions one, three;
  one.workers = 1;
  three.workers = 3;
  const auto a = run_detection_campaign(model, MarkedSet(4, {2}), 12, 700, 9, one);
  const auto b = run_detection_campaign(model, MarkedSet(4, {2}), 12, 700, 9, three);
  CHECK(to_json(a).dump() == to_json(b).dump());
}

TEST_CASE("removal invariance probe") {
  const auto probe = removal_invariance_probe(Graph::complete(3));
  CHECK(probe.deviations.size() == 8);
  CHECK(probe.max_deviation >= 0.0);
  const auto k4 = removal_invariance_probe(Graph::complete(4));
  CHECK(k4.deviations.size() == 64);
  CHECK(k4.claim_holds == (k4.max_deviation <= 1e-10));
}
