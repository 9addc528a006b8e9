#include "pqw/detection.hpp"

#include <cmath>
#include <functional>

#include "pqw/errors.hpp"
#include "pqw/hitting_time.hpp"
#include "pqw/szegedy_core.hpp"
#include "parallel.hpp"

namespace pqw {

namespace {

constexpr double kInvarianceTolerance = 1e-10;

Vector base_initial_state(const PercolationModel& model) {
  return initial_state(build_transition_matrix(model.base())).amplitudes();
}

}  // namespace

ControlProbabilities simulate_control_register(const Vector& psi0,
                                               const std::vector<Matrix>& ops) {
  const Eigen::Index dim = psi0.size();
  Vector state = Vector::Zero(2 * dim);
  state.head(dim) = psi0;

  auto hadamard = [&](Vector& s) {
    const Vector zero = s.head(dim);
    const Vector one = s.tail(dim);
    s.head(dim) = (zero + one) / std::sqrt(2.0);
    s.tail(dim) = (zero - one) / std::sqrt(2.0);
  };

  hadamard(state);
  for (const auto& u : ops) {
    // Controlled-U acts on the |1> block only.
    const Vector one = state.tail(dim);
    state.tail(dim) = u * one;
  }
  hadamard(state);
  return {state.head(dim).squaredNorm(), state.tail(dim).squaredNorm()};
}

DetectionTrialResult run_detection_trial(const PercolationModel& model, const MarkedSet& marked,
                                         int T, CounterRng& rng, const TrialOptions& options) {
  if (T < 0) throw ValidationError("T must be non-negative");
  if (marked.n() != model.base().n()) {
    throw ValidationError("marked set size does not match the base graph");
  }
  const Vector psi0 = base_initial_state(model);
  DetectionTrialResult result;
  result.t_chosen = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(T) + 1));

  std::vector<Matrix> ops;
  Vector state = psi0;
  for (int step = 0; step < result.t_chosen; ++step) {
    Matrix u = marked_walk_unitary(sample_percolated_graph(model, rng), marked);
    result.max_step_deviation = std::max(result.max_step_deviation, (u * psi0 - psi0).norm());
    state = u * state;
    if (options.reference_check) ops.push_back(std::move(u));
  }
  result.p0 = 0.25 * (psi0 + state).squaredNorm();
  result.p1 = 0.25 * (psi0 - state).squaredNorm();
  if (options.sample_outcome) result.outcome = rng.uniform() < result.p1 ? 1 : 0;
  if (options.reference_check) result.reference_p1 = simulate_control_register(psi0, ops).p1;
  return result;
}

DetectionReport run_detection_campaign(const PercolationModel& model, const MarkedSet& marked,
                                       int T, std::uint64_t trials, std::uint64_t seed,
                                       const CampaignOptions& options) {
  if (trials < 1) throw ValidationError("a campaign needs at least one trial");
  std::vector<DetectionTrialResult> results(trials);
  TrialOptions trial_options;
  trial_options.reference_check = options.reference_check;
  detail::parallel_for(trials, detail::resolve_workers(options.workers), [&](std::size_t i) {
    CounterRng rng(seed, i);
    results[i] = run_detection_trial(model, marked, T, rng, trial_options);
  });

  DetectionReport report;
  report.trials = trials;
  report.T = T;
  report.p = model.p();
  report.variant = model.variant();
  report.m = marked.m();
  report.n = marked.n();
  report.a_c = model.a_c();
  report.seed = seed;

  std::uint64_t ones = 0;
  double p1_sum = 0.0;
  double ref_diff = 0.0;
  for (const auto& r : results) {
    ones += static_cast<std::uint64_t>(r.outcome);
    p1_sum += r.p1;
    report.max_invariance_deviation = std::max(report.max_invariance_deviation,
                                               r.max_step_deviation);
    if (r.reference_p1) ref_diff = std::max(ref_diff, std::abs(*r.reference_p1 - r.p1));
  }
  if (options.reference_check) report.reference_max_abs_diff = ref_diff;
  const double count = static_cast<double>(trials);
  report.frac_outcome1 = static_cast<double>(ones) / count;
  report.mean_p1 = p1_sum / count;

  if (report.marked_case()) {
    report.guarantee = 0.25 * (1.0 - marked.epsilon());
    report.sigma = std::sqrt(report.guarantee * (1.0 - report.guarantee) / count);
    report.pass = report.frac_outcome1 >= report.guarantee - 4.0 * report.sigma;
  } else {
    report.guarantee = std::pow(1.0 - model.p(), static_cast<double>(model.a_c()) * T);
    report.sigma = std::sqrt(report.guarantee * (1.0 - report.guarantee) / count);
    report.pass = report.frac_outcome0() >= report.guarantee - 4.0 * report.sigma;
  }
  return report;
}

ExactMeanP1 exact_mean_p1(const PercolationModel& model, const MarkedSet& marked, int T,
                          std::uint64_t sequence_budget, std::uint64_t enumeration_cap) {
  if (T < 0) throw ValidationError("T must be non-negative");
  const Vector psi0 = base_initial_state(model);

  std::vector<WeightedCandidate> candidates;
  bool enumerable = false;
  try {
    candidates = enumerate_candidates(model, enumeration_cap);
    enumerable = std::pow(static_cast<double>(candidates.size()), T) <=
                 static_cast<double>(sequence_budget);
  } catch (const BudgetError&) {
    enumerable = false;
  }

  ExactMeanP1 out;
  if (enumerable) {
    std::vector<Matrix> ops;
    for (const auto& c : candidates) ops.push_back(marked_walk_unitary(model.candidate(c.mask), marked));
    double total = 0.0;
    // DFS over the sequence (P_1..P_T); path_sum carries sum_{s<=depth} ||psi0 - v_s||^2.
    std::function<void(int, double, const Vector&, double)> visit =
        [&](int depth, double prob, const Vector& v, double path_sum) {
          if (depth == T) {
            total += prob * path_sum;
            return;
          }
          for (std::size_t i = 0; i < ops.size(); ++i) {
            const Vector next = ops[i] * v;
            visit(depth + 1, prob * candidates[i].weight, next,
                  path_sum + (psi0 - next).squaredNorm());
          }
        };
    visit(0, 1.0, psi0, 0.0);
    out.value = total / (4.0 * (T + 1));
    out.method = "enumeration";
    return out;
  }

  const auto ubar = build_averaged_operator_exact(model, marked, enumeration_cap);
  const auto F = decoherent_F_curve(ubar, build_transition_matrix(model.base()), T);
  out.value = F.back() / 4.0;
  out.method = "averaged-operator";
  return out;
}

InvarianceProbe removal_invariance_probe(const Graph& base, std::uint64_t cap) {
  const PercolationModel model(base, 0.5, Variant::removal_only);
  const auto candidates = enumerate_candidates(model, cap);
  const Vector psi0 = base_initial_state(model);
  const MarkedSet none = MarkedSet::empty(base.n());
  InvarianceProbe probe;
  for (const auto& c : candidates) {
    const Graph g = model.candidate(c.mask);
    const double dev = (marked_walk_unitary(g, none) * psi0 - psi0).norm();
    probe.deviations.push_back(dev);
    if (dev > probe.max_deviation + 1e-15) {
      probe.max_deviation = dev;
      probe.worst_graphs = {g};
    } else if (std::abs(dev - probe.max_deviation) <= 1e-15) {
      probe.worst_graphs.push_back(g);
    }
  }
  probe.claim_holds = probe.max_deviation <= kInvarianceTolerance;
  return probe;
}

nlohmann::json to_json(const DetectionReport& r) {
  nlohmann::json j = {{"trials", r.trials},
                      {"T", r.T},
                      {"p", r.p},
                      {"variant", to_string(r.variant)},
                      {"m", r.m},
                      {"n", r.n},
                      {"a_c", r.a_c},
                      {"seed", r.seed},
                      {"frac_outcome1", r.frac_outcome1},
                      {"frac_outcome0", r.frac_outcome0()},
                      {"mean_p1", r.mean_p1},
                      {"guarantee", r.guarantee},
                      {"guarantee_kind", r.marked_case() ? "marked: (1-m/n)/4 on outcome 1"
                                                         : "empty: (1-p)^(a_c T) on outcome 0"},
                      {"sigma", r.sigma},
                      {"pass", r.pass},
                      {"max_invariance_deviation", r.max_invariance_deviation}};
  if (r.reference_max_abs_diff) j["reference_max_abs_diff"] = *r.reference_max_abs_diff;
  if (!r.marked_case() && r.variant == Variant::removal_only) {
    const bool invariant = r.max_invariance_deviation <= kInvarianceTolerance;
    j["one_sided_claim"] = {
        {"claimed_frac_outcome0", 1.0},
        {"invariance_holds_on_samples", invariant},
        {"observed_frac_outcome0", r.frac_outcome0()},
        {"consistent", invariant ? r.frac_outcome1 == 0.0 : true},
        {"note", invariant ? "psi0 invariant under every sampled U_{P_i}; outcome 0 certain"
                           : "psi0 not invariant under some sampled U_{P_i} (degree-rebuilt "
                             "chains); outcome 1 possible with M empty"}};
  }
  return j;
}

}  // namespace pqw
