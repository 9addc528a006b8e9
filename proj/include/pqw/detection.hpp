#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pqw/decoherence.hpp"
#include "pqw/graph_model.hpp"
#include "pqw/rng.hpp"

namespace pqw {

struct DetectionTrialResult {
  int t_chosen = 0;
  int outcome = 0;
  double p0 = 1.0;
  double p1 = 0.0;
  // max_i ||U_i psi0 - psi0|| over the operators drawn in this trial.
  double max_step_deviation = 0.0;
  // p1 from the explicit control (x) walk simulation, when requested.
  std::optional<double> reference_p1;
};

struct TrialOptions {
  bool sample_outcome = true;
  // Also run the 2n^2-dimensional control-register simulation.
  bool reference_check = false;
};

// One run of the controlled-evolution circuit: draw t uniformly from
// {0..T}, draw U_1..U_t from the percolation model (marked chains when M is
// non-empty), then p1 = 1/4 ||psi0 - U_t...U_1 psi0||^2.
DetectionTrialResult run_detection_trial(const PercolationModel& model, const MarkedSet& marked,
                                         int T, CounterRng& rng, const TrialOptions& options = {});

struct ControlProbabilities {
  double p0 = 0.0;
  double p1 = 0.0;
};

// |0>|psi0> -> H on control -> C(U_1)..C(U_k) -> H -> measure control.
// Operates on the full 2n^2 state vector.
ControlProbabilities simulate_control_register(const Vector& psi0,
                                               const std::vector<Matrix>& ops);

struct DetectionReport {
  std::uint64_t trials = 0;
  int T = 0;
  double p = 0.0;
  Variant variant = Variant::bond_flip;
  int m = 0;
  int n = 0;
  int a_c = 0;
  std::uint64_t seed = 0;
  double frac_outcome1 = 0.0;
  double mean_p1 = 0.0;
  // 1/4 (1 - m/n) when marked, (1 - p)^(a_c T) when M is empty.
  double guarantee = 0.0;
  // Binomial standard deviation of the compared frequency at the guarantee.
  double sigma = 0.0;
  bool pass = false;
  double max_invariance_deviation = 0.0;
  std::optional<double> reference_max_abs_diff;

  bool marked_case() const { return m > 0; }
  double frac_outcome0() const { return 1.0 - frac_outcome1; }
};

struct CampaignOptions {
  bool reference_check = false;
  unsigned workers = 0;
};

// Trial i uses stream (seed, i); aggregation is in trial order.
DetectionReport run_detection_campaign(const PercolationModel& model, const MarkedSet& marked,
                                       int T, std::uint64_t trials, std::uint64_t seed,
                                       const CampaignOptions& options = {});

struct ExactMeanP1 {
  double value = 0.0;
  // "enumeration" when every length-T sequence was summed explicitly,
  // "averaged-operator" when evaluated through the F_dec curve of Ubar.
  std::string method;
};

// 1/(4(T+1)) sum_{P_T} Pr(P_T) sum_{t<=T} ||psi0 - U_{P_t} psi0||^2.
ExactMeanP1 exact_mean_p1(const PercolationModel& model, const MarkedSet& marked, int T,
                          std::uint64_t sequence_budget = 1u << 20,
                          std::uint64_t enumeration_cap = kDefaultEnumerationCap);

// Removal-only, empty M: for every subgraph P_i of the base, the deviation
// ||U_{P_i} psi0 - psi0|| with psi0 from the base chain.
struct InvarianceProbe {
  double max_deviation = 0.0;
  std::vector<double> deviations;  // indexed by removal mask
  std::vector<Graph> worst_graphs;
  bool claim_holds = false;        // max_deviation <= 1e-10
};
InvarianceProbe removal_invariance_probe(const Graph& base,
                                         std::uint64_t cap = kDefaultEnumerationCap);

nlohmann::json to_json(const DetectionReport& report);

}  // namespace pqw
