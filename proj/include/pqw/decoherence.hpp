#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pqw/graph_model.hpp"
#include "pqw/rng.hpp"

namespace pqw {

enum class Variant { bond_flip, removal_only };

std::string to_string(Variant v);
// Accepts bond-flip / bond_flip and removal / removal-only / removal_only.
Variant parse_variant(std::string_view text);

// Per-step bond percolation on a base graph. Each "slot" is an unordered
// pair that may flip: every pair of the complete graph for bond_flip,
// only the base edges for removal_only. a_c is the slot count.
class PercolationModel {
 public:
  PercolationModel(Graph base, double p, Variant variant);

  const Graph& base() const { return base_; }
  double p() const { return p_; }
  Variant variant() const { return variant_; }
  int a_c() const { return static_cast<int>(slots_.size()); }
  const std::vector<Edge>& slots() const { return slots_; }

  // Graph with the slots marked in `flips` toggled relative to the base.
  Graph apply_flips(const std::vector<bool>& flips) const;
  // Same, with flips packed into the low a_c bits of `mask` (a_c < 64).
  Graph candidate(std::uint64_t mask) const;
  // (1-p)^(a_c - a_d) p^a_d; endpoints p = 0, 1 collapse to point masses.
  double weight(int altered) const;

  PercolationModel with_p(double p) const { return {base_, p, variant_}; }

 private:
  Graph base_;
  double p_;
  Variant variant_;
  std::vector<Edge> slots_;
  std::vector<bool> slot_in_base_;
};

// Draws one flip per slot from `rng`.
std::vector<bool> sample_flips(const PercolationModel& model, CounterRng& rng);
Graph sample_percolated_graph(const PercolationModel& model, CounterRng& rng);

// Throws ValidationError for a removal-only candidate that is not a subgraph
// of the base, or a candidate on a different vertex count.
double occurrence_probability(const PercolationModel& model, const Graph& candidate);

// Marked walk operator U_{P'} of a (possibly percolated) graph.
Matrix marked_walk_unitary(const Graph& g, const MarkedSet& marked);

struct WeightedCandidate {
  std::uint64_t mask = 0;
  double weight = 0.0;
};

// Every candidate with nonzero probability, in increasing mask order.
// Throws BudgetError if 2^a_c exceeds `cap` (point masses are exempt).
std::vector<WeightedCandidate> enumerate_candidates(const PercolationModel& model,
                                                    std::uint64_t cap);

struct AveragedOperator {
  enum class Mode { exact, monte_carlo };

  Matrix matrix;
  Mode mode = Mode::exact;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  MarkedSet marked;
  double p = 0.0;
  Variant variant = Variant::bond_flip;
  int a_c = 0;
  // exact: sum of enumerated probabilities; monte_carlo: 1.
  double weight_sum = 0.0;
  std::uint64_t distinct_graphs = 0;
  // Per-entry standard error of the Monte Carlo mean, when requested.
  std::optional<Matrix> std_error;
};

std::string to_string(AveragedOperator::Mode mode);

inline constexpr std::uint64_t kDefaultEnumerationCap = 1u << 10;
inline constexpr std::uint64_t kDefaultSamples = 10000;

AveragedOperator build_averaged_operator_exact(const PercolationModel& model,
                                               const MarkedSet& marked,
                                               std::uint64_t cap = kDefaultEnumerationCap);

struct MonteCarloOptions {
  bool std_error = false;
  // 0 picks std::thread::hardware_concurrency(). Results do not depend on it.
  unsigned workers = 0;
};

AveragedOperator build_averaged_operator_mc(const PercolationModel& model,
                                            const MarkedSet& marked, std::uint64_t samples,
                                            std::uint64_t seed,
                                            const MonteCarloOptions& options = {});

// max |sum_{P_T} Pr(P_T) U_{P_t} - Ubar^t| by brute-force enumeration of all
// length-T sequences. Throws BudgetError when (#candidates)^T > budget.
double verify_lemma1(const PercolationModel& model, const MarkedSet& marked, int t, int T,
                     std::uint64_t budget = 1u << 22);

nlohmann::json provenance_json(const AveragedOperator& op);

enum class MatrixFormat { binary, csv };
// Writes <stem>.bin or <stem>.csv plus <stem>.json with the provenance header.
void write_averaged_operator(const std::filesystem::path& stem, const AveragedOperator& op,
                             MatrixFormat format);

}  // namespace pqw
