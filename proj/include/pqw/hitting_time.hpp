#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pqw/decoherence.hpp"
#include "pqw/graph_model.hpp"
#include "pqw/spectral_bounds.hpp"

namespace pqw {

inline constexpr int kFallbackTCap = 1000;

struct HittingTimeReport {
  enum class Mode { coherent, decoherent };

  std::vector<double> F;  // F(0..T_max)
  double threshold = 1.0;
  std::optional<int> T_star;
  int T_max = 0;
  std::optional<BoundReport> bound;
  Mode mode = Mode::coherent;
  // Decoherent runs only.
  double p = 0.0;
  Variant variant = Variant::bond_flip;
  std::optional<AveragedOperator::Mode> operator_mode;
  std::optional<bool> p_within_threshold;

  bool reached() const { return T_star.has_value(); }
  // Relevant bound value: Szegedy's for coherent runs, the decoherent one otherwise.
  std::optional<double> bound_value() const;
  // T_star <= bound; false if not reached or no bound is available.
  bool within_bound() const;
};

// F(T) = 1/(T+1) sum_{t<=T} ||U_{P'}^t psi0 - psi0||^2, single pass.
std::vector<double> coherent_F_curve(const TransitionMatrix& p, const MarkedSet& marked,
                                     int T_max);

// Least T with F(T) >= 1 - m/n. Default cap: ceil(szegedy_bound), or
// kFallbackTCap when the bound is unavailable (m = 0, non-symmetric P).
HittingTimeReport coherent_qht(const TransitionMatrix& p, const MarkedSet& marked,
                               std::optional<int> T_cap = std::nullopt);

// F_dec(T) = 2 - 2/(T+1) sum_{t<=T} <psi0| Ubar^t |psi0>, powers never formed.
std::vector<double> decoherent_F_curve(const AveragedOperator& ubar, const TransitionMatrix& p,
                                       int T_max);

struct OperatorMode {
  AveragedOperator::Mode mode = AveragedOperator::Mode::exact;
  std::uint64_t samples = kDefaultSamples;
  std::uint64_t seed = 0;
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;
  unsigned workers = 0;
};

AveragedOperator build_averaged_operator(const PercolationModel& model, const MarkedSet& marked,
                                         const OperatorMode& mode);

// Default cap: ceil(dqht_bound(p)) when p <= p_threshold, kFallbackTCap otherwise.
HittingTimeReport decoherent_qht(const PercolationModel& model, const MarkedSet& marked,
                                 const OperatorMode& mode, std::optional<int> T_cap = std::nullopt);
// Same, with a prebuilt averaged operator.
HittingTimeReport decoherent_qht(const PercolationModel& model, const AveragedOperator& ubar,
                                 std::optional<int> T_cap = std::nullopt);

struct GTermReport {
  double G_M = 0.0;
  double G_MMbot = 0.0;
  double G_Mbot = 0.0;
  double epsilon = 0.0;
  double F_dec = 0.0;
  int T = 0;
};

GTermReport g_term_decomposition(const AveragedOperator& ubar, const TransitionMatrix& p,
                                 const MarkedSet& marked, int T);

// Uniform-start average of expected absorption times into M; marked starts
// contribute zero. Throws DomainError if M is unreachable.
double classical_hitting_time(const TransitionMatrix& p, const MarkedSet& marked);

// Columns T,F,threshold,crossed.
std::string curve_csv(const HittingTimeReport& report);
nlohmann::json summary_json(const HittingTimeReport& report);

}  // namespace pqw
