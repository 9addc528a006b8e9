#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pqw/graph_model.hpp"

namespace pqw {

// Eigenvalues of P_M that agree within kGroupTolerance share one entry;
// nu_sq is the squared norm of the projection of u_hat onto that eigenspace.
struct EigenGroup {
  double lambda = 0.0;
  double nu_sq = 0.0;
  int multiplicity = 0;
};

struct SpectralData {
  static constexpr double kGroupTolerance = 1e-9;

  int n = 0;
  int m = 0;
  double epsilon = 0.0;
  // Ascending eigenvalues of P_M, clamped to [-1, 1].
  std::vector<double> lambdas;
  // nu_k = <v'_k | u_hat>; individual values depend on the eigenbasis chosen
  // inside degenerate eigenspaces, the grouped masses do not.
  std::vector<double> nus;
  std::vector<double> thetas;
  std::vector<EigenGroup> groups;
  double lambda_max_abs = 0.0;
  // Columns are the eigenvectors v'_k, indexed by unmarked vertex order.
  Matrix eigenvectors;
  std::vector<int> unmarked;
};

// C_xy = sqrt(p_xy p_yx).
Matrix build_C(const TransitionMatrix& p_marked);

// Max entrywise deviation between C of the marked chain (marked vertices
// permuted last) and blkdiag(P_M, I_m).
double block_structure_deviation(const TransitionMatrix& p, const MarkedSet& marked);

// Requires a symmetric P and m >= 1.
SpectralData spectral_data(const TransitionMatrix& p, const MarkedSet& marked);

// S = sum_k nu_k^2 / sqrt(1 - lambda'_k). Zero-mass eigenvalues at 1 are skipped;
// positive mass at eigenvalue 1 raises DomainError.
double hitting_sum(const SpectralData& sd);

double szegedy_bound(const SpectralData& sd);
double E_quantity(const SpectralData& sd);
double p_threshold(const SpectralData& sd, double a_c);
double dqht_bound(const SpectralData& sd, double a_c, double p);
// No 1/(1-m/n) prefactors.
double detection_bound(const SpectralData& sd, double a_c, double p);
// dqht_bound at the threshold probability times sqrt(1 - lambda_max_abs).
// The a_c dependence cancels.
double corollary_scaling(const SpectralData& sd);

struct BoundReport {
  double szegedy_bound = 0.0;
  double E = 0.0;
  double p_threshold = 0.0;
  double dqht_bound = 0.0;
  double detection_bound = 0.0;
  double a_c = 0.0;
  double lambda_max_abs = 0.0;
  double p = 0.0;
  bool p_within_threshold = true;
};

BoundReport bound_report(const SpectralData& sd, double a_c, double p);
nlohmann::json to_json(const BoundReport& report);
nlohmann::json to_json(const SpectralData& sd);

// psi(0) = orthogonal + marked, where `marked` keeps only rows x in M.
// Both parts are unnormalised.
struct InitialStateSplit {
  Vector orthogonal;
  Vector marked;
};
InitialStateSplit split_initial_state(const TransitionMatrix& p, const MarkedSet& marked);

}  // namespace pqw
