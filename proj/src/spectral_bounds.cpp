#include "pqw/spectral_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pqw/errors.hpp"
#include "pqw/szegedy_core.hpp"

namespace pqw {

namespace {

// nu^2 below this is treated as exactly zero when the eigenvalue sits at 1.
constexpr double kZeroMass = 1e-14;
constexpr double kUnitEigenvalue = 1e-12;

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

// sum over eigen-groups of nu^2 * f(lambda), refusing mass at lambda = 1.
template <typename F>
double weighted_sum(const SpectralData& sd, const char* what, F&& f) {
  double total = 0.0;
  for (const auto& g : sd.groups) {
    if (g.lambda >= 1.0 - kUnitEigenvalue) {
      if (g.nu_sq <= kZeroMass) continue;
      throw DomainError(std::string(what) + " is infinite: P_M has eigenvalue 1 with nonzero overlap");
    }
    total += g.nu_sq * f(g.lambda);
  }
  return total;
}

}  // namespace

Matrix build_C(const TransitionMatrix& p_marked) {
  const Matrix& e = p_marked.entries();
  return e.cwiseProduct(e.transpose()).cwiseSqrt();
}

double block_structure_deviation(const TransitionMatrix& p, const MarkedSet& marked) {
  const Matrix c = build_C(apply_marking(p, marked));
  std::vector<int> order = marked.complement();
  order.insert(order.end(), marked.members().begin(), marked.members().end());
  const int n = p.n();
  const int k = n - marked.m();
  Matrix expected = Matrix::Zero(n, n);
  if (k > 0) expected.topLeftCorner(k, k) = submatrix_PM(p, marked);
  for (int i = k; i < n; ++i) expected(i, i) = 1.0;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      worst = std::max(worst, std::abs(c(order[static_cast<std::size_t>(i)],
                                         order[static_cast<std::size_t>(j)]) -
                                       expected(i, j)));
    }
  }
  return worst;
}

SpectralData spectral_data(const TransitionMatrix& p, const MarkedSet& marked) {
  if (!p.symmetric()) throw ValidationError("spectral data requires a symmetric transition matrix");
  if (marked.m() == 0) throw ValidationError("spectral data requires at least one marked vertex");
  const Matrix pm = submatrix_PM(p, marked);
  // Symmetrise to remove 1e-17 asymmetries before the self-adjoint solver.
  const Matrix sym = 0.5 * (pm + pm.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) throw Error("eigensolver failed on P_M");

  SpectralData sd;
  sd.n = p.n();
  sd.m = marked.m();
  sd.epsilon = marked.epsilon();
  sd.unmarked = marked.complement();
  sd.eigenvectors = solver.eigenvectors();
  const Eigen::Index k = sym.rows();
  const Vector u_hat = Vector::Constant(k, 1.0 / std::sqrt(static_cast<double>(sd.n)));
  const Vector overlaps = sd.eigenvectors.transpose() * u_hat;

  for (Eigen::Index i = 0; i < k; ++i) {
    const double lambda = clamp_unit(solver.eigenvalues()(i));
    sd.lambdas.push_back(lambda);
    sd.nus.push_back(overlaps(i));
    sd.thetas.push_back(std::acos(lambda));
    sd.lambda_max_abs = std::max(sd.lambda_max_abs, std::abs(lambda));
  }

  // Eigenvalues arrive sorted, so groups are contiguous runs.
  Eigen::Index start = 0;
  while (start < k) {
    Eigen::Index end = start + 1;
    while (end < k && sd.lambdas[static_cast<std::size_t>(end)] -
                              sd.lambdas[static_cast<std::size_t>(end - 1)] <=
                          SpectralData::kGroupTolerance) {
      ++end;
    }
    EigenGroup g;
    double lambda_sum = 0.0;
    for (Eigen::Index i = start; i < end; ++i) {
      lambda_sum += sd.lambdas[static_cast<std::size_t>(i)];
      g.nu_sq += overlaps(i) * overlaps(i);
    }
    g.multiplicity = static_cast<int>(end - start);
    g.lambda = clamp_unit(lambda_sum / static_cast<double>(g.multiplicity));
    sd.groups.push_back(g);
    start = end;
  }
  return sd;
}

double hitting_sum(const SpectralData& sd) {
  return weighted_sum(sd, "hitting-time sum",
                      [](double lambda) { return 1.0 / std::sqrt(1.0 - lambda); });
}

double szegedy_bound(const SpectralData& sd) {
  return 100.0 / (1.0 - sd.epsilon) * hitting_sum(sd);
}

double E_quantity(const SpectralData& sd) {
  return weighted_sum(sd, "E", [](double lambda) { return 1.0 / std::acos(lambda); }) /
         (1.0 - sd.epsilon);
}

double p_threshold(const SpectralData& sd, double a_c) {
  const double e = E_quantity(sd);
  if (!(e > 0.0)) throw DomainError("p threshold undefined for E <= 0");
  return 1.0 / (300.0 * a_c * e);
}

double dqht_bound(const SpectralData& sd, double a_c, double p) {
  const double s = hitting_sum(sd);
  const double keep = 1.0 - sd.epsilon;
  return 8.0 * s / keep + 942.0 * a_c * p * s * s / (keep * keep);
}

double detection_bound(const SpectralData& sd, double a_c, double p) {
  const double s = hitting_sum(sd);
  return 16.0 * s + 3768.0 * a_c * p * s * s;
}

double corollary_scaling(const SpectralData& sd) {
  if (sd.lambda_max_abs >= 1.0 - kUnitEigenvalue) {
    throw DomainError("corollary scaling undefined: lambda(P_M) = 1");
  }
  const double a_c = 1.0;
  return dqht_bound(sd, a_c, p_threshold(sd, a_c)) * std::sqrt(1.0 - sd.lambda_max_abs);
}

BoundReport bound_report(const SpectralData& sd, double a_c, double p) {
  BoundReport r;
  r.a_c = a_c;
  r.p = p;
  r.lambda_max_abs = sd.lambda_max_abs;
  r.szegedy_bound = szegedy_bound(sd);
  r.E = E_quantity(sd);
  r.p_threshold = p_threshold(sd, a_c);
  r.dqht_bound = dqht_bound(sd, a_c, p);
  r.detection_bound = detection_bound(sd, a_c, p);
  r.p_within_threshold = p <= r.p_threshold;
  return r;
}

nlohmann::json to_json(const BoundReport& r) {
  return {{"szegedy_bound", r.szegedy_bound},   {"E", r.E},
          {"p_threshold", r.p_threshold},       {"dqht_bound", r.dqht_bound},
          {"detection_bound", r.detection_bound}, {"a_c", r.a_c},
          {"lambda_max_abs", r.lambda_max_abs}, {"p", r.p},
          {"p_within_threshold", r.p_within_threshold}};
}

nlohmann::json to_json(const SpectralData& sd) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : sd.groups) {
    groups.push_back({{"lambda", g.lambda}, {"nu_sq", g.nu_sq}, {"multiplicity", g.multiplicity}});
  }
  return {{"n", sd.n},
          {"m", sd.m},
          {"epsilon", sd.epsilon},
          {"lambdas", sd.lambdas},
          {"thetas", sd.thetas},
          {"groups", groups},
          {"lambda_max_abs", sd.lambda_max_abs}};
}

InitialStateSplit split_initial_state(const TransitionMatrix& p, const MarkedSet& marked) {
  if (marked.n() != p.n()) throw ValidationError("marked set and matrix sizes differ");
  const int n = p.n();
  const Vector psi0 = initial_state(p).amplitudes();
  InitialStateSplit split{psi0, Vector::Zero(psi0.size())};
  for (int x : marked.members()) {
    for (int y = 0; y < n; ++y) {
      const auto i = pair_slot(n, x, y);
      split.marked(i) = psi0(i);
      split.orthogonal(i) = 0.0;
    }
  }
  return split;
}

}  // namespace pqw
