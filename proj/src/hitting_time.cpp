#include "pqw/hitting_time.hpp"

#include <cmath>

#include "pqw/errors.hpp"
#include "pqw/szegedy_core.hpp"
#include "pqw/text_io.hpp"

namespace pqw {

namespace {

std::optional<int> first_crossing(const std::vector<double>& F, double threshold) {
  for (std::size_t T = 0; T < F.size(); ++T) {
    if (F[T] >= threshold) return static_cast<int>(T);
  }
  return std::nullopt;
}

int cap_from_bound(double bound) {
  if (!std::isfinite(bound) || bound > 1e7) return kFallbackTCap;
  return static_cast<int>(std::ceil(bound));
}

std::optional<SpectralData> try_spectral_data(const TransitionMatrix& p, const MarkedSet& marked) {
  if (marked.m() == 0 || marked.m() == marked.n() || !p.symmetric()) return std::nullopt;
  return spectral_data(p, marked);
}

}  // namespace

std::optional<double> HittingTimeReport::bound_value() const {
  if (!bound) return std::nullopt;
  return mode == Mode::coherent ? bound->szegedy_bound : bound->dqht_bound;
}

bool HittingTimeReport::within_bound() const {
  auto b = bound_value();
  return T_star && b && static_cast<double>(*T_star) <= *b;
}

std::vector<double> coherent_F_curve(const TransitionMatrix& p, const MarkedSet& marked,
                                     int T_max) {
  if (T_max < 0) throw ValidationError("T_max must be non-negative");
  const Vector psi0 = initial_state(p).amplitudes();
  const Matrix u = walk_unitary(apply_marking(p, marked));
  std::vector<double> F;
  F.reserve(static_cast<std::size_t>(T_max) + 1);
  Vector state = psi0;
  Vector next(state.size());
  double running = 0.0;
  for (int T = 0; T <= T_max; ++T) {
    if (T > 0) {
      next.noalias() = u * state;
      state.swap(next);
      running += (state - psi0).squaredNorm();
    }
    F.push_back(running / (T + 1));
  }
  return F;
}

HittingTimeReport coherent_qht(const TransitionMatrix& p, const MarkedSet& marked,
                               std::optional<int> T_cap) {
  HittingTimeReport report;
  report.mode = HittingTimeReport::Mode::coherent;
  report.threshold = 1.0 - marked.epsilon();
  if (auto sd = try_spectral_data(p, marked)) {
    // Bond-flip slot count, so the report's threshold fields are meaningful.
    const double a_c = 0.5 * p.n() * (p.n() - 1);
    report.bound = bound_report(*sd, a_c, 0.0);
  }
  report.T_max = T_cap ? *T_cap : (report.bound ? cap_from_bound(report.bound->szegedy_bound)
                                                 : kFallbackTCap);
  report.F = coherent_F_curve(p, marked, report.T_max);
  report.T_star = first_crossing(report.F, report.threshold);
  return report;
}

std::vector<double> decoherent_F_curve(const AveragedOperator& ubar, const TransitionMatrix& p,
                                       int T_max) {
  if (T_max < 0) throw ValidationError("T_max must be non-negative");
  const Vector psi0 = initial_state(p).amplitudes();
  if (ubar.matrix.rows() != psi0.size()) {
    throw ValidationError("averaged operator and chain dimensions differ");
  }
  std::vector<double> F;
  F.reserve(static_cast<std::size_t>(T_max) + 1);
  Vector state = psi0;
  Vector next(state.size());
  double overlap_sum = 0.0;
  for (int T = 0; T <= T_max; ++T) {
    if (T > 0) {
      next.noalias() = ubar.matrix * state;
      state.swap(next);
    }
    overlap_sum += psi0.dot(state);
    F.push_back(2.0 - 2.0 * overlap_sum / (T + 1));
  }
  // The t = 0 term is exactly <psi0|psi0> = 1 up to rounding; pin F(0).
  F[0] = 0.0;
  return F;
}

AveragedOperator build_averaged_operator(const PercolationModel& model, const MarkedSet& marked,
                                         const OperatorMode& mode) {
  if (mode.mode == AveragedOperator::Mode::exact) {
    return build_averaged_operator_exact(model, marked, mode.enumeration_cap);
  }
  MonteCarloOptions options;
  options.workers = mode.workers;
  return build_averaged_operator_mc(model, marked, mode.samples, mode.seed, options);
}

HittingTimeReport decoherent_qht(const PercolationModel& model, const MarkedSet& marked,
                                 const OperatorMode& mode, std::optional<int> T_cap) {
  return decoherent_qht(model, build_averaged_operator(model, marked, mode), T_cap);
}

HittingTimeReport decoherent_qht(const PercolationModel& model, const AveragedOperator& ubar,
                                 std::optional<int> T_cap) {
  const TransitionMatrix p = build_transition_matrix(model.base());
  const MarkedSet& marked = ubar.marked;
  HittingTimeReport report;
  report.mode = HittingTimeReport::Mode::decoherent;
  report.threshold = 1.0 - marked.epsilon();
  report.p = model.p();
  report.variant = model.variant();
  report.operator_mode = ubar.mode;
  if (auto sd = try_spectral_data(p, marked)) {
    report.bound = bound_report(*sd, model.a_c(), model.p());
    report.p_within_threshold = report.bound->p_within_threshold;
  }
  if (T_cap) {
    report.T_max = *T_cap;
  } else if (report.bound && report.bound->p_within_threshold) {
    report.T_max = cap_from_bound(report.bound->dqht_bound);
  } else {
    report.T_max = kFallbackTCap;
  }
  report.F = decoherent_F_curve(ubar, p, report.T_max);
  report.T_star = first_crossing(report.F, report.threshold);
  return report;
}

GTermReport g_term_decomposition(const AveragedOperator& ubar, const TransitionMatrix& p,
                                 const MarkedSet& marked, int T) {
  if (T < 0) throw ValidationError("T must be non-negative");
  const auto split = split_initial_state(p, marked);
  Vector marked_state = split.marked;
  Vector orth_state = split.orthogonal;
  Vector next(marked_state.size());
  double gm = 0.0, gcross = 0.0, gorth = 0.0;
  for (int t = 0; t <= T; ++t) {
    if (t > 0) {
      next.noalias() = ubar.matrix * marked_state;
      marked_state.swap(next);
      next.noalias() = ubar.matrix * orth_state;
      orth_state.swap(next);
    }
    // marked_state = Ubar^t psi_M, orth_state = Ubar^t psi_Mbot.
    gm += split.marked.dot(marked_state);
    gcross += split.orthogonal.dot(marked_state) + split.marked.dot(orth_state);
    gorth += split.orthogonal.dot(orth_state);
  }
  GTermReport r;
  r.T = T;
  r.epsilon = marked.epsilon();
  r.G_M = gm / (T + 1);
  r.G_MMbot = gcross / (T + 1);
  r.G_Mbot = gorth / (T + 1);
  r.F_dec = 2.0 - 2.0 * (r.G_M + r.G_MMbot + r.G_Mbot);
  return r;
}

double classical_hitting_time(const TransitionMatrix& p, const MarkedSet& marked) {
  if (marked.m() == 0) throw DomainError("classical hitting time needs a non-empty marked set");
  if (marked.m() == p.n()) return 0.0;
  const Matrix pm = submatrix_PM(p, marked);
  const Eigen::Index k = pm.rows();
  const Matrix system = Matrix::Identity(k, k) - pm;
  Eigen::FullPivLU<Matrix> lu(system);
  if (!lu.isInvertible()) throw DomainError("marked set is unreachable from some start vertex");
  const Vector h = lu.solve(Vector::Ones(k));
  return h.sum() / p.n();
}

std::string curve_csv(const HittingTimeReport& report) {
  std::string out = "T,F,threshold,crossed\n";
  for (std::size_t T = 0; T < report.F.size(); ++T) {
    out += std::to_string(T);
    out += ',';
    out += format_double(report.F[T]);
    out += ',';
    out += format_double(report.threshold);
    out += report.F[T] >= report.threshold ? ",true\n" : ",false\n";
  }
  return out;
}

nlohmann::json summary_json(const HittingTimeReport& report) {
  nlohmann::json j;
  j["T_star"] = report.T_star ? nlohmann::json(*report.T_star) : nlohmann::json("not reached");
  j["T_max"] = report.T_max;
  j["threshold"] = report.threshold;
  if (report.mode == HittingTimeReport::Mode::coherent) {
    j["mode"] = "coherent";
    j["p"] = 0.0;
    j["variant"] = nullptr;
  } else {
    j["mode"] = "decoherent-" + to_string(*report.operator_mode);
    j["p"] = report.p;
    j["variant"] = to_string(report.variant);
  }
  auto b = report.bound_value();
  j["bound"] = b ? nlohmann::json(*b) : nlohmann::json(nullptr);
  j["within_bound"] = report.within_bound();
  if (report.p_within_threshold) j["p_within_threshold"] = *report.p_within_threshold;
  if (report.bound) j["bounds"] = to_json(*report.bound);
  return j;
}

}  // namespace pqw
