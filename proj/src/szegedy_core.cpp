#include "pqw/szegedy_core.hpp"

#include <cmath>
#include <ostream>

#include "pqw/errors.hpp"
#include "pqw/text_io.hpp"

namespace pqw {

namespace {

Matrix sqrt_entries(const TransitionMatrix& p) { return p.entries().cwiseSqrt(); }

void require_vertex(int v, int n) {
  if (v < 0 || v >= n) {
    throw ValidationError("vertex " + std::to_string(v) + " out of range for n=" +
                          std::to_string(n));
  }
}

}  // namespace

WalkState::WalkState(int n, Vector amplitudes) : n_(n), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != static_cast<Eigen::Index>(n) * n) {
    throw InvariantError("walk state must have n^2 amplitudes");
  }
  const double norm = amplitudes_.norm();
  if (std::abs(norm - 1.0) > kNormTolerance) {
    throw InvariantError("walk state is not unit norm (norm " + format_double(norm) + ")");
  }
}

WalkState phi_state(int x, const TransitionMatrix& p) {
  const int n = p.n();
  require_vertex(x, n);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(n) * n);
  for (int y = 0; y < n; ++y) v(pair_slot(n, x, y)) = std::sqrt(p(x, y));
  return WalkState(n, std::move(v));
}

WalkState psi_state(int y, const TransitionMatrix& p) {
  const int n = p.n();
  require_vertex(y, n);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(n) * n);
  for (int x = 0; x < n; ++x) v(pair_slot(n, x, y)) = std::sqrt(p(y, x));
  return WalkState(n, std::move(v));
}

WalkOperator build_walk_operator(const TransitionMatrix& p) {
  const int n = p.n();
  const Eigen::Index dim = static_cast<Eigen::Index>(n) * n;
  WalkOperator op;
  op.n = n;
  op.A = Matrix::Zero(dim, n);
  op.B = Matrix::Zero(dim, n);
  for (int v = 0; v < n; ++v) {
    op.A.col(v) = phi_state(v, p).amplitudes();
    op.B.col(v) = psi_state(v, p).amplitudes();
  }
  const Matrix identity = Matrix::Identity(dim, dim);
  op.RA = 2.0 * op.A * op.A.transpose() - identity;
  op.RB = 2.0 * op.B * op.B.transpose() - identity;
  op.U = op.RB * op.RA;
  return op;
}

Matrix walk_unitary(const TransitionMatrix& p) {
  const int n = p.n();
  const Eigen::Index dim = static_cast<Eigen::Index>(n) * n;
  const Matrix s = sqrt_entries(p);
  Matrix u = Matrix::Identity(dim, dim);

  // 4 BB^T AA^T term. Column-major storage, so loop columns outermost.
  for (int xp = 0; xp < n; ++xp) {
    for (int yp = 0; yp < n; ++yp) {
      const double s_xpyp = s(xp, yp);
      if (s_xpyp == 0.0) continue;
      auto col = u.col(pair_slot(n, xp, yp));
      for (int y = 0; y < n; ++y) {
        const double head = 4.0 * s(y, xp) * s(xp, y) * s_xpyp;
        if (head == 0.0) continue;
        for (int x = 0; x < n; ++x) col(pair_slot(n, x, y)) += head * s(y, x);
      }
    }
  }
  // -2 BB^T: same y, entries s_yx s_yx'.
  for (int y = 0; y < n; ++y) {
    for (int xp = 0; xp < n; ++xp) {
      const double b = 2.0 * s(y, xp);
      if (b == 0.0) continue;
      for (int x = 0; x < n; ++x) {
        u(pair_slot(n, x, y), pair_slot(n, xp, y)) -= b * s(y, x);
      }
    }
  }
  // -2 AA^T: same x, entries s_xy s_xy'.
  for (int x = 0; x < n; ++x) {
    for (int yp = 0; yp < n; ++yp) {
      const double a = 2.0 * s(x, yp);
      if (a == 0.0) continue;
      for (int y = 0; y < n; ++y) {
        u(pair_slot(n, x, y), pair_slot(n, x, yp)) -= a * s(x, y);
      }
    }
  }
  return u;
}

WalkState initial_state(const TransitionMatrix& p) {
  const int n = p.n();
  Vector v(static_cast<Eigen::Index>(n) * n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) v(pair_slot(n, x, y)) = scale * std::sqrt(p(x, y));
  }
  return WalkState(n, std::move(v));
}

Vector evolve(const Matrix& op, Vector v, int t) {
  if (t < 0) throw ValidationError("step count must be non-negative");
  Vector next(v.size());
  for (int step = 0; step < t; ++step) {
    next.noalias() = op * v;
    v.swap(next);
  }
  return v;
}

WalkState evolve(const WalkOperator& op, const WalkState& s, int t) {
  if (s.n() != op.n) throw ValidationError("state and operator dimensions differ");
  return WalkState(s.n(), evolve(op.U, s.amplitudes(), t));
}

std::vector<double> position_distribution(const WalkState& s) {
  const int n = s.n();
  std::vector<double> prob(static_cast<std::size_t>(n), 0.0);
  for (int x = 0; x < n; ++x) {
    double acc = 0.0;
    for (int y = 0; y < n; ++y) acc += s(x, y) * s(x, y);
    prob[static_cast<std::size_t>(x)] = acc;
  }
  return prob;
}

void write_state_csv(std::ostream& out, const WalkState& s) {
  const int n = s.n();
  out << "index,x,y,amplitude\n";
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      out << pair_slot(n, x, y) << ',' << x << ',' << y << ',' << format_double(s(x, y))
          << '\n';
    }
  }
}

}  // namespace pqw
