#pragma once

#include <iosfwd>
#include <vector>

#include "pqw/graph_model.hpp"

namespace pqw {

// Basis |x,y> of H^n (x) H^n lives at index x*n + y.
inline Eigen::Index pair_slot(int n, int x, int y) {
  return static_cast<Eigen::Index>(x) * n + y;
}

// Real unit vector of length n^2.
class WalkState {
 public:
  static constexpr double kNormTolerance = 1e-10;

  // Throws InvariantError if the vector is not unit norm.
  WalkState(int n, Vector amplitudes);

  int n() const { return n_; }
  const Vector& amplitudes() const { return amplitudes_; }
  double operator()(int x, int y) const { return amplitudes_(pair_slot(n_, x, y)); }

 private:
  int n_;
  Vector amplitudes_;
};

// U = RB * RA with RA = 2AA^T - I, RB = 2BB^T - I. A has the |Phi_x> as
// columns, B the |Psi_y>.
struct WalkOperator {
  int n = 0;
  Matrix U;
  Matrix A;
  Matrix B;
  Matrix RA;
  Matrix RB;
};

WalkState phi_state(int x, const TransitionMatrix& p);
WalkState psi_state(int y, const TransitionMatrix& p);

WalkOperator build_walk_operator(const TransitionMatrix& p);

// U_P assembled entrywise from sqrt(p) without forming A, B or the
// reflections:
//   U[(x,y),(x',y')] = 4 s_yx s_yx' s_x'y s_x'y' - 2 d_yy' s_yx s_yx'
//                      - 2 d_xx' s_xy s_xy' + d_xx' d_yy'
// with s = sqrt(p). Equal to build_walk_operator(p).U up to rounding.
Matrix walk_unitary(const TransitionMatrix& p);

// (1/sqrt n) sum_xy sqrt(p_xy) |x,y>. Always built from the unmarked chain.
WalkState initial_state(const TransitionMatrix& p);

// U^t s by repeated matrix-vector products. Also accepts non-orthogonal
// operators (averaged ones) through the Vector overload.
WalkState evolve(const WalkOperator& op, const WalkState& s, int t);
Vector evolve(const Matrix& op, Vector v, int t);

// prob(x) = sum_y amplitude(x,y)^2.
std::vector<double> position_distribution(const WalkState& s);

// Columns: index,x,y,amplitude.
void write_state_csv(std::ostream& out, const WalkState& s);

}  // namespace pqw
