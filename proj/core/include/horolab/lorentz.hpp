#pragma once

// Linear algebra for SO(n,1)° in the horospherical coordinates used
// throughout the library: flow a_s, expanding u_t, contracting v_t and the
// parabolic subgroup P = M A U~.
//
// Points are row vectors and the group acts on the right (x -> x g), so
// g^+ is the first row of g and g^- is the last. The invariant form is
//   B(x, y) = -(x_0 y_n + x_n y_0) + sum_{0<i<n} x_i y_i.

#include <Eigen/Dense>

#include <utility>

namespace horolab {

inline constexpr int kMaxDim = 4;

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                             kMaxDim + 1, kMaxDim + 1>;
using RowVector =
    Eigen::Matrix<double, 1, Eigen::Dynamic, Eigen::RowMajor, 1, kMaxDim + 1>;
using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim + 1, 1>;

// Coordinates on U (or U~) ~ R^{n-1}.
using HoroParam = Vector;

struct Tolerances {
  double identity = 1e-10;
  double form = 1e-12;
};

double sup_norm(const HoroParam& t);

Matrix lorentz_form(int dim);
double lorentz_pairing(const RowVector& x, const RowVector& y);

class LorentzMatrix {
 public:
  LorentzMatrix() = default;
  // No form check: callers use lorentz_residual when they need one.
  explicit LorentzMatrix(Matrix entries);

  static LorentzMatrix identity(int dim);

  int dim() const { return static_cast<int>(m_.rows()) - 1; }
  const Matrix& entries() const { return m_; }
  double operator()(int r, int c) const { return m_(r, c); }

  RowVector row(int r) const { return m_.row(r); }

  LorentzMatrix operator*(const LorentzMatrix& other) const;
  // Exact inverse J g^T J; valid for group elements.
  LorentzMatrix inverse() const;

 private:
  Matrix m_;
};

RowVector operator*(const RowVector& x, const LorentzMatrix& g);

enum class Horo { expanding, contracting };

LorentzMatrix make_flow(int dim, double s);
LorentzMatrix make_horo(Horo direction, const HoroParam& t);
inline LorentzMatrix make_u(const HoroParam& t) { return make_horo(Horo::expanding, t); }
inline LorentzMatrix make_v(const HoroParam& t) { return make_horo(Horo::contracting, t); }
// Element of M: `rotation` is an (n-1)x(n-1) special orthogonal block.
LorentzMatrix make_rotation(const Matrix& rotation);
// n = 3 convenience: rotation of the middle block by `angle`.
Matrix planar_rotation(double angle);

struct ParabolicElement {
  double s = 0.0;
  HoroParam r;
  Matrix rotation;  // (n-1)x(n-1)

  static ParabolicElement identity(int dim);
  int dim() const { return static_cast<int>(r.size()) + 1; }
  // a_s v_r m
  LorentzMatrix matrix() const;
};

struct PUDecomposition {
  ParabolicElement p;
  HoroParam t;
};

// g = p u_t. Throws decomposition_failed outside the open chart P U.
PUDecomposition decompose_pu(const LorentzMatrix& g);
// g = u_t p (the U P chart used by admissible boxes).
PUDecomposition decompose_up(const LorentzMatrix& g);

// For p = a_s v_r: u_t p^{-1} = p' u_{rho_p(t)}.
HoroParam rho_p(const ParabolicElement& p, const HoroParam& t);
// e^{s'} where s' is the flow part of p' above.
double rho_flow_factor(const ParabolicElement& p, const HoroParam& t);

double lorentz_residual(const Matrix& g);
inline double lorentz_residual(const LorentzMatrix& g) { return lorentz_residual(g.entries()); }

// Operator-norm distance ||g - I||_2, our stand-in for the left-invariant
// metric on G near the identity.
double distance_from_identity(const LorentzMatrix& g);

}  // namespace horolab
