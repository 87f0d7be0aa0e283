#include "horolab/boundary.hpp"

#include "horolab/error.hpp"

#include <algorithm>
#include <cmath>

namespace horolab {

namespace {

constexpr double kSqrtHalf = 0.70710678118654752440;

// C maps light-cone coordinates (null first and last axes) to Minkowski coordinates (time first, then the
// spatial ball axes). It is orthogonal, so C^{-1} = C^T.
Matrix standard_frame(int dim) {
  Matrix c = Matrix::Zero(dim + 1, dim + 1);
  c(0, 0) = kSqrtHalf;
  c(0, dim) = kSqrtHalf;
  c(1, 0) = kSqrtHalf;
  c(1, dim) = -kSqrtHalf;
  for (int i = 1; i < dim; ++i) c(i + 1, i) = 1.0;
  return c;
}

// Minkowski (time, spatial...) of a light-cone row vector.
Vector to_minkowski(const RowVector& x) {
  return standard_frame(static_cast<int>(x.size()) - 1) * x.transpose();
}

RowVector from_minkowski(const Vector& X) {
  return (standard_frame(static_cast<int>(X.size()) - 1).transpose() * X).transpose();
}

LorentzMatrix from_standard(const Matrix& column_map) {
  const Matrix c = standard_frame(static_cast<int>(column_map.rows()) - 1);
  return LorentzMatrix(Matrix(c.transpose() * column_map.transpose() * c));
}

double time_component(const RowVector& x) {
  return kSqrtHalf * (x(0) + x(x.size() - 1));
}

}  // namespace

RowVector ball_to_lorentz(const Vector& b) {
  const double rho2 = b.squaredNorm();
  if (!(rho2 < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "point outside the open unit ball");
  }
  Vector X(b.size() + 1);
  X(0) = (1.0 + rho2) / (1.0 - rho2);
  X.tail(b.size()) = 2.0 * b / (1.0 - rho2);
  return from_minkowski(X);
}

Vector lorentz_to_ball(const RowVector& x) {
  const Vector X = to_minkowski(x);
  return X.tail(X.size() - 1) / (1.0 + X(0));
}

HyperbolicPoint HyperbolicPoint::from_lorentz(const RowVector& x) {
  if (x.size() < 3 || !x.allFinite()) {
    throw Error(ErrorCode::invalid_argument, "malformed hyperboloid point");
  }
  const double q = lorentz_pairing(x, x);
  if (std::abs(q + 1.0) > 1e-8 * std::max(1.0, x.squaredNorm()) || time_component(x) <= 0.0) {
    throw Error(ErrorCode::invalid_argument, "point is not on the upper hyperboloid sheet");
  }
  return HyperbolicPoint(x, lorentz_to_ball(x));
}

HyperbolicPoint HyperbolicPoint::from_ball(const Vector& b) {
  return HyperbolicPoint(ball_to_lorentz(b), b);
}

HyperbolicPoint HyperbolicPoint::basepoint(int dim) {
  RowVector o = RowVector::Zero(dim + 1);
  o(0) = kSqrtHalf;
  o(dim) = kSqrtHalf;
  return HyperbolicPoint(o, Vector::Zero(dim));
}

BoundaryPoint BoundaryPoint::from_ball(const Vector& unit) {
  const double norm = unit.norm();
  if (!(std::abs(norm - 1.0) < 1e-6)) {
    throw Error(ErrorCode::invalid_argument, "boundary point must be a unit vector");
  }
  const Vector u = unit / norm;
  Vector X(u.size() + 1);
  X(0) = 1.0;
  X.tail(u.size()) = u;
  return BoundaryPoint(u, from_minkowski(X));
}

BoundaryPoint BoundaryPoint::from_null(const RowVector& null) {
  if (null.size() < 3 || !null.allFinite()) {
    throw Error(ErrorCode::invalid_argument, "malformed null vector");
  }
  const double time = time_component(null);
  if (!(time > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "null vector is degenerate or past-pointing");
  }
  RowVector n = null / time;
  if (std::abs(lorentz_pairing(n, n)) > 1e-8) {
    throw Error(ErrorCode::invalid_argument, "vector is not isotropic");
  }
  Vector X = to_minkowski(n);
  Vector u = X.tail(X.size() - 1);
  u /= u.norm();
  // Re-derive the null vector from the unit direction so both views agree.
  X(0) = 1.0;
  X.tail(u.size()) = u;
  return BoundaryPoint(u, from_minkowski(X));
}

double hyp_distance(const RowVector& x, const RowVector& y) {
  const RowVector diff = x - y;
  const double chord2 = std::max(0.0, lorentz_pairing(diff, diff));
  return 2.0 * std::asinh(0.5 * std::sqrt(chord2));
}

double hyp_distance(const HyperbolicPoint& x, const HyperbolicPoint& y) {
  return hyp_distance(x.lorentz(), y.lorentz());
}

double busemann(const RowVector& xi, const RowVector& x, const RowVector& y) {
  const double bx = lorentz_pairing(x, xi);
  const double by = lorentz_pairing(y, xi);
  if (!(bx < 0.0) || !(by < 0.0)) {
    throw Error(ErrorCode::invalid_argument, "degenerate null vector in Busemann function");
  }
  return std::log(bx / by);
}

double busemann(const BoundaryPoint& xi, const HyperbolicPoint& x, const HyperbolicPoint& y) {
  return busemann(xi.null(), x.lorentz(), y.lorentz());
}

HyperbolicPoint geodesic_point(const BoundaryPoint& xi, const BoundaryPoint& eta, double offset) {
  const double c = -lorentz_pairing(xi.null(), eta.null());
  if (!(c > 1e-15)) {
    throw Error(ErrorCode::invalid_argument, "geodesic endpoints coincide");
  }
  const RowVector y =
      (std::exp(offset) * xi.null() + std::exp(-offset) * eta.null()) / std::sqrt(2.0 * c);
  return HyperbolicPoint::from_lorentz(y);
}

double gromov_distance(const HyperbolicPoint& x, const BoundaryPoint& xi, const BoundaryPoint& eta,
                       const HyperbolicPoint& y) {
  return std::exp(-0.5 * busemann(xi, x, y) - 0.5 * busemann(eta, x, y));
}

double gromov_distance(const HyperbolicPoint& x, const BoundaryPoint& xi, const BoundaryPoint& eta) {
  return gromov_distance(x, xi, eta, geodesic_point(xi, eta));
}

double ball_distance(const BoundaryPoint& a, const BoundaryPoint& b) {
  return (a.ball() - b.ball()).norm();
}

HyperbolicPoint act(const HyperbolicPoint& x, const LorentzMatrix& g) {
  return HyperbolicPoint::from_lorentz(x.lorentz() * g);
}

BoundaryPoint act(const BoundaryPoint& xi, const LorentzMatrix& g) {
  return BoundaryPoint::from_null(xi.null() * g);
}

RowVector footpoint_lorentz(const LorentzMatrix& g) {
  const int n = g.dim();
  return kSqrtHalf * (g.row(0) + g.row(n));
}

HyperbolicPoint footpoint(const LorentzMatrix& g) {
  return HyperbolicPoint::from_lorentz(footpoint_lorentz(g));
}

BoundaryPoint forward_endpoint(const LorentzMatrix& g) { return BoundaryPoint::from_null(g.row(0)); }

BoundaryPoint backward_endpoint(const LorentzMatrix& g) {
  return BoundaryPoint::from_null(g.row(g.dim()));
}

Endpoints endpoints(const LorentzMatrix& g) { return {forward_endpoint(g), backward_endpoint(g)}; }

BoundaryPoint horosphere_projection(const LorentzMatrix& g, const HoroParam& t) {
  if (t.size() != g.dim() - 1) {
    throw Error(ErrorCode::invalid_argument, "horosphere_projection: dimension mismatch");
  }
  // e_0 u_t g = (1, t, |t|^2 / 2) g
  RowVector head(g.dim() + 1);
  head(0) = 1.0;
  head.segment(1, t.size()) = t.transpose();
  head(g.dim()) = 0.5 * t.squaredNorm();
  return BoundaryPoint::from_null(head * g);
}

std::optional<HoroParam> horosphere_chart(const LorentzMatrix& g, const RowVector& xi) {
  const int n = g.dim();
  const RowVector eta = xi * g.inverse();
  const double scale = eta.cwiseAbs().maxCoeff();
  if (!(std::abs(eta(0)) > 1e-13 * scale)) return std::nullopt;
  return HoroParam(eta.segment(1, n - 1).transpose() / eta(0));
}

std::optional<HoroParam> contracting_chart(const LorentzMatrix& g, const RowVector& xi) {
  const int n = g.dim();
  const RowVector eta = xi * g.inverse();
  const double scale = eta.cwiseAbs().maxCoeff();
  if (!(std::abs(eta(n)) > 1e-13 * scale)) return std::nullopt;
  return HoroParam(eta.segment(1, n - 1).transpose() / eta(n));
}

LorentzMatrix frame_from_endpoints(const BoundaryPoint& forward, const BoundaryPoint& backward) {
  const int n = forward.dim();
  const RowVector& p = forward.null();
  const RowVector& q = backward.null();
  const double pq = lorentz_pairing(p, q);
  if (!(-pq > 1e-15)) {
    throw Error(ErrorCode::invalid_argument, "frame endpoints coincide");
  }
  const double alpha = 1.0 / std::sqrt(-pq);
  Matrix m(n + 1, n + 1);
  m.row(0) = alpha * p;
  m.row(n) = alpha * q;

  // B-orthonormal basis of span(p, q)^perp by Gram-Schmidt over the
  // standard basis, taking the best-conditioned candidates first.
  int filled = 1;
  for (int pass = 0; pass < 2 && filled < n; ++pass) {
    for (int e = 0; e <= n && filled < n; ++e) {
      RowVector v = RowVector::Zero(n + 1);
      v(e) = 1.0;
      // Two sweeps keep the basis orthogonal when p and q are close.
      for (int sweep = 0; sweep < 2; ++sweep) {
        v -= (lorentz_pairing(v, q) / pq) * p + (lorentz_pairing(v, p) / pq) * q;
        for (int k = 1; k < filled; ++k) v -= lorentz_pairing(v, m.row(k)) * m.row(k);
      }
      const double norm2 = lorentz_pairing(v, v);
      const double threshold = pass == 0 ? 0.25 : 1e-10;
      if (norm2 > threshold) {
        m.row(filled++) = v / std::sqrt(norm2);
      }
    }
  }
  if (filled != n) {
    throw Error(ErrorCode::invalid_state, "could not complete frame");
  }
  if (m.determinant() < 0.0) m.row(n - 1) *= -1.0;
  return LorentzMatrix(std::move(m));
}

BoundaryPoint radial_direction(const HyperbolicPoint& x) {
  const double r = x.ball().norm();
  if (!(r > 1e-14)) {
    throw Error(ErrorCode::invalid_argument, "radial direction undefined at the basepoint");
  }
  return BoundaryPoint::from_ball(x.ball() / r);
}

LorentzMatrix boost(int dim, const Vector& unit_direction, double distance) {
  if (unit_direction.size() != dim) {
    throw Error(ErrorCode::invalid_argument, "boost direction has wrong dimension");
  }
  const Vector u = unit_direction / unit_direction.norm();
  Matrix l = Matrix::Identity(dim + 1, dim + 1);
  l(0, 0) = std::cosh(distance);
  l.block(0, 1, 1, dim) = std::sinh(distance) * u.transpose();
  l.block(1, 0, dim, 1) = std::sinh(distance) * u;
  l.block(1, 1, dim, dim) += (std::cosh(distance) - 1.0) * u * u.transpose();
  return from_standard(l);
}

LorentzMatrix spatial_rotation(const Matrix& rotation) {
  const int dim = static_cast<int>(rotation.rows());
  Matrix l = Matrix::Identity(dim + 1, dim + 1);
  l.block(1, 1, dim, dim) = rotation;
  return from_standard(l);
}

Matrix rotation_taking_axis_to(const Vector& unit) {
  const int dim = static_cast<int>(unit.size());
  const Vector u = unit / unit.norm();
  Vector v = -u;
  v(0) += 1.0;
  Matrix h = Matrix::Identity(dim, dim);
  if (v.squaredNorm() > 1e-24) h -= 2.0 * v * v.transpose() / v.squaredNorm();
  else return Matrix::Identity(dim, dim);
  // h is a reflection (det -1) with h e_0 = u; flip a direction orthogonal
  // to e_0 to land in SO(dim).
  h.col(dim - 1) *= -1.0;
  return h;
}

Cap::Cap(RowVector normal) : normal_(std::move(normal)) {
  const double q = lorentz_pairing(normal_, normal_);
  if (!(q > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "cap normal must be spacelike");
  }
  normal_ /= std::sqrt(q);
}

Cap Cap::from_ball(const Vector& center, double radius) {
  if (!(radius > 0.0) || !(radius < 2.0)) {
    throw Error(ErrorCode::invalid_argument, "cap radius must lie in (0, 2)");
  }
  const Vector c = center / center.norm();
  const double theta = 2.0 * std::asin(0.5 * radius);
  const double depth = std::atanh(std::cos(theta));
  Vector M(c.size() + 1);
  M(0) = std::sinh(depth);
  M.tail(c.size()) = std::cosh(depth) * c;
  return Cap(from_minkowski(M));
}

double Cap::angular_radius() const {
  const Vector M = to_minkowski(normal_);
  const double spatial = M.tail(M.size() - 1).norm();
  return std::acos(std::clamp(M(0) / spatial, -1.0, 1.0));
}

Vector Cap::center() const {
  const Vector M = to_minkowski(normal_);
  const Vector s = M.tail(M.size() - 1);
  return s / s.norm();
}

double Cap::depth() const {
  const Vector M = to_minkowski(normal_);
  return std::asinh(M(0));
}

double Cap::signed_distance(const RowVector& x) const { return std::asinh(side(x)); }

Cap Cap::image(const LorentzMatrix& g) const { return Cap(RowVector(normal_ * g.entries())); }

}  // namespace horolab
