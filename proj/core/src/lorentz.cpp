#include "horolab/lorentz.hpp"

#include "horolab/error.hpp"

#include <cmath>
#include <string>

namespace horolab {

namespace {

void require_dim(int dim) {
  if (dim < 2 || dim > kMaxDim) {
    throw Error(ErrorCode::invalid_argument,
                "dimension " + std::to_string(dim) + " outside [2, " +
                    std::to_string(kMaxDim) + "]");
  }
}

}  // namespace

double sup_norm(const HoroParam& t) {
  return t.size() == 0 ? 0.0 : t.cwiseAbs().maxCoeff();
}

Matrix lorentz_form(int dim) {
  require_dim(dim);
  Matrix j = Matrix::Identity(dim + 1, dim + 1);
  j(0, 0) = 0.0;
  j(dim, dim) = 0.0;
  j(0, dim) = -1.0;
  j(dim, 0) = -1.0;
  return j;
}

double lorentz_pairing(const RowVector& x, const RowVector& y) {
  const Eigen::Index n = x.size() - 1;
  double acc = -(x(0) * y(n) + x(n) * y(0));
  for (Eigen::Index i = 1; i < n; ++i) acc += x(i) * y(i);
  return acc;
}

LorentzMatrix::LorentzMatrix(Matrix entries) : m_(std::move(entries)) {
  if (m_.rows() != m_.cols()) {
    throw Error(ErrorCode::invalid_argument, "Lorentz matrix must be square");
  }
  require_dim(static_cast<int>(m_.rows()) - 1);
}

LorentzMatrix LorentzMatrix::identity(int dim) {
  require_dim(dim);
  return LorentzMatrix(Matrix::Identity(dim + 1, dim + 1));
}

LorentzMatrix LorentzMatrix::operator*(const LorentzMatrix& other) const {
  if (dim() != other.dim()) {
    throw Error(ErrorCode::invalid_argument, "dimension mismatch in product");
  }
  return LorentzMatrix(Matrix(m_ * other.m_));
}

LorentzMatrix LorentzMatrix::inverse() const {
  // J g^T J with J = anti-corner -1, middle identity: entrywise
  // (g^{-1})_{ij} = J_ii' g_{j'i'} J_j'j where i' is the corner swap of i.
  const int n = dim();
  Matrix inv(n + 1, n + 1);
  auto swap_index = [n](int i) { return i == 0 ? n : (i == n ? 0 : i); };
  auto sign = [n](int i) { return (i == 0 || i == n) ? -1.0 : 1.0; };
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      inv(i, j) = sign(i) * sign(j) * m_(swap_index(j), swap_index(i));
    }
  }
  return LorentzMatrix(std::move(inv));
}

RowVector operator*(const RowVector& x, const LorentzMatrix& g) {
  return x * g.entries();
}

LorentzMatrix make_flow(int dim, double s) {
  require_dim(dim);
  if (!std::isfinite(s)) {
    throw Error(ErrorCode::invalid_argument, "flow time must be finite");
  }
  Matrix m = Matrix::Identity(dim + 1, dim + 1);
  m(0, 0) = std::exp(s);
  m(dim, dim) = std::exp(-s);
  return LorentzMatrix(std::move(m));
}

LorentzMatrix make_horo(Horo direction, const HoroParam& t) {
  const int dim = static_cast<int>(t.size()) + 1;
  require_dim(dim);
  if (!t.allFinite()) {
    throw Error(ErrorCode::invalid_argument, "horospherical parameter must be finite");
  }
  const double half_sq = 0.5 * t.squaredNorm();
  Matrix m = Matrix::Identity(dim + 1, dim + 1);
  if (direction == Horo::expanding) {
    m.block(0, 1, 1, dim - 1) = t.transpose();
    m(0, dim) = half_sq;
    m.block(1, dim, dim - 1, 1) = t;
  } else {
    m.block(1, 0, dim - 1, 1) = t;
    m(dim, 0) = half_sq;
    m.block(dim, 1, 1, dim - 1) = t.transpose();
  }
  return LorentzMatrix(std::move(m));
}

LorentzMatrix make_rotation(const Matrix& rotation) {
  const int dim = static_cast<int>(rotation.rows()) + 1;
  require_dim(dim);
  if (rotation.rows() != rotation.cols()) {
    throw Error(ErrorCode::invalid_argument, "rotation block must be square");
  }
  Matrix m = Matrix::Identity(dim + 1, dim + 1);
  m.block(1, 1, dim - 1, dim - 1) = rotation;
  return LorentzMatrix(std::move(m));
}

Matrix planar_rotation(double angle) {
  Matrix r(2, 2);
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

ParabolicElement ParabolicElement::identity(int dim) {
  require_dim(dim);
  ParabolicElement p;
  p.r = HoroParam::Zero(dim - 1);
  p.rotation = Matrix::Identity(dim - 1, dim - 1);
  return p;
}

LorentzMatrix ParabolicElement::matrix() const {
  const int n = dim();
  return make_flow(n, s) * make_v(r) * make_rotation(rotation);
}

PUDecomposition decompose_pu(const LorentzMatrix& g) {
  const int n = g.dim();
  // e_0 p = e^s e_0, hence the first row of p u_t is e^s (1, t, |t|^2/2).
  const double lead = g(0, 0);
  const double scale = g.entries().cwiseAbs().maxCoeff();
  if (!(lead > 1e-14 * scale)) {
    throw Error(ErrorCode::decomposition_failed,
                "element lies outside the P U chart (g_00 = " + std::to_string(lead) + ")");
  }
  PUDecomposition out;
  out.t = g.entries().block(0, 1, 1, n - 1).transpose() / lead;
  const LorentzMatrix p = g * make_u(HoroParam(-out.t));
  out.p.s = std::log(p(0, 0));
  const LorentzMatrix q = make_flow(n, -out.p.s) * p;  // v_r m
  out.p.rotation = q.entries().block(1, 1, n - 1, n - 1);
  out.p.r = q.entries().block(1, 0, n - 1, 1);
  return out;
}

PUDecomposition decompose_up(const LorentzMatrix& g) {
  // g = u_t p  <=>  g^{-1} = p^{-1} u_{-t}
  const PUDecomposition inv = decompose_pu(g.inverse());
  PUDecomposition out;
  out.t = -inv.t;
  const LorentzMatrix p = make_u(HoroParam(-out.t)) * g;
  const int n = g.dim();
  out.p.s = std::log(p(0, 0));
  const LorentzMatrix q = make_flow(n, -out.p.s) * p;
  out.p.rotation = q.entries().block(1, 1, n - 1, n - 1);
  out.p.r = q.entries().block(1, 0, n - 1, 1);
  return out;
}

namespace {

double rho_denominator(const ParabolicElement& p, const HoroParam& t) {
  if (p.r.size() != t.size()) {
    throw Error(ErrorCode::invalid_argument, "rho_p: dimension mismatch");
  }
  if (p.rotation.size() != 0 && !p.rotation.isIdentity(1e-12)) {
    throw Error(ErrorCode::invalid_argument, "rho_p expects p = a_s v_r (trivial M part)");
  }
  return 1.0 - t.dot(p.r) + 0.25 * p.r.squaredNorm() * t.squaredNorm();
}

}  // namespace

HoroParam rho_p(const ParabolicElement& p, const HoroParam& t) {
  const double denom = rho_denominator(p, t);
  if (!(std::abs(denom) > 1e-14)) {
    throw Error(ErrorCode::singular_configuration, "rho_p leaves the chart");
  }
  return std::exp(p.s) * (t - 0.5 * t.squaredNorm() * p.r) / denom;
}

double rho_flow_factor(const ParabolicElement& p, const HoroParam& t) {
  return std::exp(-p.s) * rho_denominator(p, t);
}

double lorentz_residual(const Matrix& g) {
  const int dim = static_cast<int>(g.rows()) - 1;
  const Matrix j = lorentz_form(dim);
  return (g.transpose() * j * g - j).cwiseAbs().maxCoeff();
}

double distance_from_identity(const LorentzMatrix& g) {
  const Matrix diff = g.entries() - Matrix::Identity(g.dim() + 1, g.dim() + 1);
  Eigen::JacobiSVD<Matrix> svd(diff);
  return svd.singularValues()(0);
}

}  // namespace horolab
