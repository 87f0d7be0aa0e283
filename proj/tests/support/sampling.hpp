#pragma once

// Seeded random inputs shared by the unit and acceptance tests.

#include "horolab/boundary.hpp"
#include "horolab/lorentz.hpp"

#include <cmath>
#include <random>

namespace horolab::testing {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>()(rng_); }

  HoroParam horo(int dim, double bound) {
    HoroParam t(dim - 1);
    for (int i = 0; i < dim - 1; ++i) t(i) = uniform(-bound, bound);
    return t;
  }

  Vector unit(int dim) {
    Vector v(dim);
    do {
      for (int i = 0; i < dim; ++i) v(i) = normal();
    } while (v.norm() < 1e-6);
    return v / v.norm();
  }

  BoundaryPoint boundary(int dim) { return BoundaryPoint::from_ball(unit(dim)); }

  // Point of H^n at hyperbolic distance at most `radius` from o.
  HyperbolicPoint point(int dim, double radius) {
    const double d = uniform(0.0, radius);
    return HyperbolicPoint::from_ball(std::tanh(0.5 * d) * unit(dim));
  }

  Matrix rotation(int dim) {
    Matrix a(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) a(i, j) = normal();
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ();
    if (q.determinant() < 0) q.col(0) *= -1.0;
    return q;
  }

  // A product of flows, horospherical elements and a rotation.
  LorentzMatrix element(int dim, double spread) {
    LorentzMatrix g = make_flow(dim, uniform(-spread, spread));
    g = g * make_u(horo(dim, spread)) * make_v(horo(dim, spread));
    return g * spatial_rotation(rotation(dim)) * make_flow(dim, uniform(-spread, spread));
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace horolab::testing
