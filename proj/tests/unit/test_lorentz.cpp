#include "horolab/error.hpp"
#include "horolab/lorentz.hpp"
#include "sampling.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace horolab;
using horolab::testing::Sampler;

namespace {

HoroParam vec(std::initializer_list<double> xs) {
  HoroParam t(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double x : xs) t(i++) = x;
  return t;
}

double max_diff(const LorentzMatrix& a, const LorentzMatrix& b) {
  return (a.entries() - b.entries()).cwiseAbs().maxCoeff();
}

// u_t written out by hand for n = 2, independent of make_horo.
Matrix u_by_hand(double t) {
  Matrix m(3, 3);
  m << 1, t, 0.5 * t * t, 0, 1, t, 0, 0, 1;
  return m;
}

}  // namespace

TEST(Lorentz, FlowAtZeroIsIdentity) {
  EXPECT_EQ(make_flow(2, 0.0).entries(), Matrix::Identity(3, 3));
}

TEST(Lorentz, FlowRejectsNonFinite) {
  try {
    make_flow(2, std::nan(""));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_argument);
  }
  EXPECT_THROW(make_flow(3, INFINITY), Error);
}

TEST(Lorentz, FlowInverse) {
  const auto g = make_flow(3, 1.7) * make_flow(3, -1.7);
  EXPECT_LT(max_diff(g, LorentzMatrix::identity(3)), 1e-15);
}

TEST(Lorentz, HoroMatchesDisplayedMatrix) {
  const auto u = make_u(vec({1.0}));
  Matrix expected(3, 3);
  expected << 1, 1, 0.5, 0, 1, 1, 0, 0, 1;
  EXPECT_EQ(u.entries(), expected);
  EXPECT_EQ(make_u(vec({0.0})).entries(), Matrix::Identity(3, 3));
  EXPECT_EQ(make_v(vec({1.0})).entries(), Matrix(expected.transpose()));
}

TEST(Lorentz, HoroUsesEuclideanNormInCorner) {
  const auto u = make_u(vec({1.0, 2.0}));
  EXPECT_DOUBLE_EQ(u(0, 3), 2.5);
}

TEST(Lorentz, ConjugatingExpandingByFlowDoublesParameter) {
  const auto lhs = make_flow(2, std::log(2.0)) * make_u(vec({1.0})) * make_flow(2, -std::log(2.0));
  EXPECT_LT(max_diff(lhs, make_u(vec({2.0}))), 1e-14);
}

TEST(Lorentz, CommutationRelationsOnRandomInputs) {
  Sampler rng(11);
  for (int dim : {2, 3, 4}) {
    for (int i = 0; i < 500; ++i) {
      const double s = rng.uniform(-3, 3);
      const HoroParam t = rng.horo(dim, 2.0);
      const auto expanding = make_flow(dim, s) * make_u(t) * make_flow(dim, -s);
      EXPECT_LT(max_diff(expanding, make_u(HoroParam(std::exp(s) * t))), 1e-10 * std::exp(2 * std::abs(s)));
      const auto contracting = make_flow(dim, s) * make_v(t) * make_flow(dim, -s);
      EXPECT_LT(max_diff(contracting, make_v(HoroParam(std::exp(-s) * t))), 1e-10 * std::exp(2 * std::abs(s)));
    }
  }
}

TEST(Lorentz, HoroIsAGroupHomomorphism) {
  Sampler rng(12);
  for (int i = 0; i < 200; ++i) {
    const HoroParam t = rng.horo(3, 3.0);
    const HoroParam s = rng.horo(3, 3.0);
    EXPECT_LT(max_diff(make_u(t) * make_u(s), make_u(HoroParam(t + s))), 1e-12);
    EXPECT_LT(max_diff(make_v(t) * make_v(s), make_v(HoroParam(t + s))), 1e-12);
  }
}

TEST(Lorentz, DimensionMismatchRejected) {
  EXPECT_THROW(make_u(vec({1.0})) * make_u(vec({1.0, 2.0})), Error);
  ParabolicElement p = ParabolicElement::identity(3);
  EXPECT_THROW(rho_p(p, vec({1.0})), Error);
}

TEST(Lorentz, GeneratorsPreserveForm) {
  // The form with -1 on the anti-corners; checked entrywise by hand.
  Matrix j(3, 3);
  j << 0, 0, -1, 0, 1, 0, -1, 0, 0;
  EXPECT_EQ(lorentz_form(2), j);
  const Matrix u = u_by_hand(0.7);
  EXPECT_LT((u.transpose() * j * u - j).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT(lorentz_residual(make_flow(4, 2.0)), 1e-12);
  EXPECT_LT(lorentz_residual(make_u(vec({0.3, -1.0, 2.0}))), 1e-12);
  EXPECT_LT(lorentz_residual(make_v(vec({0.3, -1.0, 2.0}))), 1e-12);
  EXPECT_LT(lorentz_residual(make_rotation(planar_rotation(0.4))), 1e-15);
}

TEST(Lorentz, ResidualOfIdentityAndClosure) {
  EXPECT_EQ(lorentz_residual(LorentzMatrix::identity(2)), 0.0);
  const auto g = make_flow(3, 3.0) * make_u(vec({1.0, 2.0})) * make_v(vec({0.5, 0.0}));
  EXPECT_LT(lorentz_residual(g) / g.entries().squaredNorm(), 1e-12);
}

TEST(Lorentz, ResidualDetectsPerturbation) {
  Matrix g = (make_flow(2, 0.5) * make_u(vec({0.3}))).entries();
  g(1, 1) += 1e-3;
  EXPECT_GE(lorentz_residual(g), 1e-4);
}

TEST(Lorentz, ProductsOfGeneratorsStayInGroup) {
  Sampler rng(13);
  for (int i = 0; i < 300; ++i) {
    const auto g = rng.element(3, 1.0);
    const auto h = rng.element(3, 1.0);
    const auto gh = g * h;
    EXPECT_LT(lorentz_residual(gh) / gh.entries().squaredNorm(), 1e-12);
  }
}

TEST(Lorentz, InverseIsExact) {
  Sampler rng(14);
  for (int dim : {2, 3}) {
    for (int i = 0; i < 100; ++i) {
      const auto g = rng.element(dim, 1.0);
      const double scale = g.entries().squaredNorm();
      EXPECT_LT(max_diff(g * g.inverse(), LorentzMatrix::identity(dim)), 1e-12 * scale);
    }
  }
}

TEST(Lorentz, DecomposeIdentity) {
  const auto d = decompose_pu(LorentzMatrix::identity(3));
  EXPECT_EQ(d.p.s, 0.0);
  EXPECT_EQ(d.t.norm(), 0.0);
  EXPECT_EQ(d.p.r.norm(), 0.0);
  EXPECT_TRUE(d.p.rotation.isIdentity());
}

TEST(Lorentz, DecomposeAlreadyFactored) {
  const auto d = decompose_pu(make_flow(3, 1.0) * make_u(vec({0.3, -0.2})));
  EXPECT_NEAR(d.p.s, 1.0, 1e-15);
  EXPECT_NEAR(d.t(0), 0.3, 1e-15);
  EXPECT_NEAR(d.t(1), -0.2, 1e-15);
  EXPECT_LT(d.p.r.norm(), 1e-15);
}

TEST(Lorentz, DecomposeRoundTripsConstructedProducts) {
  Sampler rng(15);
  for (int dim : {2, 3, 4}) {
    for (int i = 0; i < 300; ++i) {
      ParabolicElement p = ParabolicElement::identity(dim);
      p.s = rng.uniform(-2, 2);
      p.r = rng.horo(dim, 1.5);
      p.rotation = rng.rotation(dim - 1);
      const HoroParam t = rng.horo(dim, 1.5);
      const LorentzMatrix g = p.matrix() * make_u(t);
      const auto d = decompose_pu(g);
      EXPECT_NEAR(d.p.s, p.s, 1e-12);
      EXPECT_LT((d.t - t).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LT((d.p.r - p.r).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LT((d.p.rotation - p.rotation).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LT(max_diff(d.p.matrix() * make_u(d.t), g), 1e-12 * g.entries().squaredNorm());

      const LorentzMatrix h = make_u(t) * p.matrix();
      const auto e = decompose_up(h);
      EXPECT_LT((e.t - t).cwiseAbs().maxCoeff(), 1e-11);
      EXPECT_LT(max_diff(make_u(e.t) * e.p.matrix(), h), 1e-11 * h.entries().squaredNorm());
    }
  }
}

TEST(Lorentz, DecomposeOutsideChartFails) {
  // The Weyl element swapping the two ends of the reference geodesic.
  Matrix w = Matrix::Zero(3, 3);
  w(0, 2) = 1;
  w(2, 0) = 1;
  w(1, 1) = -1;
  try {
    decompose_pu(LorentzMatrix(w));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::decomposition_failed);
  }
}

TEST(Lorentz, RhoIsIdentityAtIdentity) {
  const ParabolicElement e = ParabolicElement::identity(3);
  const HoroParam t = vec({0.4, -0.9});
  EXPECT_EQ(rho_p(e, t), t);
}

TEST(Lorentz, RhoWorkedExample) {
  // Oracle by hand: the first row of u_t p^{-1} for n = 2, s = 0, r = 0.1,
  // t = 0.5 is (1 - tr + r^2 t^2 / 4, t - t^2 r / 2, t^2 / 2); rho is the
  // ratio of the middle entry to the first.
  ParabolicElement p = ParabolicElement::identity(2);
  p.r = vec({0.1});
  const double t = 0.5;
  const Matrix v_inv = u_by_hand(-0.1).transpose();
  const Matrix prod = u_by_hand(t) * v_inv;
  const double oracle = prod(0, 1) / prod(0, 0);
  EXPECT_NEAR(oracle, 0.4875 / 0.950625, 1e-15);
  EXPECT_NEAR(rho_p(p, vec({t}))(0), oracle, 1e-14);
  EXPECT_NEAR(rho_flow_factor(p, vec({t})), 0.950625, 1e-15);
}

TEST(Lorentz, RhoMatchesFactorization) {
  Sampler rng(16);
  for (int dim : {2, 3}) {
    for (int i = 0; i < 1000; ++i) {
      ParabolicElement p = ParabolicElement::identity(dim);
      do {
        p.s = rng.uniform(-0.15, 0.15);
        p.r = rng.horo(dim, 0.15);
      } while (distance_from_identity(p.matrix()) >= 0.2);
      const HoroParam t = rng.horo(dim, 1.0);
      const auto d = decompose_pu(make_u(t) * p.matrix().inverse());
      EXPECT_LT((d.t - rho_p(p, t)).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_NEAR(std::exp(d.p.s), rho_flow_factor(p, t), 1e-10);
    }
  }
}

TEST(Lorentz, RhoSingularConfiguration) {
  // 1 - t r + r^2 t^2 / 4 = (1 - t r / 2)^2 vanishes at t r = 2 in n = 2.
  ParabolicElement p = ParabolicElement::identity(2);
  p.r = vec({1.0});
  try {
    rho_p(p, vec({2.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::singular_configuration);
  }
}

TEST(Lorentz, RhoRejectsRotation) {
  ParabolicElement p = ParabolicElement::identity(3);
  p.rotation = planar_rotation(0.3);
  EXPECT_THROW(rho_p(p, vec({0.1, 0.1})), Error);
}

TEST(Lorentz, DistanceFromIdentity) {
  EXPECT_EQ(distance_from_identity(LorentzMatrix::identity(2)), 0.0);
  EXPECT_NEAR(distance_from_identity(make_flow(2, 0.1)), std::exp(0.1) - 1.0, 1e-15);
}
