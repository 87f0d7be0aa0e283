#include "horolab/convex_core.hpp"
#include "horolab/error.hpp"
#include "sampling.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace horolab;
using horolab::testing::Sampler;

namespace {

struct Fixture {
  SchottkyGroup group = build_schottky(symmetric_config(2, 2, 0.6));
  CoreApproximation core = build_core(group, CoreOptions{3});
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

// Frame whose geodesic joins two fixed points of group elements, so both
// endpoints lie in the limit set.
LorentzMatrix limit_frame(const SchottkyGroup& g, Sampler& rng) {
  auto word = [&](int length) {
    LorentzMatrix m = LorentzMatrix::identity(g.dim());
    int last = -1;
    for (int i = 0; i < length; ++i) {
      int l;
      do {
        l = static_cast<int>(rng.uniform(0, g.letter_count()));
      } while (last >= 0 && l == SchottkyGroup::inverse_letter(last));
      m = m * g.letter(l);
      last = l;
    }
    return m;
  };
  while (true) {
    const auto plus = SchottkyGroup::attracting_fixed_point(word(3));
    const auto minus = SchottkyGroup::attracting_fixed_point(word(4));
    if (ball_distance(plus, minus) > 1e-3) return frame_from_endpoints(plus, minus);
  }
}

}  // namespace

TEST(ConvexCore, SamplesInFundamentalDomain) {
  const auto& f = fixture();
  ASSERT_FALSE(f.core.samples.empty());
  for (const auto& c : f.core.samples) EXPECT_TRUE(f.group.in_fundamental_domain(c));
  EXPECT_GT(f.core.mesh, 0.0);
  EXPECT_LE(f.core.diameter, 2.0 * f.core.radius + 1e-12);
}

TEST(ConvexCore, SampleHasZeroDistance) {
  const auto& f = fixture();
  for (std::size_t i = 0; i < f.core.samples.size(); i += 97) {
    EXPECT_NEAR(distance_to_core(f.group, f.core, f.core.samples[i]), 0.0, 1e-7);
  }
}

TEST(ConvexCore, DistanceGrowsAlongRayLeavingCore) {
  const auto& f = fixture();
  // Between two caps the ray from o runs out into a funnel end.
  Vector u(2);
  u << std::cos(std::numbers::pi / 4), std::sin(std::numbers::pi / 4);
  const auto o = HyperbolicPoint::basepoint(2);
  std::vector<double> d;
  for (double T = 3.0; T <= 8.0; T += 1.0) d.push_back(distance_to_core(f.group, f.core, act(o, boost(2, u, T)).lorentz()));
  for (std::size_t i = 1; i < d.size(); ++i) EXPECT_NEAR(d[i] - d[i - 1], 1.0, 0.05);
}

TEST(ConvexCore, GroupInvariance) {
  const auto& f = fixture();
  Sampler rng(51);
  for (int i = 0; i < 50; ++i) {
    const RowVector x = rng.point(2, 3.0).lorentz();
    const double d = distance_to_core(f.group, f.core, x);
    for (int l = 0; l < f.group.letter_count(); ++l) {
      const double dg = distance_to_core(f.group, f.core, RowVector(x * f.group.letter(l).entries()));
      EXPECT_NEAR(d, dg, f.core.mesh);
    }
  }
}

TEST(ConvexCore, GeodesicsBetweenLimitPointsStayNearCore) {
  const auto& f = fixture();
  Sampler rng(52);
  for (int i = 0; i < 30; ++i) {
    const auto frame = limit_frame(f.group, rng);
    for (double s = -6.0; s <= 6.0; s += 0.5) {
      const double d = distance_to_core(f.group, f.core, make_flow(2, s) * frame);
      EXPECT_LE(d, f.core.mesh);
      EXPECT_LE(d, f.core.diameter + f.core.mesh);
    }
  }
}

TEST(ConvexCore, EmptyCoreIsInvalidState) {
  const auto& f = fixture();
  try {
    distance_to_core(f.group, CoreApproximation{}, HyperbolicPoint::basepoint(2).lorentz());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_state);
  }
}

TEST(ConvexCore, DiophantineCompliance) {
  const auto& f = fixture();
  Sampler rng(53);
  const double s0 = std::max(1.0, f.core.diameter);
  for (int i = 0; i < 20; ++i) {
    const auto x = f.group.reduce_frame(limit_frame(f.group, rng));
    const auto r = diophantine_check(f.group, f.core, x, 0.5, s0, 20.0);
    EXPECT_TRUE(r.compliant) << "violated at " << r.violated_at;
    EXPECT_LE(r.max_ratio, 0.5);
    EXPECT_EQ(r.s_grid.size(), r.distances.size());
  }
}

TEST(ConvexCore, DiophantineDetectsExcursion) {
  // x^- in the limit set, x^+ in a funnel and x pushed 6 units toward x^+:
  // a_{-s} x is still about 6 - s away from the core for small s.
  const auto& f = fixture();
  Sampler rng(54);
  Vector between(2);
  between << std::cos(std::numbers::pi / 4), std::sin(std::numbers::pi / 4);
  const auto minus = SchottkyGroup::attracting_fixed_point(f.group.letter(0));
  const auto x = make_flow(2, 6.0) * frame_from_endpoints(BoundaryPoint::from_ball(between), minus);
  const auto r = diophantine_check(f.group, f.core, x, 0.5, 1.0, 12.0);
  EXPECT_FALSE(r.compliant);
  EXPECT_DOUBLE_EQ(r.violated_at, 1.0);
}

TEST(ConvexCore, DiophantinePreconditions) {
  const auto& f = fixture();
  Vector between(2);
  between << std::cos(std::numbers::pi / 4), std::sin(std::numbers::pi / 4);
  const auto minus = BoundaryPoint::from_ball(between);
  const auto plus = BoundaryPoint::from_ball(Vector::Unit(2, 0));
  const auto x = frame_from_endpoints(plus, minus);
  try {
    diophantine_check(f.group, f.core, x, 0.5, 2.0, 10.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::precondition_violation);
  }
  EXPECT_THROW(diophantine_check(f.group, f.core, x, 1.5, 2.0, 10.0), Error);
  EXPECT_THROW(diophantine_check(f.group, f.core, x, 0.5, 0.5, 10.0), Error);
}
