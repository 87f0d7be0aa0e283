#include "horolab/error.hpp"
#include "horolab/schottky.hpp"
#include "sampling.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace horolab;
using horolab::testing::Sampler;

namespace {

const SchottkyGroup& standard() {
  static const SchottkyGroup g = build_schottky(symmetric_config(2, 2, 0.6));
  return g;
}

ErrorCode code_of(const SchottkyConfig& config) {
  try {
    build_schottky(config);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "construction unexpectedly succeeded";
  return ErrorCode::invalid_argument;
}

// Free-group word count by brute force over all letter sequences.
std::size_t brute_force_count(int rank, int length) {
  const int letters = 2 * rank;
  std::size_t count = 0;
  std::vector<int> word(length, 0);
  while (true) {
    bool reduced = true;
    for (int i = 1; i < length; ++i) reduced &= word[i] != (word[i - 1] ^ 1);
    if (reduced) ++count;
    int k = 0;
    while (k < length && ++word[k] == letters) word[k++] = 0;
    if (k == length) break;
  }
  return count;
}

}  // namespace

TEST(Schottky, StandardExampleIsValid) {
  const auto& g = standard();
  EXPECT_EQ(g.rank(), 2);
  EXPECT_TRUE(g.zariski_dense());
  EXPECT_GT(g.min_margin(), 0.0);
  for (int l = 0; l < g.letter_count(); ++l) {
    EXPECT_LT(lorentz_residual(g.letter(l)), 1e-12);
    EXPECT_TRUE((g.letter(l) * g.letter(SchottkyGroup::inverse_letter(l))).entries().isIdentity(1e-12));
  }
}

TEST(Schottky, PingPongMapsExteriorIntoTarget) {
  const auto& g = standard();
  Sampler rng(41);
  for (int i = 0; i < 2000; ++i) {
    const auto xi = rng.boundary(2);
    for (int l = 0; l < g.letter_count(); ++l) {
      if (g.target_cap(SchottkyGroup::inverse_letter(l)).contains(xi)) continue;
      EXPECT_TRUE(g.target_cap(l).contains(act(xi, g.letter(l)), 1e-12));
    }
  }
}

TEST(Schottky, CyclicGroupIsNotZariskiDense) {
  const auto g = build_schottky(symmetric_config(2, 1, 0.6));
  EXPECT_EQ(g.rank(), 1);
  EXPECT_FALSE(g.zariski_dense());
}

TEST(Schottky, CoplanarAxesAreNotZariskiDense) {
  // Rank 2 in H^3 with both axes through o spans only a totally geodesic plane.
  SchottkyConfig config;
  config.dim = 3;
  for (int i = 0; i < 2; ++i) {
    Vector c = Vector::Unit(3, i);
    config.pairings.push_back({{-c, 0.6}, {c, 0.6}, 0.0});
  }
  EXPECT_FALSE(build_schottky(config).zariski_dense());
  // Tilting one source off the antipode takes that axis away from o.
  config.pairings[1].source.center << 0.0, -0.8, 0.6;
  EXPECT_TRUE(build_schottky(config).zariski_dense());
  EXPECT_TRUE(build_schottky(symmetric_config(3, 3, 0.6)).zariski_dense());
}

TEST(Schottky, OverlapAndZeroMarginRejected) {
  EXPECT_EQ(code_of(symmetric_config(2, 2, 0.9)), ErrorCode::invalid_config);
  // Four caps at right angles touch when each angular radius is pi / 4.
  const double touching = 2.0 * std::sin(std::numbers::pi / 8.0);
  EXPECT_EQ(code_of(symmetric_config(2, 2, touching)), ErrorCode::construction_failed);
  try {
    build_schottky(symmetric_config(2, 2, 0.9));
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("ball 0"), std::string::npos);
  }
}

TEST(Schottky, BadConfigsRejected) {
  SchottkyConfig empty;
  EXPECT_EQ(code_of(empty), ErrorCode::invalid_config);
  auto config = symmetric_config(2, 2, 0.6);
  config.pairings[0].source.radius = -1.0;
  EXPECT_EQ(code_of(config), ErrorCode::invalid_config);
  config = symmetric_config(2, 2, 0.6);
  config.pairings[0].source.center = Vector::Zero(3);
  EXPECT_EQ(code_of(config), ErrorCode::invalid_config);
}

TEST(Schottky, WordCounts) {
  const auto& g = standard();
  EXPECT_EQ(enumerate_words(g, 0).size(), 1u);
  EXPECT_EQ(enumerate_words(g, 1).size(), 5u);
  EXPECT_EQ(enumerate_words(g, 3).size(), 53u);
  for (int L = 0; L <= 8; ++L) {
    std::size_t total = 0;
    for (int k = 0; k <= L; ++k) total += brute_force_count(2, k);
    EXPECT_EQ(word_count(2, L), total);
    if (L <= 6) EXPECT_EQ(enumerate_words(g, L).size(), total);
  }
  EXPECT_EQ(word_count(3, 4), 1u + 6u + 30u + 150u + 750u);
}

TEST(Schottky, WordsAreReducedDistinctAndCached) {
  const auto& g = standard();
  const auto words = enumerate_words(g, 4);
  std::set<std::vector<int>> seen;
  for (const auto& w : words) {
    EXPECT_TRUE(seen.insert(w.letters).second);
    LorentzMatrix product = LorentzMatrix::identity(2);
    for (std::size_t i = 0; i < w.letters.size(); ++i) {
      if (i > 0) EXPECT_NE(w.letters[i], SchottkyGroup::inverse_letter(w.letters[i - 1]));
      product = product * g.letter(w.letters[i]);
    }
    EXPECT_LT((product.entries() - w.matrix.entries()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Schottky, NegativeLengthRejected) {
  EXPECT_THROW(enumerate_words(standard(), -1), Error);
  EXPECT_THROW(limit_set_sample(standard(), 0), Error);
}

TEST(Schottky, TriangleInequalityOnOrbit) {
  const auto& g = standard();
  const auto words = enumerate_words(g, 3);
  const auto o = HyperbolicPoint::basepoint(2);
  for (const auto& a : words) {
    for (const auto& b : words) {
      const double dab = hyp_distance(o, act(o, a.matrix * b.matrix));
      EXPECT_LE(dab, hyp_distance(o, act(o, a.matrix)) + hyp_distance(o, act(o, b.matrix)) + 1e-9);
    }
  }
}

TEST(Schottky, LimitSamplesLieInCapsAndNest) {
  const auto& g = standard();
  for (int L = 1; L <= 5; ++L) {
    for (const auto& w : words_of_length(g, L)) {
      const auto xi = radial_direction(act(HyperbolicPoint::basepoint(2), w.matrix));
      bool inside = false;
      for (const auto& cap : g.caps()) inside |= cap.contains(xi);
      EXPECT_TRUE(inside);
      // Orbit point over its own cylinder, and over every prefix cylinder.
      const RowVector point = HyperbolicPoint::basepoint(2).lorentz() * w.matrix;
      for (std::size_t k = 1; k <= w.letters.size(); ++k) {
        std::vector<int> tail(w.letters.end() - static_cast<long>(k), w.letters.end());
        EXPECT_TRUE(cylinder(g, tail).contains(point));
      }
    }
  }
}

TEST(Schottky, CyclicGroupHasTwoLimitDirections) {
  const auto g = build_schottky(symmetric_config(2, 1, 0.6));
  const auto deep = limit_set_sample(g, 12);
  ASSERT_EQ(deep.size(), 2u);
  const auto plus = SchottkyGroup::attracting_fixed_point(g.letter(0));
  const auto minus = SchottkyGroup::repelling_fixed_point(g.letter(0));
  for (const auto& xi : deep) {
    EXPECT_LT(std::min(ball_distance(xi, plus), ball_distance(xi, minus)), 1e-3);
  }
}

TEST(Schottky, FixedPointsAreFixed) {
  const auto& g = standard();
  for (const auto& w : words_of_length(g, 3)) {
    const auto p = SchottkyGroup::attracting_fixed_point(w.matrix);
    EXPECT_LT(ball_distance(act(p, w.matrix), p), 1e-9);
    EXPECT_TRUE(g.in_limit_set(p.null(), 8));
  }
}

TEST(Schottky, LimitSetMembership) {
  const auto& g = standard();
  // Directions between the caps are in the domain of discontinuity.
  Vector between(2);
  between << std::cos(std::numbers::pi / 4), std::sin(std::numbers::pi / 4);
  EXPECT_FALSE(g.in_limit_set(BoundaryPoint::from_ball(between).null(), 1));
}

TEST(Schottky, ReductionLandsInFundamentalDomain) {
  const auto& g = standard();
  Sampler rng(42);
  for (int i = 0; i < 500; ++i) {
    RowVector x = rng.point(2, 5.0).lorentz();
    const RowVector start = x;
    LorentzMatrix gamma;
    g.reduce_point(x, &gamma);
    EXPECT_TRUE(g.in_fundamental_domain(x));
    EXPECT_LT((start * gamma.entries() - x).cwiseAbs().maxCoeff(), 1e-8 * start.cwiseAbs().maxCoeff());
    const auto frame = rng.element(2, 1.0);
    const auto reduced = g.reduce_frame(frame);
    EXPECT_TRUE(g.in_fundamental_domain(footpoint_lorentz(reduced)));
  }
}

TEST(Schottky, InjectivityRadiusPositive) {
  const auto& g = standard();
  const double r = g.injectivity_radius(HyperbolicPoint::basepoint(2).lorentz());
  EXPECT_GT(r, 0.5);
}

TEST(Schottky, CriticalExponentOfStandardExample) {
  const auto ce = critical_exponent_estimate(standard(), 2, 8);
  EXPECT_GT(ce.value, 0.0);
  EXPECT_LT(ce.value, 1.0);
  EXPECT_FALSE(ce.low_confidence);
  EXPECT_LT(ce.error_band, 0.01);
}

TEST(Schottky, CyclicExponentVanishes) {
  const auto g = build_schottky(symmetric_config(2, 1, 0.6));
  EXPECT_LT(critical_exponent_estimate(g, 2, 8).value, 1e-6);
}

TEST(Schottky, ShrinkingBallsLowersExponent) {
  const double big = critical_exponent_estimate(build_schottky(symmetric_config(2, 2, 0.7)), 2, 8).value;
  const double small = critical_exponent_estimate(build_schottky(symmetric_config(2, 2, 0.5)), 2, 8).value;
  EXPECT_LT(small, big);
  const double n3 = critical_exponent_estimate(build_schottky(symmetric_config(3, 3, 0.6)), 2, 5).value;
  EXPECT_GT(n3, 0.0);
  EXPECT_LT(n3, 2.0);
}

TEST(Schottky, ExponentInvariantUnderConjugation) {
  // Conjugating every generator by a fixed isometry h moves o to o h^{-1};
  // the exponent is a group invariant.
  auto config = symmetric_config(2, 2, 0.6);
  const Matrix r = Sampler(43).rotation(2);
  for (auto& p : config.pairings) {
    p.source.center = r * p.source.center;
    p.target.center = r * p.target.center;
  }
  const double base = critical_exponent_estimate(standard(), 2, 8).value;
  const double rotated = critical_exponent_estimate(build_schottky(config), 2, 8).value;
  EXPECT_NEAR(base, rotated, 0.02);
}

TEST(Schottky, LowConfidenceForShortRange) {
  const auto ce = critical_exponent_estimate(standard(), 2, 3);
  EXPECT_TRUE(ce.low_confidence);
}

TEST(Schottky, ShellSums) {
  const auto sums = shell_sums(standard(), 4, 0.0);
  ASSERT_EQ(sums.size(), 5u);
  EXPECT_DOUBLE_EQ(sums[0], 1.0);
  EXPECT_DOUBLE_EQ(sums[1], 4.0);
  EXPECT_DOUBLE_EQ(sums[4], 108.0);
}
