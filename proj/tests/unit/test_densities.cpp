#include "horolab/densities.hpp"
#include "horolab/error.hpp"
#include "sampling.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

using namespace horolab;
using horolab::testing::Sampler;

namespace {

struct Fixture {
  SchottkyGroup group = build_schottky(symmetric_config(2, 2, 0.72));
  CriticalExponent exponent = critical_exponent_estimate(group, 2, 7);
  PattersonDensity density = patterson_density(group, exponent.value + 0.01, 6);
  CoreApproximation core = build_core(group, CoreOptions{3});
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

std::vector<Cap> length_two_cells(const SchottkyGroup& group) {
  std::vector<Cap> cells;
  for (const auto& w : words_of_length(group, 2)) cells.push_back(cylinder(group, w.letters));
  return cells;
}

double relative_gap(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(PattersonDensity, IsAProbabilityMeasureOnTheLimitSet) {
  const auto& f = fixture();
  EXPECT_NEAR(f.density.total_mass(), 1.0, 1e-12);
  EXPECT_EQ(f.density.atoms.size(), word_count(2, 6) - word_count(2, 5));
  for (const auto& a : f.density.atoms) {
    EXPECT_GT(a.weight, 0.0);
    EXPECT_TRUE(f.group.in_limit_set(a.xi.null(), 4));
  }
}

TEST(PattersonDensity, ConformalityResidualVanishesForTheIdentity) {
  const auto& f = fixture();
  EXPECT_LT(conformality_residual(f.density, LorentzMatrix::identity(2), length_two_cells(f.group)), 1e-12);
}

TEST(PattersonDensity, ConformalityImprovesWithWordLength) {
  const auto& f = fixture();
  const auto cells = length_two_cells(f.group);
  const double s = f.exponent.value + 0.01;
  const auto shallow = patterson_density(f.group, s, 3);
  const auto deep = patterson_density(f.group, s, 7);
  for (const auto& gamma : {f.group.letter(0), LorentzMatrix(f.group.letter(0) * f.group.letter(3))}) {
    EXPECT_LT(conformality_residual(deep, gamma, cells), conformality_residual(shallow, gamma, cells));
  }
}

TEST(PattersonDensity, RejectsExponentFarBelowCritical) {
  const auto& f = fixture();
  try {
    patterson_density(f.group, 0.3, 6);
    FAIL() << "expected invalid_exponent";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_exponent);
  }
}

TEST(PattersonDensity, RebasingToTheSamePointChangesNothing) {
  const auto& f = fixture();
  const auto same = f.density.rebased(f.density.basepoint);
  ASSERT_EQ(same.atoms.size(), f.density.atoms.size());
  for (std::size_t i = 0; i < same.atoms.size(); ++i) {
    EXPECT_NEAR(same.atoms[i].weight, f.density.atoms[i].weight, 1e-15);
  }
}

TEST(PattersonDensity, BasepointChangeBarelyMovesLeafMasses) {
  const auto& f = fixture();
  const auto moved = f.density.rebased(footpoint_lorentz(make_flow(2, 0.5)));
  const auto x = LorentzMatrix::identity(2);
  for (double T : {1.0, 10.0}) {
    EXPECT_LT(relative_gap(ps_leaf(moved, x, T).mass(), ps_leaf(f.density, x, T).mass()), 0.02) << "T=" << T;
  }
}

TEST(LeafMeasure, MassGrowsWithTheWindow) {
  const auto& f = fixture();
  Sampler rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const auto leaf = ps_leaf(f.density, rng.element(2, 0.5), 50.0);
    double previous = 0.0;
    for (double r = 0.0; r <= 50.0; r += 0.5) {
      const double m = leaf.mass_within(r);
      EXPECT_GE(m, previous);
      previous = m;
    }
    EXPECT_NEAR(leaf.mass_within(50.0), leaf.mass(), 1e-14);
  }
}

TEST(LeafMeasure, WindowMassesScaleUnderTheFlow) {
  const auto& f = fixture();
  const double k = f.density.exponent;
  Sampler rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = rng.element(2, 0.3);
    const double s = rng.uniform(0.2, 2.0), T = rng.uniform(1.0, 6.0);
    const double Ts = T * std::exp(-s);
    EXPECT_LT(relative_gap(ps_leaf(f.density, x, T).mass(),
                           std::exp(k * s) * ps_leaf(f.density, make_flow(2, -s) * x, Ts).mass()),
              1e-10);
    EXPECT_LT(relative_gap(ps_minus_leaf(f.density, x, T).mass(),
                           std::exp(k * s) * ps_minus_leaf(f.density, make_flow(2, s) * x, Ts).mass()),
              1e-10);
  }
}

TEST(LeafMeasure, ConjugationMatchesTheFlowedLeafAtomByAtom) {
  const auto& f = fixture();
  const auto x = LorentzMatrix::identity(2);
  const double s = 1.3, T = 5.0;
  const auto lifted = ps_leaf(f.density, x, T).conjugated(s, f.density.exponent);
  const auto direct = ps_leaf(f.density, make_flow(2, -s) * x, T * std::exp(-s));
  ASSERT_EQ(lifted.atoms().size(), direct.atoms().size());
  EXPECT_NEAR(lifted.window(), direct.window(), 1e-12);
  EXPECT_LT(relative_gap(lifted.mass(), direct.mass()), 1e-10);
  for (double r : {0.1, 0.5, 1.0}) {
    EXPECT_LT(std::abs(lifted.mass_within(r) - direct.mass_within(r)), 1e-10 * direct.mass());
  }
}

TEST(LeafMeasure, SkipsTheBackwardEndpoint) {
  // A frame whose backward end is an atom: that atom has no chart point.
  const auto& f = fixture();
  const auto& atom = f.density.atoms.front();
  const auto g = frame_from_endpoints(f.density.atoms.back().xi, atom.xi);
  EXPECT_EQ(ps_leaf(f.density, g, 100.0).skipped(), 1u);
}

TEST(LebesgueLeaf, MassIsTheVolumeOfTheWindow) {
  const auto x = LorentzMatrix::identity(2);
  for (double T : {0.5, 2.0, 7.0}) EXPECT_NEAR(lebesgue_leaf(x, T, 0.01).mass(), 2.0 * T, 1e-9);
  EXPECT_NEAR(lebesgue_leaf(LorentzMatrix::identity(3), 1.5, 0.05).mass(), 9.0, 1e-9);
}

TEST(LebesgueLeaf, ConstantMatchesSphereArea) {
  EXPECT_NEAR(lebesgue_leaf_constant(2), std::sqrt(2.0) / (2.0 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(lebesgue_leaf_constant(3), 2.0 / (4.0 * std::numbers::pi), 1e-15);
}

TEST(LebesgueLeaf, ConstantPullsBackTheRoundMeasure) {
  // c times the integral over the whole horosphere of the Radon-Nikodym
  // factor back to the round probability measure recovers total mass 1.
  const auto g = LorentzMatrix::identity(2);
  const RowVector o = footpoint_lorentz(LorentzMatrix::identity(2));
  const double c = lebesgue_leaf_constant(2);
  double total = 0.0;
  const double h = 1e-2;
  for (double t = -4000.0 + h / 2; t < 4000.0; t += h) {
    HoroParam p(1);
    p(0) = t;
    const RowVector xi = horosphere_projection(g, p).null();
    const RowVector foot = footpoint_lorentz(make_u(p) * g);
    total += c * std::exp(-busemann(xi, o, foot)) * h;
  }
  EXPECT_NEAR(total, 1.0, 1e-3);
}

TEST(ShadowFit, LebesgueControlHasSlopeDimensionMinusOne) {
  const auto leaf = lebesgue_leaf(LorentzMatrix::identity(2), 100.0, 0.05);
  const auto fit = shadow_fit(leaf, {1, 2, 5, 10, 20, 50, 100});
  EXPECT_NEAR(fit.fit.slope, 1.0, 0.02);
}

TEST(ShadowFit, PsLeafSlopeTracksTheExponent) {
  const auto& f = fixture();
  const auto leaf = ps_leaf(f.density, LorentzMatrix::identity(2), 100.0);
  std::vector<double> windows;
  for (int i = 0; i <= 20; ++i) windows.push_back(std::pow(100.0, i / 20.0));
  const auto fit = shadow_fit(leaf, windows);
  EXPECT_NEAR(fit.fit.slope, f.exponent.value, 0.1);
}

TEST(Friendliness, LebesgueLeafHitsKnownValues) {
  const auto leaf = lebesgue_leaf(LorentzMatrix::identity(2), 25.0, 2e-4);
  const auto report = friendliness_report(leaf);
  EXPECT_NEAR(report.alpha, 1.0, 0.1);
  for (double d : report.doubling) EXPECT_NEAR(d, 2.0, 0.1);
  EXPECT_FALSE(report.low_confidence);
}

TEST(Friendliness, PsLeafDoublesAndDecays) {
  const auto& f = fixture();
  const auto report = friendliness_report(ps_leaf(f.density, LorentzMatrix::identity(2), 25.0));
  EXPECT_TRUE(std::isfinite(report.doubling_max));
  EXPECT_LT(report.decade_spread, 2.0);
  EXPECT_GT(report.alpha_lower95, 0.0);
  EXPECT_GT(report.boundary_fit.slope, 0.0);
}

class GlobalSamplers : public ::testing::Test {
 protected:
  static const GlobalSample& bms(std::uint64_t seed) {
    static std::map<std::uint64_t, GlobalSample> cache;
    auto it = cache.find(seed);
    if (it == cache.end()) {
      const auto& f = fixture();
      it = cache.emplace(seed, global_sampler(GlobalKind::bms, f.group, f.core, f.density, 40000, seed)).first;
    }
    return it->second;
  }
};

TEST_F(GlobalSamplers, IndependentSeedsAgreeWithinThreeStandardErrors) {
  const auto one = [](const LorentzMatrix&) { return 1.0; };
  const auto a = integrate(bms(1), one), b = integrate(bms(2), one);
  EXPECT_GT(a.value, 0.0);
  EXPECT_LT(std::abs(a.value - b.value), 3.0 * std::hypot(a.std_error, b.std_error));
}

TEST_F(GlobalSamplers, SameSeedIsReproducibleAcrossJobCounts) {
  const auto& f = fixture();
  SamplerOptions two;
  two.jobs = 2;
  const auto again = global_sampler(GlobalKind::bms, f.group, f.core, f.density, 40000, 1, two);
  const auto& first = bms(1);
  ASSERT_EQ(again.points.size(), first.points.size());
  for (std::size_t i = 0; i < again.points.size(); ++i) {
    EXPECT_EQ(again.points[i].weight, first.points[i].weight);
    EXPECT_TRUE(again.points[i].frame.entries() == first.points[i].frame.entries());
  }
}

TEST_F(GlobalSamplers, IntegrationIsLinear) {
  const auto& sample = bms(1);
  const auto f = [](const LorentzMatrix& g) { return g(0, 0); };
  const auto h = [](const LorentzMatrix& g) { return std::sin(g(1, 0)); };
  const auto sum = integrate(sample, [&](const LorentzMatrix& g) { return f(g) + 2.0 * h(g); });
  EXPECT_NEAR(sum.value, integrate(sample, f).value + 2.0 * integrate(sample, h).value, 1e-9 * sample.total());
}

TEST_F(GlobalSamplers, FootpointsLieInTheFundamentalDomain) {
  const auto& f = fixture();
  for (const auto& p : bms(1).points) EXPECT_TRUE(f.group.in_fundamental_domain(footpoint_lorentz(p.frame)));
}

TEST(Serialization, LeafRoundTripIsBitExact) {
  const auto& f = fixture();
  const auto leaf = ps_leaf(f.density, Sampler(9).element(2, 0.4), 20.0);
  std::stringstream io;
  write_leaf(io, leaf);
  const auto back = read_leaf(io);
  ASSERT_EQ(back.atoms().size(), leaf.atoms().size());
  EXPECT_EQ(back.kind(), leaf.kind());
  EXPECT_EQ(back.window(), leaf.window());
  EXPECT_EQ(back.skipped(), leaf.skipped());
  EXPECT_TRUE(back.basepoint().entries() == leaf.basepoint().entries());
  for (std::size_t i = 0; i < leaf.atoms().size(); ++i) {
    EXPECT_EQ(back.atoms()[i].mass, leaf.atoms()[i].mass);
    EXPECT_TRUE(back.atoms()[i].t == leaf.atoms()[i].t);
  }
}

TEST_F(GlobalSamplers, SampleRoundTripIsBitExact) {
  const auto& sample = bms(1);
  std::stringstream io;
  write_sample(io, sample);
  const auto back = read_sample(io);
  ASSERT_EQ(back.points.size(), sample.points.size());
  EXPECT_EQ(back.draws, sample.draws);
  for (std::size_t i = 0; i < sample.points.size(); ++i) {
    EXPECT_EQ(back.points[i].weight, sample.points[i].weight);
    EXPECT_TRUE(back.points[i].frame.entries() == sample.points[i].frame.entries());
  }
}

TEST(LineFitting, RecoversAnExactLine) {
  std::vector<double> x, y;
  for (int i = 0; i < 8; ++i) {
    x.push_back(0.5 * i);
    y.push_back(3.0 - 1.25 * x.back());
  }
  const auto fit = fit_line(x, y);
  EXPECT_NEAR(fit.slope, -1.25, 1e-12);
  EXPECT_NEAR(fit.intercept, 3.0, 1e-12);
  EXPECT_NEAR(fit.residual, 0.0, 1e-12);
}

TEST(LineFitting, StudentQuantilesMatchTables) {
  EXPECT_NEAR(student_t975(1), 12.706, 1e-3);
  EXPECT_NEAR(student_t975(5), 2.571, 1e-3);
  EXPECT_NEAR(student_t975(30), 2.042, 1e-3);
  EXPECT_NEAR(student_t975(100000), 1.960, 1e-3);
}
