#pragma once

// Test functions on admissible boxes, the window / translate / mixing
// statistics behind the equidistribution theorems, sublevel-set tests for
// polynomials, nondivergence mass and rate fitting.

#include "horolab/densities.hpp"

#include <optional>
#include <string>
#include <vector>

namespace horolab {

// The product neighbourhood {u_t p center : |t| <= t_radius, p = a_s v_r m
// with |s|, |r|, angle(m) <= p_radius} (sup norms).
struct Box {
  LorentzMatrix center;
  double t_radius = 0.25;
  double p_radius = 0.25;
};

// Coordinates of h relative to a box centre, or nullopt when h falls outside
// the chart.
struct BoxCoordinates {
  HoroParam t;
  double s = 0.0;
  HoroParam r;
  double angle = 0.0;
};
std::optional<BoxCoordinates> box_coordinates(const Box& box, const LorentzMatrix& h);

// Largest displacement of the footpoint over the box (checked on its corners
// and a few interior points).
double box_reach(const Box& box);

// (1 - x^2)^(l+1) on [-1, 1], the one-dimensional profile of every bump.
double bump_profile(double x, int smoothness);

// Finite sum of box bumps, each a tensor product of bump profiles in the
// coordinates of its own box.
class TestFunction {
 public:
  const std::vector<Box>& boxes() const { return boxes_; }
  const Box& box() const { return boxes_.front(); }
  int smoothness() const { return smoothness_; }
  double peak() const { return peak_; }
  // Upper bounds for sum over |alpha| <= l of ||D^alpha psi||_p in box
  // coordinates, for p = infinity and p = 2 (summed over the boxes).
  double sobolev_sup() const { return sobolev_sup_; }
  double sobolev_l2() const { return sobolev_l2_; }
  // Smallest horospherical radius among the boxes.
  double finest_t_radius() const;

  // Value of the lift to G, supported in the union of the boxes.
  double lift(const LorentzMatrix& h) const;
  // Value on the quotient: h is first moved into the fundamental domain.
  double operator()(const LorentzMatrix& h) const;

 private:
  friend TestFunction make_bump(const SchottkyGroup& group, const std::vector<Box>& boxes, int smoothness,
                                double peak);

  const SchottkyGroup* group_ = nullptr;
  std::vector<Box> boxes_;
  std::vector<double> reach_;
  std::vector<RowVector> feet_;
  int smoothness_ = 2;
  double peak_ = 1.0;
  double sobolev_sup_ = 0.0;
  double sobolev_l2_ = 0.0;
};

// Each box must embed in the quotient: its footprint has to stay inside the
// fundamental domain and within the injectivity radius at the centre,
// otherwise invalid_box. The group must outlive the returned function.
TestFunction make_bump(const SchottkyGroup& group, const std::vector<Box>& boxes, int smoothness,
                       double peak = 1.0);
TestFunction make_bump(const SchottkyGroup& group, const Box& box, int smoothness, double peak = 1.0);

// `count` boxes centred at the frames based at o pointing in the directions
// of angle 2 pi k / count in the (e_0, e_1) plane.
std::vector<Box> ring_boxes(int dim, int count, double t_radius, double p_radius);

// Bump on B_U(radius), used as the weight f in translate integrals.
struct HoroBump {
  double radius = 0.5;
  int smoothness = 2;
  double operator()(const HoroParam& t) const;
};

enum class WindowKind { ps, haar };

struct WindowAverage {
  double value = 0.0;
  double numerator = 0.0;
  double ps_mass = 0.0;
  std::size_t evaluations = 0;
};

// PS kind: PS-weighted average of psi(u_t x) over B_U(T). Haar kind: the
// Lebesgue integral of psi(u_t x) over B_U(T) (midpoint rule with step
// `resolution`) divided by the PS mass of B_U(T). Throws empty_window when the
// PS mass vanishes.
WindowAverage window_average(WindowKind kind, const LorentzMatrix& x, double T, const TestFunction& psi,
                             const PattersonDensity& density, double resolution = 0.01);

// PS kind: sum over the PS leaf of f(t) psi(a_s u_t x). Haar kind:
// e^{(n-1-delta) s} times the Lebesgue integral of psi(a_s u_t x) f(t), with a
// step fine enough to resolve the box after expansion by e^s.
double translate_integral(WindowKind kind, const LorentzMatrix& x, double s, const HoroBump& f,
                          const TestFunction& psi, const PattersonDensity& density);
// The step used by the Haar translate integral at flow time s.
double translate_step(const TestFunction& psi, double s);

struct Correlation {
  double s = 0.0;
  double value = 0.0;
  double std_error = 0.0;
};

// Normalized BMS correlation m(psi o a_s . phi)/|m| - m(psi) m(phi)/|m|^2
// from a BMS sample.
std::vector<Correlation> mixing_correlation(const GlobalSample& sample, const std::vector<double>& s_grid,
                                            const TestFunction& psi, const TestFunction& phi);

// Polynomial of degree <= 2 on R^{n-1}: constant + linear . t + t^T quadratic t.
struct Polynomial {
  double constant = 0.0;
  HoroParam linear;
  Matrix quadratic;

  double operator()(const HoroParam& t) const;
};

struct GoodFunctionResult {
  double beta = 0.0;
  double band = 0.0;          // 95% half-width
  bool degenerate = false;    // fewer than 3 distinct positive sublevel masses
  double sup = 0.0;           // sup of |f| over the atoms in the ball
  std::vector<double> epsilons;
  std::vector<double> masses; // sublevel mass / ball mass
};

// Sublevel masses mu({t in B : |f(t)| < eps sup_B |f|}) / mu(B) against eps.
GoodFunctionResult good_function_check(const LeafMeasure& leaf, const Polynomial& f, const HoroParam& center,
                                       double radius, const std::vector<double>& epsilons);

// PS mass of B_U(T/s) on the leaf through a_{-log s} x that lands farther
// than R - mesh from the core.
double nondivergence_mass(const SchottkyGroup& group, const CoreApproximation& core,
                          const PattersonDensity& density, const LorentzMatrix& x, double T, double s, double R);
// The same for several depths, sharing the distance computations.
std::vector<double> nondivergence_profile(const SchottkyGroup& group, const CoreApproximation& core,
                                          const PattersonDensity& density, const LorentzMatrix& x, double T,
                                          double s, const std::vector<double>& depths);

enum class RateModel { power, exponential };

struct RateFit {
  RateModel model = RateModel::power;
  double kappa = 0.0;
  double prefactor = 0.0;
  double residual = 0.0;
  double band = 0.0;             // 95% half-width on kappa
  bool absolute_values = false;  // some inputs were non-positive
  std::size_t points = 0;
};

// Weighted least squares of log |y| against log x (power, y ~ c x^-kappa) or
// x (exponential, y ~ c e^-kappa x). Standard errors, when given, set the
// weights (y/se)^2.
RateFit fit_rate(RateModel model, const std::vector<double>& x, const std::vector<double>& y,
                 const std::vector<double>& std_errors = {});

// Number of strict increases in a sequence.
int count_inversions(const std::vector<double>& values);

}  // namespace horolab
