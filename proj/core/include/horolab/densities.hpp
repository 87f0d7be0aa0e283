#pragma once

// Patterson-Sullivan density as a weighted orbit shell, the leaf measures it
// induces on horospheres, Hopf-coordinate samplers for the BMS and BR
// measures on the quotient, and the shadow / friendliness statistics.

#include "horolab/convex_core.hpp"
#include "horolab/random.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

namespace horolab {

struct DensityAtom {
  BoundaryPoint xi;
  double weight = 0.0;
  // o.gamma for the word behind the atom; rebasing reweights by its distance.
  RowVector orbit_point;
};

struct PattersonDensity {
  int dim = 2;
  double exponent = 0.0;
  int word_length = 0;
  // Reference point the weights are measured from.
  RowVector basepoint;
  std::vector<DensityAtom> atoms;

  double total_mass() const;
  // Measure of a boundary cap.
  double mass(const Cap& cell) const;
  // The same density seen from another reference point:
  // weights multiplied by exp(-s (d(p, o.gamma) - d(o, o.gamma))). Not renormalized.
  PattersonDensity rebased(const RowVector& point) const;
};

// Atoms in the directions of o.gamma over all reduced words of length exactly
// `length`, weighted by exp(-exponent d(o, o.gamma)) and normalized to 1.
// Throws invalid_exponent when the shell sums are still growing at
// `exponent` (ratio of consecutive shells above 1.5), which means the
// exponent sits well below the critical one.
PattersonDensity patterson_density(const SchottkyGroup& group, double exponent, int length);

// Largest relative mismatch, over the cells, between nu(cell . gamma) and
// the integral over cell of exp(-s beta_xi(o gamma^{-1}, o)) d nu(xi).
double conformality_residual(const PattersonDensity& density, const LorentzMatrix& gamma,
                             const std::vector<Cap>& cells);

enum class LeafKind { ps, ps_minus, lebesgue };

struct LeafAtom {
  HoroParam t;
  double mass = 0.0;
};

class LeafMeasure {
 public:
  LeafMeasure() = default;
  LeafMeasure(LeafKind kind, LorentzMatrix basepoint, double window, std::vector<LeafAtom> atoms,
              std::size_t skipped = 0);

  LeafKind kind() const { return kind_; }
  const LorentzMatrix& basepoint() const { return basepoint_; }
  double window() const { return window_; }
  // Atoms sorted by sup norm.
  const std::vector<LeafAtom>& atoms() const { return atoms_; }
  std::size_t skipped() const { return skipped_; }
  bool empty() const { return atoms_.empty(); }

  double mass() const { return prefix_.empty() ? 0.0 : prefix_.back(); }
  // Mass of the sup-norm ball of radius r about 0.
  double mass_within(double r) const;
  // Mass of the sup-norm ball of radius r about `center`.
  double mass_within(const HoroParam& center, double r) const;
  double integrate(const std::function<double(const HoroParam&)>& f) const;

  // Flow conjugation: the same atoms seen from a_{-s} g, i.e. t -> e^{-s} t
  // with masses scaled by e^{-k s} (k = exponent for PS, n-1 for Lebesgue;
  // the PS-minus leaf transforms with s -> -s).
  LeafMeasure conjugated(double s, double exponent) const;

 private:
  LeafKind kind_ = LeafKind::ps;
  LorentzMatrix basepoint_;
  double window_ = 0.0;
  std::vector<LeafAtom> atoms_;
  std::vector<double> radius_;
  std::vector<double> prefix_;
  std::size_t skipped_ = 0;
};

// PS leaf on the expanding horosphere through g: each density atom xi is
// pulled back to the t with (u_t g)^+ = xi and weighted by
// exp(s beta_xi(o, footpoint(u_t g))). Atoms outside B_U(window) are dropped;
// xi = g^- is skipped and counted.
LeafMeasure ps_leaf(const PattersonDensity& density, const LorentzMatrix& g, double window);
// Same on the contracting horosphere: (v_t g)^- = xi.
LeafMeasure ps_minus_leaf(const PattersonDensity& density, const LorentzMatrix& g, double window);
// Midpoint grid of step `resolution` on [-window, window]^{n-1}.
LeafMeasure lebesgue_leaf(const LorentzMatrix& g, double window, double resolution);
LeafMeasure leaf_measure(LeafKind kind, const LorentzMatrix& g, double window,
                         const PattersonDensity* density, double resolution = 0.01);

// Normalizing constant of the Lebesgue leaf: exp((n-1) beta) dm_o pulls back
// to c dt on every horosphere with c = 2^{(n-1)/2} / |S^{n-1}|.
double lebesgue_leaf_constant(int dim);

enum class GlobalKind { bms, br };

struct WeightedFrame {
  LorentzMatrix frame;
  double weight = 0.0;
};

struct GlobalSample {
  GlobalKind kind = GlobalKind::bms;
  std::size_t draws = 0;  // accepted and rejected
  double window = 0.0;    // time coordinate drawn from [-window, window]
  std::vector<WeightedFrame> points;

  double total() const;
};

struct SamplerOptions {
  // Half-width of the time window; 0 picks core.radius + 1.
  double window = 0.0;
  // BR only: keep footpoints within this distance of o; 0 picks core.radius + 2.
  double br_radius = 0.0;
  int jobs = 1;
};

// Hopf-coordinate Monte Carlo for the measure restricted to frames with
// footpoint in the fundamental domain, so weights sum to an estimate of the
// total mass on the quotient. The result depends only on (N, seed).
GlobalSample global_sampler(GlobalKind kind, const SchottkyGroup& group, const CoreApproximation& core,
                            const PattersonDensity& density, std::size_t draws, std::uint64_t seed,
                            const SamplerOptions& options = {});

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

Estimate integrate(const GlobalSample& sample, const std::function<double(const LorentzMatrix&)>& f);
double integrate(const LeafMeasure& leaf, const std::function<double(const HoroParam&)>& f);

// Product-structure route to the BMS integral of a function supported in
// the box {u_t a_s v_r m g : |t| <= t_radius, |s|, |r| <= p_radius}: the
// backward endpoint runs over the PS-minus atoms, the time over a midpoint
// rule with `time_nodes` nodes (and the rotation angle over as many nodes for
// n = 3), and the forward side over the PS leaf of each transversal frame.
double product_structure_integral(const PattersonDensity& density, const LorentzMatrix& g,
                                  double t_radius, double p_radius,
                                  const std::function<double(const LorentzMatrix&)>& f,
                                  int time_nodes = 24);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_error = 0.0;  // standard error
  double residual = 0.0;     // root mean square
};

// 0.975 quantile of Student's t with `dof` degrees of freedom.
double student_t975(int dof);

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y,
                 const std::vector<double>& weights = {});

struct ShadowFit {
  LineFit fit;
  std::vector<double> windows;
  std::vector<double> masses;
};

// log mass(B_U(T)) against log T; the leaf must cover the largest T.
ShadowFit shadow_fit(const LeafMeasure& leaf, const std::vector<double>& windows);

struct FriendlinessOptions {
  std::vector<double> scales;         // eta grid; empty picks 10 log-spaced over [0.01, 10]
  std::vector<double> ratios;         // xi / eta grid; empty picks 2^-1 .. 2^-6
  int hyperplanes_per_scale = 20;
  std::size_t min_atoms = 100;
  std::uint64_t seed = 11;
};

struct FriendlinessReport {
  std::vector<double> scales;
  std::vector<double> doubling;       // mass(B(2 eta)) / mass(B(eta))
  double doubling_max = 0.0;
  double decade_spread = 0.0;         // max over decades / min over decades of the per-decade max
  std::vector<double> ratios;
  std::vector<double> decay;          // worst hyperplane-neighbourhood share per ratio
  LineFit decay_fit;                  // slope = alpha
  double alpha = 0.0;
  double alpha_lower95 = 0.0;
  std::vector<double> boundary;       // worst mass(B(eta + xi)) / mass(B(eta)) - 1 per ratio
  LineFit boundary_fit;
  bool low_confidence = false;
};

// Balls are centred at 0, i.e. at the basepoint of the leaf.
FriendlinessReport friendliness_report(const LeafMeasure& leaf, const FriendlinessOptions& options = {});

// Columnar text: a header line `# <kind> dim=<n> window=<T> skipped=<k>`,
// the basepoint matrix row by row, then one atom per row (coordinates, mass),
// with shortest round-trip formatting so re-import is bit-exact.
void write_leaf(std::ostream& out, const LeafMeasure& leaf);
LeafMeasure read_leaf(std::istream& in);
// Rows are the (n+1)^2 frame entries followed by the weight.
void write_sample(std::ostream& out, const GlobalSample& sample);
GlobalSample read_sample(std::istream& in);

std::string format_double(double v);

}  // namespace horolab
