#pragma once

// Convex-cocompact Schottky subgroups of SO(n,1)° built by ping-pong on
// pairs of boundary caps, with word enumeration, limit-set sampling, the
// Poincare-series critical exponent and the fundamental-domain reduction
// that realizes the quotient X = G / Gamma.

#include "horolab/boundary.hpp"

#include <functional>
#include <string>
#include <vector>

namespace horolab {

// Euclidean ball of the ball model centred on the boundary sphere.
struct BallSpec {
  Vector center;
  double radius = 0.0;
};

// Generator sending the exterior of `source` onto the interior of `target`.
// `twist` slides along the bisecting hyperplane before the final boost; it
// selects one member of the family of such maps.
struct PairingSpec {
  BallSpec source;
  BallSpec target;
  double twist = 0.0;
};

struct SchottkyConfig {
  int dim = 2;
  std::vector<PairingSpec> pairings;
  int pingpong_grid = 1000;
};

struct Word {
  std::vector<int> letters;
  LorentzMatrix matrix;

  std::size_t length() const { return letters.size(); }
};

class SchottkyGroup {
 public:
  int dim() const { return dim_; }
  int rank() const { return static_cast<int>(letters_.size()) / 2; }
  int letter_count() const { return static_cast<int>(letters_.size()); }

  // Letter 2i is generator i, letter 2i+1 its inverse.
  static int inverse_letter(int letter) { return letter ^ 1; }
  const LorentzMatrix& letter(int l) const { return letters_[l]; }
  // Cap (and half-space) that letter l maps the exterior of its source onto.
  const Cap& target_cap(int l) const { return caps_[l]; }
  const std::vector<Cap>& caps() const { return caps_; }

  bool zariski_dense() const { return zariski_dense_; }
  // Smallest angular gap between two caps.
  double min_margin() const { return min_margin_; }

  // Outside every open half-space.
  bool in_fundamental_domain(const RowVector& x) const;

  // Moves x into the fundamental domain by right multiplication; returns the
  // number of letters applied and, when requested, their product.
  int reduce_point(RowVector& x, LorentzMatrix* gamma = nullptr) const;
  // h gamma with footpoint in the fundamental domain.
  LorentzMatrix reduce_frame(const LorentzMatrix& h, int* steps = nullptr) const;

  // xi survives `depth` rounds of boundary ping-pong, i.e. lies in a
  // cylinder of length `depth`. Each round expands rounding error by the
  // translation length of a letter, so in double precision depths beyond
  // about 8 start rejecting genuine limit points.
  bool in_limit_set(const RowVector& xi, int depth) const;

  // Half the shortest displacement of x under the short words; x embeds
  // injectively in the quotient inside this radius.
  double injectivity_radius(const RowVector& x) const;

  // Attracting / repelling fixed points of a hyperbolic element.
  static BoundaryPoint attracting_fixed_point(const LorentzMatrix& g);
  static BoundaryPoint repelling_fixed_point(const LorentzMatrix& g);

 private:
  friend SchottkyGroup build_schottky(const SchottkyConfig& config);

  int dim_ = 2;
  std::vector<LorentzMatrix> letters_;
  std::vector<Cap> caps_;
  bool zariski_dense_ = false;
  double min_margin_ = 0.0;
};

// Throws invalid_config for overlapping balls, construction_failed for zero
// margin or a ping-pong violation on the boundary grid.
SchottkyGroup build_schottky(const SchottkyConfig& config);

// Symmetric example: `rank` antipodal cap pairs spread evenly in the
// (e_0, e_1) plane, all with the same Euclidean radius.
SchottkyConfig symmetric_config(int dim, int rank, double radius);

std::size_t word_count(int rank, int max_length);

// Depth-first over all reduced words of length <= max_length, each exactly
// once, in a fixed order.
void for_each_word(const SchottkyGroup& group, int max_length,
                   const std::function<void(const std::vector<int>&, const LorentzMatrix&)>& visit);
std::vector<Word> enumerate_words(const SchottkyGroup& group, int max_length);
// Reduced words of length exactly `length`.
std::vector<Word> words_of_length(const SchottkyGroup& group, int length);

std::vector<BoundaryPoint> limit_set_sample(const SchottkyGroup& group, int length);

// Combinatorial cylinder of a word: the cap target(l_1) pushed by the rest of
// the word. The orbit point o.w lies over it.
Cap cylinder(const SchottkyGroup& group, const std::vector<int>& letters);

struct CriticalExponent {
  double value = 0.0;
  double error_band = 0.0;
  bool low_confidence = false;
  std::vector<int> lengths;
  std::vector<double> per_length;
};

// Poincare-series transition: for each L the exponent at which the length-L
// shell sum stops growing relative to the length-(L-1) shell.
CriticalExponent critical_exponent_estimate(const SchottkyGroup& group, int min_length, int max_length);

// Shell sum sum_{|w| = L} exp(-s d(o, o w)) for each L in [0, max_length].
std::vector<double> shell_sums(const SchottkyGroup& group, int max_length, double s);

}  // namespace horolab
