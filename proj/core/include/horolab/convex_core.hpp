#pragma once

// Explicit stand-in for the compact set C_0: a thinned cloud of points on
// geodesics joining limit points, reduced into the fundamental domain F.

#include "horolab/schottky.hpp"

#include <cstdint>
#include <vector>

namespace horolab {

struct CoreOptions {
  int limit_length = 4;       // word length of the limit points joined
  double half_length = 4.0;   // each geodesic is sampled on |s| <= half_length
  double spacing = 0.1;
  int mesh_probes = 400;      // random geodesic points used to measure the mesh
  std::uint64_t seed = 7;
};

struct CoreApproximation {
  std::vector<RowVector> samples;  // all inside F
  double spacing = 0.0;
  // Empirical covering radius of the samples on the core, inflated by 25%.
  double mesh = 0.0;
  // Largest distance between two samples (bounds the diameter of the core
  // in the quotient).
  double diameter = 0.0;
  // Largest distance from o to a sample.
  double radius = 0.0;
  int limit_length = 0;
};

CoreApproximation build_core(const SchottkyGroup& group, const CoreOptions& options = {});

// Distance in the quotient from x to the sampled core. It never
// underestimates the distance to the sample set; relative to the true core
// it is off by at most `mesh`.
double distance_to_core(const SchottkyGroup& group, const CoreApproximation& core, const RowVector& x);
double distance_to_core(const SchottkyGroup& group, const CoreApproximation& core, const LorentzMatrix& frame);

struct DiophantineResult {
  bool compliant = true;
  double violated_at = 0.0;  // first grid value of s failing the bound
  std::vector<double> s_grid;
  std::vector<double> distances;  // d(C_0, a_{-s} x) on the grid
  double max_ratio = 0.0;         // max distance / s over the grid
};

// Checks d(C_0, a_{-s} x) < (1 - epsilon) s for s on [s0, s_max] in steps of
// `step`. Throws precondition_violation when x^- fails `limit_depth` rounds
// of boundary ping-pong.
DiophantineResult diophantine_check(const SchottkyGroup& group, const CoreApproximation& core,
                                    const LorentzMatrix& x, double epsilon, double s0, double s_max,
                                    double step = 0.25, int limit_depth = 8);

}  // namespace horolab
