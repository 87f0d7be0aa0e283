#include "horolab/convex_core.hpp"

#include "horolab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_set>

namespace horolab {

namespace {

struct CellHash {
  std::size_t operator()(const std::vector<std::int64_t>& key) const {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (auto k : key) h ^= std::hash<std::int64_t>()(k) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

std::vector<std::int64_t> cell_of(const RowVector& x, double cell) {
  std::vector<std::int64_t> key(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) key[i] = static_cast<std::int64_t>(std::floor(x(i) / cell));
  return key;
}

double nearest_sample(const std::vector<RowVector>& samples, const RowVector& x) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : samples) best = std::min(best, hyp_distance(x, c));
  return best;
}

}  // namespace

CoreApproximation build_core(const SchottkyGroup& group, const CoreOptions& options) {
  if (!(options.spacing > 0.0) || !(options.half_length > 0.0) || options.limit_length < 1) {
    throw Error(ErrorCode::invalid_argument, "build_core: bad options");
  }
  const int n = group.dim();
  CoreApproximation core;
  core.spacing = options.spacing;
  core.limit_length = options.limit_length;

  // Euclidean distance in hyperboloid coordinates dominates hyperbolic
  // distance, so one kept point per cell leaves every dropped point within
  // `spacing` of a kept one.
  const double cell = options.spacing / std::sqrt(n + 1.0);
  std::unordered_set<std::vector<std::int64_t>, CellHash> occupied;

  const auto limit = limit_set_sample(group, options.limit_length);
  const int steps = static_cast<int>(std::floor(options.half_length / options.spacing));
  for (std::size_t i = 0; i < limit.size(); ++i) {
    for (std::size_t j = 0; j < limit.size(); ++j) {
      if (i == j) continue;
      const LorentzMatrix frame = frame_from_endpoints(limit[i], limit[j]);
      // Each unordered pair is visited twice with opposite orientation, so
      // one side of the midpoint suffices.
      for (int k = 0; k <= steps; ++k) {
        RowVector x = footpoint_lorentz(make_flow(n, k * options.spacing) * frame);
        group.reduce_point(x);
        if (occupied.insert(cell_of(x, cell)).second) core.samples.push_back(x);
      }
    }
  }

  const RowVector o = HyperbolicPoint::basepoint(n).lorentz();
  for (const auto& c : core.samples) core.radius = std::max(core.radius, hyp_distance(o, c));
  for (std::size_t a = 0; a < core.samples.size(); ++a) {
    for (std::size_t b = a + 1; b < core.samples.size(); ++b) {
      core.diameter = std::max(core.diameter, hyp_distance(core.samples[a], core.samples[b]));
    }
  }

  // Mesh: probe geodesics between deeper limit points at random times.
  const auto fine = limit_set_sample(group, options.limit_length + 2);
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick(0, fine.size() - 1);
  std::uniform_real_distribution<double> time(-options.half_length, options.half_length);
  double worst = options.spacing;
  for (int probe = 0; probe < options.mesh_probes; ++probe) {
    const std::size_t a = pick(rng);
    std::size_t b = pick(rng);
    while (b == a) b = pick(rng);
    RowVector x = footpoint_lorentz(make_flow(n, time(rng)) * frame_from_endpoints(fine[a], fine[b]));
    group.reduce_point(x);
    worst = std::max(worst, distance_to_core(group, core, x));
  }
  core.mesh = 1.25 * worst;
  return core;
}

double distance_to_core(const SchottkyGroup& group, const CoreApproximation& core, const RowVector& point) {
  if (core.samples.empty()) {
    throw Error(ErrorCode::invalid_state, "distance_to_core: empty core approximation");
  }
  RowVector x = point;
  group.reduce_point(x);
  double best = nearest_sample(core.samples, x);
  // Samples seen across a face of F: a neighbouring tile F g_l sits inside
  // the cap of letter l. Only worth checking when that face is closer than
  // the current best.
  for (int l = 0; l < group.letter_count(); ++l) {
    const double face = std::abs(group.target_cap(l).signed_distance(x));
    if (face >= best) continue;
    const Matrix& g = group.letter(l).entries();
    for (const auto& c : core.samples) best = std::min(best, hyp_distance(x, RowVector(c * g)));
  }
  return best;
}

double distance_to_core(const SchottkyGroup& group, const CoreApproximation& core, const LorentzMatrix& frame) {
  return distance_to_core(group, core, footpoint_lorentz(frame));
}

DiophantineResult diophantine_check(const SchottkyGroup& group, const CoreApproximation& core,
                                    const LorentzMatrix& x, double epsilon, double s0, double s_max,
                                    double step, int limit_depth) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "diophantine_check: epsilon must lie in (0, 1)");
  }
  if (!(s0 >= 1.0) || !(s_max >= s0) || !(step > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "diophantine_check: need 1 <= s0 <= s_max and step > 0");
  }
  if (!group.in_limit_set(x.row(group.dim()), limit_depth)) {
    throw Error(ErrorCode::precondition_violation, "backward endpoint of x is not in the limit set");
  }
  DiophantineResult out;
  const int count = static_cast<int>(std::floor((s_max - s0) / step + 1e-9)) + 1;
  for (int i = 0; i < count; ++i) {
    const double s = s0 + i * step;
    const double d = distance_to_core(group, core, make_flow(group.dim(), -s) * x);
    out.s_grid.push_back(s);
    out.distances.push_back(d);
    out.max_ratio = std::max(out.max_ratio, d / s);
    if (out.compliant && !(d < (1.0 - epsilon) * s)) {
      out.compliant = false;
      out.violated_at = s;
    }
  }
  return out;
}

}  // namespace horolab
