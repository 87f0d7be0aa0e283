#include "horolab/densities.hpp"

#include "horolab/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

namespace horolab {

namespace {

constexpr double kPi = 3.14159265358979323846;

RowVector basepoint_row(int dim) { return HyperbolicPoint::basepoint(dim).lorentz(); }

Matrix random_rotation(int size, Stream& stream) {
  if (size == 1) return Matrix::Identity(1, 1);
  if (size == 2) return planar_rotation(stream.uniform(0.0, 2.0 * kPi));
  Matrix a(size, size);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) a(i, j) = stream.normal();
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (int i = 0; i < size; ++i)
    if (r(i, i) < 0) q.col(i) *= -1.0;
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return q;
}

std::vector<double> cumulative(const PattersonDensity& density) {
  std::vector<double> cdf(density.atoms.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < cdf.size(); ++i) cdf[i] = acc += density.atoms[i].weight;
  return cdf;
}

const char* kind_name(LeafKind kind) {
  switch (kind) {
    case LeafKind::ps: return "ps";
    case LeafKind::ps_minus: return "ps-minus";
    case LeafKind::lebesgue: return "lebesgue";
  }
  return "?";
}

}  // namespace

// ---------------------------------------------------------------- density

double PattersonDensity::total_mass() const {
  double acc = 0.0;
  for (const auto& a : atoms) acc += a.weight;
  return acc;
}

double PattersonDensity::mass(const Cap& cell) const {
  double acc = 0.0;
  for (const auto& a : atoms)
    if (cell.contains(a.xi)) acc += a.weight;
  return acc;
}

PattersonDensity PattersonDensity::rebased(const RowVector& point) const {
  PattersonDensity out = *this;
  out.basepoint = point;
  for (auto& a : out.atoms) {
    a.weight *= std::exp(-exponent * (hyp_distance(point, a.orbit_point) - hyp_distance(basepoint, a.orbit_point)));
  }
  return out;
}

PattersonDensity patterson_density(const SchottkyGroup& group, double exponent, int length) {
  if (length < 3) throw Error(ErrorCode::invalid_argument, "density word length must be at least 3");
  if (!(exponent > 0.0) || !std::isfinite(exponent)) {
    throw Error(ErrorCode::invalid_exponent, "exponent must be positive and finite");
  }
  const std::vector<double> shells = shell_sums(group, length, exponent);
  const double growth = shells[length] / shells[length - 1];
  if (growth > 1.5) {
    throw Error(ErrorCode::invalid_exponent,
                "shell sums still growing at exponent " + std::to_string(exponent) + " (ratio " +
                    std::to_string(growth) + ")");
  }
  PattersonDensity out;
  out.dim = group.dim();
  out.exponent = exponent;
  out.word_length = length;
  out.basepoint = basepoint_row(group.dim());
  const auto words = words_of_length(group, length);
  out.atoms.reserve(words.size());
  double total = 0.0;
  for (const auto& w : words) {
    DensityAtom a;
    a.orbit_point = out.basepoint * w.matrix;
    a.xi = radial_direction(HyperbolicPoint::from_lorentz(a.orbit_point));
    a.weight = std::exp(-exponent * hyp_distance(out.basepoint, a.orbit_point));
    total += a.weight;
    out.atoms.push_back(std::move(a));
  }
  for (auto& a : out.atoms) a.weight /= total;
  return out;
}

double conformality_residual(const PattersonDensity& density, const LorentzMatrix& gamma,
                             const std::vector<Cap>& cells) {
  if (cells.empty()) throw Error(ErrorCode::invalid_argument, "no test cells");
  const RowVector moved = density.basepoint * gamma.inverse();
  double worst = 0.0;
  for (const Cap& cell : cells) {
    const Cap image = cell.image(gamma);
    double lhs = 0.0, rhs = 0.0;
    for (const auto& a : density.atoms) {
      if (image.contains(a.xi)) lhs += a.weight;
      if (cell.contains(a.xi)) {
        rhs += a.weight * std::exp(-density.exponent * busemann(a.xi.null(), moved, density.basepoint));
      }
    }
    const double scale = std::max(lhs, rhs);
    if (!(scale > 0.0)) throw Error(ErrorCode::invalid_argument, "test cell carries no mass");
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

// ---------------------------------------------------------------- leaves

LeafMeasure::LeafMeasure(LeafKind kind, LorentzMatrix basepoint, double window, std::vector<LeafAtom> atoms,
                         std::size_t skipped)
    : kind_(kind), basepoint_(std::move(basepoint)), window_(window), atoms_(std::move(atoms)), skipped_(skipped) {
  std::vector<double> r(atoms_.size());
  for (std::size_t i = 0; i < atoms_.size(); ++i) r[i] = sup_norm(atoms_[i].t);
  std::vector<std::size_t> order(atoms_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r[a] < r[b]; });
  std::vector<LeafAtom> sorted;
  sorted.reserve(atoms_.size());
  radius_.reserve(atoms_.size());
  prefix_.reserve(atoms_.size());
  double acc = 0.0;
  for (std::size_t i : order) {
    sorted.push_back(std::move(atoms_[i]));
    radius_.push_back(r[i]);
    prefix_.push_back(acc += sorted.back().mass);
  }
  atoms_ = std::move(sorted);
}

double LeafMeasure::mass_within(double r) const {
  const auto it = std::upper_bound(radius_.begin(), radius_.end(), r);
  return it == radius_.begin() ? 0.0 : prefix_[static_cast<std::size_t>(it - radius_.begin()) - 1];
}

double LeafMeasure::mass_within(const HoroParam& center, double r) const {
  // Only atoms with sup norm <= |center| + r can qualify.
  const auto end = std::upper_bound(radius_.begin(), radius_.end(), sup_norm(center) + r);
  double acc = 0.0;
  for (std::size_t i = 0; i < static_cast<std::size_t>(end - radius_.begin()); ++i) {
    if (sup_norm(HoroParam(atoms_[i].t - center)) <= r) acc += atoms_[i].mass;
  }
  return acc;
}

double LeafMeasure::integrate(const std::function<double(const HoroParam&)>& f) const {
  double acc = 0.0;
  for (const auto& a : atoms_) acc += a.mass * f(a.t);
  return acc;
}

LeafMeasure LeafMeasure::conjugated(double s, double exponent) const {
  const int n = basepoint_.dim();
  const double k = kind_ == LeafKind::lebesgue ? n - 1 : exponent;
  const double shrink = std::exp(-s);
  const double scale = std::exp(-k * s);
  std::vector<LeafAtom> atoms = atoms_;
  for (auto& a : atoms) {
    a.t *= shrink;
    a.mass *= scale;
  }
  const LorentzMatrix g = make_flow(n, kind_ == LeafKind::ps_minus ? s : -s) * basepoint_;
  return LeafMeasure(kind_, g, window_ * shrink, std::move(atoms), skipped_);
}

namespace {

LeafMeasure ps_like_leaf(LeafKind kind, const PattersonDensity& density, const LorentzMatrix& g, double window) {
  if (g.dim() != density.dim) throw Error(ErrorCode::invalid_argument, "leaf and density dimensions differ");
  if (!(window > 0.0)) throw Error(ErrorCode::invalid_argument, "leaf window must be positive");
  const bool expanding = kind == LeafKind::ps;
  std::vector<LeafAtom> atoms;
  std::size_t skipped = 0;
  for (const auto& a : density.atoms) {
    const auto t = expanding ? horosphere_chart(g, a.xi.null()) : contracting_chart(g, a.xi.null());
    if (!t || !t->allFinite()) {
      ++skipped;
      continue;
    }
    if (sup_norm(*t) > window) continue;
    const LorentzMatrix h = (expanding ? make_u(*t) : make_v(*t)) * g;
    const double beta = busemann(a.xi.null(), density.basepoint, footpoint_lorentz(h));
    atoms.push_back({*t, a.weight * std::exp(density.exponent * beta)});
  }
  return LeafMeasure(kind, g, window, std::move(atoms), skipped);
}

}  // namespace

LeafMeasure ps_leaf(const PattersonDensity& density, const LorentzMatrix& g, double window) {
  return ps_like_leaf(LeafKind::ps, density, g, window);
}

LeafMeasure ps_minus_leaf(const PattersonDensity& density, const LorentzMatrix& g, double window) {
  return ps_like_leaf(LeafKind::ps_minus, density, g, window);
}

LeafMeasure lebesgue_leaf(const LorentzMatrix& g, double window, double resolution) {
  if (!(window > 0.0) || !(resolution > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "window and resolution must be positive");
  }
  const int k = g.dim() - 1;
  const long per_axis = std::max(1L, static_cast<long>(std::ceil(2.0 * window / resolution)));
  const double step = 2.0 * window / static_cast<double>(per_axis);
  const double total = std::pow(static_cast<double>(per_axis), k);
  if (total > 5e7) throw Error(ErrorCode::invalid_argument, "Lebesgue grid too fine for this window");
  const double cell = std::pow(step, k);
  std::vector<LeafAtom> atoms;
  atoms.reserve(static_cast<std::size_t>(total));
  std::vector<long> idx(k, 0);
  while (true) {
    HoroParam t(k);
    for (int i = 0; i < k; ++i) t(i) = -window + (static_cast<double>(idx[i]) + 0.5) * step;
    atoms.push_back({t, cell});
    int i = 0;
    while (i < k && ++idx[i] == per_axis) idx[i++] = 0;
    if (i == k) break;
  }
  return LeafMeasure(LeafKind::lebesgue, g, window, std::move(atoms));
}

LeafMeasure leaf_measure(LeafKind kind, const LorentzMatrix& g, double window, const PattersonDensity* density,
                         double resolution) {
  if (kind == LeafKind::lebesgue) return lebesgue_leaf(g, window, resolution);
  if (!density) throw Error(ErrorCode::invalid_argument, "PS leaves need a density");
  return ps_like_leaf(kind, *density, g, window);
}

double lebesgue_leaf_constant(int dim) {
  const double sphere = 2.0 * std::pow(kPi, 0.5 * dim) / std::tgamma(0.5 * dim);
  return std::pow(2.0, 0.5 * (dim - 1)) / sphere;
}

// ---------------------------------------------------------------- samplers

double GlobalSample::total() const {
  double acc = 0.0;
  for (const auto& p : points) acc += p.weight;
  return acc;
}

GlobalSample global_sampler(GlobalKind kind, const SchottkyGroup& group, const CoreApproximation& core,
                            const PattersonDensity& density, std::size_t draws, std::uint64_t seed,
                            const SamplerOptions& options) {
  if (draws < 2) throw Error(ErrorCode::invalid_argument, "need at least two draws");
  if (density.atoms.empty()) throw Error(ErrorCode::invalid_state, "density has no atoms");
  const int n = group.dim();
  const bool bms = kind == GlobalKind::bms;
  const double br_radius = options.br_radius > 0.0 ? options.br_radius : core.radius + 2.0;
  const double window = options.window > 0.0 ? options.window : (bms ? core.radius + 1.0 : br_radius);
  const std::vector<double> cdf = cumulative(density);
  const double nu_total = cdf.back();
  const double delta = density.exponent;
  const double lebesgue_scale = 1.0 / lebesgue_leaf_constant(n);
  const RowVector& o = density.basepoint;
  const double per_draw = 2.0 * window / static_cast<double>(draws);

  const std::size_t blocks = (draws + kBlockSize - 1) / kBlockSize;
  std::vector<std::vector<WeightedFrame>> found(blocks);
  parallel_blocks(draws, seed, options.jobs, [&](std::size_t begin, std::size_t end, Stream& stream) {
    auto& out = found[begin / kBlockSize];
    for (std::size_t k = begin; k < end; ++k) {
      BoundaryPoint forward, backward;
      std::size_t i = 0, j = 0;
      do {
        j = stream.categorical(cdf);
        backward = density.atoms[j].xi;
        if (bms) {
          i = stream.categorical(cdf);
          forward = density.atoms[i].xi;
        } else {
          Vector u(n);
          for (int c = 0; c < n; ++c) u(c) = stream.normal();
          forward = BoundaryPoint::from_ball(u / u.norm());
        }
      } while ((forward.ball() - backward.ball()).norm() < 1e-12);
      const double s = stream.uniform(-window, window);
      LorentzMatrix h = make_flow(n, s) * frame_from_endpoints(forward, backward);
      if (n > 2) h = make_rotation(random_rotation(n - 1, stream)) * h;
      const RowVector foot = footpoint_lorentz(h);
      if (!group.in_fundamental_domain(foot)) continue;
      double weight;
      if (bms) {
        weight = nu_total * nu_total *
                 std::exp(delta * (busemann(forward.null(), o, foot) + busemann(backward.null(), o, foot)));
      } else {
        if (hyp_distance(o, foot) > br_radius) continue;
        weight = nu_total * lebesgue_scale *
                 std::exp((n - 1) * busemann(forward.null(), o, foot) + delta * busemann(backward.null(), o, foot));
      }
      out.push_back({std::move(h), weight * per_draw});
    }
  });
  GlobalSample sample;
  sample.kind = kind;
  sample.draws = draws;
  sample.window = window;
  for (auto& block : found)
    for (auto& p : block) sample.points.push_back(std::move(p));
  return sample;
}

Estimate integrate(const GlobalSample& sample, const std::function<double(const LorentzMatrix&)>& f) {
  const double n = static_cast<double>(sample.draws);
  std::vector<double> values;
  values.reserve(sample.points.size());
  double sum = 0.0;
  for (const auto& p : sample.points) {
    values.push_back(p.weight * f(p.frame));
    sum += values.back();
  }
  // Per-draw contributions are n * weight * f, zero for rejected draws.
  double ss = (n - static_cast<double>(values.size())) * sum * sum / (n * n);
  for (double v : values) {
    const double d = n * v - sum;
    ss += d * d;
  }
  return {sum, std::sqrt(ss / (n - 1.0) / n)};
}

double integrate(const LeafMeasure& leaf, const std::function<double(const HoroParam&)>& f) {
  return leaf.integrate(f);
}

double product_structure_integral(const PattersonDensity& density, const LorentzMatrix& g, double t_radius,
                                  double p_radius, const std::function<double(const LorentzMatrix&)>& f,
                                  int time_nodes) {
  if (!(t_radius > 0.0) || !(p_radius > 0.0) || time_nodes < 1) {
    throw Error(ErrorCode::invalid_argument, "product structure needs positive radii and nodes");
  }
  const int n = g.dim();
  if (n > 3) throw Error(ErrorCode::invalid_argument, "product structure implemented for n <= 3");
  const double ds = 2.0 * p_radius / time_nodes;
  // Haar probability on M = SO(2); only the slice |angle| <= p_radius is visited.
  const int angle_nodes = n == 3 ? time_nodes : 1;
  const double dm = n == 3 ? ds / (2.0 * kPi) : 1.0;
  const double delta = density.exponent;
  const RowVector& o = density.basepoint;
  // p stays near e, so the chart of each forward atom moves by a bounded
  // amount; atoms far out on the horosphere of g can never enter the box.
  std::vector<const DensityAtom*> near;
  const double prefilter = 2.0 * (t_radius + p_radius) + 1.0;
  for (const auto& fwd : density.atoms) {
    const auto t = horosphere_chart(g, fwd.xi.null());
    if (t && sup_norm(*t) <= prefilter) near.push_back(&fwd);
  }
  struct Pulled {
    HoroParam t;
    double mass;
  };
  std::vector<Pulled> pulled;
  double total = 0.0;
  for (const auto& back : density.atoms) {
    const auto r = contracting_chart(g, back.xi.null());
    if (!r || sup_norm(*r) > p_radius) continue;
    const LorentzMatrix vg = make_v(*r) * g;
    const double back_base = back.weight * std::exp(delta * busemann(back.xi.null(), o, footpoint_lorentz(vg)));
    // Leaf of v_r g once; for m a_s v_r g the chart is R e^s t and the
    // cocycle gains s, so the inner sums reuse it.
    pulled.clear();
    for (const DensityAtom* fwd : near) {
      const auto t = horosphere_chart(vg, fwd->xi.null());
      if (!t || sup_norm(*t) > t_radius * std::exp(p_radius) * 1.5) continue;
      const double beta = busemann(fwd->xi.null(), o, footpoint_lorentz(make_u(*t) * vg));
      pulled.push_back({*t, fwd->weight * std::exp(delta * beta)});
    }
    for (int a = 0; a < angle_nodes; ++a) {
      const Matrix rot = n == 3 ? planar_rotation(-p_radius + (a + 0.5) * ds) : Matrix::Identity(1, 1);
      const LorentzMatrix m = make_rotation(rot);
      for (int k = 0; k < time_nodes; ++k) {
        const double s = -p_radius + (k + 0.5) * ds;
        const LorentzMatrix pg = m * make_flow(n, s) * vg;
        // Backward Busemann value drops by s along the flow.
        const double outer = back_base * std::exp(-delta * s) * ds * dm;
        const double grow = std::exp(s);
        double inner = 0.0;
        for (const auto& p : pulled) {
          const HoroParam t = grow * (rot * p.t);
          if (sup_norm(t) > t_radius) continue;
          const double value = f(make_u(t) * pg);
          if (value != 0.0) inner += value * p.mass * std::exp(delta * s);
        }
        total += outer * inner;
      }
    }
  }
  return total;
}

// ---------------------------------------------------------------- fits

double student_t975(int dof) {
  static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
                                 2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086};
  if (dof < 1) return std::numeric_limits<double>::infinity();
  if (dof <= 20) return table[dof - 1];
  // Cornish-Fisher expansion about the normal quantile; under 1e-4 off here.
  const double z = 1.959963984540054, z2 = z * z, v = dof;
  return z + z * (z2 + 1) / (4 * v) + z * ((5 * z2 + 16) * z2 + 3) / (96 * v * v) +
         z * (((3 * z2 + 19) * z2 + 17) * z2 - 15) / (384 * v * v * v);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& weights) {
  const std::size_t m = x.size();
  if (m < 2 || y.size() != m || (!weights.empty() && weights.size() != m)) {
    throw Error(ErrorCode::invalid_argument, "line fit needs matching data with at least two points");
  }
  auto w = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sw += w(i);
    sx += w(i) * x[i];
    sy += w(i) * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += w(i) * (x[i] - mx) * (x[i] - mx);
    sxy += w(i) * (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::invalid_argument, "line fit needs distinct abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0, plain = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    rss += w(i) * r * r;
    plain += r * r;
  }
  fit.residual = std::sqrt(plain / static_cast<double>(m));
  fit.slope_error = m > 2 ? std::sqrt(rss / static_cast<double>(m - 2) / sxx) : 0.0;
  return fit;
}

ShadowFit shadow_fit(const LeafMeasure& leaf, const std::vector<double>& windows) {
  if (windows.size() < 3) throw Error(ErrorCode::invalid_argument, "shadow fit needs at least 3 windows");
  ShadowFit out;
  std::vector<double> lx, ly;
  for (double T : windows) {
    if (!(T > 0.0)) throw Error(ErrorCode::invalid_argument, "windows must be positive");
    if (T > leaf.window() * (1 + 1e-12)) throw Error(ErrorCode::invalid_argument, "window exceeds the leaf");
    const double m = leaf.mass_within(T);
    if (!(m > 0.0)) throw Error(ErrorCode::empty_window, "no leaf mass within " + std::to_string(T));
    out.windows.push_back(T);
    out.masses.push_back(m);
    lx.push_back(std::log(T));
    ly.push_back(std::log(m));
  }
  out.fit = fit_line(lx, ly);
  return out;
}

FriendlinessReport friendliness_report(const LeafMeasure& leaf, const FriendlinessOptions& options) {
  FriendlinessReport rep;
  rep.scales = options.scales;
  if (rep.scales.empty())
    for (int i = 0; i < 10; ++i) rep.scales.push_back(0.01 * std::pow(1000.0, i / 9.0));
  rep.ratios = options.ratios;
  if (rep.ratios.empty())
    for (int i = 1; i <= 6; ++i) rep.ratios.push_back(std::ldexp(1.0, -i));
  if (rep.scales.size() < 2 || rep.ratios.size() < 3) {
    throw Error(ErrorCode::invalid_argument, "friendliness needs at least 2 scales and 3 ratios");
  }
  const int k = leaf.basepoint().dim() - 1;
  const auto& atoms = leaf.atoms();
  Stream stream(options.seed);

  for (double eta : rep.scales) {
    if (2.0 * eta > leaf.window()) rep.low_confidence = true;
    const double inner = leaf.mass_within(eta);
    if (!(inner > 0.0)) throw Error(ErrorCode::empty_window, "empty ball at scale " + std::to_string(eta));
    rep.doubling.push_back(leaf.mass_within(2.0 * eta) / inner);
  }
  rep.doubling_max = *std::max_element(rep.doubling.begin(), rep.doubling.end());
  {
    std::vector<std::pair<int, double>> decades;
    for (std::size_t i = 0; i < rep.scales.size(); ++i) {
      const int d = static_cast<int>(std::floor(std::log10(rep.scales[i]) + 1e-9));
      if (decades.empty() || decades.back().first != d) decades.push_back({d, 0.0});
      decades.back().second = std::max(decades.back().second, rep.doubling[i]);
    }
    double lo = decades.front().second, hi = lo;
    for (const auto& d : decades) {
      lo = std::min(lo, d.second);
      hi = std::max(hi, d.second);
    }
    rep.decade_spread = hi / lo;
  }

  rep.decay.assign(rep.ratios.size(), 0.0);
  rep.boundary.assign(rep.ratios.size(), 0.0);
  for (double eta : rep.scales) {
    // Atoms inside B(eta); the prefix is sorted by sup norm.
    std::vector<const LeafAtom*> ball;
    for (const auto& a : atoms) {
      if (sup_norm(a.t) > eta) break;
      ball.push_back(&a);
    }
    if (ball.size() < options.min_atoms) rep.low_confidence = true;
    const double ball_mass = leaf.mass_within(eta);
    for (int h = 0; h < options.hyperplanes_per_scale; ++h) {
      const HoroParam anchor = ball[static_cast<std::size_t>(stream.uniform() * ball.size()) % ball.size()]->t;
      HoroParam normal = HoroParam::Zero(k);
      if (h % 2 == 0 || k == 1) {
        normal(h / 2 % k) = 1.0;
      } else {
        for (int c = 0; c < k; ++c) normal(c) = stream.normal();
        normal /= normal.norm();
      }
      std::vector<double> offsets;
      offsets.reserve(ball.size());
      for (const auto* a : ball) offsets.push_back(std::abs(normal.dot(a->t - anchor)));
      for (std::size_t r = 0; r < rep.ratios.size(); ++r) {
        const double width = rep.ratios[r] * eta;
        double slab = 0.0;
        for (std::size_t i = 0; i < ball.size(); ++i)
          if (offsets[i] <= width) slab += ball[i]->mass;
        rep.decay[r] = std::max(rep.decay[r], slab / ball_mass);
      }
    }
    for (std::size_t r = 0; r < rep.ratios.size(); ++r) {
      rep.boundary[r] = std::max(rep.boundary[r], leaf.mass_within(eta * (1.0 + rep.ratios[r])) / ball_mass - 1.0);
    }
  }

  auto log_fit = [&](const std::vector<double>& values, LineFit& fit) {
    std::vector<double> lx, ly;
    for (std::size_t r = 0; r < rep.ratios.size(); ++r) {
      if (values[r] > 0.0) {
        lx.push_back(std::log(rep.ratios[r]));
        ly.push_back(std::log(values[r]));
      }
    }
    if (lx.size() < 3) {
      rep.low_confidence = true;
      return false;
    }
    fit = fit_line(lx, ly);
    return true;
  };
  if (log_fit(rep.decay, rep.decay_fit)) {
    rep.alpha = rep.decay_fit.slope;
    const int dof = static_cast<int>(rep.ratios.size()) - 2;
    rep.alpha_lower95 = rep.alpha - student_t975(dof) * rep.decay_fit.slope_error;
  }
  log_fit(rep.boundary, rep.boundary_fit);
  return rep;
}

// ---------------------------------------------------------------- text I/O

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& token) {
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw Error(ErrorCode::io_error, "malformed number '" + token + "'");
  }
  return v;
}

std::vector<double> read_row(std::istream& in, std::size_t expected) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::vector<double> row;
    std::string tok;
    while (ss >> tok) row.push_back(parse_double(tok));
    if (expected && row.size() != expected) {
      throw Error(ErrorCode::io_error, "expected " + std::to_string(expected) + " columns, got " +
                                           std::to_string(row.size()));
    }
    return row;
  }
  return {};
}

std::string header_value(const std::string& header, const std::string& key) {
  const auto pos = header.find(" " + key + "=");
  if (pos == std::string::npos) throw Error(ErrorCode::io_error, "header lacks " + key);
  const auto start = pos + key.size() + 2;
  return header.substr(start, header.find(' ', start) - start);
}

void write_matrix(std::ostream& out, const LorentzMatrix& g) {
  for (int r = 0; r <= g.dim(); ++r) {
    for (int c = 0; c <= g.dim(); ++c) out << (c ? "\t" : "") << format_double(g(r, c));
    out << '\n';
  }
}

LorentzMatrix read_matrix(std::istream& in, int dim) {
  Matrix m(dim + 1, dim + 1);
  for (int r = 0; r <= dim; ++r) {
    const auto row = read_row(in, dim + 1);
    if (row.empty()) throw Error(ErrorCode::io_error, "truncated basepoint matrix");
    for (int c = 0; c <= dim; ++c) m(r, c) = row[c];
  }
  return LorentzMatrix(std::move(m));
}

}  // namespace

void write_leaf(std::ostream& out, const LeafMeasure& leaf) {
  const int n = leaf.basepoint().dim();
  out << "# leaf kind=" << kind_name(leaf.kind()) << " dim=" << n << " window=" << format_double(leaf.window())
      << " skipped=" << leaf.skipped() << " atoms=" << leaf.atoms().size() << '\n';
  write_matrix(out, leaf.basepoint());
  out << "#";
  for (int i = 1; i < n; ++i) out << " t" << i;
  out << " mass\n";
  for (const auto& a : leaf.atoms()) {
    for (int i = 0; i < n - 1; ++i) out << format_double(a.t(i)) << '\t';
    out << format_double(a.mass) << '\n';
  }
  if (!out) throw Error(ErrorCode::io_error, "write failed");
}

LeafMeasure read_leaf(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || header.rfind("# leaf ", 0) != 0) {
    throw Error(ErrorCode::io_error, "not a leaf table");
  }
  const std::string kind_s = header_value(header, "kind");
  LeafKind kind;
  if (kind_s == "ps") kind = LeafKind::ps;
  else if (kind_s == "ps-minus") kind = LeafKind::ps_minus;
  else if (kind_s == "lebesgue") kind = LeafKind::lebesgue;
  else throw Error(ErrorCode::io_error, "unknown leaf kind " + kind_s);
  const int n = std::stoi(header_value(header, "dim"));
  const double window = parse_double(header_value(header, "window"));
  const std::size_t skipped = std::stoul(header_value(header, "skipped"));
  const std::size_t count = std::stoul(header_value(header, "atoms"));
  LorentzMatrix g = read_matrix(in, n);
  std::vector<LeafAtom> atoms;
  atoms.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto row = read_row(in, n);
    if (row.empty()) throw Error(ErrorCode::io_error, "truncated leaf table");
    LeafAtom a;
    a.t = HoroParam(n - 1);
    for (int c = 0; c < n - 1; ++c) a.t(c) = row[c];
    a.mass = row[n - 1];
    atoms.push_back(std::move(a));
  }
  return LeafMeasure(kind, std::move(g), window, std::move(atoms), skipped);
}

void write_sample(std::ostream& out, const GlobalSample& sample) {
  const int n = sample.points.empty() ? 0 : sample.points.front().frame.dim();
  out << "# sample kind=" << (sample.kind == GlobalKind::bms ? "bms" : "br") << " dim=" << n
      << " draws=" << sample.draws << " window=" << format_double(sample.window)
      << " points=" << sample.points.size() << '\n';
  for (const auto& p : sample.points) {
    for (int r = 0; r <= n; ++r)
      for (int c = 0; c <= n; ++c) out << format_double(p.frame(r, c)) << '\t';
    out << format_double(p.weight) << '\n';
  }
  if (!out) throw Error(ErrorCode::io_error, "write failed");
}

GlobalSample read_sample(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || header.rfind("# sample ", 0) != 0) {
    throw Error(ErrorCode::io_error, "not a sample table");
  }
  GlobalSample s;
  s.kind = header_value(header, "kind") == "br" ? GlobalKind::br : GlobalKind::bms;
  const int n = std::stoi(header_value(header, "dim"));
  s.draws = std::stoul(header_value(header, "draws"));
  s.window = parse_double(header_value(header, "window"));
  const std::size_t count = std::stoul(header_value(header, "points"));
  const std::size_t cols = static_cast<std::size_t>((n + 1) * (n + 1) + 1);
  for (std::size_t i = 0; i < count; ++i) {
    const auto row = read_row(in, cols);
    if (row.empty()) throw Error(ErrorCode::io_error, "truncated sample table");
    Matrix m(n + 1, n + 1);
    for (int r = 0; r <= n; ++r)
      for (int c = 0; c <= n; ++c) m(r, c) = row[static_cast<std::size_t>(r * (n + 1) + c)];
    s.points.push_back({LorentzMatrix(std::move(m)), row.back()});
  }
  return s;
}

}  // namespace horolab
