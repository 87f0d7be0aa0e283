#include "horolab/equidistribution.hpp"

#include "horolab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace horolab {

namespace {

// Polynomial on [-1, 1] by ascending coefficients.
using Poly = std::vector<double>;

Poly profile_poly(int smoothness) {
  // (1 - x^2)^(l+1) = sum_k C(l+1, k) (-1)^k x^{2k}
  const int m = smoothness + 1;
  Poly p(2 * m + 1, 0.0);
  double binom = 1.0;
  for (int k = 0; k <= m; ++k) {
    p[2 * k] = (k % 2 ? -1.0 : 1.0) * binom;
    binom = binom * (m - k) / (k + 1);
  }
  return p;
}

Poly derivative(const Poly& p) {
  if (p.size() <= 1) return {0.0};
  Poly d(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * static_cast<double>(i);
  return d;
}

double coefficient_bound(const Poly& p) {
  double acc = 0.0;
  for (double c : p) acc += std::abs(c);
  return acc;
}

double l2_norm(const Poly& p) {
  // integral over [-1, 1] of p^2, exactly.
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j)
      if ((i + j) % 2 == 0) acc += p[i] * p[j] * 2.0 / static_cast<double>(i + j + 1);
  return std::sqrt(acc);
}

// Sum over multi-indices of total order <= l of the product of per-axis
// factors factor[axis][order].
double multi_index_sum(const std::vector<std::vector<double>>& factor, int l) {
  std::vector<double> acc(l + 1, 0.0);
  acc[0] = 1.0;
  for (const auto& f : factor) {
    std::vector<double> next(l + 1, 0.0);
    for (int a = 0; a <= l; ++a)
      for (int b = 0; a + b <= l; ++b) next[a + b] += acc[a] * f[b];
    acc = std::move(next);
  }
  double total = 0.0;
  for (double v : acc) total += v;
  return total;
}

double rotation_angle(const Matrix& rotation) {
  const auto k = rotation.rows();
  if (k < 2) return 0.0;
  const double c = (rotation.trace() - static_cast<double>(k - 2)) / 2.0;
  return std::acos(std::clamp(c, -1.0, 1.0));
}

// Calls visit(t, weight) on the midpoint grid of [-radius, radius]^k.
template <class Visit>
std::size_t for_each_grid_point(int k, double radius, double step, Visit visit) {
  const long per_axis = std::max(1L, static_cast<long>(std::ceil(2.0 * radius / step)));
  const double h = 2.0 * radius / static_cast<double>(per_axis);
  if (std::pow(static_cast<double>(per_axis), k) > 5e8) {
    throw Error(ErrorCode::invalid_argument, "integration grid too fine for this dimension");
  }
  const double cell = std::pow(h, k);
  std::vector<long> idx(k, 0);
  std::size_t count = 0;
  HoroParam t(k);
  while (true) {
    for (int i = 0; i < k; ++i) t(i) = -radius + (static_cast<double>(idx[i]) + 0.5) * h;
    visit(t, cell);
    ++count;
    int i = 0;
    while (i < k && ++idx[i] == per_axis) idx[i++] = 0;
    if (i == k) break;
  }
  return count;
}

}  // namespace

double bump_profile(double x, int smoothness) {
  if (std::abs(x) >= 1.0) return 0.0;
  return std::pow(1.0 - x * x, smoothness + 1);
}

std::optional<BoxCoordinates> box_coordinates(const Box& box, const LorentzMatrix& h) {
  try {
    const PUDecomposition d = decompose_up(h * box.center.inverse());
    BoxCoordinates c;
    c.t = d.t;
    c.s = d.p.s;
    c.r = d.p.r;
    c.angle = rotation_angle(d.p.rotation);
    if (!c.t.allFinite() || !c.r.allFinite() || !std::isfinite(c.s)) return std::nullopt;
    return c;
  } catch (const Error&) {
    return std::nullopt;
  }
}

double box_reach(const Box& box) {
  const int n = box.center.dim();
  const int k = n - 1;
  const RowVector c = footpoint_lorentz(box.center);
  const double levels[] = {-1.0, 0.0, 1.0};
  double reach = 0.0;
  // Grid over three levels per coordinate; m contributes nothing to the
  // footpoint, so only t, s, r are scanned.
  const int coords = 2 * k + 1;
  std::vector<int> idx(coords, 0);
  while (true) {
    HoroParam t(k), r(k);
    for (int i = 0; i < k; ++i) {
      t(i) = levels[idx[i]] * box.t_radius;
      r(i) = levels[idx[k + i]] * box.p_radius;
    }
    const double s = levels[idx[2 * k]] * box.p_radius;
    const LorentzMatrix h = make_u(t) * make_flow(n, s) * make_v(r) * box.center;
    reach = std::max(reach, hyp_distance(c, footpoint_lorentz(h)));
    int i = 0;
    while (i < coords && ++idx[i] == 3) idx[i++] = 0;
    if (i == coords) break;
  }
  return reach;
}

namespace {

void check_admissible(const SchottkyGroup& group, const Box& box, double reach) {
  const RowVector c = footpoint_lorentz(box.center);
  double clearance = std::numeric_limits<double>::infinity();
  for (const Cap& cap : group.caps()) clearance = std::min(clearance, -cap.signed_distance(c));
  if (!(clearance > reach)) {
    throw Error(ErrorCode::invalid_box, "box footprint (reach " + std::to_string(reach) +
                                            ") leaves the fundamental domain (clearance " +
                                            std::to_string(clearance) + ")");
  }
  const double inj = group.injectivity_radius(c);
  if (!(inj > reach)) {
    throw Error(ErrorCode::invalid_box, "box footprint (reach " + std::to_string(reach) +
                                            ") exceeds the injectivity radius " + std::to_string(inj));
  }
}

double box_value(const Box& box, const BoxCoordinates& c, int smoothness) {
  double v = 1.0;
  for (Eigen::Index i = 0; i < c.t.size(); ++i) v *= bump_profile(c.t(i) / box.t_radius, smoothness);
  if (v == 0.0) return 0.0;
  v *= bump_profile(c.s / box.p_radius, smoothness);
  for (Eigen::Index i = 0; i < c.r.size(); ++i) v *= bump_profile(c.r(i) / box.p_radius, smoothness);
  if (box.center.dim() >= 3) v *= bump_profile(c.angle / box.p_radius, smoothness);
  return v;
}

}  // namespace

TestFunction make_bump(const SchottkyGroup& group, const std::vector<Box>& boxes, int smoothness, double peak) {
  if (boxes.empty()) throw Error(ErrorCode::invalid_argument, "test function needs at least one box");
  if (smoothness < 0 || !(peak > 0.0)) throw Error(ErrorCode::invalid_argument, "peak must be positive");
  TestFunction f;
  f.group_ = &group;
  f.boxes_ = boxes;
  f.smoothness_ = smoothness;
  f.peak_ = peak;

  // Per-axis derivative norms of the profile on [-1, 1].
  const Poly base = profile_poly(smoothness);
  std::vector<double> sup_norms, l2_norms;
  Poly p = base;
  for (int j = 0; j <= smoothness; ++j) {
    sup_norms.push_back(coefficient_bound(p));
    l2_norms.push_back(l2_norm(p));
    p = derivative(p);
  }

  for (const Box& box : boxes) {
    const int n = box.center.dim();
    if (n != group.dim()) throw Error(ErrorCode::invalid_argument, "box and group dimensions differ");
    if (!(box.t_radius > 0.0) || !(box.p_radius > 0.0)) {
      throw Error(ErrorCode::invalid_box, "box radii must be positive");
    }
    const double reach = box_reach(box) * 1.05;
    check_admissible(group, box, reach);
    f.reach_.push_back(reach);
    f.feet_.push_back(footpoint_lorentz(box.center));

    std::vector<double> radii;
    for (int i = 0; i < n - 1; ++i) radii.push_back(box.t_radius);
    for (int i = 0; i < n; ++i) radii.push_back(box.p_radius);  // s and r
    if (n >= 3) radii.push_back(box.p_radius);                 // angle of m
    std::vector<std::vector<double>> sup_factor, l2_factor;
    for (double eta : radii) {
      std::vector<double> a, b;
      for (int j = 0; j <= smoothness; ++j) {
        a.push_back(sup_norms[j] * std::pow(eta, -j));
        b.push_back(l2_norms[j] * std::pow(eta, 0.5 - j));
      }
      sup_factor.push_back(std::move(a));
      l2_factor.push_back(std::move(b));
    }
    f.sobolev_sup_ += peak * multi_index_sum(sup_factor, smoothness);
    f.sobolev_l2_ += peak * multi_index_sum(l2_factor, smoothness);
  }
  return f;
}

TestFunction make_bump(const SchottkyGroup& group, const Box& box, int smoothness, double peak) {
  return make_bump(group, std::vector<Box>{box}, smoothness, peak);
}

std::vector<Box> ring_boxes(int dim, int count, double t_radius, double p_radius) {
  if (count < 1) throw Error(ErrorCode::invalid_argument, "ring needs at least one box");
  std::vector<Box> boxes;
  for (int k = 0; k < count; ++k) {
    const double angle = 2.0 * 3.14159265358979323846 * k / count;
    Vector u = Vector::Zero(dim);
    u(0) = std::cos(angle);
    u(1) = std::sin(angle);
    boxes.push_back({spatial_rotation(rotation_taking_axis_to(u)), t_radius, p_radius});
  }
  return boxes;
}

double TestFunction::finest_t_radius() const {
  double r = boxes_.front().t_radius;
  for (const auto& b : boxes_) r = std::min(r, b.t_radius);
  return r;
}

double TestFunction::lift(const LorentzMatrix& h) const {
  const RowVector foot = footpoint_lorentz(h);
  double v = 0.0;
  for (std::size_t i = 0; i < boxes_.size(); ++i) {
    if (hyp_distance(feet_[i], foot) > reach_[i]) continue;
    const auto c = box_coordinates(boxes_[i], h);
    if (c) v += box_value(boxes_[i], *c, smoothness_);
  }
  return peak_ * v;
}

double TestFunction::operator()(const LorentzMatrix& h) const { return lift(group_->reduce_frame(h)); }

double HoroBump::operator()(const HoroParam& t) const {
  double v = 1.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) v *= bump_profile(t(i) / radius, smoothness);
  return v;
}

WindowAverage window_average(WindowKind kind, const LorentzMatrix& x, double T, const TestFunction& psi,
                             const PattersonDensity& density, double resolution) {
  const LeafMeasure leaf = ps_leaf(density, x, T);
  WindowAverage out;
  out.ps_mass = leaf.mass();
  if (!(out.ps_mass > 0.0)) throw Error(ErrorCode::empty_window, "no PS mass in B_U(" + std::to_string(T) + ")");
  if (kind == WindowKind::ps) {
    for (const auto& a : leaf.atoms()) out.numerator += a.mass * psi(make_u(a.t) * x);
    out.evaluations = leaf.atoms().size();
  } else {
    double acc = 0.0;
    out.evaluations = for_each_grid_point(x.dim() - 1, T, resolution, [&](const HoroParam& t, double cell) {
      acc += cell * psi(make_u(t) * x);
    });
    out.numerator = acc;
  }
  out.value = out.numerator / out.ps_mass;
  return out;
}

double translate_step(const TestFunction& psi, double s) {
  return 0.05 * psi.finest_t_radius() * std::exp(-std::max(0.0, s));
}

double translate_integral(WindowKind kind, const LorentzMatrix& x, double s, const HoroBump& f,
                          const TestFunction& psi, const PattersonDensity& density) {
  if (!(f.radius > 0.0) || !(f.radius < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "translate weight must live in B_U(r) with r < 1");
  }
  const int n = x.dim();
  const LorentzMatrix flow = make_flow(n, s);
  if (kind == WindowKind::ps) {
    const LeafMeasure leaf = ps_leaf(density, x, f.radius);
    double acc = 0.0;
    for (const auto& a : leaf.atoms()) {
      const double w = f(a.t);
      if (w != 0.0) acc += a.mass * w * psi(flow * make_u(a.t) * x);
    }
    return acc;
  }
  double acc = 0.0;
  for_each_grid_point(n - 1, f.radius, translate_step(psi, s), [&](const HoroParam& t, double cell) {
    const double w = f(t);
    if (w != 0.0) acc += cell * w * psi(flow * make_u(t) * x);
  });
  return std::exp((n - 1 - density.exponent) * s) * acc;
}

std::vector<Correlation> mixing_correlation(const GlobalSample& sample, const std::vector<double>& s_grid,
                                            const TestFunction& psi, const TestFunction& phi) {
  const double total = sample.total();
  if (!(total > 0.0)) throw Error(ErrorCode::empty_window, "BMS sample carries no mass");
  const double m_psi = integrate(sample, [&](const LorentzMatrix& h) { return psi(h); }).value;
  const double m_phi = integrate(sample, [&](const LorentzMatrix& h) { return phi(h); }).value;
  std::vector<Correlation> out;
  for (double s : s_grid) {
    const LorentzMatrix flow = make_flow(psi.box().center.dim(), s);
    const Estimate joint = integrate(sample, [&](const LorentzMatrix& h) {
      const double b = phi(h);
      return b == 0.0 ? 0.0 : b * psi(flow * h);
    });
    out.push_back({s, joint.value / total - m_psi * m_phi / (total * total), joint.std_error / total});
  }
  return out;
}

double Polynomial::operator()(const HoroParam& t) const {
  double v = constant;
  if (linear.size()) v += linear.dot(t);
  if (quadratic.size()) v += t.dot(quadratic * t);
  return v;
}

GoodFunctionResult good_function_check(const LeafMeasure& leaf, const Polynomial& f, const HoroParam& center,
                                       double radius, const std::vector<double>& epsilons) {
  if (!(radius > 0.0) || epsilons.empty()) throw Error(ErrorCode::invalid_argument, "need a ball and epsilons");
  std::vector<std::pair<double, double>> inside;  // |f|, mass
  double ball = 0.0;
  for (const auto& a : leaf.atoms()) {
    if (sup_norm(HoroParam(a.t - center)) > radius) continue;
    inside.push_back({std::abs(f(a.t)), a.mass});
    ball += a.mass;
  }
  if (!(ball > 0.0)) throw Error(ErrorCode::empty_window, "ball carries no leaf mass");
  GoodFunctionResult out;
  for (const auto& p : inside) out.sup = std::max(out.sup, p.first);
  if (!(out.sup > 0.0)) throw Error(ErrorCode::invalid_argument, "polynomial vanishes on the ball");
  out.epsilons = epsilons;
  std::vector<double> lx, ly;
  for (double eps : epsilons) {
    double m = 0.0;
    for (const auto& p : inside)
      if (p.first < eps * out.sup) m += p.second;
    out.masses.push_back(m / ball);
    if (m > 0.0) {
      lx.push_back(std::log(eps));
      ly.push_back(std::log(m / ball));
    }
  }
  std::vector<double> distinct = ly;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (lx.size() < 3 || distinct.size() < 3) {
    out.degenerate = true;
    return out;
  }
  const LineFit fit = fit_line(lx, ly);
  out.beta = fit.slope;
  out.band = student_t975(static_cast<int>(lx.size()) - 2) * fit.slope_error;
  return out;
}

std::vector<double> nondivergence_profile(const SchottkyGroup& group, const CoreApproximation& core,
                                          const PattersonDensity& density, const LorentzMatrix& x, double T,
                                          double s, const std::vector<double>& depths) {
  if (!(s >= 1.0) || !(T > 0.0)) throw Error(ErrorCode::invalid_argument, "need T > 0 and s >= 1");
  const LorentzMatrix y = make_flow(x.dim(), -std::log(s)) * x;
  const LeafMeasure leaf = ps_leaf(density, y, T / s);
  std::vector<double> distance;
  distance.reserve(leaf.atoms().size());
  for (const auto& a : leaf.atoms()) distance.push_back(distance_to_core(group, core, make_u(a.t) * y));
  std::vector<double> out;
  for (double R : depths) {
    double acc = 0.0;
    for (std::size_t i = 0; i < distance.size(); ++i) {
      if (distance[i] > R - core.mesh) acc += leaf.atoms()[i].mass;
    }
    out.push_back(acc);
  }
  return out;
}

double nondivergence_mass(const SchottkyGroup& group, const CoreApproximation& core,
                          const PattersonDensity& density, const LorentzMatrix& x, double T, double s, double R) {
  return nondivergence_profile(group, core, density, x, T, s, {R}).front();
}

RateFit fit_rate(RateModel model, const std::vector<double>& x, const std::vector<double>& y,
                 const std::vector<double>& std_errors) {
  if (x.size() != y.size() || (!std_errors.empty() && std_errors.size() != x.size())) {
    throw Error(ErrorCode::invalid_argument, "rate fit columns differ in length");
  }
  RateFit out;
  out.model = model;
  std::vector<double> lx, ly, w;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (model == RateModel::power && !(x[i] > 0.0)) {
      throw Error(ErrorCode::invalid_argument, "power-law fits need positive abscissae");
    }
    if (!(y[i] > 0.0)) out.absolute_values = true;
    const double a = std::abs(y[i]);
    if (!(a > 0.0)) continue;
    lx.push_back(model == RateModel::power ? std::log(x[i]) : x[i]);
    ly.push_back(std::log(a));
    if (!std_errors.empty()) {
      const double rel = std_errors[i] / a;
      w.push_back(rel > 0.0 ? 1.0 / (rel * rel) : 1.0);
    }
  }
  if (lx.size() < 3) throw Error(ErrorCode::invalid_argument, "rate fit needs at least 3 usable points");
  if (!w.empty()) {
    // Relative weights; the residual scatter sets the band.
    const double top = *std::max_element(w.begin(), w.end());
    for (double& v : w) v /= top;
  }
  const LineFit fit = fit_line(lx, ly, w);
  out.kappa = -fit.slope;
  out.prefactor = std::exp(fit.intercept);
  out.residual = fit.residual;
  out.band = student_t975(static_cast<int>(lx.size()) - 2) * fit.slope_error;
  out.points = lx.size();
  return out;
}

int count_inversions(const std::vector<double>& values) {
  int count = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[i - 1]) ++count;
  return count;
}

}  // namespace horolab
