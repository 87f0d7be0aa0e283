#include "horolab/schottky.hpp"

#include "horolab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace horolab {

namespace {

constexpr int kMaxReductionSteps = 4096;

std::string cap_label(int index) {
  std::ostringstream out;
  out << "ball " << index / 2 << (index % 2 == 0 ? "+" : "-");
  return out.str();
}

// Deterministic point set on the unit sphere of R^dim.
std::vector<Vector> sphere_grid(int dim, int count) {
  std::vector<Vector> points;
  points.reserve(count);
  if (dim == 2) {
    for (int i = 0; i < count; ++i) {
      const double a = 2.0 * std::numbers::pi * (i + 0.5) / count;
      Vector v(2);
      v << std::cos(a), std::sin(a);
      points.push_back(v);
    }
  } else if (dim == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / count;
      const double r = std::sqrt(1.0 - z * z);
      Vector v(3);
      v << z, r * std::cos(golden * i), r * std::sin(golden * i);
      points.push_back(v);
    }
  } else {
    std::mt19937_64 rng(0x5eedULL);
    std::normal_distribution<double> normal;
    for (int i = 0; i < count; ++i) {
      Vector v(dim);
      for (int k = 0; k < dim; ++k) v(k) = normal(rng);
      points.push_back(v / v.norm());
    }
  }
  return points;
}

LorentzMatrix pairing_generator(int dim, const Cap& source, const Cap& target, double twist) {
  Vector e0 = Vector::Zero(dim);
  e0(0) = 1.0;
  // Twisting along the last axis keeps the generator axes out of a common
  // plane when n >= 3.
  Vector slide = Vector::Zero(dim);
  slide(dim - 1) = 1.0;
  Matrix half_turn = Matrix::Identity(dim, dim);
  half_turn(0, 0) = -1.0;
  half_turn(1, 1) = -1.0;
  // Right action: leftmost factor acts first. Source cap -> cap about e_0 ->
  // hemisphere -> opposite hemisphere -> slide -> cap about e_0 -> target.
  return spatial_rotation(rotation_taking_axis_to(source.center()).transpose()) *
         boost(dim, e0, -source.depth()) * spatial_rotation(half_turn) * boost(dim, slide, twist) *
         boost(dim, e0, target.depth()) * spatial_rotation(rotation_taking_axis_to(target.center()));
}

BoundaryPoint power_iterate(const LorentzMatrix& g) {
  const int n = g.dim();
  RowVector v = HyperbolicPoint::basepoint(n).lorentz();
  for (int i = 0; i < 400; ++i) {
    v = v * g.entries();
    v /= v.cwiseAbs().maxCoeff();
  }
  // v is now (numerically) on the null cone's attracting ray.
  const double time = 0.70710678118654752440 * (v(0) + v(n));
  const RowVector null = v / time;
  Vector spatial(n);
  spatial(0) = 0.70710678118654752440 * (null(0) - null(n));
  for (int i = 1; i < n; ++i) spatial(i) = null(i);
  return BoundaryPoint::from_ball(spatial / spatial.norm());
}

}  // namespace

bool SchottkyGroup::in_fundamental_domain(const RowVector& x) const {
  return std::none_of(caps_.begin(), caps_.end(), [&](const Cap& c) { return c.side(x) > 0.0; });
}

int SchottkyGroup::reduce_point(RowVector& x, LorentzMatrix* gamma) const {
  int steps = 0;
  if (gamma) *gamma = LorentzMatrix::identity(dim_);
  while (true) {
    int hit = -1;
    for (int l = 0; l < letter_count(); ++l) {
      if (caps_[l].side(x) > 0.0) {
        hit = l;
        break;
      }
    }
    if (hit < 0) return steps;
    const LorentzMatrix& step = letters_[inverse_letter(hit)];
    x = x * step.entries();
    if (gamma) *gamma = *gamma * step;
    if (++steps > kMaxReductionSteps) {
      throw Error(ErrorCode::invalid_state, "fundamental-domain reduction did not terminate");
    }
  }
}

LorentzMatrix SchottkyGroup::reduce_frame(const LorentzMatrix& h, int* steps_out) const {
  Matrix m = h.entries();
  int steps = 0;
  const int n = dim_;
  while (true) {
    const RowVector foot = 0.70710678118654752440 * (m.row(0) + m.row(n));
    int hit = -1;
    for (int l = 0; l < letter_count(); ++l) {
      if (caps_[l].side(foot) > 0.0) {
        hit = l;
        break;
      }
    }
    if (hit < 0) break;
    m = m * letters_[inverse_letter(hit)].entries();
    if (++steps > kMaxReductionSteps) {
      throw Error(ErrorCode::invalid_state, "fundamental-domain reduction did not terminate");
    }
  }
  if (steps_out) *steps_out = steps;
  return LorentzMatrix(std::move(m));
}

bool SchottkyGroup::in_limit_set(const RowVector& xi, int depth) const {
  RowVector v = xi;
  for (int k = 0; k < depth; ++k) {
    int hit = -1;
    for (int l = 0; l < letter_count(); ++l) {
      if (caps_[l].side(v) >= 0.0) {
        hit = l;
        break;
      }
    }
    if (hit < 0) return false;
    v = v * letters_[inverse_letter(hit)].entries();
    v /= v.cwiseAbs().maxCoeff();
  }
  return true;
}

double SchottkyGroup::injectivity_radius(const RowVector& x) const {
  double best = std::numeric_limits<double>::infinity();
  for_each_word(*this, 2, [&](const std::vector<int>& letters, const LorentzMatrix& g) {
    if (letters.empty()) return;
    best = std::min(best, hyp_distance(x, RowVector(x * g.entries())));
  });
  return 0.5 * best;
}

BoundaryPoint SchottkyGroup::attracting_fixed_point(const LorentzMatrix& g) { return power_iterate(g); }

BoundaryPoint SchottkyGroup::repelling_fixed_point(const LorentzMatrix& g) {
  return power_iterate(g.inverse());
}

SchottkyGroup build_schottky(const SchottkyConfig& config) {
  const int n = config.dim;
  if (n < 2 || n > kMaxDim) {
    throw Error(ErrorCode::invalid_config, "dimension must lie in [2, " + std::to_string(kMaxDim) + "]");
  }
  if (config.pairings.empty()) {
    throw Error(ErrorCode::invalid_config, "at least one generator pairing is required");
  }
  SchottkyGroup group;
  group.dim_ = n;

  std::vector<Cap> caps;  // 2i: target of generator i, 2i+1: its source
  for (std::size_t i = 0; i < config.pairings.size(); ++i) {
    const PairingSpec& p = config.pairings[i];
    for (const BallSpec* ball : {&p.target, &p.source}) {
      if (ball->center.size() != n || !(ball->center.norm() > 0.0)) {
        throw Error(ErrorCode::invalid_config,
                    "pairing " + std::to_string(i) + ": ball centre must be a nonzero vector of dimension " +
                        std::to_string(n));
      }
      if (!(ball->radius > 0.0) || !(ball->radius < std::sqrt(2.0))) {
        throw Error(ErrorCode::invalid_config,
                    "pairing " + std::to_string(i) + ": ball radius must lie in (0, sqrt 2)");
      }
      caps.push_back(Cap::from_ball(ball->center, ball->radius));
    }
  }

  group.min_margin_ = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < caps.size(); ++a) {
    for (std::size_t b = a + 1; b < caps.size(); ++b) {
      const double angle =
          std::acos(std::clamp(caps[a].center().dot(caps[b].center()), -1.0, 1.0));
      const double margin = angle - caps[a].angular_radius() - caps[b].angular_radius();
      group.min_margin_ = std::min(group.min_margin_, margin);
      const std::string pair = cap_label(static_cast<int>(a)) + " and " + cap_label(static_cast<int>(b));
      if (margin < -1e-12) {
        throw Error(ErrorCode::invalid_config, pair + " overlap");
      }
      if (margin <= 1e-12) {
        throw Error(ErrorCode::construction_failed, pair + " touch (zero margin)");
      }
    }
  }

  for (std::size_t i = 0; i < config.pairings.size(); ++i) {
    const Cap& target = caps[2 * i];
    const Cap& source = caps[2 * i + 1];
    const LorentzMatrix g = pairing_generator(n, source, target, config.pairings[i].twist);
    group.letters_.push_back(g);
    group.letters_.push_back(g.inverse());
    group.caps_.push_back(target);
    group.caps_.push_back(source);
  }

  for (int l = 0; l < group.letter_count(); ++l) {
    if (lorentz_residual(group.letters_[l]) > 1e-12 * std::max(1.0, group.letters_[l].entries().squaredNorm())) {
      throw Error(ErrorCode::construction_failed, "generator " + std::to_string(l / 2) + " is not an isometry");
    }
  }

  // Ping-pong on a boundary grid: letter l maps the exterior of its source
  // cap into its target cap.
  const auto grid = sphere_grid(n, config.pingpong_grid);
  for (int l = 0; l < group.letter_count(); ++l) {
    const Cap& source = group.caps_[SchottkyGroup::inverse_letter(l)];
    const Cap& target = group.caps_[l];
    for (const Vector& u : grid) {
      const BoundaryPoint xi = BoundaryPoint::from_ball(u);
      if (source.contains(xi)) continue;
      const RowVector image = xi.null() * group.letters_[l].entries();
      const double scale = image.cwiseAbs().maxCoeff();
      if (!target.contains(image, 1e-9 * scale)) {
        throw Error(ErrorCode::construction_failed,
                    "ping-pong violated by generator " + std::to_string(l / 2));
      }
    }
  }

  // Heuristic Zariski density: at least two generators and fixed points of
  // generators and their pairwise products spanning R^{n+1}.
  if (group.rank() >= 2) {
    std::vector<RowVector> fixed;
    std::vector<LorentzMatrix> elements;
    for (int i = 0; i < group.rank(); ++i) elements.push_back(group.letters_[2 * i]);
    for (int i = 0; i < group.rank(); ++i) {
      for (int j = i + 1; j < group.rank(); ++j) elements.push_back(group.letters_[2 * i] * group.letters_[2 * j]);
    }
    for (const auto& e : elements) {
      fixed.push_back(SchottkyGroup::attracting_fixed_point(e).null());
      fixed.push_back(SchottkyGroup::repelling_fixed_point(e).null());
    }
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(fixed.size()), n + 1);
    for (std::size_t i = 0; i < fixed.size(); ++i) rows.row(static_cast<Eigen::Index>(i)) = fixed[i];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > 1e-6 * sv(0)) ++rank;
    }
    group.zariski_dense_ = rank == n + 1;
  }
  return group;
}

SchottkyConfig symmetric_config(int dim, int rank, double radius) {
  SchottkyConfig config;
  config.dim = dim;
  for (int i = 0; i < rank; ++i) {
    Vector c = Vector::Zero(dim);
    if (rank <= dim) {
      c(i) = 1.0;
    } else {
      const double a = std::numbers::pi * i / rank;
      c(0) = std::cos(a);
      c(1) = std::sin(a);
    }
    config.pairings.push_back(PairingSpec{BallSpec{-c, radius}, BallSpec{c, radius}, 0.0});
  }
  return config;
}

std::size_t word_count(int rank, int max_length) {
  std::size_t total = 1;
  std::size_t shell = 2 * static_cast<std::size_t>(rank);
  for (int l = 1; l <= max_length; ++l) {
    total += shell;
    shell *= 2 * static_cast<std::size_t>(rank) - 1;
  }
  return total;
}

void for_each_word(const SchottkyGroup& group, int max_length,
                   const std::function<void(const std::vector<int>&, const LorentzMatrix&)>& visit) {
  if (max_length < 0) {
    throw Error(ErrorCode::invalid_argument, "word length must be nonnegative");
  }
  std::vector<int> letters;
  std::vector<LorentzMatrix> prefix{LorentzMatrix::identity(group.dim())};
  visit(letters, prefix.back());
  if (max_length == 0) return;
  // Explicit DFS; `next` holds the next letter to try at each depth.
  std::vector<int> next{0};
  while (!next.empty()) {
    const std::size_t depth = next.size() - 1;
    int& l = next.back();
    if (l >= group.letter_count()) {
      next.pop_back();
      if (!letters.empty()) {
        letters.pop_back();
        prefix.pop_back();
      }
      continue;
    }
    const int letter = l++;
    if (depth > 0 && letter == SchottkyGroup::inverse_letter(letters.back())) continue;
    letters.push_back(letter);
    prefix.push_back(prefix.back() * group.letter(letter));
    visit(letters, prefix.back());
    if (static_cast<int>(letters.size()) < max_length) {
      next.push_back(0);
    } else {
      letters.pop_back();
      prefix.pop_back();
    }
  }
}

std::vector<Word> enumerate_words(const SchottkyGroup& group, int max_length) {
  std::vector<Word> out;
  out.reserve(word_count(group.rank(), max_length));
  for_each_word(group, max_length, [&](const std::vector<int>& letters, const LorentzMatrix& m) {
    out.push_back(Word{letters, m});
  });
  return out;
}

std::vector<Word> words_of_length(const SchottkyGroup& group, int length) {
  std::vector<Word> out;
  for_each_word(group, length, [&](const std::vector<int>& letters, const LorentzMatrix& m) {
    if (static_cast<int>(letters.size()) == length) out.push_back(Word{letters, m});
  });
  return out;
}

std::vector<BoundaryPoint> limit_set_sample(const SchottkyGroup& group, int length) {
  if (length < 1) {
    throw Error(ErrorCode::invalid_argument, "limit_set_sample needs word length >= 1");
  }
  const HyperbolicPoint o = HyperbolicPoint::basepoint(group.dim());
  std::vector<BoundaryPoint> out;
  for (const Word& w : words_of_length(group, length)) {
    out.push_back(radial_direction(act(o, w.matrix)));
  }
  return out;
}

Cap cylinder(const SchottkyGroup& group, const std::vector<int>& letters) {
  if (letters.empty()) {
    throw Error(ErrorCode::invalid_argument, "cylinder of the empty word");
  }
  Cap cap = group.target_cap(letters.front());
  for (std::size_t i = 1; i < letters.size(); ++i) cap = cap.image(group.letter(letters[i]));
  return cap;
}

namespace {

std::vector<std::vector<double>> shell_distances(const SchottkyGroup& group, int max_length) {
  std::vector<std::vector<double>> shells(max_length + 1);
  const RowVector o = HyperbolicPoint::basepoint(group.dim()).lorentz();
  for_each_word(group, max_length, [&](const std::vector<int>& letters, const LorentzMatrix& m) {
    shells[letters.size()].push_back(hyp_distance(o, RowVector(o * m.entries())));
  });
  return shells;
}

double log_shell_sum(const std::vector<double>& distances, double s) {
  double top = -std::numeric_limits<double>::infinity();
  for (double d : distances) top = std::max(top, -s * d);
  double acc = 0.0;
  for (double d : distances) acc += std::exp(-s * d - top);
  return top + std::log(acc);
}

}  // namespace

std::vector<double> shell_sums(const SchottkyGroup& group, int max_length, double s) {
  const auto shells = shell_distances(group, max_length);
  std::vector<double> out;
  for (const auto& shell : shells) {
    double acc = 0.0;
    for (double d : shell) acc += std::exp(-s * d);
    out.push_back(acc);
  }
  return out;
}

CriticalExponent critical_exponent_estimate(const SchottkyGroup& group, int min_length, int max_length) {
  if (min_length < 2) min_length = 2;
  if (max_length < min_length) {
    throw Error(ErrorCode::invalid_argument, "critical_exponent_estimate: empty length range");
  }
  const auto shells = shell_distances(group, max_length);
  const double upper = group.dim() - 1.0;
  CriticalExponent out;
  for (int length = min_length; length <= max_length; ++length) {
    auto growth = [&](double s) {
      return log_shell_sum(shells[length], s) - log_shell_sum(shells[length - 1], s);
    };
    double lo = 0.0;
    double hi = upper;
    double estimate;
    if (growth(lo) <= 0.0) {
      estimate = 0.0;
    } else if (growth(hi) >= 0.0) {
      estimate = upper;
    } else {
      for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        (growth(mid) > 0.0 ? lo : hi) = mid;
      }
      estimate = 0.5 * (lo + hi);
    }
    out.lengths.push_back(length);
    out.per_length.push_back(estimate);
  }
  out.value = out.per_length.back();
  out.error_band = out.per_length.size() >= 2
                       ? std::abs(out.per_length.back() - out.per_length[out.per_length.size() - 2])
                       : std::numeric_limits<double>::infinity();
  out.low_confidence = max_length < 4 || !(out.error_band < 0.05);
  return out;
}

}  // namespace horolab
