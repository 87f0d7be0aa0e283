#pragma once

// Hyperbolic space H^n, its boundary sphere and the frame bundle, in the
// hyperboloid model of lorentz.hpp with a cached Poincare-ball view.
//
// Ball coordinate 0 is the axis of the reference geodesic: the basepoint o
// sits at the origin, w_o^+ = (1, 0, ..., 0) and w_o^- = (-1, 0, ..., 0).

#include "horolab/lorentz.hpp"

#include <optional>

namespace horolab {

class HyperbolicPoint {
 public:
  HyperbolicPoint() = default;

  static HyperbolicPoint from_lorentz(const RowVector& x);
  static HyperbolicPoint from_ball(const Vector& b);
  static HyperbolicPoint basepoint(int dim);

  int dim() const { return static_cast<int>(lorentz_.size()) - 1; }
  const RowVector& lorentz() const { return lorentz_; }
  const Vector& ball() const { return ball_; }

 private:
  HyperbolicPoint(RowVector lorentz, Vector ball)
      : lorentz_(std::move(lorentz)), ball_(std::move(ball)) {}

  RowVector lorentz_;
  Vector ball_;
};

class BoundaryPoint {
 public:
  BoundaryPoint() = default;

  static BoundaryPoint from_ball(const Vector& unit);
  // Any future-pointing isotropic vector; rescaled so that -B(o, null) = 1.
  static BoundaryPoint from_null(const RowVector& null);

  int dim() const { return static_cast<int>(null_.size()) - 1; }
  const Vector& ball() const { return ball_; }
  const RowVector& null() const { return null_; }

 private:
  BoundaryPoint(Vector ball, RowVector null) : ball_(std::move(ball)), null_(std::move(null)) {}

  Vector ball_;
  RowVector null_;
};

// Ball <-> hyperboloid (the Cayley-type isometry between the two models).
RowVector ball_to_lorentz(const Vector& b);
Vector lorentz_to_ball(const RowVector& x);

double hyp_distance(const HyperbolicPoint& x, const HyperbolicPoint& y);
double hyp_distance(const RowVector& x, const RowVector& y);

// beta_xi(x, y) = lim d(x, xi_t) - d(y, xi_t), in closed form.
double busemann(const BoundaryPoint& xi, const HyperbolicPoint& x, const HyperbolicPoint& y);
double busemann(const RowVector& xi, const RowVector& x, const RowVector& y);

// The point of the geodesic (xi, eta) where the Busemann values to xi and eta
// agree; `offset` moves along the geodesic toward xi.
HyperbolicPoint geodesic_point(const BoundaryPoint& xi, const BoundaryPoint& eta, double offset = 0.0);

double gromov_distance(const HyperbolicPoint& x, const BoundaryPoint& xi, const BoundaryPoint& eta);
// Same quantity evaluated through an explicit point y on the geodesic (xi, eta).
double gromov_distance(const HyperbolicPoint& x, const BoundaryPoint& xi, const BoundaryPoint& eta,
                       const HyperbolicPoint& y);

// Euclidean distance of the ball-model representatives.
double ball_distance(const BoundaryPoint& a, const BoundaryPoint& b);

HyperbolicPoint act(const HyperbolicPoint& x, const LorentzMatrix& g);
BoundaryPoint act(const BoundaryPoint& xi, const LorentzMatrix& g);

// Footpoint o g of the frame g.
HyperbolicPoint footpoint(const LorentzMatrix& g);
RowVector footpoint_lorentz(const LorentzMatrix& g);

struct Endpoints {
  BoundaryPoint forward;
  BoundaryPoint backward;
};

Endpoints endpoints(const LorentzMatrix& g);
BoundaryPoint forward_endpoint(const LorentzMatrix& g);
BoundaryPoint backward_endpoint(const LorentzMatrix& g);

// (u_t g)^+
BoundaryPoint horosphere_projection(const LorentzMatrix& g, const HoroParam& t);
// Inverse of horosphere_projection: the t with (u_t g)^+ = xi, or nullopt
// when xi = g^- (the one point the horosphere never reaches).
std::optional<HoroParam> horosphere_chart(const LorentzMatrix& g, const RowVector& xi);
// The t with (v_t g)^- = xi, or nullopt when xi = g^+.
std::optional<HoroParam> contracting_chart(const LorentzMatrix& g, const RowVector& xi);

// Frame with forward endpoint `forward`, backward endpoint `backward` and
// footpoint the point of that geodesic closest to o.
LorentzMatrix frame_from_endpoints(const BoundaryPoint& forward, const BoundaryPoint& backward);

// Radial projection from o of an interior point onto the boundary sphere.
BoundaryPoint radial_direction(const HyperbolicPoint& x);

// Isometries written in ball/Minkowski terms, converted to the right action.
LorentzMatrix boost(int dim, const Vector& unit_direction, double distance);
LorentzMatrix spatial_rotation(const Matrix& rotation);
// A rotation of the ball sending e_0 to `unit`.
Matrix rotation_taking_axis_to(const Vector& unit);

// Closed half-space {x : B(x, normal) >= 0} of H^n together with its
// boundary cap, for a unit spacelike `normal`.
class Cap {
 public:
  Cap() = default;
  explicit Cap(RowVector normal);

  // Cap of the boundary sphere cut out by the Euclidean ball of radius
  // `radius` centred at the unit vector `center`.
  static Cap from_ball(const Vector& center, double radius);

  const RowVector& normal() const { return normal_; }
  // Angular radius as seen from o and the unit centre.
  double angular_radius() const;
  Vector center() const;
  // Hyperbolic distance from o to the bounding hyperplane (signed: positive
  // when o lies outside the half-space).
  double depth() const;

  double side(const RowVector& x) const { return lorentz_pairing(x, normal_); }
  bool contains(const RowVector& x, double slack = 0.0) const { return side(x) > -slack; }
  bool contains(const BoundaryPoint& xi, double slack = 0.0) const { return contains(xi.null(), slack); }
  // Signed distance from an interior point to the bounding hyperplane.
  double signed_distance(const RowVector& x) const;

  // Image of the cap under the right action of g.
  Cap image(const LorentzMatrix& g) const;

 private:
  RowVector normal_;
};

}  // namespace horolab
