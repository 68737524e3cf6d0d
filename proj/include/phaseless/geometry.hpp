#pragma once

#include <utility>

#include "phaseless/vec.hpp"

namespace phaseless {

/// Cross-section of the ball |x| < B by the plane x3 = a.
struct SliceGeometry {
  double B{1.0};       ///< sphere radius
  double a{0.0};       ///< slice height, |a| < B
  double radius{1.0};  ///< radius B_a of the circle S_a

  Vec3 center() const { return {0.0, 0.0, a}; }
};

/// Build the slice geometry; throws ValidationError unless B > 0 and |a| < B.
SliceGeometry slice_geometry(double B, double a);

/// In-plane unit normal n(alpha) = (cos alpha, sin alpha, 0).
Vec3 radon_normal(double alpha);

/// Wrap an angle into (0, 2pi].
double wrap_angle(double alpha);

/// One source/detector pair on S_a and its Radon coordinates.
///
/// alpha lies in (0, 2pi], |s| < B_a. The ordered pair (x, x0) produced by
/// pair_from_chord for (alpha, s) is the reverse of the pair for
/// (alpha + pi, -s).
struct Chord {
  double alpha{0.0};
  double s{0.0};
  Vec3 x;
  Vec3 x0;
  double length{0.0};
};

/// Radon coordinates of the line through x and x0 (both on S_a).
///
/// The normal points away from 0_a, so s >= 0; when the line passes through
/// 0_a the normal is taken with alpha in (0, pi]. The endpoints are stored as
/// given.
Chord chord_from_pair(SliceGeometry const& g, Vec3 const& x, Vec3 const& x0);

/// Endpoints (x, x0) of the chord with coordinates (alpha, s). x0 is the
/// endpoint with the larger angular position measured counterclockwise from
/// n(alpha).
std::pair<Vec3, Vec3> pair_from_chord(SliceGeometry const& g, double alpha, double s);

/// Convenience: the full Chord record for grid coordinates (alpha, s).
Chord make_chord(SliceGeometry const& g, double alpha, double s);

/// x0 + z (x - x0).
Vec3 chord_point(Chord const& c, double z);

/// ν(θ, φ) = (sinθ cosφ, sinθ sinφ, cosθ).
Vec3 unit_direction(double theta, double phi);

/// Frame attached to the focal pair of the ellipsoids E(x, x0, t).
///
/// Row 3 of A is the unit vector from x0 to x; rows 1 and 2 span the
/// transverse plane, row 1 lying in the plane of the ξ3 axis and the focal
/// axis.
struct EllipsoidFrame {
  Vec3 x0;
  Vec3 x;
  double rho{0.0};
  double theta_hat{0.0};
  double psi{0.0};
  Mat3 A{};
};

EllipsoidFrame ellipsoid_frame(Vec3 const& x, Vec3 const& x0);

/// Rotation matrix A(ϑ, ψ).
Mat3 frame_matrix(double theta_hat, double psi);

/// Point ξ(z, φ) on E(x, x0, t), t > ρ. z = 1 is the vertex beyond x,
/// z = 0 the vertex beyond x0.
Vec3 ellipsoid_point(EllipsoidFrame const& fr, double t, double z, double phi);

/// r = |ξ - x0| = (t - ρ + 2zρ) / 2 for the point at parameter z.
inline double ellipsoid_radius_z(double t, double rho, double z) {
  return 0.5 * (t - rho + 2.0 * z * rho);
}

/// θ for parameter z, from the clamped arccos.
double ellipsoid_polar_angle(double t, double rho, double z);

/// r as a function of θ on E(x, x0, t).
double ellipsoid_radius_theta(double t, double rho, double theta);

/// θ as a function of r on E(x, x0, t).
double ellipsoid_theta_radius(double t, double rho, double r);

}  // namespace phaseless
