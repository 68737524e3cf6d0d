#include "phaseless/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phaseless/error.hpp"

namespace phaseless {
namespace {

constexpr double on_circle_tol = 1e-9;

void require_on_circle(SliceGeometry const& g, Vec3 const& p, char const* name) {
  double const tol = on_circle_tol * g.B;
  Vec3 const rel = p - g.center();
  double const r = std::hypot(rel.x, rel.y);
  if (std::abs(rel.z) > tol || std::abs(r - g.radius) > tol) {
    std::ostringstream os;
    os << "point " << name << " = (" << p.x << ", " << p.y << ", " << p.z
       << ") is not on the slice circle S_a (a = " << g.a << ", B_a = " << g.radius << ")";
    throw ValidationError(os.str());
  }
}

}  // namespace

SliceGeometry slice_geometry(double B, double a) {
  if (!(B > 0.0) || !std::isfinite(B)) {
    throw ValidationError("sphere radius B must be positive and finite");
  }
  if (!(std::abs(a) < B)) {
    std::ostringstream os;
    os << "slice height a = " << a << " gives an empty cross-section (need |a| < B = " << B << ")";
    throw ValidationError(os.str());
  }
  return SliceGeometry{B, a, std::sqrt((B - a) * (B + a))};
}

Vec3 radon_normal(double alpha) { return {std::cos(alpha), std::sin(alpha), 0.0}; }

double wrap_angle(double alpha) {
  double w = std::fmod(alpha, two_pi);
  if (w <= 0.0) w += two_pi;
  return w;
}

Chord chord_from_pair(SliceGeometry const& g, Vec3 const& x, Vec3 const& x0) {
  require_on_circle(g, x, "x");
  require_on_circle(g, x0, "x0");
  Vec3 const d = x - x0;
  double const len = std::hypot(d.x, d.y);
  if (len <= on_circle_tol * g.B) {
    throw ValidationError("chord endpoints coincide (zero-length chord)");
  }
  // In-plane unit normal to the chord direction, oriented away from 0_a.
  Vec3 n{-d.y / len, d.x / len, 0.0};
  Vec3 const mid = 0.5 * (x + x0) - g.center();
  double s = n.x * mid.x + n.y * mid.y;
  double const flat = 1e-14 * g.B;
  if (s < -flat) {
    n = -n;
    s = -s;
  } else if (std::abs(s) <= flat) {
    s = 0.0;
    // Through the center: pick alpha in (0, pi].
    if (n.y < 0.0 || (n.y == 0.0 && n.x > 0.0)) n = -n;
  }
  Chord c;
  c.alpha = wrap_angle(std::atan2(n.y, n.x));
  c.s = s;
  c.x = x;
  c.x0 = x0;
  c.length = distance(x, x0);
  return c;
}

std::pair<Vec3, Vec3> pair_from_chord(SliceGeometry const& g, double alpha, double s) {
  if (!(std::abs(s) < g.radius)) {
    std::ostringstream os;
    os << "offset |s| = " << std::abs(s) << " must be below B_a = " << g.radius
       << " (line misses or is tangent to S_a)";
    throw ValidationError(os.str());
  }
  double const c = std::cos(alpha);
  double const sn = std::sin(alpha);
  double const w = std::sqrt((g.radius - s) * (g.radius + s));
  // n = (c, sn), tangent n_perp = (-sn, c).
  Vec3 const x0{s * c - w * sn, s * sn + w * c, g.a};
  Vec3 const x{s * c + w * sn, s * sn - w * c, g.a};
  return {x, x0};
}

Chord make_chord(SliceGeometry const& g, double alpha, double s) {
  auto const [x, x0] = pair_from_chord(g, alpha, s);
  Chord c;
  c.alpha = wrap_angle(alpha);
  c.s = s;
  c.x = x;
  c.x0 = x0;
  c.length = 2.0 * std::sqrt((g.radius - s) * (g.radius + s));
  return c;
}

Vec3 chord_point(Chord const& c, double z) { return c.x0 + z * (c.x - c.x0); }

Vec3 unit_direction(double theta, double phi) {
  double const st = std::sin(theta);
  return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

Mat3 frame_matrix(double theta_hat, double psi) {
  double const ct = std::cos(theta_hat);
  double const st = std::sin(theta_hat);
  double const cp = std::cos(psi);
  double const sp = std::sin(psi);
  return Mat3{Vec3{-ct * cp, -ct * sp, st}, Vec3{sp, -cp, 0.0}, Vec3{st * cp, st * sp, ct}};
}

EllipsoidFrame ellipsoid_frame(Vec3 const& x, Vec3 const& x0) {
  Vec3 const d = x - x0;
  double const rho = norm(d);
  if (!(rho > 0.0)) throw ValidationError("ellipsoid frame needs x != x0");
  EllipsoidFrame fr;
  fr.x0 = x0;
  fr.x = x;
  fr.rho = rho;
  fr.theta_hat = std::acos(std::clamp(d.z / rho, -1.0, 1.0));
  double psi = std::atan2(d.y, d.x);
  if (psi < 0.0) psi += two_pi;
  fr.psi = psi;
  fr.A = frame_matrix(fr.theta_hat, fr.psi);
  return fr;
}

Vec3 ellipsoid_point(EllipsoidFrame const& fr, double t, double z, double phi) {
  double const rho = fr.rho;
  if (!(t > rho)) throw ValidationError("ellipsoid point needs t > rho");
  // r sin(theta) and r cos(theta) in closed form.
  double const axial = 0.5 * (rho - t + 2.0 * z * t);
  double const transverse = std::sqrt(std::max(0.0, (t * t - rho * rho) * z * (1.0 - z)));
  Vec3 const local{transverse * std::cos(phi), transverse * std::sin(phi), axial};
  return fr.x0 + row_times(local, fr.A);
}

double ellipsoid_polar_angle(double t, double rho, double z) {
  double const arg = (rho - t + 2.0 * z * t) / (t - rho + 2.0 * z * rho);
  return std::acos(std::clamp(arg, -1.0, 1.0));
}

double ellipsoid_radius_theta(double t, double rho, double theta) {
  return (t * t - rho * rho) / (2.0 * (t - rho * std::cos(theta)));
}

double ellipsoid_theta_radius(double t, double rho, double r) {
  double const arg = (2.0 * t * r - t * t + rho * rho) / (2.0 * r * rho);
  return std::acos(std::clamp(arg, -1.0, 1.0));
}

}  // namespace phaseless
