#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "phaseless/geometry.hpp"
#include "phaseless/vec.hpp"

namespace phaseless {

/// Radial bump amplitude * (1 - |x - center|^2 / radius^2)^5 inside the ball,
/// zero outside. The fifth power makes it C^4 across the ball boundary.
struct Bump {
  Vec3 center;
  double radius{1.0};
  double amplitude{1.0};

  double operator()(Vec3 const& p) const {
    double const u = dot(p - center, p - center) / (radius * radius);
    if (u >= 1.0) return 0.0;
    double const v = 1.0 - u;
    double const v2 = v * v;
    return amplitude * v2 * v2 * v;
  }
};

/// Sup-norm estimates of q and its partial derivatives on a sampling grid.
/// q2 and q4 are the maxima over all partials of order <= 2 and <= 4. These
/// are lower bounds on the true norms (grid sampling).
struct PotentialNorms {
  double q0{0.0};
  double q2{0.0};
  double q4{0.0};
};

/// Nonnegative, compactly supported potential built from bumps inside the
/// ball |x| < B.
class Potential {
 public:
  Potential() = default;
  /// Throws ValidationError when a term escapes the ball, has nonpositive
  /// radius or negative amplitude.
  Potential(double B, std::vector<Bump> terms);

  double B() const { return B_; }
  std::span<Bump const> terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  double operator()(Vec3 const& p) const;

  /// Same bumps with every amplitude multiplied by lambda >= 0.
  Potential scaled(double lambda) const;

  /// Smallest ball containing every bump (center, radius). Zero radius for
  /// the empty potential.
  std::pair<Vec3, double> bounding_ball() const;

 private:
  double B_{1.0};
  std::vector<Bump> terms_;
};

inline double eval(Potential const& q, Vec3 const& p) { return q(p); }

/// Partial derivative of a bump; axes lists the differentiation axes
/// (0, 1, 2), at most four entries.
double bump_partial(Bump const& b, Vec3 const& p, std::span<int const> axes);

/// Norm estimates on a grid_n^3 grid over [-B, B]^3 (endpoints included).
PotentialNorms norms(Potential const& q, int grid_n);

/// Integral of q along the segment from -> to, in arc length. Each bump is
/// integrated over its own entry/exit interval with an n_quad-point
/// Gauss-Legendre rule.
double segment_integral(Potential const& q, Vec3 const& from, Vec3 const& to, int n_quad);

/// ∫_L q dσ over the chord.
double line_integral(Potential const& q, Chord const& c, int n_quad);

/// Parameter interval [lo, hi] ⊂ [0, 1] where from + z (to - from) lies in
/// the ball; returns false when the segment misses it.
bool segment_ball_interval(Vec3 const& from, Vec3 const& to, Vec3 const& center,
                           double radius, double& lo, double& hi);

// Phantom description files ("format": "phantom/1").
Potential read_phantom(std::filesystem::path const& path);
void write_phantom(std::filesystem::path const& path, Potential const& q);
std::string phantom_to_json(Potential const& q);
Potential phantom_from_json(std::string const& text);

/// Named fixtures: "standard", "two-bumps", "zero".
Potential phantom_preset(std::string const& name);

}  // namespace phaseless
