#include "phaseless/phantom.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include "json.hpp"
#include <sstream>

#include "phaseless/error.hpp"
#include "phaseless/quadrature.hpp"

namespace phaseless {
namespace {

using nlohmann::json;

// Derivatives of g(u) = (1 - u)^5.
double profile_derivative(double u, int m) {
  if (u >= 1.0) return 0.0;
  double const v = 1.0 - u;
  static constexpr std::array<double, 6> falling{1.0, 5.0, 20.0, 60.0, 120.0, 120.0};
  double const sign = (m % 2 == 0) ? 1.0 : -1.0;
  return sign * falling[m] * std::pow(v, 5 - m);
}

// Sum over set partitions of the index list into blocks of size one or two.
// Singletons contribute du/dy_i = 2 y_i / R^2, pairs contribute
// d2u/dy_i dy_j = 2 delta_ij / R^2.
double partition_sum(std::span<int const> axes, std::array<bool, 4>& used, int blocks,
                     double product, Vec3 const& y, double inv_r2, double u) {
  int first = -1;
  for (int i = 0; i < static_cast<int>(axes.size()); ++i) {
    if (!used[i]) {
      first = i;
      break;
    }
  }
  if (first < 0) return product * profile_derivative(u, blocks);

  std::array<double, 3> const yc{y.x, y.y, y.z};
  used[first] = true;
  double total = partition_sum(axes, used, blocks + 1, product * 2.0 * yc[axes[first]] * inv_r2,
                               y, inv_r2, u);
  for (int j = first + 1; j < static_cast<int>(axes.size()); ++j) {
    if (used[j] || axes[j] != axes[first]) continue;
    used[j] = true;
    total += partition_sum(axes, used, blocks + 1, product * 2.0 * inv_r2, y, inv_r2, u);
    used[j] = false;
  }
  used[first] = false;
  return total;
}

void check_bump(Bump const& b, double B) {
  if (!(b.radius > 0.0) || !std::isfinite(b.radius)) {
    throw ValidationError("bump radius must be positive");
  }
  if (!(b.amplitude >= 0.0) || !std::isfinite(b.amplitude)) {
    throw ValidationError("bump amplitude must be nonnegative (q >= 0 in the ball)");
  }
  double const reach = norm(b.center) + b.radius;
  if (reach > B * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "bump at (" << b.center.x << ", " << b.center.y << ", " << b.center.z
       << ") with radius " << b.radius << " escapes the ball |x| < B = " << B
       << " (|center| + radius = " << reach << "); q must vanish outside the ball";
    throw ValidationError(os.str());
  }
}

}  // namespace

Potential::Potential(double B, std::vector<Bump> terms) : B_(B), terms_(std::move(terms)) {
  if (!(B > 0.0) || !std::isfinite(B)) throw ValidationError("support radius B must be positive");
  for (auto const& b : terms_) check_bump(b, B_);
}

double Potential::operator()(Vec3 const& p) const {
  double sum = 0.0;
  for (auto const& b : terms_) sum += b(p);
  return sum;
}

Potential Potential::scaled(double lambda) const {
  auto terms = terms_;
  for (auto& b : terms) b.amplitude *= lambda;
  return Potential(B_, std::move(terms));
}

std::pair<Vec3, double> Potential::bounding_ball() const {
  if (terms_.empty()) return {Vec3{}, 0.0};
  if (terms_.size() == 1) return {terms_[0].center, terms_[0].radius};
  // Centroid-based enclosing ball; not minimal but tight for a few bumps.
  Vec3 c{};
  for (auto const& b : terms_) c += b.center;
  c *= 1.0 / static_cast<double>(terms_.size());
  double r = 0.0;
  for (auto const& b : terms_) r = std::max(r, distance(c, b.center) + b.radius);
  return {c, r};
}

double bump_partial(Bump const& b, Vec3 const& p, std::span<int const> axes) {
  if (axes.size() > 4) throw ValidationError("bump derivatives are available up to order 4");
  Vec3 const y = p - b.center;
  double const inv_r2 = 1.0 / (b.radius * b.radius);
  double const u = dot(y, y) * inv_r2;
  if (u >= 1.0) return 0.0;
  std::array<bool, 4> used{};
  return b.amplitude * partition_sum(axes, used, 0, 1.0, y, inv_r2, u);
}

PotentialNorms norms(Potential const& q, int grid_n) {
  if (grid_n < 32) throw ValidationError("norm grid needs at least 32 points per axis");
  PotentialNorms out;
  if (q.empty()) return out;

  // Sorted multi-indices of order 1..4.
  std::vector<std::vector<int>> orders[5];
  for (int i = 0; i < 3; ++i) {
    orders[1].push_back({i});
    for (int j = i; j < 3; ++j) {
      orders[2].push_back({i, j});
      for (int k = j; k < 3; ++k) {
        orders[3].push_back({i, j, k});
        for (int l = k; l < 3; ++l) orders[4].push_back({i, j, k, l});
      }
    }
  }

  double const B = q.B();
  double const h = 2.0 * B / (grid_n - 1);
  std::array<double, 5> sup{};
  for (int i = 0; i < grid_n; ++i) {
    for (int j = 0; j < grid_n; ++j) {
      for (int k = 0; k < grid_n; ++k) {
        Vec3 const p{-B + i * h, -B + j * h, -B + k * h};
        sup[0] = std::max(sup[0], std::abs(q(p)));
        for (int m = 1; m <= 4; ++m) {
          for (auto const& axes : orders[m]) {
            double d = 0.0;
            for (auto const& b : q.terms()) d += bump_partial(b, p, axes);
            sup[m] = std::max(sup[m], std::abs(d));
          }
        }
      }
    }
  }
  out.q0 = sup[0];
  out.q2 = std::max({sup[0], sup[1], sup[2]});
  out.q4 = std::max({out.q2, sup[3], sup[4]});
  return out;
}

bool segment_ball_interval(Vec3 const& from, Vec3 const& to, Vec3 const& center,
                           double radius, double& lo, double& hi) {
  Vec3 const d = to - from;
  Vec3 const f = from - center;
  double const a = dot(d, d);
  if (!(a > 0.0)) return false;
  double const b = dot(f, d);
  double const c = dot(f, f) - radius * radius;
  double const disc = b * b - a * c;
  if (disc <= 0.0) return false;
  double const root = std::sqrt(disc);
  // Numerically stable pair of roots.
  double const qv = -(b + std::copysign(root, b));
  double z1 = qv / a;
  double z2 = (qv != 0.0) ? c / qv : -z1;
  if (z1 > z2) std::swap(z1, z2);
  lo = std::max(0.0, z1);
  hi = std::min(1.0, z2);
  return hi > lo;
}

double segment_integral(Potential const& q, Vec3 const& from, Vec3 const& to, int n_quad) {
  if (n_quad < 2) throw ValidationError("line integral needs n_quad >= 2");
  double const length = distance(from, to);
  double total = 0.0;
  for (auto const& b : q.terms()) {
    double lo = 0.0;
    double hi = 0.0;
    if (!segment_ball_interval(from, to, b.center, b.radius, lo, hi)) continue;
    total += integrate_gl([&](double z) { return b(from + z * (to - from)); }, lo, hi, n_quad);
  }
  return total * length;
}

double line_integral(Potential const& q, Chord const& c, int n_quad) {
  return segment_integral(q, c.x0, c.x, n_quad);
}

std::string phantom_to_json(Potential const& q) {
  json doc;
  doc["format"] = "phantom/1";
  doc["B"] = q.B();
  doc["terms"] = json::array();
  for (auto const& b : q.terms()) {
    doc["terms"].push_back({{"center", {b.center.x, b.center.y, b.center.z}},
                            {"radius", b.radius},
                            {"amplitude", b.amplitude}});
  }
  return doc.dump(2);
}

Potential phantom_from_json(std::string const& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (json::exception const& e) {
    throw ValidationError(std::string("phantom file is not valid JSON: ") + e.what());
  }
  try {
    if (doc.value("format", std::string{}) != "phantom/1") {
      throw ValidationError("phantom file must carry \"format\": \"phantom/1\"");
    }
    std::vector<Bump> terms;
    for (auto const& t : doc.at("terms")) {
      auto const& c = t.at("center");
      if (c.size() != 3) throw ValidationError("bump center must have three coordinates");
      terms.push_back(Bump{Vec3{c[0].get<double>(), c[1].get<double>(), c[2].get<double>()},
                           t.at("radius").get<double>(), t.at("amplitude").get<double>()});
    }
    return Potential(doc.at("B").get<double>(), std::move(terms));
  } catch (json::exception const& e) {
    throw ValidationError(std::string("malformed phantom description: ") + e.what());
  }
}

Potential read_phantom(std::filesystem::path const& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open phantom file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return phantom_from_json(buf.str());
  } catch (ValidationError const& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_phantom(std::filesystem::path const& path, Potential const& q) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write phantom file " + path.string());
  out << phantom_to_json(q) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

Potential phantom_preset(std::string const& name) {
  if (name == "standard") return Potential(1.0, {Bump{{0.2, 0.0, 0.0}, 0.5, 1.0}});
  if (name == "two-bumps") {
    return Potential(1.0, {Bump{{0.3, 0.1, 0.0}, 0.35, 1.0}, Bump{{-0.35, -0.2, 0.1}, 0.3, 0.6}});
  }
  if (name == "zero") return Potential(1.0, {});
  throw ValidationError("unknown phantom preset '" + name + "' (standard, two-bumps, zero)");
}

}  // namespace phaseless
