#include <doctest.h>

#include <array>
#include <cmath>
#include <filesystem>
#include <random>

#include "phaseless/error.hpp"
#include "phaseless/io.hpp"
#include "phaseless/phantom.hpp"

using namespace phaseless;

namespace {

// Composite Simpson rule on the raw potential: independent of the
// per-bump Gauss-Legendre splitting.
double simpson_segment(Potential const& q, Vec3 const& a, Vec3 const& b, int panels) {
  double const h = 1.0 / panels;
  double sum = 0.0;
  for (int i = 0; i <= panels; ++i) {
    double const w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * q(a + (i * h) * (b - a));
  }
  return sum * h / 3.0 * distance(a, b);
}

}  // namespace

TEST_CASE("bump evaluation") {
  Potential const q(1.0, {Bump{{0, 0, 0}, 0.5, 1.0}});
  CHECK(q({0, 0, 0}) == 1.0);
  CHECK(q({0.5, 0, 0}) == 0.0);
  CHECK(q({0.25, 0, 0}) == doctest::Approx(0.2373046875).epsilon(1e-15));
  CHECK(q({0, 0.9, 0.3}) == 0.0);
  CHECK(Potential(1.0, {})({0, 0, 0}) == 0.0);
}

TEST_CASE("construction enforces support and sign") {
  CHECK_THROWS_AS(Potential(1.0, {Bump{{0.6, 0, 0}, 0.5, 1.0}}), ValidationError);
  CHECK_THROWS_AS(Potential(1.0, {Bump{{0, 0, 0}, 0.5, -1.0}}), ValidationError);
  CHECK_THROWS_AS(Potential(1.0, {Bump{{0, 0, 0}, 0.0, 1.0}}), ValidationError);
  CHECK_NOTHROW(Potential(1.0, {Bump{{0.5, 0, 0}, 0.5, 1.0}}));
}

TEST_CASE("support is inside the ball") {
  auto const q = phantom_preset("two-bumps");
  std::mt19937_64 rng(1);
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_real_distribution<double> U(1.0, 3.0);
  for (int i = 0; i < 100000; ++i) {
    Vec3 d{N(rng), N(rng), N(rng)};
    d *= U(rng) * q.B() / norm(d);
    CHECK(q(d) == 0.0);
  }
}

TEST_CASE("bump partials match finite differences") {
  Bump const b{{0.1, -0.2, 0.05}, 0.6, 1.3};
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(-0.35, 0.35);
  double const h = 1e-3;
  for (int trial = 0; trial < 50; ++trial) {
    Vec3 const p = b.center + Vec3{U(rng), U(rng), U(rng)};
    for (int i = 0; i < 3; ++i) {
      Vec3 e{};
      (i == 0 ? e.x : i == 1 ? e.y : e.z) = h;
      std::array<int, 1> const a1{i};
      double const fd1 = (b(p + e) - b(p - e)) / (2 * h);
      CHECK(bump_partial(b, p, a1) == doctest::Approx(fd1).epsilon(1e-5).scale(1.0));
      for (int j = 0; j < 3; ++j) {
        Vec3 f{};
        (j == 0 ? f.x : j == 1 ? f.y : f.z) = h;
        std::array<int, 2> const a2{i, j};
        double const fd2 = (b(p + e + f) - b(p + e - f) - b(p - e + f) + b(p - e - f)) / (4 * h * h);
        CHECK(bump_partial(b, p, a2) == doctest::Approx(fd2).epsilon(2e-3).scale(1.0));
      }
      // Fourth derivative along one axis: five-point stencil on the second derivative.
      std::array<int, 2> const a2{i, i};
      std::array<int, 4> const a4{i, i, i, i};
      auto d2 = [&](Vec3 const& x) { return bump_partial(b, x, a2); };
      double const fd4 = (d2(p + e) - 2 * d2(p) + d2(p - e)) / (h * h);
      CHECK(bump_partial(b, p, a4) == doctest::Approx(fd4).epsilon(1e-4).scale(10.0));
    }
  }
}

TEST_CASE("norms") {
  auto const zero = norms(Potential(1.0, {}), 32);
  CHECK(zero.q0 == 0.0);
  CHECK(zero.q2 == 0.0);
  CHECK(zero.q4 == 0.0);
  CHECK_THROWS_AS(norms(Potential(1.0, {}), 16), ValidationError);

  Potential const q(1.0, {Bump{{0, 0, 0}, 0.5, 1.0}});
  auto const n = norms(q, 33);  // odd: the grid contains the center
  CHECK(n.q0 == doctest::Approx(1.0));

  // Oracle: 1-D search over the radial profile p(s) = (1 - s^2/R^2)^5 of the
  // second derivatives along and across the radius, p'' and p'/s.
  double const R = 0.5;
  double best = 0.0;
  for (int i = 0; i <= 200000; ++i) {
    double const s = R * i / 200000.0;
    double const u = s * s / (R * R);
    double const p2 = (1 - u) * (1 - u) * (1 - u) * (50 * u - 10) / (R * R);
    double const p1_over_s = -10.0 / (R * R) * std::pow(1 - u, 4);
    best = std::max({best, std::abs(p2), std::abs(p1_over_s)});
  }
  CHECK(best == doctest::Approx(40.0));
  CHECK(n.q2 == doctest::Approx(best).epsilon(1e-12));
  CHECK(n.q4 >= n.q2);
  // Fourth derivative at the center: three pairings * g''(0) * (2/R^2)^2.
  CHECK(n.q4 == doctest::Approx(3.0 * 20.0 * 64.0));
}

TEST_CASE("line integrals") {
  Potential const unit(1.0, {Bump{{0, 0, 0}, 1.0, 1.0}});
  auto const g = slice_geometry(1.0, 0.0);
  auto const diameter = make_chord(g, 0.3, 0.0);
  CHECK(line_integral(unit, diameter, 8) == doctest::Approx(512.0 / 693.0).epsilon(1e-14));
  CHECK(line_integral(Potential(1.0, {}), diameter, 8) == 0.0);
  auto const q = phantom_preset("standard");
  CHECK(line_integral(q, make_chord(g, pi, 0.9), 16) == 0.0);  // misses the bump
  CHECK_THROWS_AS(line_integral(q, diameter, 1), ValidationError);

  auto const two = phantom_preset("two-bumps");
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    auto const c = make_chord(g, two_pi * U(rng), (2 * U(rng) - 1) * 0.95);
    double const v64 = line_integral(two, c, 64);
    double const v256 = line_integral(two, c, 256);
    CHECK(std::abs(v64 - v256) <= 1e-10 * std::max(1e-300, std::abs(v256)) + 1e-15);
    CHECK(v64 == doctest::Approx(simpson_segment(two, c.x0, c.x, 20000)).epsilon(1e-8).scale(1e-6));
    CHECK(v64 >= 0.0);
  }
}

TEST_CASE("smoothness across the bump boundary") {
  Potential const q(1.0, {Bump{{0, 0, 0}, 0.5, 1.0}});
  // Fourth central differences straddling |x| = 0.5 stay bounded as h -> 0.
  double prev = 0.0;
  for (double h : {1e-2, 5e-3, 2.5e-3, 1.25e-3}) {
    auto f = [&](double s) { return q({0.5 + s, 0, 0}); };
    double const d4 = (f(2 * h) - 4 * f(h) + 6 * f(0) - 4 * f(-h) + f(-2 * h)) / std::pow(h, 4);
    CHECK(std::abs(d4) < 5e4);
    if (prev != 0.0) CHECK(std::abs(d4) <= 1.5 * std::abs(prev) + 1.0);
    prev = d4;
  }
}

TEST_CASE("phantom files") {
  auto const dir = std::filesystem::temp_directory_path() / "phaseless_test_phantom";
  std::filesystem::create_directories(dir);
  auto const q = phantom_preset("two-bumps");
  write_phantom(dir / "p.json", q);
  auto const back = read_phantom(dir / "p.json");
  REQUIRE(back.terms().size() == 2);
  CHECK(back.B() == q.B());
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back.terms()[i].center == q.terms()[i].center);
    CHECK(back.terms()[i].radius == q.terms()[i].radius);
    CHECK(back.terms()[i].amplitude == q.terms()[i].amplitude);
  }
  io::write_text(dir / "bad.json", R"({"format":"phantom/1","B":1,"terms":[{"center":[0.8,0,0],"radius":0.5,"amplitude":1}]})");
  CHECK_THROWS_AS(read_phantom(dir / "bad.json"), ValidationError);
  io::write_text(dir / "old.json", R"({"B":1,"terms":[]})");
  CHECK_THROWS_AS(read_phantom(dir / "old.json"), ValidationError);
  CHECK_THROWS_AS(read_phantom(dir / "missing.json"), IoError);
  CHECK_THROWS_AS(phantom_preset("nope"), ValidationError);
  std::filesystem::remove_all(dir);
}
