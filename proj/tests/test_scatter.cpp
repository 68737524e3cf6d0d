#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "phaseless/error.hpp"
#include "phaseless/io.hpp"
#include "phaseless/scatter.hpp"

using namespace phaseless;

namespace {

double simpson_chord(Potential const& q, Vec3 const& from, Vec3 const& to, int m = 20000) {
  double sum = 0.0;
  for (int i = 0; i <= m; ++i) {
    double const z = static_cast<double>(i) / m;
    double const w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * q(from + z * (to - from));
  }
  return sum / (3.0 * m) * distance(from, to);
}

// (1/4π) ∫ w e^{-ikt} with w the linear interpolant, by composite Simpson on
// each cell.
complex brute_fourier(KernelEvaluation const& tr, double k, int per_cell = 4000) {
  complex sum{0.0, 0.0};
  for (std::size_t c = 0; c + 1 < tr.t_grid.size(); ++c) {
    double const a = tr.t_grid[c], b = tr.t_grid[c + 1];
    double const h = (b - a) / per_cell;
    for (int i = 0; i <= per_cell; ++i) {
      double const t = a + i * h;
      double const w = (i == 0 || i == per_cell) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      double const f = tr.wtilde_values[c] + (tr.wtilde_values[c + 1] - tr.wtilde_values[c]) * (t - a) / (b - a);
      sum += w * f * std::polar(1.0, -k * t) * (h / 3.0);
    }
  }
  return sum / (4.0 * pi);
}

KernelEvaluation synthetic_trace() {
  KernelEvaluation tr;
  tr.x = {1.0, 0.0, 0.0};
  tr.x0 = {-1.0, 0.0, 0.0};
  tr.rho = 2.0;
  tr.t_grid = graded_mesh(2.0, 4.0, 40);
  for (double t : tr.t_grid) tr.wtilde_values.push_back(std::exp(-(t - 2.0)) * std::cos(3.0 * t) - 0.2);
  return tr;
}

}  // namespace

TEST_CASE("free field") {
  Vec3 const x0{0.0, 0.0, 0.0};
  Vec3 const x{0.3, 0.4, 0.0};
  for (double k : {0.5, 7.0, 160.0}) {
    complex const u = free_field(x, x0, k);
    CHECK(std::abs(u) == doctest::Approx(1.0 / (4.0 * pi * 0.5)).epsilon(1e-14));
    double const d = std::remainder(std::arg(u) + k * 0.5, two_pi);
    CHECK(std::abs(d) < 1e-12);
  }
  CHECK(std::abs(free_field({1.0 / (4.0 * pi), 0.0, 0.0}, x0, 3.0)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(free_field(x0, x0, 1.0), ValidationError);
  CHECK_THROWS_AS(free_field(x, x0, 0.0), ValidationError);
}

TEST_CASE("Filon transform of a piecewise-linear trace") {
  auto const tr = synthetic_trace();
  for (double k : {0.5, 20.0, 160.0, 1000.0}) {
    complex const a = trace_fourier(tr, k, 10.0);
    complex const b = brute_fourier(tr, k);
    CHECK(std::abs(a - b) <= 1e-9 * std::abs(b) + 1e-13);
    // real kernel: the transform at -k is the conjugate
    complex const c = trace_fourier(tr, -k, 10.0);
    CHECK(std::abs(c - std::conj(a)) <= 1e-14);
  }
  double trap = 0.0;
  for (std::size_t i = 1; i < tr.t_grid.size(); ++i) {
    trap += 0.5 * (tr.wtilde_values[i] + tr.wtilde_values[i - 1]) * (tr.t_grid[i] - tr.t_grid[i - 1]);
  }
  CHECK(trace_fourier(tr, 0.0, 10.0).real() == doctest::Approx(trap / (4.0 * pi)).epsilon(1e-13));
  // cut inside the grid equals the transform of the truncated interpolant
  KernelEvaluation cut = tr;
  cut.t_grid = {2.0, 2.5, 3.0};
  cut.wtilde_values = {1.0, -1.0, 0.5};
  KernelEvaluation half = cut;
  half.t_grid = {2.0, 2.5, 2.75};
  half.wtilde_values = {1.0, -1.0, -0.25};
  CHECK(std::abs(trace_fourier(cut, 30.0, 2.75) - trace_fourier(half, 30.0, 10.0)) < 1e-15);
}

TEST_CASE("series field: errors and zero potential") {
  auto q = phantom_preset("zero");
  auto g = slice_geometry(1.0, 0.0);
  auto c = make_chord(g, 1.0, 0.1);
  auto tr = kernel_trace(q, c.x, c.x0, 4.0, 20, QuadratureSpec{}, 1e-6);
  auto u = usc_series(c.x, c.x0, 50.0, 4.0, tr);
  CHECK(u.value == complex{0.0, 0.0});
  CHECK_THROWS_AS(usc_series(c.x, c.x0, 50.0, c.length, tr), ValidationError);
  CHECK_THROWS_AS(usc_series(c.x0, c.x + Vec3{0.0, 0.0, 1e-3}, 50.0, 4.0, tr), ValidationError);
  CHECK_THROWS_AS(usc_series(c.x, c.x0, -1.0, 4.0, tr), ValidationError);
  KernelEvaluation bad = tr;
  bad.t_grid.front() += 0.01;
  CHECK_THROWS_AS(usc_series(c.x, c.x0, 50.0, 4.0, bad), ValidationError);
}

TEST_CASE("asymptotic field") {
  auto q = phantom_preset("standard");
  auto g = slice_geometry(1.0, 0.0);
  auto c = make_chord(g, 0.4, 0.25);
  double const rq = simpson_chord(q, c.x0, c.x);
  double prev = 0.0;
  for (double k : {20.0, 40.0, 160.0}) {
    complex const u = usc_asymptotic(q, c.x, c.x0, k);
    CHECK(std::abs(u) == doctest::Approx(rq / (8.0 * pi * c.length * k)).epsilon(1e-10));
    if (prev != 0.0) CHECK(k * std::abs(u) == doctest::Approx(prev).epsilon(1e-14));
    prev = k * std::abs(u);
  }
  CHECK(usc_asymptotic(phantom_preset("zero"), c.x, c.x0, 10.0) == complex{0.0, 0.0});
  CHECK_THROWS_AS(usc_asymptotic(q, c.x, c.x, 10.0), ValidationError);
}

TEST_CASE("series field approaches the leading asymptotic form") {
  auto q = phantom_preset("standard");
  auto g = slice_geometry(1.0, 0.0);
  auto c = make_chord(g, two_pi, 0.3);
  double const rq = simpson_chord(q, c.x0, c.x);
  double const T = series_support_end(q, c.x, c.x0, 4);
  auto tr = kernel_trace(q, c.x, c.x0, T, 400, QuadratureSpec{}, 1e-6);
  std::vector<double> mod_err, cplx_err;
  for (double k : {20.0, 40.0, 80.0, 160.0}) {
    auto u = usc_series(c.x, c.x0, k, T, tr);
    double const scale = 8.0 * pi * c.length * k;
    mod_err.push_back(std::abs(scale * std::abs(u.value) - rq));
    cplx_err.push_back(scale * std::abs(u.value - usc_asymptotic(q, c.x, c.x0, k)));
  }
  for (std::size_t i = 1; i < mod_err.size(); ++i) {
    CHECK(mod_err[i] < mod_err[i - 1]);
    CHECK(cplx_err[i] < cplx_err[i - 1]);
  }
  CHECK(mod_err.back() < 0.01 * rq);

  // the truncated series vanishes beyond its support end, so a longer
  // horizon changes nothing
  auto tr2 = kernel_trace(q, c.x, c.x0, 2.0 * T, 400, QuadratureSpec{}, 1e-6);
  auto a = usc_series(c.x, c.x0, 40.0, T, tr).value;
  auto b = usc_series(c.x, c.x0, 40.0, 2.0 * T, tr2).value;
  CHECK(std::abs(a - b) <= 1e-6 * std::abs(a));
}

TEST_CASE("modulus") {
  CHECK(phaseless_value(complex{3.0, 4.0}) == 5.0);
  CHECK(phaseless_value(complex{0.0, 0.0}) == 0.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    auto const p = PolarField::from({u(rng), u(rng)});
    CHECK(phaseless_value(p.rotated(u(rng))) == phaseless_value(p));
    CHECK(phaseless_value(p) == std::abs(p.value()) * 0.0 + p.modulus);
  }
}

TEST_CASE("ladder and model tags") {
  auto l = default_ladder();
  CHECK(l.size() == 8);
  CHECK(l.k_values.front() == 20.0);
  CHECK(l.k_values.back() == 160.0);
  for (std::size_t i = 2; i < l.size(); ++i) {
    CHECK(l.k_values[i] / l.k_values[i - 1] == doctest::Approx(l.k_values[1] / l.k_values[0]));
  }
  FrequencyLadder bad{{1.0, 1.0}};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  FrequencyLadder neg{{-1.0, 2.0}};
  CHECK_THROWS_AS(neg.validate(), ValidationError);
  CHECK(parse_model("series") == FieldModel::series);
  CHECK_THROWS_AS(parse_model("born"), ValidationError);
}

TEST_CASE("synthesis: asymptotic model, zero phantom, determinism, noise") {
  auto q = phantom_preset("standard");
  auto g = slice_geometry(1.0, 0.1);
  SinogramLayout const layout{12, 10, 0.02};
  auto const ladder = default_ladder();
  auto ds = synthesize_dataset(q, g, layout, ladder, FieldModel::asymptotic, 7, 0.0);
  REQUIRE(ds.chords.size() == 120);
  auto const sg = sinogram(q, g, layout);
  for (std::size_t c = 0; c < ds.chords.size(); ++c) {
    for (std::size_t k = 0; k < ladder.size(); ++k) {
      double const expect = sg.values[c] / (8.0 * pi * ds.chords[c].length * ladder.k_values[k]);
      CHECK(ds.f(c, k) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  for (auto model : {FieldModel::asymptotic, FieldModel::series}) {
    auto z = synthesize_dataset(phantom_preset("zero"), g, SinogramLayout{4, 4, 0.02}, ladder, model, 1, 0.0);
    for (double f : z.f_values) CHECK(f == 0.0);
  }
  auto n1 = synthesize_dataset(q, g, layout, ladder, FieldModel::asymptotic, 99, 0.05);
  auto n2 = synthesize_dataset(q, g, layout, ladder, FieldModel::asymptotic, 99, 0.05);
  auto n3 = synthesize_dataset(q, g, layout, ladder, FieldModel::asymptotic, 100, 0.05);
  CHECK(n1.f_values == n2.f_values);
  CHECK(n1.f_values != n3.f_values);
  double mean = 0.0, var = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < n1.f_values.size(); ++i) {
    if (ds.f_values[i] <= 0.0) continue;
    double const r = n1.f_values[i] / ds.f_values[i] - 1.0;
    mean += r;
    var += r * r;
    ++count;
  }
  mean /= count;
  var = var / count - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::sqrt(var) == doctest::Approx(0.05).epsilon(0.15));
  CHECK_THROWS_AS(synthesize_dataset(q, g, layout, ladder, FieldModel::asymptotic, 1, -0.1), ValidationError);
}

TEST_CASE("synthesis: phase rotations leave the dataset bit-identical") {
  auto q = phantom_preset("two-bumps");
  auto g = slice_geometry(1.0, 0.0);
  SinogramLayout const layout{8, 6, 0.02};
  auto const ladder = default_ladder();
  SynthesisOptions opts;
  std::mt19937_64 rng(5);
  std::vector<double> phases(layout.n_alpha * layout.n_s * ladder.size());
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (double& p : phases) p = u(rng);
  auto base = synthesize_dataset(q, g, layout, ladder, FieldModel::asymptotic, 3, 0.02);
  opts.phase_perturbation = [&](std::size_t c, std::size_t k) { return phases[c * ladder.size() + k]; };
  auto rotated = synthesize_dataset(q, g, layout, ladder, FieldModel::asymptotic, 3, 0.02, opts);
  CHECK(base.f_values == rotated.f_values);
}

TEST_CASE("synthesis: series model, reciprocity and budget") {
  auto q = phantom_preset("standard");
  auto g = slice_geometry(1.0, 0.0);
  SinogramLayout const layout{4, 4, 0.02};
  auto const ladder = FrequencyLadder::geometric(20.0, 160.0, 4);
  SynthesisOptions opts;
  opts.n_t = 150;
  auto ds = synthesize_dataset(q, g, layout, ladder, FieldModel::series, 1, 0.0, opts);
  // (alpha, s) and (alpha + pi, -s) share the same pair of points
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      std::size_t const c = i * 4 + j, p = ((i + 2) % 4) * 4 + (3 - j);
      for (std::size_t k = 0; k < ladder.size(); ++k) CHECK(ds.f(c, k) == ds.f(p, k));
    }
  }
  auto as = synthesize_dataset(q, g, layout, ladder, FieldModel::asymptotic, 1, 0.0);
  for (std::size_t c = 0; c < ds.chords.size(); ++c) {
    if (as.f(c, 3) < 1e-4) continue;
    CHECK(std::abs(ds.f(c, 3) - as.f(c, 3)) < 0.05 * as.f(c, 3));
  }
  opts.series_budget = 10;
  CHECK_THROWS_AS(synthesize_dataset(q, g, layout, ladder, FieldModel::series, 1, 0.0, opts), BudgetError);
}

TEST_CASE("dataset files") {
  auto q = phantom_preset("standard");
  auto g = slice_geometry(1.0, 0.2);
  auto ds = synthesize_dataset(q, g, SinogramLayout{6, 5, 0.03}, default_ladder(), FieldModel::asymptotic, 11, 0.01);
  auto const dir = std::filesystem::temp_directory_path() / "phaseless_test_scatter";
  std::filesystem::create_directories(dir);
  auto const path = dir / "ds.phds";
  write_dataset(path, ds, R"({"phantom_sha256": "abc"})");
  auto back = read_dataset(path);
  CHECK(back.f_values == ds.f_values);
  CHECK(back.ladder.k_values == ds.ladder.k_values);
  CHECK(back.layout.n_alpha == 6);
  CHECK(back.layout.n_s == 5);
  CHECK(back.layout.edge_fraction == 0.03);
  CHECK(back.slice.a == 0.2);
  CHECK(back.seed == 11);
  CHECK(back.noise_level == 0.01);
  CHECK(back.model == FieldModel::asymptotic);
  for (std::size_t c = 0; c < ds.chords.size(); ++c) {
    CHECK(back.chords[c].alpha == ds.chords[c].alpha);
    CHECK(back.chords[c].s == ds.chords[c].s);
  }
  CHECK(std::filesystem::file_size(path) == 64 + 8 * (2 * 30 + 8 + 30 * 8));
  auto side = nlohmann::json::parse(io::read_text(io::sidecar_path(path)));
  CHECK(side["phantom_sha256"] == "abc");
  CHECK(side["sha256"] == io::sha256_file(path));
  CHECK(side["model"] == "asymptotic");

  auto bytes = io::read_file(path);
  bytes[0] = 'X';
  io::write_file(dir / "bad.phds", bytes);
  try {
    read_dataset(dir / "bad.phds");
    FAIL("expected an error");
  } catch (IoError const& e) {
    CHECK(std::string(e.what()).find("bad.phds") != std::string::npos);
  }
  bytes = io::read_file(path);
  bytes.resize(bytes.size() - 3);
  io::write_file(dir / "short.phds", bytes);
  CHECK_THROWS_AS(read_dataset(dir / "short.phds"), IoError);
  CHECK_THROWS_AS(read_dataset(dir / "missing.phds"), IoError);
  std::filesystem::remove_all(dir);
}
