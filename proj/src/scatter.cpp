#include "phaseless/scatter.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "json.hpp"
#include "phaseless/error.hpp"
#include "phaseless/io.hpp"
#include "phaseless/parallel.hpp"

namespace phaseless {

using nlohmann::json;

namespace {

constexpr std::uint32_t dataset_version = 1;

// ∫_0^1 e^{-iθu} du and ∫_0^1 u e^{-iθu} du.
std::pair<complex, complex> filon_moments(double theta) {
  complex const mi{0.0, -theta};
  if (std::abs(theta) < 0.25) {
    complex e0{0.0, 0.0}, e1{0.0, 0.0};
    complex p{1.0, 0.0};
    double fact = 1.0;
    for (int n = 0; n < 14; ++n) {
      if (n > 0) {
        p *= mi;
        fact *= n;
      }
      e0 += p / (fact * (n + 1));
      e1 += p / (fact * (n + 2));
    }
    return {e0, e1};
  }
  complex const it{0.0, theta};
  complex const ex = std::exp(mi);
  complex const e0 = (1.0 - ex) / it;
  complex const e1 = -ex / it + e0 / it;
  return {e0, e1};
}

complex filon_sum(std::vector<double> const& t, std::vector<double> const& w, double k,
                  double t_end, std::size_t stride) {
  complex sum{0.0, 0.0};
  std::size_t i = 0;
  std::size_t const last = t.size() - 1;
  while (i < last && t[i] < t_end) {
    std::size_t j = std::min(i + stride, last);
    double a = t[i], b = t[j];
    double fa = w[i], fb = w[j];
    if (b > t_end) {
      fb = fa + (fb - fa) * (t_end - a) / (b - a);
      b = t_end;
    }
    double const h = b - a;
    if (h > 0.0) {
      auto [e0, e1] = filon_moments(k * h);
      sum += std::polar(h, -k * a) * (fa * e0 + (fb - fa) * e1);
    }
    i = j;
  }
  return sum / (4.0 * pi);
}

void check_trace(KernelEvaluation const& trace) {
  if (trace.t_grid.size() < 2 || trace.t_grid.size() != trace.wtilde_values.size()) {
    throw ValidationError("kernel trace has an invalid grid");
  }
  for (std::size_t i = 1; i < trace.t_grid.size(); ++i) {
    if (!(trace.t_grid[i] > trace.t_grid[i - 1])) throw ValidationError("kernel trace grid not increasing");
  }
}

}  // namespace

void FrequencyLadder::validate() const {
  if (k_values.empty()) throw ValidationError("frequency ladder is empty");
  for (std::size_t i = 0; i < k_values.size(); ++i) {
    if (!(k_values[i] > 0.0) || !std::isfinite(k_values[i])) {
      throw ValidationError("frequencies must be positive and finite");
    }
    if (i > 0 && !(k_values[i] > k_values[i - 1])) {
      throw ValidationError("frequencies must be strictly increasing");
    }
  }
}

FrequencyLadder FrequencyLadder::geometric(double k_min, double k_max, int n) {
  if (n < 1 || !(k_min > 0.0) || (n > 1 && !(k_max > k_min))) {
    throw ValidationError("invalid geometric ladder");
  }
  FrequencyLadder l;
  for (int i = 0; i < n; ++i) {
    l.k_values.push_back(n == 1 ? k_min : k_min * std::pow(k_max / k_min, static_cast<double>(i) / (n - 1)));
  }
  l.k_values.back() = n == 1 ? k_min : k_max;
  l.validate();
  return l;
}

FrequencyLadder default_ladder(double B) { return FrequencyLadder::geometric(20.0 / B, 160.0 / B, 8); }

std::string model_name(FieldModel m) {
  switch (m) {
    case FieldModel::series: return "series";
    case FieldModel::asymptotic: return "asymptotic";
  }
  throw ValidationError("unknown field model");
}

FieldModel parse_model(std::string const& name) {
  if (name == "series") return FieldModel::series;
  if (name == "asymptotic") return FieldModel::asymptotic;
  throw ValidationError("unknown model '" + name + "' (expected series or asymptotic)");
}

complex free_field(Vec3 const& x, Vec3 const& x0, double k) {
  double const rho = distance(x, x0);
  if (!(rho > 0.0)) throw ValidationError("free_field: coincident points");
  if (!(k > 0.0)) throw ValidationError("free_field: k must be positive");
  return std::polar(1.0 / (4.0 * pi * rho), -k * rho);
}

complex trace_fourier(KernelEvaluation const& trace, double k, double t_end) {
  check_trace(trace);
  return filon_sum(trace.t_grid, trace.wtilde_values, k, t_end, 1);
}

SeriesField usc_series(Vec3 const& x, Vec3 const& x0, double k, double t_max,
                       KernelEvaluation const& trace) {
  check_trace(trace);
  if (!(k > 0.0)) throw ValidationError("usc_series: k must be positive");
  double const rho = distance(x, x0);
  double const tol = 1e-9 * (1.0 + rho);
  if (distance(trace.x, x) > tol || distance(trace.x0, x0) > tol ||
      std::abs(trace.t_grid.front() - rho) > tol) {
    throw ValidationError("usc_series: trace does not start at |x - x0| for this pair");
  }
  if (!(t_max > rho)) throw ValidationError("usc_series: T_max must exceed |x - x0|");
  SeriesField out;
  out.value = filon_sum(trace.t_grid, trace.wtilde_values, k, t_max, 1);
  complex const coarse = filon_sum(trace.t_grid, trace.wtilde_values, k, t_max, 2);
  out.quadrature_estimate = std::abs(out.value - coarse);
  out.truncation_bound = (t_max - rho) * trace.remainder_bound / (4.0 * pi);
  return out;
}

complex usc_asymptotic(Potential const& q, Vec3 const& x, Vec3 const& x0, double k) {
  double const rho = distance(x, x0);
  if (!(rho > 0.0)) throw ValidationError("usc_asymptotic: coincident points");
  if (!(k > 0.0)) throw ValidationError("usc_asymptotic: k must be positive");
  double const rq = segment_integral(q, x0, x, 64);
  return complex{0.0, 1.0} * std::polar(rq / (8.0 * pi * rho * k), -k * rho);
}

std::vector<Chord> layout_chords(SliceGeometry const& g, SinogramLayout const& layout) {
  layout.validate();
  Sinogram const grid = make_sinogram(g, layout);
  std::vector<Chord> chords;
  chords.reserve(static_cast<std::size_t>(layout.n_alpha) * layout.n_s);
  for (int i = 0; i < layout.n_alpha; ++i) {
    for (int j = 0; j < layout.n_s; ++j) chords.push_back(make_chord(g, grid.alpha(i), grid.offset(j)));
  }
  return chords;
}

PhaselessDataset synthesize_dataset(Potential const& q, SliceGeometry const& g,
                                    SinogramLayout const& layout, FrequencyLadder const& ladder,
                                    FieldModel model, std::uint64_t seed, double noise_level,
                                    SynthesisOptions const& opts) {
  ladder.validate();
  layout.validate();
  if (!(noise_level >= 0.0) || !std::isfinite(noise_level)) {
    throw ValidationError("noise level must be nonnegative");
  }
  PhaselessDataset ds;
  ds.slice = g;
  ds.layout = layout;
  ds.chords = layout_chords(g, layout);
  ds.ladder = ladder;
  ds.model = model;
  ds.noise_level = noise_level;
  ds.seed = seed;
  std::size_t const nc = ds.chords.size();
  std::size_t const nk = ladder.size();
  std::vector<PolarField> fields(nc * nk);

  if (model == FieldModel::asymptotic) {
    parallel_for(nc, [&](std::size_t c) {
      auto const& ch = ds.chords[c];
      for (std::size_t k = 0; k < nk; ++k) {
        fields[c * nk + k] = PolarField::from(usc_asymptotic(q, ch.x, ch.x0, ladder.k_values[k]));
      }
    });
  } else if (model == FieldModel::series) {
    if (nc * nk > opts.series_budget) {
      throw BudgetError("series model needs " + std::to_string(nc * nk) +
                        " chord-frequency samples, budget is " + std::to_string(opts.series_budget));
    }
    opts.quadrature.validate();
    // (alpha, s) and (alpha + pi, -s) are the same pair with roles swapped.
    std::vector<std::size_t> partner(nc);
    int const na = layout.n_alpha, ns = layout.n_s;
    for (int i = 0; i < na; ++i) {
      for (int j = 0; j < ns; ++j) {
        std::size_t const c = static_cast<std::size_t>(i) * ns + j;
        partner[c] = c;
        if (na % 2 == 0) partner[c] = static_cast<std::size_t>((i + na / 2) % na) * ns + (ns - 1 - j);
      }
    }
    std::vector<std::size_t> unique;
    for (std::size_t c = 0; c < nc; ++c) {
      if (partner[c] >= c) unique.push_back(c);
    }
    std::atomic<std::size_t> done{0};
    parallel_for(unique.size(), [&](std::size_t u) {
      std::size_t const c = unique[u];
      auto const& ch = ds.chords[c];
      double const t_max =
          opts.t_max > 0.0 ? opts.t_max : series_support_end(q, ch.x, ch.x0, opts.max_terms);
      if (q.empty() || !(t_max > ch.length)) {
        for (std::size_t k = 0; k < nk; ++k) fields[c * nk + k] = {};
      } else {
        auto const trace = kernel_trace(q, ch.x, ch.x0, t_max, opts.n_t, opts.quadrature, opts.tol,
                                        opts.max_terms);
        for (std::size_t k = 0; k < nk; ++k) {
          fields[c * nk + k] =
              PolarField::from(usc_series(ch.x, ch.x0, ladder.k_values[k], t_max, trace).value);
        }
      }
      std::size_t const p = partner[c];
      if (p != c) {
        for (std::size_t k = 0; k < nk; ++k) fields[p * nk + k] = fields[c * nk + k];
      }
      std::size_t const n = ++done;
      if (opts.progress) opts.progress(n, unique.size());
    });
  } else {
    throw ValidationError("invalid model tag");
  }

  if (opts.phase_perturbation) {
    for (std::size_t c = 0; c < nc; ++c) {
      for (std::size_t k = 0; k < nk; ++k) {
        fields[c * nk + k] = fields[c * nk + k].rotated(opts.phase_perturbation(c, k));
      }
    }
  }
  ds.f_values.resize(nc * nk);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < nc * nk; ++i) {
    double f = phaseless_value(fields[i]);
    if (noise_level > 0.0) f = std::max(0.0, f * (1.0 + noise_level * normal(rng)));
    ds.f_values[i] = f;
  }
  return ds;
}

std::vector<PhaselessDataset> synthesize_datasets(Potential const& q,
                                                  std::vector<double> const& heights,
                                                  SinogramLayout const& layout,
                                                  FrequencyLadder const& ladder, FieldModel model,
                                                  std::uint64_t seed, double noise_level,
                                                  SynthesisOptions const& opts) {
  std::vector<PhaselessDataset> out;
  for (std::size_t i = 0; i < heights.size(); ++i) {
    out.push_back(synthesize_dataset(q, slice_geometry(q.B(), heights[i]), layout, ladder, model,
                                     seed + i, noise_level, opts));
  }
  return out;
}

void write_dataset(std::filesystem::path const& path, PhaselessDataset const& ds,
                   std::string const& extra_provenance) {
  std::size_t const nc = ds.chords.size();
  std::size_t const nk = ds.ladder.size();
  if (ds.f_values.size() != nc * nk) throw ValidationError("dataset size mismatch");
  io::ByteWriter w;
  w.magic("PHDS");
  w.u32(dataset_version);
  w.u32(static_cast<std::uint32_t>(nc));
  w.u32(static_cast<std::uint32_t>(nk));
  w.f64(ds.slice.B);
  w.f64(ds.slice.a);
  w.u32(static_cast<std::uint32_t>(ds.model));
  w.u32(static_cast<std::uint32_t>(ds.layout.n_alpha));
  w.f64(ds.noise_level);
  w.u64(ds.seed);
  w.f64(ds.layout.edge_fraction);
  for (auto const& c : ds.chords) {
    w.f64(c.alpha);
    w.f64(c.s);
  }
  w.f64s(ds.ladder.k_values);
  w.f64s(ds.f_values);
  io::write_file(path, w.bytes());

  json side{{"format", "phaseless-dataset/1"},
            {"tool_version", std::string(io::tool_version())},
            {"model", model_name(ds.model)},
            {"geometry", {{"B", ds.slice.B}, {"a", ds.slice.a}, {"B_a", ds.slice.radius}}},
            {"layout",
             {{"n_alpha", ds.layout.n_alpha},
              {"n_s", ds.layout.n_s},
              {"edge_fraction", ds.layout.edge_fraction}}},
            {"k_values", ds.ladder.k_values},
            {"noise", {{"sigma", ds.noise_level}, {"seed", ds.seed}}},
            {"sha256", io::sha256_hex(w.bytes())}};
  if (!extra_provenance.empty()) {
    json extra = json::parse(extra_provenance);
    for (auto it = extra.begin(); it != extra.end(); ++it) side[it.key()] = it.value();
  }
  io::write_text(io::sidecar_path(path), side.dump(1));
}

PhaselessDataset read_dataset(std::filesystem::path const& path) {
  auto const bytes = io::read_file(path);
  io::ByteReader r(bytes, path.string());
  r.expect_magic("PHDS");
  if (r.u32() != dataset_version) r.fail("unsupported dataset version");
  std::uint32_t const nc = r.u32();
  std::uint32_t const nk = r.u32();
  double const B = r.f64();
  double const a = r.f64();
  std::uint32_t const tag = r.u32();
  std::uint32_t const n_alpha = r.u32();
  PhaselessDataset ds;
  ds.noise_level = r.f64();
  ds.seed = r.u64();
  ds.layout.edge_fraction = r.f64();
  if (tag != static_cast<std::uint32_t>(FieldModel::series) &&
      tag != static_cast<std::uint32_t>(FieldModel::asymptotic)) {
    r.fail("unknown model tag " + std::to_string(tag));
  }
  ds.model = static_cast<FieldModel>(tag);
  if (n_alpha == 0 || nc % n_alpha != 0) r.fail("chord count does not match the angle count");
  std::size_t const need = (2 * static_cast<std::size_t>(nc) + nk + static_cast<std::size_t>(nc) * nk) * 8;
  if (r.remaining() != need) r.fail("payload size does not match the header");
  try {
    ds.slice = slice_geometry(B, a);
    ds.layout.n_alpha = static_cast<int>(n_alpha);
    ds.layout.n_s = static_cast<int>(nc / n_alpha);
    ds.layout.validate();
  } catch (ValidationError const& e) {
    r.fail(std::string("invalid header: ") + e.what());
  }
  ds.chords.reserve(nc);
  for (std::uint32_t i = 0; i < nc; ++i) {
    double const alpha = r.f64();
    double const s = r.f64();
    try {
      ds.chords.push_back(make_chord(ds.slice, alpha, s));
    } catch (ValidationError const& e) {
      r.fail(std::string("invalid chord: ") + e.what());
    }
  }
  ds.ladder.k_values = r.f64s(nk);
  ds.f_values = r.f64s(static_cast<std::size_t>(nc) * nk);
  try {
    ds.ladder.validate();
  } catch (ValidationError const& e) {
    r.fail(std::string("invalid frequency table: ") + e.what());
  }
  for (double f : ds.f_values) {
    if (!std::isfinite(f) || f < 0.0) r.fail("f values must be finite and nonnegative");
  }
  return ds;
}

}  // namespace phaseless
