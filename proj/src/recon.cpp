#include "phaseless/recon.hpp"

#include <gsl/gsl_multifit.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "json.hpp"
#include "phaseless/error.hpp"
#include "phaseless/io.hpp"
#include "phaseless/parallel.hpp"

namespace phaseless {

using nlohmann::json;

std::string limit_model_name(LimitModel m) {
  return m == LimitModel::two_term ? "two-term" : "three-term";
}

LimitModel parse_limit_model(std::string const& name) {
  if (name == "two-term") return LimitModel::two_term;
  if (name == "three-term") return LimitModel::three_term;
  throw ValidationError("unknown limit model '" + name + "' (expected two-term or three-term)");
}

LimitEstimate extract_limit(std::span<double const> k, std::span<double const> f, LimitModel model) {
  if (k.size() != f.size()) throw ValidationError("extract_limit: k and f sizes differ");
  std::size_t const n = k.size();
  if (n < 3) throw ValidationError("extract_limit: at least 3 frequencies are required");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(k[i]) || !std::isfinite(f[i])) throw ValidationError("extract_limit: non-finite sample");
    if (!(k[i] > 0.0)) throw ValidationError("extract_limit: frequencies must be positive");
  }
  auto const [lo, hi] = std::minmax_element(k.begin(), k.end());
  if (*hi < 4.0 * *lo) throw ValidationError("extract_limit: ladder must span a factor of at least 4");
  std::size_t const p = model == LimitModel::two_term ? 2 : 3;

  using matrix_ptr = std::unique_ptr<gsl_matrix, decltype(&gsl_matrix_free)>;
  using vector_ptr = std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)>;
  matrix_ptr X(gsl_matrix_alloc(n, p), gsl_matrix_free);
  matrix_ptr cov(gsl_matrix_alloc(p, p), gsl_matrix_free);
  vector_ptr y(gsl_vector_alloc(n), gsl_vector_free);
  vector_ptr w(gsl_vector_alloc(n), gsl_vector_free);
  vector_ptr c(gsl_vector_alloc(p), gsl_vector_free);
  std::unique_ptr<gsl_multifit_linear_workspace, decltype(&gsl_multifit_linear_free)> work(
      gsl_multifit_linear_alloc(n, p), gsl_multifit_linear_free);
  for (std::size_t i = 0; i < n; ++i) {
    double const inv = 1.0 / k[i];
    gsl_matrix_set(X.get(), i, 0, 1.0);
    gsl_matrix_set(X.get(), i, 1, inv);
    if (p == 3) gsl_matrix_set(X.get(), i, 2, inv * inv);
    gsl_vector_set(y.get(), i, k[i] * f[i]);
    gsl_vector_set(w.get(), i, k[i] * k[i]);
  }
  double chisq = 0.0;
  if (gsl_multifit_wlinear(X.get(), w.get(), y.get(), c.get(), cov.get(), &chisq, work.get()) != 0) {
    throw ValidationError("extract_limit: least-squares fit failed");
  }
  LimitEstimate out;
  out.value = gsl_vector_get(c.get(), 0);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double fit = 0.0;
    for (std::size_t j = 0; j < p; ++j) fit += gsl_matrix_get(X.get(), i, j) * gsl_vector_get(c.get(), j);
    double const r = k[i] * f[i] - fit;
    ss += r * r;
  }
  out.residual = std::sqrt(ss / n);
  out.k_min = *lo;
  out.k_max = *hi;
  out.n_used = static_cast<int>(n);
  out.model = model;
  return out;
}

Sinogram sinogram_from_data(PhaselessDataset const& ds, LimitOptions const& opts) {
  ds.layout.validate();
  Sinogram sg = make_sinogram(ds.slice, ds.layout);
  std::size_t const nk = ds.ladder.size();
  if (ds.chords.size() != sg.values.size() || ds.f_values.size() != sg.values.size() * nk) {
    throw ValidationError("dataset chords do not match the sinogram grid");
  }
  double const tol = 1e-12 * (1.0 + ds.slice.B);
  for (int i = 0; i < sg.n_alpha; ++i) {
    for (int j = 0; j < sg.n_s; ++j) {
      auto const& c = ds.chords[static_cast<std::size_t>(i) * sg.n_s + j];
      if (std::abs(c.alpha - sg.alpha(i)) > 1e-12 || std::abs(c.s - sg.offset(j)) > tol) {
        throw ValidationError("dataset chord (" + std::to_string(i) + ", " + std::to_string(j) +
                              ") does not match the sinogram grid");
      }
    }
  }
  std::vector<double> k_used;
  std::vector<std::size_t> idx;
  for (std::size_t m = 0; m < nk; ++m) {
    if (ds.ladder.k_values[m] >= opts.k_min) {
      k_used.push_back(ds.ladder.k_values[m]);
      idx.push_back(m);
    }
  }
  parallel_for(sg.values.size(), [&](std::size_t c) {
    std::vector<double> f(idx.size());
    for (std::size_t m = 0; m < idx.size(); ++m) f[m] = ds.f(c, idx[m]);
    double a = extract_limit(k_used, f, opts.model).value;
    if (opts.clamp) a = std::max(0.0, a);
    sg.values[c] = 8.0 * pi * ds.chords[c].length * a;
  });
  return sg;
}

Sinogram sinogram_from_data(PhaselessDataset const& ds, SinogramLayout const& expected,
                            LimitOptions const& opts) {
  if (ds.layout.n_alpha != expected.n_alpha || ds.layout.n_s != expected.n_s ||
      ds.layout.edge_fraction != expected.edge_fraction) {
    throw ValidationError("dataset layout does not match the expected sinogram layout");
  }
  return sinogram_from_data(ds, opts);
}

SliceImage reconstruct_slice(Sinogram const& sg, int n_image, FbpOptions const& opts) {
  return fbp_invert(sg, n_image, opts);
}

Volume reconstruct_volume(std::vector<PhaselessDataset> const& datasets, int n_image,
                          LimitOptions const& limit, FbpOptions const& fbp) {
  if (datasets.empty()) throw ValidationError("no datasets to reconstruct");
  std::vector<std::size_t> order(datasets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return datasets[a].slice.a < datasets[b].slice.a; });
  Volume v;
  v.B = datasets.front().slice.B;
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto const& ds = datasets[order[i]];
    if (ds.slice.B != v.B) throw ValidationError("datasets disagree on B");
    if (i > 0 && ds.slice.a == datasets[order[i - 1]].slice.a) {
      throw ValidationError("duplicate slice height " + std::to_string(ds.slice.a));
    }
    v.slices.push_back(reconstruct_slice(sinogram_from_data(ds, limit), n_image, fbp));
  }
  return v;
}

namespace {

struct Accum {
  double num2{0.0}, den2{0.0}, num_inf{0.0}, den_inf{0.0};

  void add(SliceImage const& recon, Potential const& truth) {
    SliceImage const t = sample_slice(truth, recon.slice, recon.n);
    for (std::size_t i = 0; i < t.values.size(); ++i) {
      double const d = recon.values[i] - t.values[i];
      num2 += d * d;
      den2 += t.values[i] * t.values[i];
      num_inf = std::max(num_inf, std::abs(d));
      den_inf = std::max(den_inf, std::abs(t.values[i]));
    }
  }

  Metrics result() const {
    auto ratio = [](double num, double den) {
      if (den > 0.0) return num / den;
      return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    };
    return {ratio(std::sqrt(num2), std::sqrt(den2)), ratio(num_inf, den_inf), num_inf};
  }
};

}  // namespace

Metrics metrics(SliceImage const& recon, Potential const& truth) {
  if (std::abs(recon.slice.B - truth.B()) > 1e-12 * truth.B()) {
    throw ValidationError("reconstruction and phantom disagree on B");
  }
  Accum acc;
  acc.add(recon, truth);
  return acc.result();
}

Metrics metrics(Volume const& recon, Potential const& truth) {
  Accum acc;
  for (auto const& s : recon.slices) {
    if (std::abs(s.slice.B - truth.B()) > 1e-12 * truth.B()) {
      throw ValidationError("reconstruction and phantom disagree on B");
    }
    acc.add(s, truth);
  }
  return acc.result();
}

void write_volume(std::filesystem::path const& path, Volume const& v,
                  std::string const& extra_provenance) {
  io::ByteWriter w;
  json heights = json::array();
  json grids = json::array();
  for (auto const& s : v.slices) {
    encode_slice_image(w, s);
    heights.push_back(s.slice.a);
    grids.push_back(s.n);
  }
  io::write_file(path, w.bytes());
  json side{{"format", "volume/1"},
            {"tool_version", std::string(io::tool_version())},
            {"B", v.B},
            {"heights", heights},
            {"n_image", grids},
            {"sha256", io::sha256_hex(w.bytes())}};
  if (!extra_provenance.empty()) {
    json extra = json::parse(extra_provenance);
    for (auto it = extra.begin(); it != extra.end(); ++it) side[it.key()] = it.value();
  }
  io::write_text(io::sidecar_path(path), side.dump(1));
}

Volume read_volume(std::filesystem::path const& path) {
  auto const bytes = io::read_file(path);
  io::ByteReader r(bytes, path.string());
  Volume v;
  while (r.remaining() > 0) v.slices.push_back(decode_slice_image(r));
  if (v.slices.empty()) r.fail("volume holds no slices");
  v.B = v.slices.front().slice.B;
  for (std::size_t i = 1; i < v.slices.size(); ++i) {
    if (v.slices[i].slice.B != v.B) r.fail("slices disagree on B");
    if (!(v.slices[i].slice.a > v.slices[i - 1].slice.a)) r.fail("slice heights not increasing");
  }
  return v;
}

}  // namespace phaseless
