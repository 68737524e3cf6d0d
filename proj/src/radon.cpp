#include "phaseless/radon.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <mutex>
#include <sstream>

#include "json.hpp"
#include "phaseless/error.hpp"
#include "phaseless/io.hpp"
#include "phaseless/parallel.hpp"

namespace phaseless {
namespace {

using nlohmann::json;

constexpr std::uint32_t format_version = 1;

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  return FftwBuffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * n)));
}

// Four-fold padding: the filtered profile is then alias-free for offsets up to
// one full profile width beyond either end, which covers the image corners.
std::size_t padded_length(int n_s) {
  std::size_t p = 1;
  while (p < 4 * static_cast<std::size_t>(n_s)) p <<= 1;
  return p;
}

// Real frequency response of the band-limited ramp (Ram-Lak) filter, from the
// FFT of its sampled spatial kernel, times the apodization window.
std::vector<double> ramp_response(std::size_t P, double ds, Apodization apod) {
  auto kernel = fftw_buffer<double>(P);
  auto spectrum = fftw_buffer<fftw_complex>(P / 2 + 1);
  for (std::size_t n = 0; n < P; ++n) {
    long const m = (n <= P / 2) ? static_cast<long>(n) : static_cast<long>(n) - static_cast<long>(P);
    double h = 0.0;
    if (m == 0) {
      h = 1.0 / (4.0 * ds * ds);
    } else if (m % 2 != 0) {
      h = -1.0 / (pi * pi * static_cast<double>(m) * static_cast<double>(m) * ds * ds);
    }
    kernel[n] = h;
  }
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(P), kernel.get(), spectrum.get(), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  std::vector<double> response(P / 2 + 1);
  for (std::size_t k = 0; k <= P / 2; ++k) {
    double w = 1.0;
    if (apod == Apodization::hann) {
      w = 0.5 * (1.0 + std::cos(two_pi * static_cast<double>(k) / static_cast<double>(P)));
    }
    response[k] = spectrum[k][0] * w;
  }
  return response;
}

json geometry_json(SliceGeometry const& g) { return {{"B", g.B}, {"a", g.a}, {"B_a", g.radius}}; }

}  // namespace

void SinogramLayout::validate() const {
  if (n_alpha < 4) throw ValidationError("sinogram needs n_alpha >= 4");
  if (n_s < 4) throw ValidationError("sinogram needs n_s >= 4");
  if (!(edge_fraction >= 0.0 && edge_fraction < 1.0)) {
    throw ValidationError("edge fraction must lie in [0, 1)");
  }
}

Sinogram make_sinogram(SliceGeometry const& g, SinogramLayout const& layout) {
  layout.validate();
  Sinogram sg;
  sg.slice = g;
  sg.n_alpha = layout.n_alpha;
  sg.n_s = layout.n_s;
  sg.s_max = layout.s_max(g);
  sg.values.assign(static_cast<std::size_t>(sg.n_alpha) * sg.n_s, 0.0);
  return sg;
}

SliceImage sample_slice(Potential const& q, SliceGeometry const& g, int n_image) {
  if (n_image < 2) throw ValidationError("image needs at least 2 pixels per side");
  SliceImage img;
  img.slice = g;
  img.n = n_image;
  img.values.resize(static_cast<std::size_t>(n_image) * n_image);
  for (int r = 0; r < n_image; ++r) {
    for (int c = 0; c < n_image; ++c) img.at(r, c) = q(Vec3{img.coord(c), img.coord(r), g.a});
  }
  return img;
}

double radon_forward(Potential const& q, SliceGeometry const& g, double alpha, double s,
                     int n_quad) {
  return line_integral(q, make_chord(g, alpha, s), n_quad);
}

Sinogram sinogram(Potential const& q, SliceGeometry const& g, SinogramLayout const& layout,
                  int n_quad) {
  Sinogram sg = make_sinogram(g, layout);
  parallel_for(static_cast<std::size_t>(sg.n_alpha), [&](std::size_t i) {
    int const row = static_cast<int>(i);
    for (int j = 0; j < sg.n_s; ++j) {
      sg.at(row, j) = radon_forward(q, g, sg.alpha(row), sg.offset(j), n_quad);
    }
  });
  return sg;
}

SliceImage fbp_invert(Sinogram const& sg, int n_image, FbpOptions const& opts) {
  if (sg.n_s < 4 || sg.n_alpha < 1) throw ValidationError("FBP needs n_s >= 4 and n_alpha >= 1");
  if (n_image < 2) throw ValidationError("FBP needs n_image >= 2");
  if (sg.values.size() != static_cast<std::size_t>(sg.n_alpha) * sg.n_s) {
    throw ValidationError("sinogram value count does not match its layout");
  }
  for (double v : sg.values) {
    if (!std::isfinite(v)) throw ValidationError("sinogram contains non-finite values");
  }

  double const ds = sg.ds();
  std::size_t const P = padded_length(sg.n_s);
  std::vector<double> const response = ramp_response(P, ds, opts.apodization);

  // Filter every angular profile. The filtered profile is kept on the
  // extended index range [lo, hi) where the circular convolution equals the
  // linear one; the data itself is zero outside the sampled offsets.
  long const lo = static_cast<long>(sg.n_s) - static_cast<long>(P / 2);
  long const hi = static_cast<long>(P / 2);
  std::size_t const width = static_cast<std::size_t>(hi - lo);
  std::vector<double> filtered(static_cast<std::size_t>(sg.n_alpha) * width);
  fftw_plan forward;
  fftw_plan backward;
  {
    auto in = fftw_buffer<double>(P);
    auto out = fftw_buffer<fftw_complex>(P / 2 + 1);
    std::lock_guard lock(fftw_planner_mutex());
    forward = fftw_plan_dft_r2c_1d(static_cast<int>(P), in.get(), out.get(),
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    backward = fftw_plan_dft_c2r_1d(static_cast<int>(P), out.get(), in.get(),
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  parallel_for(static_cast<std::size_t>(sg.n_alpha), [&](std::size_t i) {
    auto profile = fftw_buffer<double>(P);
    auto spectrum = fftw_buffer<fftw_complex>(P / 2 + 1);
    std::fill(profile.get(), profile.get() + P, 0.0);
    for (int j = 0; j < sg.n_s; ++j) profile[j] = sg.at(static_cast<int>(i), j);
    fftw_execute_dft_r2c(forward, profile.get(), spectrum.get());
    for (std::size_t k = 0; k <= P / 2; ++k) {
      spectrum[k][0] *= response[k];
      spectrum[k][1] *= response[k];
    }
    fftw_execute_dft_c2r(backward, spectrum.get(), profile.get());
    double const scale = ds / static_cast<double>(P);
    for (long m = lo; m < hi; ++m) {
      std::size_t const src = static_cast<std::size_t>((m + static_cast<long>(P)) % static_cast<long>(P));
      filtered[i * width + static_cast<std::size_t>(m - lo)] = profile[src] * scale;
    }
  });
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }

  // Back-project: q(y) = (pi / n_alpha) * sum_i Q_i(<y, n(alpha_i)>).
  SliceImage img;
  img.slice = sg.slice;
  img.n = n_image;
  img.values.assign(static_cast<std::size_t>(n_image) * n_image, 0.0);
  std::vector<double> cos_a(sg.n_alpha);
  std::vector<double> sin_a(sg.n_alpha);
  for (int i = 0; i < sg.n_alpha; ++i) {
    cos_a[i] = std::cos(sg.alpha(i));
    sin_a[i] = std::sin(sg.alpha(i));
  }
  double const weight = pi / sg.n_alpha;
  double const last = static_cast<double>(width - 1);
  parallel_for(static_cast<std::size_t>(n_image), [&](std::size_t r) {
    double const y = img.coord(static_cast<int>(r));
    for (int c = 0; c < n_image; ++c) {
      double const x = img.coord(c);
      double sum = 0.0;
      for (int i = 0; i < sg.n_alpha; ++i) {
        double const s = x * cos_a[i] + y * sin_a[i];
        double const u = (s + sg.s_max) / ds - 0.5 - static_cast<double>(lo);
        if (u < 0.0 || u > last) continue;
        std::size_t j = static_cast<std::size_t>(u);
        if (j + 1 >= width) j = width - 2;
        double const f = u - static_cast<double>(j);
        double const* row = &filtered[static_cast<std::size_t>(i) * width];
        sum += (1.0 - f) * row[j] + f * row[j + 1];
      }
      img.at(static_cast<int>(r), c) = weight * sum;
    }
  });
  return img;
}

void write_sinogram(std::filesystem::path const& path, Sinogram const& sg) {
  io::ByteWriter w;
  w.magic("SGRM");
  w.u32(format_version);
  w.u32(static_cast<std::uint32_t>(sg.n_alpha));
  w.u32(static_cast<std::uint32_t>(sg.n_s));
  w.f64(sg.slice.B);
  w.f64(sg.slice.a);
  w.f64(sg.s_max);
  w.f64s(sg.values);
  io::write_file(path, w.bytes());

  json side{{"format", "sinogram/1"},
            {"geometry", geometry_json(sg.slice)},
            {"n_alpha", sg.n_alpha},
            {"n_s", sg.n_s},
            {"s_max", sg.s_max},
            {"values", sg.values},
            {"sha256", io::sha256_hex(w.bytes())},
            {"tool", io::tool_version()}};
  io::write_text(io::sidecar_path(path), side.dump(1));
}

Sinogram read_sinogram(std::filesystem::path const& path) {
  auto const bytes = io::read_file(path);
  io::ByteReader r(bytes, path.string());
  r.expect_magic("SGRM");
  if (r.u32() != format_version) r.fail("unsupported sinogram version");
  Sinogram sg;
  sg.n_alpha = static_cast<int>(r.u32());
  sg.n_s = static_cast<int>(r.u32());
  double const B = r.f64();
  double const a = r.f64();
  sg.s_max = r.f64();
  try {
    sg.slice = slice_geometry(B, a);
  } catch (ValidationError const& e) {
    r.fail(std::string("invalid slice header: ") + e.what());
  }
  if (sg.n_alpha < 1 || sg.n_s < 1 || !(sg.s_max > 0.0 && sg.s_max < sg.slice.radius)) {
    r.fail("invalid sinogram layout in header");
  }
  std::size_t const count = static_cast<std::size_t>(sg.n_alpha) * sg.n_s;
  if (r.remaining() != count * 8) r.fail("payload size does not match header");
  sg.values = r.f64s(count);
  return sg;
}

void encode_slice_image(io::ByteWriter& w, SliceImage const& img) {
  w.magic("SIMG");
  w.u32(format_version);
  w.u32(static_cast<std::uint32_t>(img.n));
  w.u32(static_cast<std::uint32_t>(img.n));
  w.f64(img.slice.B);
  w.f64(img.slice.a);
  w.f64(img.half_width());
  w.f64s(img.values);
}

SliceImage decode_slice_image(io::ByteReader& r) {
  r.expect_magic("SIMG");
  if (r.u32() != format_version) r.fail("unsupported slice image version");
  std::uint32_t const rows = r.u32();
  std::uint32_t const cols = r.u32();
  double const B = r.f64();
  double const a = r.f64();
  double const half = r.f64();
  if (rows != cols || rows < 2) r.fail("slice image must be square with n >= 2");
  SliceImage img;
  try {
    img.slice = slice_geometry(B, a);
  } catch (ValidationError const& e) {
    r.fail(std::string("invalid slice header: ") + e.what());
  }
  if (std::abs(half - img.slice.radius) > 1e-12 * B) r.fail("half width does not match B_a");
  img.n = static_cast<int>(rows);
  img.values = r.f64s(static_cast<std::size_t>(rows) * cols);
  return img;
}

void write_slice_image(std::filesystem::path const& path, SliceImage const& img) {
  io::ByteWriter w;
  encode_slice_image(w, img);
  io::write_file(path, w.bytes());
  json side{{"format", "slice-image/1"},
            {"geometry", geometry_json(img.slice)},
            {"n", img.n},
            {"values", img.values},
            {"sha256", io::sha256_hex(w.bytes())},
            {"tool", io::tool_version()}};
  io::write_text(io::sidecar_path(path), side.dump(1));
}

SliceImage read_slice_image(std::filesystem::path const& path) {
  auto const bytes = io::read_file(path);
  io::ByteReader r(bytes, path.string());
  SliceImage img = decode_slice_image(r);
  if (r.remaining() != 0) r.fail("trailing bytes after slice image");
  return img;
}

void write_pgm(std::filesystem::path const& path, SliceImage const& img) {
  auto const [lo_it, hi_it] = std::minmax_element(img.values.begin(), img.values.end());
  double const lo = *lo_it;
  double const hi = *hi_it;
  double const span = hi > lo ? hi - lo : 1.0;
  std::ostringstream os;
  os << "P5\n" << img.n << ' ' << img.n << "\n255\n";
  std::string data = os.str();
  // Top row is +y.
  for (int r = img.n - 1; r >= 0; --r) {
    for (int c = 0; c < img.n; ++c) {
      double const v = (img.at(r, c) - lo) / span;
      data.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)))));
    }
  }
  io::write_text(path, data);
  json side{{"format", "pgm-scaling/1"},
            {"min", lo},
            {"max", hi},
            {"mapping", "gray = round(255 * (value - min) / (max - min))"},
            {"orientation", "top row is +y"},
            {"geometry", geometry_json(img.slice)}};
  io::write_text(io::sidecar_path(path), side.dump(1));
}

}  // namespace phaseless
