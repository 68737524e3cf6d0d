#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "phaseless/geometry.hpp"
#include "phaseless/phantom.hpp"

namespace phaseless {

/// Layout of an (alpha, s) acquisition grid on one slice.
///
/// alpha_i = 2pi (i + 1) / n_alpha covers (0, 2pi]; s_j are the n_s cell
/// centers of (-s_max, s_max) with s_max = (1 - edge_fraction) B_a.
struct SinogramLayout {
  int n_alpha{360};
  int n_s{256};
  double edge_fraction{0.02};

  void validate() const;
  double s_max(SliceGeometry const& g) const { return (1.0 - edge_fraction) * g.radius; }
};

/// Radon values on the (alpha, s) grid for one slice; row-major in alpha.
struct Sinogram {
  SliceGeometry slice;
  int n_alpha{0};
  int n_s{0};
  double s_max{0.0};
  std::vector<double> values;

  double alpha(int i) const { return two_pi * (i + 1) / n_alpha; }
  double offset(int j) const { return -s_max + (j + 0.5) * (2.0 * s_max / n_s); }
  double ds() const { return 2.0 * s_max / n_s; }
  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * n_s + j]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * n_s + j]; }
};

/// Empty (all-zero) sinogram with the given layout.
Sinogram make_sinogram(SliceGeometry const& g, SinogramLayout const& layout);

/// Reconstructed slice on an n x n grid of cell centers over [-B_a, B_a]^2.
/// values are row-major with rows along y.
struct SliceImage {
  SliceGeometry slice;
  int n{0};
  std::vector<double> values;

  double half_width() const { return slice.radius; }
  double coord(int i) const { return -slice.radius + (i + 0.5) * (2.0 * slice.radius / n); }
  double& at(int row, int col) { return values[static_cast<std::size_t>(row) * n + col]; }
  double at(int row, int col) const { return values[static_cast<std::size_t>(row) * n + col]; }
};

/// Direct phantom samples on the SliceImage grid of the given size.
SliceImage sample_slice(Potential const& q, SliceGeometry const& g, int n_image);

/// (Rq)(alpha, s) on slice g: the chord integral of q along <y, n(alpha)> = s.
double radon_forward(Potential const& q, SliceGeometry const& g, double alpha, double s,
                     int n_quad = 16);

/// Radon values on the layout grid (parallel over angles).
Sinogram sinogram(Potential const& q, SliceGeometry const& g, SinogramLayout const& layout,
                  int n_quad = 16);

enum class Apodization { none, hann };

struct FbpOptions {
  Apodization apodization{Apodization::hann};
};

/// Filtered back-projection: band-limited ramp filter (Hann-apodized by
/// default) on each zero-padded angular profile, then back-projection with
/// linear interpolation in s. Sinogram data is taken as zero outside the
/// sampled offsets; the filtered profile is used on the extended range.
SliceImage fbp_invert(Sinogram const& sg, int n_image, FbpOptions const& opts = {});

// Binary records (little-endian, 40-byte header) with JSON sidecars.
void write_sinogram(std::filesystem::path const& path, Sinogram const& sg);
Sinogram read_sinogram(std::filesystem::path const& path);
void write_slice_image(std::filesystem::path const& path, SliceImage const& img);
SliceImage read_slice_image(std::filesystem::path const& path);

namespace io {
class ByteWriter;
class ByteReader;
}  // namespace io
void encode_slice_image(io::ByteWriter& w, SliceImage const& img);
SliceImage decode_slice_image(io::ByteReader& r);

/// 8-bit binary PGM with linear min-max scaling; the sidecar records the
/// scaling.
void write_pgm(std::filesystem::path const& path, SliceImage const& img);

}  // namespace phaseless
