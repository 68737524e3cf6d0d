#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "phaseless/phantom.hpp"
#include "phaseless/radon.hpp"
#include "phaseless/scatter.hpp"

namespace phaseless {

/// Model for k f(k) on a finite ladder: A + B/k, or A + B/k + C/k^2.
enum class LimitModel { two_term, three_term };

std::string limit_model_name(LimitModel m);
LimitModel parse_limit_model(std::string const& name);

/// Estimate of lim k f(k) for one chord.
struct LimitEstimate {
  double value{0.0};     ///< A
  double residual{0.0};  ///< RMS of k f - model over the frequencies used
  double k_min{0.0};
  double k_max{0.0};
  int n_used{0};
  LimitModel model{LimitModel::three_term};
};

/// Weighted least squares (weights k^2) of k f(k) against the model.
/// Requires at least 3 frequencies spanning a factor >= 4, all finite.
LimitEstimate extract_limit(std::span<double const> k, std::span<double const> f,
                            LimitModel model = LimitModel::three_term);

struct LimitOptions {
  LimitModel model{LimitModel::three_term};
  bool clamp{false};   ///< clamp negative limits to 0 before scaling
  double k_min{0.0};   ///< ignore frequencies below this value
};

/// 8π |x - x0| lim k f per chord, on the dataset's own layout. Throws
/// ValidationError when the chord table is not that layout's grid.
Sinogram sinogram_from_data(PhaselessDataset const& ds, LimitOptions const& opts = {});

/// Same, additionally requiring the dataset layout to equal `expected`.
Sinogram sinogram_from_data(PhaselessDataset const& ds, SinogramLayout const& expected,
                            LimitOptions const& opts = {});

/// FBP of the recovered sinogram.
SliceImage reconstruct_slice(Sinogram const& sg, int n_image, FbpOptions const& opts = {});

/// Slice images stacked by increasing height.
struct Volume {
  double B{1.0};
  std::vector<SliceImage> slices;
};

/// Independent per-slice reconstruction. Throws on duplicate heights or
/// mismatched B.
Volume reconstruct_volume(std::vector<PhaselessDataset> const& datasets, int n_image,
                          LimitOptions const& limit = {}, FbpOptions const& fbp = {});

struct Metrics {
  double rel_L2{0.0};
  double rel_Linf{0.0};
  double max_abs{0.0};
};

/// Errors of the reconstruction against phantom samples on the same grid.
/// Relative errors are 0 when both are zero and infinite when only the
/// truth vanishes.
Metrics metrics(SliceImage const& recon, Potential const& truth);
/// Pooled over all slices.
Metrics metrics(Volume const& recon, Potential const& truth);

/// Concatenated slice-image records; the "<file>.json" manifest lists
/// heights, grid and provenance (extra_provenance is a JSON object text).
void write_volume(std::filesystem::path const& path, Volume const& v,
                  std::string const& extra_provenance = {});
Volume read_volume(std::filesystem::path const& path);

}  // namespace phaseless
