#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "phaseless/geometry.hpp"
#include "phaseless/phantom.hpp"
#include "phaseless/radon.hpp"
#include "phaseless/timedomain.hpp"

namespace phaseless {

using complex = std::complex<double>;

/// Increasing positive wavenumbers (units 1/length).
struct FrequencyLadder {
  std::vector<double> k_values;

  void validate() const;
  std::size_t size() const { return k_values.size(); }
  /// n values geometric from k_min to k_max, endpoints included.
  static FrequencyLadder geometric(double k_min, double k_max, int n);
};

/// Default: 8 values geometric from 20 to 160 in units 1/B.
FrequencyLadder default_ladder(double B = 1.0);

enum class FieldModel : std::uint32_t { series = 1, asymptotic = 2 };

std::string model_name(FieldModel m);
/// Throws ValidationError for an unknown tag.
FieldModel parse_model(std::string const& name);

/// Field stored by modulus and phase. Phase rotations only touch the phase,
/// so the modulus is unaffected bit for bit.
struct PolarField {
  double modulus{0.0};
  double phase{0.0};

  static PolarField from(complex u) { return {std::abs(u), std::arg(u)}; }
  complex value() const { return std::polar(modulus, phase); }
  PolarField rotated(double theta) const { return {modulus, phase + theta}; }
};

/// exp(-ik|x - x0|) / (4π|x - x0|).
complex free_field(Vec3 const& x, Vec3 const& x0, double k);

/// (1/4π) ∫ w(t) e^{-ikt} dt over [trace start, t_end] with w piecewise
/// linear on the trace grid (Filon rule, exact for that interpolant). Any
/// real k; k = 0 gives the trapezoid integral. t_end beyond the last node is
/// treated as zero continuation.
complex trace_fourier(KernelEvaluation const& trace, double k, double t_end);

struct SeriesField {
  complex value;
  double truncation_bound{0.0};  ///< (1/4π)(T_max - ρ) times the series remainder bound
  double quadrature_estimate{0.0};  ///< |full grid - every other node|
};

/// Scattered field from the tabulated kernel. Throws when the trace does
/// not belong to (x, x0) or T_max <= ρ.
SeriesField usc_series(Vec3 const& x, Vec3 const& x0, double k, double t_max,
                       KernelEvaluation const& trace);

/// i e^{-ikρ} (∫_L q dσ) / (8πρk).
complex usc_asymptotic(Potential const& q, Vec3 const& x, Vec3 const& x0, double k);

inline double phaseless_value(complex u) { return std::abs(u); }
inline double phaseless_value(PolarField const& u) { return u.modulus; }

/// Modulus-only measurements for one slice. f_values is row-major
/// chords x frequencies.
struct PhaselessDataset {
  SliceGeometry slice;
  SinogramLayout layout;
  std::vector<Chord> chords;
  FrequencyLadder ladder;
  std::vector<double> f_values;
  FieldModel model{FieldModel::asymptotic};
  double noise_level{0.0};
  std::uint64_t seed{0};

  double f(std::size_t chord, std::size_t k) const {
    return f_values[chord * ladder.size() + k];
  }
};

/// Chords of the layout grid in row-major (alpha, s) order.
std::vector<Chord> layout_chords(SliceGeometry const& g, SinogramLayout const& layout);

struct SynthesisOptions {
  QuadratureSpec quadrature;
  int n_t{400};            ///< uniform steps of the kernel trace
  double tol{1e-6};        ///< series truncation tolerance
  int max_terms{4};
  double t_max{0.0};       ///< 0: support end of the truncated series
  std::size_t series_budget{100000};  ///< max chords x frequencies for the series model
  /// Optional per-sample phase rotation applied before the modulus is taken.
  std::function<double(std::size_t chord, std::size_t k)> phase_perturbation;
  /// Called after each computed chord with (done, total); may be empty.
  std::function<void(std::size_t, std::size_t)> progress;
};

/// f(chord, k) = |u_sc| for every chord of the layout, optionally times
/// (1 + σ ξ) with ξ standard normal drawn from mt19937_64(seed) in
/// (chord, k) order. The series model computes one trace per reciprocal
/// chord pair. Throws BudgetError when the series cost exceeds the budget.
PhaselessDataset synthesize_dataset(Potential const& q, SliceGeometry const& g,
                                    SinogramLayout const& layout, FrequencyLadder const& ladder,
                                    FieldModel model, std::uint64_t seed, double noise_level,
                                    SynthesisOptions const& opts = {});

/// One dataset per slice height.
std::vector<PhaselessDataset> synthesize_datasets(Potential const& q,
                                                  std::vector<double> const& heights,
                                                  SinogramLayout const& layout,
                                                  FrequencyLadder const& ladder, FieldModel model,
                                                  std::uint64_t seed, double noise_level,
                                                  SynthesisOptions const& opts = {});

/// Binary "PHDS" file (little-endian) plus "<file>.json" provenance sidecar.
/// extra_provenance (a JSON object text, may be empty) is merged into the
/// sidecar.
void write_dataset(std::filesystem::path const& path, PhaselessDataset const& ds,
                   std::string const& extra_provenance = {});
PhaselessDataset read_dataset(std::filesystem::path const& path);

}  // namespace phaseless
