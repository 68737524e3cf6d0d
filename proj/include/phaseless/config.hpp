#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "phaseless/radon.hpp"
#include "phaseless/recon.hpp"
#include "phaseless/scatter.hpp"
#include "phaseless/timedomain.hpp"

namespace phaseless {

struct LadderSpec {
  double k_min{20.0};
  double k_max{160.0};
  int n{8};
};

struct SeriesSpec {
  QuadratureSpec quadrature;
  int n_t{400};
  double tol{1e-6};
  int max_terms{4};
  double t_max{0.0};
  std::size_t budget{100000};
};

struct FbpSpec {
  Apodization apodization{Apodization::hann};
  int n_image{128};
  LimitModel limit_model{LimitModel::three_term};
  bool clamp{false};
};

struct NoiseSpec {
  double sigma{0.0};
  std::uint64_t seed{1};
};

/// One experiment: everything needed to synthesize and reconstruct.
struct RunConfig {
  std::string phantom;  ///< as written; relative paths resolve against base_dir
  std::vector<double> slices{0.0};
  SinogramLayout grid;
  LadderSpec ladder;
  FieldModel model{FieldModel::asymptotic};
  SeriesSpec series;
  FbpSpec fbp;
  NoiseSpec noise;
  std::string output{"out"};
  std::filesystem::path base_dir;  ///< not serialized

  /// Ranges only; file existence is checked by load_config.
  void validate() const;

  std::filesystem::path phantom_path() const;
  std::filesystem::path output_dir() const;
  FrequencyLadder frequency_ladder() const;
  SynthesisOptions synthesis_options() const;
  LimitOptions limit_options() const;
  FbpOptions fbp_options() const;
};

std::string apodization_name(Apodization a);
Apodization parse_apodization(std::string const& name);

/// Strict parse: unknown keys and wrong types are ValidationErrors.
RunConfig parse_config(std::string const& json_text, std::filesystem::path const& base_dir = {});
std::string config_to_json(RunConfig const& c);

/// Apply "a.b.c=value" overrides to a JSON document. The value is read as
/// JSON when it parses, otherwise as a string. The path must already exist.
std::string apply_overrides(std::string const& json_text, std::vector<std::string> const& overrides);

/// Read, override, parse, and require the phantom file to exist.
RunConfig load_config(std::filesystem::path const& path,
                      std::vector<std::string> const& overrides = {});

}  // namespace phaseless
