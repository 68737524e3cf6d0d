#include "phaseless/config.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "phaseless/error.hpp"
#include "phaseless/io.hpp"

namespace phaseless {

using json = nlohmann::json;

namespace {

json const& field(json const& obj, char const* key, std::string const& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError("config: missing " + where + key);
  return *it;
}

void reject_unknown(json const& obj, std::vector<std::string> const& known, std::string const& where) {
  if (!obj.is_object()) throw ValidationError("config: " + (where.empty() ? "document" : where) + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      throw ValidationError("config: unknown key " + where + it.key());
    }
  }
}

template <class T>
T get(json const& obj, char const* key, T fallback, std::string const& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  try {
    return it->get<T>();
  } catch (json::exception const&) {
    throw ValidationError("config: wrong type for " + where + key);
  }
}

int get_int(json const& obj, char const* key, int fallback, std::string const& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer()) throw ValidationError("config: " + where + key + " must be an integer");
  return it->get<int>();
}

}  // namespace

std::string apodization_name(Apodization a) { return a == Apodization::hann ? "hann" : "none"; }

Apodization parse_apodization(std::string const& name) {
  if (name == "hann") return Apodization::hann;
  if (name == "none") return Apodization::none;
  throw ValidationError("unknown apodization '" + name + "' (hann, none)");
}

void RunConfig::validate() const {
  if (phantom.empty()) throw ValidationError("config: phantom path is empty");
  if (slices.empty()) throw ValidationError("config: no slice heights");
  grid.validate();
  if (!(ladder.k_min > 0.0) || !(ladder.k_max > ladder.k_min) || ladder.n < 3) {
    throw ValidationError("config: ladder needs 0 < k_min < k_max and n >= 3");
  }
  frequency_ladder().validate();
  series.quadrature.validate();
  if (series.n_t < 2) throw ValidationError("config: series.n_t must be >= 2");
  if (!(series.tol > 0.0)) throw ValidationError("config: series.tol must be positive");
  if (series.max_terms < 1 || series.max_terms > 4) throw ValidationError("config: series.max_terms must be in [1, 4]");
  if (!(series.t_max >= 0.0)) throw ValidationError("config: series.t_max must be >= 0");
  if (fbp.n_image < 2) throw ValidationError("config: fbp.n_image must be >= 2");
  if (!(noise.sigma >= 0.0) || !std::isfinite(noise.sigma)) throw ValidationError("config: noise.sigma must be >= 0");
  if (output.empty()) throw ValidationError("config: output directory is empty");
}

std::filesystem::path RunConfig::phantom_path() const {
  std::filesystem::path p(phantom);
  return p.is_absolute() ? p : base_dir / p;
}

std::filesystem::path RunConfig::output_dir() const {
  std::filesystem::path p(output);
  return p.is_absolute() ? p : base_dir / p;
}

FrequencyLadder RunConfig::frequency_ladder() const {
  return FrequencyLadder::geometric(ladder.k_min, ladder.k_max, ladder.n);
}

SynthesisOptions RunConfig::synthesis_options() const {
  SynthesisOptions o;
  o.quadrature = series.quadrature;
  o.n_t = series.n_t;
  o.tol = series.tol;
  o.max_terms = series.max_terms;
  o.t_max = series.t_max;
  o.series_budget = series.budget;
  return o;
}

LimitOptions RunConfig::limit_options() const { return LimitOptions{fbp.limit_model, fbp.clamp}; }

FbpOptions RunConfig::fbp_options() const { return FbpOptions{fbp.apodization}; }

RunConfig parse_config(std::string const& json_text, std::filesystem::path const& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (json::parse_error const& e) {
    throw ValidationError(std::string("config: not valid JSON: ") + e.what());
  }
  reject_unknown(doc, {"phantom", "slices", "grid", "ladder", "model", "series", "fbp", "noise", "output"}, "");
  RunConfig c;
  c.base_dir = base_dir;
  try {
    c.phantom = field(doc, "phantom", "").get<std::string>();
  } catch (json::exception const&) {
    throw ValidationError("config: phantom must be a path string");
  }
  c.slices = get<std::vector<double>>(doc, "slices", c.slices, "");
  c.output = get<std::string>(doc, "output", c.output, "");
  c.model = parse_model(get<std::string>(doc, "model", model_name(c.model), ""));
  if (auto it = doc.find("grid"); it != doc.end()) {
    reject_unknown(*it, {"n_alpha", "n_s", "edge_fraction"}, "grid.");
    c.grid.n_alpha = get_int(*it, "n_alpha", c.grid.n_alpha, "grid.");
    c.grid.n_s = get_int(*it, "n_s", c.grid.n_s, "grid.");
    c.grid.edge_fraction = get<double>(*it, "edge_fraction", c.grid.edge_fraction, "grid.");
  }
  if (auto it = doc.find("ladder"); it != doc.end()) {
    reject_unknown(*it, {"k_min", "k_max", "n"}, "ladder.");
    c.ladder.k_min = get<double>(*it, "k_min", c.ladder.k_min, "ladder.");
    c.ladder.k_max = get<double>(*it, "k_max", c.ladder.k_max, "ladder.");
    c.ladder.n = get_int(*it, "n", c.ladder.n, "ladder.");
  }
  if (auto it = doc.find("series"); it != doc.end()) {
    reject_unknown(*it, {"quadrature", "n_t", "tol", "max_terms", "t_max", "budget"}, "series.");
    auto& s = c.series;
    if (auto qt = it->find("quadrature"); qt != it->end()) {
      std::string const w = "series.quadrature.";
      reject_unknown(*qt, {"n_z", "n_phi", "n_tau", "recursion_n_z", "recursion_n_phi", "inner_n_z",
                           "inner_n_phi", "inner_n_tau", "cache_step", "cache_time_step"}, w);
      auto& q = s.quadrature;
      q.n_z = get_int(*qt, "n_z", q.n_z, w);
      q.n_phi = get_int(*qt, "n_phi", q.n_phi, w);
      q.n_tau = get_int(*qt, "n_tau", q.n_tau, w);
      q.recursion_n_z = get_int(*qt, "recursion_n_z", q.recursion_n_z, w);
      q.recursion_n_phi = get_int(*qt, "recursion_n_phi", q.recursion_n_phi, w);
      q.inner_n_z = get_int(*qt, "inner_n_z", q.inner_n_z, w);
      q.inner_n_phi = get_int(*qt, "inner_n_phi", q.inner_n_phi, w);
      q.inner_n_tau = get_int(*qt, "inner_n_tau", q.inner_n_tau, w);
      q.cache_step = get<double>(*qt, "cache_step", q.cache_step, w);
      q.cache_time_step = get<double>(*qt, "cache_time_step", q.cache_time_step, w);
    }
    s.n_t = get_int(*it, "n_t", s.n_t, "series.");
    s.tol = get<double>(*it, "tol", s.tol, "series.");
    s.max_terms = get_int(*it, "max_terms", s.max_terms, "series.");
    s.t_max = get<double>(*it, "t_max", s.t_max, "series.");
    auto const budget = get<std::int64_t>(*it, "budget", static_cast<std::int64_t>(s.budget), "series.");
    if (budget <= 0) throw ValidationError("config: series.budget must be positive");
    s.budget = static_cast<std::size_t>(budget);
  }
  if (auto it = doc.find("fbp"); it != doc.end()) {
    reject_unknown(*it, {"apodization", "n_image", "limit_model", "clamp"}, "fbp.");
    c.fbp.apodization = parse_apodization(get<std::string>(*it, "apodization", apodization_name(c.fbp.apodization), "fbp."));
    c.fbp.n_image = get_int(*it, "n_image", c.fbp.n_image, "fbp.");
    c.fbp.limit_model = parse_limit_model(get<std::string>(*it, "limit_model", limit_model_name(c.fbp.limit_model), "fbp."));
    c.fbp.clamp = get<bool>(*it, "clamp", c.fbp.clamp, "fbp.");
  }
  if (auto it = doc.find("noise"); it != doc.end()) {
    reject_unknown(*it, {"sigma", "seed"}, "noise.");
    c.noise.sigma = get<double>(*it, "sigma", c.noise.sigma, "noise.");
    auto const seed = it->find("seed");
    if (seed != it->end()) {
      if (!seed->is_number_unsigned()) throw ValidationError("config: noise.seed must be a nonnegative integer");
      c.noise.seed = seed->get<std::uint64_t>();
    }
  }
  c.validate();
  return c;
}

std::string config_to_json(RunConfig const& c) {
  auto const& q = c.series.quadrature;
  json doc{{"phantom", c.phantom},
           {"slices", c.slices},
           {"grid", {{"n_alpha", c.grid.n_alpha}, {"n_s", c.grid.n_s}, {"edge_fraction", c.grid.edge_fraction}}},
           {"ladder", {{"k_min", c.ladder.k_min}, {"k_max", c.ladder.k_max}, {"n", c.ladder.n}}},
           {"model", model_name(c.model)},
           {"series",
            {{"quadrature",
              {{"n_z", q.n_z},
               {"n_phi", q.n_phi},
               {"n_tau", q.n_tau},
               {"recursion_n_z", q.recursion_n_z},
               {"recursion_n_phi", q.recursion_n_phi},
               {"inner_n_z", q.inner_n_z},
               {"inner_n_phi", q.inner_n_phi},
               {"inner_n_tau", q.inner_n_tau},
               {"cache_step", q.cache_step},
               {"cache_time_step", q.cache_time_step}}},
             {"n_t", c.series.n_t},
             {"tol", c.series.tol},
             {"max_terms", c.series.max_terms},
             {"t_max", c.series.t_max},
             {"budget", c.series.budget}}},
           {"fbp",
            {{"apodization", apodization_name(c.fbp.apodization)},
             {"n_image", c.fbp.n_image},
             {"limit_model", limit_model_name(c.fbp.limit_model)},
             {"clamp", c.fbp.clamp}}},
           {"noise", {{"sigma", c.noise.sigma}, {"seed", c.noise.seed}}},
           {"output", c.output}};
  return doc.dump(2);
}

std::string apply_overrides(std::string const& json_text, std::vector<std::string> const& overrides) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (json::parse_error const& e) {
    throw ValidationError(std::string("config: not valid JSON: ") + e.what());
  }
  // fill defaults so every documented field can be overridden
  json full = json::parse(config_to_json(RunConfig{}));
  full.merge_patch(doc);
  for (auto const& o : overrides) {
    auto const eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("override '" + o + "' is not key=value");
    std::string const key = o.substr(0, eq);
    std::string const text = o.substr(eq + 1);
    std::string pointer;
    std::size_t start = 0;
    while (start <= key.size()) {
      auto const dot = key.find('.', start);
      auto const part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (part.empty()) throw ValidationError("override '" + o + "' has an empty path segment");
      pointer += "/" + part;
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    json::json_pointer const ptr(pointer);
    if (!full.contains(ptr) || full.at(ptr).is_object()) {
      throw ValidationError("override '" + key + "' does not name a config field");
    }
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    full[ptr] = value;
  }
  return full.dump(2);
}

RunConfig load_config(std::filesystem::path const& path, std::vector<std::string> const& overrides) {
  std::string text = io::read_text(path);
  if (!overrides.empty()) text = apply_overrides(text, overrides);
  RunConfig c = parse_config(text, path.parent_path());
  if (!std::filesystem::is_regular_file(c.phantom_path())) {
    throw IoError("config " + path.string() + ": phantom file " + c.phantom_path().string() + " does not exist");
  }
  return c;
}

}  // namespace phaseless
