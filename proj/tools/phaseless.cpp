#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "phaseless/config.hpp"
#include "phaseless/error.hpp"
#include "phaseless/io.hpp"
#include "phaseless/plot.hpp"
#include "phaseless/recon.hpp"

using namespace phaseless;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Leftover "--a.b=v" / "--a.b v" arguments become config overrides.
std::vector<std::string> collect_overrides(std::vector<std::string> const& rest) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < rest.size(); ++i) {
    std::string const& a = rest[i];
    if (a.rfind("--", 0) != 0) throw ValidationError("unexpected argument '" + a + "'");
    std::string key = a.substr(2);
    if (key.find('=') == std::string::npos) {
      if (i + 1 >= rest.size()) throw ValidationError("override --" + key + " has no value");
      key += "=" + rest[++i];
    }
    out.push_back(key);
  }
  return out;
}

void write_json_output(fs::path const& path, json const& body, json provenance) {
  std::string const text = body.dump(2) + "\n";
  io::write_text(path, text);
  provenance["tool_version"] = std::string(io::tool_version());
  provenance["sha256"] = io::sha256_hex(std::span<char const>(text.data(), text.size()));
  io::write_text(io::sidecar_path(path), provenance.dump(1));
}

// Sidecar for an already written output file.
void stamp(fs::path const& path, json provenance) {
  provenance["tool_version"] = std::string(io::tool_version());
  provenance["sha256"] = io::sha256_file(path);
  io::write_text(io::sidecar_path(path), provenance.dump(1));
}

json metrics_json(Metrics const& m) {
  return {{"rel_L2", m.rel_L2}, {"rel_Linf", m.rel_Linf}, {"max_abs", m.max_abs}};
}

std::string slice_name(std::size_t i, char const* ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "slice_%03zu.%s", i, ext);
  return buf;
}

json config_provenance(RunConfig const& c, std::string const& phantom_hash) {
  return {{"config", json::parse(config_to_json(c))},
          {"phantom_path", c.phantom_path().string()},
          {"phantom_sha256", phantom_hash}};
}

void progress_line(std::size_t done, std::size_t total) {
  if (done == total || done % std::max<std::size_t>(1, total / 20) == 0) {
    std::fprintf(stderr, "\r  %zu/%zu chords", done, total);
    if (done == total) std::fprintf(stderr, "\n");
  }
}

// --- phantom ------------------------------------------------------------

struct PhantomArgs {
  std::string preset{"standard"};
  std::vector<std::string> bumps;
  double B{1.0};
  std::string output;
};

Bump parse_bump(std::string const& spec) {
  std::vector<double> v;
  std::stringstream ss(spec);
  for (std::string cell; std::getline(ss, cell, ',');) {
    try {
      v.push_back(std::stod(cell));
    } catch (std::exception const&) {
      throw ValidationError("bump '" + spec + "': not a number: " + cell);
    }
  }
  if (v.size() != 5) throw ValidationError("bump '" + spec + "' must be cx,cy,cz,radius,amplitude");
  return Bump{{v[0], v[1], v[2]}, v[3], v[4]};
}

int cmd_phantom(PhantomArgs const& a) {
  Potential q;
  json source;
  if (!a.bumps.empty()) {
    std::vector<Bump> terms;
    for (auto const& s : a.bumps) terms.push_back(parse_bump(s));
    q = Potential(a.B, std::move(terms));
    source = {{"bumps", a.bumps}, {"B", a.B}};
  } else {
    q = phantom_preset(a.preset);
    source = {{"preset", a.preset}};
  }
  write_phantom(a.output, q);
  json side{{"format", "phantom/1"},
            {"tool_version", std::string(io::tool_version())},
            {"source", source},
            {"sha256", io::sha256_file(a.output)}};
  io::write_text(io::sidecar_path(a.output), side.dump(1));
  std::cout << a.output << '\n';
  return 0;
}

// --- synthesize ---------------------------------------------------------

struct RunArgs {
  std::string config;
  bool quiet{false};
};

int cmd_synthesize(RunArgs const& a, std::vector<std::string> const& overrides) {
  RunConfig const c = load_config(a.config, overrides);
  Potential const q = read_phantom(c.phantom_path());
  std::string const phantom_hash = io::sha256_file(c.phantom_path());
  fs::create_directories(c.output_dir());
  SynthesisOptions opts = c.synthesis_options();
  if (!a.quiet) opts.progress = progress_line;
  auto const ladder = c.frequency_ladder();
  auto const prov = config_provenance(c, phantom_hash).dump();
  write_json_output(c.output_dir() / "config.json", json::parse(config_to_json(c)),
                    {{"phantom_sha256", phantom_hash}});
  for (std::size_t i = 0; i < c.slices.size(); ++i) {
    if (!a.quiet) std::fprintf(stderr, "slice a = %g (%s model)\n", c.slices[i], model_name(c.model).c_str());
    auto ds = synthesize_dataset(q, slice_geometry(q.B(), c.slices[i]), c.grid, ladder, c.model,
                                 c.noise.seed + i, c.noise.sigma, opts);
    auto const path = c.output_dir() / slice_name(i, "phds");
    write_dataset(path, ds, prov);
    std::cout << path.string() << '\n';
  }
  return 0;
}

// --- reconstruct --------------------------------------------------------

struct ReconstructArgs {
  RunArgs run;
  std::vector<std::string> datasets;
  bool force{false};
  bool pgm{false};
};

void check_dataset(PhaselessDataset const& ds, fs::path const& path, RunConfig const& c,
                   double B, std::string const& phantom_hash, std::vector<std::string>& problems) {
  auto const side_path = io::sidecar_path(path);
  std::string const name = path.string();
  if (!fs::is_regular_file(side_path)) {
    problems.push_back(name + ": provenance sidecar missing");
  } else {
    json side;
    try {
      side = json::parse(io::read_text(side_path));
    } catch (json::exception const&) {
      throw IoError(side_path.string() + ": sidecar is not valid JSON");
    }
    if (side.value("sha256", std::string()) != io::sha256_file(path)) {
      problems.push_back(name + ": file hash differs from its sidecar");
    }
    if (side.value("phantom_sha256", std::string()) != phantom_hash) {
      problems.push_back(name + ": synthesized from a different phantom file");
    }
  }
  if (ds.slice.B != B) problems.push_back(name + ": B differs from the phantom");
  if (std::find(c.slices.begin(), c.slices.end(), ds.slice.a) == c.slices.end()) {
    problems.push_back(name + ": slice height " + std::to_string(ds.slice.a) + " not in config");
  }
  if (ds.layout.n_alpha != c.grid.n_alpha || ds.layout.n_s != c.grid.n_s ||
      ds.layout.edge_fraction != c.grid.edge_fraction) {
    problems.push_back(name + ": chord grid differs from config");
  }
  auto const ladder = c.frequency_ladder();
  bool same = ladder.size() == ds.ladder.size();
  for (std::size_t k = 0; same && k < ladder.size(); ++k) {
    same = std::abs(ladder.k_values[k] - ds.ladder.k_values[k]) <= 1e-12 * ladder.k_values[k];
  }
  if (!same) problems.push_back(name + ": frequency ladder differs from config");
  if (ds.model != c.model) problems.push_back(name + ": field model differs from config");
}

int cmd_reconstruct(ReconstructArgs const& a, std::vector<std::string> const& overrides) {
  RunConfig const c = load_config(a.run.config, overrides);
  Potential const q = read_phantom(c.phantom_path());
  std::string const phantom_hash = io::sha256_file(c.phantom_path());
  std::vector<fs::path> paths;
  for (auto const& d : a.datasets) paths.emplace_back(d);
  if (paths.empty()) {
    for (std::size_t i = 0; i < c.slices.size(); ++i) paths.push_back(c.output_dir() / slice_name(i, "phds"));
  }
  std::vector<PhaselessDataset> datasets;
  std::vector<std::string> problems;
  json inputs = json::array();
  for (auto const& p : paths) {
    datasets.push_back(read_dataset(p));
    check_dataset(datasets.back(), p, c, q.B(), phantom_hash, problems);
    inputs.push_back({{"path", p.string()}, {"sha256", io::sha256_file(p)}});
  }
  if (!problems.empty()) {
    std::string msg = "provenance mismatch:";
    for (auto const& p : problems) msg += "\n  " + p;
    if (!a.force) throw ValidationError(msg + "\n(use --force to proceed anyway)");
    std::cerr << "warning: " << msg << "\n";
  }
  auto const vol = reconstruct_volume(datasets, c.fbp.n_image, c.limit_options(), c.fbp_options());
  fs::create_directories(c.output_dir());
  json prov = config_provenance(c, phantom_hash);
  prov["datasets"] = inputs;
  prov["forced"] = a.force && !problems.empty();
  write_volume(c.output_dir() / "volume.bin", vol, prov.dump());

  json report{{"slices", json::array()}};
  for (auto const& s : vol.slices) {
    auto m = metrics_json(metrics(s, q));
    m["a"] = s.slice.a;
    report["slices"].push_back(m);
  }
  report["volume"] = metrics_json(metrics(vol, q));
  prov["volume_sha256"] = io::sha256_file(c.output_dir() / "volume.bin");
  write_json_output(c.output_dir() / "metrics.json", report, prov);
  if (a.pgm) {
    for (std::size_t i = 0; i < vol.slices.size(); ++i) write_pgm(c.output_dir() / slice_name(i, "pgm"), vol.slices[i]);
  }
  std::cout << report.dump(2) << '\n';
  return 0;
}

// --- evaluate -----------------------------------------------------------

struct EvaluateArgs {
  std::string volume;
  std::string phantom;
  std::string output;
  std::string study;
  RunArgs run;
  std::vector<double> k_max{40.0, 80.0, 160.0};
  std::vector<double> scales{0.25, 0.5, 1.0};
};

Metrics run_pipeline(Potential const& q, RunConfig const& c, std::vector<PhaselessDataset> const& datasets) {
  auto const vol = reconstruct_volume(datasets, c.fbp.n_image, c.limit_options(), c.fbp_options());
  return metrics(vol, q);
}

// Columns of ds whose k lies in `keep`.
PhaselessDataset restrict_ladder(PhaselessDataset const& ds, std::vector<double> const& keep) {
  PhaselessDataset out = ds;
  out.ladder.k_values = keep;
  out.f_values.clear();
  std::vector<std::size_t> cols;
  for (double k : keep) {
    auto it = std::find(ds.ladder.k_values.begin(), ds.ladder.k_values.end(), k);
    cols.push_back(static_cast<std::size_t>(it - ds.ladder.k_values.begin()));
  }
  for (std::size_t c = 0; c < ds.chords.size(); ++c) {
    for (std::size_t k : cols) out.f_values.push_back(ds.f(c, k));
  }
  return out;
}

int study_kmax(EvaluateArgs const& a, RunConfig const& c, Potential const& q, bool quiet) {
  std::vector<FrequencyLadder> ladders;
  std::vector<double> all;
  for (double km : a.k_max) {
    // same ratio and count as the configured ladder, shifted to end at km
    ladders.push_back(FrequencyLadder::geometric(km * c.ladder.k_min / c.ladder.k_max, km, c.ladder.n));
    all.insert(all.end(), ladders.back().k_values.begin(), ladders.back().k_values.end());
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  SynthesisOptions opts = c.synthesis_options();
  if (!quiet) opts.progress = progress_line;
  // one synthesis over the union ladder; the kernel traces do not depend on k
  auto const full = synthesize_datasets(q, c.slices, c.grid, FrequencyLadder{all}, c.model, c.noise.seed,
                                        c.noise.sigma, opts);
  std::vector<Sinogram> exact;
  for (auto const& ds : full) exact.push_back(sinogram(q, ds.slice, c.grid));
  std::vector<std::vector<double>> rows;
  PlotSeries l2{"rel_L2", {}, {}}, linf{"rel_Linf", {}, {}}, sino{"sinogram rel_L2", {}, {}};
  for (std::size_t i = 0; i < ladders.size(); ++i) {
    std::vector<PhaselessDataset> sub;
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < full.size(); ++j) {
      sub.push_back(restrict_ladder(full[j], ladders[i].k_values));
      // recovered line integrals against the exact ones
      auto const sg = sinogram_from_data(sub.back(), c.limit_options());
      for (std::size_t v = 0; v < sg.values.size(); ++v) {
        num += (sg.values[v] - exact[j].values[v]) * (sg.values[v] - exact[j].values[v]);
        den += exact[j].values[v] * exact[j].values[v];
      }
    }
    double const sino_err = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    auto const m = run_pipeline(q, c, sub);
    rows.push_back({a.k_max[i], m.rel_L2, m.rel_Linf, sino_err});
    l2.x.push_back(a.k_max[i]);
    l2.y.push_back(m.rel_L2);
    linf.x.push_back(a.k_max[i]);
    linf.y.push_back(m.rel_Linf);
    sino.x.push_back(a.k_max[i]);
    sino.y.push_back(sino_err);
    std::cout << "k_max " << a.k_max[i] << ": rel_L2 " << m.rel_L2 << ", rel_Linf " << m.rel_Linf
              << ", sinogram rel_L2 " << sino_err << '\n';
  }
  fs::path const base = a.output.empty() ? c.output_dir() / "error_vs_kmax" : fs::path(a.output);
  fs::create_directories(base.parent_path().empty() ? fs::path(".") : base.parent_path());
  write_csv(base.string() + ".csv", {"k_max", "rel_L2", "rel_Linf", "sino_rel_L2"}, rows);
  write_svg_plot(base.string() + ".svg", {l2, linf, sino},
                 {"reconstruction error vs k_max (" + model_name(c.model) + ")", "k_max", "relative error", true, true});
  json prov = config_provenance(c, io::sha256_file(c.phantom_path()));
  prov["study"] = "kmax";
  stamp(base.string() + ".csv", prov);
  stamp(base.string() + ".svg", prov);
  return 0;
}

int study_resolution(EvaluateArgs const& a, RunConfig const& c, Potential const& q, bool quiet) {
  std::vector<std::vector<double>> rows;
  PlotSeries l2{"rel_L2", {}, {}}, linf{"rel_Linf", {}, {}};
  for (double s : a.scales) {
    if (!(s > 0.0)) throw ValidationError("resolution scales must be positive");
    RunConfig r = c;
    r.grid.n_alpha = std::max(4, static_cast<int>(std::lround(c.grid.n_alpha * s)));
    r.grid.n_s = std::max(4, static_cast<int>(std::lround(c.grid.n_s * s)));
    r.fbp.n_image = std::max(4, static_cast<int>(std::lround(c.fbp.n_image * s)));
    SynthesisOptions opts = r.synthesis_options();
    if (!quiet) opts.progress = progress_line;
    auto const ds = synthesize_datasets(q, r.slices, r.grid, r.frequency_ladder(), r.model, r.noise.seed,
                                        r.noise.sigma, opts);
    auto const m = run_pipeline(q, r, ds);
    rows.push_back({s, double(r.grid.n_alpha), double(r.grid.n_s), double(r.fbp.n_image), m.rel_L2, m.rel_Linf});
    l2.x.push_back(r.fbp.n_image);
    l2.y.push_back(m.rel_L2);
    linf.x.push_back(r.fbp.n_image);
    linf.y.push_back(m.rel_Linf);
    std::cout << "scale " << s << " (" << r.grid.n_alpha << ", " << r.grid.n_s << ", " << r.fbp.n_image
              << "): rel_L2 " << m.rel_L2 << ", rel_Linf " << m.rel_Linf << '\n';
  }
  fs::path const base = a.output.empty() ? c.output_dir() / "error_vs_resolution" : fs::path(a.output);
  fs::create_directories(base.parent_path().empty() ? fs::path(".") : base.parent_path());
  write_csv(base.string() + ".csv", {"scale", "n_alpha", "n_s", "n_image", "rel_L2", "rel_Linf"}, rows);
  write_svg_plot(base.string() + ".svg", {l2, linf},
                 {"reconstruction error vs resolution (" + model_name(c.model) + ")", "n_image", "relative error", true, true});
  json prov = config_provenance(c, io::sha256_file(c.phantom_path()));
  prov["study"] = "resolution";
  stamp(base.string() + ".csv", prov);
  stamp(base.string() + ".svg", prov);
  return 0;
}

int cmd_evaluate(EvaluateArgs const& a, std::vector<std::string> const& overrides) {
  if (!a.study.empty()) {
    if (a.run.config.empty()) throw ValidationError("--study needs --config");
    RunConfig const c = load_config(a.run.config, overrides);
    Potential const q = read_phantom(c.phantom_path());
    if (a.study == "kmax") return study_kmax(a, c, q, a.run.quiet);
    if (a.study == "resolution") return study_resolution(a, c, q, a.run.quiet);
    throw ValidationError("unknown study '" + a.study + "' (kmax, resolution)");
  }
  if (!overrides.empty()) throw ValidationError("config overrides need --study and --config");
  if (a.volume.empty() || a.phantom.empty()) throw ValidationError("evaluate needs --volume and --phantom (or --study)");
  if (!fs::is_regular_file(a.phantom)) throw IoError("phantom file " + a.phantom + " does not exist");
  Potential const q = read_phantom(a.phantom);
  Volume const vol = read_volume(a.volume);
  if (vol.B != q.B()) {
    throw ValidationError("volume B = " + std::to_string(vol.B) + " but phantom B = " + std::to_string(q.B()));
  }
  std::vector<std::vector<double>> rows;
  for (auto const& s : vol.slices) {
    auto const m = metrics(s, q);
    rows.push_back({s.slice.a, m.rel_L2, m.rel_Linf});
  }
  std::vector<std::string> const header{"a", "rel_L2", "rel_Linf"};
  if (!a.output.empty()) {
    write_csv(a.output, header, rows);
    stamp(a.output, {{"volume_sha256", io::sha256_file(a.volume)}, {"phantom_sha256", io::sha256_file(a.phantom)}});
  }
  std::cout << std::setprecision(10) << "a,rel_L2,rel_Linf\n";
  for (auto const& r : rows) std::cout << r[0] << ',' << r[1] << ',' << r[2] << '\n';
  return 0;
}

// --- plot ---------------------------------------------------------------

struct PlotArgs {
  std::string csv;
  std::string x_col;
  std::vector<std::string> y_cols;
  bool log_x{false};
  bool log_y{false};
  std::string title;
  std::string volume;
  RunArgs run;
  double alpha{2.0 * 3.141592653589793};
  double s{0.3};
  double slice{0.0};
  int n_t{400};
  std::string output;
};

int cmd_plot(PlotArgs const& a, std::vector<std::string> const& overrides) {
  int const modes = !a.csv.empty() + !a.volume.empty() + !a.run.config.empty();
  if (modes != 1) throw ValidationError("plot needs exactly one of --csv, --volume, --config");
  if (!a.csv.empty()) {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    read_csv(a.csv, header, rows);
    auto column = [&](std::string const& name) {
      auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end()) throw ValidationError(a.csv + ": no column '" + name + "'");
      return static_cast<std::size_t>(it - header.begin());
    };
    std::string const xname = a.x_col.empty() ? header.front() : a.x_col;
    std::size_t const xc = column(xname);
    std::vector<std::string> ys = a.y_cols;
    if (ys.empty()) {
      for (auto const& h : header) {
        if (h != xname) ys.push_back(h);
      }
    }
    std::vector<PlotSeries> series;
    for (auto const& y : ys) {
      std::size_t const yc = column(y);
      PlotSeries s{y, {}, {}};
      for (auto const& r : rows) {
        s.x.push_back(r[xc]);
        s.y.push_back(r[yc]);
      }
      series.push_back(std::move(s));
    }
    std::string const out = a.output.empty() ? fs::path(a.csv).replace_extension(".svg").string() : a.output;
    write_svg_plot(out, series, {a.title, xname, ys.size() == 1 ? ys.front() : "", a.log_x, a.log_y});
    stamp(out, {{"csv", a.csv}, {"csv_sha256", io::sha256_file(a.csv)}});
    std::cout << out << '\n';
    return 0;
  }
  if (!a.volume.empty()) {
    Volume const vol = read_volume(a.volume);
    fs::path const dir = a.output.empty() ? fs::path(a.volume).parent_path() : fs::path(a.output);
    if (!dir.empty()) fs::create_directories(dir);
    for (std::size_t i = 0; i < vol.slices.size(); ++i) {
      auto const p = dir / slice_name(i, "pgm");
      write_pgm(p, vol.slices[i]);
      std::cout << p.string() << '\n';
    }
    return 0;
  }
  // kernel trace of one chord
  RunConfig const c = load_config(a.run.config, overrides);
  Potential const q = read_phantom(c.phantom_path());
  auto const g = slice_geometry(q.B(), a.slice);
  auto const chord = make_chord(g, a.alpha, a.s);
  double const T = c.series.t_max > 0.0 ? c.series.t_max : series_support_end(q, chord.x, chord.x0, c.series.max_terms);
  auto const trace = kernel_trace(q, chord.x, chord.x0, T, a.n_t, c.series.quadrature, c.series.tol, c.series.max_terms);
  fs::path const base = a.output.empty() ? c.output_dir() / "trace" : fs::path(a.output);
  if (!base.parent_path().empty()) fs::create_directories(base.parent_path());
  write_trace_csv(base.string() + ".csv", trace);
  write_svg_plot(base.string() + ".svg", {PlotSeries{"wtilde", trace.t_grid, trace.wtilde_values}},
                 {"regular kernel along the chord pair", "t", "wtilde", false, false});
  json prov = config_provenance(c, io::sha256_file(c.phantom_path()));
  prov["chord"] = {{"alpha", a.alpha}, {"s", a.s}, {"a", a.slice}, {"n_t", a.n_t}};
  stamp(base.string() + ".csv", prov);
  stamp(base.string() + ".svg", prov);
  std::cout << base.string() << ".csv\n" << base.string() << ".svg\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phaseless inverse scattering: synthesis, reconstruction and evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(io::tool_version()));

  PhantomArgs pa;
  auto* phantom = app.add_subcommand("phantom", "Write a phantom/1 JSON file");
  phantom->add_option("--preset", pa.preset, "standard | two-bumps | zero")->capture_default_str();
  phantom->add_option("--bump", pa.bumps, "cx,cy,cz,radius,amplitude (repeatable; replaces the preset)");
  phantom->add_option("--B", pa.B, "support radius for --bump phantoms")->capture_default_str();
  phantom->add_option("-o,--output", pa.output, "output file")->required();

  RunArgs sa;
  auto* synth = app.add_subcommand("synthesize", "Synthesize phaseless datasets for every configured slice");
  synth->add_option("-c,--config", sa.config, "run config JSON")->required();
  synth->add_flag("-q,--quiet", sa.quiet, "no progress output");
  synth->allow_extras();

  ReconstructArgs ra;
  auto* recon = app.add_subcommand("reconstruct", "Reconstruct the volume from datasets");
  recon->add_option("-c,--config", ra.run.config, "run config JSON")->required();
  recon->add_option("datasets", ra.datasets, "dataset files (default: the config's output directory)");
  recon->add_flag("--force", ra.force, "proceed despite provenance mismatches");
  recon->add_flag("--pgm", ra.pgm, "also write one PGM image per slice");
  recon->allow_extras();

  EvaluateArgs ea;
  auto* eval = app.add_subcommand("evaluate", "Error table of a volume, or a convergence study");
  eval->add_option("--volume", ea.volume, "volume file");
  eval->add_option("--phantom", ea.phantom, "phantom file");
  eval->add_option("-o,--output", ea.output, "CSV file (study: output base name)");
  eval->add_option("--study", ea.study, "kmax | resolution");
  eval->add_option("-c,--config", ea.run.config, "run config JSON for --study");
  eval->add_option("--kmax", ea.k_max, "k_max values for the kmax study")->delimiter(',');
  eval->add_option("--scales", ea.scales, "resolution factors for the resolution study")->delimiter(',');
  eval->add_flag("-q,--quiet", ea.run.quiet, "no progress output");
  eval->allow_extras();

  PlotArgs pl;
  auto* plot = app.add_subcommand("plot", "SVG line plot of a CSV, PGM slices of a volume, or a kernel trace");
  plot->add_option("--csv", pl.csv, "CSV table to plot");
  plot->add_option("--x", pl.x_col, "x column (default: first)");
  plot->add_option("--y", pl.y_cols, "y columns (default: all others)")->delimiter(',');
  plot->add_flag("--logx", pl.log_x);
  plot->add_flag("--logy", pl.log_y);
  plot->add_option("--title", pl.title);
  plot->add_option("--volume", pl.volume, "volume file to render as PGM slices");
  plot->add_option("-c,--config", pl.run.config, "run config for a kernel trace plot");
  plot->add_option("--alpha", pl.alpha, "chord angle")->capture_default_str();
  plot->add_option("--s", pl.s, "chord offset")->capture_default_str();
  plot->add_option("--slice", pl.slice, "slice height")->capture_default_str();
  plot->add_option("--n-t", pl.n_t, "trace steps")->capture_default_str();
  plot->add_option("-o,--output", pl.output, "output file or base name");
  plot->allow_extras();

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const& e) {
    int const code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*phantom) return cmd_phantom(pa);
    if (*synth) return cmd_synthesize(sa, collect_overrides(synth->remaining()));
    if (*recon) return cmd_reconstruct(ra, collect_overrides(recon->remaining()));
    if (*eval) return cmd_evaluate(ea, collect_overrides(eval->remaining()));
    if (*plot) return cmd_plot(pl, collect_overrides(plot->remaining()));
  } catch (Error const& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (std::exception const& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
