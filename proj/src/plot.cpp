#include "phaseless/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "phaseless/error.hpp"
#include "phaseless/io.hpp"

namespace phaseless {

void write_csv(std::filesystem::path const& path, std::vector<std::string> const& header,
               std::vector<std::vector<double>> const& rows) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (auto const& row : rows) {
    if (row.size() != header.size()) throw ValidationError("csv row width differs from header");
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
  io::write_text(path, os.str());
}

void read_csv(std::filesystem::path const& path, std::vector<std::string>& header,
              std::vector<std::vector<double>>& rows) {
  std::istringstream in(io::read_text(path));
  std::string line;
  header.clear();
  rows.clear();
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty csv");
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) header.push_back(cell);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (std::exception const&) {
        throw IoError(path.string() + ":" + std::to_string(lineno) + ": not a number: " + cell);
      }
    }
    if (row.size() != header.size()) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": wrong number of columns");
    }
    rows.push_back(std::move(row));
  }
}

namespace {

std::string escape(std::string const& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

std::string label(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << v;
  return os.str();
}

}  // namespace

void write_svg_plot(std::filesystem::path const& path, std::vector<PlotSeries> const& series,
                    PlotAxes const& axes) {
  double const W = 640, H = 420, L = 80, R = 160, T = 40, Bm = 60;
  auto tx = [&](double v) { return axes.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return axes.log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!axes.log_x || x > 0) && (!axes.log_y || y > 0);
  };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (auto const& s : series) {
    if (s.x.size() != s.y.size()) throw ValidationError("plot series '" + s.name + "' has unequal x and y");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  double const pw = W - L - R, ph = H - T - Bm;
  auto px = [&](double v) { return L + (v - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return T + ph - (v - y0) / (y1 - y0) * ph; };

  static char const* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream os;
  os << std::setprecision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << escape(axes.title) << "</text>\n";
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    double const fx = x0 + (x1 - x0) * i / 4.0, fy = y0 + (y1 - y0) * i / 4.0;
    double const vx = axes.log_x ? std::pow(10.0, fx) : fx;
    double const vy = axes.log_y ? std::pow(10.0, fy) : fy;
    os << "<text x=\"" << px(fx) << "\" y=\"" << T + ph + 18 << "\" text-anchor=\"middle\" font-size=\"11\">" << label(vx) << "</text>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << py(fy) + 4 << "\" text-anchor=\"end\" font-size=\"11\">" << label(vy) << "</text>\n";
  }
  os << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 16 << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(axes.x_label) << "</text>\n";
  os << "<text x=\"18\" y=\"" << T + ph / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
     << T + ph / 2 << ")\">" << escape(axes.y_label) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    auto const& s = series[k];
    char const* color = colors[k % 6];
    std::ostringstream pts;
    pts << std::setprecision(6);
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      double const X = px(tx(s.x[i])), Y = py(ty(s.y[i]));
      pts << X << ',' << Y << ' ';
      os << "<circle cx=\"" << X << "\" cy=\"" << Y << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
    double const ly = T + 16 + 18 * k;
    os << "<line x1=\"" << W - R + 12 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 36 << "\" y2=\"" << ly
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << W - R + 42 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">" << escape(s.name) << "</text>\n";
  }
  os << "</svg>\n";
  io::write_text(path, os.str());
}

}  // namespace phaseless
