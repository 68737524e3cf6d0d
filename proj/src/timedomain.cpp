#include "phaseless/timedomain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "phaseless/error.hpp"
#include "phaseless/quadrature.hpp"

namespace phaseless {

namespace {

constexpr double inv_four_pi = 1.0 / (4.0 * pi);

// Sub-intervals of [z_lo, z_hi] where g < 0, found by scanning and bisection.
template <class G>
void negative_intervals(G&& g, double z_lo, double z_hi, int scan,
                        std::vector<std::pair<double, double>>& out) {
  out.clear();
  double prev_z = z_lo;
  double prev_g = g(z_lo);
  bool inside = prev_g < 0.0;
  double start = z_lo;
  for (int i = 1; i <= scan; ++i) {
    double const z = z_lo + (z_hi - z_lo) * i / scan;
    double const gz = g(z);
    if ((gz < 0.0) != inside) {
      double a = prev_z, b = z;
      for (int it = 0; it < 60; ++it) {
        double const m = 0.5 * (a + b);
        if ((g(m) < 0.0) == inside) a = m; else b = m;
        if (b - a <= 1e-13) break;
      }
      double const root = 0.5 * (a + b);
      if (inside) out.emplace_back(start, root); else start = root;
      inside = !inside;
    }
    prev_z = z;
    prev_g = gz;
  }
  if (inside) out.emplace_back(start, z_hi);
}

// Quadrature nodes on E(x, x0, t) restricted to the ball of one bump.
// f(xi, r, weight), with Σ weight ≈ area of the restricted part in (z, φ).
template <class F>
void visit_bump(Bump const& b, EllipsoidFrame const& fr, double t, int n_z, int n_phi, bool split,
                F&& f) {
  double const rho = fr.rho;
  if (t <= rho) return;
  Vec3 const d = b.center - fr.x0;
  double const d1 = dot(d, fr.A[0]);
  double const d2 = dot(d, fr.A[1]);
  double const d3 = dot(d, fr.A[2]);
  double const p = std::hypot(d1, d2);
  double const phic = std::atan2(d2, d1);
  double const R = b.radius;
  double const R2 = R * R;
  double const K = t * t - rho * rho;
  double const h0 = 0.5 * (rho - t);

  double const z_lo = std::clamp((d3 - R - h0) / t, 0.0, 1.0);
  double const z_hi = std::clamp((d3 + R - h0) / t, 0.0, 1.0);
  if (!(z_lo < z_hi)) return;

  auto gap = [&](double z) {
    double const h = h0 + z * t;
    double const pr = std::sqrt(std::max(0.0, K * z * (1.0 - z)));
    return (h - d3) * (h - d3) + (pr - p) * (pr - p) - R2;
  };
  thread_local std::vector<std::pair<double, double>> spans;
  negative_intervals(gap, z_lo, z_hi, split ? 48 : 24, spans);
  // Split where the ring becomes fully immersed: the arc length has a
  // root-type singularity there.
  auto full = [&](double z) {
    double const h = h0 + z * t;
    double const pr = std::sqrt(std::max(0.0, K * z * (1.0 - z)));
    return (h - d3) * (h - d3) + (pr + p) * (pr + p) - R2;
  };
  thread_local std::vector<std::pair<double, double>> immersed;
  thread_local std::vector<std::pair<double, double>> pieces;
  if (split) {
    pieces.clear();
    for (auto [a, b] : spans) {
      negative_intervals(full, a, b, 16, immersed);
      double last = a;
      for (auto [c, d] : immersed) {
        if (c > last) pieces.emplace_back(last, c);
        pieces.emplace_back(c, d);
        last = d;
      }
      if (b > last) pieces.emplace_back(last, b);
    }
    spans.swap(pieces);
  }

  auto const& gz = gauss_legendre(n_z);
  auto const& gp = gauss_legendre(n_phi);
  for (auto [za, zb] : spans) {
    double const zh = 0.5 * (zb - za);
    double const zm = 0.5 * (zb + za);
    for (int iz = 0; iz < gz.size(); ++iz) {
      double const z = zm + zh * gz.nodes[iz];
      double const wz = zh * gz.weights[iz];
      double const h = h0 + z * t;
      double const pr = std::sqrt(std::max(0.0, K * z * (1.0 - z)));
      double const r = 0.5 * (t - rho + 2.0 * z * rho);
      double const base = (h - d3) * (h - d3) + pr * pr + p * p - R2;
      Vec3 const axial = fr.x0 + h * fr.A[2];
      auto emit = [&](double phi, double w) {
        Vec3 const xi = axial + (pr * std::cos(phi)) * fr.A[0] + (pr * std::sin(phi)) * fr.A[1];
        f(xi, r, w);
      };
      double kappa;
      if (pr * p <= 1e-14 * R2) {
        kappa = base < 0.0 ? -2.0 : 2.0;
      } else {
        kappa = base / (2.0 * pr * p);
      }
      if (kappa >= 1.0) continue;
      if (kappa <= -1.0) {
        double const w = wz * two_pi / n_phi;
        for (int k = 0; k < n_phi; ++k) emit(phic + two_pi * k / n_phi, w);
      } else {
        double const beta = std::acos(kappa);
        for (int k = 0; k < gp.size(); ++k) {
          emit(phic + beta * gp.nodes[k], wz * beta * gp.weights[k]);
        }
      }
    }
  }
}

double w1_rule(Potential const& q, EllipsoidFrame const& fr, double t, int n_z, int n_phi,
               bool split) {
  double sum = 0.0;
  for (auto const& b : q.terms()) {
    visit_bump(b, fr, t, n_z, n_phi, split, [&](Vec3 const& xi, double, double w) { sum += w * b(xi); });
  }
  return -inv_four_pi * sum;
}

double wn_rule(Potential const& q, EllipsoidFrame const& fr, double t, KernelFn const& prev,
               int n_z, int n_phi, int n_tau, bool split) {
  if (t <= fr.rho) return 0.0;
  auto const& gt = gauss_legendre(n_tau);
  double total = 0.0;
  for (auto const& b : q.terms()) {
    double const path = distance(fr.x, b.center) + distance(fr.x0, b.center);
    double const ta = std::max(fr.rho, path - 2.0 * b.radius);
    double const tb = std::min(t, path + 2.0 * b.radius);
    if (!(ta < tb)) continue;
    double const th = 0.5 * (tb - ta);
    double const tm = 0.5 * (tb + ta);
    for (int k = 0; k < gt.size(); ++k) {
      double const tau = tm + th * gt.nodes[k];
      double inner = 0.0;
      visit_bump(b, fr, tau, n_z, n_phi, split, [&](Vec3 const& xi, double r, double w) {
        double const qv = b(xi);
        if (qv == 0.0) return;
        inner += w * qv * r * prev(xi, t - tau + r);
      });
      total += th * gt.weights[k] * inner;
    }
  }
  return -inv_four_pi * total;
}

// Memo grid time axis: offset above the light cone for fractional index u.
// Spacing grows from about 2 hs u / m near the cone to hs.
constexpr double cone_grading = 8.0;

double cone_offset(double u, double hs) { return hs * u * u / (u + cone_grading); }

double cone_index(double offset, double hs) {
  double const a = offset / hs;
  return 0.5 * (a + std::sqrt(a * a + 4.0 * a * cone_grading));
}

EllipsoidFrame safe_frame(Vec3 const& x, Vec3 const& x0, double scale) {
  if (distance(x, x0) > 1e-12 * scale) return ellipsoid_frame(x, x0);
  return ellipsoid_frame(x0 + Vec3{0.0, 0.0, 1e-9 * scale}, x0);
}

}  // namespace

void QuadratureSpec::validate() const {
  if (n_z < 2 || n_phi < 2 || n_tau < 2 || inner_n_z < 2 || inner_n_phi < 2 || inner_n_tau < 2 ||
      recursion_n_z < 2 || recursion_n_phi < 2) {
    throw ValidationError("quadrature node counts must be at least 2");
  }
  if (n_phi % 2 != 0 || inner_n_phi % 2 != 0 || recursion_n_phi % 2 != 0) {
    throw ValidationError("n_phi must be even");
  }
  if (!(cache_step > 0.0) || !(cache_time_step > 0.0)) {
    throw ValidationError("cache steps must be positive");
  }
}

double w1(Potential const& q, EllipsoidFrame const& fr, double t, QuadratureSpec const& spec) {
  spec.validate();
  if (!(t > fr.rho)) throw ValidationError("w1: t must exceed |x - x0|");
  return w1_rule(q, fr, t, spec.n_z, spec.n_phi, true);
}

double wn(Potential const& q, EllipsoidFrame const& fr, double t, int n, KernelFn const& prev,
          QuadratureSpec const& spec) {
  spec.validate();
  if (n < 2) throw ValidationError("wn: n must be at least 2");
  if (!(t > fr.rho)) throw ValidationError("wn: t must exceed |x - x0|");
  return wn_rule(q, fr, t, prev, spec.n_z, spec.n_phi, spec.n_tau, false);
}

double term_bound(double q0, double T, double elapsed, int n) {
  if (n < 1) throw ValidationError("term_bound: n must be positive");
  if (n == 1) return 0.25 * q0;
  double const x = q0 * T * elapsed;
  if (x <= 0.0) return 0.0;
  return 0.25 * q0 * std::exp((n - 1) * std::log(x) - std::lgamma(static_cast<double>(n)));
}

double tail_bound(double q0, double T, double elapsed, int n_terms) {
  if (n_terms < 1) throw ValidationError("tail_bound: n_terms must be positive");
  double const x = q0 * T * elapsed;
  if (q0 <= 0.0 || x <= 0.0) return 0.0;
  // (q0/4) Σ_{m >= N} x^m / m!
  int const N = n_terms;
  double term = std::exp(N * std::log(x) - std::lgamma(N + 1.0));
  double sum = 0.0;
  for (int m = N; m < N + 10000; ++m) {
    sum += term;
    if (m > x && term < 1e-18 * sum) break;
    term *= x / (m + 1);
  }
  return 0.25 * q0 * sum;
}

int terms_needed(double q0, double T, double elapsed, double tol) {
  if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
  int n = 1;
  while (tail_bound(q0, T, elapsed, n) >= tol) {
    if (++n > 100000) throw ValidationError("series tail does not reach the tolerance");
  }
  return n;
}

double sup_bound(Potential const& q) {
  double s = 0.0;
  for (auto const& b : q.terms()) s += b.amplitude;
  return s;
}

double series_support_end(Potential const& q, Vec3 const& x, Vec3 const& x0, int n_terms) {
  if (n_terms < 1) throw ValidationError("series_support_end: n_terms must be positive");
  double const rho = distance(x, x0);
  if (q.empty()) return rho;
  auto [c, R] = q.bounding_ball();
  double const end = distance(x0, c) + distance(x, c) + 2.0 * R * n_terms;
  return std::max(rho, end);
}

SeriesKernel::SeriesKernel(Potential const& q, Vec3 const& x0, QuadratureSpec spec, int max_terms,
                           double horizon)
    : q_(q), x0_(x0), spec_(spec), max_terms_(max_terms), horizon_(horizon) {
  spec_.validate();
  if (max_terms < 1 || max_terms > 4) throw ValidationError("max_terms must be in [1, 4]");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ValidationError("horizon must be positive");
  inner_ = spec_;
  inner_.n_z = spec_.inner_n_z;
  inner_.n_phi = spec_.inner_n_phi;
  inner_.n_tau = spec_.inner_n_tau;
  if (q_.empty() || max_terms_ == 1) return;

  std::tie(ball_center_, ball_radius_) = q_.bounding_ball();
  Vec3 lo{1e300, 1e300, 1e300};
  Vec3 hi{-1e300, -1e300, -1e300};
  for (auto const& b : q_.terms()) {
    lo = {std::min(lo.x, b.center.x - b.radius), std::min(lo.y, b.center.y - b.radius),
          std::min(lo.z, b.center.z - b.radius)};
    hi = {std::max(hi.x, b.center.x + b.radius), std::max(hi.y, b.center.y + b.radius),
          std::max(hi.z, b.center.z + b.radius)};
  }
  double const h = spec_.cache_step;
  origin_ = lo - Vec3{h, h, h};
  nx_ = static_cast<int>(std::ceil((hi.x - lo.x) / h)) + 3;
  ny_ = static_cast<int>(std::ceil((hi.y - lo.y) / h)) + 3;
  nz_ = static_cast<int>(std::ceil((hi.z - lo.z) / h)) + 3;
  nt_ = static_cast<int>(std::ceil(cone_index(horizon_, spec_.cache_time_step))) + 2;
  std::size_t const count = static_cast<std::size_t>(nx_) * ny_ * nz_ * nt_;
  levels_.resize(max_terms_ - 1);
  for (auto& lv : levels_) lv.values.assign(count, std::numeric_limits<double>::quiet_NaN());
}

double SeriesKernel::compute_node(int level, Vec3 const& xi, double t) {
  ++nodes_computed_;
  double const support =
      distance(x0_, ball_center_) + distance(xi, ball_center_) + 2.0 * ball_radius_ * level;
  if (t >= support) return 0.0;
  EllipsoidFrame const fr = safe_frame(xi, x0_, q_.B());
  if (t <= fr.rho) return 0.0;
  if (level == 1) return w1_rule(q_, fr, t, inner_.n_z, inner_.n_phi, false);
  KernelFn prev = [this, level](Vec3 const& p, double tp) { return cached_term(level - 1, p, tp); };
  return wn_rule(q_, fr, t, prev, inner_.n_z, inner_.n_phi, inner_.n_tau, false);
}

double SeriesKernel::node_value(int level, int i, int j, int k, int l) {
  std::size_t const idx = ((static_cast<std::size_t>(l) * nz_ + k) * ny_ + j) * nx_ + i;
  double& slot = levels_[level - 1].values[idx];
  if (std::isnan(slot)) {
    double const h = spec_.cache_step;
    Vec3 const xi = origin_ + Vec3{i * h, j * h, k * h};
    double const t = distance(xi, x0_) + cone_offset(l, spec_.cache_time_step);
    slot = compute_node(level, xi, t);
  }
  return slot;
}

double SeriesKernel::cached_term(int n, Vec3 const& xi, double t) {
  if (n < 1 || n >= max_terms_) throw ValidationError("cached_term: level out of range");
  if (q_.empty()) return 0.0;
  double const r = distance(xi, x0_);
  double const support =
      distance(x0_, ball_center_) + distance(xi, ball_center_) + 2.0 * ball_radius_ * n;
  if (t >= support) return 0.0;
  double const h = spec_.cache_step;
  auto locate = [](double v, int n_nodes, int& i0) {
    double const fl = std::floor(v);
    i0 = std::clamp(static_cast<int>(fl), 0, n_nodes - 2);
    return std::clamp(v - i0, 0.0, 1.0);
  };
  int i, j, k, l;
  double const fx = locate((xi.x - origin_.x) / h, nx_, i);
  double const fy = locate((xi.y - origin_.y) / h, ny_, j);
  double const fz = locate((xi.z - origin_.z) / h, nz_, k);
  double const ft = locate(cone_index(std::max(0.0, t - r), spec_.cache_time_step), nt_, l);
  double const wx[2] = {1.0 - fx, fx};
  double const wy[2] = {1.0 - fy, fy};
  double const wz[2] = {1.0 - fz, fz};
  double const wt[2] = {1.0 - ft, ft};
  std::size_t const sy = nx_;
  std::size_t const sz = sy * ny_;
  std::size_t const st = sz * nz_;
  std::size_t const base = i + j * sy + k * sz + l * st;
  double const* values = levels_[n - 1].values.data();
  double sum = 0.0;
  for (int dl = 0; dl < 2; ++dl) {
    for (int dk = 0; dk < 2; ++dk) {
      for (int dj = 0; dj < 2; ++dj) {
        double const w_lkj = wt[dl] * wz[dk] * wy[dj];
        for (int di = 0; di < 2; ++di) {
          double const w = w_lkj * wx[di];
          double v = values[base + di + dj * sy + dk * sz + dl * st];
          if (std::isnan(v)) {
            if (w == 0.0) continue;
            v = node_value(n, i + di, j + dj, k + dk, l + dl);
          }
          sum += w * v;
        }
      }
    }
  }
  return sum;
}

double SeriesKernel::term(int n, Vec3 const& x, double t) {
  if (n < 1 || n > max_terms_) throw ValidationError("term: n out of range");
  if (q_.empty()) return 0.0;
  EllipsoidFrame const fr = safe_frame(x, x0_, q_.B());
  if (t <= fr.rho) return 0.0;
  if (n == 1) return w1_rule(q_, fr, t, spec_.n_z, spec_.n_phi, true);
  KernelFn prev = [this, n](Vec3 const& p, double tp) { return cached_term(n - 1, p, tp); };
  return wn_rule(q_, fr, t, prev, spec_.recursion_n_z, spec_.recursion_n_phi, spec_.n_tau, false);
}

WtildeValue SeriesKernel::wtilde(Vec3 const& x, double t, double tol) {
  WtildeValue out;
  double const rho = distance(x, x0_);
  double const q0 = sup_bound(q_);
  double const T = std::max(t, horizon_);
  double const elapsed = std::max(0.0, t - rho);
  out.n_used = std::min(terms_needed(q0, T, elapsed, tol), max_terms_);
  out.remainder_bound = tail_bound(q0, T, elapsed, out.n_used);
  for (int n = 1; n <= out.n_used; ++n) {
    out.terms.push_back(term(n, x, t));
    out.value += out.terms.back();
  }
  return out;
}

WtildeValue wtilde(Potential const& q, EllipsoidFrame const& fr, double t, double tol,
                   QuadratureSpec const& spec, int max_terms, double horizon) {
  if (!(t > fr.rho)) throw ValidationError("wtilde: t must exceed |x - x0|");
  SeriesKernel kernel(q, fr.x0, spec, max_terms, std::max(t, horizon));
  return kernel.wtilde(fr.x, t, tol);
}

std::vector<double> graded_mesh(double t0, double t1, int n_uniform, double ratio,
                                int grading_levels) {
  if (!(t1 > t0) || n_uniform < 1 || !(ratio > 1.0) || grading_levels < 0) {
    throw ValidationError("graded_mesh: invalid arguments");
  }
  double const hu = (t1 - t0) / n_uniform;
  double step = hu / std::pow(ratio, grading_levels);
  std::vector<double> grid{t0};
  double t = t0;
  while (true) {
    double const s = std::min(step, hu);
    if (t + 1.2 * s >= t1) break;
    t += s;
    grid.push_back(t);
    step *= ratio;
  }
  grid.push_back(t1);
  return grid;
}

KernelEvaluation kernel_trace(Potential const& q, Vec3 const& x, Vec3 const& x0, double T,
                              int n_t, QuadratureSpec const& spec, double tol, int max_terms) {
  KernelEvaluation out;
  out.x = x;
  out.x0 = x0;
  out.rho = distance(x, x0);
  if (!(out.rho > 0.0)) throw ValidationError("kernel_trace: x and x0 coincide");
  if (!(T > out.rho)) throw ValidationError("kernel_trace: T must exceed |x - x0|");
  double const q0 = sup_bound(q);
  out.n_terms = std::min(terms_needed(q0, T, T - out.rho, tol), max_terms);
  double const t_end = std::min(T, series_support_end(q, x, x0, out.n_terms));
  out.remainder_bound = tail_bound(q0, T, T - out.rho, out.n_terms);
  if (!(t_end > out.rho) || q.empty()) {
    out.t_grid = {out.rho, T};
    out.wtilde_values = {0.0, 0.0};
    return out;
  }
  out.t_grid = graded_mesh(out.rho, t_end, n_t);
  out.wtilde_values.resize(out.t_grid.size());
  SeriesKernel kernel(q, x0, spec, out.n_terms, T);
  out.wtilde_values[0] = -segment_integral(q, x0, x, 64) / (2.0 * out.rho);
  for (std::size_t i = 1; i < out.t_grid.size(); ++i) {
    double v = 0.0;
    for (int n = 1; n <= out.n_terms; ++n) v += kernel.term(n, x, out.t_grid[i]);
    out.wtilde_values[i] = v;
  }
  return out;
}

void write_trace_csv(std::filesystem::path const& path, KernelEvaluation const& trace) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os.precision(17);
  os << "t,wtilde\n";
  for (std::size_t i = 0; i < trace.t_grid.size(); ++i) {
    os << trace.t_grid[i] << ',' << trace.wtilde_values[i] << '\n';
  }
  if (!os) throw IoError("write failed for " + path.string());
}

}  // namespace phaseless
