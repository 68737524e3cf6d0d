#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "phaseless/geometry.hpp"
#include "phaseless/phantom.hpp"

namespace phaseless {

/// Node counts for the ellipsoid integrals and the memo grid used by the
/// series recursion.
///
/// (n_z, n_phi) is the rule for w1 and for the free functions w1/wn.
/// SeriesKernel evaluates terms n >= 2 at the requested point with
/// (recursion_n_z, recursion_n_phi, n_tau). Lower-order terms needed inside the recursion are read
/// from a lazily filled grid over the support of q (spacing cache_step in
/// space; in time above the light cone the spacing is graded from fine up to
/// cache_time_step) whose nodes are
/// computed with the inner rule.
struct QuadratureSpec {
  int n_z{16};
  int n_phi{16};
  int n_tau{8};
  int recursion_n_z{8};
  int recursion_n_phi{8};
  int inner_n_z{4};
  int inner_n_phi{4};
  int inner_n_tau{4};
  double cache_step{0.15};
  double cache_time_step{0.15};

  void validate() const;
};

/// Kernel w_{n-1}(ξ, x0, t) for the recursion.
using KernelFn = std::function<double(Vec3 const& xi, double t)>;

/// First term of the regular part, -(1/4π) ∬ q(ξ(z, φ)) dφ dz over
/// E(x, x0, t). Each bump is integrated only over the part of the ellipsoid
/// inside its ball: Gauss-Legendre in z per sub-interval, periodic trapezoid
/// in φ for full rings and Gauss-Legendre over partial arcs. Throws for
/// t <= ρ.
double w1(Potential const& q, EllipsoidFrame const& fr, double t, QuadratureSpec const& spec);

/// Term n >= 2 of the series from the kernel of term n - 1:
/// -(1/4π) ∫_ρ^t ∬ r q(ξ) w_{n-1}(ξ, x0, t - τ + r) dφ dz dτ.
double wn(Potential const& q, EllipsoidFrame const& fr, double t, int n, KernelFn const& prev,
          QuadratureSpec const& spec);

/// Right-hand side of the growth bound for |w_n| at elapsed time t - ρ.
double term_bound(double q0, double T, double elapsed, int n);

/// Sum of term_bound over n > n_terms.
double tail_bound(double q0, double T, double elapsed, int n_terms);

/// Smallest N with tail_bound(N) < tol (uncapped).
int terms_needed(double q0, double T, double elapsed, double tol);

/// Certified upper bound on sup q (sum of bump amplitudes).
double sup_bound(Potential const& q);

/// Time after which every term up to n_terms vanishes identically for the
/// pair (x, x0): no scattering path with n_terms bounces through supp q is
/// longer.
double series_support_end(Potential const& q, Vec3 const& x, Vec3 const& x0, int n_terms);

/// Result of a truncated series evaluation.
struct WtildeValue {
  double value{0.0};
  int n_used{1};
  double remainder_bound{0.0};
  std::vector<double> terms;  ///< w_1 .. w_N
};

/// Series terms for one source point. Lower-order terms are memoized on a
/// grid keyed by quantized (ξ, t - |ξ - x0|) and interpolated
/// multilinearly. Not thread-safe: use one instance per task.
class SeriesKernel {
 public:
  /// max_terms in [1, 4]; horizon is the largest time that will be queried.
  SeriesKernel(Potential const& q, Vec3 const& x0, QuadratureSpec spec, int max_terms,
               double horizon);

  Vec3 const& source() const { return x0_; }
  int max_terms() const { return max_terms_; }

  /// w_n(x, x0, t) by the outer rule; 0 for t <= |x - x0|.
  double term(int n, Vec3 const& x, double t);

  /// Interpolated w_n(ξ, x0, t) from the memo grid, n < max_terms.
  double cached_term(int n, Vec3 const& xi, double t);

  /// Truncated series with N from the tail bound (q0 = sup_bound(q),
  /// T = max(t, horizon)), capped at max_terms.
  WtildeValue wtilde(Vec3 const& x, double t, double tol);

  std::size_t nodes_computed() const { return nodes_computed_; }

 private:
  struct Level {
    std::vector<double> values;  // NaN marks a node not yet computed
  };

  double node_value(int level, int i, int j, int k, int l);
  double compute_node(int level, Vec3 const& xi, double t);

  Potential q_;
  Vec3 x0_;
  QuadratureSpec spec_;
  QuadratureSpec inner_;
  int max_terms_;
  double horizon_;
  Vec3 ball_center_;
  double ball_radius_{0.0};
  Vec3 origin_;
  int nx_{0};
  int ny_{0};
  int nz_{0};
  int nt_{0};
  std::vector<Level> levels_;
  std::size_t nodes_computed_{0};
};

/// Truncated w̃(x, x0, t) for a single point (builds its own SeriesKernel).
/// The bound uses T = max(t, horizon). Throws for t <= ρ.
WtildeValue wtilde(Potential const& q, EllipsoidFrame const& fr, double t, double tol,
                   QuadratureSpec const& spec = {}, int max_terms = 4, double horizon = 0.0);

/// w̃(x, x0, ·) tabulated on a mesh graded from the light cone t = ρ
/// (step ratio 1.3) and uniform afterwards.
struct KernelEvaluation {
  Vec3 x;
  Vec3 x0;
  double rho{0.0};
  std::vector<double> t_grid;
  std::vector<double> wtilde_values;
  int n_terms{1};
  double remainder_bound{0.0};
};

/// Tabulate w̃ on [ρ, T_end] with about n_t uniform steps, where T_end is
/// min(T, series_support_end) for the number of terms the tail bound selects.
/// The value at t = ρ is the light-cone limit -(1/2) ∫_0^1 q(x0 + z (x - x0)) dz.
KernelEvaluation kernel_trace(Potential const& q, Vec3 const& x, Vec3 const& x0, double T,
                              int n_t, QuadratureSpec const& spec, double tol,
                              int max_terms = 4);

/// Graded-then-uniform time mesh on [t0, t1].
std::vector<double> graded_mesh(double t0, double t1, int n_uniform, double ratio = 1.3,
                                int grading_levels = 16);

/// CSV dump "t,wtilde" for debugging.
void write_trace_csv(std::filesystem::path const& path, KernelEvaluation const& trace);

}  // namespace phaseless
