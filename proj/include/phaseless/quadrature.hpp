#pragma once

#include <span>
#include <vector>

namespace phaseless {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int size() const { return static_cast<int>(nodes.size()); }
};

/// Cached n-point rule. The returned reference stays valid for the program
/// lifetime; safe to call concurrently.
GaussRule const& gauss_legendre(int n);

/// Integrate f over [a, b] with the n-point rule.
template <class F>
double integrate_gl(F&& f, double a, double b, int n) {
  auto const& rule = gauss_legendre(n);
  double const half = 0.5 * (b - a);
  double const mid = 0.5 * (b + a);
  double sum = 0.0;
  for (int i = 0; i < rule.size(); ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return sum * half;
}

}  // namespace phaseless
