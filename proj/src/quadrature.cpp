#include "phaseless/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <map>
#include <memory>
#include <mutex>

#include "phaseless/error.hpp"

namespace phaseless {

GaussRule const& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  if (n < 1) throw ValidationError("Gauss-Legendre rule needs n >= 1");

  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return *it->second;

  auto rule = std::make_unique<GaussRule>();
  rule->nodes.resize(n);
  rule->weights.resize(n);
  gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(n);
  for (int i = 0; i < n; ++i) {
    gsl_integration_glfixed_point(-1.0, 1.0, static_cast<size_t>(i), &rule->nodes[i],
                                  &rule->weights[i], table);
  }
  gsl_integration_glfixed_table_free(table);
  auto const& ref = *rule;
  cache.emplace(n, std::move(rule));
  return ref;
}

}  // namespace phaseless
