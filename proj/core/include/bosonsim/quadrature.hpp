#pragma once

#include <cstddef>
#include <vector>

namespace bosonsim {

/// Nodes and weights of a one-dimensional rule mapped onto a finite interval.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }

  template <typename F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

/// n-point Gauss-Legendre rule on [lo, hi].
QuadratureRule gauss_legendre(std::size_t n, double lo, double hi);

/// n-point trapezoid rule on the periodic interval [0, 2 pi); exact for trigonometric
/// polynomials of degree < n.
QuadratureRule periodic_trapezoid(std::size_t n);

}  // namespace bosonsim
