#pragma once

// Gaussian quadrature rules computed by the Golub-Welsch eigenvalue method,
// and an adaptive Gauss-Legendre integrator.

#include <Eigen/Dense>
#include <functional>

namespace collusion {

struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

// Physicists' Hermite rule: sum w_i f(x_i) ~ integral f(x) exp(-x^2) dx.
QuadratureRule gauss_hermite(int order);

// Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int order);

// E[f(X)] for X ~ Normal(mean, sd^2) using an order-point Hermite rule.
// Terms are summed in node order.
double normal_expectation(const std::function<double(double)>& f, double mean, double sd,
                          const QuadratureRule& rule);

struct AdaptiveResult {
  double value = 0.0;
  int intervals = 0;
  bool converged = false;
};

// Recursive bisection with an order-point Legendre rule on each piece; an
// interval is accepted when the whole and split estimates agree to
// abs_tol + rel_tol |estimate|. Gives up (converged = false) at max_depth or
// after 65536 accepted intervals.
AdaptiveResult adaptive_integrate(const std::function<double(double)>& f, double lo, double hi,
                                  double abs_tol, double rel_tol, int order = 15, int max_depth = 40);

}  // namespace collusion
