#include "collusion/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "collusion/errors.hpp"

namespace collusion {

namespace {

// Eigen-decomposition of the symmetric tridiagonal Jacobi matrix with zero
// diagonal and the given off-diagonal; mu0 is the total mass of the weight.
QuadratureRule golub_welsch(const Eigen::VectorXd& off_diagonal, double mu0) {
  const Eigen::Index n = off_diagonal.size() + 1;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    J(i, i + 1) = off_diagonal(i);
    J(i + 1, i) = off_diagonal(i);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(J);
  if (solver.info() != Eigen::Success) throw SolverError("quadrature: Jacobi eigen-decomposition failed");
  QuadratureRule rule;
  rule.nodes = solver.eigenvalues();
  rule.weights = mu0 * solver.eigenvectors().row(0).transpose().array().square();
  return rule;
}

}  // namespace

QuadratureRule gauss_hermite(int order) {
  if (order < 1) throw ValidationError("order: must be >= 1");
  Eigen::VectorXd beta(order - 1);
  for (int i = 1; i < order; ++i) beta(i - 1) = std::sqrt(0.5 * i);
  return golub_welsch(beta, std::sqrt(std::numbers::pi));
}

QuadratureRule gauss_legendre(int order) {
  if (order < 1) throw ValidationError("order: must be >= 1");
  Eigen::VectorXd beta(order - 1);
  for (int i = 1; i < order; ++i) beta(i - 1) = i / std::sqrt(4.0 * i * i - 1.0);
  return golub_welsch(beta, 2.0);
}

double normal_expectation(const std::function<double(double)>& f, double mean, double sd,
                          const QuadratureRule& rule) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
    acc += rule.weights(i) * f(mean + std::numbers::sqrt2 * sd * rule.nodes(i));
  }
  return acc / std::sqrt(std::numbers::pi);
}

namespace {

constexpr int kMaxIntervals = 1 << 16;

double legendre_on(const std::function<double(double)>& f, double lo, double hi, const QuadratureRule& rule) {
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) acc += rule.weights(i) * f(mid + half * rule.nodes(i));
  return half * acc;
}

void refine(const std::function<double(double)>& f, double lo, double hi, double whole, double abs_tol,
            double rel_tol, const QuadratureRule& rule, int depth, AdaptiveResult& out) {
  const double mid = 0.5 * (lo + hi);
  const double left = legendre_on(f, lo, mid, rule);
  const double right = legendre_on(f, mid, hi, rule);
  const double split = left + right;
  const bool out_of_budget = depth == 0 || out.intervals >= kMaxIntervals;
  if (std::abs(split - whole) <= abs_tol + rel_tol * std::abs(split) || out_of_budget) {
    if (out_of_budget && std::abs(split - whole) > abs_tol + rel_tol * std::abs(split)) out.converged = false;
    out.value += split;
    out.intervals += 2;
    return;
  }
  refine(f, lo, mid, left, 0.5 * abs_tol, rel_tol, rule, depth - 1, out);
  refine(f, mid, hi, right, 0.5 * abs_tol, rel_tol, rule, depth - 1, out);
}

}  // namespace

AdaptiveResult adaptive_integrate(const std::function<double(double)>& f, double lo, double hi,
                                  double abs_tol, double rel_tol, int order, int max_depth) {
  AdaptiveResult out;
  out.converged = true;
  if (hi == lo) return out;
  const QuadratureRule rule = gauss_legendre(order);
  refine(f, lo, hi, legendre_on(f, lo, hi, rule), abs_tol, rel_tol, rule, max_depth, out);
  return out;
}

}  // namespace collusion
