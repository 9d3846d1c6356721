#include "ictrl/quadrature.hpp"

#include <cmath>

namespace ictrl {

GaussRule gauss_legendre(int order) {
  if (order < 1)
    throw std::invalid_argument("gauss_legendre: order must be >= 1");
  const int n = order;
  GaussRule rule;
  rule.nodes = Vector::Zero(n);
  rule.weights = Vector::Zero(n);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton iteration from the Chebyshev-based initial guess.
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

QuadratureGrid make_quadrature_grid(const ImpulsiveSystem& sys, int order,
                                    int panels_per_subinterval) {
  if (panels_per_subinterval < 1)
    throw std::invalid_argument("make_quadrature_grid: need >= 1 panel");
  sys.validate();
  const GaussRule rule = gauss_legendre(order);

  QuadratureGrid grid;
  grid.order = order;
  const int p = sys.impulse_count();
  grid.subintervals.reserve(p + 1);
  for (int k = 0; k <= p; ++k) {
    SubintervalGrid sub;
    sub.t_begin = sys.subinterval_begin(k);
    sub.t_end = sys.subinterval_end(k);
    sub.panel_count = panels_per_subinterval;
    const double h = sub.length() / panels_per_subinterval;
    sub.panel_edges.resize(panels_per_subinterval + 1);
    for (int j = 0; j <= panels_per_subinterval; ++j)
      sub.panel_edges[j] = sub.t_begin + j * h;
    sub.panel_edges.back() = sub.t_end;
    sub.nodes.reserve(panels_per_subinterval * order);
    sub.weights.reserve(panels_per_subinterval * order);
    for (int j = 0; j < panels_per_subinterval; ++j) {
      const double a = sub.panel_edges[j];
      const double b = sub.panel_edges[j + 1];
      const double mid = 0.5 * (a + b);
      const double half = 0.5 * (b - a);
      for (int q = 0; q < order; ++q) {
        sub.nodes.push_back(mid + half * rule.nodes[q]);
        sub.weights.push_back(half * rule.weights[q]);
      }
    }
    grid.subintervals.push_back(std::move(sub));
  }
  return grid;
}

void QuadratureGrid::validate_against(const ImpulsiveSystem& sys) const {
  const int p = sys.impulse_count();
  if (static_cast<int>(subintervals.size()) != p + 1)
    throw std::invalid_argument(
        "QuadratureGrid: subinterval count does not match impulse schedule");
  for (int k = 0; k <= p; ++k) {
    const SubintervalGrid& sub = subintervals[k];
    if (std::abs(sub.t_begin - sys.subinterval_begin(k)) > 1e-12 ||
        std::abs(sub.t_end - sys.subinterval_end(k)) > 1e-12)
      throw std::invalid_argument(
          "QuadratureGrid: subinterval endpoints do not match the schedule");
    if (sub.nodes.empty())
      throw std::invalid_argument("QuadratureGrid: empty subinterval grid");
    double sum = 0.0;
    for (std::size_t q = 0; q < sub.weights.size(); ++q) {
      if (!(sub.weights[q] > 0.0))
        throw std::invalid_argument("QuadratureGrid: nonpositive weight");
      sum += sub.weights[q];
    }
    if (std::abs(sum - sub.length()) > 1e-12 * std::max(1.0, sub.length()))
      throw std::invalid_argument(
          "QuadratureGrid: weights do not sum to the subinterval length");
  }
}

}  // namespace ictrl
