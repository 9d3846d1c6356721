#pragma once

#include <vector>

#include "ictrl/system.hpp"
#include "ictrl/types.hpp"

namespace ictrl {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  Vector nodes;
  Vector weights;
};

GaussRule gauss_legendre(int order);

/// Composite panels over one inter-impulse subinterval.  Nodes are the
/// Gauss points of each panel; they never coincide with panel edges, so no
/// node can sit on an impulse time.
struct SubintervalGrid {
  double t_begin = 0.0;
  double t_end = 0.0;
  int panel_count = 0;
  std::vector<double> panel_edges;  // panel_count + 1 entries
  std::vector<double> nodes;        // panel_count * order entries
  std::vector<double> weights;

  double length() const { return t_end - t_begin; }
};

struct QuadratureGrid {
  int order = 8;
  std::vector<SubintervalGrid> subintervals;  // one per (t_k, t_{k+1}]

  /// Throws if the grid does not match the system's impulse schedule.
  void validate_against(const ImpulsiveSystem& sys) const;
};

QuadratureGrid make_quadrature_grid(const ImpulsiveSystem& sys, int order = 8,
                                    int panels_per_subinterval = 16);

}  // namespace ictrl
