#pragma once

#include <functional>
#include <vector>

#include "noiselab/vec.hpp"

namespace noiselab {

// Gauss-Legendre rule on [-1,1]. Nodes found by Newton iteration on P_n; cached per order.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussLegendre& gauss_legendre(int order);

// \int_a^b f via Gauss-Legendre of given order.
double gl_integrate(double a, double b, int order, const std::function<double(double)>& f);

// Uniform nodes a..b inclusive, n >= 2 points.
std::vector<double> uniform_nodes(double a, double b, int n);

// Cell-centered nodes: n cells over [a,b], node at each midpoint, weight (b-a)/n.
std::vector<double> cell_centers(double a, double b, int n);

// Trapezoid weights for uniform_nodes(a,b,n).
std::vector<double> trapezoid_weights(double a, double b, int n);

// Tensor iteration over a box with a per-axis 1-d rule given by (points, weights).
// fn(point, weight) is called for every tensor node; weight is the product weight.
void for_each_tensor(const Box& box, const std::vector<double>& ref_nodes,
                     const std::vector<double>& ref_weights,
                     const std::function<void(const Vec&, double)>& fn);

// Cell-centered tensor grid over a box, n cells per axis; returns centers and the
// common cell weight (product of cell sides).
struct CellGrid {
  std::vector<Vec> points;
  double weight = 0.0;  // uniform cell measure
  double h = 0.0;       // cell side (isotropic use)
};
CellGrid cell_grid(const Box& box, int cells_per_axis);

// Same grid restricted to the ball |x - center| <= r.
CellGrid cell_grid_ball(const Vec& center, double r, int cells_per_axis);

}  // namespace noiselab
