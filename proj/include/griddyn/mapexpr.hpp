#pragma once

#include <array>
#include <memory>
#include <vector>

#include "griddyn/trigpoly.hpp"

namespace griddyn {

using Vec2 = std::array<double, 2>;
using Mat2d = std::array<std::array<double, 2>, 2>;
using Mat2i = std::array<std::array<i64, 2>, 2>;

struct MapExpr;
using MapPtr = std::shared_ptr<const MapExpr>;

// Composition tree of torus (n=2) or circle (n=1) maps. All nodes carry an
// exact lift to R^n; waves are 1-periodic so lifts commute with integer
// translations up to the node's homotopy matrix.
struct MapExpr {
  enum class Kind {
    ShearX,           // (x, y) -> (x + w(y), y)
    ShearY,           // (x, y) -> (x, y + w(x))
    Linear,           // integer 2x2 matrix
    Translation,      // + v
    Perturb,          // (x, y) -> (x + wxx(x) + wxy(y), y + wyy(y) + wyx(x))
    Compose,          // parts[0] o parts[1] o ... (rightmost applied first)
    CircleExpanding,  // x -> d*x + w(x), min derivative > 1
    CircleHomeo       // x -> x + w(x)
  };

  Kind kind = Kind::Translation;
  int dim = 2;
  TrigPoly wave;
  TrigPoly wxx, wxy, wyy, wyx;  // Perturb only
  Mat2i m{{{1, 0}, {0, 1}}};
  Vec2 v{0.0, 0.0};
  int degree = 2;
  std::vector<MapPtr> parts;

  static MapPtr shear_x(TrigPoly w);
  static MapPtr shear_y(TrigPoly w);
  static MapPtr linear(Mat2i a);
  static MapPtr translation(Vec2 t, int dim = 2);
  static MapPtr perturb(TrigPoly wxx, TrigPoly wxy, TrigPoly wyy, TrigPoly wyx);
  static MapPtr compose(std::vector<MapPtr> fs);
  static MapPtr circle_expanding(int d, TrigPoly w);
  static MapPtr circle_homeo(TrigPoly w);
};

// torus/circle evaluation; every node application is reduced mod 1
Vec2 eval(const MapExpr& f, Vec2 p);
// lift to R^n, no reduction
Vec2 eval_lift(const MapExpr& f, Vec2 p);
// chain-rule Jacobian at a torus point (dim 1 uses entry [0][0])
Mat2d jacobian(const MapExpr& f, Vec2 p);
// product of node determinants in closed form (exact 1.0 for shear chains)
double jacobian_det(const MapExpr& f, Vec2 p);
// composed homotopy matrix H: F(x + v) = F(x) + H v (dim 1: H[0][0] = degree)
Mat2i homotopy(const MapExpr& f);
bool isotopic_to_identity(const MapExpr& f);
double circle_deriv(const MapExpr& f, double x);
// nodes in application order (innermost first)
std::vector<const MapExpr*> flatten(const MapExpr& f);

}  // namespace griddyn
