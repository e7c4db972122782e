#include "griddyn/mapexpr.hpp"

#include <cmath>

#include "griddyn/rng.hpp"

namespace griddyn {

namespace {

MapPtr make(MapExpr e) { return std::make_shared<const MapExpr>(std::move(e)); }

Vec2 node_lift(const MapExpr& f, Vec2 p) {
  switch (f.kind) {
    case MapExpr::Kind::ShearX: return {p[0] + f.wave.eval(p[1]), p[1]};
    case MapExpr::Kind::ShearY: return {p[0], p[1] + f.wave.eval(p[0])};
    case MapExpr::Kind::Linear:
      return {(double)f.m[0][0] * p[0] + (double)f.m[0][1] * p[1],
              (double)f.m[1][0] * p[0] + (double)f.m[1][1] * p[1]};
    case MapExpr::Kind::Translation: return {p[0] + f.v[0], p[1] + f.v[1]};
    case MapExpr::Kind::Perturb:
      return {p[0] + f.wxx.eval(p[0]) + f.wxy.eval(p[1]),
              p[1] + f.wyy.eval(p[1]) + f.wyx.eval(p[0])};
    case MapExpr::Kind::CircleExpanding: return {(double)f.degree * p[0] + f.wave.eval(p[0]), 0.0};
    case MapExpr::Kind::CircleHomeo: return {p[0] + f.wave.eval(p[0]), 0.0};
    case MapExpr::Kind::Compose: break;
  }
  throw SchemaError("compose node reached node_lift");
}

Mat2d node_jacobian(const MapExpr& f, Vec2 p) {
  switch (f.kind) {
    case MapExpr::Kind::ShearX: return {{{1.0, f.wave.deriv(p[1])}, {0.0, 1.0}}};
    case MapExpr::Kind::ShearY: return {{{1.0, 0.0}, {f.wave.deriv(p[0]), 1.0}}};
    case MapExpr::Kind::Linear:
      return {{{(double)f.m[0][0], (double)f.m[0][1]}, {(double)f.m[1][0], (double)f.m[1][1]}}};
    case MapExpr::Kind::Translation: return {{{1.0, 0.0}, {0.0, 1.0}}};
    case MapExpr::Kind::Perturb:
      return {{{1.0 + f.wxx.deriv(p[0]), f.wxy.deriv(p[1])},
               {f.wyx.deriv(p[0]), 1.0 + f.wyy.deriv(p[1])}}};
    case MapExpr::Kind::CircleExpanding:
      return {{{(double)f.degree + f.wave.deriv(p[0]), 0.0}, {0.0, 1.0}}};
    case MapExpr::Kind::CircleHomeo: return {{{1.0 + f.wave.deriv(p[0]), 0.0}, {0.0, 1.0}}};
    case MapExpr::Kind::Compose: break;
  }
  throw SchemaError("compose node reached node_jacobian");
}

double node_det(const MapExpr& f, Vec2 p) {
  switch (f.kind) {
    case MapExpr::Kind::ShearX:
    case MapExpr::Kind::ShearY:
    case MapExpr::Kind::Translation: return 1.0;
    case MapExpr::Kind::Linear: return (double)(f.m[0][0] * f.m[1][1] - f.m[0][1] * f.m[1][0]);
    case MapExpr::Kind::Perturb: {
      Mat2d j = node_jacobian(f, p);
      return j[0][0] * j[1][1] - j[0][1] * j[1][0];
    }
    case MapExpr::Kind::CircleExpanding: return (double)f.degree + f.wave.deriv(p[0]);
    case MapExpr::Kind::CircleHomeo: return 1.0 + f.wave.deriv(p[0]);
    case MapExpr::Kind::Compose: break;
  }
  throw SchemaError("compose node reached node_det");
}

Mat2i node_homotopy(const MapExpr& f) {
  switch (f.kind) {
    case MapExpr::Kind::Linear: return f.m;
    case MapExpr::Kind::CircleExpanding: return {{{(i64)f.degree, 0}, {0, 1}}};
    default: return {{{1, 0}, {0, 1}}};
  }
}

Mat2i mul(const Mat2i& a, const Mat2i& b) {
  Mat2i r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return r;
}

Mat2d mul(const Mat2d& a, const Mat2d& b) {
  Mat2d r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return r;
}

}  // namespace

MapPtr MapExpr::shear_x(TrigPoly w) {
  MapExpr e;
  e.kind = Kind::ShearX;
  e.dim = 2;
  e.wave = std::move(w);
  return make(std::move(e));
}

MapPtr MapExpr::shear_y(TrigPoly w) {
  MapExpr e;
  e.kind = Kind::ShearY;
  e.dim = 2;
  e.wave = std::move(w);
  return make(std::move(e));
}

MapPtr MapExpr::linear(Mat2i a) {
  if (a[0][0] * a[1][1] - a[0][1] * a[1][0] == 0)
    throw SchemaError("linear torus map must have nonzero determinant");
  MapExpr e;
  e.kind = Kind::Linear;
  e.dim = 2;
  e.m = a;
  return make(std::move(e));
}

MapPtr MapExpr::translation(Vec2 t, int dim) {
  if (dim != 1 && dim != 2) throw SchemaError("translation dim must be 1 or 2");
  MapExpr e;
  e.kind = Kind::Translation;
  e.dim = dim;
  e.v = t;
  if (dim == 1) e.v[1] = 0.0;
  return make(std::move(e));
}

MapPtr MapExpr::perturb(TrigPoly wxx, TrigPoly wxy, TrigPoly wyy, TrigPoly wyx) {
  MapExpr e;
  e.kind = Kind::Perturb;
  e.dim = 2;
  e.wxx = std::move(wxx);
  e.wxy = std::move(wxy);
  e.wyy = std::move(wyy);
  e.wyx = std::move(wyx);
  return make(std::move(e));
}

MapPtr MapExpr::compose(std::vector<MapPtr> fs) {
  if (fs.empty()) throw SchemaError("compose needs at least one factor");
  int d = fs.front()->dim;
  for (const MapPtr& p : fs) {
    if (!p) throw SchemaError("null map in compose");
    if (p->dim != d) throw SchemaError("compose factors must share dimension");
  }
  if (fs.size() == 1) return fs.front();
  MapExpr e;
  e.kind = Kind::Compose;
  e.dim = d;
  e.parts = std::move(fs);
  return make(std::move(e));
}

MapPtr MapExpr::circle_expanding(int d, TrigPoly w) {
  if (d < 2) throw SchemaError("expanding degree must be >= 2");
  MapExpr e;
  e.kind = Kind::CircleExpanding;
  e.dim = 1;
  e.degree = d;
  e.wave = std::move(w);
  // min derivative must exceed 1; accept on the sup bound, otherwise sample
  if ((double)d - e.wave.sup_abs_deriv() <= 1.0) {
    double lo = 1e300;
    for (int i = 0; i < 10000; ++i) {
      double x = (double)i / 10000.0;
      lo = std::min(lo, (double)d + e.wave.deriv(x));
    }
    if (lo <= 1.0) throw SchemaError("circle map is not expanding (min derivative <= 1)");
  }
  return make(std::move(e));
}

MapPtr MapExpr::circle_homeo(TrigPoly w) {
  MapExpr e;
  e.kind = Kind::CircleHomeo;
  e.dim = 1;
  e.wave = std::move(w);
  return make(std::move(e));
}

std::vector<const MapExpr*> flatten(const MapExpr& f) {
  std::vector<const MapExpr*> out;
  if (f.kind == MapExpr::Kind::Compose) {
    for (auto it = f.parts.rbegin(); it != f.parts.rend(); ++it) {
      auto sub = flatten(**it);
      out.insert(out.end(), sub.begin(), sub.end());
    }
  } else {
    out.push_back(&f);
  }
  return out;
}

Vec2 eval(const MapExpr& f, Vec2 p) {
  p = {fract(p[0]), f.dim == 2 ? fract(p[1]) : 0.0};
  for (const MapExpr* node : flatten(f)) {
    p = node_lift(*node, p);
    p[0] = fract(p[0]);
    if (f.dim == 2) p[1] = fract(p[1]);
  }
  return p;
}

Vec2 eval_lift(const MapExpr& f, Vec2 p) {
  if (f.dim == 1) p[1] = 0.0;
  for (const MapExpr* node : flatten(f)) p = node_lift(*node, p);
  return p;
}

Mat2d jacobian(const MapExpr& f, Vec2 p) {
  p = {fract(p[0]), f.dim == 2 ? fract(p[1]) : 0.0};
  Mat2d j{{{1.0, 0.0}, {0.0, 1.0}}};
  for (const MapExpr* node : flatten(f)) {
    j = mul(node_jacobian(*node, p), j);
    p = node_lift(*node, p);
    p[0] = fract(p[0]);
    if (f.dim == 2) p[1] = fract(p[1]);
  }
  return j;
}

double jacobian_det(const MapExpr& f, Vec2 p) {
  p = {fract(p[0]), f.dim == 2 ? fract(p[1]) : 0.0};
  double det = 1.0;
  for (const MapExpr* node : flatten(f)) {
    det *= node_det(*node, p);
    p = node_lift(*node, p);
    p[0] = fract(p[0]);
    if (f.dim == 2) p[1] = fract(p[1]);
  }
  return det;
}

Mat2i homotopy(const MapExpr& f) {
  Mat2i h{{{1, 0}, {0, 1}}};
  for (const MapExpr* node : flatten(f)) h = mul(node_homotopy(*node), h);
  return h;
}

bool isotopic_to_identity(const MapExpr& f) {
  Mat2i h = homotopy(f);
  return h[0][0] == 1 && h[0][1] == 0 && h[1][0] == 0 && h[1][1] == 1;
}

double circle_deriv(const MapExpr& f, double x) {
  if (f.dim != 1) throw SchemaError("circle_deriv needs a circle map");
  return jacobian(f, {x, 0.0})[0][0];
}

}  // namespace griddyn
