#include "griddyn/presets.hpp"

namespace griddyn {

namespace {

constexpr double kAlpha = 0.00137;
constexpr double kBeta = 0.00159;

TrigPoly tp(std::vector<Wave> ws) { return TrigPoly(0.0, std::move(ws)); }

// shear pair shared by f1, f2, f3, f4
MapPtr shear_p_hifreq() {
  return MapExpr::shear_y(tp({{Wave::Cos, 187, 0.0, 1.0 / 209},
                              {Wave::Sin, 253, 0.0, 1.0 / 271},
                              {Wave::Cos, 775, 0.0, -1.0 / 703}}));
}
MapPtr shear_q_hifreq() {
  return MapExpr::shear_x(tp({{Wave::Cos, 241, 0.0, 1.0 / 287},
                              {Wave::Sin, 197, 0.0, 1.0 / 203},
                              {Wave::Sin, 811, 0.0, -1.0 / 841}}));
}

// shear pair shared by f5, f6
MapPtr shear_p_f5() {
  return MapExpr::shear_y(tp({{Wave::Cos, 17, 0.0, 1.0 / 209},
                              {Wave::Sin, 27, 0.0, 1.0 / 271},
                              {Wave::Cos, 35, 0.0, -1.0 / 703}}));
}
MapPtr shear_q_f5() {
  return MapExpr::shear_x(tp({{Wave::Cos, 15, 0.0, 1.0 / 287},
                              {Wave::Sin, 27, 0.0, 1.0 / 203},
                              {Wave::Sin, 38, 0.0, -1.0 / 841}}));
}

// shear pair shared by h1, h2, h3
MapPtr shear_p_h1() {
  return MapExpr::shear_y(tp({{Wave::Cos, 17, 0.0, 1.0 / 209},
                              {Wave::Sin, 29, 0.0, 1.0 / 471},
                              {Wave::Cos, 39, 0.0, -1.0 / 703}}));
}
MapPtr shear_q_h1() {
  return MapExpr::shear_x(tp({{Wave::Cos, 15, 0.0, 1.0 / 287},
                              {Wave::Sin, 31, 0.0, 1.0 / 403},
                              {Wave::Sin, 41, 0.0, -1.0 / 841}}));
}

// smooth square-rotation-set shear: 1/2 (cos(2pi(u+ph)) + 1)
//   + harm * sin^2(4pi(u+ph)) (sin(6pi(u+ph)) + mix cos(2pi*mixfreq*(u+ph)))
TrigPoly square_shear_wave(double ph, double harm, double mix, i64 mixfreq) {
  TrigPoly base(0.5, {{Wave::Cos, 1, ph, 0.5}});
  TrigPoly sin_sq(0.5, {{Wave::Cos, 4, ph, -0.5}});
  TrigPoly bracket = tp({{Wave::Sin, 3, ph, 1.0}, {Wave::Cos, mixfreq, ph, mix}});
  return base.plus(sin_sq.times(bracket).scaled(harm));
}

MapPtr shear_p_g1() { return MapExpr::shear_y(square_shear_wave(kAlpha, 0.0234, 0.3754, 13)); }
MapPtr shear_q_g1() { return MapExpr::shear_x(square_shear_wave(kBeta, 0.0213, 0.4243, 11)); }

MapPtr anosov() { return MapExpr::linear({{{2, 1}, {1, 1}}}); }

MapPtr build(const std::string& name) {
  if (name == "cat") return MapExpr::linear({{{0, 1}, {1, 1}}});
  if (name == "anosov") return anosov();

  if (name == "f1") {
    MapPtr r1 = MapExpr::perturb(
        tp({{Wave::Sin, 95, kAlpha, -0.00227}, {Wave::Sin, 343, kAlpha, -0.00111}}),
        tp({{Wave::Cos, 197, kAlpha, 0.000224}}),
        tp({{Wave::Sin, 107, kBeta, -0.00376}, {Wave::Cos, 331, kBeta, 0.00107}}),
        tp({{Wave::Cos, 211, kBeta, -0.000231}}));
    return MapExpr::compose({r1, shear_q_hifreq(), shear_p_hifreq()});
  }
  if (name == "f2") {
    MapPtr r2 = MapExpr::perturb(tp({{Wave::Sin, 14, kAlpha, -0.00227}}),
                                 tp({{Wave::Cos, 33, kAlpha, 0.000324}}),
                                 tp({{Wave::Cos, 15, kBeta, -0.00376}}),
                                 tp({{Wave::Sin, 41, kBeta, -0.000231}}));
    return MapExpr::compose({r2, shear_q_hifreq(), shear_p_hifreq()});
  }
  if (name == "f3") return MapExpr::compose({shear_q_hifreq(), shear_p_hifreq()});
  if (name == "f4") return MapExpr::compose({shear_q_hifreq(), shear_p_hifreq(), anosov()});
  if (name == "f5") return MapExpr::compose({shear_q_f5(), shear_p_f5()});
  if (name == "f6") return MapExpr::compose({shear_q_f5(), shear_p_f5(), anosov()});
  if (name == "h1") return MapExpr::compose({shear_q_h1(), shear_p_h1()});
  if (name == "h2")
    return MapExpr::compose(
        {shear_q_h1(), shear_p_h1(), MapExpr::translation({0.1, 1.0 / 15})});
  if (name == "h3") return MapExpr::compose({shear_q_h1(), shear_p_h1(), anosov()});

  if (name == "g1") return MapExpr::compose({shear_q_g1(), shear_p_g1()});
  if (name == "f1rot") {
    // dissipative pinch of g1 whose sinks realize the rotation-set vertices
    MapPtr r1 = MapExpr::perturb(
        tp({{Wave::Sin, 4, kAlpha, -0.0127}, {Wave::Sin, 16, kAlpha, 0.000324}}),
        TrigPoly(),
        tp({{Wave::Sin, 6, kBeta, -0.0176}, {Wave::Sin, 20, 0.0, 0.000231}}),
        TrigPoly());
    return MapExpr::compose({r1, shear_q_g1(), shear_p_g1()});
  }
  if (name == "g2") {
    // Triangular-wave cousin of g1: s(0) = 1, s(1/2) = 0, affine between.
    // The perturbation harmonics enter as amp * (1 - s(k u)) with k even, so
    // they vanish where the main wave attains 0 and 1; the rotation set stays
    // exactly [0,1]^2 with non-elliptic periodic points at the vertices.
    MapPtr p2 = MapExpr::shear_y(TrigPoly(0.0234 + 0.0167, {{Wave::Tri, 1, kAlpha, 1.0},
                                                            {Wave::Tri, 2, kAlpha, -0.0234},
                                                            {Wave::Tri, 10, kAlpha, -0.0167}}));
    MapPtr q2 = MapExpr::shear_x(TrigPoly(0.0213 + 0.0101, {{Wave::Tri, 1, kBeta, 1.0},
                                                            {Wave::Tri, 2, kBeta, -0.0213},
                                                            {Wave::Tri, 6, kBeta, -0.0101}}));
    return MapExpr::compose({q2, p2});
  }
  if (name == "g3") {
    MapPtr p3 = MapExpr::shear_y(
        TrigPoly(0.578675, {{Wave::Sin, 1, 0.34137, 0.3}, {Wave::Sin, 2, 0.21346, 0.2}}));
    MapPtr q3 = MapExpr::shear_x(
        TrigPoly(0.551256, {{Wave::Sin, 1, 0.9734, 0.25}, {Wave::Sin, 2, -0.20159, 0.35}}));
    return MapExpr::compose({q3, p3});
  }

  if (name == "expanding" || name == "expanding-12.3.3")
    return MapExpr::circle_expanding(
        2, tp({{Wave::Cos, 1, 0.0, 0.12794356372}, {Wave::Sin, 3, 0.0, 0.00824735961}}));
  if (name == "doubling") return MapExpr::circle_expanding(2, TrigPoly());

  throw SchemaError("unknown preset: " + name);
}

}  // namespace

MapPtr preset(const std::string& name) { return build(name); }

std::vector<std::string> preset_names() {
  return {"f1", "f2", "f3", "f4", "f5", "f6", "h1",        "h2",       "h3",
          "g1", "g2", "g3", "f1rot", "cat", "anosov", "expanding", "doubling"};
}

}  // namespace griddyn
