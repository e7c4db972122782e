#include "griddyn/trigpoly.hpp"

#include <cmath>

namespace griddyn {

TrigPoly::TrigPoly(double constant, std::vector<Wave> ts) : c(constant), terms(std::move(ts)) {
  for (const Wave& w : terms)
    if (w.freq <= 0) throw SchemaError("wave frequency must be a positive integer");
}

double TrigPoly::eval(double x) const {
  double v = c;
  for (const Wave& t : terms) {
    double w = (double)t.freq * (x + t.phase);
    w -= std::floor(w);
    switch (t.kind) {
      case Wave::Cos: v += t.amp * std::cos(kTwoPi * w); break;
      case Wave::Sin: v += t.amp * std::sin(kTwoPi * w); break;
      case Wave::Tri: v += t.amp * std::fabs(1.0 - 2.0 * w); break;
    }
  }
  return v;
}

double TrigPoly::deriv(double x) const {
  double v = 0.0;
  for (const Wave& t : terms) {
    double w = (double)t.freq * (x + t.phase);
    w -= std::floor(w);
    double f = (double)t.freq;
    switch (t.kind) {
      case Wave::Cos: v -= t.amp * kTwoPi * f * std::sin(kTwoPi * w); break;
      case Wave::Sin: v += t.amp * kTwoPi * f * std::cos(kTwoPi * w); break;
      case Wave::Tri: {
        // tri(w) = 1-2w on (0,1/2], 2w-1 on (1/2,1]; left limit at w=0 has slope +2
        double slope = (w == 0.0 || w > 0.5) ? 2.0 : -2.0;
        v += t.amp * f * slope;
        break;
      }
    }
  }
  return v;
}

double TrigPoly::sup_abs() const {
  double v = std::fabs(c);
  for (const Wave& t : terms) v += std::fabs(t.amp);
  return v;
}

double TrigPoly::sup_abs_deriv() const {
  double v = 0.0;
  for (const Wave& t : terms) {
    double f = (double)t.freq;
    v += std::fabs(t.amp) * (t.kind == Wave::Tri ? 2.0 * f : kTwoPi * f);
  }
  return v;
}

bool TrigPoly::has_tri() const {
  for (const Wave& t : terms)
    if (t.kind == Wave::Tri) return true;
  return false;
}

TrigPoly& TrigPoly::add(Wave w) {
  if (w.freq <= 0) throw SchemaError("wave frequency must be a positive integer");
  if (w.amp != 0.0) terms.push_back(w);
  return *this;
}

TrigPoly TrigPoly::scaled(double s) const {
  TrigPoly r;
  r.c = c * s;
  for (Wave t : terms) {
    t.amp *= s;
    if (t.amp != 0.0) r.terms.push_back(t);
  }
  return r;
}

TrigPoly TrigPoly::plus(const TrigPoly& o) const {
  TrigPoly r = *this;
  r.c += o.c;
  r.terms.insert(r.terms.end(), o.terms.begin(), o.terms.end());
  return r;
}

namespace {

// append amp * kind(2*pi*(F*x + ph)) with integer F of any sign, normalizing
// to the positive-frequency (x + phase) representation
void push_normalized(TrigPoly& out, Wave::Kind kind, i64 F, double ph, double amp) {
  if (amp == 0.0) return;
  if (F == 0) {
    out.c += amp * (kind == Wave::Cos ? std::cos(kTwoPi * ph) : std::sin(kTwoPi * ph));
    return;
  }
  if (F < 0) {
    F = -F;
    ph = -ph;
    if (kind == Wave::Sin) amp = -amp;
  }
  out.terms.push_back({kind, F, ph / (double)F, amp});
}

}  // namespace

TrigPoly TrigPoly::times(const TrigPoly& o) const {
  if (has_tri() || o.has_tri()) throw SchemaError("product-to-sum requires tri-free factors");
  TrigPoly r;
  r.c = c * o.c;
  for (const Wave& t : o.terms) r.terms.push_back({t.kind, t.freq, t.phase, t.amp * c});
  for (const Wave& t : terms) r.terms.push_back({t.kind, t.freq, t.phase, t.amp * o.c});
  for (const Wave& a : terms) {
    for (const Wave& b : o.terms) {
      // arguments in cycles: A = fa*(x+pa), B = fb*(x+pb)
      i64 Fp = a.freq + b.freq, Fm = a.freq - b.freq;
      double php = (double)a.freq * a.phase + (double)b.freq * b.phase;
      double phm = (double)a.freq * a.phase - (double)b.freq * b.phase;
      double h = 0.5 * a.amp * b.amp;
      if (a.kind == Wave::Cos && b.kind == Wave::Cos) {
        // cos A cos B = (cos(A+B) + cos(A-B)) / 2
        push_normalized(r, Wave::Cos, Fp, php, h);
        push_normalized(r, Wave::Cos, Fm, phm, h);
      } else if (a.kind == Wave::Sin && b.kind == Wave::Sin) {
        // sin A sin B = (cos(A-B) - cos(A+B)) / 2
        push_normalized(r, Wave::Cos, Fm, phm, h);
        push_normalized(r, Wave::Cos, Fp, php, -h);
      } else if (a.kind == Wave::Sin && b.kind == Wave::Cos) {
        // sin A cos B = (sin(A+B) + sin(A-B)) / 2
        push_normalized(r, Wave::Sin, Fp, php, h);
        push_normalized(r, Wave::Sin, Fm, phm, h);
      } else {
        // cos A sin B = (sin(A+B) - sin(A-B)) / 2
        push_normalized(r, Wave::Sin, Fp, php, h);
        push_normalized(r, Wave::Sin, Fm, phm, -h);
      }
    }
  }
  return r;
}

}  // namespace griddyn
