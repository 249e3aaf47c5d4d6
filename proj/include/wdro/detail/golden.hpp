#pragma once

#include <cmath>

namespace wdro {

template <class F>
ScalarMinimum golden_section(F&& f, double a, double b, double tolerance) {
  constexpr double kInvPhi = 0.6180339887498948482;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  ScalarMinimum best = fc <= fd ? ScalarMinimum{c, fc} : ScalarMinimum{d, fd};
  while (b - a > tolerance) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
      if (fc < best.value || (fc == best.value && c < best.x)) best = {c, fc};
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
      if (fd < best.value || (fd == best.value && d < best.x)) best = {d, fd};
    }
  }
  return best;
}

}  // namespace wdro
