#include "riemann_kit/special.hpp"

#include "riemann_kit/types.hpp"

#include <algorithm>
#include <array>

namespace riemann_kit {

double elliptic_K(double k) {
  if (k < 0 || k >= 1.0) throw InputError("elliptic_K: modulus in [0,1) required");
  double a = 1.0, b = std::sqrt(1.0 - k * k);
  for (int i = 0; i < 40 && std::abs(a - b) > 1e-15 * a; ++i) {
    double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return M_PI / (2.0 * a);
}

JacobiTriple jacobi_elliptic(double u, double k) {
  if (k < 0 || k > 1) throw InputError("jacobi_elliptic: modulus in [0,1] required");
  if (k < 1e-14) return {std::sin(u), std::cos(u), 1.0};
  if (k > 1.0 - 1e-14) {
    double s = std::tanh(u);
    return {s, 1.0 / std::cosh(u), 1.0 / std::cosh(u)};
  }
  // AGM scale; amplitude back-recursion (Abramowitz & Stegun 16.4, 17.6)
  std::array<double, 40> a{}, c{};
  a[0] = 1.0;
  double b = std::sqrt(1.0 - k * k);
  c[0] = k;
  int n = 0;
  while (n < 39 && std::abs(c[n]) > 1e-15 * a[n]) {
    a[n + 1] = 0.5 * (a[n] + b);
    c[n + 1] = 0.5 * (a[n] - b);
    b = std::sqrt(a[n] * b);
    ++n;
  }
  double phi = std::ldexp(a[n] * u, n);
  for (int i = n; i > 0; --i) phi = 0.5 * (phi + std::asin(std::clamp(c[i] / a[i] * std::sin(phi), -1.0, 1.0)));
  JacobiTriple t;
  t.sn = std::sin(phi);
  t.cn = std::cos(phi);
  t.dn = std::sqrt(1.0 - k * k * t.sn * t.sn);
  return t;
}

}  // namespace riemann_kit
