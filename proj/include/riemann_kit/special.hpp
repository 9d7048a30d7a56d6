#pragma once

#include <cmath>

namespace riemann_kit {

struct JacobiTriple {
  double sn = 0.0, cn = 1.0, dn = 1.0;
};

/// Jacobi elliptic functions of modulus k (not the parameter m = k^2), by the
/// descending-Landen AGM scale. Degenerate moduli short-circuit: k=0 -> trig,
/// k=1 -> hyperbolic.
JacobiTriple jacobi_elliptic(double u, double k);

inline double jacobi_cn(double u, double k) { return jacobi_elliptic(u, k).cn; }
inline double jacobi_sn(double u, double k) { return jacobi_elliptic(u, k).sn; }
inline double jacobi_dn(double u, double k) { return jacobi_elliptic(u, k).dn; }

/// Complete elliptic integral K(k) by AGM.
double elliptic_K(double k);

inline double sech(double x) { return 1.0 / std::cosh(x); }

}  // namespace riemann_kit
