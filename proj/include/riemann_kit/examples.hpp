#pragma once

#include "riemann_kit/chardata.hpp"
#include "riemann_kit/fd.hpp"
#include "riemann_kit/func.hpp"
#include "riemann_kit/special.hpp"
#include "riemann_kit/types.hpp"

namespace riemann_kit {

// ---------------------------------------------------------------------------
// Example 1: 3x3 constant-coefficient system in (t,x,y,z) with velocity-
// dependent sources; mixed wave/mode superposition families.
// ---------------------------------------------------------------------------

enum class Ex1Variant { Sech, Cnoidal, BoundedMultisoliton, Custom };

struct Example1Config {
  Eigen::Vector3d a = Eigen::Vector3d(1, 1, 1);
  Ex1Variant variant = Ex1Variant::Sech;
  std::vector<Function1D> c = {Function1D::constant(0.0), Function1D::constant(0.0),
                               Function1D::constant(0.0)};  // c_i(r1); sech/bounded
  Eigen::Vector3d moduli = Eigen::Vector3d(0.3, 0.5, 0.7);  // k_i in (0,1); elliptic
  std::function<Vec(const Vec&)> custom_b;                  // Custom variant only

  double M() const { return a.squaredNorm(); }
};

SystemSpec example1_system(const Example1Config& cfg);

struct Example1Family {
  Example1Config cfg;
  CandidateSolution solution;
  GridSpec default_grid;
  // Riemann coordinates (xi, r1) of a physical point.
  static std::pair<double, double> coords(const Eigen::Vector3d& a, const Vec& x);
  // Wave set {eta, Re lambda, Im lambda} for span checks.
  std::vector<Vec> waves() const;
};

Example1Family example1_family(const Example1Config& cfg);

/// Printed mixed-decomposition data of example 1 (eta, lambda, Omega2, L2,
/// theta, tau2 = (M+i)T). theta's arccosh argument uses the consistent
/// square-root/sign reading; states where the argument < 1 fall on the
/// ambiguous complex branch and are excluded from `clean_branch`.
struct Example1Decomposition {
  Vec eta;      // (-M, a)
  CVec lambda;  // (1, i a)
  Complex omega2(const Vec& b) const;
  CMat L2(const Vec& b) const;
  Complex theta(const Vec& b) const;
  bool clean_branch(const Vec& b) const;
  DecompositionData data(const Example1Config& cfg) const;  // mixed variant
};

Example1Decomposition example1_decomposition(const Example1Config& cfg);

// ---------------------------------------------------------------------------
// Example 2: U_t + a x (curl U) = b with b = (kappa a2, -kappa a1, e^w).
// ---------------------------------------------------------------------------

struct Example2Config {
  Eigen::Vector3d a = Eigen::Vector3d(0.7, 1.3, 0.9);  // a3 != 0, a2 != 0
  double kappa = 1.0;
  double mu = 1.0;  // the printed solution solves the system at mu = 1
  double c0 = 1.0;
  double c1 = -10.0;
  // H(r2, r2bar) with partials; reality requires dH/dr2 = conj(dH/dr2bar).
  std::function<Complex(Complex, Complex)> H = [](Complex r2, Complex r2b) { return r2 * r2b; };
  std::function<Complex(Complex, Complex)> H_r2 = [](Complex, Complex r2b) { return r2b; };
  std::function<Complex(Complex, Complex)> H_r2b = [](Complex r2, Complex) { return r2; };
  Function1D f1 = Function1D::constant(0.0);
  Function1D f2 = Function1D::constant(0.0);
};

SystemSpec example2_system(const Example2Config& cfg);

struct Example2Family {
  Example2Config cfg;
  CandidateSolution solution;
  GridSpec default_grid;
  std::vector<Vec> waves() const;  // {eta, Re lambda, Im lambda}
};

Example2Family example2_family(const Example2Config& cfg);

/// Max |dH/dr2 - conj(dH/dr2bar)| over sampled (r2, r2bar) pairs; zero is the
/// reality condition of the printed solution.
double example2_reality_defect(const Example2Config& cfg, int n = 32);

// ---------------------------------------------------------------------------
// Example 3: the underdetermined Loewner system, transformed unknowns
// (u, v, q = ln rho), and the rank-2 simple-mode family.
// ---------------------------------------------------------------------------

enum class Ex3Variant {
  PrintedSq,       // denominators |f|^2
  PrintedQuartic,  // denominators |f|^4
  Corrected,       // F = 2i f(r) fbar'(rbar) / (kappa |f|^4): the residual-vanishing form
};

struct Example3Config {
  double kappa = 1.0;  // != 0
  Ex3Variant variant = Ex3Variant::Corrected;
  std::function<Complex(Complex)> f = [](Complex z) { return z; };
  std::function<Complex(Complex)> fprime = [](Complex) { return Complex(1.0, 0.0); };
};

/// Transformed system (unknowns u, v, q; variables x, y) and the original
/// Loewner form (unknowns u, v, rho) with h1 = b1, h2 = rho b2.
SystemSpec example3_system_transformed(const Example3Config& cfg);
SystemSpec example3_system_original(const Example3Config& cfg);

struct Example3Family {
  Example3Config cfg;
  CandidateSolution solution;           // (u, v, q) over (x, y)
  CandidateSolution solution_original;  // (u, v, rho)
  GridSpec default_grid;
};

Example3Family example3_family(const Example3Config& cfg);

/// Probe residuals of the three variant readings at sample points; the
/// construction keeps the one that vanishes.
struct Ex3VariantReport {
  double printed_sq = 0.0;
  double printed_quartic = 0.0;
  double corrected = 0.0;
  Ex3Variant chosen = Ex3Variant::Corrected;
};
Ex3VariantReport example3_resolve_variant(const Example3Config& cfg);

}  // namespace riemann_kit
