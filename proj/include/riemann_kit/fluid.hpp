#pragma once

#include "riemann_kit/chardata.hpp"
#include "riemann_kit/fd.hpp"
#include "riemann_kit/func.hpp"
#include "riemann_kit/types.hpp"

#include <Eigen/Geometry>

namespace riemann_kit {

using Vec3 = Eigen::Vector3d;

/// Polytropic exponent and external forces of the (3+1)-dimensional fluid.
struct FluidParams {
  double kappa = 2.0;
  Vec3 g = Vec3::Zero();
  Vec3 Omega = Vec3::Zero();
};

struct FluidState {
  double rho = 1.0;
  double p = 1.0;
  Vec3 v = Vec3::Zero();

  Vec to_u() const {
    Vec u(5);
    u << rho, p, v(0), v(1), v(2);
    return u;
  }
  static FluidState from_u(const Vec& u) {
    if (u.size() != 5) throw InputError("fluid state needs 5 components");
    return {u(0), u(1), Vec3(u(2), u(3), u(4))};
  }
  double sound_speed(double kappa) const { return std::sqrt(kappa * p / rho); }
};

/// 5-equation, 5-unknown, (t,x,y,z) system: momentum, continuity, entropy
/// transport, with b = (rho (v x Omega + g), 0, 0). Admissible: rho>0, p>0.
SystemSpec fluid_system(const FluidParams& params);

/// delta |lambda| = lambda_0 + v . lambda_vec (propagation speed relative to
/// the fluid). lambda is the full (lambda_0, lambda_vec) covector.
double delta_speed(const FluidState& state, const Vec& lambda);

enum class FluidElementKind { E, A, E0, A0, H0 };

struct FluidElementOptions {
  double gamma_rho = 1.0;
  Vec3 lambda_vec = Vec3(1, 0, 0);
  Vec3 gamma_vec = Vec3::Zero();  // E only; must be orthogonal to lambda_vec
  double eps = 1.0;               // +-1 for acoustic kinds
  Vec3 alpha = Vec3::Zero();      // E0 only
  double delta_speed = 0.5;       // H0 only: delta|lambda|, away from 0 and +-c_s|lambda|
};

/// The five element constructions of the fluid system. Throws ConstraintError
/// with the failing inequality when the kind's precondition is violated.
IntegralElement fluid_element(FluidElementKind kind, const FluidState& state,
                              const FluidParams& params, const FluidElementOptions& opt);

// ---------------------------------------------------------------------------
// Closed-form superposition families. Each family solves its implicit
// invariant relations by damped Newton and evaluates the printed state.
// ---------------------------------------------------------------------------

struct FluidFamily {
  std::string id;
  FluidParams params;
  CandidateSolution solution;
  // (r0, r1) at x; seeded from `seed` when finite, else the family default.
  std::function<Vec(const Vec& x, const Vec& seed)> invariants;
  GridSpec default_grid;  // documented verification region

  /// Wave covectors (dr0, dr1) at x by FD of the invariant map.
  std::vector<Vec> wave_covectors(const Vec& x, double h = 1e-6) const;
};

struct EE0aConfig {
  Vec3 g = Vec3(0, 0, 1);
  Vec3 Omega = Vec3(1, 0, 0);  // unit, orthogonal to g
  bool upper_signs = true;
  double c1 = 0.0;
  double kappa = 2.0;
  Function1D p = Function1D::poly({2.0, 1.0});   // p(r0) = r0 + 2
  Function1D v2 = Function1D::poly({0.0, 1.0});  // v2(r1) = r1
  Function1D a1 = Function1D::constant(1.0);
  Function1D a3 = Function1D::constant(0.0);
  Function1D psi = Function1D::poly({0.0, 1.0});
  std::function<double(double, double)> chi;  // chi(s, r1); null means 0
};

struct EE0bConfig {
  Vec3 g = Vec3(1, 0, 2);      // g.Omega != 0 and g x Omega != 0
  Vec3 Omega = Vec3(0, 0, 1);  // unit
  double c = 0.3;
  double kappa = 2.0;
  Function1D p = Function1D::poly({2.0, 1.0});
  Function1D v1 = Function1D::poly({0.0, 1.0});
  Function1D v3 = Function1D::poly({0.0, 0.0, 1.0});
  Function1D phi = Function1D::poly({0.0, 0.0, 0.5});
};

struct EA0Config {
  Vec3 g = Vec3(0, 0, 1);
  Vec3 Omega = Vec3(1, 0, 0);  // unit, orthogonal to g; lambda^0 along Omega
  double rho0 = 1.0, p0 = 1.0, B0 = 0.0, c1 = 0.0;
  double eps = 1.0, eps1 = 1.0;
  double kappa = 2.0;
  Function1D b1 = Function1D::constant(0.0);
  Function1D b2 = Function1D::poly({1.0, 1.0});  // b2(r1) = 1 + r1, db2 != 0
  Function1D phi = Function1D::constant(0.0);
  Function1D psi = Function1D::poly({0.0, 1.0});
};

struct EH0Config {
  Vec3 g = Vec3(0, 1, 1);      // needs g.(c x Omega) != 0 and g.Omega != 0
  Vec3 Omega = Vec3(0, 0, 1);  // unit
  Vec3 cvec = Vec3(1, 0, 0);   // unit, orthogonal to Omega
  double p0 = 1.0;
  double kappa = 2.0;
  Function1D rho = Function1D::poly({2.0, 1.0});  // rho(r1) = 2 + r1
  Function1D phi = Function1D::constant(0.0);
  Function1D b = Function1D::constant(0.0);  // db * a2 = 0 enforced
  Function1D a = Function1D::constant(1.0);
  Function1D a1 = Function1D::constant(0.0);
  Function1D a2 = Function1D::constant(1.0);
  Function1D a3 = Function1D::constant(0.0);
  Function1D psi = Function1D::poly({0.0, 1.0});
};

struct AH0Config {
  Vec3 g = Vec3(0, -1, 0);     // g.Omega = 0
  Vec3 Omega = Vec3(0, 0, 1);  // unit
  Vec3 cvec = Vec3(1, 0, 0);   // unit, orthogonal to Omega (lambda^0 direction)
  double a = 1.0 / 3.0;        // p = a rho^3; kappa is fixed to 3
  double eps = -1.0;
  double S1 = -2.0, T1 = 0.0, b1 = 0.0, c1 = 0.0;
  double alpha_seed = 1.7;
  Function1D S = Function1D::poly({2.0, 0.5});  // S(r1), dS != 0
  Function1D phi = Function1D::constant(0.0);
  Function1D psi = Function1D::poly({0.0, 1.0});
};

FluidFamily make_ee0a(const EE0aConfig& cfg);
FluidFamily make_ee0b(const EE0bConfig& cfg);
FluidFamily make_ea0(const EA0Config& cfg);
FluidFamily make_eh0(const EH0Config& cfg);
FluidFamily make_ah0(const AH0Config& cfg);

/// Family with the documented test parameter choices (the config defaults).
FluidFamily fluid_family_default(const std::string& id);

/// Newton solve of the family's implicit invariant relations at x.
Vec solve_invariants(const FluidFamily& family, const Vec& x, const Vec& guess);

}  // namespace riemann_kit
