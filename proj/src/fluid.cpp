#include "riemann_kit/fluid.hpp"

#include <cmath>
#include <memory>

namespace riemann_kit {

SystemSpec fluid_system(const FluidParams& params) {
  SystemSpec sys;
  sys.p = 4;
  sys.q = 5;
  sys.m = 5;
  sys.name = "fluid";
  const double kappa = params.kappa;
  if (!(kappa > 0)) throw InputError("fluid: kappa > 0 required");
  sys.coeffs = [kappa](const Vec& u) {
    const double rho = u(0), p = u(1);
    const Vec3 v(u(2), u(3), u(4));
    std::vector<Mat> As(4, Mat::Zero(5, 5));
    // time block
    for (int mu = 0; mu < 3; ++mu) As[0](mu, 2 + mu) = rho;
    As[0](3, 0) = 1.0;
    As[0](4, 1) = 1.0;
    As[0](4, 0) = -kappa * p / rho;
    // spatial blocks; entropy row in the expanded form
    // p_t + v.grad p - (kappa p/rho)(rho_t + v.grad rho) = 0
    for (int d = 0; d < 3; ++d) {
      Mat& A = As[1 + d];
      for (int mu = 0; mu < 3; ++mu) A(mu, 2 + mu) = rho * v(d);
      A(d, 1) = 1.0;
      A(3, 0) = v(d);
      A(3, 2 + d) = rho;
      A(4, 1) = v(d);
      A(4, 0) = -kappa * p / rho * v(d);
    }
    return As;
  };
  Vec3 g = params.g, Om = params.Omega;
  sys.source = [g, Om](const Vec& u) {
    const double rho = u(0);
    const Vec3 v(u(2), u(3), u(4));
    Vec b = Vec::Zero(5);
    b.head<3>() = rho * (v.cross(Om) + g);
    return b;
  };
  sys.admissible = [](const Vec& u) { return u(0) > 0 && u(1) > 0 && u.allFinite(); };
  return sys;
}

double delta_speed(const FluidState& state, const Vec& lambda) {
  if (lambda.size() != 4) throw InputError("delta_speed: lambda must have 4 components");
  return lambda(0) + state.v.dot(lambda.tail<3>());
}

namespace {
Vec assemble_lambda(double l0, const Vec3& lv) {
  Vec l(4);
  l << l0, lv(0), lv(1), lv(2);
  return l;
}
Vec assemble_gamma(double grho, double gp, const Vec3& gv) {
  Vec g(5);
  g << grho, gp, gv(0), gv(1), gv(2);
  return g;
}
}  // namespace

IntegralElement fluid_element(FluidElementKind kind, const FluidState& state,
                              const FluidParams& params, const FluidElementOptions& opt) {
  const double rho = state.rho, p = state.p, kappa = params.kappa;
  const Vec3 v = state.v;
  const Vec3 G = params.g - params.Omega.cross(v);
  const double cs = state.sound_speed(kappa);
  IntegralElement e;
  switch (kind) {
    case FluidElementKind::E: {
      const Vec3 lv = opt.lambda_vec;
      if (lv.norm() == 0.0) throw ConstraintError("E: lambda_vec must be nonzero");
      if (std::abs(opt.gamma_vec.dot(lv)) > 1e-10 * (1.0 + opt.gamma_vec.norm() * lv.norm()))
        throw ConstraintError("E: gamma_vec . lambda_vec = 0 required");
      e.lambda = WaveVector::real(assemble_lambda(-v.dot(lv), lv));
      e.gamma = assemble_gamma(opt.gamma_rho, 0.0, opt.gamma_vec).cast<Complex>();
      e.kind = ElementKind::Homogeneous;
      e.label = "entropic";
      break;
    }
    case FluidElementKind::A: {
      const Vec3 lv = opt.lambda_vec;
      if (lv.norm() == 0.0) throw ConstraintError("A: lambda_vec must be nonzero");
      const double dl = opt.eps * cs * lv.norm();
      Vec3 gv = -opt.eps * cs * lv.normalized() * opt.gamma_rho / rho;
      e.lambda = WaveVector::real(assemble_lambda(dl - v.dot(lv), lv));
      e.gamma = assemble_gamma(opt.gamma_rho, kappa * p / rho * opt.gamma_rho, gv).cast<Complex>();
      e.kind = ElementKind::Homogeneous;
      e.label = "acoustic";
      break;
    }
    case FluidElementKind::E0: {
      if (G.norm() < 1e-12)
        throw DomainError("E0: g - Omega x v = 0, wave vector would vanish");
      e.lambda = WaveVector::real(assemble_lambda(-v.dot(G), G));
      e.gamma = assemble_gamma(opt.gamma_rho, rho, opt.alpha.cross(G)).cast<Complex>();
      e.kind = ElementKind::Inhomogeneous;
      e.label = "entropic-inhomogeneous";
      break;
    }
    case FluidElementKind::A0: {
      const Vec3 lv = opt.lambda_vec;
      if (lv.norm() == 0.0) throw ConstraintError("A0: lambda_vec must be nonzero");
      if (std::abs(lv.dot(G)) > 1e-10 * (1.0 + lv.norm() * G.norm()))
        throw ConstraintError("A0: lambda_vec . (g - Omega x v) = 0 required, got " +
                              std::to_string(lv.dot(G)));
      const double dl = opt.eps * cs * lv.norm();
      // exact elimination; the rho delta|lambda| prefactor reduces to the
      // printed form at rho = 1
      Vec3 gv = (rho * G - kappa * p / rho * opt.gamma_rho * lv) / (rho * dl);
      e.lambda = WaveVector::real(assemble_lambda(dl - v.dot(lv), lv));
      e.gamma = assemble_gamma(opt.gamma_rho, kappa * p / rho * opt.gamma_rho, gv).cast<Complex>();
      e.kind = ElementKind::Inhomogeneous;
      e.label = "acoustic-inhomogeneous";
      break;
    }
    case FluidElementKind::H0: {
      const Vec3 lv = opt.lambda_vec;
      if (lv.norm() == 0.0) throw ConstraintError("H0: lambda_vec must be nonzero");
      const double dl = opt.delta_speed;
      const double margin = 1e-6;
      if (std::abs(dl) < margin || std::abs(std::abs(dl) - cs * lv.norm()) < margin)
        throw ConstraintError("H0: delta|lambda| must avoid 0 and +-c_s|lambda| by 1e-6");
      const double X = G.dot(lv);
      const double D = dl * dl - kappa * p / rho * lv.squaredNorm();
      Vec3 gv = (rho * G + kappa * p * X / D * lv) / (rho * dl);
      e.lambda = WaveVector::real(assemble_lambda(dl - v.dot(lv), lv));
      e.gamma = assemble_gamma(-rho * X / D, -kappa * p * X / D, gv).cast<Complex>();
      e.kind = ElementKind::Inhomogeneous;
      e.label = "hydrodynamic-inhomogeneous";
      break;
    }
  }
  return e;
}

// ---------------------------------------------------------------------------
// Families
// ---------------------------------------------------------------------------

namespace {

constexpr double kUnit = 1e-10;

void require(bool cond, const std::string& msg) {
  if (!cond) throw ConstraintError(msg);
}

// Probe a scalar constraint over a parameter interval.
void probe(const std::function<bool(double)>& ok, double lo, double hi,
           const std::string& msg) {
  for (int i = 0; i <= 20; ++i) {
    double t = lo + (hi - lo) * i / 20.0;
    if (!ok(t)) throw ConstraintError(msg + " (violated at " + std::to_string(t) + ")");
  }
}

struct RelationSet {
  std::function<Vec(const Vec& x, const Vec& r)> F;  // 2 relations, = 0
  std::function<Vec(const Vec& x)> seed;             // explicit/approximate start
  std::function<Vec(const Vec& x, const Vec& r)> state;  // (rho,p,v) at solved invariants
};

Vec solve_relations(const RelationSet& rel, const Vec& x, const Vec& guess) {
  Vec g = guess.size() == 2 && guess.allFinite() ? guess : rel.seed(x);
  auto fn = [&](const Vec& r) { return rel.F(x, r); };
  NewtonResult res = newton_solve(fn, g);
  if (!res.converged) {
    // coarse scan over r1 keeping the seeded r0
    Vec best = g;
    double bestn = res.residual;
    for (int i = 0; i <= 80; ++i) {
      Vec trial = g;
      trial(1) = -4.0 + 8.0 * i / 80.0;
      double n = fn(trial).norm();
      if (n < bestn) {
        bestn = n;
        best = trial;
      }
    }
    res = newton_solve(fn, best);
    if (!res.converged)
      throw SolveError("invariant solve: Newton stalled, residual=" +
                       std::to_string(res.residual));
  }
  return res.x;
}

FluidFamily family_from(const std::string& id, const FluidParams& params,
                        std::shared_ptr<RelationSet> rel, const GridSpec& grid) {
  FluidFamily fam;
  fam.id = id;
  fam.params = params;
  fam.default_grid = grid;
  fam.invariants = [rel](const Vec& x, const Vec& seed) {
    return solve_relations(*rel, x, seed);
  };
  fam.solution.eval = [rel](const Vec& x) {
    Vec r = solve_relations(*rel, x, Vec());
    return rel->state(x, r);
  };
  fam.solution.domain = [rel](const Vec& x) {
    try {
      Vec r = solve_relations(*rel, x, Vec());
      Vec u = rel->state(x, r);
      return u.allFinite() && u(0) > 0 && u(1) > 0;
    } catch (const std::exception&) {
      return false;
    }
  };
  return fam;
}

GridSpec box_grid(double half, double tol = 1e-5) {
  GridSpec g;
  g.lo = Vec::Constant(4, -half);
  g.hi = Vec::Constant(4, half);
  g.n = 200;
  g.tol = tol;
  g.h = kDefaultFdStep;
  return g;
}

Vec3 spatial(const Vec& x) { return Vec3(x(1), x(2), x(3)); }

}  // namespace

std::vector<Vec> FluidFamily::wave_covectors(const Vec& x, double h) const {
  Vec r0 = invariants(x, Vec());
  std::vector<Vec> waves(2, Vec::Zero(x.size()));
  for (int i = 0; i < x.size(); ++i) {
    Vec xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    Vec rp = invariants(xp, r0), rm = invariants(xm, r0);
    waves[0](i) = (rp(0) - rm(0)) / (2 * h);
    waves[1](i) = (rp(1) - rm(1)) / (2 * h);
  }
  return waves;
}

FluidFamily make_ee0a(const EE0aConfig& cfg) {
  require(cfg.g.norm() > 0, "EE0a: g must be nonzero");
  require(std::abs(cfg.Omega.norm() - 1.0) < kUnit, "EE0a: |Omega| = 1 required");
  require(std::abs(cfg.g.dot(cfg.Omega)) < kUnit * cfg.g.norm(), "EE0a: g . Omega = 0 required");
  probe([&](double t) { return cfg.p.dot(t) > 0; }, -1.5, 1.5, "EE0a requires dp/dr0 > 0");
  probe([&](double t) { return cfg.v2.dot(t) != 0; }, -1.5, 1.5, "EE0a requires dv2/dr1 != 0");

  const double gmag = cfg.g.norm(), g2 = gmag * gmag;
  const double c0 = gmag / (1.0 + std::pow(gmag, 4));  // enforced constants
  const double ephi0 = 1.0 / c0;
  const double s = cfg.upper_signs ? 1.0 : -1.0;
  const double root = std::sqrt(g2 - c0 * c0);
  const Vec3 g = cfg.g, gxO = cfg.g.cross(cfg.Omega), Om = cfg.Omega;
  probe([&](double t) { return std::abs(s * root * cfg.a3(t) + c0 * cfg.a1(t)) > 1e-12; },
        -1.5, 1.5, "EE0a requires +-sqrt(g^2-c0^2) a3 != -c0 a1");
  auto chi = cfg.chi;
  Function1D pfun = cfg.p, v2 = cfg.v2, a1 = cfg.a1, a3 = cfg.a3, psi = cfg.psi;
  const double c1 = cfg.c1;

  auto rel = std::make_shared<RelationSet>();
  rel->F = [=](const Vec& x, const Vec& r) {
    const double t = x(0);
    const Vec3 xs = spatial(x);
    Vec f(2);
    f(0) = c0 * t + s * root / g2 * g.dot(xs) - c0 / g2 * gxO.dot(xs) + c1 -
           r(0) / ephi0;
    double chiterm = 0.0;
    if (chi)
      chiterm = integrate([&](double sg) { return chi(sg, r(1)); }, 0.0, r(0)) / ephi0;
    f(1) = chiterm +
           (ephi0 * (s * root * a3(r(1)) + c0 * a1(r(1))) - a3(r(1)) * g2) * t +
           a1(r(1)) * g.dot(xs) + a3(r(1)) * gxO.dot(xs) - psi(r(1));
    return f;
  };
  rel->seed = [=](const Vec& x) {
    const double t = x(0);
    const Vec3 xs = spatial(x);
    Vec r(2);
    r(0) = ephi0 * (c0 * t + s * root / g2 * g.dot(xs) - c0 / g2 * gxO.dot(xs) + c1);
    r(1) = 0.0;
    return r;
  };
  rel->state = [=](const Vec&, const Vec& r) {
    const double rho = pfun.dot(r(0)), p = pfun(r(0));
    if (!(rho > 0)) throw DomainError("EE0a: dp/dr0 <= 0 at solved point");
    if (!(p > 0)) throw DomainError("EE0a: p <= 0 at solved point");
    Vec3 v = -ephi0 * c0 / g2 * g + v2(r(1)) * Om + (-s * ephi0 * root / g2 + 1.0) * gxO;
    Vec u(5);
    u << rho, p, v(0), v(1), v(2);
    return u;
  };
  return family_from("EE0a", {cfg.kappa, cfg.g, cfg.Omega}, rel, box_grid(0.3));
}

FluidFamily make_ee0b(const EE0bConfig& cfg) {
  const double gO = cfg.g.dot(cfg.Omega);
  require(std::abs(cfg.Omega.norm() - 1.0) < kUnit, "EE0b: |Omega| = 1 required");
  require(std::abs(gO) > 1e-12, "EE0b: g . Omega != 0 required");
  require(cfg.g.cross(cfg.Omega).norm() > 1e-12, "EE0b: g x Omega != 0 required");
  probe([&](double t) { return cfg.p.dot(t) > 0; }, -1.5, 1.5, "EE0b requires dp/dr0 > 0");
  probe([&](double t) { return cfg.v1.dot(t) != 0 || cfg.v3.dot(t) != 0; }, -1.5, 1.5,
        "EE0b requires dv1 != 0 or dv3 != 0");

  const Vec3 g = cfg.g, Om = cfg.Omega, gxO = cfg.g.cross(cfg.Omega);
  const double g2 = cfg.g.squaredNorm(), c = cfg.c;
  Function1D pfun = cfg.p, v1 = cfg.v1, v3 = cfg.v3, phi = cfg.phi;
  auto I1 = std::make_shared<CachedIntegral>(
      [v1, v3](double r) { return v1.dot(r) * (1.0 - v3(r)) + v3.dot(r) * v1(r); });
  auto I2 = std::make_shared<CachedIntegral>(
      [v1, v3](double r) { return v1.dot(r) * v3(r) - v1(r) * v3.dot(r); });

  auto rel = std::make_shared<RelationSet>();
  auto T = [=](double r1) {
    return -v1(r1) * g2 + g2 * (*I1)(r1) + gO * gO * (*I2)(r1) - c * gO;
  };
  auto E = [=](double r1) -> Vec3 {
    return (1.0 - v3(r1)) * g + v3(r1) * gO * Om + v1(r1) * gxO;
  };
  rel->F = [=](const Vec& x, const Vec& r) {
    const double t = x(0);
    const Vec3 xs = spatial(x);
    const double r1 = r(1);
    const double Tdot = (gO * gO - g2) * (v1.dot(r1) * v3(r1) - v1(r1) * v3.dot(r1));
    const Vec3 Edot = -v3.dot(r1) * g + v3.dot(r1) * gO * Om + v1.dot(r1) * gxO;
    Vec f(2);
    f(0) = T(r1) * t + E(r1).dot(xs) - phi(r1) - r(0);
    f(1) = Tdot * t + Edot.dot(xs) - phi.dot(r1);
    return f;
  };
  rel->seed = [=](const Vec& x) {
    Vec r(2);
    r(1) = 0.0;
    r(0) = T(0.0) * x(0) + E(0.0).dot(spatial(x)) - phi(0.0);
    return r;
  };
  rel->state = [=](const Vec&, const Vec& r) {
    const double rho = pfun.dot(r(0)), p = pfun(r(0));
    if (!(rho > 0) || !(p > 0)) throw DomainError("EE0b: p or dp/dr0 nonpositive at solved point");
    const double V = -g2 / gO * (*I1)(r(1)) - gO * (*I2)(r(1)) + c;
    Vec3 v = v1(r(1)) * g + V * Om + v3(r(1)) * gxO;
    Vec u(5);
    u << rho, p, v(0), v(1), v(2);
    return u;
  };
  return family_from("EE0b", {cfg.kappa, cfg.g, cfg.Omega}, rel, box_grid(0.3));
}

FluidFamily make_ea0(const EA0Config& cfg) {
  require(cfg.rho0 > 0 && cfg.p0 > 0, "EA0: rho0, p0 > 0 required");
  require(std::abs(cfg.Omega.norm() - 1.0) < kUnit, "EA0: |Omega| = 1 required");
  require(std::abs(cfg.g.dot(cfg.Omega)) < kUnit * (1.0 + cfg.g.norm()),
          "EA0: g . Omega = 0 required");
  probe([&](double t) { return cfg.b2.dot(t) != 0 && cfg.b2(t) != 0; }, -1.5, 1.5,
        "EA0 requires b2 != 0 and db2/dr1 != 0");
  const double cs = std::sqrt(cfg.kappa * cfg.p0 / cfg.rho0);
  const Vec3 g = cfg.g, Om = cfg.Omega, gxO = cfg.g.cross(cfg.Omega);
  const double eps = cfg.eps, eps1 = cfg.eps1, B0 = cfg.B0, c1 = cfg.c1;
  const double rho0 = cfg.rho0, p0 = cfg.p0;
  Function1D b1 = cfg.b1, b2 = cfg.b2, phi = cfg.phi, psi = cfg.psi;
  auto I = std::make_shared<CachedIntegral>([phi](double r) { return std::exp(-phi(r)); });

  auto rel = std::make_shared<RelationSet>();
  rel->F = [=](const Vec& x, const Vec& r) {
    const double t = x(0);
    const Vec3 xs = spatial(x);
    Vec f(2);
    f(0) = (eps * cs - eps1 * B0) * t + eps1 * Om.dot(xs) + c1 - (*I)(r(0));
    f(1) = B0 * t - Om.dot(xs) - psi(r(1));
    return f;
  };
  rel->seed = [=](const Vec& x) {
    Vec r(2);
    r(0) = (eps * cs - eps1 * B0) * x(0) + eps1 * Om.dot(spatial(x)) + c1;  // exact for phi=0
    r(1) = 0.0;
    return r;
  };
  rel->state = [=](const Vec&, const Vec& r) {
    const double Th = eps / cs * (*I)(r(0)) + b1(r(1));
    Vec3 v = b2(r(1)) * std::cos(Th) * g + B0 * Om + (b2(r(1)) * std::sin(Th) + 1.0) * gxO;
    Vec u(5);
    u << rho0, p0, v(0), v(1), v(2);
    return u;
  };
  return family_from("EA0", {cfg.kappa, cfg.g, cfg.Omega}, rel, box_grid(0.5));
}

FluidFamily make_eh0(const EH0Config& cfg) {
  const Vec3 cv = cfg.cvec, Om = cfg.Omega, g = cfg.g;
  const Vec3 cxO = cv.cross(Om);
  const double G = g.dot(cxO), gO = g.dot(Om), gc = g.dot(cv);
  require(std::abs(cv.norm() - 1.0) < kUnit, "EH0: |c| = 1 required");
  require(std::abs(Om.norm() - 1.0) < kUnit, "EH0: |Omega| = 1 required");
  require(std::abs(cv.dot(Om)) < kUnit, "EH0: c . Omega = 0 required");
  require(std::abs(G) > 1e-12, "EH0: g . (c x Omega) != 0 required");
  require(std::abs(gO) > 1e-12, "EH0: g . Omega != 0 required");
  require(cfg.p0 > 0, "EH0: p0 > 0 required");
  probe([&](double t) { return cfg.rho(t) > 0 && cfg.rho.dot(t) != 0; }, -1.5, 1.5,
        "EH0 requires rho > 0 and drho/dr1 != 0");
  probe([&](double t) { return cfg.b.dot(t) * cfg.a2(t) == 0.0; }, -1.5, 1.5,
        "EH0 requires db/dr1 * a2 = 0");
  probe([&](double t) { return cfg.a2(t) != 0 || cfg.a3(t) != 0 || cfg.a(t) != 0; }, -1.5,
        1.5, "EH0 requires a2, a3, a not all zero");
  Function1D rhof = cfg.rho, phi = cfg.phi, bf = cfg.b, af = cfg.a;
  Function1D a1 = cfg.a1, a2 = cfg.a2, a3 = cfg.a3, psi = cfg.psi;
  const double p0 = cfg.p0;
  auto I = std::make_shared<CachedIntegral>([phi](double r) { return std::exp(-phi(r)); });

  auto rel = std::make_shared<RelationSet>();
  rel->F = [=](const Vec& x, const Vec& r) {
    const double t = x(0);
    const Vec3 xs = spatial(x);
    const double Q = cv.dot(xs), r1 = r(1);
    Vec f(2);
    f(0) = Q - (*I)(r(0));
    f(1) = Q / G * (af(r1) - G * a1(r1) + bf(r1) * a2(r1) + gc * a3(r1)) -
           0.5 * gO * a2(r1) * (Q / G) * (Q / G) + af(r1) * t +
           (a1(r1) * cv + a2(r1) * Om + a3(r1) * cxO).dot(xs) - psi(r1);
    return f;
  };
  rel->seed = [=](const Vec& x) {
    Vec r(2);
    r(0) = cv.dot(spatial(x));
    r(1) = 0.0;
    return r;
  };
  rel->state = [=](const Vec&, const Vec& r) {
    const double rho = rhof(r(1));
    if (!(rho > 0)) throw DomainError("EH0: rho <= 0 at solved point");
    Vec3 v = -G * cv + (-gO / G * (*I)(r(0)) + bf(r(1))) * Om + gc * cxO;
    Vec u(5);
    u << rho, p0, v(0), v(1), v(2);
    return u;
  };
  return family_from("EH0", {cfg.kappa, cfg.g, cfg.Omega}, rel, box_grid(0.3));
}

namespace {

/// alpha + G candidates of the AH0 quadratic at given (I, S); quadratic in
/// (alpha+G)^2.
std::vector<double> ah0_candidates(double I, double S, double a, double eps, double S1,
                                   double gcT, double sq3a) {
  const double C = eps * sq3a * S + S1 - gcT * I + 0.5 * I * I;
  const double disc = C * C - 3.0 * a * S * S;
  if (disc < 0) throw SolveError("AH0: quadratic has no real root (negative discriminant)");
  std::vector<double> out;
  for (double B : {-C + std::sqrt(disc), -C - std::sqrt(disc)}) {
    if (B <= 0) continue;
    out.push_back(std::sqrt(B));
    out.push_back(-std::sqrt(B));
  }
  if (out.empty()) throw SolveError("AH0: quadratic has no real root (B <= 0)");
  return out;
}

double nearest(const std::vector<double>& cands, double ref, double S) {
  double best = 0.0, bestd = 1e300;
  for (double c : cands) {
    if (!(S / c > 0)) continue;  // rho = S/A must stay positive
    double d = std::abs(c - ref);
    if (d < bestd) {
      bestd = d;
      best = c;
    }
  }
  if (bestd == 1e300) throw SolveError("AH0: no root branch with rho > 0");
  return best;
}

}  // namespace

FluidFamily make_ah0(const AH0Config& cfg) {
  const Vec3 cv = cfg.cvec, Om = cfg.Omega, g = cfg.g;
  const Vec3 cxO = cv.cross(Om);
  const double G = g.dot(cxO), gc = g.dot(cv);
  require(std::abs(cv.norm() - 1.0) < kUnit, "AH0: |c| = 1 required");
  require(std::abs(Om.norm() - 1.0) < kUnit, "AH0: |Omega| = 1 required");
  require(std::abs(cv.dot(Om)) < kUnit, "AH0: c . Omega = 0 required");
  require(std::abs(g.dot(Om)) < kUnit * (1.0 + g.norm()), "AH0: g . Omega = 0 required");
  require(cfg.a > 0, "AH0: a > 0 required");
  probe([&](double t) { return cfg.S(t) != 0 && cfg.S.dot(t) != 0; }, -1.5, 1.5,
        "AH0 requires S != 0 and dS/dr1 != 0");
  const double a = cfg.a, eps = cfg.eps, S1 = cfg.S1, T1 = cfg.T1, b1 = cfg.b1, c1 = cfg.c1;
  const double sq3a = std::sqrt(3.0 * a);
  const double gcT = gc - T1;
  const double aseed = cfg.alpha_seed + G;
  Function1D S = cfg.S, phi = cfg.phi, psi = cfg.psi;
  auto I = std::make_shared<CachedIntegral>([phi](double r) { return std::exp(-phi(r)); });

  // J(r0, r1) = int_0^{r0} e^{-phi(r)} dalpha/dr1(r, r1) dr with the quadratic's
  // branch continued along the quadrature nodes; also returns A at r = r0.
  auto path = [=](double r0, double r1, double* Aend) {
    const double Sv = S(r1), Sdv = S.dot(r1);
    int n = 64;
    double prev = 0.0;
    for (int pass = 0;; ++pass) {
      double ref = nearest(ah0_candidates(0.0, Sv, a, eps, S1, gcT, sq3a), aseed, Sv);
      double h = r0 / n;
      auto integrand = [&](double A) { return -eps * sq3a * Sdv * A / (A * A - eps * sq3a * Sv); };
      double sum = 0.0, Aprev = ref;
      // composite Simpson over nodes r_j = j h with branch tracking
      std::vector<double> fx(n + 1);
      for (int j = 0; j <= n; ++j) {
        double r = j * h;
        double Aj = nearest(ah0_candidates((*I)(r), Sv, a, eps, S1, gcT, sq3a), Aprev, Sv);
        fx[j] = std::exp(-phi(r)) * integrand(Aj);
        Aprev = Aj;
      }
      for (int j = 0; j + 2 <= n; j += 2) sum += h / 3.0 * (fx[j] + 4.0 * fx[j + 1] + fx[j + 2]);
      *Aend = Aprev;
      if (pass > 0 && std::abs(sum - prev) < 1e-11 * (1.0 + std::abs(sum))) return sum;
      if (n >= 1024) return sum;
      prev = sum;
      n *= 2;
    }
  };

  auto rel = std::make_shared<RelationSet>();
  rel->F = [=](const Vec& x, const Vec& r) {
    const double t = x(0);
    const Vec3 xs = spatial(x);
    double Aend = 0.0;
    const double J = path(r(0), r(1), &Aend);
    Vec f(2);
    f(0) = G * t + cv.dot(xs) + c1 - (*I)(r(0));
    f(1) = t + eps / (sq3a * S.dot(r(1))) * J - psi(r(1));
    return f;
  };
  rel->seed = [=](const Vec& x) {
    Vec r(2);
    r(0) = G * x(0) + cv.dot(spatial(x)) + c1;  // exact for phi = 0
    r(1) = 0.0;
    return r;
  };
  rel->state = [=](const Vec&, const Vec& r) {
    double Aend = 0.0;
    path(r(0), r(1), &Aend);
    const double rho = S(r(1)) / Aend;
    if (!(rho > 0)) throw DomainError("AH0: S/(alpha+G) <= 0 at solved point");
    const double alpha = Aend - G;
    Vec3 v = alpha * cv + b1 * Om + ((*I)(r(0)) + T1) * cxO;
    Vec u(5);
    u << rho, a * rho * rho * rho, v(0), v(1), v(2);
    return u;
  };
  return family_from("AH0", {3.0, cfg.g, cfg.Omega}, rel, box_grid(0.25));
}

FluidFamily fluid_family_default(const std::string& id) {
  if (id == "EE0a") return make_ee0a({});
  if (id == "EE0b") return make_ee0b({});
  if (id == "EA0") return make_ea0({});
  if (id == "EH0") return make_eh0({});
  if (id == "AH0") return make_ah0({});
  throw InputError("unknown fluid family id: " + id);
}

Vec solve_invariants(const FluidFamily& family, const Vec& x, const Vec& guess) {
  return family.invariants(x, guess);
}

}  // namespace riemann_kit
