#include "riemann_kit/examples.hpp"

#include <cmath>

namespace riemann_kit {

// ------------------------------- example 1 --------------------------------

namespace {

std::vector<Mat> example1_matrices(const Eigen::Vector3d& a) {
  Mat A1(3, 3), A2(3, 3), A3(3, 3);
  A1 << a(0), -a(1), -a(2), a(1), a(0), 0, a(2), 0, a(0);
  A2 << a(1), a(0), 0, -a(0), a(1), -a(2), 0, a(2), a(1);
  A3 << a(2), 0, a(0), 0, a(2), a(1), -a(0), -a(1), a(2);
  return {Mat::Identity(3, 3), A1, A2, A3};
}

}  // namespace

SystemSpec example1_system(const Example1Config& cfg) {
  SystemSpec sys;
  sys.p = 4;
  sys.q = 3;
  sys.m = 3;
  sys.name = "example1";
  auto As = example1_matrices(cfg.a);
  sys.coeffs = [As](const Vec&) { return As; };
  const Eigen::Vector3d a = cfg.a;
  const Eigen::Vector3d k = cfg.moduli;
  switch (cfg.variant) {
    case Ex1Variant::Sech:
      for (int i = 0; i < 3; ++i)
        if (a(i) == 0.0) throw ConstraintError("example1 sech: a_i != 0 required");
      sys.source = [a](const Vec& u) {
        Vec b(3);
        for (int i = 0; i < 3; ++i) {
          double arg = a(i) * a(i) - u(i) * u(i);
          if (arg < 0) throw StateError("example1 sech: |u_i| <= |a_i| required");
          b(i) = -(u(i) / a(i)) * std::sqrt(arg);
        }
        return b;
      };
      sys.admissible = [a](const Vec& u) {
        return std::abs(u(0)) < std::abs(a(0)) && std::abs(u(1)) < std::abs(a(1)) &&
               std::abs(u(2)) < std::abs(a(2));
      };
      break;
    case Ex1Variant::Cnoidal:
      for (int i = 0; i < 3; ++i)
        if (!(k(i) * k(i) > 0 && k(i) * k(i) < 1))
          throw ConstraintError("example1 cnoidal: 0 < k_i^2 < 1 required");
      sys.source = [k](const Vec& u) {
        Vec b(3);
        for (int i = 0; i < 3; ++i) {
          double s1 = 1.0 - k(i) * k(i) * (1.0 - u(i) * u(i));
          double s2 = 1.0 - u(i) * u(i);
          if (s1 < 0 || s2 < 0) throw StateError("example1 cnoidal: state outside branch");
          b(i) = -std::sqrt(s1) * std::sqrt(s2);
        }
        return b;
      };
      sys.admissible = [](const Vec& u) {
        return u.cwiseAbs().maxCoeff() <= 1.0;
      };
      break;
    case Ex1Variant::BoundedMultisoliton:
      for (int i = 0; i < 3; ++i)
        if (!(k(i) * k(i) > 0 && k(i) * k(i) < 1))
          throw ConstraintError("example1 bounded: 0 < k_i^2 < 1 required");
      sys.source = [k](const Vec& u) {
        Vec b(3);
        for (int i = 0; i < 3; ++i) {
          double s1 = u(i) * u(i) - 1.0;
          double s2 = u(i) * u(i) - k(i) * k(i);
          if (s1 < 0 || s2 < 0) throw StateError("example1 bounded: |u_i| >= 1 required");
          b(i) = -std::sqrt(s1) * std::sqrt(s2);
        }
        return b;
      };
      sys.admissible = [](const Vec& u) { return u.cwiseAbs().minCoeff() >= 1.0; };
      break;
    case Ex1Variant::Custom:
      if (!cfg.custom_b) throw InputError("example1 custom: source required");
      sys.source = cfg.custom_b;
      sys.admissible = [](const Vec&) { return true; };
      break;
  }
  return sys;
}

std::pair<double, double> Example1Family::coords(const Eigen::Vector3d& a, const Vec& x) {
  const double ax = a(0) * x(1) + a(1) * x(2) + a(2) * x(3);
  const double M = a.squaredNorm();
  return {x(0) + M * ax, -M * x(0) + ax};  // (xi, r1)
}

std::vector<Vec> Example1Family::waves() const {
  const Eigen::Vector3d& a = cfg.a;
  const double M = cfg.M();
  Vec eta(4), re(4), im(4);
  eta << -M, a(0), a(1), a(2);
  re << 1, 0, 0, 0;
  im << 0, a(0), a(1), a(2);
  return {eta, re, im};
}

Example1Family example1_family(const Example1Config& cfg) {
  Example1Family fam;
  fam.cfg = cfg;
  const Eigen::Vector3d a = cfg.a;
  const Eigen::Vector3d k = cfg.moduli;
  const double M = cfg.M();
  const double scale = 1.0 + M * M;
  auto cs = cfg.c;
  if (cs.size() != 3) throw InputError("example1: three c_i functions required");
  const double margin = 1e-3;

  switch (cfg.variant) {
    case Ex1Variant::Sech: {
      fam.solution.eval = [a, scale, cs](const Vec& x) {
        auto [xi, r1] = Example1Family::coords(a, x);
        Vec u(3);
        for (int i = 0; i < 3; ++i) {
          double z = xi / scale + cs[i](r1);
          if (std::copysign(1.0, a(i)) * z <= 0)
            throw DomainError("example1 sech: outside monotone branch");
          u(i) = a(i) * sech(z);
        }
        return u;
      };
      fam.solution.domain = [a, scale, cs, margin](const Vec& x) {
        auto [xi, r1] = Example1Family::coords(a, x);
        for (int i = 0; i < 3; ++i)
          if (std::copysign(1.0, a(i)) * (xi / scale + cs[i](r1)) <= margin) return false;
        return true;
      };
      GridSpec g;
      g.lo = Vec(4);
      g.hi = Vec(4);
      g.lo << 0.5, 0.0, 0.0, 0.0;
      g.hi << 2.5, 0.5, 0.5, 0.5;
      g.n = 200;
      g.tol = 1e-6;
      fam.default_grid = g;
      break;
    }
    case Ex1Variant::Cnoidal: {
      fam.solution.eval = [a, scale, k](const Vec& x) {
        auto [xi, r1] = Example1Family::coords(a, x);
        (void)r1;
        Vec u(3);
        for (int i = 0; i < 3; ++i) {
          double z = xi / scale;
          if (z <= 0 || z >= 2.0 * elliptic_K(k(i)))
            throw DomainError("example1 cnoidal: sn branch requires 0 < xi/(1+M^2) < 2K");
          u(i) = jacobi_cn(z, k(i));
        }
        return u;
      };
      fam.solution.domain = [a, scale, k, margin](const Vec& x) {
        auto [xi, r1] = Example1Family::coords(a, x);
        (void)r1;
        double z = xi / scale;
        for (int i = 0; i < 3; ++i)
          if (z <= margin || z >= 2.0 * elliptic_K(k(i)) - margin) return false;
        return true;
      };
      GridSpec g;
      g.lo = Vec(4);
      g.hi = Vec(4);
      g.lo << 2.0, 0.0, 0.0, 0.0;
      g.hi << 8.0, 0.4, 0.4, 0.4;
      g.n = 200;
      g.tol = 1e-6;
      fam.default_grid = g;
      break;
    }
    case Ex1Variant::BoundedMultisoliton: {
      fam.solution.eval = [a, scale, cs, k](const Vec& x) {
        auto [xi, r1] = Example1Family::coords(a, x);
        Vec u(3);
        for (int i = 0; i < 3; ++i) {
          double z = xi / scale + cs[i](r1);
          double cn = jacobi_cn(z, k(i));
          double sn2 = 1.0 - cn * cn;
          if (sn2 <= 0.0)
            throw DomainError("example1 bounded: (1 - cn^2)^{1/2} vanishes");
          if (z <= 0 || z >= elliptic_K(k(i)))
            throw DomainError("example1 bounded: branch requires 0 < arg < K");
          u(i) = 1.0 / std::sqrt(sn2);
        }
        return u;
      };
      fam.solution.domain = [a, scale, cs, k, margin](const Vec& x) {
        auto [xi, r1] = Example1Family::coords(a, x);
        for (int i = 0; i < 3; ++i) {
          double z = xi / scale + cs[i](r1);
          if (z <= margin || z >= elliptic_K(k(i)) - margin) return false;
        }
        return true;
      };
      GridSpec g;
      g.lo = Vec(4);
      g.hi = Vec(4);
      g.lo << 2.0, 0.0, 0.0, 0.0;
      g.hi << 8.0, 0.2, 0.2, 0.2;
      g.n = 200;
      g.tol = 1e-6;
      fam.default_grid = g;
      break;
    }
    case Ex1Variant::Custom:
      throw InputError("example1: no closed form for the custom variant");
  }
  return fam;
}

Complex Example1Decomposition::omega2(const Vec& b) const {
  const double M = -eta(0);
  return (Complex(1.0, -M) * b(2)) / (2.0 * b(0) * (M * M + 1.0));
}

Complex Example1Decomposition::theta(const Vec& b) const {
  const double N = b(1) * (b(0) + b(2));
  const double D = b(0) * b(2) - b(1) * b(1);
  const double eps = D >= 0 ? 1.0 : -1.0;  // sign(b1 b3 - b2^2)
  const double A =
      -eps * b(0) * std::sqrt(b(0) * b(0) + b(1) * b(1)) /
      (b(2) * std::sqrt(b(1) * b(1) + b(2) * b(2)));
  return Complex(std::atan(N / D), 0.0) + Complex(0.0, 1.0) * std::acosh(Complex(A, 0.0));
}

bool Example1Decomposition::clean_branch(const Vec& b) const {
  if (std::abs(b(0)) < 1e-6 || std::abs(b(2)) < 1e-9) return false;
  const double D = b(0) * b(2) - b(1) * b(1);
  const double eps = D >= 0 ? 1.0 : -1.0;
  const double A = -eps * b(0) * std::sqrt(b(0) * b(0) + b(1) * b(1)) /
                   (b(2) * std::sqrt(b(1) * b(1) + b(2) * b(2)));
  return A >= 1.0;
}

CMat Example1Decomposition::L2(const Vec& b) const {
  Complex th = theta(b);
  Complex s = std::sin(th), c = std::cos(th);
  CMat L(3, 3);
  L << 0, -s, -c, 0, c, -s, 1, 0, 0;
  return L;
}

DecompositionData Example1Decomposition::data(const Example1Config& cfg) const {
  DecompositionData d;
  d.variant = DecompositionVariant::Mixed;
  d.k = 2;
  Example1Decomposition self = *this;
  SystemSpec sys = example1_system(cfg);
  auto source = sys.source;
  d.sheets = [self, source](const Vec&, const Vec& u) {
    Vec b = source(u);
    std::vector<WaveSheet> sheets(2);
    sheets[0].lambda = WaveVector::real(self.eta);
    sheets[0].omega = Complex(0.0, 0.0);  // eta-matrix vanishes; L1 free, take I
    sheets[0].rotation = CMat::Identity(3, 3);
    sheets[0].tau = CVec::Zero(3);
    sheets[1].lambda = WaveVector::complex(self.lambda);
    sheets[1].omega = self.omega2(b);
    sheets[1].rotation = self.L2(b);
    sheets[1].tau = CVec::Zero(3);
    return sheets;
  };
  return d;
}

Example1Decomposition example1_decomposition(const Example1Config& cfg) {
  Example1Decomposition d;
  const Eigen::Vector3d a = cfg.a;
  const double M = cfg.M();
  d.eta = Vec(4);
  d.eta << -M, a(0), a(1), a(2);
  d.lambda = CVec(4);
  d.lambda << Complex(1, 0), Complex(0, a(0)), Complex(0, a(1)), Complex(0, a(2));
  return d;
}

// ------------------------------- example 2 --------------------------------

SystemSpec example2_system(const Example2Config& cfg) {
  if (cfg.a(2) == 0.0) throw ConstraintError("example2: a3 != 0 required");
  if (cfg.a(1) == 0.0) throw ConstraintError("example2: a2 != 0 required");
  SystemSpec sys;
  sys.p = 4;
  sys.q = 3;
  sys.m = 3;
  sys.name = "example2";
  const Eigen::Vector3d a = cfg.a;
  Mat A1(3, 3), A2(3, 3), A3(3, 3);
  A1 << 0, a(1), a(2), 0, -a(0), 0, 0, 0, -a(0);
  A2 << -a(1), 0, 0, a(0), 0, a(2), 0, 0, -a(1);
  A3 << -a(2), 0, 0, 0, -a(2), 0, a(0), a(1), 0;
  std::vector<Mat> As = {Mat::Identity(3, 3), A1, A2, A3};
  sys.coeffs = [As](const Vec&) { return As; };
  const double kap = cfg.kappa;
  sys.source = [a, kap](const Vec& u) {
    Vec b(3);
    b << kap * a(1), -kap * a(0), std::exp(u(2));
    return b;
  };
  sys.admissible = [](const Vec& u) { return u.allFinite() && u(2) < 30.0; };
  return sys;
}

double example2_reality_defect(const Example2Config& cfg, int n) {
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = -1.0 + 2.0 * i / (n - 1);
    for (int j = 0; j < n; ++j) {
      double y = -1.0 + 2.0 * j / (n - 1);
      Complex r2(x, cfg.mu * y), r2b = std::conj(r2);
      worst = std::max(worst, std::abs(cfg.H_r2(r2, r2b) - std::conj(cfg.H_r2b(r2, r2b))));
    }
  }
  return worst;
}

std::vector<Vec> Example2Family::waves() const {
  Vec eta(4), re(4), im(4);
  eta << 1, 0, 0, 1.0 / cfg.a(2);
  re << 0, 1, 0, 0;
  im << 0, 0, cfg.mu, 0;
  return {eta, re, im};
}

Example2Family example2_family(const Example2Config& cfg) {
  if (example2_reality_defect(cfg) > 1e-10)
    throw ConstraintError("example2: H violates the reality condition dH/dr2 = conj(dH/dr2bar)");
  Example2Family fam;
  fam.cfg = cfg;
  const Eigen::Vector3d a = cfg.a;
  const double kap = cfg.kappa, mu = cfg.mu, c0 = cfg.c0, c1 = cfg.c1;
  Function1D f1 = cfg.f1, f2 = cfg.f2;
  auto H_r2 = cfg.H_r2;
  auto H_r2b = cfg.H_r2b;
  auto expint = std::make_shared<CachedIntegral>([a, mu, f1, f2](double s) {
    return std::exp(-(a(0) * f1(s) / mu + a(1) * f2(s)) / a(2));
  });
  fam.solution.eval = [=](const Vec& x) {
    const double r1 = x(0) + x(3) / a(2);
    const Complex r2(x(1), mu * x(2));
    const Complex r2b = std::conj(r2);
    const Complex i(0.0, 1.0);
    // xi, eta bound to r2, r2bar
    Complex uc = c0 / (2 * mu) * (H_r2(r2, r2b) + H_r2b(r2, r2b)) + f1(r1) / mu -
                 i * kap / 4.0 * (r2b - r2) / mu;
    Complex vc = i * c0 / 2.0 * (H_r2(r2, r2b) - H_r2b(r2, r2b)) + f2(r1) / mu +
                 kap / (4.0 * mu) * (r2 + r2b);
    const double arg = -c1 - (*expint)(r1);
    if (arg <= 0) throw DomainError("example2: log argument <= 0");
    const double w = -(a(0) * f1(r1) / mu + a(1) * f2(r1)) / a(2) - std::log(arg);
    if (std::abs(uc.imag()) > 1e-9 || std::abs(vc.imag()) > 1e-9)
      throw EvaluationError("example2: nonreal component");
    Vec u(3);
    u << uc.real(), vc.real(), w;
    return u;
  };
  fam.solution.domain = [=](const Vec& x) {
    const double r1 = x(0) + x(3) / a(2);
    return -c1 - (*expint)(r1) > 1e-6;
  };
  GridSpec g;
  g.lo = Vec::Constant(4, -0.8);
  g.hi = Vec::Constant(4, 0.8);
  g.n = 200;
  g.tol = 1e-6;
  fam.default_grid = g;
  return fam;
}

// ------------------------------- example 3 --------------------------------

SystemSpec example3_system_transformed(const Example3Config& cfg) {
  if (cfg.kappa == 0.0) throw ConstraintError("example3: kappa != 0 required");
  SystemSpec sys;
  sys.p = 2;
  sys.q = 3;
  sys.m = 2;
  sys.name = "loewner-transformed";
  sys.coeffs = [](const Vec& u) {
    Mat A1(2, 3), A2(2, 3);
    A1 << 0, -1, 0, 1, 0, u(0);
    A2 << 1, 0, 0, 0, 1, u(1);
    return std::vector<Mat>{A1, A2};
  };
  const double kap = cfg.kappa;
  sys.source = [kap](const Vec& u) {
    Vec b(2);
    b << kap * u(2) * (u(0) * u(0) + u(1) * u(1)), 0.0;
    return b;
  };
  sys.admissible = [](const Vec& u) { return u.allFinite(); };
  return sys;
}

SystemSpec example3_system_original(const Example3Config& cfg) {
  SystemSpec sys;
  sys.p = 2;
  sys.q = 3;
  sys.m = 2;
  sys.name = "loewner";
  // u_y - v_x = h1, (rho u)_x + (rho v)_y = h2
  sys.coeffs = [](const Vec& u) {
    Mat A1(2, 3), A2(2, 3);
    A1 << 0, -1, 0, u(2), 0, u(0);
    A2 << 1, 0, 0, 0, u(2), u(1);
    return std::vector<Mat>{A1, A2};
  };
  const double kap = cfg.kappa;
  // h1 = b1 and h2 = rho b2 = 0 (the continuity equation divided by rho)
  sys.source = [kap](const Vec& u) {
    Vec b(2);
    b << kap * std::log(u(2)) * (u(0) * u(0) + u(1) * u(1)), 0.0;
    return b;
  };
  sys.admissible = [](const Vec& u) { return u(2) > 0 && u.allFinite(); };
  return sys;
}

namespace {

Vec ex3_eval(const Example3Config& cfg, Ex3Variant variant, const Vec& x) {
  const Complex r(x(0), x(1));
  const Complex fr = cfg.f(r);
  const Complex fp = cfg.fprime(r);
  const double s = std::norm(fr);  // |f|^2
  if (s < 1e-12) throw DomainError("example3: f vanishes");
  const Complex i(0.0, 1.0);
  Complex F;
  switch (variant) {
    case Ex3Variant::PrintedSq:
      F = 2.0 * i * std::conj(fp) / (cfg.kappa * s);
      break;
    case Ex3Variant::PrintedQuartic:
      F = 2.0 * i * std::conj(fp) / (cfg.kappa * s * s);
      break;
    case Ex3Variant::Corrected:
      F = 2.0 * i * fr * std::conj(fp) / (cfg.kappa * s * s);
      break;
  }
  Vec u(3);
  u << F.real(), F.imag(), s;  // q = |f|^2
  return u;
}

}  // namespace

Ex3VariantReport example3_resolve_variant(const Example3Config& cfg) {
  SystemSpec sys = example3_system_transformed(cfg);
  Vec pts[3];
  pts[0] = Vec(2);
  pts[0] << 0.7, 0.4;
  pts[1] = Vec(2);
  pts[1] << 1.1, -0.6;
  pts[2] = Vec(2);
  pts[2] << 0.4, 0.9;
  Ex3VariantReport rep;
  auto probe = [&](Ex3Variant v) {
    CandidateSolution sol;
    sol.eval = [cfg, v](const Vec& x) { return ex3_eval(cfg, v, x); };
    double worst = 0.0;
    for (const auto& x : pts) worst = std::max(worst, residual(sys, sol, x).cwiseAbs().maxCoeff());
    return worst;
  };
  rep.printed_sq = probe(Ex3Variant::PrintedSq);
  rep.printed_quartic = probe(Ex3Variant::PrintedQuartic);
  rep.corrected = probe(Ex3Variant::Corrected);
  double best = std::min({rep.printed_sq, rep.printed_quartic, rep.corrected});
  rep.chosen = best == rep.corrected           ? Ex3Variant::Corrected
               : best == rep.printed_quartic   ? Ex3Variant::PrintedQuartic
                                               : Ex3Variant::PrintedSq;
  return rep;
}

Example3Family example3_family(const Example3Config& cfg) {
  Example3Family fam;
  fam.cfg = cfg;
  const Example3Config c = cfg;
  const Ex3Variant v = cfg.variant;
  fam.solution.eval = [c, v](const Vec& x) { return ex3_eval(c, v, x); };
  fam.solution.domain = [c](const Vec& x) {
    const Complex r(x(0), x(1));
    return std::norm(c.f(r)) > 1e-6;
  };
  fam.solution_original.eval = [c, v](const Vec& x) {
    Vec u = ex3_eval(c, v, x);
    u(2) = std::exp(u(2));  // rho = e^q
    return u;
  };
  fam.solution_original.domain = fam.solution.domain;
  GridSpec g;
  g.lo = Vec(2);
  g.hi = Vec(2);
  g.lo << 0.4, 0.2;
  g.hi << 1.4, 1.2;
  g.n = 200;
  g.tol = 1e-5;
  fam.default_grid = g;
  return fam;
}

}  // namespace riemann_kit
