#include "riemann_kit/func.hpp"

#include <algorithm>

namespace riemann_kit {

namespace {
double simpson(double a, double fa, double fm, double b, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double fa, double b,
             double fb, double m, double fm, double whole, double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(a, fa, flm, m, fm);
  double right = simpson(m, fm, frm, b, fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adapt(f, a, fa, m, fm, lm, flm, left, tol / 2, depth - 1) +
         adapt(f, m, fm, b, fb, rm, frm, right, tol / 2, depth - 1);
}
}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a), fb = f(b), fm = f(m);
  double whole = simpson(a, fa, fm, b, fb);
  return adapt(f, a, fa, b, fb, m, fm, whole, tol, 48);
}

double CachedIntegral::segment(int k) const {
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = segments_.find(k);
    if (it != segments_.end()) return it->second;
  }
  double v = integrate(f_, k * kDelta, (k + 1) * kDelta, tol_);
  std::lock_guard<std::mutex> lk(mu_);
  return segments_.emplace(k, v).first->second;
}

double CachedIntegral::operator()(double t) const {
  if (t == 0.0) return 0.0;
  double acc = 0.0;
  if (t > 0) {
    int n = static_cast<int>(std::floor(t / kDelta));
    for (int k = 0; k < n; ++k) acc += segment(k);
    acc += integrate(f_, n * kDelta, t, tol_);
  } else {
    int n = static_cast<int>(std::floor(-t / kDelta));
    for (int k = 1; k <= n; ++k) acc -= segment(-k);
    acc += integrate(f_, -n * kDelta, t, tol_);
  }
  return acc;
}

NewtonResult newton_solve(const std::function<Vec(const Vec&)>& F, const Vec& guess,
                          const NewtonOptions& opt) {
  NewtonResult res;
  res.x = guess;
  Vec f = F(res.x);
  double scale = 1.0 + res.x.norm();
  res.residual = f.norm();
  const int n = static_cast<int>(guess.size());
  for (res.iterations = 0; res.iterations < opt.max_iter; ++res.iterations) {
    if (res.residual / scale <= opt.tol) {
      res.converged = true;
      return res;
    }
    Mat J(f.size(), n);
    for (int i = 0; i < n; ++i) {
      Vec xp = res.x, xm = res.x;
      xp(i) += opt.fd_step;
      xm(i) -= opt.fd_step;
      J.col(i) = (F(xp) - F(xm)) / (2.0 * opt.fd_step);
    }
    Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 1e-14 * sv(0)) {
      res.condition = sv(0) / std::max(sv(sv.size() - 1), 1e-300);
      throw SolveError("newton: singular FD Jacobian, cond~" + std::to_string(res.condition));
    }
    res.condition = sv(0) / sv(sv.size() - 1);
    Vec step = svd.solve(-f);
    double lam = 1.0;
    bool accepted = false;
    for (int d = 0; d <= opt.max_damping; ++d) {
      Vec xt = res.x + lam * step;
      Vec ft;
      try {
        ft = F(xt);
      } catch (const std::exception&) {
        lam *= 0.5;
        continue;
      }
      if (ft.allFinite() && ft.norm() < res.residual) {
        res.x = xt;
        f = ft;
        res.residual = ft.norm();
        scale = 1.0 + res.x.norm();
        accepted = true;
        break;
      }
      lam *= 0.5;
    }
    if (!accepted) break;  // no descent: report non-convergence with last iterate
  }
  res.converged = res.residual / scale <= opt.tol;
  return res;
}

double newton_scalar(const std::function<double(double)>& f,
                     const std::function<double(double)>& fprime, double guess,
                     const NewtonOptions& opt) {
  double x = guess;
  double fx = f(x);
  for (int it = 0; it < opt.max_iter; ++it) {
    if (std::abs(fx) <= opt.tol * (1.0 + std::abs(x))) return x;
    double d = fprime(x);
    if (d == 0.0 || !std::isfinite(d)) throw SolveError("newton_scalar: zero derivative");
    double step = -fx / d, lam = 1.0;
    bool ok = false;
    for (int k = 0; k <= opt.max_damping; ++k) {
      double xt = x + lam * step, ft = f(xt);
      if (std::isfinite(ft) && std::abs(ft) < std::abs(fx)) {
        x = xt;
        fx = ft;
        ok = true;
        break;
      }
      lam *= 0.5;
    }
    if (!ok) break;
  }
  if (std::abs(fx) <= opt.tol * (1.0 + std::abs(x))) return x;
  throw SolveError("newton_scalar: no convergence, last x=" + std::to_string(x));
}

}  // namespace riemann_kit
