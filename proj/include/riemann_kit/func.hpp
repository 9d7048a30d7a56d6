#pragma once

#include "riemann_kit/types.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace riemann_kit {

/// Smooth scalar function supplied with its derivative. Family formulas
/// consume derivatives explicitly (rho = p'(r0), ...), so both evaluators are
/// mandatory for free functions.
struct Function1D {
  std::function<double(double)> value;
  std::function<double(double)> deriv;

  double operator()(double t) const { return value(t); }
  double dot(double t) const { return deriv(t); }

  static Function1D constant(double c) {
    return {[c](double) { return c; }, [](double) { return 0.0; }};
  }
  static Function1D poly(std::vector<double> coeffs) {
    auto c = std::make_shared<std::vector<double>>(std::move(coeffs));
    return {[c](double t) {
              double v = 0.0;
              for (size_t i = c->size(); i-- > 0;) v = v * t + (*c)[i];
              return v;
            },
            [c](double t) {
              double v = 0.0;
              for (size_t i = c->size(); i-- > 1;) v = v * t + i * (*c)[i];
              return v;
            }};
  }
};

/// Adaptive Simpson quadrature to absolute tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-12);

/// Cached antiderivative I(t) = int_0^t f(s) ds over a fixed segmentation, so
/// the value is independent of evaluation order (deterministic under
/// multi-threaded sweeps). Segment sums are cached under a lock.
class CachedIntegral {
 public:
  explicit CachedIntegral(std::function<double(double)> f, double tol = 1e-13)
      : f_(std::move(f)), tol_(tol) {}
  CachedIntegral(const CachedIntegral& o) : f_(o.f_), tol_(o.tol_) {}
  double operator()(double t) const;

 private:
  double segment(int k) const;  // int over [k*delta, (k+1)*delta]
  static constexpr double kDelta = 0.25;
  std::function<double(double)> f_;
  double tol_;
  mutable std::mutex mu_;
  mutable std::map<int, double> segments_;
};

struct NewtonOptions {
  int max_iter = 50;
  int max_damping = 20;
  double tol = 1e-10;  // on the scaled residual
  double fd_step = 1e-7;
};

struct NewtonResult {
  Vec x;
  double residual = 0.0;
  bool converged = false;
  int iterations = 0;
  double condition = 0.0;
};

/// Damped Newton with FD Jacobian and step halving on residual increase.
NewtonResult newton_solve(const std::function<Vec(const Vec&)>& F, const Vec& guess,
                          const NewtonOptions& opt = {});

/// Scalar Newton with damping; returns NaN-free result or throws SolveError.
double newton_scalar(const std::function<double(double)>& f,
                     const std::function<double(double)>& fprime, double guess,
                     const NewtonOptions& opt = {});

}  // namespace riemann_kit
