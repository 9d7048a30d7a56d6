#pragma once

#include "riemann_kit/linalg.hpp"
#include "riemann_kit/rng.hpp"
#include "riemann_kit/types.hpp"

namespace riemann_kit {

inline constexpr double kDefaultFdStep = 1e-5;

/// Central-difference Jacobian du/dx, q x p. O(h^2) for C^3 solutions.
Mat jacobian_fd(const CandidateSolution& sol, const Vec& x, double h = kDefaultFdStep);

/// A^i(u) (du/dx^i)_FD - b(u) at x.
Vec residual(const SystemSpec& sys, const CandidateSolution& sol, const Vec& x,
             double h = kDefaultFdStep);

/// Max over an orthonormal basis xi_a of the complement of the wave span of
/// |J xi_a| / (|J| + eps). Waves may mix real vectors and complex pairs
/// (a complex wave contributes its real and imaginary parts).
double span_check(const Mat& J, const std::vector<CVec>& waves);
double span_check(const Mat& J, const std::vector<Vec>& waves);

struct GridSpec {
  Vec lo, hi;          // sampling box in x
  int n = 200;
  std::uint64_t seed = 0;
  double h = kDefaultFdStep;
  double tol = 1e-5;
  int threads = 1;
};

/// Aggregate residual() over n sampled points of the box that lie in the
/// solution's domain (with the FD stencil) and map to admissible states.
/// Deterministic given the seed, independent of thread count.
ResidualReport verify_on_grid(const SystemSpec& sys, const CandidateSolution& sol,
                              const GridSpec& grid);

/// |residual(h) - residual(h/2)|, the Richardson consistency probe.
double richardson_defect(const SystemSpec& sys, const CandidateSolution& sol,
                         const Vec& x, double h = kDefaultFdStep);

/// True when the whole central-difference stencil around x stays inside the
/// solution's domain.
bool stencil_in_domain(const CandidateSolution& sol, const Vec& x, double h);

}  // namespace riemann_kit
