#include "riemann_kit/fd.hpp"

#include <cmath>
#include <future>

namespace riemann_kit {

static Vec eval_checked(const CandidateSolution& sol, const Vec& x) {
  if (sol.domain && !sol.domain(x)) throw DomainError("stencil point outside domain");
  Vec u = sol.eval(x);
  if (!u.allFinite()) throw EvaluationError("non-finite solution value");
  return u;
}

bool stencil_in_domain(const CandidateSolution& sol, const Vec& x, double h) {
  if (!sol.domain) return true;
  if (!sol.domain(x)) return false;
  Vec y = x;
  for (int i = 0; i < x.size(); ++i) {
    y(i) = x(i) + h;
    if (!sol.domain(y)) return false;
    y(i) = x(i) - h;
    if (!sol.domain(y)) return false;
    y(i) = x(i);
  }
  return true;
}

Mat jacobian_fd(const CandidateSolution& sol, const Vec& x, double h) {
  if (!(h > 0)) throw InputError("fd step must be positive");
  const int p = static_cast<int>(x.size());
  Vec up = eval_checked(sol, x);
  Mat J(up.size(), p);
  Vec y = x;
  for (int i = 0; i < p; ++i) {
    y(i) = x(i) + h;
    Vec fp = eval_checked(sol, y);
    y(i) = x(i) - h;
    Vec fm = eval_checked(sol, y);
    y(i) = x(i);
    J.col(i) = (fp - fm) / (2.0 * h);
  }
  return J;
}

Vec residual(const SystemSpec& sys, const CandidateSolution& sol, const Vec& x, double h) {
  Vec u = eval_checked(sol, x);
  if (sys.admissible && !sys.admissible(u)) throw StateError("inadmissible state");
  Mat J = jacobian_fd(sol, x, h);
  auto As = sys.coeffs(u);
  Vec r = Vec::Zero(sys.m);
  for (int i = 0; i < sys.p; ++i) r += As[i] * J.col(i);
  return r - sys.source(u);
}

double richardson_defect(const SystemSpec& sys, const CandidateSolution& sol,
                         const Vec& x, double h) {
  return (residual(sys, sol, x, h) - residual(sys, sol, x, h / 2)).norm();
}

double span_check(const Mat& J, const std::vector<CVec>& waves) {
  if (waves.empty()) throw InputError("span_check: empty wave set");
  const int p = static_cast<int>(J.cols());
  std::vector<Vec> rows;
  for (const auto& w : waves) {
    if (w.size() != p) throw InputError("span_check: wave dimension mismatch");
    Vec re = w.real(), im = w.imag();
    if (re.norm() > 0) rows.push_back(re);
    if (im.norm() > 0) rows.push_back(im);
  }
  Mat W(rows.size(), p);
  for (size_t i = 0; i < rows.size(); ++i) W.row(static_cast<int>(i)) = rows[i];
  // rank-revealing: redundant wave directions collapse into the same span
  if (numerical_rank<double>(W) == 0) throw InputError("span_check: zero wave span");
  Mat Xi = orthogonal_complement(W);
  double denom = J.norm() + 1e-300;
  double worst = 0.0;
  for (int a = 0; a < Xi.cols(); ++a)
    worst = std::max(worst, (J * Xi.col(a)).norm() / denom);
  return worst;  // 0 when the complement is empty (k = p)
}

double span_check(const Mat& J, const std::vector<Vec>& waves) {
  std::vector<CVec> cw;
  cw.reserve(waves.size());
  for (const auto& w : waves) cw.push_back(w.cast<Complex>());
  return span_check(J, cw);
}

ResidualReport verify_on_grid(const SystemSpec& sys, const CandidateSolution& sol,
                              const GridSpec& grid) {
  if (grid.n < 1) throw InputError("verify_on_grid: n >= 1 required");
  SplitMix64 rng(grid.seed);
  BoxSampler sampler(rng, grid.lo, grid.hi);
  auto usable = [&](const Vec& x) {
    if (!stencil_in_domain(sol, x, grid.h)) return false;
    Vec u = sol.eval(x);
    return u.allFinite() && (!sys.admissible || sys.admissible(u));
  };
  std::vector<Vec> pts;
  try {
    pts = sampler.sample(grid.n, usable);
  } catch (const SolveError&) {
    throw SolveError("verify_on_grid: zero usable samples in region");
  }

  auto eval_range = [&](size_t b, size_t e) {
    std::vector<Vec> out;
    out.reserve(e - b);
    for (size_t i = b; i < e; ++i)
      out.push_back(residual(sys, sol, pts[i], grid.h).cwiseAbs());
    return out;
  };

  std::vector<Vec> res;
  int nthreads = std::max(1, grid.threads);
  if (nthreads == 1 || pts.size() < 16) {
    res = eval_range(0, pts.size());
  } else {
    size_t chunk = (pts.size() + nthreads - 1) / nthreads;
    std::vector<std::future<std::vector<Vec>>> futs;
    for (size_t b = 0; b < pts.size(); b += chunk)
      futs.push_back(std::async(std::launch::async, eval_range, b,
                                std::min(b + chunk, pts.size())));
    for (auto& f : futs) {
      auto part = f.get();  // chunks combined in index order: thread-count independent
      res.insert(res.end(), part.begin(), part.end());
    }
  }

  ResidualReport rep;
  rep.samples = static_cast<int>(res.size());
  rep.fd_step = grid.h;
  rep.tolerance = grid.tol;
  rep.max_abs = Vec::Zero(sys.m);
  rep.mean_abs = Vec::Zero(sys.m);
  for (size_t i = 0; i < res.size(); ++i) {
    rep.max_abs = rep.max_abs.cwiseMax(res[i]);
    rep.mean_abs += res[i];
    if (res[i].maxCoeff() > grid.tol) rep.failing_points.push_back(pts[i]);
  }
  rep.mean_abs /= static_cast<double>(rep.samples);
  rep.pass = rep.max() <= grid.tol;
  return rep;
}

}  // namespace riemann_kit
