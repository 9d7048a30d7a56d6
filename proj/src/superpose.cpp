#include "riemann_kit/superpose.hpp"

#include "riemann_kit/linalg.hpp"

#include <cmath>
#include <ostream>

namespace riemann_kit {

namespace {

Mat real_rows_of(const std::vector<WaveSheet>& sheets, int p) {
  int dim = 0;
  for (const auto& s : sheets) dim += s.lambda.is_real ? 1 : 2;
  Mat rows(dim, p);
  int r = 0;
  for (const auto& s : sheets) {
    if (s.lambda.is_real) {
      rows.row(r++) = s.lambda.lambda.real().transpose();
    } else {
      rows.row(r++) = s.lambda.lambda.real().transpose();
      rows.row(r++) = s.lambda.lambda.imag().transpose();
    }
  }
  return rows;
}

/// Columns Omega_A L_A b + tau_A (determined) or P_A b + tau_A
/// (underdetermined), q x k complex.
CMat sheet_columns(const std::vector<WaveSheet>& sheets, const Vec& b, bool under) {
  const int q = under ? static_cast<int>(sheets[0].P.rows())
                      : static_cast<int>(sheets[0].rotation.rows());
  CMat cols(q, sheets.size());
  for (size_t A = 0; A < sheets.size(); ++A) {
    const auto& s = sheets[A];
    CVec col = under ? CVec(s.P * b.cast<Complex>())
                     : CVec(s.omega * (s.rotation * b.cast<Complex>()));
    if (s.tau.size()) col += s.tau;
    cols.col(static_cast<int>(A)) = col;
  }
  return cols;
}

}  // namespace

ReducedSystem build_reduced(const SystemSpec& sys, const DecompositionData& d,
                            const WaveDerivs& wave_derivs, const Vec& probe_state,
                            const Vec& probe_x) {
  {
    double rc = check_rotation_condition(sys, probe_state, probe_x, d);
    std::vector<IntegralElement> taus;
    for (const auto& s : d.sheets(probe_x, probe_state)) {
      IntegralElement e;
      e.lambda = s.lambda;
      e.gamma = s.tau.size() ? s.tau : CVec::Zero(sys.q);
      taus.push_back(e);
    }
    double wr = check_wave_relation(sys, probe_state, taus);
    if (rc > 1e-8)
      throw ConstraintError("build_reduced: rotation condition residual " + std::to_string(rc));
    if (wr > 1e-8)
      throw ConstraintError("build_reduced: wave relation residual " + std::to_string(wr));
  }

  ReducedSystem rs;
  rs.variant = d.variant;
  rs.k = d.k;
  rs.q = sys.q;
  rs.p = sys.p;
  const bool under = d.variant == DecompositionVariant::UnderdeterminedWave ||
                     d.variant == DecompositionVariant::UnderdeterminedMode;
  auto sheets0 = d.sheets(probe_x, probe_state);
  rs.dim = 0;
  for (const auto& s : sheets0) {
    rs.wave_is_real.push_back(s.lambda.is_real);
    rs.dim += s.lambda.is_real ? 1 : 2;
  }
  rs.no_orthogonality = rs.dim >= rs.p;

  auto sheets_fn = d.sheets;
  const int p = sys.p, q = sys.q;
  auto source = sys.source;
  rs.invariant_rows = [sheets_fn, p](const Vec& u) {
    // rows depend on x only through nothing: waves are functions of u
    Vec x0 = Vec::Zero(p);
    return real_rows_of(sheets_fn(x0, u), p);
  };

  const bool has_complex =
      std::any_of(rs.wave_is_real.begin(), rs.wave_is_real.end(), [](bool b) { return !b; });
  if (has_complex && wave_derivs && d.variant == DecompositionVariant::Mixed)
    throw InputError("build_reduced: mixed variant requires constant waves");

  auto rows_fn = rs.invariant_rows;
  std::vector<bool> is_real = rs.wave_is_real;
  auto rhs = [sheets_fn, rows_fn, wave_derivs, source, is_real, p, q, under](
                 const Vec& r, const Vec& f, const Vec& c) -> Mat {
    Mat rows = rows_fn(f);
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(rows);
    Vec x = cod.pseudoInverse() * r;
    if (c.size()) {
      Mat Xi = orthogonal_complement(rows);
      if (c.size() != Xi.cols()) throw InputError("rhs: offset dimension mismatch");
      x += Xi * c;
    }
    auto sheets = sheets_fn(x, f);
    Vec b = source(f);
    CMat cols = sheet_columns(sheets, b, under);  // q x k
    const int k = static_cast<int>(sheets.size());

    // dr/du = (d Lambda_i/du) x^i, k x q complex; zero for constant waves
    CMat dr_du = CMat::Zero(k, q);
    if (wave_derivs) {
      auto dl = wave_derivs(f);
      if (static_cast<int>(dl.size()) != k)
        throw InputError("rhs: wave derivative count mismatch");
      for (int A = 0; A < k; ++A)
        for (int i = 0; i < p; ++i) dr_du.row(A) += x(i) * dl[A].row(i);
    }

    CMat Ik = CMat::Identity(k, k);
    CMat M = Ik + dr_du * cols;
    Eigen::FullPivLU<CMat> lu(M);
    if (!lu.isInvertible())
      throw SolveError("reduced system: I_k + (dr/du)(Lb+tau) is singular");
    CMat S = cols * lu.inverse();

    // conjugate-block coupling for complex variants
    CMat dfdr;
    bool any_complex = std::any_of(is_real.begin(), is_real.end(), [](bool b) { return !b; });
    if (!any_complex) {
      dfdr = S;
    } else if (!wave_derivs) {
      dfdr = S;  // Phi = I: blocks decouple
    } else {
      CMat Sb = S.conjugate();
      CMat drb = dr_du.conjugate();
      CMat inner = Ik + dr_du * Sb * drb * S;
      Eigen::FullPivLU<CMat> lu2(inner);
      if (!lu2.isInvertible()) throw SolveError("reduced system: conjugate coupling singular");
      dfdr = (CMat::Identity(q, q) - Sb * drb) * S * lu2.inverse();
    }

    // expand to real coordinates: real wave -> column; complex wave ->
    // (d/dRe r, d/dIm r) = (2 Re col, -2 Im col)
    int dim = 0;
    for (bool br : is_real) dim += br ? 1 : 2;
    Mat out(q, dim);
    int col = 0;
    for (int A = 0; A < k; ++A) {
      if (is_real[A]) {
        if (dfdr.col(A).imag().norm() > 1e-9 * (1.0 + dfdr.col(A).norm()))
          throw EvaluationError("reduced rhs: real wave produced a complex column");
        out.col(col++) = dfdr.col(A).real();
      } else {
        out.col(col++) = 2.0 * dfdr.col(A).real();
        out.col(col++) = -2.0 * dfdr.col(A).imag();
      }
    }
    return out;
  };
  rs.rhs = rhs;

  // condition estimate at the probe
  {
    Mat rows = rs.invariant_rows(probe_state);
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(rows);
    auto sheets = sheets_fn(probe_x, probe_state);
    CMat cols = sheet_columns(sheets, sys.source(probe_state), under);
    const int k = static_cast<int>(sheets.size());
    CMat dr_du = CMat::Zero(k, q);
    if (wave_derivs) {
      auto dl = wave_derivs(probe_state);
      for (int A = 0; A < k; ++A)
        for (int i = 0; i < p; ++i) dr_du.row(A) += probe_x(i) * dl[A].row(i);
    }
    CMat M = CMat::Identity(k, k) + dr_du * cols;
    Eigen::JacobiSVD<CMat> svd(M);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 1e-14 * sv(0))
      throw SolveError("build_reduced: I_k + (dr/du)(Lb+tau) singular at probe");
    rs.condition = sv(0) / sv(sv.size() - 1);
  }
  return rs;
}

double welldefined_check(ReducedSystem& rs, const std::vector<Vec>& r_probes,
                         const std::vector<Vec>& f_probes, double tol, double h) {
  if (rs.no_orthogonality) {
    rs.welldefined_max = 0.0;
    rs.welldefined_status = CheckStatus::Pass;
    return 0.0;
  }
  double worst = 0.0;
  for (const auto& f : f_probes) {
    Mat rows = rs.invariant_rows(f);
    Mat Xi = orthogonal_complement(rows);
    const int na = static_cast<int>(Xi.cols());
    if (na == 0) continue;
    for (const auto& r : r_probes) {
      for (int a = 0; a < na; ++a) {
        Vec cp = Vec::Zero(na), cm = Vec::Zero(na);
        cp(a) = h;
        cm(a) = -h;
        Mat d = (rs.rhs(r, f, cp) - rs.rhs(r, f, cm)) / (2.0 * h);
        worst = std::max(worst, d.norm());
      }
    }
  }
  rs.welldefined_max = worst;
  rs.welldefined_status = worst <= tol ? CheckStatus::Pass : CheckStatus::Unverified;
  return worst;
}

std::size_t SolutionTable::index(const std::vector<int>& idx) const {
  std::size_t lin = 0;
  for (size_t a = 0; a < axes.size(); ++a) lin = lin * axes[a].size() + idx[a];
  return lin;
}

Vec SolutionTable::interpolate(const Vec& r) const {
  const int d = dim();
  std::vector<int> base(d);
  std::vector<double> w(d);
  for (int a = 0; a < d; ++a) {
    const auto& ax = axes[a];
    if (r(a) <= ax.front()) {
      base[a] = 0;
      w[a] = 0.0;
    } else if (r(a) >= ax.back()) {
      base[a] = static_cast<int>(ax.size()) - 2;
      w[a] = 1.0;
    } else {
      int i = static_cast<int>(std::upper_bound(ax.begin(), ax.end(), r(a)) - ax.begin()) - 1;
      base[a] = std::min<int>(i, static_cast<int>(ax.size()) - 2);
      w[a] = (r(a) - ax[base[a]]) / (ax[base[a] + 1] - ax[base[a]]);
    }
  }
  Vec acc = Vec::Zero(values[0].size());
  const int corners = 1 << d;
  for (int m = 0; m < corners; ++m) {
    double weight = 1.0;
    std::vector<int> idx(d);
    for (int a = 0; a < d; ++a) {
      int bit = (m >> a) & 1;
      idx[a] = base[a] + bit;
      weight *= bit ? w[a] : 1.0 - w[a];
    }
    if (weight != 0.0) acc += weight * at(idx);
  }
  return acc;
}

namespace {
void rk4_step(const std::function<Vec(double, const Vec&)>& f, double t, double h, Vec& y) {
  Vec k1 = f(t, y);
  Vec k2 = f(t + h / 2, y + h / 2 * k1);
  Vec k3 = f(t + h / 2, y + h / 2 * k2);
  Vec k4 = f(t + h, y + h * k3);
  y += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
}
}  // namespace

SolutionTable integrate_reduced(const ReducedSystem& rs, const Vec& f0,
                                const std::vector<AxisSpec>& grid) {
  if (static_cast<int>(grid.size()) != rs.dim)
    throw InputError("integrate_reduced: one axis spec per invariant coordinate");
  SolutionTable tab;
  std::vector<int> sizes;
  for (const auto& ax : grid) {
    int n = std::max(1, static_cast<int>(std::ceil((ax.hi - ax.lo) / ax.step)));
    std::vector<double> nodes(n + 1);
    for (int i = 0; i <= n; ++i) nodes[i] = ax.lo + (ax.hi - ax.lo) * i / n;
    tab.axes.push_back(std::move(nodes));
    sizes.push_back(n + 1);
  }
  std::size_t total = 1;
  for (int s : sizes) total *= s;
  tab.values.assign(total, Vec());
  for (int a = 0; a < rs.dim; ++a) tab.labels.push_back("r" + std::to_string(a + 1));
  for (int j = 0; j < rs.q; ++j) tab.labels.push_back("f" + std::to_string(j + 1));

  Vec empty_c;
  auto rhs_col = [&](int axis, const Vec& r, const Vec& f) -> Vec {
    return rs.rhs(r, f, empty_c).col(axis);
  };

  std::vector<int> idx(rs.dim, 0);
  tab.values[tab.index(idx)] = f0;
  try {
    // axis-0 spine
    for (int i = 1; i < sizes[0]; ++i) {
      std::vector<int> prev(rs.dim, 0), cur(rs.dim, 0);
      prev[0] = i - 1;
      cur[0] = i;
      Vec r(rs.dim);
      r.setZero();
      for (int a = 0; a < rs.dim; ++a) r(a) = tab.axes[a][prev[a]];
      Vec y = tab.values[tab.index(prev)];
      double h = tab.axes[0][i] - tab.axes[0][i - 1];
      auto f1d = [&](double t, const Vec& yy) {
        Vec rr = r;
        rr(0) = t;
        return rhs_col(0, rr, yy);
      };
      rk4_step(f1d, tab.axes[0][i - 1], h, y);
      tab.values[tab.index(cur)] = y;
    }
    // later axes: propagate every filled node of the preceding subgrid
    for (int axis = 1; axis < rs.dim; ++axis) {
      std::vector<int> counter(axis, 0);  // iterate over axes 0..axis-1
      for (;;) {
        std::vector<int> node(rs.dim, 0);
        for (int a = 0; a < axis; ++a) node[a] = counter[a];
        for (int i = 1; i < sizes[axis]; ++i) {
          std::vector<int> prev = node, cur = node;
          prev[axis] = i - 1;
          cur[axis] = i;
          Vec r(rs.dim);
          for (int a = 0; a < rs.dim; ++a) r(a) = tab.axes[a][prev[a]];
          Vec y = tab.values[tab.index(prev)];
          double h = tab.axes[axis][i] - tab.axes[axis][i - 1];
          auto f1d = [&](double t, const Vec& yy) {
            Vec rr = r;
            rr(axis) = t;
            return rhs_col(axis, rr, yy);
          };
          rk4_step(f1d, tab.axes[axis][i - 1], h, y);
          tab.values[tab.index(cur)] = y;
        }
        int a = axis - 1;
        while (a >= 0 && ++counter[a] == sizes[a]) counter[a--] = 0;
        if (a < 0) break;
      }
    }
  } catch (const std::exception&) {
    tab.error_mark = true;
    for (auto& v : tab.values)
      if (!v.size()) v = Vec::Constant(rs.q, std::nan(""));
    return tab;
  }

  // cross-derivative defect: FD of the table vs the rhs on every axis
  double defect = 0.0;
  std::vector<int> it(rs.dim, 0);
  for (;;) {
    Vec r(rs.dim);
    for (int a = 0; a < rs.dim; ++a) r(a) = tab.axes[a][it[a]];
    for (int a = 0; a < rs.dim; ++a) {
      if (it[a] == 0 || it[a] + 1 >= sizes[a]) continue;
      std::vector<int> ip = it, im = it;
      ip[a]++;
      im[a]--;
      double h2 = tab.axes[a][ip[a]] - tab.axes[a][im[a]];
      Vec fd = (tab.at(ip) - tab.at(im)) / h2;
      try {
        defect = std::max(defect, (fd - rhs_col(a, r, tab.at(it))).norm());
      } catch (const std::exception&) {
        tab.error_mark = true;
      }
    }
    int a = rs.dim - 1;
    while (a >= 0 && ++it[a] == sizes[a]) it[a--] = 0;
    if (a < 0) break;
  }
  tab.cross_defect = defect;
  tab.integrable = defect <= 1e-4;
  return tab;
}

void SolutionTable::write_csv(std::ostream& os) const {
  for (size_t i = 0; i < labels.size(); ++i) os << (i ? "," : "") << labels[i];
  os << "\n";
  std::vector<int> it(dim(), 0);
  std::vector<int> sizes;
  for (const auto& ax : axes) sizes.push_back(static_cast<int>(ax.size()));
  char buf[64];
  for (;;) {
    std::string line;
    for (int a = 0; a < dim(); ++a) {
      std::snprintf(buf, sizeof buf, "%.17g", axes[a][it[a]]);
      line += (a ? "," : "") + std::string(buf);
    }
    const Vec& v = values[index(it)];
    for (int j = 0; j < v.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", v(j));
      line += "," + std::string(buf);
    }
    os << line << "\n";
    int a = dim() - 1;
    while (a >= 0 && ++it[a] == sizes[a]) it[a--] = 0;
    if (a < 0) break;
  }
}

Vec lift_solution(const std::function<Vec(const Vec& r)>& f,
                  const std::function<Mat(const Vec& u)>& invariant_rows, const Vec& x,
                  const Vec& guess) {
  if (!guess.size()) throw InputError("lift_solution: a state guess is required");
  Vec u = guess;
  double theta = 1.0;
  double best = 1e300;
  for (int it = 0; it < 400; ++it) {
    Vec target = f(invariant_rows(u) * x);
    double res = (u - target).norm();
    if (res <= 1e-10) return u;
    if (res < best) {
      best = res;
    } else {
      theta *= 0.5;
      if (theta < 1e-6)
        throw SolveError("lift_solution: fixed point diverged, last residual " +
                         std::to_string(res));
    }
    u = u + theta * (target - u);
  }
  throw SolveError("lift_solution: no convergence after 400 iterations");
}

SimpleStateReport simple_state_verify(const SystemSpec& sys,
                                      const std::function<Vec(const Vec&)>& gamma0,
                                      const std::function<Vec(const Vec&)>& lambda0,
                                      const Vec& f0, double r0_max, const GridSpec& grid) {
  SimpleStateReport rep;
  const Vec lam = lambda0(f0);
  // integrate the state curve
  const int nstep = 2000;
  const double h = r0_max / nstep;
  std::vector<Vec> curve(nstep + 1);
  curve[0] = f0;
  auto ode = [&](double, const Vec& y) { return gamma0(y); };
  for (int i = 0; i < nstep; ++i) {
    Vec y = curve[i];
    rk4_step(ode, i * h, h, y);
    curve[i + 1] = y;
  }
  // direction constancy of lambda0 along gamma0 (transverse component)
  for (int i = 0; i + 1 <= nstep; i += nstep / 20) {
    Vec l0 = lambda0(curve[i]);
    Vec l1 = lambda0(curve[std::min(i + 1, nstep)]);
    Vec d = (l1 - l0) / h;
    Vec lhat = l0.normalized();
    double transverse = (d - d.dot(lhat) * lhat).norm() / (1.0 + d.norm());
    rep.direction_defect = std::max(rep.direction_defect, transverse);
  }
  rep.construction_ok = rep.direction_defect <= 1e-6;

  CandidateSolution sol;
  sol.eval = [lam, h, nstep, curve](const Vec& x) {
    double r0 = lam.dot(x);
    if (r0 < 0 || r0 > nstep * h) throw DomainError("simple state: r0 outside curve");
    double s = r0 / h;
    int i = std::min<int>(static_cast<int>(s), nstep - 1);
    double w = s - i;
    return Vec((1.0 - w) * curve[i] + w * curve[i + 1]);
  };
  sol.domain = [lam, h, nstep](const Vec& x) {
    double r0 = lam.dot(x);
    return r0 > 1e-3 && r0 < nstep * h - 1e-3;
  };
  ResidualReport rr = verify_on_grid(sys, sol, grid);
  rep.residual_max = rr.max();
  BoxSampler sampler(SplitMix64(grid.seed), grid.lo, grid.hi);
  for (std::uint64_t kk = 0; kk < 1000; ++kk) {
    Vec x0 = sampler.point(kk);
    if (!stencil_in_domain(sol, x0, 1e-5)) continue;
    Mat J = jacobian_fd(sol, x0, 1e-5);
    rep.jacobian_rank = numerical_rank<double>(J);
    break;
  }
  rep.pass = rep.construction_ok && rep.residual_max <= 1e-5 && rep.jacobian_rank == 1;
  return rep;
}

}  // namespace riemann_kit
