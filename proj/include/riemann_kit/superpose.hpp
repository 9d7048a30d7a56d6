#pragma once

#include "riemann_kit/chardata.hpp"
#include "riemann_kit/fd.hpp"
#include "riemann_kit/types.hpp"

#include <iosfwd>

namespace riemann_kit {

/// Per-wave derivative data d lambda_i / d u_alpha (p x q), required when the
/// wave vectors depend on u. Null evaluator means constant waves.
using WaveDerivs = std::function<std::vector<CMat>(const Vec& u)>;

enum class CheckStatus { Pass, Fail, Unverified };

/// The reduced system df/dr for the invariant coordinates. Complex invariant
/// pairs (r, rbar) are carried in real coordinates (Re r, Im r), so `dim` is
/// #real waves + 2 * #complex waves.
struct ReducedSystem {
  DecompositionVariant variant = DecompositionVariant::Multiwave;
  int k = 0;    // waves (conjugates not counted)
  int dim = 0;  // real invariant coordinates
  int q = 0;
  int p = 0;
  std::vector<bool> wave_is_real;
  /// Real rows of the invariant functionals at state u: one row per real wave,
  /// (Re, Im) row pair per complex wave. dim x p.
  std::function<Mat(const Vec& u)> invariant_rows;
  /// q x dim right-hand side at invariant point r, state f, and offset c along
  /// the orthogonal complement of the wave span (x = pinv(rows) r + Xi c).
  std::function<Mat(const Vec& r, const Vec& f, const Vec& c)> rhs;
  double condition = 1.0;          // of I_k + (dr/du)(Lb + tau) at the probe state
  double welldefined_max = 0.0;    // certificate, filled by welldefined_check
  bool no_orthogonality = false;   // k (or 2k) >= p: conditions are vacuous
  CheckStatus welldefined_status = CheckStatus::Unverified;
};

/// Assemble the reduced system from decomposition data. Preconditions (checked
/// at `probe_state` and `probe_x`): rotation condition and wave relation pass
/// at 1e-8. Throws SolveError when I_k + (dr/du)(Lb+tau) is singular.
ReducedSystem build_reduced(const SystemSpec& sys, const DecompositionData& d,
                            const WaveDerivs& wave_derivs, const Vec& probe_state,
                            const Vec& probe_x);

/// Max FD directional derivative |X_a . rhs| over the probe set; 0 with the
/// vacuous flag when no complement direction exists. Also records the
/// tri-state on the system (sufficient conditions only: Fail means
/// "unverified by this sufficient test" for downstream consumers).
double welldefined_check(ReducedSystem& rs, const std::vector<Vec>& r_probes,
                         const std::vector<Vec>& f_probes, double tol = 1e-6,
                         double h = 1e-4);

struct AxisSpec {
  double lo = 0.0, hi = 1.0;
  double step = 1e-3;  // upper bound; actual step divides the range evenly
};

struct SolutionTable {
  std::vector<std::vector<double>> axes;  // node coordinates per invariant axis
  std::vector<Vec> values;                // row-major over the tensor grid
  std::vector<std::string> labels;        // column labels: r..., f...
  double cross_defect = 0.0;
  bool integrable = true;
  bool error_mark = false;  // rhs failure: table is partial

  int dim() const { return static_cast<int>(axes.size()); }
  std::size_t index(const std::vector<int>& idx) const;
  Vec at(const std::vector<int>& idx) const { return values[index(idx)]; }
  Vec interpolate(const Vec& r) const;  // multilinear
  void write_csv(std::ostream& os) const;
};

/// March the reduced system over a tensor grid: RK4 along axis 0 from the grid
/// origin, then propagate each further axis from the filled subgrid. The
/// cross-derivative defect (FD of the table vs the rhs on every axis) is
/// recorded; above 1e-4 the table is marked non-integrable.
SolutionTable integrate_reduced(const ReducedSystem& rs, const Vec& f0,
                                const std::vector<AxisSpec>& grid);

/// u at x from f and the invariant rows: u = f(rows(u) x) solved by damped
/// fixed-point iteration when the rows depend on u (exact one-shot otherwise).
Vec lift_solution(const std::function<Vec(const Vec& r)>& f,
                  const std::function<Mat(const Vec& u)>& invariant_rows, const Vec& x,
                  const Vec& guess);

struct SimpleStateReport {
  double residual_max = 0.0;
  int jacobian_rank = 0;
  double direction_defect = 0.0;  // component of d lambda0/dr0 transverse to lambda0
  bool construction_ok = true;
  bool pass = false;
};

/// Integrate df/dr0 = gamma0(f) from f0, lift with r0 = lambda0 . x (lambda0
/// frozen at f0), and verify the full system residual and rank-1 structure.
SimpleStateReport simple_state_verify(const SystemSpec& sys,
                                      const std::function<Vec(const Vec&)>& gamma0,
                                      const std::function<Vec(const Vec&)>& lambda0,
                                      const Vec& f0, double r0_max, const GridSpec& grid);

}  // namespace riemann_kit
