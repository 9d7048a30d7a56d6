#pragma once

#include "riemann_kit/types.hpp"

#include <optional>

namespace riemann_kit {

/// Characteristic wave vector; complex vectors carry their conjugate implicitly.
struct WaveVector {
  CVec lambda;
  bool is_real = true;

  static WaveVector real(const Vec& v) {
    WaveVector w;
    w.lambda = v.cast<Complex>();
    w.is_real = true;
    return w;
  }
  static WaveVector complex(const CVec& v) {
    WaveVector w;
    w.lambda = v;
    w.is_real = v.imag().norm() == 0.0;
    return w;
  }
  Vec real_part() const { return lambda.real(); }
};

enum class ElementKind { Homogeneous, Inhomogeneous };

/// A (lambda, gamma) pair satisfying the algebraic wave relation at the state
/// of construction, with a classification label (entropic/acoustic/...).
struct IntegralElement {
  WaveVector lambda;
  CVec gamma;
  ElementKind kind = ElementKind::Homogeneous;
  std::string label;
};

enum class DecompositionVariant {
  Multiwave,            // real waves, q x q SO(q,R) rotations
  Multimode,            // complex-conjugate pairs, SO(q,C)
  Mixed,                // one real wave + conjugate pairs
  UnderdeterminedWave,  // m < q, rectangular P_A
  UnderdeterminedMode,
};

/// One wave sheet of a decomposition ansatz. For determined variants Omega is
/// scalar and L is q x q; for underdetermined variants P = sum_alpha
/// Omega^alpha M_alpha L^alpha is supplied assembled (q x m). All entries may
/// depend on (x, u) through the evaluators in DecompositionData.
struct WaveSheet {
  WaveVector lambda;
  Complex omega{0.0, 0.0};
  CMat rotation;  // q x q (determined)
  CMat P;         // q x m (underdetermined); empty otherwise
  CVec tau;       // q
};

struct DecompositionData {
  DecompositionVariant variant = DecompositionVariant::Multiwave;
  // Evaluated at (x, u); x may be ignored by u-only data.
  std::function<std::vector<WaveSheet>(const Vec& x, const Vec& u)> sheets;
  int k = 0;  // wave count (conjugates not counted)
};

struct DispersionRoot {
  double lambda0 = 0.0;
  int multiplicity = 1;
};

/// Real roots of det(sum_i A^i lambda_i) = 0 in lambda_0 with lambda =
/// (lambda_0, spatial), by Chebyshev-node reconstruction of the degree-<=q
/// polynomial and companion-matrix eigenvalues. Scatter of multiple roots is
/// consolidated by complex clustering before the 1e-7 merge.
std::vector<DispersionRoot> dispersion_roots(const SystemSpec& sys, const Vec& u,
                                             const Vec& spatial);

/// Orthonormal basis of null(sum_i A^i lambda_i); empty when the matrix has
/// full column rank.
Mat homogeneous_gamma(const SystemSpec& sys, const Vec& u, const Vec& lambda);
CMat homogeneous_gamma(const SystemSpec& sys, const Vec& u, const CVec& lambda);

struct InhomogeneousGamma {
  Vec gamma0;
  double residual = 0.0;  // |N gamma0 - b|
};

/// Minimum-norm least-squares solution of (sum A^i lambda_i) gamma0 = b(u).
InhomogeneousGamma inhomogeneous_gamma(const SystemSpec& sys, const Vec& u,
                                       const Vec& lambda);

/// Residual of the characteristic-vector relation: real elements contribute
/// (sum A^i lambda_i) gamma, complex ones add the conjugate term, and the sum
/// over all elements must vanish.
double check_wave_relation(const SystemSpec& sys, const Vec& u,
                           const std::vector<IntegralElement>& elements);

/// Residual of the variant's algebraic rotation condition applied to b(u).
double check_rotation_condition(const SystemSpec& sys, const Vec& u, const Vec& x,
                                const DecompositionData& d);

/// SO(q) sanity for a (possibly complex) rotation: |L^T L - I| and |det L - 1|
/// with the plain transpose.
double so_defect(const CMat& L);

struct InvolutivityResult {
  double max_residual = 0.0;
  bool conditioning_warning = false;
};

/// Involutivity of the wave-vector field: FD derivatives of lambda^A along r^n
/// must lie in span{lambda^A, lambda^n}, and those of lambda^0 in span{lambda^n}.
/// `wavefield(r)` returns {lambda^0, lambda^1, ..., lambda^k} stacked as rows.
InvolutivityResult check_involutivity(
    const std::function<Mat(const Vec& r)>& wavefield, const std::vector<Vec>& grid,
    double h = 1e-6);

}  // namespace riemann_kit
