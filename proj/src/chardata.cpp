#include "riemann_kit/chardata.hpp"

#include "riemann_kit/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace riemann_kit {

namespace {

// Monomial coefficients (ascending) of det(lambda0 A^0 + N0) from q+1
// Chebyshev-node evaluations on [-R, R].
Vec det_polynomial(const SystemSpec& sys, const Vec& u, const Vec& spatial, double* Rout) {
  auto As = sys.coeffs(u);
  double amax = 0.0;
  for (auto& A : As) amax = std::max(amax, A.norm());
  const double R = 1.0 + 2.0 * amax;
  *Rout = R;
  const int q = sys.q;
  Mat N0 = Mat::Zero(sys.m, sys.q);
  for (int i = 1; i < sys.p; ++i) N0 += spatial(i - 1) * As[i];
  Vec nodes(q + 1), vals(q + 1);
  for (int j = 0; j <= q; ++j) {
    nodes(j) = R * std::cos(M_PI * j / q);
    vals(j) = Mat(nodes(j) * As[0] + N0).determinant();
  }
  Mat V(q + 1, q + 1);
  for (int j = 0; j <= q; ++j) {
    double t = 1.0;
    for (int k = 0; k <= q; ++k) {
      V(j, k) = t;
      t *= nodes(j);
    }
  }
  Vec c = V.colPivHouseholderQr().solve(vals);
  // snap noise-level coefficients so exact zero roots stay exact
  double cmax = c.cwiseAbs().maxCoeff();
  for (int k = 0; k <= q; ++k)
    if (std::abs(c(k)) <= 1e-12 * cmax) c(k) = 0.0;
  return c;
}

std::vector<Complex> companion_roots(const Vec& coeff) {
  int deg = static_cast<int>(coeff.size()) - 1;
  while (deg > 0 && coeff(deg) == 0.0) --deg;
  std::vector<Complex> roots;
  if (deg == 0) return roots;
  int nzero = 0;
  while (nzero < deg && coeff(nzero) == 0.0) ++nzero;
  for (int i = 0; i < nzero; ++i) roots.emplace_back(0.0, 0.0);
  const int d = deg - nzero;
  if (d == 0) return roots;
  Mat C = Mat::Zero(d, d);
  for (int i = 1; i < d; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) C(i, d - 1) = -coeff(nzero + i) / coeff(deg);
  Eigen::EigenSolver<Mat> es(C);
  for (int i = 0; i < d; ++i) roots.push_back(es.eigenvalues()(i));
  return roots;
}

}  // namespace

std::vector<DispersionRoot> dispersion_roots(const SystemSpec& sys, const Vec& u,
                                             const Vec& spatial) {
  if (sys.m != sys.q) throw InputError("dispersion_roots: determined system required");
  if (spatial.size() != sys.p - 1 || spatial.norm() == 0.0)
    throw InputError("dispersion_roots: bad spatial direction");
  double R = 0.0;
  Vec c = det_polynomial(sys, u, spatial, &R);
  if (c.cwiseAbs().maxCoeff() == 0.0)
    throw SolveError("dispersion_roots: identically zero determinant (degenerate direction)");
  auto zroots = companion_roots(c);

  // Phase 1: complex clustering at the multiple-root scatter scale; the cluster
  // centroid is accurate to the coefficient error by Vieta.
  const double scatter = 5e-4 * (1.0 + R);
  std::vector<int> owner(zroots.size());
  std::iota(owner.begin(), owner.end(), 0);
  std::function<int(int)> find = [&](int i) {
    return owner[i] == i ? i : owner[i] = find(owner[i]);
  };
  for (size_t i = 0; i < zroots.size(); ++i)
    for (size_t j = i + 1; j < zroots.size(); ++j)
      if (std::abs(zroots[i] - zroots[j]) <= scatter) owner[find(static_cast<int>(j))] = find(static_cast<int>(i));
  std::vector<DispersionRoot> merged;
  for (size_t i = 0; i < zroots.size(); ++i) {
    if (find(static_cast<int>(i)) != static_cast<int>(i)) continue;
    Complex centroid(0, 0);
    int mult = 0;
    for (size_t j = 0; j < zroots.size(); ++j)
      if (find(static_cast<int>(j)) == static_cast<int>(i)) {
        centroid += zroots[j];
        ++mult;
      }
    centroid /= static_cast<double>(mult);
    if (std::abs(centroid.imag()) > 1e-6 * (1.0 + R)) continue;  // complex pair: not a real root
    if (std::abs(centroid.real()) > R * (1.0 + 1e-9)) continue;  // outside conditioning window
    merged.push_back({centroid.real(), mult});
  }

  // Phase 2: 1e-7 absolute merge of distinct real roots.
  std::sort(merged.begin(), merged.end(),
            [](const DispersionRoot& a, const DispersionRoot& b) { return a.lambda0 < b.lambda0; });
  std::vector<DispersionRoot> out;
  for (const auto& r : merged) {
    if (!out.empty() && std::abs(out.back().lambda0 - r.lambda0) <= 1e-7) {
      out.back().lambda0 = (out.back().lambda0 * out.back().multiplicity +
                            r.lambda0 * r.multiplicity) /
                           (out.back().multiplicity + r.multiplicity);
      out.back().multiplicity += r.multiplicity;
    } else {
      out.push_back(r);
    }
  }
  return out;
}

Mat homogeneous_gamma(const SystemSpec& sys, const Vec& u, const Vec& lambda) {
  Mat N = wave_matrix<double>(sys, u, lambda);
  return nullspace<double>(N);
}

CMat homogeneous_gamma(const SystemSpec& sys, const Vec& u, const CVec& lambda) {
  CMat N = wave_matrix<Complex>(sys, u, lambda);
  return nullspace<Complex>(N);
}

InhomogeneousGamma inhomogeneous_gamma(const SystemSpec& sys, const Vec& u,
                                       const Vec& lambda) {
  Mat N = wave_matrix<double>(sys, u, lambda);
  Vec b = sys.source(u);
  InhomogeneousGamma out;
  Eigen::JacobiSVD<Mat> svd(N, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(kRankCutoff);
  out.gamma0 = svd.solve(b);
  out.residual = (N * out.gamma0 - b).norm();
  return out;
}

double check_wave_relation(const SystemSpec& sys, const Vec& u,
                           const std::vector<IntegralElement>& elements) {
  CVec acc = CVec::Zero(sys.m);
  for (const auto& e : elements) {
    CMat N = wave_matrix<Complex>(sys, u, e.lambda.lambda);
    if (e.lambda.is_real) {
      if (e.gamma.imag().norm() > 0)
        throw InputError("wave relation: complex gamma on a real wave");
      acc += N * e.gamma;
    } else {
      CVec term = N * e.gamma;
      acc += term + term.conjugate();  // conjugate closure
    }
  }
  if (acc.imag().norm() > 1e-12 * (1.0 + acc.norm()))
    throw InputError("wave relation: conjugate closure violated");
  return acc.real().norm();
}

double so_defect(const CMat& L) {
  const int n = static_cast<int>(L.rows());
  double ortho = (L.transpose() * L - CMat::Identity(n, n)).norm();
  double det = std::abs(L.determinant() - Complex(1.0, 0.0));
  return std::max(ortho, det);
}

double check_rotation_condition(const SystemSpec& sys, const Vec& u, const Vec& x,
                                const DecompositionData& d) {
  auto sheets = d.sheets(x, u);
  Vec b = sys.source(u);
  const bool under = d.variant == DecompositionVariant::UnderdeterminedWave ||
                     d.variant == DecompositionVariant::UnderdeterminedMode;
  const int dim = under ? sys.m : sys.q;
  CMat T = CMat::Zero(dim, dim);
  for (const auto& s : sheets) {
    CMat N = wave_matrix<Complex>(sys, u, s.lambda.lambda);
    CMat contrib;
    if (under) {
      if (s.P.rows() != sys.q || s.P.cols() != sys.m)
        throw InputError("rotation condition: P must be q x m");
      contrib = N * s.P;  // m x m
    } else {
      if (s.rotation.rows() != sys.q || s.rotation.cols() != sys.q)
        throw InputError("rotation condition: L must be q x q");
      contrib = s.omega * (N * s.rotation);
    }
    T += contrib;
    if (!s.lambda.is_real) T += contrib.conjugate();
  }
  T -= CMat::Identity(dim, dim);
  CVec r = T * b.cast<Complex>();
  return r.norm();
}

InvolutivityResult check_involutivity(const std::function<Mat(const Vec& r)>& wavefield,
                                      const std::vector<Vec>& grid, double h) {
  InvolutivityResult out;
  for (const auto& r : grid) {
    Mat L0 = wavefield(r);  // rows: lambda^0, lambda^1..lambda^k
    const int nw = static_cast<int>(L0.rows());
    const int nr = static_cast<int>(r.size());  // r = (r^0, ..., r^k)
    for (int n = 0; n < nr; ++n) {
      Vec rp = r, rm = r;
      rp(n) += h;
      rm(n) -= h;
      Mat D = (wavefield(rp) - wavefield(rm)) / (2.0 * h);
      for (int A = 0; A < nw; ++A) {
        if (A == n && A != 0) continue;  // d lambda^A / d r^A unconstrained (A >= 1)
        Mat span;
        if (A == 0) {  // d lambda^0 / d r^n in span{lambda^n}
          span = L0.row(n).transpose();
        } else {  // d lambda^A / d r^n in span{lambda^A, lambda^n}
          span.resize(L0.cols(), 2);
          span.col(0) = L0.row(A).transpose();
          span.col(1) = L0.row(n).transpose();
          double c = std::abs(span.col(0).normalized().dot(span.col(1).normalized()));
          if (c > 1.0 - 1e-8) out.conditioning_warning = true;
        }
        Vec deriv = D.row(A).transpose();
        double dn = deriv.norm();
        if (dn == 0.0) continue;
        out.max_residual = std::max(out.max_residual, span_distance<double>(span, deriv));
      }
    }
  }
  return out;
}

}  // namespace riemann_kit
