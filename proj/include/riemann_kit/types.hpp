#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace riemann_kit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Complex = std::complex<double>;

// Error taxonomy used across the library. The CLI maps these onto exit codes.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConstraintError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A first-order quasilinear system  A^i(u) du/dx^i = b(u)  with p independent
/// and q dependent variables and m equations. When a time variable exists it is
/// component 0 of x and systems of the form U_t + A^j U_{x^j} = b store the
/// identity as coeffs(u)[0].
struct SystemSpec {
  int p = 0;
  int q = 0;
  int m = 0;
  std::function<std::vector<Mat>(const Vec&)> coeffs;  // p matrices, each m x q
  std::function<Vec(const Vec&)> source;               // m-vector b(u)
  std::function<bool(const Vec&)> admissible;
  std::string name;

  SystemSpec with_flipped_source() const {
    SystemSpec s = *this;
    auto b = source;
    s.source = [b](const Vec& u) { return Vec(-b(u)); };
    s.name = name + "(-b)";
    return s;
  }
};

/// Candidate solution x -> u with a domain predicate. The evaluator must be
/// deterministic; `jacobian` is optional (analytic) and may be null.
struct CandidateSolution {
  std::function<Vec(const Vec&)> eval;
  std::function<bool(const Vec&)> domain;
  std::function<Mat(const Vec&)> jacobian;  // optional
};

struct ResidualReport {
  Vec max_abs;   // per equation
  Vec mean_abs;  // per equation
  int samples = 0;
  double fd_step = 0.0;
  double tolerance = 0.0;
  std::vector<Vec> failing_points;
  bool pass = false;

  double max() const { return samples ? max_abs.maxCoeff() : 0.0; }
  double mean() const { return samples ? mean_abs.maxCoeff() : 0.0; }
};

/// Sum_i lambda_i A^i(u), the matrix of the algebraic wave relation.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> wave_matrix(
    const SystemSpec& sys, const Vec& u,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& lambda) {
  if (lambda.size() != sys.p) throw InputError("wave vector size != p");
  auto As = sys.coeffs(u);
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> N =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(sys.m, sys.q);
  for (int i = 0; i < sys.p; ++i) N += lambda(i) * As[i].template cast<Scalar>();
  return N;
}

}  // namespace riemann_kit
