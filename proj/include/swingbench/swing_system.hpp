#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "swingbench/errors.hpp"
#include "swingbench/network.hpp"
#include "swingbench/types.hpp"

namespace swingbench {

/// Performance output of the swing dynamics.
///  - PhaseCohesiveness: y = L^{1/2} theta
///  - EdgePhase:         y = diag(b)^{1/2} B^T theta (one row per edge;
///                       C^T C = L, so all norms match PhaseCohesiveness)
///  - Frequency:         y = theta_dot
///  - Combined:          y = [L^{1/2} theta; kappa * theta_dot]
enum class OutputKind { PhaseCohesiveness, EdgePhase, Frequency, Combined };

inline const char* output_kind_name(OutputKind kind) {
  switch (kind) {
    case OutputKind::PhaseCohesiveness:
      return "phase";
    case OutputKind::EdgePhase:
      return "edge";
    case OutputKind::Frequency:
      return "frequency";
    default:
      return "combined";
  }
}

/// Linearized swing dynamics in state-space form over Theta = (theta, theta_dot):
///   A = [0 I; -L/M -(D/M) I],  F = [0; (1/M) I],  y = C Theta.
/// inertia/damping are kept alongside the matrices so block structure can be
/// recovered exactly (the zero-frequency limit needs it).
template <typename Scalar>
struct SwingStateSpace {
  MatrixX<Scalar> A;  // 2n x 2n
  MatrixX<Scalar> F;  // 2n x n
  MatrixX<Scalar> C;  // p x 2n
  OutputKind kind = OutputKind::PhaseCohesiveness;
  Index n = 0;  // machine count
  Scalar inertia = Scalar(1);
  Scalar damping = Scalar(1);

  Index input_count() const { return F.cols(); }
  Index output_count() const { return C.rows(); }
};

/// One decoupled second-order subsystem from the modal decomposition:
/// states (theta_i, theta_dot_i) with denominator M s^2 + D s + lambda_i and
/// output rows [phase_gain, 0] and/or [0, freq_gain].
template <typename Scalar>
struct ModalSubsystem {
  int mode = 1;  // 1-based; mode 1 carries lambda = 0 for network systems
  Scalar lambda = Scalar(0);
  Scalar inertia = Scalar(1);
  Scalar damping = Scalar(1);
  Scalar phase_gain = Scalar(0);  // sqrt(lambda_i), or 0
  Scalar freq_gain = Scalar(0);   // 0, 1, or kappa

  /// |G_i(j omega)|: for lambda > 0 this is
  /// sqrt(phase_gain^2 + freq_gain^2 omega^2) / |lambda - M omega^2 + j D omega|;
  /// the lambda = 0 subsystem reduces to the first-order freq_gain / (M s + D).
  Scalar magnitude(Scalar omega) const {
    omega = std::abs(omega);
    if (lambda == Scalar(0)) {
      return freq_gain / std::hypot(inertia * omega, damping);
    }
    const Scalar num = std::sqrt(phase_gain * phase_gain + freq_gain * freq_gain * omega * omega);
    const Scalar den = std::hypot(lambda - inertia * omega * omega, damping * omega);
    return num / den;
  }

  /// Natural frequency sqrt(lambda / M); 0 for the zero mode.
  Scalar omega_n() const { return std::sqrt(std::max(lambda, Scalar(0)) / inertia); }
};

namespace detail {

template <typename Scalar>
void set_modal_gains(ModalSubsystem<Scalar>& sub, OutputKind kind, Scalar kappa) {
  const Scalar root = std::sqrt(std::max(sub.lambda, Scalar(0)));
  switch (kind) {
    case OutputKind::PhaseCohesiveness:
    case OutputKind::EdgePhase:
      sub.phase_gain = root;
      sub.freq_gain = Scalar(0);
      break;
    case OutputKind::Frequency:
      sub.phase_gain = Scalar(0);
      sub.freq_gain = Scalar(1);
      break;
    case OutputKind::Combined:
      sub.phase_gain = root;
      sub.freq_gain = kappa;
      break;
  }
}

}  // namespace detail

/// Assemble the full 2n-state swing dynamics for the requested output.
/// Throws DisconnectedGraph for disconnected specs.
template <typename Scalar>
SwingStateSpace<Scalar> assemble(const NetworkSpec<Scalar>& spec, OutputKind output) {
  const MatrixX<Scalar> L = build_laplacian(spec);
  const LaplacianSpectrum<Scalar> eig = spectrum(L);
  const Index n = spec.n;
  const Scalar M = spec.inertia;
  const Scalar D = spec.damping;

  SwingStateSpace<Scalar> sys;
  sys.kind = output;
  sys.n = n;
  sys.inertia = M;
  sys.damping = D;

  sys.A = MatrixX<Scalar>::Zero(2 * n, 2 * n);
  sys.A.topRightCorner(n, n).setIdentity();
  sys.A.bottomLeftCorner(n, n) = -L / M;
  sys.A.bottomRightCorner(n, n) = -(D / M) * MatrixX<Scalar>::Identity(n, n);

  sys.F = MatrixX<Scalar>::Zero(2 * n, n);
  sys.F.bottomRows(n) = MatrixX<Scalar>::Identity(n, n) / M;

  switch (output) {
    case OutputKind::PhaseCohesiveness: {
      sys.C = MatrixX<Scalar>::Zero(n, 2 * n);
      sys.C.leftCols(n) = eig.sqrt_matrix();
      break;
    }
    case OutputKind::EdgePhase: {
      const auto inc = build_incidence(spec);
      const Index m = inc.weights.size();
      sys.C = MatrixX<Scalar>::Zero(m, 2 * n);
      sys.C.leftCols(n) = inc.weights.cwiseSqrt().asDiagonal() * inc.incidence.transpose();
      break;
    }
    case OutputKind::Frequency: {
      sys.C = MatrixX<Scalar>::Zero(n, 2 * n);
      sys.C.rightCols(n).setIdentity();
      break;
    }
    case OutputKind::Combined: {
      sys.C = MatrixX<Scalar>::Zero(2 * n, 2 * n);
      sys.C.topLeftCorner(n, n) = eig.sqrt_matrix();
      sys.C.bottomRightCorner(n, n) = spec.kappa * MatrixX<Scalar>::Identity(n, n);
      break;
    }
  }
  return sys;
}

/// Single-machine infinite-bus dynamics M theta'' = -D theta' - B theta + w,
/// written in the same state-space form (the grounded susceptance B plays
/// the role of the single eigenvalue).
template <typename Scalar>
SwingStateSpace<Scalar> smib_system(Scalar inertia, Scalar damping, Scalar susceptance, OutputKind output,
                                    Scalar kappa = Scalar(1)) {
  if (!(inertia > Scalar(0)) || !(damping > Scalar(0)) || !(susceptance > Scalar(0))) {
    throw NonPositiveParameter("smib_system: M, D, B must be > 0");
  }
  SwingStateSpace<Scalar> sys;
  sys.kind = output;
  sys.n = 1;
  sys.inertia = inertia;
  sys.damping = damping;
  sys.A.resize(2, 2);
  sys.A << Scalar(0), Scalar(1), -susceptance / inertia, -damping / inertia;
  sys.F.resize(2, 1);
  sys.F << Scalar(0), Scalar(1) / inertia;
  const Scalar root = std::sqrt(susceptance);
  switch (output) {
    case OutputKind::PhaseCohesiveness:
    case OutputKind::EdgePhase:
      sys.C.resize(1, 2);
      sys.C << root, Scalar(0);
      break;
    case OutputKind::Frequency:
      sys.C.resize(1, 2);
      sys.C << Scalar(0), Scalar(1);
      break;
    case OutputKind::Combined:
      sys.C.resize(2, 2);
      sys.C << root, Scalar(0), Scalar(0), kappa;
      break;
  }
  return sys;
}

/// Modal subsystems for a known eigenvalue list (ascending); used by sweeps
/// to re-parameterize (M, D) without re-solving the eigenproblem.
template <typename Scalar>
std::vector<ModalSubsystem<Scalar>> modes_from_lambdas(const VectorX<Scalar>& lambdas, Scalar inertia,
                                                       Scalar damping, OutputKind output,
                                                       Scalar kappa = Scalar(1)) {
  std::vector<ModalSubsystem<Scalar>> modes;
  modes.reserve(static_cast<std::size_t>(lambdas.size()));
  for (Index k = 0; k < lambdas.size(); ++k) {
    ModalSubsystem<Scalar> sub;
    sub.mode = static_cast<int>(k) + 1;
    sub.lambda = lambdas(k);
    sub.inertia = inertia;
    sub.damping = damping;
    detail::set_modal_gains(sub, output, kappa);
    modes.push_back(sub);
  }
  return modes;
}

/// Decompose the network dynamics into n decoupled modal subsystems, in
/// ascending-lambda order. For the phase outputs mode 1 has zero gain; for
/// the frequency output mode 1 is the first-order system 1 / (M s + D).
template <typename Scalar>
std::vector<ModalSubsystem<Scalar>> modal_decompose(const NetworkSpec<Scalar>& spec, OutputKind output) {
  const LaplacianSpectrum<Scalar> eig = spectrum(spec);
  return modes_from_lambdas(eig.eigenvalues, spec.inertia, spec.damping, output, spec.kappa);
}

/// The SMIB system as a single modal subsystem with lambda = B.
template <typename Scalar>
std::vector<ModalSubsystem<Scalar>> smib_modes(Scalar inertia, Scalar damping, Scalar susceptance,
                                               OutputKind output, Scalar kappa = Scalar(1)) {
  if (!(inertia > Scalar(0)) || !(damping > Scalar(0)) || !(susceptance > Scalar(0))) {
    throw NonPositiveParameter("smib_modes: M, D, B must be > 0");
  }
  ModalSubsystem<Scalar> sub;
  sub.mode = 1;
  sub.lambda = susceptance;
  sub.inertia = inertia;
  sub.damping = damping;
  detail::set_modal_gains(sub, output, kappa);
  return {sub};
}

/// Largest singular value of the frequency response C (jw I - A)^{-1} F.
/// At w = 0 the resolvent is singular whenever the network has a zero mode;
/// the finite limit is evaluated instead (theta-block output through the
/// Laplacian pseudo-inverse plus the 1/D zero-mode frequency term). Throws
/// SingularResolvent if the zero mode is observable through the theta block,
/// which cannot happen for the built-in output kinds.
template <typename Scalar>
Scalar sigma_max(const SwingStateSpace<Scalar>& sys, Scalar omega) {
  if (!std::isfinite(omega)) throw std::invalid_argument("sigma_max: omega must be finite");
  omega = std::abs(omega);  // magnitude responses are even in omega

  if (omega > Scalar(0)) {
    const Index nx = sys.A.rows();
    MatrixXc<Scalar> resolvent = -sys.A.template cast<Complex<Scalar>>();
    resolvent.diagonal().array() += Complex<Scalar>(Scalar(0), omega);
    const MatrixXc<Scalar> G = sys.C.template cast<Complex<Scalar>>() *
                               resolvent.partialPivLu().solve(sys.F.template cast<Complex<Scalar>>());
    (void)nx;
    return Eigen::JacobiSVD<MatrixXc<Scalar>>(G).singularValues()(0);
  }

  // w = 0: G(0) = C_theta L^+ W + (1/D) C_omega P0 W, where F = [0; W/M],
  // L^+ is the spectral pseudo-inverse and P0 projects onto the zero modes.
  const Index n = sys.input_count();
  const Scalar M = sys.inertia;
  const Scalar D = sys.damping;
  const MatrixX<Scalar> C_theta = sys.C.leftCols(n);
  const MatrixX<Scalar> C_omega = sys.C.rightCols(n);
  const MatrixX<Scalar> W = M * sys.F.bottomRows(n);
  MatrixX<Scalar> L = -M * sys.A.bottomLeftCorner(n, n);
  L = ((L + L.transpose()) / Scalar(2)).eval();

  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(L);
  const VectorX<Scalar>& lam = solver.eigenvalues();
  const MatrixX<Scalar>& U = solver.eigenvectors();
  const Scalar tol = Scalar(1e-9) * std::max(lam(n - 1), Scalar(1));

  MatrixX<Scalar> G0 = MatrixX<Scalar>::Zero(sys.output_count(), n);
  for (Index k = 0; k < n; ++k) {
    const VectorX<Scalar> u = U.col(k);
    if (lam(k) <= tol) {
      const VectorX<Scalar> phase_dir = C_theta * u;
      if (phase_dir.norm() > Scalar(1e-8) * std::max(C_theta.norm(), Scalar(1))) {
        throw SingularResolvent("sigma_max: zero mode observable through the theta block at omega = 0");
      }
      G0 += (C_omega * u) * (u.transpose() * W) / D;
    } else {
      G0 += (C_theta * u) * (u.transpose() * W) / lam(k);
    }
  }
  return Eigen::JacobiSVD<MatrixX<Scalar>>(G0).singularValues()(0);
}

/// Orthogonal input/output transformation y -> V y, u -> V u (so C -> V C and
/// F -> F V^T). System norms are invariant under it; this exists to exercise
/// that invariance. Requires a square system (p outputs = n inputs).
template <typename Scalar, typename Derived>
SwingStateSpace<Scalar> transform_io(const SwingStateSpace<Scalar>& sys, const Eigen::MatrixBase<Derived>& V_expr) {
  const MatrixX<Scalar> V = V_expr;
  if (V.rows() != V.cols()) throw NotOrthogonal("transform_io: V must be square");
  if (V.rows() != sys.output_count() || V.rows() != sys.input_count()) {
    throw std::invalid_argument("transform_io: V must match the square system dimension (p = n inputs)");
  }
  const Scalar err =
      (V.transpose() * V - MatrixX<Scalar>::Identity(V.rows(), V.cols())).cwiseAbs().maxCoeff();
  if (err > Scalar(1e-10)) {
    throw NotOrthogonal("transform_io: V^T V differs from identity by " + std::to_string(static_cast<double>(err)));
  }
  SwingStateSpace<Scalar> out = sys;
  out.C = V * sys.C;
  out.F = sys.F * V.transpose();
  return out;
}

}  // namespace swingbench
