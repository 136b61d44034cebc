#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "swingbench/closed_form.hpp"
#include "swingbench/errors.hpp"
#include "swingbench/network.hpp"
#include "swingbench/swing_system.hpp"
#include "swingbench/types.hpp"

namespace swingbench {

// ---------------------------------------------------------------------------
// H2 via per-mode Lyapunov solves
// ---------------------------------------------------------------------------

template <typename Scalar>
struct GramianResult {
  Scalar h2 = Scalar(0);
  /// Modes excluded as unobservable-marginal (lambda = 0 with zero output
  /// gain); 1-based indices.
  std::vector<int> deflated_modes;
};

namespace detail {

/// Numeric solve of P A + A^T P = -Q for symmetric 2x2 P (vectorized 3x3
/// linear system).
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> solve_lyapunov_2x2(const Eigen::Matrix<Scalar, 2, 2>& A,
                                               const Eigen::Matrix<Scalar, 2, 2>& Q) {
  Eigen::Matrix<Scalar, 3, 3> lhs;
  lhs << 2 * A(0, 0), 2 * A(1, 0), 0,  //
      A(0, 1), A(0, 0) + A(1, 1), A(1, 0),  //
      0, 2 * A(0, 1), 2 * A(1, 1);
  const Eigen::Matrix<Scalar, 3, 1> rhs(-Q(0, 0), -Q(0, 1), -Q(1, 1));
  const Eigen::Matrix<Scalar, 3, 1> x = lhs.colPivHouseholderQr().solve(rhs);
  Eigen::Matrix<Scalar, 2, 2> P;
  P << x(0), x(1), x(1), x(2);
  return P;
}

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> modal_state_matrix(const ModalSubsystem<Scalar>& sub) {
  Eigen::Matrix<Scalar, 2, 2> A;
  A << Scalar(0), Scalar(1), -sub.lambda / sub.inertia, -sub.damping / sub.inertia;
  return A;
}

}  // namespace detail

/// H2 norm from the observability Gramian, computed mode by mode: each
/// subsystem contributes trace(F_i^T P_i F_i) = P_i(2,2) / M^2 with P_i from
/// its own small Lyapunov solve. Marginal modes with zero gain are deflated;
/// a marginal mode with phase gain would make the norm infinite and throws.
template <typename Scalar>
GramianResult<Scalar> h2_gramian(const std::vector<ModalSubsystem<Scalar>>& modes) {
  GramianResult<Scalar> out;
  Scalar total = Scalar(0);
  for (const auto& sub : modes) {
    const Scalar M = sub.inertia;
    const Scalar D = sub.damping;
    if (sub.lambda <= Scalar(0)) {
      if (sub.phase_gain != Scalar(0)) {
        throw ObservableMarginalMode("h2_gramian: marginal mode " + std::to_string(sub.mode) +
                                     " has nonzero phase gain; H2 is infinite");
      }
      if (sub.freq_gain == Scalar(0)) {
        out.deflated_modes.push_back(sub.mode);
        continue;
      }
      // First-order subsystem x' = -(D/M) x + (1/M) w, y = g x:
      // 2 (-D/M) p = -g^2  =>  contribution p / M^2 = g^2 / (2 M D).
      const Scalar p = sub.freq_gain * sub.freq_gain * M / (Scalar(2) * D);
      total += p / (M * M);
      continue;
    }
    Eigen::Matrix<Scalar, 2, 2> Q = Eigen::Matrix<Scalar, 2, 2>::Zero();
    Q(0, 0) = sub.phase_gain * sub.phase_gain;
    Q(1, 1) = sub.freq_gain * sub.freq_gain;
    const auto P = detail::solve_lyapunov_2x2(detail::modal_state_matrix(sub), Q);
    total += P(1, 1) / (M * M);
  }
  out.h2 = std::sqrt(total);
  return out;
}

template <typename Scalar>
GramianResult<Scalar> h2_gramian(const NetworkSpec<Scalar>& spec, OutputKind output) {
  return h2_gramian(modal_decompose(spec, output));
}

// ---------------------------------------------------------------------------
// H2 via impulse-response energy (time-domain oracle)
// ---------------------------------------------------------------------------

namespace detail {

template <typename Scalar>
struct PoleSummary {
  Scalar fastest_magnitude = Scalar(0);   // max |s| over nonzero poles
  Scalar slowest_decay = Scalar(0);       // min |Re s| over nonzero poles
};

template <typename Scalar>
PoleSummary<Scalar> pole_summary(const std::vector<ModalSubsystem<Scalar>>& modes) {
  PoleSummary<Scalar> out;
  out.slowest_decay = std::numeric_limits<Scalar>::infinity();
  for (const auto& sub : modes) {
    const auto [s1, s2] = mode_poles(sub.inertia, sub.damping, std::max(sub.lambda, Scalar(0)));
    for (const auto& s : {s1, s2}) {
      const Scalar mag = std::abs(s);
      if (mag <= Scalar(0)) continue;  // the integrator pole of the zero mode
      out.fastest_magnitude = std::max(out.fastest_magnitude, mag);
      out.slowest_decay = std::min(out.slowest_decay, std::abs(s.real()));
    }
  }
  return out;
}

/// Per-mode decay rate of the slowest pole (for tail estimates).
template <typename Scalar>
Scalar mode_decay_rate(const ModalSubsystem<Scalar>& sub) {
  const auto [s1, s2] = mode_poles(sub.inertia, sub.damping, std::max(sub.lambda, Scalar(0)));
  Scalar rate = std::numeric_limits<Scalar>::infinity();
  for (const auto& s : {s1, s2}) {
    if (std::abs(s) <= Scalar(0)) continue;
    rate = std::min(rate, std::abs(s.real()));
  }
  return rate;
}

}  // namespace detail

/// Step sizes satisfying the impulse-energy preconditions with some margin.
template <typename Scalar>
struct ImpulseParams {
  Scalar dt = Scalar(0);
  Scalar horizon = Scalar(0);
};

template <typename Scalar>
ImpulseParams<Scalar> recommended_impulse_params(const std::vector<ModalSubsystem<Scalar>>& modes) {
  const auto poles = detail::pole_summary(modes);
  ImpulseParams<Scalar> out;
  out.dt = Scalar(0.09) / poles.fastest_magnitude;
  out.horizon = Scalar(10.5) / poles.slowest_decay;
  return out;
}

/// Squared H2 norm as total impulse-response energy, marched in the modal
/// coordinates with exact per-step discretization and composite-Simpson
/// accumulation of ||y(t)||^2. Summing unit modal impulses over modes equals
/// the per-channel sum because the input transform is orthogonal.
/// Preconditions: dt * |s_max| < 0.1 and horizon >= 10 / |Re s_slowest|.
/// Throws HorizonTooShort when the estimated tail exceeds 0.1% of the
/// accumulated energy.
template <typename Scalar>
Scalar h2_impulse_energy(const std::vector<ModalSubsystem<Scalar>>& modes, Scalar dt, Scalar horizon) {
  if (!(dt > Scalar(0)) || !(horizon > dt)) {
    throw std::invalid_argument("h2_impulse_energy: need 0 < dt < horizon");
  }
  const auto poles = detail::pole_summary(modes);
  if (!(dt * poles.fastest_magnitude < Scalar(0.1))) {
    throw std::invalid_argument("h2_impulse_energy: dt too large for the fastest pole (need dt*|s_max| < 0.1)");
  }
  if (horizon < Scalar(10) / poles.slowest_decay * (Scalar(1) - Scalar(1e-12))) {
    throw HorizonTooShort("h2_impulse_energy: horizon below 10 / |Re s_slowest|");
  }

  std::size_t steps = static_cast<std::size_t>(std::ceil(horizon / dt));
  if (steps % 2 != 0) ++steps;
  const std::size_t tail_window = std::max<std::size_t>(steps / 8, 2);

  Scalar total = Scalar(0);
  Scalar tail_estimate = Scalar(0);
  for (const auto& sub : modes) {
    if (sub.phase_gain == Scalar(0) && sub.freq_gain == Scalar(0)) continue;
    if (sub.lambda <= Scalar(0) && sub.phase_gain != Scalar(0)) {
      throw ObservableMarginalMode("h2_impulse_energy: marginal mode " + std::to_string(sub.mode) +
                                   " has nonzero phase gain; the energy diverges");
    }
    const Scalar M = sub.inertia;
    const Scalar gp2 = sub.phase_gain * sub.phase_gain;
    const Scalar gf2 = sub.freq_gain * sub.freq_gain;

    Eigen::Matrix<Scalar, 2, 2> phi;
    Scalar x1 = Scalar(0);
    Scalar x2 = Scalar(1) / M;  // unit impulse through F = [0; 1/M]
    if (sub.lambda <= Scalar(0)) {
      // First-order: theta is unobservable (gp == 0 checked above).
      phi.setZero();
      phi(1, 1) = std::exp(-sub.damping / M * dt);
    } else {
      phi = (detail::modal_state_matrix(sub) * dt).exp();
    }
    const Scalar p00 = phi(0, 0), p01 = phi(0, 1), p10 = phi(1, 0), p11 = phi(1, 1);

    auto value = [&](Scalar a, Scalar b) { return gp2 * a * a + gf2 * b * b; };

    // Composite Simpson over [0, steps*dt].
    Scalar sum_odd = Scalar(0), sum_even = Scalar(0), window_sum = Scalar(0);
    const Scalar f0 = value(x1, x2);
    Scalar f_last = f0;
    for (std::size_t k = 1; k <= steps; ++k) {
      const Scalar nx1 = p00 * x1 + p01 * x2;
      const Scalar nx2 = p10 * x1 + p11 * x2;
      x1 = nx1;
      x2 = nx2;
      const Scalar f = value(x1, x2);
      if (k == steps) {
        f_last = f;
      } else if (k % 2 == 1) {
        sum_odd += f;
      } else {
        sum_even += f;
      }
      if (k > steps - tail_window) window_sum += f;  // trapezoid-ish tail probe
    }
    const Scalar energy = dt / Scalar(3) * (f0 + Scalar(4) * sum_odd + Scalar(2) * sum_even + f_last);
    total += energy;

    const Scalar alpha = detail::mode_decay_rate(sub);
    const Scalar window_len = static_cast<Scalar>(tail_window) * dt;
    const Scalar rho = std::exp(-Scalar(2) * alpha * window_len);
    const Scalar window_energy = window_sum * dt;
    if (rho < Scalar(1)) {
      tail_estimate += window_energy * rho / (Scalar(1) - rho);
    } else {
      tail_estimate += std::numeric_limits<Scalar>::infinity();
    }
  }
  if (!(tail_estimate <= Scalar(1e-3) * total)) {
    throw HorizonTooShort("h2_impulse_energy: estimated tail energy above 0.1% of the accumulated energy");
  }
  return total;
}

template <typename Scalar>
Scalar h2_impulse_energy(const NetworkSpec<Scalar>& spec, OutputKind output, Scalar dt, Scalar horizon) {
  return h2_impulse_energy(modal_decompose(spec, output), dt, horizon);
}

// ---------------------------------------------------------------------------
// H-infinity via per-mode scalar maximization
// ---------------------------------------------------------------------------

template <typename Scalar>
struct HinfSearchResult {
  Scalar hinf = Scalar(0);
  Scalar argmax_omega = Scalar(0);
  int governing_mode = 0;  // 1-based; 0 when not identified (dense search)
  Scalar tol_achieved = Scalar(0);
};

namespace detail {

template <typename Scalar>
struct ScalarMaximum {
  Scalar x = Scalar(0);
  Scalar value = Scalar(0);
  Scalar tol = Scalar(0);
};

/// Golden-section maximization on one bracket. Returns the refined point and
/// tracks the best value seen.
template <typename Scalar, typename F>
void golden_refine(Scalar a, Scalar b, F&& f, Scalar& best_x, Scalar& best_v, Scalar& width) {
  constexpr Scalar inv_phi = Scalar(0.6180339887498949);
  Scalar c = b - (b - a) * inv_phi;
  Scalar d = a + (b - a) * inv_phi;
  Scalar fc = f(c), fd = f(d);
  while (b - a > Scalar(1e-10) * std::max(Scalar(1), b)) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) * inv_phi;
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) * inv_phi;
      fd = f(d);
    }
    const Scalar v = std::max(fc, fd);
    if (v > best_v) {
      best_v = v;
      best_x = fc > fd ? c : d;
      width = b - a;
    }
  }
}

/// Maximize f over the candidate points plus golden-section refinements of
/// every bracket that holds a local maximum of the sampled values (the
/// objective is a max of modal resonance curves, so a single bracket is not
/// enough). Candidates must be sorted.
template <typename Scalar, typename F>
ScalarMaximum<Scalar> maximize_over(const std::vector<Scalar>& candidates, F&& f) {
  const std::size_t m = candidates.size();
  std::vector<Scalar> values(m);
  Scalar best_x = candidates.front();
  Scalar best_v = -std::numeric_limits<Scalar>::infinity();
  for (std::size_t k = 0; k < m; ++k) {
    values[k] = f(candidates[k]);
    if (values[k] > best_v) {
      best_v = values[k];
      best_x = candidates[k];
    }
  }

  Scalar width = Scalar(0);
  for (std::size_t k = 0; k < m; ++k) {
    const bool left_ok = k == 0 || values[k] >= values[k - 1];
    const bool right_ok = k + 1 == m || values[k] >= values[k + 1];
    if (!(left_ok && right_ok)) continue;
    const Scalar a = candidates[k == 0 ? 0 : k - 1];
    const Scalar b = candidates[std::min(k + 1, m - 1)];
    if (b > a) golden_refine(a, b, f, best_x, best_v, width);
  }

  // Curvature-based estimate of the relative value tolerance.
  ScalarMaximum<Scalar> out;
  out.x = best_x;
  out.value = best_v;
  const Scalar w = std::max(width, std::numeric_limits<Scalar>::epsilon() * std::max(Scalar(1), best_x));
  Scalar probe = std::abs(best_v - f(best_x + w));
  if (best_x - w > Scalar(0)) probe = std::max(probe, std::abs(best_v - f(best_x - w)));
  out.tol = best_v > Scalar(0) ? probe / best_v + Scalar(16) * std::numeric_limits<Scalar>::epsilon()
                               : Scalar(0);
  return out;
}

template <typename Scalar>
std::vector<Scalar> log_spaced(Scalar lo, Scalar hi, int points) {
  std::vector<Scalar> out;
  out.reserve(static_cast<std::size_t>(points));
  const Scalar ratio = std::log(hi / lo);
  for (int k = 0; k < points; ++k) {
    out.push_back(lo * std::exp(ratio * static_cast<Scalar>(k) / static_cast<Scalar>(points - 1)));
  }
  return out;
}

/// Interior stationary point of the two-row magnitude
/// sqrt(lambda + k^2 w^2) / |lambda - M w^2 + j D w| (quadratic in w^2);
/// reduces to the phase-peak expression as k -> 0.
template <typename Scalar>
std::optional<Scalar> combined_peak_seed(Scalar inertia, Scalar damping, Scalar lambda, Scalar freq_gain) {
  const Scalar k2 = freq_gain * freq_gain;
  const Scalar disc = inertia * inertia * lambda * lambda +
                      k2 * lambda * (k2 * lambda + Scalar(2) * inertia * lambda - damping * damping);
  if (!(disc > Scalar(0))) return std::nullopt;
  const Scalar u =
      (-inertia * inertia * lambda + inertia * std::sqrt(disc)) / (k2 * inertia * inertia);
  if (!(u > Scalar(0))) return std::nullopt;
  return std::sqrt(u);
}

template <typename Scalar>
std::vector<Scalar> mode_search_candidates(const ModalSubsystem<Scalar>& sub, int grid_points) {
  const Scalar scale = sub.lambda > Scalar(0) ? sub.omega_n() : sub.damping / sub.inertia;
  std::vector<Scalar> candidates = log_spaced(scale / Scalar(100), scale * Scalar(100), grid_points);
  candidates.push_back(Scalar(0));
  if (sub.lambda > Scalar(0)) {
    // Stationary point of the phase magnitude; seeds the search.
    const Scalar w2 = sub.lambda / sub.inertia -
                      sub.damping * sub.damping / (Scalar(2) * sub.inertia * sub.inertia);
    if (w2 > Scalar(0)) candidates.push_back(std::sqrt(w2));
    candidates.push_back(sub.omega_n());
    if (sub.phase_gain > Scalar(0) && sub.freq_gain > Scalar(0)) {
      if (const auto seed = combined_peak_seed(sub.inertia, sub.damping, sub.lambda, sub.freq_gain)) {
        candidates.push_back(*seed);
      }
    }
  }
  std::sort(candidates.begin(), candidates.end());
  return candidates;
}

}  // namespace detail

/// Worst-case gain over frequency: per mode the scalar magnitude is
/// maximized over a log-spaced bracket (plus the analytic stationary point
/// as a seed) with golden-section refinement; the result is the max over
/// modes. Ties keep the lowest mode, so for the frequency output the
/// first-order mode 1 governs with its peak at omega = 0.
template <typename Scalar>
HinfSearchResult<Scalar> hinf_search(const std::vector<ModalSubsystem<Scalar>>& modes, Scalar rel_tol = Scalar(1e-9)) {
  if (!(rel_tol > Scalar(1e-12)) || !(rel_tol < Scalar(1e-2))) {
    throw std::invalid_argument("hinf_search: rel_tol must lie in (1e-12, 1e-2)");
  }
  HinfSearchResult<Scalar> out;
  for (const auto& sub : modes) {
    if (sub.phase_gain == Scalar(0) && sub.freq_gain == Scalar(0)) continue;
    const auto candidates = detail::mode_search_candidates(sub, 65);
    const auto peak = detail::maximize_over(candidates, [&sub](Scalar w) { return sub.magnitude(w); });
    if (peak.value > out.hinf * (Scalar(1) + Scalar(1e-12))) {
      out.hinf = peak.value;
      out.argmax_omega = peak.x;
      out.governing_mode = sub.mode;
      out.tol_achieved = peak.tol;
    }
  }
  return out;
}

template <typename Scalar>
HinfSearchResult<Scalar> hinf_search(const NetworkSpec<Scalar>& spec, OutputKind output,
                                     Scalar rel_tol = Scalar(1e-9)) {
  return hinf_search(modal_decompose(spec, output), rel_tol);
}

/// Dense-path H-infinity search: maximizes sigma_max of the full system over
/// frequency. The candidate set is seeded from the Laplacian spectrum
/// (natural frequencies and per-eigenvalue stationary points) so narrow
/// resonances cannot slip between grid points. Works on transformed systems.
template <typename Scalar>
HinfSearchResult<Scalar> hinf_search_dense(const SwingStateSpace<Scalar>& sys, Scalar rel_tol = Scalar(1e-9)) {
  if (!(rel_tol > Scalar(1e-12)) || !(rel_tol < Scalar(1e-2))) {
    throw std::invalid_argument("hinf_search_dense: rel_tol must lie in (1e-12, 1e-2)");
  }
  const Index n = sys.input_count();
  const Scalar M = sys.inertia;
  const Scalar D = sys.damping;
  MatrixX<Scalar> L = -M * sys.A.bottomLeftCorner(n, n);
  L = ((L + L.transpose()) / Scalar(2)).eval();
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(L);
  const VectorX<Scalar>& lam = solver.eigenvalues();

  const Scalar lam_max = std::max(lam(n - 1), Scalar(0));
  const Scalar tol = Scalar(1e-9) * std::max(lam_max, Scalar(1));
  Scalar lo_scale = std::sqrt(lam_max / M);
  for (Index k = 0; k < n; ++k) {
    if (lam(k) > tol) {
      lo_scale = std::sqrt(lam(k) / M);
      break;
    }
  }
  std::vector<Scalar> candidates =
      detail::log_spaced(std::min(lo_scale, D / M) / Scalar(100), Scalar(100) * std::max(std::sqrt(lam_max / M), D / M), 120);
  candidates.push_back(Scalar(0));
  // Effective frequency-block gain: 0 for phase outputs, 1 for the frequency
  // output, kappa for the combined output (orthogonal transforms keep it).
  const Scalar kappa_eff =
      Eigen::JacobiSVD<MatrixX<Scalar>>(sys.C.rightCols(n)).singularValues()(0);
  for (Index k = 0; k < n; ++k) {
    if (lam(k) <= tol) continue;
    candidates.push_back(std::sqrt(lam(k) / M));
    const Scalar w2 = lam(k) / M - D * D / (Scalar(2) * M * M);
    if (w2 > Scalar(0)) candidates.push_back(std::sqrt(w2));
    if (kappa_eff > Scalar(1e-14)) {
      if (const auto seed = detail::combined_peak_seed(M, D, lam(k), kappa_eff)) {
        candidates.push_back(*seed);
      }
    }
  }
  std::sort(candidates.begin(), candidates.end());

  const auto peak = detail::maximize_over(candidates, [&sys](Scalar w) { return sigma_max(sys, w); });
  HinfSearchResult<Scalar> out;
  out.hinf = peak.value;
  out.argmax_omega = peak.x;
  out.governing_mode = 0;
  out.tol_achieved = peak.tol;
  return out;
}

// ---------------------------------------------------------------------------
// Bode table
// ---------------------------------------------------------------------------

template <typename Scalar>
struct BodeTable {
  VectorX<Scalar> omega;
  VectorX<Scalar> sigma;
};

template <typename Scalar>
BodeTable<Scalar> bode_table(const SwingStateSpace<Scalar>& sys, Scalar omega_min, Scalar omega_max, Index points) {
  if (!(omega_min > Scalar(0)) || !(omega_min < omega_max) || points < 2) {
    throw std::invalid_argument("bode_table: need 0 < omega_min < omega_max and points >= 2");
  }
  BodeTable<Scalar> out;
  out.omega.resize(points);
  out.sigma.resize(points);
  const Scalar ratio = std::log(omega_max / omega_min);
  for (Index k = 0; k < points; ++k) {
    const Scalar w = omega_min * std::exp(ratio * static_cast<Scalar>(k) / static_cast<Scalar>(points - 1));
    out.omega(k) = w;
    out.sigma(k) = sigma_max(sys, w);
  }
  return out;
}

template <typename Scalar>
BodeTable<Scalar> bode_table(const NetworkSpec<Scalar>& spec, OutputKind output, Scalar omega_min, Scalar omega_max,
                             Index points) {
  return bode_table(assemble(spec, output), omega_min, omega_max, points);
}

// ---------------------------------------------------------------------------
// Time-domain simulation (exact modal discretization)
// ---------------------------------------------------------------------------

enum class SignalKind { Impulse, Step, Sinusoid, WhiteNoise };

template <typename Scalar>
struct SignalDescriptor {
  SignalKind kind = SignalKind::Impulse;
  Index channel = 0;
  VectorX<Scalar> direction;  // overrides channel when nonempty
  Scalar amplitude = Scalar(1);
  Scalar omega = Scalar(0);      // sinusoid frequency
  std::uint64_t seed = 0;        // white noise
  Scalar sigma = Scalar(1);      // white noise intensity

  static SignalDescriptor impulse(Index ch) { return {SignalKind::Impulse, ch, {}, Scalar(1), Scalar(0), 0, Scalar(1)}; }
  static SignalDescriptor step(Index ch, Scalar amp) {
    return {SignalKind::Step, ch, {}, amp, Scalar(0), 0, Scalar(1)};
  }
  static SignalDescriptor sinusoid(Index ch, Scalar w, Scalar amp) {
    return {SignalKind::Sinusoid, ch, {}, amp, w, 0, Scalar(1)};
  }
  static SignalDescriptor white_noise(std::uint64_t seed, Scalar sigma) {
    return {SignalKind::WhiteNoise, 0, {}, Scalar(1), Scalar(0), seed, sigma};
  }

  SignalDescriptor along(VectorX<Scalar> dir) const {
    SignalDescriptor out = *this;
    out.direction = std::move(dir);
    return out;
  }
};

template <typename Scalar>
struct Trajectory {
  VectorX<Scalar> time;      // steps + 1 stamps
  MatrixX<Scalar> outputs;   // one row per stamp
};

namespace detail {

/// March all modal subsystems with exact per-step discretization and mix the
/// modal states back into physical outputs.
template <typename Scalar>
Trajectory<Scalar> simulate_modal(const std::vector<ModalSubsystem<Scalar>>& modes,
                                  const MatrixX<Scalar>& mix_theta, const MatrixX<Scalar>& mix_omega,
                                  const VectorX<Scalar>& modal_coeffs, const SignalDescriptor<Scalar>& signal,
                                  Scalar dt, Scalar horizon) {
  if (!(dt > Scalar(0)) || !(horizon > dt)) throw std::invalid_argument("simulate: need 0 < dt < horizon");
  const auto poles = pole_summary(modes);
  if (!(dt * std::max(poles.fastest_magnitude, std::abs(signal.omega)) < Scalar(0.1))) {
    throw std::invalid_argument("simulate: dt too coarse for the fastest dynamics (need dt * |s_max| < 0.1)");
  }
  const std::size_t steps = static_cast<std::size_t>(std::ceil(horizon / dt));
  const Index p = mix_theta.rows();
  const Index nm = static_cast<Index>(modes.size());

  Trajectory<Scalar> traj;
  traj.time.resize(static_cast<Index>(steps) + 1);
  for (std::size_t k = 0; k <= steps; ++k) traj.time(static_cast<Index>(k)) = static_cast<Scalar>(k) * dt;
  traj.outputs = MatrixX<Scalar>::Zero(static_cast<Index>(steps) + 1, p);

  // Shared noise sequence (per-step zero-order hold, variance sigma^2 / dt).
  std::vector<Scalar> noise;
  if (signal.kind == SignalKind::WhiteNoise) {
    noise.resize(steps);
    std::mt19937_64 rng(signal.seed);
    const Scalar scale = signal.sigma / std::sqrt(dt);
    for (std::size_t k = 0; k < steps; ++k) {
      const Scalar u1 = std::max(static_cast<Scalar>(uniform01(rng)), std::numeric_limits<Scalar>::min());
      const Scalar u2 = static_cast<Scalar>(uniform01(rng));
      noise[k] = scale * std::sqrt(Scalar(-2) * std::log(u1)) *
                 std::cos(Scalar(2) * std::numbers::pi_v<Scalar> * u2);
    }
  }

  for (Index m = 0; m < nm; ++m) {
    const auto& sub = modes[static_cast<std::size_t>(m)];
    const Scalar coeff = modal_coeffs(m);
    if (coeff == Scalar(0)) continue;
    const Scalar Mi = sub.inertia;

    Eigen::Matrix<Scalar, 2, 2> A = modal_state_matrix(sub);
    Eigen::Matrix<Scalar, 2, 1> x(Scalar(0), Scalar(0));

    auto deposit = [&](std::size_t k, const Eigen::Matrix<Scalar, 2, 1>& state) {
      traj.outputs.row(static_cast<Index>(k)) +=
          state(0) * mix_theta.col(m).transpose() + state(1) * mix_omega.col(m).transpose();
    };

    switch (signal.kind) {
      case SignalKind::Impulse: {
        const Eigen::Matrix<Scalar, 2, 2> phi = (A * dt).exp();
        x << Scalar(0), signal.amplitude * coeff / Mi;
        deposit(0, x);
        for (std::size_t k = 1; k <= steps; ++k) {
          x = phi * x;
          deposit(k, x);
        }
        break;
      }
      case SignalKind::Step:
      case SignalKind::WhiteNoise: {
        // Augmented exponential gives Phi and the held-input response Gamma
        // in one shot, valid for the singular zero-mode block too.
        Eigen::Matrix<Scalar, 3, 3> aug = Eigen::Matrix<Scalar, 3, 3>::Zero();
        aug.template topLeftCorner<2, 2>() = A;
        aug(1, 2) = coeff / Mi;
        const Eigen::Matrix<Scalar, 3, 3> exp_aug = (aug * dt).exp();
        const Eigen::Matrix<Scalar, 2, 2> phi = exp_aug.template topLeftCorner<2, 2>();
        const Eigen::Matrix<Scalar, 2, 1> gamma = exp_aug.template block<2, 1>(0, 2);
        deposit(0, x);
        for (std::size_t k = 1; k <= steps; ++k) {
          const Scalar u = signal.kind == SignalKind::Step ? signal.amplitude : noise[k - 1];
          x = phi * x + gamma * u;
          deposit(k, x);
        }
        break;
      }
      case SignalKind::Sinusoid: {
        // Augment an undamped oscillator z = (sin wt, cos wt) so the forced
        // response is exact per step.
        Eigen::Matrix<Scalar, 4, 4> aug = Eigen::Matrix<Scalar, 4, 4>::Zero();
        aug.template topLeftCorner<2, 2>() = A;
        aug(1, 2) = signal.amplitude * coeff / Mi;
        aug(2, 3) = signal.omega;
        aug(3, 2) = -signal.omega;
        const Eigen::Matrix<Scalar, 4, 4> phi = (aug * dt).exp();
        Eigen::Matrix<Scalar, 4, 1> z(Scalar(0), Scalar(0), Scalar(0), Scalar(1));
        deposit(0, z.template head<2>());
        for (std::size_t k = 1; k <= steps; ++k) {
          z = phi * z;
          deposit(k, z.template head<2>());
        }
        break;
      }
    }
  }
  return traj;
}

template <typename Scalar>
VectorX<Scalar> physical_direction(const SignalDescriptor<Scalar>& signal, Index n) {
  if (signal.direction.size() != 0) {
    if (signal.direction.size() != n) throw std::invalid_argument("simulate: direction has wrong dimension");
    return signal.direction;
  }
  if (signal.channel < 0 || signal.channel >= n) throw std::invalid_argument("simulate: channel out of range");
  VectorX<Scalar> d = VectorX<Scalar>::Zero(n);
  d(signal.channel) = Scalar(1);
  return d;
}

}  // namespace detail

/// Simulate the network response to a disturbance signal; outputs are rows
/// of the chosen performance output. Integration is exact per step (matrix
/// exponentials of the decoupled modal blocks); dt only controls sampling.
template <typename Scalar>
Trajectory<Scalar> simulate(const NetworkSpec<Scalar>& spec, OutputKind output,
                            const SignalDescriptor<Scalar>& signal, Scalar dt, Scalar horizon) {
  const LaplacianSpectrum<Scalar> eig = spectrum(spec);
  const auto modes = modal_decompose(spec, output);
  const Index n = spec.n;

  const VectorX<Scalar> d = detail::physical_direction(signal, n);
  const VectorX<Scalar> coeffs = eig.basis.transpose() * d;

  const MatrixX<Scalar> phase_mix = eig.basis * eig.eigenvalues.cwiseMax(Scalar(0)).cwiseSqrt().asDiagonal();
  MatrixX<Scalar> mix_theta, mix_omega;
  switch (output) {
    case OutputKind::PhaseCohesiveness:
      mix_theta = phase_mix;
      mix_omega = MatrixX<Scalar>::Zero(n, n);
      break;
    case OutputKind::EdgePhase: {
      const auto inc = build_incidence(spec);
      mix_theta = inc.weights.cwiseSqrt().asDiagonal() * inc.incidence.transpose() * eig.basis;
      mix_omega = MatrixX<Scalar>::Zero(mix_theta.rows(), n);
      break;
    }
    case OutputKind::Frequency:
      mix_theta = MatrixX<Scalar>::Zero(n, n);
      mix_omega = eig.basis;
      break;
    case OutputKind::Combined:
      mix_theta = MatrixX<Scalar>::Zero(2 * n, n);
      mix_theta.topRows(n) = phase_mix;
      mix_omega = MatrixX<Scalar>::Zero(2 * n, n);
      mix_omega.bottomRows(n) = spec.kappa * eig.basis;
      break;
  }
  return detail::simulate_modal(modes, mix_theta, mix_omega, coeffs, signal, dt, horizon);
}

/// SMIB variant: single mode with lambda = B, scalar input.
template <typename Scalar>
Trajectory<Scalar> simulate_smib(Scalar inertia, Scalar damping, Scalar susceptance, OutputKind output,
                                 const SignalDescriptor<Scalar>& signal, Scalar dt, Scalar horizon,
                                 Scalar kappa = Scalar(1)) {
  const auto modes = smib_modes(inertia, damping, susceptance, output, kappa);
  MatrixX<Scalar> mix_theta = MatrixX<Scalar>::Zero(output == OutputKind::Combined ? 2 : 1, 1);
  MatrixX<Scalar> mix_omega = MatrixX<Scalar>::Zero(mix_theta.rows(), 1);
  const Scalar root = std::sqrt(susceptance);
  switch (output) {
    case OutputKind::PhaseCohesiveness:
    case OutputKind::EdgePhase:
      mix_theta(0, 0) = root;
      break;
    case OutputKind::Frequency:
      mix_omega(0, 0) = Scalar(1);
      break;
    case OutputKind::Combined:
      mix_theta(0, 0) = root;
      mix_omega(1, 0) = kappa;
      break;
  }
  VectorX<Scalar> coeffs = VectorX<Scalar>::Ones(1);
  SignalDescriptor<Scalar> sig = signal;
  sig.direction.resize(0);
  sig.channel = 0;
  return detail::simulate_modal(modes, mix_theta, mix_omega, coeffs, sig, dt, horizon);
}

/// Integrated squared output of a trajectory (trapezoid rule).
template <typename Scalar>
Scalar trajectory_energy(const Trajectory<Scalar>& traj) {
  const Index rows = traj.time.size();
  Scalar total = Scalar(0);
  for (Index k = 0; k + 1 < rows; ++k) {
    const Scalar f0 = traj.outputs.row(k).squaredNorm();
    const Scalar f1 = traj.outputs.row(k + 1).squaredNorm();
    total += (f0 + f1) / Scalar(2) * (traj.time(k + 1) - traj.time(k));
  }
  return total;
}

/// Steady-state amplitude gain of a sinusoid response: peak ||y|| over the
/// last quarter divided by the input amplitude. Throws HorizonTooShort when
/// the last-quarter amplitude still drifts by more than 1% relative to the
/// preceding quarter.
template <typename Scalar>
Scalar steady_state_gain(const Trajectory<Scalar>& traj, Scalar input_amplitude) {
  const Index rows = traj.time.size();
  if (rows < 8) throw HorizonTooShort("steady_state_gain: trajectory too short");
  const Index half = rows / 2;
  const Index q4 = rows - rows / 4;
  Scalar peak_a = Scalar(0), peak_b = Scalar(0);
  for (Index k = half; k < q4; ++k) peak_a = std::max(peak_a, static_cast<Scalar>(traj.outputs.row(k).norm()));
  for (Index k = q4; k < rows; ++k) peak_b = std::max(peak_b, static_cast<Scalar>(traj.outputs.row(k).norm()));
  const Scalar drift = std::abs(peak_b - peak_a) / std::max(peak_b, std::numeric_limits<Scalar>::min());
  if (drift > Scalar(0.01)) {
    throw HorizonTooShort("steady_state_gain: last-quarter amplitude drifts by more than 1%");
  }
  return peak_b / input_amplitude;
}

}  // namespace swingbench
