#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "swingbench/errors.hpp"
#include "swingbench/network.hpp"
#include "swingbench/types.hpp"

namespace swingbench {

/// Which branch of a two-branch H-infinity expression produced a value.
/// The overdamped branch governs iff D^2 / (2 M lambda) > 1; equality takes
/// the underdamped branch (matching the "<=" in the expressions).
enum class Regime { UnderdampedBranch, OverdampedBranch, NotApplicable };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::UnderdampedBranch:
      return "underdamped-branch";
    case Regime::OverdampedBranch:
      return "overdamped-branch";
    default:
      return "not-applicable";
  }
}

template <typename Scalar>
struct NormResult {
  Scalar value = Scalar(0);
  Regime regime = Regime::NotApplicable;
  std::string source;
  /// A derived alternative value, attached when an independent derivation
  /// disagrees with the primary expression (see phase_output_norms).
  std::optional<Scalar> alternate_value;
  std::string alternate_source;
};

template <typename Scalar>
struct NormPair {
  NormResult<Scalar> h2;
  NormResult<Scalar> hinf;
};

namespace detail {

template <typename Scalar>
void require_positive(Scalar v, const char* name) {
  if (!(v > Scalar(0))) {
    throw NonPositiveParameter(std::string(name) + " must be > 0");
  }
}

}  // namespace detail

/// Poles of one second-order mode M s^2 + D s + lambda. The first pole is
/// the "+" branch of the square root.
template <typename Scalar>
std::pair<Complex<Scalar>, Complex<Scalar>> mode_poles(Scalar inertia, Scalar damping, Scalar lambda) {
  const Scalar disc = damping * damping - Scalar(4) * inertia * lambda;
  if (disc >= Scalar(0)) {
    const Scalar r = std::sqrt(disc);
    return {Complex<Scalar>((-damping + r) / (Scalar(2) * inertia), Scalar(0)),
            Complex<Scalar>((-damping - r) / (Scalar(2) * inertia), Scalar(0))};
  }
  const Scalar im = std::sqrt(-disc) / (Scalar(2) * inertia);
  const Scalar re = -damping / (Scalar(2) * inertia);
  return {Complex<Scalar>(re, im), Complex<Scalar>(re, -im)};
}

/// One mode's eigen-structure. zeta is absent for the lambda = 0 mode (the
/// pole pair {0, -D/M} is first-order, it has no damping ratio).
template <typename Scalar>
struct ModeEigenpair {
  int mode = 1;  // 1-based; mode 1 carries lambda_1 = 0
  Scalar lambda = Scalar(0);
  Complex<Scalar> s1;
  Complex<Scalar> s2;
  std::optional<Scalar> zeta;
  Scalar omega_n = Scalar(0);
};

/// Closed-form eigenvalues of the full swing dynamics: per Laplacian
/// eigenvalue, the roots of M s^2 + D s + lambda_i.
template <typename Scalar>
std::vector<ModeEigenpair<Scalar>> system_eigenvalues(Scalar inertia, Scalar damping,
                                                      const LaplacianSpectrum<Scalar>& spec) {
  detail::require_positive(inertia, "inertia");
  detail::require_positive(damping, "damping");
  std::vector<ModeEigenpair<Scalar>> out;
  out.reserve(static_cast<std::size_t>(spec.size()));
  for (Index k = 0; k < spec.size(); ++k) {
    const Scalar lambda = spec.eigenvalues(k);
    ModeEigenpair<Scalar> mode;
    mode.mode = static_cast<int>(k) + 1;
    mode.lambda = lambda;
    std::tie(mode.s1, mode.s2) = mode_poles(inertia, damping, lambda);
    mode.omega_n = std::sqrt(std::max(lambda, Scalar(0)) / inertia);
    if (lambda > Scalar(0)) {
      mode.zeta = damping / (Scalar(2) * std::sqrt(inertia * lambda));
    }
    out.push_back(mode);
  }
  return out;
}

/// zeta_min = D / (2 sqrt(M lambda_n)): the largest Laplacian eigenvalue
/// governs the least-damped mode.
template <typename Scalar>
Scalar min_damping_ratio(Scalar inertia, Scalar damping, Scalar lambda_max) {
  detail::require_positive(inertia, "inertia");
  detail::require_positive(damping, "damping");
  detail::require_positive(lambda_max, "lambda_max");
  return damping / (Scalar(2) * std::sqrt(inertia * lambda_max));
}

/// H-infinity norm of one modal transfer sqrt(lambda) / (M s^2 + D s + lambda),
/// with the frequency at which it is attained (0 on the overdamped branch).
template <typename Scalar>
struct PerModeHinf {
  Scalar value = Scalar(0);
  Regime regime = Regime::NotApplicable;
  Scalar peak_omega = Scalar(0);
};

template <typename Scalar>
PerModeHinf<Scalar> per_mode_hinf(Scalar inertia, Scalar damping, Scalar lambda) {
  detail::require_positive(inertia, "inertia");
  detail::require_positive(damping, "damping");
  if (lambda < Scalar(0)) throw NonPositiveParameter("lambda must be >= 0");
  PerModeHinf<Scalar> out;
  if (lambda == Scalar(0)) {
    // Zero output gain: the mode contributes nothing.
    out.value = Scalar(0);
    out.regime = Regime::NotApplicable;
    out.peak_omega = Scalar(0);
    return out;
  }
  if (damping * damping <= Scalar(2) * inertia * lambda) {
    out.regime = Regime::UnderdampedBranch;
    out.value = Scalar(2) * inertia * std::sqrt(lambda) /
                (damping * std::sqrt(Scalar(4) * inertia * lambda - damping * damping));
    const Scalar w2 = lambda / inertia - damping * damping / (Scalar(2) * inertia * inertia);
    out.peak_omega = std::sqrt(std::max(w2, Scalar(0)));
  } else {
    out.regime = Regime::OverdampedBranch;
    out.value = Scalar(1) / std::sqrt(lambda);
    out.peak_omega = Scalar(0);
  }
  return out;
}

/// H2 and H-infinity norms of the single-machine infinite-bus system with
/// phase output y = sqrt(B) * theta.
template <typename Scalar>
NormPair<Scalar> smib_norms(Scalar inertia, Scalar damping, Scalar susceptance) {
  detail::require_positive(inertia, "inertia");
  detail::require_positive(damping, "damping");
  detail::require_positive(susceptance, "susceptance");
  NormPair<Scalar> out;
  out.h2.value = std::sqrt(Scalar(1) / (Scalar(2) * damping));
  out.h2.regime = Regime::NotApplicable;
  out.h2.source = "smib-h2";
  const auto hinf = per_mode_hinf(inertia, damping, susceptance);
  out.hinf.value = hinf.value;
  out.hinf.regime = hinf.regime;
  out.hinf.source = "smib-hinf";
  return out;
}

/// Network norms for the phase cohesiveness output. The H2 value follows the
/// published expression sqrt(n / 2D); the modal decomposition (mode 1 has
/// zero output gain, the other n-1 modes contribute 1/2D each to the squared
/// norm) gives sqrt((n-1) / 2D) instead, attached as alternate_value so
/// callers can report both. The H-infinity norm is governed by lambda_2.
template <typename Scalar>
NormPair<Scalar> phase_output_norms(Index n, Scalar inertia, Scalar damping, Scalar lambda2) {
  detail::require_positive(inertia, "inertia");
  detail::require_positive(damping, "damping");
  detail::require_positive(lambda2, "lambda2");
  if (n < 1) throw NonPositiveParameter("n must be >= 1");
  NormPair<Scalar> out;
  out.h2.value = std::sqrt(static_cast<Scalar>(n) / (Scalar(2) * damping));
  out.h2.regime = Regime::NotApplicable;
  out.h2.source = "phase-h2-printed";
  out.h2.alternate_value = std::sqrt(static_cast<Scalar>(n - 1) / (Scalar(2) * damping));
  out.h2.alternate_source = "phase-h2-modal";
  const auto hinf = per_mode_hinf(inertia, damping, lambda2);
  out.hinf.value = hinf.value;
  out.hinf.regime = hinf.regime;
  out.hinf.source = "phase-hinf";
  return out;
}

/// Network norms for the frequency output; both are topology-independent.
template <typename Scalar>
NormPair<Scalar> frequency_output_norms(Index n, Scalar inertia, Scalar damping) {
  detail::require_positive(inertia, "inertia");
  detail::require_positive(damping, "damping");
  if (n < 1) throw NonPositiveParameter("n must be >= 1");
  NormPair<Scalar> out;
  out.h2.value = std::sqrt(static_cast<Scalar>(n) / (Scalar(2) * damping * inertia));
  out.h2.regime = Regime::NotApplicable;
  out.h2.source = "frequency-h2";
  out.hinf.value = Scalar(1) / damping;
  out.hinf.regime = Regime::NotApplicable;
  out.hinf.source = "frequency-hinf";
  return out;
}

/// Frequency of the resonant peak of the SMIB magnitude response,
/// omega_n * sqrt(1 - 2 zeta^2); zero when there is no interior peak.
template <typename Scalar>
Scalar resonant_peak_frequency(Scalar inertia, Scalar damping, Scalar susceptance) {
  detail::require_positive(inertia, "inertia");
  detail::require_positive(damping, "damping");
  detail::require_positive(susceptance, "susceptance");
  const Scalar w2 =
      susceptance / inertia - damping * damping / (Scalar(2) * inertia * inertia);
  return w2 > Scalar(0) ? std::sqrt(w2) : Scalar(0);
}

/// Inertia thresholds of the phase-output H-infinity norm as a function of M:
/// the norm is flat (equal to its lower bound 1/sqrt(lambda_2)) up to
/// D^2 / (2 lambda_2), then increasing; it switches from convex to concave at
/// D^2 / lambda_2.
template <typename Scalar>
struct RegimeBoundaries {
  Scalar hinf_flat_until = Scalar(0);
  Scalar convexity_change_at = Scalar(0);
};

template <typename Scalar>
RegimeBoundaries<Scalar> regime_boundaries(Scalar damping, Scalar lambda2) {
  detail::require_positive(damping, "damping");
  detail::require_positive(lambda2, "lambda2");
  return {damping * damping / (Scalar(2) * lambda2), damping * damping / lambda2};
}

}  // namespace swingbench
