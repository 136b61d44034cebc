#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "swingbench/errors.hpp"
#include "swingbench/types.hpp"

namespace swingbench {

/// One weighted undirected edge. b is the line susceptance (per-unit,
/// strictly positive).
template <typename Scalar>
struct Edge {
  Index i = 0;
  Index j = 0;
  Scalar b = Scalar(1);
};

/// A Kron-reduced generator network with homogeneous inertia and damping.
/// Values are immutable after construction by convention; every operation
/// below is a pure function of its arguments.
template <typename Scalar>
struct NetworkSpec {
  Index n = 0;
  std::vector<Edge<Scalar>> edges;
  Scalar inertia = Scalar(1);
  Scalar damping = Scalar(1);
  Scalar kappa = Scalar(1);  // weight of the frequency block in the combined output

  /// Structural validation plus a union-find connectivity check.
  /// Throws ValidationError or DisconnectedGraph. Single isolated machines
  /// (n < 2) are rejected here; they are handled by the smib entry points.
  void validate() const {
    if (n < 2) {
      throw ValidationError("network: n must be >= 2 (single-machine analyses use the SMIB entry points), got " +
                            std::to_string(n));
    }
    if (!(inertia > Scalar(0))) throw ValidationError("network: inertia must be > 0");
    if (!(damping > Scalar(0))) throw ValidationError("network: damping must be > 0");
    if (!(kappa > Scalar(0))) throw ValidationError("network: kappa must be > 0");
    if (static_cast<Index>(edges.size()) < n - 1) {
      throw DisconnectedGraph("network: " + std::to_string(edges.size()) + " edges cannot connect " +
                              std::to_string(n) + " nodes");
    }

    std::vector<Index> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), Index(0));
    auto find = [&parent](Index x) {
      while (parent[static_cast<std::size_t>(x)] != x) {
        parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        x = parent[static_cast<std::size_t>(x)];
      }
      return x;
    };

    std::vector<std::uint64_t> seen;
    seen.reserve(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const auto& edge = edges[e];
      if (edge.i < 0 || edge.i >= n || edge.j < 0 || edge.j >= n) {
        throw ValidationError("edge " + std::to_string(e) + ": node index out of range [0, " + std::to_string(n) +
                              ")");
      }
      if (edge.i == edge.j) {
        throw ValidationError("edge " + std::to_string(e) + ": self-loop at node " + std::to_string(edge.i));
      }
      if (!(edge.b > Scalar(0))) {
        std::ostringstream msg;
        msg << "edge " << e << " (" << edge.i << "," << edge.j << "): susceptance must be > 0, got " << edge.b;
        throw ValidationError(msg.str());
      }
      const Index lo = std::min(edge.i, edge.j);
      const Index hi = std::max(edge.i, edge.j);
      const std::uint64_t key = (static_cast<std::uint64_t>(lo) << 32) | static_cast<std::uint64_t>(hi);
      if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
        throw ValidationError("edge " + std::to_string(e) + ": duplicate undirected edge (" + std::to_string(lo) +
                              "," + std::to_string(hi) + ")");
      }
      seen.push_back(key);
      parent[static_cast<std::size_t>(find(edge.i))] = find(edge.j);
    }

    Index components = 0;
    for (Index v = 0; v < n; ++v) {
      if (find(v) == v) ++components;
    }
    if (components != 1) {
      throw DisconnectedGraph("network has " + std::to_string(components) + " connected components");
    }
  }
};

/// Eigen-decomposition of a graph Laplacian: ascending eigenvalues with an
/// orthogonal eigenvector basis (columns aligned with eigenvalues, signs
/// canonicalized so results are reproducible).
template <typename Scalar>
struct LaplacianSpectrum {
  VectorX<Scalar> eigenvalues;  // lambda_1 = 0 (clamped) <= lambda_2 <= ...
  MatrixX<Scalar> basis;        // orthogonal; column k is the eigenvector of eigenvalues[k]

  Index size() const { return eigenvalues.size(); }

  /// Spectral matrix square root V * Lambda^{1/2} * V^T. Valid for the
  /// singular Laplacian because lambda_1 is clamped to exactly 0.
  MatrixX<Scalar> sqrt_matrix() const {
    return basis * eigenvalues.cwiseMax(Scalar(0)).cwiseSqrt().asDiagonal() * basis.transpose();
  }
};

/// Weighted graph Laplacian L = D - A; symmetric with zero row sums.
template <typename Scalar>
MatrixX<Scalar> build_laplacian(const NetworkSpec<Scalar>& spec) {
  spec.validate();
  MatrixX<Scalar> L = MatrixX<Scalar>::Zero(spec.n, spec.n);
  for (const auto& e : spec.edges) {
    L(e.i, e.i) += e.b;
    L(e.j, e.j) += e.b;
    L(e.i, e.j) -= e.b;
    L(e.j, e.i) -= e.b;
  }
  return L;
}

template <typename Scalar>
struct IncidenceFactorization {
  MatrixX<Scalar> incidence;  // n x |E|; +1 at the lower node index of each edge
  VectorX<Scalar> weights;    // |E| positive susceptances, in spec edge order
};

/// Oriented incidence matrix and edge weights with
/// incidence * diag(weights) * incidence^T == build_laplacian(spec).
/// Orientation is fixed (lower node index gets +1) so the output is
/// bit-for-bit reproducible for a given spec.
template <typename Scalar>
IncidenceFactorization<Scalar> build_incidence(const NetworkSpec<Scalar>& spec) {
  spec.validate();
  const Index m = static_cast<Index>(spec.edges.size());
  IncidenceFactorization<Scalar> out;
  out.incidence = MatrixX<Scalar>::Zero(spec.n, m);
  out.weights = VectorX<Scalar>(m);
  for (Index e = 0; e < m; ++e) {
    const auto& edge = spec.edges[static_cast<std::size_t>(e)];
    const Index lo = std::min(edge.i, edge.j);
    const Index hi = std::max(edge.i, edge.j);
    out.incidence(lo, e) = Scalar(1);
    out.incidence(hi, e) = Scalar(-1);
    out.weights(e) = edge.b;
  }
  return out;
}

/// Default relative connectivity tolerance: the absolute threshold used on
/// lambda_1 / lambda_2 is rel_tol * lambda_n. Absolute thresholds fail for
/// heavily weighted graphs.
template <typename Scalar>
inline constexpr Scalar kDefaultConnectivityRelTol = Scalar(1e-9);

/// Sorted spectrum of a symmetric Laplacian with connectivity checks:
/// verifies |lambda_1| below threshold and clamps it to exactly 0, throws
/// DisconnectedGraph when lambda_2 does not clear the threshold. Accepts any
/// dense Eigen expression.
template <typename Derived>
LaplacianSpectrum<typename Derived::Scalar> spectrum(
    const Eigen::MatrixBase<Derived>& L_expr,
    typename Derived::Scalar connectivity_rel_tol = kDefaultConnectivityRelTol<typename Derived::Scalar>) {
  using Scalar = typename Derived::Scalar;
  const MatrixX<Scalar> L = L_expr;
  if (L.rows() != L.cols()) throw std::invalid_argument("spectrum: matrix must be square");
  const Scalar sym_err = (L - L.transpose()).cwiseAbs().maxCoeff();
  const Scalar scale = std::max(L.cwiseAbs().maxCoeff(), Scalar(1));
  if (sym_err > Scalar(1e-12) * scale) throw std::invalid_argument("spectrum: matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver((L + L.transpose()) / Scalar(2));
  if (solver.info() != Eigen::Success) throw std::runtime_error("spectrum: eigensolver failed");

  LaplacianSpectrum<Scalar> out;
  out.eigenvalues = solver.eigenvalues();
  out.basis = solver.eigenvectors();

  // Canonical signs: largest-magnitude entry of each column is positive.
  for (Index c = 0; c < out.basis.cols(); ++c) {
    Index imax = 0;
    out.basis.col(c).cwiseAbs().maxCoeff(&imax);
    if (out.basis(imax, c) < Scalar(0)) out.basis.col(c) = -out.basis.col(c);
  }

  const Index n = out.eigenvalues.size();
  const Scalar lambda_n = out.eigenvalues(n - 1);
  const Scalar threshold = connectivity_rel_tol * std::max(lambda_n, Scalar(0));
  if (out.eigenvalues(0) < -threshold) {
    throw std::invalid_argument("spectrum: lambda_1 < 0 beyond tolerance; input is not a graph Laplacian");
  }
  if (!(std::abs(out.eigenvalues(0)) <= threshold)) {
    throw std::invalid_argument("spectrum: no zero mode (lambda_1 too large); input is not a graph Laplacian");
  }
  out.eigenvalues(0) = Scalar(0);
  if (n < 2 || !(out.eigenvalues(1) > threshold)) {
    std::ostringstream msg;
    msg << "disconnected network: lambda_2 = " << (n < 2 ? Scalar(0) : out.eigenvalues(1))
        << " below connectivity threshold " << threshold;
    throw DisconnectedGraph(msg.str());
  }
  return out;
}

template <typename Scalar>
LaplacianSpectrum<Scalar> spectrum(const NetworkSpec<Scalar>& spec,
                                   Scalar connectivity_rel_tol = kDefaultConnectivityRelTol<Scalar>) {
  return spectrum(build_laplacian(spec), connectivity_rel_tol);
}

// ---------------------------------------------------------------------------
// Graph presets (test and sweep fixtures)
// ---------------------------------------------------------------------------

enum class PresetKind { Complete, Path, Cycle, Star, ErdosRenyi };

template <typename Scalar>
struct WeightRange {
  Scalar min = Scalar(0.5);
  Scalar max = Scalar(2);
  std::uint64_t seed = 0;
};

template <typename Scalar>
struct GraphPreset {
  PresetKind kind = PresetKind::Complete;
  Index n = 2;
  std::variant<Scalar, WeightRange<Scalar>> weight = Scalar(1);
  Scalar p = Scalar(0.5);    // erdos-renyi edge probability
  std::uint64_t seed = 0;    // erdos-renyi topology seed
};

namespace detail {

/// Portable uniform double in [0, 1) from a 64-bit draw; avoids the
/// implementation-defined std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool pairs_connected(Index n, const std::vector<std::pair<Index, Index>>& pairs) {
  std::vector<Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), Index(0));
  auto find = [&parent](Index x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (const auto& [i, j] : pairs) parent[static_cast<std::size_t>(find(i))] = find(j);
  for (Index v = 0; v < n; ++v) {
    if (find(v) != find(Index(0))) return false;
  }
  return true;
}

}  // namespace detail

/// Edge list of a preset topology, in lexicographic (i, j) order with i < j.
/// Random presets are deterministic in their seeds; a random draw that fails
/// the connectivity requirement is retried a bounded number of times.
template <typename Scalar>
std::vector<Edge<Scalar>> preset_edges(const GraphPreset<Scalar>& preset) {
  const Index n = preset.n;
  if (n < 2) throw ValidationError("preset: n must be >= 2");
  std::vector<std::pair<Index, Index>> pairs;
  switch (preset.kind) {
    case PresetKind::Complete:
      for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
      break;
    case PresetKind::Path:
      for (Index i = 0; i + 1 < n; ++i) pairs.emplace_back(i, i + 1);
      break;
    case PresetKind::Cycle:
      if (n == 2) throw ValidationError("preset: cycle needs n >= 3");
      for (Index i = 0; i + 1 < n; ++i) pairs.emplace_back(i, i + 1);
      pairs.emplace_back(Index(0), n - 1);
      break;
    case PresetKind::Star:
      for (Index i = 1; i < n; ++i) pairs.emplace_back(Index(0), i);
      break;
    case PresetKind::ErdosRenyi: {
      if (!(preset.p > Scalar(0)) || preset.p > Scalar(1)) throw ValidationError("preset: p must be in (0, 1]");
      std::mt19937_64 rng(preset.seed);
      constexpr int kMaxAttempts = 64;
      bool ok = false;
      for (int attempt = 0; attempt < kMaxAttempts && !ok; ++attempt) {
        pairs.clear();
        for (Index i = 0; i < n; ++i) {
          for (Index j = i + 1; j < n; ++j) {
            if (detail::uniform01(rng) < static_cast<double>(preset.p)) pairs.emplace_back(i, j);
          }
        }
        ok = detail::pairs_connected(n, pairs);
      }
      if (!ok) {
        throw DisconnectedGraph("preset: erdos-renyi draw not connected after retries (p too small?)");
      }
      break;
    }
  }

  // Sort pairs so edge order never depends on generation order.
  std::sort(pairs.begin(), pairs.end());

  std::vector<Edge<Scalar>> edges;
  edges.reserve(pairs.size());
  if (std::holds_alternative<Scalar>(preset.weight)) {
    const Scalar w = std::get<Scalar>(preset.weight);
    if (!(w > Scalar(0))) throw ValidationError("preset: weight must be > 0");
    for (const auto& [i, j] : pairs) edges.push_back({i, j, w});
  } else {
    const auto& range = std::get<WeightRange<Scalar>>(preset.weight);
    if (!(range.min > Scalar(0)) || !(range.max >= range.min)) {
      throw ValidationError("preset: weight range requires 0 < min <= max");
    }
    std::mt19937_64 rng(range.seed);
    for (const auto& [i, j] : pairs) {
      const Scalar w = range.min + (range.max - range.min) * static_cast<Scalar>(detail::uniform01(rng));
      edges.push_back({i, j, w});
    }
  }
  return edges;
}

template <typename Scalar>
NetworkSpec<Scalar> make_network(const GraphPreset<Scalar>& preset, Scalar inertia, Scalar damping,
                                 Scalar kappa = Scalar(1)) {
  NetworkSpec<Scalar> spec;
  spec.n = preset.n;
  spec.edges = preset_edges(preset);
  spec.inertia = inertia;
  spec.damping = damping;
  spec.kappa = kappa;
  spec.validate();
  return spec;
}

}  // namespace swingbench
