#include "swingbench/network.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "test_helpers.hpp"

using namespace swingbench;
using swingtest::RNG;

namespace {

NetworkSpec<double> k3() {
  GraphPreset<double> preset;
  preset.kind = PresetKind::Complete;
  preset.n = 3;
  return make_network(preset, 1.0, 1.0);
}

NetworkSpec<double> p3() {
  GraphPreset<double> preset;
  preset.kind = PresetKind::Path;
  preset.n = 3;
  return make_network(preset, 1.0, 1.0);
}

}  // namespace

TEST_CASE("laplacian of K3 with unit weights") {
  const auto L = build_laplacian(k3());
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 3; ++j) {
      CHECK(L(i, j) == (i == j ? 2.0 : -1.0));
    }
  }
}

TEST_CASE("laplacian of a single weighted edge") {
  NetworkSpec<double> spec;
  spec.n = 2;
  spec.edges = {{0, 1, 2.0}};
  const auto L = build_laplacian(spec);
  CHECK(L(0, 0) == 2.0);
  CHECK(L(0, 1) == -2.0);
  CHECK(L(1, 0) == -2.0);
  CHECK(L(1, 1) == 2.0);
}

TEST_CASE("laplacian row sums vanish") {
  const auto L = build_laplacian(p3());
  for (Index i = 0; i < 3; ++i) {
    CHECK(std::abs(L.row(i).sum()) < 1e-15);
  }
}

TEST_CASE("incidence of a single edge") {
  NetworkSpec<double> spec;
  spec.n = 2;
  spec.edges = {{0, 1, 1.0}};
  const auto inc = build_incidence(spec);
  CHECK(inc.incidence(0, 0) == 1.0);
  CHECK(inc.incidence(1, 0) == -1.0);
  CHECK(inc.weights(0) == 1.0);
}

TEST_CASE("incidence factorization reconstructs the K3 laplacian exactly") {
  const auto spec = k3();
  const auto inc = build_incidence(spec);
  const MatrixX<double> product = inc.incidence * inc.weights.asDiagonal() * inc.incidence.transpose();
  CHECK(((product - build_laplacian(spec)).cwiseAbs().maxCoeff()) < 1e-12);
}

TEST_CASE("incidence orientation puts +1 at the lower node index regardless of edge order") {
  NetworkSpec<double> spec;
  spec.n = 3;
  spec.edges = {{1, 0, 1.0}, {2, 1, 2.0}};
  const auto inc = build_incidence(spec);
  CHECK(inc.incidence(0, 0) == 1.0);
  CHECK(inc.incidence(1, 0) == -1.0);
  CHECK(inc.incidence(1, 1) == 1.0);
  CHECK(inc.incidence(2, 1) == -1.0);
}

TEST_CASE("empty edge set is rejected as disconnected at validation") {
  NetworkSpec<double> spec;
  spec.n = 2;
  CHECK_THROWS_AS(build_incidence(spec), DisconnectedGraph);
}

TEST_CASE("spectrum of K3") {
  const auto eig = spectrum(k3());
  CHECK(eig.eigenvalues(0) == 0.0);  // clamped exactly
  CHECK(eig.eigenvalues(1) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(eig.eigenvalues(2) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("spectrum of the 3-path matches the trigonometric closed form") {
  // Oracle: eigenvalues of P_n are 4 sin^2(k pi / (2n)).
  const auto eig = spectrum(p3());
  for (Index k = 0; k < 3; ++k) {
    const double expected = 4.0 * std::pow(std::sin(static_cast<double>(k) * std::numbers::pi / 6.0), 2);
    CHECK(eig.eigenvalues(k) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("cycle and star spectra match their closed forms") {
  GraphPreset<double> preset;
  preset.kind = PresetKind::Cycle;
  preset.n = 4;
  const auto c4 = spectrum(make_network(preset, 1.0, 1.0));
  // C_n eigenvalues 2 - 2 cos(2 pi k / n) = {0, 2, 2, 4} for n = 4.
  CHECK(c4.eigenvalues(0) == 0.0);
  CHECK(c4.eigenvalues(1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(c4.eigenvalues(2) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(c4.eigenvalues(3) == doctest::Approx(4.0).epsilon(1e-12));

  preset.kind = PresetKind::Star;
  preset.n = 5;
  const auto s5 = spectrum(make_network(preset, 1.0, 1.0));
  CHECK(s5.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s5.eigenvalues(3) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s5.eigenvalues(4) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("two disjoint edges are disconnected") {
  NetworkSpec<double> spec;
  spec.n = 4;
  spec.edges = {{0, 1, 1.0}, {2, 3, 1.0}};
  CHECK_THROWS_AS(spec.validate(), DisconnectedGraph);

  // The numerical lambda_2 check catches the same condition on a raw matrix.
  MatrixX<double> L = MatrixX<double>::Zero(4, 4);
  L(0, 0) = L(1, 1) = L(2, 2) = L(3, 3) = 1.0;
  L(0, 1) = L(1, 0) = L(2, 3) = L(3, 2) = -1.0;
  CHECK_THROWS_AS(spectrum(L), DisconnectedGraph);
}

TEST_CASE("validation rejects malformed specs") {
  NetworkSpec<double> spec;
  spec.n = 3;
  spec.edges = {{0, 1, 1.0}, {1, 2, 1.0}};

  SUBCASE("baseline is valid") { CHECK_NOTHROW(spec.validate()); }
  SUBCASE("n below 2") {
    spec.n = 1;
    spec.edges.clear();
    CHECK_THROWS_AS(spec.validate(), ValidationError);
  }
  SUBCASE("self loop") {
    spec.edges.push_back({2, 2, 1.0});
    CHECK_THROWS_AS(spec.validate(), ValidationError);
  }
  SUBCASE("index out of range") {
    spec.edges.push_back({0, 3, 1.0});
    CHECK_THROWS_AS(spec.validate(), ValidationError);
  }
  SUBCASE("duplicate undirected edge") {
    spec.edges.push_back({1, 0, 2.0});
    CHECK_THROWS_AS(spec.validate(), ValidationError);
  }
  SUBCASE("nonpositive susceptance") {
    spec.edges[0].b = 0.0;
    CHECK_THROWS_AS(spec.validate(), ValidationError);
  }
  SUBCASE("nonpositive inertia") {
    spec.inertia = 0.0;
    CHECK_THROWS_AS(spec.validate(), ValidationError);
  }
  SUBCASE("nonpositive damping") {
    spec.damping = -1.0;
    CHECK_THROWS_AS(spec.validate(), ValidationError);
  }
  SUBCASE("nonpositive kappa") {
    spec.kappa = 0.0;
    CHECK_THROWS_AS(spec.validate(), ValidationError);
  }
}

TEST_CASE("random specs satisfy the spectral invariants") {
  RNG rng(20240811);
  for (int trial = 0; trial < 40; ++trial) {
    const auto spec = swingtest::random_connected_spec(rng, 30);
    const auto L = build_laplacian(spec);
    const auto eig = spectrum(L);
    const Index n = spec.n;

    // Eigenvalues nonnegative, trace identity sum(lambda) = 2 sum(b).
    double weight_sum = 0.0;
    for (const auto& e : spec.edges) weight_sum += e.b;
    CHECK(eig.eigenvalues.minCoeff() >= 0.0);
    CHECK(eig.eigenvalues.sum() == doctest::Approx(2.0 * weight_sum).epsilon(1e-10));
    CHECK(eig.eigenvalues.sum() == doctest::Approx(L.trace()).epsilon(1e-10));

    // Orthogonal basis diagonalizing L; first column parallel to ones.
    const MatrixX<double> vtv = eig.basis.transpose() * eig.basis;
    CHECK((vtv - MatrixX<double>::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
    MatrixX<double> diag = eig.basis.transpose() * L * eig.basis;
    diag.diagonal().setZero();
    CHECK(diag.cwiseAbs().maxCoeff() < 1e-9 * std::max(1.0, eig.eigenvalues.maxCoeff()));
    const VectorX<double> ones = VectorX<double>::Ones(n) / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(std::abs(eig.basis.col(0).dot(ones)) - 1.0) < 1e-10);

    // Incidence factorization reproduces L.
    const auto inc = build_incidence(spec);
    const MatrixX<double> product = inc.incidence * inc.weights.asDiagonal() * inc.incidence.transpose();
    CHECK((product - L).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, L.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("connected presets clear the connectivity check for n >= 2") {
  for (const auto kind : {PresetKind::Complete, PresetKind::Path, PresetKind::Cycle, PresetKind::Star}) {
    for (Index n = 2; n <= 8; ++n) {
      if (kind == PresetKind::Cycle && n < 3) continue;
      GraphPreset<double> preset;
      preset.kind = kind;
      preset.n = n;
      CHECK_NOTHROW(spectrum(make_network(preset, 1.0, 1.0)));
    }
  }
}

TEST_CASE("erdos-renyi presets are deterministic in the seed and connected") {
  GraphPreset<double> preset;
  preset.kind = PresetKind::ErdosRenyi;
  preset.n = 20;
  preset.p = 0.3;
  preset.seed = 7;
  preset.weight = WeightRange<double>{0.5, 2.0, 11};

  const auto a = preset_edges(preset);
  const auto b = preset_edges(preset);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].i == b[k].i);
    CHECK(a[k].j == b[k].j);
    CHECK(a[k].b == b[k].b);
  }
  CHECK_NOTHROW(make_network(preset, 1.0, 1.0).validate());

  preset.seed = 8;
  const auto c = preset_edges(preset);
  bool differs = c.size() != a.size();
  for (std::size_t k = 0; !differs && k < c.size(); ++k) {
    differs = c[k].i != a[k].i || c[k].j != a[k].j || c[k].b != a[k].b;
  }
  CHECK(differs);
}

TEST_CASE("lambda_1 is clamped to exactly zero") {
  RNG rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const auto eig = spectrum(swingtest::random_connected_spec(rng, 12));
    CHECK(eig.eigenvalues(0) == 0.0);
  }
}
