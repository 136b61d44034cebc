#include "swingbench/sweeps.hpp"

#include <doctest.h>

#include <cmath>

#include "swingbench/csv.hpp"
#include "test_helpers.hpp"

using namespace swingbench;
using swingtest::RNG;

namespace {

NetworkSpec<double> k3(double M = 1.0, double D = 1.0) {
  GraphPreset<double> preset;
  preset.kind = PresetKind::Complete;
  preset.n = 3;
  return make_network(preset, M, D);
}

NetworkSpec<double> p3(double M = 1.0, double D = 1.0) {
  GraphPreset<double> preset;
  preset.kind = PresetKind::Path;
  preset.n = 3;
  return make_network(preset, M, D);  // lambda_2 = 1
}

}  // namespace

TEST_CASE("grids") {
  Grid<double> grid{0.1, 10.0, 5, true};
  const auto v = grid.values();
  REQUIRE(v.size() == 5);
  CHECK(v.front() == 0.1);
  CHECK(v.back() == 10.0);
  CHECK(v[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS((Grid<double>{0.0, 1.0, 5, true}.values()), std::invalid_argument);
  CHECK_THROWS_AS((Grid<double>{1.0, 1.0, 5, true}.values()), std::invalid_argument);
  CHECK_THROWS_AS((Grid<double>{0.1, 1.0, 1, true}.values()), std::invalid_argument);
}

TEST_CASE("root locus of the SMIB crosses from real to complex at M = D^2/(4B)") {
  // D = B = 1: boundary at M = 0.25; linear grid hits it exactly.
  Grid<double> grid{0.05, 0.5, 10, false};
  const auto table = root_locus(grid, 1.0, 1.0);
  REQUIRE(table.size() == 10);
  for (const auto& row : table) {
    if (row.inertia < 0.25) {
      CHECK(row.s1.imag() == 0.0);
      CHECK(row.s2.imag() == 0.0);
    } else if (row.inertia == 0.25) {
      CHECK(row.s1 == row.s2);  // double pole at -2
      CHECK(row.s1.real() == doctest::Approx(-2.0).epsilon(1e-12));
    } else {
      CHECK(row.s1.imag() > 0.0);
      CHECK(row.s2.imag() < 0.0);
    }
  }
}

TEST_CASE("root locus circles back toward the origin for large inertia") {
  Grid<double> grid{50.0, 100.0, 3, true};
  const auto table = root_locus(grid, 1.0, 1.0);
  for (const auto& row : table) {
    CHECK(std::abs(row.s1) < 0.25);
    CHECK(std::abs(row.s2) < 0.25);
  }
}

TEST_CASE("network root locus keeps the zero-mode pair {0, -D/M}") {
  Grid<double> grid{0.1, 10.0, 7, true};
  const auto table = root_locus(grid, p3(1.0, 2.0));
  for (const auto& row : table) {
    if (row.mode != 1) continue;
    CHECK(row.s1 == Complex<double>(0.0, 0.0));
    CHECK(row.s2.real() == doctest::Approx(-2.0 / row.inertia).epsilon(1e-12));
    CHECK(row.s2.imag() == 0.0);
  }
}

TEST_CASE("phase-output inertia sweep: flat until the kink, then increasing") {
  SweepPlan<double> plan;
  plan.spec = p3();  // lambda_2 = 1, D = 1: kink at 0.5
  plan.param = SweepParam::Inertia;
  plan.grid = {0.01, 10.0, 60, true};
  plan.output = OutputKind::PhaseCohesiveness;
  const auto table = norm_sweep(plan);

  bool kink_present = false;
  double prev = 0.0;
  for (const auto& row : table.rows) {
    REQUIRE(row.hinf_closed.has_value());
    if (row.value == 0.5) kink_present = true;
    if (row.value <= 0.5) {
      CHECK(*row.hinf_closed == doctest::Approx(1.0).epsilon(1e-12));
      // Equality at the kink takes the underdamped branch by the tie rule.
      CHECK(row.regime == (row.value < 0.5 ? Regime::OverdampedBranch : Regime::UnderdampedBranch));
    } else {
      CHECK(*row.hinf_closed >= prev * (1 - 1e-12));
    }
    prev = *row.hinf_closed;
    // Oracle rows agree with the closed form.
    if (row.hinf_oracle) CHECK(*row.hinf_oracle == doctest::Approx(*row.hinf_closed).epsilon(1e-8));
    if (row.h2_oracle) {
      // Oracle h2 matches the modal value (n-1)/(2D), not the printed n/(2D).
      CHECK(*row.h2_oracle == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
  CHECK(kink_present);  // exact boundary point inserted into the grid
}

TEST_CASE("phase h2 scales as 1/sqrt(D) along a damping sweep") {
  SweepPlan<double> plan;
  plan.spec = p3();
  plan.param = SweepParam::Damping;
  plan.grid = {0.1, 10.0, 20, true};
  plan.output = OutputKind::PhaseCohesiveness;
  plan.metrics.hinf_oracle = false;
  const auto table = norm_sweep(plan);
  for (std::size_t k = 1; k < table.rows.size(); ++k) {
    const double ratio = *table.rows[k].h2_closed / *table.rows[k - 1].h2_closed;
    const double expected = std::sqrt(table.rows[k - 1].value / table.rows[k].value);
    CHECK(ratio == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("frequency-output inertia sweep keeps hinf constant at 1/D") {
  SweepPlan<double> plan;
  plan.spec = k3(1.0, 2.0);
  plan.param = SweepParam::Inertia;
  plan.grid = {0.1, 10.0, 25, true};
  plan.output = OutputKind::Frequency;
  const auto table = norm_sweep(plan);
  for (const auto& row : table.rows) {
    CHECK(*row.hinf_closed == doctest::Approx(0.5).epsilon(1e-12));
    if (row.hinf_oracle) CHECK(*row.hinf_oracle == doctest::Approx(0.5).epsilon(1e-8));
  }
}

TEST_CASE("oracle stride restricts oracle metrics to a sub-grid with flags") {
  SweepPlan<double> plan;
  plan.spec = p3();
  plan.grid = {0.1, 10.0, 9, true};
  plan.output = OutputKind::PhaseCohesiveness;
  plan.oracle_stride = 3;
  const auto table = norm_sweep(plan);
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    CHECK(table.rows[k].oracle_row == (k % 3 == 0));
    CHECK(table.rows[k].h2_oracle.has_value() == (k % 3 == 0));
    CHECK(table.rows[k].h2_closed.has_value());
  }
}

TEST_CASE("combined sweep is monotone: h2 down, hinf up") {
  const auto rows = combined_sweep(k3(), 1.0, Grid<double>{0.1, 10.0, 25, true});
  for (std::size_t k = 1; k < rows.size(); ++k) {
    CHECK(rows[k].h2 < rows[k - 1].h2);
    CHECK(rows[k].hinf >= rows[k - 1].hinf * (1 - 1e-12));
  }
}

TEST_CASE("combined sweep approaches the phase-output norm as kappa -> 0") {
  const auto spec = k3();
  const auto rows = combined_sweep(spec, 1e-6, Grid<double>{0.1, 10.0, 8, true});
  for (const auto& row : rows) {
    const double phase = phase_output_norms(spec.n, row.inertia, spec.damping, 3.0).hinf.value;
    CHECK(row.hinf == doctest::Approx(phase).epsilon(1e-3));
  }
}

TEST_CASE("sweep tables are deterministic and thread-count independent") {
  SweepPlan<double> plan;
  plan.spec = k3();
  plan.grid = {0.1, 10.0, 16, true};
  plan.output = OutputKind::PhaseCohesiveness;
  plan.max_threads = 1;
  const std::string a = to_csv(norm_sweep(plan));
  const std::string b = to_csv(norm_sweep(plan));
  plan.max_threads = 4;
  const std::string c = to_csv(norm_sweep(plan));
  CHECK(a == b);
  CHECK(a == c);
}

TEST_CASE("shape_check verdicts") {
  const auto spec = p3();  // lambda_2 = 1
  const auto bounds = regime_boundaries(spec.damping, 1.0);

  SweepPlan<double> plan;
  plan.spec = spec;
  plan.grid = {0.01, 10.0, 200, true};
  plan.output = OutputKind::PhaseCohesiveness;
  plan.metrics.h2_oracle = false;
  plan.metrics.hinf_oracle = false;
  const auto table = norm_sweep(plan);
  const auto hinf = table.column(&SweepRow<double>::hinf_closed);
  const auto h2 = table.column(&SweepRow<double>::h2_closed);

  SUBCASE("phase h2 constant in M") {
    const auto v = shape_check(h2.x, h2.y, ShapeProperty::Constant, 0.01, 10.0);
    CHECK(v.pass);
    CHECK(v.max_violation <= v.tolerance);
  }
  SUBCASE("phase hinf nondecreasing in M") {
    CHECK(shape_check(hinf.x, hinf.y, ShapeProperty::Nondecreasing, 0.01, 10.0).pass);
  }
  SUBCASE("phase hinf convex between the kink and the inflection") {
    CHECK(shape_check(hinf.x, hinf.y, ShapeProperty::ConvexOnInterval, bounds.hinf_flat_until,
                      bounds.convexity_change_at)
              .pass);
  }
  SUBCASE("phase hinf concave beyond the inflection") {
    CHECK(shape_check(hinf.x, hinf.y, ShapeProperty::ConcaveOnInterval, bounds.convexity_change_at, 10.0).pass);
  }
  SUBCASE("convexity claims are rejected where they fail") {
    // The full range includes the flat segment, the convex branch, and the
    // concave branch, so neither verdict holds over all of it.
    CHECK_FALSE(shape_check(hinf.x, hinf.y, ShapeProperty::ConvexOnInterval, 0.01, 10.0).pass);
  }
  SUBCASE("sparse intervals are rejected") {
    CHECK_THROWS_AS(shape_check(hinf.x, hinf.y, ShapeProperty::ConvexOnInterval, 0.5, 0.5000001),
                    IntervalTooSparse);
  }
}

TEST_CASE("strictly-decreasing verdicts use the 1e-12-scale margin") {
  std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  std::vector<double> decreasing{4.0, 3.0, 2.0, 1.0};
  std::vector<double> flat{4.0, 4.0, 4.0, 4.0};
  CHECK(shape_check(x, decreasing, ShapeProperty::StrictlyDecreasing, 1.0, 4.0).pass);
  const auto v = shape_check(x, flat, ShapeProperty::StrictlyDecreasing, 1.0, 4.0);
  CHECK_FALSE(v.pass);
  CHECK(shape_check(x, flat, ShapeProperty::Nonincreasing, 1.0, 4.0).pass);
}

TEST_CASE("shape violations are reported with their magnitude") {
  std::vector<double> x{1.0, 2.0, 3.0};
  std::vector<double> spike{1.0, 5.0, 1.0};  // concave bump
  const auto v = shape_check(x, spike, ShapeProperty::ConvexOnInterval, 1.0, 3.0);
  CHECK_FALSE(v.pass);
  CHECK(v.max_violation == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(shape_check(x, spike, ShapeProperty::ConcaveOnInterval, 1.0, 3.0).pass);
}
