#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "swingbench/closed_form.hpp"
#include "swingbench/errors.hpp"
#include "swingbench/network.hpp"
#include "swingbench/oracles.hpp"
#include "swingbench/parallel.hpp"
#include "swingbench/swing_system.hpp"
#include "swingbench/types.hpp"

namespace swingbench {

enum class SweepParam { Inertia, Damping };

inline const char* sweep_param_name(SweepParam p) { return p == SweepParam::Inertia ? "M" : "D"; }

template <typename Scalar>
struct Grid {
  Scalar min = Scalar(0.1);
  Scalar max = Scalar(10);
  Index points = 200;
  bool log_spaced = true;

  std::vector<Scalar> values() const {
    if (!(min > Scalar(0)) || !(min < max) || points < 2) {
      throw std::invalid_argument("grid: need 0 < min < max and points >= 2");
    }
    std::vector<Scalar> out;
    out.reserve(static_cast<std::size_t>(points));
    if (log_spaced) {
      const Scalar ratio = std::log(max / min);
      for (Index k = 0; k < points; ++k) {
        out.push_back(min * std::exp(ratio * static_cast<Scalar>(k) / static_cast<Scalar>(points - 1)));
      }
    } else {
      const Scalar step = (max - min) / static_cast<Scalar>(points - 1);
      for (Index k = 0; k < points; ++k) out.push_back(min + step * static_cast<Scalar>(k));
    }
    out.front() = min;
    out.back() = max;
    return out;
  }
};

struct MetricSelection {
  bool h2_closed = true;
  bool h2_oracle = true;
  bool hinf_closed = true;
  bool hinf_oracle = true;
  bool zeta_min = false;
};

template <typename Scalar>
struct SweepPlan {
  NetworkSpec<Scalar> spec;
  SweepParam param = SweepParam::Inertia;
  Grid<Scalar> grid;
  OutputKind output = OutputKind::PhaseCohesiveness;
  MetricSelection metrics;
  /// Oracle metrics are evaluated every oracle_stride-th row (1 = all rows);
  /// rows carry an oracle_row flag.
  Index oracle_stride = 1;
  Scalar oracle_rel_tol = Scalar(1e-9);
  int max_threads = 1;
};

template <typename Scalar>
struct SweepRow {
  Scalar value = Scalar(0);
  std::optional<Scalar> h2_closed;
  std::optional<Scalar> h2_oracle;
  std::optional<Scalar> hinf_closed;
  std::optional<Scalar> hinf_oracle;
  std::optional<Scalar> zeta_min;
  Regime regime = Regime::NotApplicable;
  bool oracle_row = false;
};

template <typename Scalar>
struct SweepTable {
  std::string param;
  std::vector<SweepRow<Scalar>> rows;

  /// Parameter values paired with one metric column, skipping rows where the
  /// metric was not computed (keeps x and y aligned for shape checks).
  struct ColumnView {
    std::vector<Scalar> x;
    std::vector<Scalar> y;
  };
  ColumnView column(std::optional<Scalar> SweepRow<Scalar>::*member) const {
    ColumnView out;
    out.x.reserve(rows.size());
    out.y.reserve(rows.size());
    for (const auto& r : rows) {
      if (r.*member) {
        out.x.push_back(r.value);
        out.y.push_back(*(r.*member));
      }
    }
    return out;
  }
};

/// Parameter sweep of closed-form and oracle norms. The exact phase-output
/// H-infinity kink M = D^2 / (2 lambda_2) is inserted into inertia grids so
/// continuity is probed at the kink itself.
template <typename Scalar>
SweepTable<Scalar> norm_sweep(const SweepPlan<Scalar>& plan) {
  plan.spec.validate();
  const LaplacianSpectrum<Scalar> eig = spectrum(plan.spec);
  const Index n = plan.spec.n;
  const Scalar lambda2 = eig.eigenvalues(1);

  std::vector<Scalar> values = plan.grid.values();
  const bool phase_like =
      plan.output == OutputKind::PhaseCohesiveness || plan.output == OutputKind::EdgePhase;
  if (phase_like && plan.param == SweepParam::Inertia) {
    const Scalar kink = plan.spec.damping * plan.spec.damping / (Scalar(2) * lambda2);
    if (kink > plan.grid.min && kink < plan.grid.max) {
      values.push_back(kink);
      std::sort(values.begin(), values.end());
      values.erase(std::unique(values.begin(), values.end()), values.end());
    }
  }

  SweepTable<Scalar> table;
  table.param = sweep_param_name(plan.param);
  table.rows.resize(values.size());

  parallel_for(values.size(), plan.max_threads, [&](std::size_t k) {
    SweepRow<Scalar>& row = table.rows[k];
    row.value = values[k];
    const Scalar M = plan.param == SweepParam::Inertia ? values[k] : plan.spec.inertia;
    const Scalar D = plan.param == SweepParam::Damping ? values[k] : plan.spec.damping;

    if (plan.metrics.h2_closed || plan.metrics.hinf_closed) {
      if (phase_like) {
        const auto norms = phase_output_norms(n, M, D, lambda2);
        if (plan.metrics.h2_closed) row.h2_closed = norms.h2.value;
        if (plan.metrics.hinf_closed) {
          row.hinf_closed = norms.hinf.value;
          row.regime = norms.hinf.regime;
        }
      } else if (plan.output == OutputKind::Frequency) {
        const auto norms = frequency_output_norms(n, M, D);
        if (plan.metrics.h2_closed) row.h2_closed = norms.h2.value;
        if (plan.metrics.hinf_closed) row.hinf_closed = norms.hinf.value;
      }
      // Combined: no closed form exists; columns stay empty.
    }
    if (plan.metrics.zeta_min) {
      row.zeta_min = min_damping_ratio(M, D, eig.eigenvalues(n - 1));
    }

    row.oracle_row = (static_cast<Index>(k) % std::max<Index>(plan.oracle_stride, 1)) == 0;
    if (row.oracle_row && (plan.metrics.h2_oracle || plan.metrics.hinf_oracle)) {
      const auto modes = modes_from_lambdas(eig.eigenvalues, M, D, plan.output, plan.spec.kappa);
      if (plan.metrics.h2_oracle) row.h2_oracle = h2_gramian(modes).h2;
      if (plan.metrics.hinf_oracle) row.hinf_oracle = hinf_search(modes, plan.oracle_rel_tol).hinf;
    }
  });
  return table;
}

// ---------------------------------------------------------------------------
// Root locus
// ---------------------------------------------------------------------------

template <typename Scalar>
struct RootLocusRow {
  Scalar inertia = Scalar(0);
  int mode = 1;
  Complex<Scalar> s1;
  Complex<Scalar> s2;
};

template <typename Scalar>
using RootLocusTable = std::vector<RootLocusRow<Scalar>>;

/// Closed-form poles per inertia value; rows ordered by M, then mode.
template <typename Scalar>
RootLocusTable<Scalar> root_locus(const Grid<Scalar>& m_grid, Scalar damping, const VectorX<Scalar>& lambdas) {
  const auto values = m_grid.values();
  RootLocusTable<Scalar> table;
  table.reserve(values.size() * static_cast<std::size_t>(lambdas.size()));
  for (const Scalar M : values) {
    for (Index k = 0; k < lambdas.size(); ++k) {
      RootLocusRow<Scalar> row;
      row.inertia = M;
      row.mode = static_cast<int>(k) + 1;
      std::tie(row.s1, row.s2) = mode_poles(M, damping, lambdas(k));
      table.push_back(row);
    }
  }
  return table;
}

template <typename Scalar>
RootLocusTable<Scalar> root_locus(const Grid<Scalar>& m_grid, Scalar damping, Scalar susceptance) {
  VectorX<Scalar> lambdas(1);
  lambdas << susceptance;
  return root_locus(m_grid, damping, lambdas);
}

template <typename Scalar>
RootLocusTable<Scalar> root_locus(const Grid<Scalar>& m_grid, const NetworkSpec<Scalar>& spec) {
  return root_locus(m_grid, spec.damping, spectrum(spec).eigenvalues);
}

// ---------------------------------------------------------------------------
// Combined-output sweep (oracle-only; no closed form exists)
// ---------------------------------------------------------------------------

template <typename Scalar>
struct CombinedRow {
  Scalar inertia = Scalar(0);
  Scalar h2 = Scalar(0);
  Scalar hinf = Scalar(0);
};

template <typename Scalar>
std::vector<CombinedRow<Scalar>> combined_sweep(const NetworkSpec<Scalar>& spec, Scalar kappa,
                                                const Grid<Scalar>& m_grid, Scalar rel_tol = Scalar(1e-9),
                                                int max_threads = 1) {
  if (!(kappa > Scalar(0))) throw ValidationError("combined_sweep: kappa must be > 0");
  const LaplacianSpectrum<Scalar> eig = spectrum(spec);
  const auto values = m_grid.values();
  std::vector<CombinedRow<Scalar>> rows(values.size());
  parallel_for(values.size(), max_threads, [&](std::size_t k) {
    const auto modes = modes_from_lambdas(eig.eigenvalues, values[k], spec.damping, OutputKind::Combined, kappa);
    rows[k].inertia = values[k];
    rows[k].h2 = h2_gramian(modes).h2;
    rows[k].hinf = hinf_search(modes, rel_tol).hinf;
  });
  return rows;
}

// ---------------------------------------------------------------------------
// Shape checks
// ---------------------------------------------------------------------------

enum class ShapeProperty {
  Nondecreasing,
  Nonincreasing,
  StrictlyDecreasing,
  Constant,
  ConvexOnInterval,
  ConcaveOnInterval
};

inline const char* shape_property_name(ShapeProperty p) {
  switch (p) {
    case ShapeProperty::Nondecreasing:
      return "nondecreasing";
    case ShapeProperty::Nonincreasing:
      return "nonincreasing";
    case ShapeProperty::StrictlyDecreasing:
      return "strictly-decreasing";
    case ShapeProperty::Constant:
      return "constant";
    case ShapeProperty::ConvexOnInterval:
      return "convex-on-interval";
    default:
      return "concave-on-interval";
  }
}

template <typename Scalar>
struct ShapeVerdict {
  ShapeProperty property = ShapeProperty::Constant;
  Scalar interval_lo = Scalar(0);
  Scalar interval_hi = Scalar(0);
  bool pass = false;
  Scalar max_violation = Scalar(0);  // raw magnitude of the worst violation
  Scalar tolerance = Scalar(0);
  Index points_used = 0;
};

/// Finite-difference shape verdict on the rows of a sweep table restricted
/// to [lo, hi]. Convexity uses chord tests (valid on non-uniform grids) with
/// tolerance 1e-8 x column scale; monotonic verdicts use the same tolerance;
/// "strictly decreasing" requires a per-step decrease of 1e-12 x scale.
/// Verdicts never extrapolate outside the grid.
template <typename Scalar>
ShapeVerdict<Scalar> shape_check(const std::vector<Scalar>& x, const std::vector<Scalar>& y,
                                 ShapeProperty property, Scalar lo, Scalar hi) {
  if (x.size() != y.size()) throw std::invalid_argument("shape_check: column size mismatch");
  std::vector<Scalar> xs, ys;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] >= lo && x[k] <= hi) {
      xs.push_back(x[k]);
      ys.push_back(y[k]);
    }
  }
  const bool second_order =
      property == ShapeProperty::ConvexOnInterval || property == ShapeProperty::ConcaveOnInterval;
  const std::size_t needed = second_order ? 3 : 2;
  if (xs.size() < needed) {
    throw IntervalTooSparse("shape_check: " + std::to_string(xs.size()) + " grid points inside [" +
                            std::to_string(static_cast<double>(lo)) + ", " +
                            std::to_string(static_cast<double>(hi)) + "], need >= " + std::to_string(needed));
  }

  Scalar scale = Scalar(0);
  for (const Scalar v : ys) scale = std::max(scale, std::abs(v));
  scale = std::max(scale, std::numeric_limits<Scalar>::min());

  ShapeVerdict<Scalar> out;
  out.property = property;
  out.interval_lo = lo;
  out.interval_hi = hi;
  out.points_used = static_cast<Index>(xs.size());
  out.tolerance = Scalar(1e-8) * scale;

  Scalar violation = Scalar(0);
  switch (property) {
    case ShapeProperty::Nondecreasing:
      for (std::size_t k = 0; k + 1 < ys.size(); ++k) violation = std::max(violation, ys[k] - ys[k + 1]);
      break;
    case ShapeProperty::Nonincreasing:
      for (std::size_t k = 0; k + 1 < ys.size(); ++k) violation = std::max(violation, ys[k + 1] - ys[k]);
      break;
    case ShapeProperty::StrictlyDecreasing: {
      const Scalar margin = Scalar(1e-12) * scale;
      out.tolerance = margin;
      for (std::size_t k = 0; k + 1 < ys.size(); ++k) {
        violation = std::max(violation, ys[k + 1] - (ys[k] - margin));
      }
      // pass iff every step decreases by at least the margin
      out.max_violation = std::max(violation, Scalar(0));
      out.pass = violation <= Scalar(0);
      return out;
    }
    case ShapeProperty::Constant:
      for (const Scalar v : ys) violation = std::max(violation, std::abs(v - ys.front()));
      break;
    case ShapeProperty::ConvexOnInterval:
    case ShapeProperty::ConcaveOnInterval:
      for (std::size_t k = 1; k + 1 < ys.size(); ++k) {
        const Scalar t = (xs[k] - xs[k - 1]) / (xs[k + 1] - xs[k - 1]);
        const Scalar chord = ys[k - 1] + t * (ys[k + 1] - ys[k - 1]);
        const Scalar excess = property == ShapeProperty::ConvexOnInterval ? ys[k] - chord : chord - ys[k];
        violation = std::max(violation, excess);
      }
      break;
  }
  out.max_violation = std::max(violation, Scalar(0));
  out.pass = out.max_violation <= out.tolerance;
  return out;
}

}  // namespace swingbench
