#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qio/eom.hpp"
#include "qio/linalg.hpp"
#include "qio/oracle.hpp"
#include "qio/state_space.hpp"

namespace qio {

/// Sampled solution: values(i, j) is variable j at times[i].
struct Trajectory {
  Vector times;
  std::vector<std::string> labels;
  Matrix values;

  std::size_t column_index(const std::string& label) const;
  Vector column(const std::string& label) const;
  Vector column(std::size_t j) const { return values.col(j); }
};

/// Uniform grid t0, t0 + dt, ..., t_end (inclusive).
Vector uniform_grid(double t_end, std::size_t intervals, double t0 = 0.0);

/// Step size used by integrate_linear: min spacing / 20, capped so that
/// scale * h <= 0.1.
double rk4_step(std::span<const double> times, double scale);

/// Fixed-step RK4 for x' = a x, sampled at `times`. Each sampling interval is
/// split into equal substeps no longer than rk4_step(times, ||a||_inf).
Trajectory integrate_linear(const Matrix& a, std::span<const double> x0, std::span<const double> times,
                            std::vector<std::string> labels = {});

/// Integrates the reassembled closed loop from (x1_0, state_map * x2_0) and
/// returns the sys1 variables. An empty state_map means the identity.
Trajectory simulate_interconnected(const InterconnectedModel& m, std::span<const double> x1_0,
                                   std::span<const double> x2_0, const Matrix& state_map,
                                   std::span<const double> times);

/// Direct RK4 integration of the master equation in the 2^n-dimensional
/// Hilbert space, reporting Tr(P rho) for each requested string.
Trajectory oracle_master_equation(const LindbladModel& m, const DensityMatrix& rho0,
                                  std::span<const double> times, const VariableSet& vars);

/// Largest |value| over a trajectory.
double max_abs_value(const Trajectory& t);

/// Throws IntegrationError when a Pauli expectation leaves [-1 - slack, 1 + slack].
void require_expectation_bound(const Trajectory& t, double slack = 1e-6);

/// Relative L2 distance of one column: ||a - b|| / ||b||, sampled on the shared grid.
double relative_l2_error(std::span<const double> a, std::span<const double> reference);

/// CSV with header `t,<label>,...` and 12 significant digits.
void write_csv(std::ostream& os, const Trajectory& t);

/// Line plot of selected columns (all when empty) as a standalone SVG document.
struct SvgSeries {
  std::string label;
  Vector values;
};
void write_svg(std::ostream& os, std::span<const double> times, std::span<const SvgSeries> series,
               const std::string& title = {});

}  // namespace qio
