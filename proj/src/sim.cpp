#include "qio/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace qio {

std::size_t Trajectory::column_index(const std::string& label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw DimensionError("trajectory has no column " + label);
  return static_cast<std::size_t>(it - labels.begin());
}

Vector Trajectory::column(const std::string& label) const { return values.col(column_index(label)); }

Vector uniform_grid(double t_end, std::size_t intervals, double t0) {
  if (intervals == 0) throw DimensionError("time grid needs at least one interval");
  if (!(t_end > t0)) throw DimensionError("time grid end must exceed its start");
  Vector out(intervals + 1);
  for (std::size_t k = 0; k <= intervals; ++k)
    out[k] = t0 + (t_end - t0) * static_cast<double>(k) / static_cast<double>(intervals);
  return out;
}

namespace {

void check_times(std::span<const double> times) {
  if (times.empty()) throw DimensionError("empty time grid");
  for (double t : times)
    if (!std::isfinite(t)) throw DimensionError("non-finite sample time");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw DimensionError("sample times must be strictly ascending");
}

std::size_t substeps(double interval, double h) {
  const double n = std::ceil(interval / h * (1.0 - 1e-12));
  if (!(n < 1e9)) throw IntegrationError("step size underflow: interval needs more than 1e9 RK4 steps");
  return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

}  // namespace

double rk4_step(std::span<const double> times, double scale) {
  double h = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < times.size(); ++k) h = std::min(h, (times[k] - times[k - 1]) / 20.0);
  if (scale > 0.0) h = std::min(h, 0.1 / scale);
  if (!std::isfinite(h)) h = 1.0;
  if (!(h > 0.0) || h < 1e-300) throw IntegrationError("step size underflow");
  return h;
}

Trajectory integrate_linear(const Matrix& a, std::span<const double> x0, std::span<const double> times,
                            std::vector<std::string> labels) {
  if (!a.is_square() || a.rows() != x0.size())
    throw DimensionError("integrate_linear: state matrix and initial vector disagree");
  if (!labels.empty() && labels.size() != x0.size())
    throw DimensionError("integrate_linear: label count differs from state dimension");
  check_times(times);
  const std::size_t n = x0.size();
  if (labels.empty())
    for (std::size_t j = 0; j < n; ++j) labels.push_back("x" + std::to_string(j + 1));

  Trajectory out{Vector(times.begin(), times.end()), std::move(labels), Matrix(times.size(), n)};
  Vector x(x0.begin(), x0.end());
  auto record = [&](std::size_t row) {
    for (std::size_t j = 0; j < n; ++j) out.values(row, j) = x[j];
  };
  record(0);
  const double hmax = rk4_step(times, inf_norm(a));
  Vector k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (std::size_t row = 1; row < times.size(); ++row) {
    const double span = times[row] - times[row - 1];
    const std::size_t steps = substeps(span, hmax);
    const double h = span / static_cast<double>(steps);
    for (std::size_t s = 0; s < steps; ++s) {
      k1 = a * x;
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
      k2 = a * tmp;
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
      k3 = a * tmp;
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
      k4 = a * tmp;
      for (std::size_t i = 0; i < n; ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    for (double v : x)
      if (!std::isfinite(v)) throw IntegrationError("trajectory became non-finite");
    record(row);
  }
  return out;
}

Trajectory simulate_interconnected(const InterconnectedModel& m, std::span<const double> x1_0,
                                   std::span<const double> x2_0, const Matrix& state_map,
                                   std::span<const double> times) {
  const std::size_t n1 = m.sys1.order(), n2 = m.sys2.order();
  if (x1_0.size() != n1) throw DimensionError("initial vector does not match the interest block");
  Vector x2;
  if (state_map.empty()) {
    x2.assign(x2_0.begin(), x2_0.end());
  } else {
    if (state_map.cols() != x2_0.size())
      throw DimensionError("state map columns do not match the environment initial vector");
    x2 = state_map * x2_0;
  }
  if (x2.size() != n2) throw DimensionError("environment initial vector does not match its model order");
  if (m.sys1.inputs() != m.sys2.outputs() || m.sys2.inputs() != m.sys1.outputs())
    throw DimensionError("interconnected systems have mismatched ports");

  Vector x0(x1_0.begin(), x1_0.end());
  x0.insert(x0.end(), x2.begin(), x2.end());
  std::vector<std::string> labels = m.sys1.labels;
  if (labels.empty())
    for (std::size_t j = 0; j < n1; ++j) labels.push_back("x" + std::to_string(j + 1));
  for (std::size_t j = 0; j < n2; ++j) labels.push_back("env" + std::to_string(j + 1));
  Trajectory full = integrate_linear(m.reassemble(), x0, times, labels);

  std::vector<std::size_t> rows(times.size()), cols(n1);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  for (std::size_t j = 0; j < n1; ++j) cols[j] = j;
  full.values = full.values.select(rows, cols);
  full.labels.resize(n1);
  return full;
}

Trajectory oracle_master_equation(const LindbladModel& m, const DensityMatrix& rho0,
                                  std::span<const double> times, const VariableSet& vars) {
  if (m.n_sites() > kOracleMaxSites)
    throw DimensionError("oracle limited to " + std::to_string(kOracleMaxSites) + " qubits");
  if (rho0.n_sites() != m.n_sites()) throw DimensionError("state and model act on different registers");
  if (!vars.empty() && vars.n_sites() != m.n_sites())
    throw DimensionError("variables and model act on different registers");
  check_times(times);

  const MasterEquationOracle oracle(m);
  Trajectory out{Vector(times.begin(), times.end()), vars.labels(), Matrix(times.size(), vars.size())};
  ComplexMatrix rho = rho0.entries();
  auto record = [&](std::size_t row) {
    for (std::size_t j = 0; j < vars.size(); ++j) out.values(row, j) = expectation(vars[j], rho);
  };
  record(0);
  const double hmax = rk4_step(times, oracle.rate_scale());
  const std::size_t dim = rho.rows();
  for (std::size_t row = 1; row < times.size(); ++row) {
    const double span = times[row] - times[row - 1];
    const std::size_t steps = substeps(span, hmax);
    const double h = span / static_cast<double>(steps);
    for (std::size_t s = 0; s < steps; ++s) {
      const ComplexMatrix k1 = oracle.rhs(rho);
      const ComplexMatrix k2 = oracle.rhs(rho + k1 * std::complex<double>(0.5 * h));
      const ComplexMatrix k3 = oracle.rhs(rho + k2 * std::complex<double>(0.5 * h));
      const ComplexMatrix k4 = oracle.rhs(rho + k3 * std::complex<double>(h));
      const std::complex<double> w(h / 6.0);
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
          rho(i, j) += w * (k1(i, j) + 2.0 * k2(i, j) + 2.0 * k3(i, j) + k4(i, j));
      std::complex<double> tr = 0.0;
      for (std::size_t i = 0; i < dim; ++i) tr += rho(i, i);
      if (std::abs(tr - 1.0) > 1e-12) rho *= 1.0 / tr;
    }
    if (!all_finite(rho)) throw IntegrationError("density matrix became non-finite");
    record(row);
  }
  if (!is_positive_semidefinite(rho, 1e-6))
    throw IntegrationError("density matrix lost positivity beyond 1e-6");
  return out;
}

double max_abs_value(const Trajectory& t) { return max_abs(t.values); }

void require_expectation_bound(const Trajectory& t, double slack) {
  for (std::size_t i = 0; i < t.values.rows(); ++i)
    for (std::size_t j = 0; j < t.values.cols(); ++j)
      if (std::abs(t.values(i, j)) > 1.0 + slack)
        throw IntegrationError("expectation of " + t.labels[j] + " left [-1, 1] at t = " +
                               std::to_string(t.times[i]));
}

double relative_l2_error(std::span<const double> a, std::span<const double> reference) {
  if (a.size() != reference.size()) throw DimensionError("compared series differ in length");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - reference[i]) * (a[i] - reference[i]);
    den += reference[i] * reference[i];
  }
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num / den);
}

namespace {

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

void write_csv(std::ostream& os, const Trajectory& t) {
  os << 't';
  for (const auto& l : t.labels) os << ',' << l;
  os << '\n';
  for (std::size_t i = 0; i < t.times.size(); ++i) {
    os << fmt12(t.times[i]);
    for (std::size_t j = 0; j < t.labels.size(); ++j) os << ',' << fmt12(t.values(i, j));
    os << '\n';
  }
}

void write_svg(std::ostream& os, std::span<const double> times, std::span<const SvgSeries> series,
               const std::string& title) {
  constexpr double kW = 640, kH = 400, kLeft = 60, kRight = 150, kTop = 30, kBottom = 40;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  if (times.empty()) throw DimensionError("nothing to plot");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : series) {
    if (s.values.size() != times.size()) throw DimensionError("series " + s.label + " has wrong length");
    for (double v : s.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double t0 = times.front(), t1 = times.back() > t0 ? times.back() : t0 + 1.0;
  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
  auto px = [&](double t) { return kLeft + (t - t0) / (t1 - t0) * pw; };
  auto py = [&](double v) { return kTop + (hi - v) / (hi - lo) * ph; };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (!title.empty()) os << "<text x=\"" << kLeft << "\" y=\"20\">" << title << "</text>\n";
  os << "<text x=\"" << kLeft << "\" y=\"" << kH - 12 << "\">" << fmt12(t0) << "</text>\n";
  os << "<text x=\"" << kLeft + pw << "\" y=\"" << kH - 12 << "\" text-anchor=\"end\">" << fmt12(t1)
     << "</text>\n";
  os << "<text x=\"" << kLeft - 6 << "\" y=\"" << kTop + 4 << "\" text-anchor=\"end\">" << fmt12(hi)
     << "</text>\n";
  os << "<text x=\"" << kLeft - 6 << "\" y=\"" << kTop + ph << "\" text-anchor=\"end\">" << fmt12(lo)
     << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kColors[k % std::size(kColors)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < times.size(); ++i)
      os << (i ? " " : "") << fmt12(px(times[i])) << ',' << fmt12(py(series[k].values[i]));
    os << "\"/>\n";
    const double ly = kTop + 16.0 * static_cast<double>(k + 1);
    os << "<line x1=\"" << kLeft + pw + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kLeft + pw + 30
       << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << kLeft + pw + 36 << "\" y=\"" << ly << "\">" << series[k].label << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace qio
