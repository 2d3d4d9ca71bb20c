#include "qio/mor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qio {

Matrix controllability_gramian(const StateSpaceModel& s, const Tolerances& tol) {
  return lyapunov_solve(s.a, s.b * s.b.transpose(), tol);
}

Matrix observability_gramian(const StateSpaceModel& s, const Tolerances& tol) {
  return lyapunov_solve(s.a.transpose(), s.c.transpose() * s.c, tol);
}

BalancedRealization balance(const StateSpaceModel& s, const Tolerances& tol) {
  s.validate();
  require_hurwitz(s.a, "balance: state matrix", tol);
  const std::size_t n = s.order();
  const Matrix lc = symmetric_psd_sqrt_factor(controllability_gramian(s, tol), tol.psd_drop, tol);
  const Matrix lo = symmetric_psd_sqrt_factor(observability_gramian(s, tol), tol.psd_drop, tol);

  BalancedRealization out;
  out.original_order = n;
  std::size_t r = 0;
  SvdResult d;
  if (lc.cols() > 0 && lo.cols() > 0) {
    d = svd(lo.transpose() * lc, tol);
    const double s1 = d.s.front();
    for (double sigma : d.s) {
      if (s1 > 0.0 && sigma > tol.minimality * s1) {
        out.hankel.push_back(sigma);
        ++r;
      } else {
        out.removed_hankel.push_back(sigma);
      }
    }
  }
  // Directions lost in the gramian factors carry no resolvable Hankel value.
  while (out.hankel.size() + out.removed_hankel.size() < n) out.removed_hankel.push_back(0.0);
  out.t = Matrix(r, n);
  out.t_inv = Matrix(n, r);
  if (r > 0) {
    const Matrix lot = lo.transpose();
    for (std::size_t k = 0; k < r; ++k) {
      const double w = 1.0 / std::sqrt(out.hankel[k]);
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < lot.rows(); ++i) acc += d.u(i, k) * lot(i, j);
        out.t(k, j) = w * acc;
      }
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t c = 0; c < lc.cols(); ++c) acc += lc(i, c) * d.v(c, k);
        out.t_inv(i, k) = w * acc;
      }
    }
  }
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < r; ++k) labels.push_back("balanced" + std::to_string(k + 1));
  out.balanced = StateSpaceModel(out.t * s.a * out.t_inv, out.t * s.b, s.c * out.t_inv, labels);
  return out;
}

ReducedModel truncate(const BalancedRealization& b, std::size_t k, const Tolerances& tol) {
  const std::size_t order = b.order();
  if (k < 1 || k > order)
    throw DimensionError("truncation order " + std::to_string(k) + " outside 1.." +
                         std::to_string(order));
  if (k < order && b.hankel[k - 1] < (1.0 + tol.degenerate_gap) * b.hankel[k]) {
    throw DegenerateSplitError("order " + std::to_string(k) +
                                   " splits a cluster of nearly equal Hankel values; choose a "
                                   "different order",
                               k);
  }
  std::vector<std::size_t> keep(k);
  std::iota(keep.begin(), keep.end(), std::size_t{0});
  std::vector<std::size_t> all_in(b.balanced.inputs()), all_out(b.balanced.outputs());
  std::iota(all_in.begin(), all_in.end(), std::size_t{0});
  std::iota(all_out.begin(), all_out.end(), std::size_t{0});
  ReducedModel r;
  r.order = k;
  std::vector<std::string> labels(b.balanced.labels.begin(), b.balanced.labels.begin() + k);
  r.model = StateSpaceModel(b.balanced.a.select(keep, keep), b.balanced.b.select(keep, all_in),
                            b.balanced.c.select(all_out, keep), std::move(labels));
  r.state_map = b.t.block(0, 0, k, b.t.cols());
  require_hurwitz(r.model.a, "truncated state matrix", tol);
  if (k < order) {
    r.lower_bound = b.hankel[k];
    r.upper_bound = 2.0 * std::accumulate(b.hankel.begin() + k, b.hankel.end(), 0.0);
  }
  return r;
}

std::size_t order_for_bound(const BalancedRealization& b, double bound, const Tolerances& tol) {
  const std::size_t order = b.order();
  for (std::size_t k = 1; k < order; ++k) {
    const double tail = 2.0 * std::accumulate(b.hankel.begin() + k, b.hankel.end(), 0.0);
    if (tail <= bound && b.hankel[k - 1] >= (1.0 + tol.degenerate_gap) * b.hankel[k]) return k;
  }
  return order;
}

ComplexMatrix transfer_eval(const StateSpaceModel& s, double omega) {
  const std::size_t n = s.order();
  if (n == 0) return ComplexMatrix(s.outputs(), s.inputs());
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = -s.a(i, j);
  for (std::size_t i = 0; i < n; ++i) m(i, i) += std::complex<double>(0.0, omega);
  const ComplexMatrix x = lu_solve(m, to_complex(s.b));
  return to_complex(s.c) * x;
}

namespace {

double gain(const StateSpaceModel& s, double omega) {
  const auto g = transfer_eval(s, omega);
  if (g.empty()) return 0.0;
  return singular_values(g).front();
}

}  // namespace

HinfEstimate hinf_norm_estimate(const StateSpaceModel& s, const HinfOptions& opt) {
  s.validate();
  HinfEstimate best;
  if (s.order() == 0 || s.inputs() == 0 || s.outputs() == 0) return best;
  if (max_abs(s.b) == 0.0 || max_abs(s.c) == 0.0) return best;

  // Grid: omega = 0 followed by a logarithmic sweep.
  std::vector<double> omegas{0.0};
  const double lmin = std::log(opt.omega_min), lmax = std::log(opt.omega_max);
  for (std::size_t k = 0; k < opt.points; ++k)
    omegas.push_back(std::exp(lmin + (lmax - lmin) * static_cast<double>(k) /
                                          static_cast<double>(opt.points - 1)));
  std::vector<double> gains(omegas.size());
  for (std::size_t k = 0; k < omegas.size(); ++k) gains[k] = gain(s, omegas[k]);

  auto consider = [&best](double w, double v) {
    if (v > best.norm) {
      best.norm = v;
      best.omega = w;
    }
  };
  for (std::size_t k = 0; k < omegas.size(); ++k) consider(omegas[k], gains[k]);

  // Local maxima of the sampled gain, best first.
  std::vector<std::size_t> peaks;
  for (std::size_t k = 0; k < gains.size(); ++k) {
    const bool left = k == 0 || gains[k] >= gains[k - 1];
    const bool right = k + 1 == gains.size() || gains[k] >= gains[k + 1];
    if (left && right) peaks.push_back(k);
  }
  std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return gains[a] > gains[b]; });
  if (peaks.size() > opt.refine_peaks) peaks.resize(opt.refine_peaks);

  constexpr double kInvPhi = 0.6180339887498949;
  for (const std::size_t k : peaks) {
    const std::size_t lo_idx = k == 0 ? 0 : k - 1;
    const std::size_t hi_idx = std::min(k + 1, omegas.size() - 1);
    if (lo_idx == hi_idx) continue;
    // Search in log(omega) away from DC, linearly on the first interval.
    const bool linear = omegas[lo_idx] == 0.0;
    auto to_w = [linear](double u) { return linear ? u : std::exp(u); };
    double a = linear ? omegas[lo_idx] : std::log(omegas[lo_idx]);
    double b = linear ? omegas[hi_idx] : std::log(omegas[hi_idx]);
    const double width_target = opt.relative_width * (linear ? std::max(b, 1e-300) : 1.0);
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = gain(s, to_w(c)), fd = gain(s, to_w(d));
    consider(to_w(c), fc);
    consider(to_w(d), fd);
    int guard = 0;
    while (std::abs(b - a) > width_target && guard++ < 200) {
      if (fc >= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - kInvPhi * (b - a);
        fc = gain(s, to_w(c));
        consider(to_w(c), fc);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + kInvPhi * (b - a);
        fd = gain(s, to_w(d));
        consider(to_w(d), fd);
      }
    }
  }
  return best;
}

double hinf_norm(const StateSpaceModel& s, const HinfOptions& opt) {
  return hinf_norm_estimate(s, opt).norm;
}

StateSpaceModel difference_system(const StateSpaceModel& g, const StateSpaceModel& gr) {
  if (g.inputs() != gr.inputs() || g.outputs() != gr.outputs())
    throw DimensionError("difference of systems with different input/output counts");
  const std::size_t n = g.order(), k = gr.order();
  Matrix a(n + k, n + k);
  a.set_block(0, 0, g.a);
  a.set_block(n, n, gr.a);
  Matrix b(n + k, g.inputs());
  b.set_block(0, 0, g.b);
  b.set_block(n, 0, gr.b);
  Matrix c(g.outputs(), n + k);
  c.set_block(0, 0, g.c);
  c.set_block(0, n, -gr.c);
  return StateSpaceModel(std::move(a), std::move(b), std::move(c));
}

ReducedInterconnect reduce_interconnected(const InterconnectedModel& m, std::size_t k,
                                          const Tolerances& tol) {
  require_hurwitz(m.sys2.a, "environment state matrix", tol);
  ReducedInterconnect out;
  out.balanced = balance(m.sys2, tol);
  out.reduced = truncate(out.balanced, k, tol);
  out.model.sys1 = m.sys1;
  out.model.sys2 = out.reduced.model;
  out.state_map = out.reduced.state_map;
  return out;
}

}  // namespace qio
