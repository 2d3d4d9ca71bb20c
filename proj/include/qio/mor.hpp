#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "qio/linalg.hpp"
#include "qio/state_space.hpp"

namespace qio {

/// Square-root balanced realization of a stable system.
///
/// Directions whose Hankel value falls below minimality * sigma_1 are removed,
/// so `t` is r x n and `t_inv` is n x r with t * t_inv = I_r. Both gramians of
/// `balanced` equal diag(hankel).
struct BalancedRealization {
  Matrix t;
  Matrix t_inv;
  Vector hankel;          // kept Hankel singular values, descending
  Vector removed_hankel;  // values discarded as non-minimal
  StateSpaceModel balanced;
  std::size_t original_order = 0;

  std::size_t order() const { return hankel.size(); }
};

BalancedRealization balance(const StateSpaceModel& s, const Tolerances& tol = kDefaultTolerances);

/// Controllability (A P + P A^T + B B^T = 0) and observability
/// (A^T Q + Q A + C^T C = 0) gramians.
Matrix controllability_gramian(const StateSpaceModel& s, const Tolerances& tol = kDefaultTolerances);
Matrix observability_gramian(const StateSpaceModel& s, const Tolerances& tol = kDefaultTolerances);

/// Balanced truncation to order k with the a-priori H-infinity error bounds
///   sigma_{k+1} <= ||G - G_k||_inf <= 2 sum_{i>k} sigma_i.
struct ReducedModel {
  std::size_t order = 0;
  StateSpaceModel model;
  Matrix state_map;  // k x n: reduced state = state_map * original state
  double lower_bound = 0.0;
  double upper_bound = 0.0;
};

ReducedModel truncate(const BalancedRealization& b, std::size_t k,
                      const Tolerances& tol = kDefaultTolerances);

/// Smallest k whose discarded upper bound 2 sum_{i>k} sigma_i is at most `bound`
/// and which does not split a near-degenerate cluster.
std::size_t order_for_bound(const BalancedRealization& b, double bound,
                            const Tolerances& tol = kDefaultTolerances);

/// G(i omega) = C (i omega I - A)^{-1} B.
ComplexMatrix transfer_eval(const StateSpaceModel& s, double omega);

/// Frequency grid and refinement used by hinf_norm.
struct HinfOptions {
  double omega_min = 1e-3;
  double omega_max = 1e3;
  std::size_t points = 2000;
  double relative_width = 1e-6;
  std::size_t refine_peaks = 3;  // golden-section refinement around the best grid peaks
};

struct HinfEstimate {
  double norm = 0.0;
  double omega = 0.0;  // frequency of the maximum found
};

/// Largest singular value of G(i omega) over a logarithmic sweep (plus
/// omega = 0), refined by golden-section search. Every reported value is an
/// attained gain, so the estimate never exceeds the true norm.
HinfEstimate hinf_norm_estimate(const StateSpaceModel& s, const HinfOptions& opt = {});
double hinf_norm(const StateSpaceModel& s, const HinfOptions& opt = {});

/// G - G_r as one state-space system.
StateSpaceModel difference_system(const StateSpaceModel& g, const StateSpaceModel& g_reduced);

/// Result of reducing the environment block of an interconnection.
struct ReducedInterconnect {
  InterconnectedModel model;  // sys1 untouched, sys2 of order k
  Matrix state_map;           // k x n2: x2_reduced(0) = state_map * x2(0)
  BalancedRealization balanced;
  ReducedModel reduced;
};

ReducedInterconnect reduce_interconnected(const InterconnectedModel& m, std::size_t k,
                                          const Tolerances& tol = kDefaultTolerances);

}  // namespace qio
