#pragma once

#include "qio/pauli.hpp"

namespace qio::models {

/// Two coupled spins, the second phase damped:
///   H = w1/2 Z1 + w2/2 Z2 + g X1 X2,  gamma D[Z2].
LindbladModel two_spin(double omega1, double omega2, double g, double gamma);

/// Independent bit flips gamma D[X_i] on every qubit.
LindbladModel independent_flips(std::size_t n_sites, double gamma);

/// One collective flip channel gamma_c D[X_1 + ... + X_n].
LindbladModel correlated_flips(std::size_t n_sites, double gamma_c);

/// Polynomial for a single-site letter, e.g. site_operator(3, 1, Letter::Z) = Z2.
PauliPolynomial site_operator(std::size_t n_sites, std::size_t site, Letter l);

}  // namespace qio::models
