#include "qio/models.hpp"

namespace qio::models {

PauliPolynomial site_operator(std::size_t n_sites, std::size_t site, Letter l) {
  return PauliPolynomial(PauliString::single(n_sites, site, l));
}

LindbladModel two_spin(double omega1, double omega2, double g, double gamma) {
  PauliPolynomial h(2);
  h.add_term(PauliString::parse("ZI"), 0.5 * omega1);
  h.add_term(PauliString::parse("IZ"), 0.5 * omega2);
  h.add_term(PauliString::parse("XX"), g);
  return LindbladModel(2, std::move(h), {{gamma, site_operator(2, 1, Letter::Z)}});
}

LindbladModel independent_flips(std::size_t n_sites, double gamma) {
  std::vector<Dissipator> ds;
  for (std::size_t k = 0; k < n_sites; ++k) ds.push_back({gamma, site_operator(n_sites, k, Letter::X)});
  return LindbladModel(n_sites, PauliPolynomial(n_sites), std::move(ds));
}

LindbladModel correlated_flips(std::size_t n_sites, double gamma_c) {
  PauliPolynomial c(n_sites);
  for (std::size_t k = 0; k < n_sites; ++k) c.add_term(PauliString::single(n_sites, k, Letter::X), 1.0);
  return LindbladModel(n_sites, PauliPolynomial(n_sites), {{gamma_c, std::move(c)}});
}

}  // namespace qio::models
