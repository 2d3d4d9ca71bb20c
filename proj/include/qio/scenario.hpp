#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>

#include "qio/eom.hpp"
#include "qio/pauli.hpp"
#include "qio/qec.hpp"

namespace qio {

struct TimeGrid {
  double t_end = 5.0;
  std::size_t samples = 501;  // including t = 0

  Vector grid() const { return uniform_grid(t_end, samples - 1); }
};

struct ReductionSettings {
  std::optional<std::size_t> k;
  std::optional<double> tolerance;  // pick the smallest k with 2 sum sigma_{i>k} <= tolerance
};

struct QecSettings {
  std::string code = "bitflip3";
  int levels = 1;
  std::string model = "independent";  // or "correlated"
  double gamma = 1.0;
  double eta_meas = 1.0;
  double eta_rec = 1.0;
  double dt = 0.1;
  std::size_t cycles = 10;
};

/// Logical Bloch vector encoded into the scenario's code.
struct LogicalState {
  BlochVector bloch{0.0, 0.0, 1.0};
};

using InitialState = std::variant<ProductState, Amplitudes, LogicalState>;

struct Scenario {
  std::string name;
  std::size_t n_sites = 0;
  std::optional<LindbladModel> model;
  VariableSet interest;
  InitialState initial;
  TimeGrid times;
  ReductionSettings reduction;
  std::optional<QecSettings> qec;

  const LindbladModel& lindblad() const { return *model; }
};

/// Parses and validates a scenario document. SchemaError messages start with
/// the path of the offending field, e.g. "hamiltonian[1].pauli: ...".
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

/// The code and noise model described by a qec block.
StabilizerCode make_code(const QecSettings& q);
LindbladModel make_noise_model(const QecSettings& q);

}  // namespace qio
