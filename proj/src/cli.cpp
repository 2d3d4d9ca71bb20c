#include "qio/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "qio/mor.hpp"
#include "qio/scenario.hpp"
#include "qio/sim.hpp"

namespace qio::cli {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

json to_json(const Vector& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

json to_json(const Matrix& m) {
  json a = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(std::move(row));
  }
  return a;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw SchemaError(path + ": cannot open for writing");
  return f;
}

// Variables for derive/simulate/verify: the closure of the interest strings,
// or of the decode strings when a qec scenario lists none.
VariableSet scenario_variables(const Scenario& s) {
  VariableSet seeds = s.interest;
  if (seeds.empty() && s.qec) {
    const auto code = make_code(*s.qec);
    seeds = decode_functional(code, RecoveryChannel(s.qec->eta_meas, s.qec->eta_rec)).strings();
  }
  if (seeds.empty()) throw SchemaError("interest: at least one variable is required");
  return closure(seeds, s.lindblad());
}

Vector scenario_initial(const Scenario& s, const VariableSet& vars) {
  if (const auto* l = std::get_if<LogicalState>(&s.initial)) return encode(make_code(*s.qec), l->bloch, vars);
  if (const auto* p = std::get_if<ProductState>(&s.initial)) return initial_expectations(*p, vars);
  return initial_expectations(std::get<Amplitudes>(s.initial), vars);
}

DensityMatrix scenario_density(const Scenario& s) {
  if (s.n_sites > kOracleMaxSites)
    throw DimensionError("the oracle handles at most " + std::to_string(kOracleMaxSites) + " qubits");
  if (const auto* l = std::get_if<LogicalState>(&s.initial))
    return encoded_density_matrix(make_code(*s.qec), l->bloch);
  if (const auto* p = std::get_if<ProductState>(&s.initial)) return DensityMatrix::product(p->bloch);
  return DensityMatrix::from_amplitudes(std::get<Amplitudes>(s.initial));
}

// ---------------------------------------------------------------------------

int cmd_derive(const std::string& path, bool as_json, std::ostream& out) {
  const Scenario s = load_scenario(path);
  const VariableSet vars = scenario_variables(s);
  const GeneratorMatrix g = build_generator(vars, s.lindblad());
  if (as_json) {
    json j{{"variables", vars.labels()}, {"generator", to_json(g.a)}};
    out << j.dump(2) << '\n';
  } else {
    out << format_equations(g);
  }
  return kExitOk;
}

struct Reduction {
  PartitionResult partition;
  ReducedInterconnect reduced;
};

Reduction reduce_scenario(const Scenario& s, const VariableSet& vars, std::optional<std::size_t> k_override) {
  if (s.interest.empty()) throw SchemaError("interest: reduction needs an interest set");
  const GeneratorMatrix g = build_generator(vars, s.lindblad());
  Reduction r{partition_and_factor(g, s.interest), {}};
  std::size_t k = 1;
  if (k_override) {
    k = *k_override;
  } else if (s.reduction.k) {
    k = *s.reduction.k;
  } else if (s.reduction.tolerance) {
    k = order_for_bound(balance(r.partition.model.sys2), *s.reduction.tolerance);
  }
  r.reduced = reduce_interconnected(r.partition.model, k);
  return r;
}

int cmd_reduce(const std::string& path, std::optional<std::size_t> k, std::ostream& out) {
  const Scenario s = load_scenario(path);
  const VariableSet vars = scenario_variables(s);
  const Reduction r = reduce_scenario(s, vars, k);
  const auto& red = r.reduced.reduced;
  const double measured =
      red.order < r.reduced.balanced.order()
          ? hinf_norm(difference_system(r.reduced.balanced.balanced, red.model))
          : 0.0;
  json j{{"interest", r.partition.interest.labels()},
         {"environment", r.partition.environment.labels()},
         {"hankel", to_json(r.reduced.balanced.hankel)},
         {"removed_hankel", to_json(r.reduced.balanced.removed_hankel)},
         {"k", red.order},
         {"lower_bound", red.lower_bound},
         {"upper_bound", red.upper_bound},
         {"hinf_measured", measured}};
  out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_simulate(const std::string& path, std::optional<std::size_t> k, const std::string& svg,
                 const std::string& csv_path, std::ostream& out) {
  const Scenario s = load_scenario(path);
  const VariableSet vars = scenario_variables(s);
  const GeneratorMatrix g = build_generator(vars, s.lindblad());
  const Vector x0 = scenario_initial(s, vars);
  const Vector times = s.times.grid();
  const Trajectory full = integrate_linear(g.a, x0, times, vars.labels());

  Trajectory table;
  table.times = times;
  const VariableSet& shown = s.interest.empty() ? vars : s.interest;
  std::optional<Trajectory> reduced;
  if (k) {
    const Reduction r = reduce_scenario(s, vars, k);
    const auto& env = r.partition.environment;
    Vector x1, x2;
    for (const auto& p : r.partition.interest) x1.push_back(x0[vars.index_of(p)]);
    for (const auto& p : env) x2.push_back(x0[vars.index_of(p)]);
    reduced = simulate_interconnected(r.reduced.model, x1, x2, r.reduced.state_map, times);
  }
  std::vector<SvgSeries> series;
  for (const auto& p : shown) {
    table.labels.push_back(p.label());
    series.push_back({p.label(), full.column(p.label())});
    if (reduced) {
      table.labels.push_back(p.label() + "_reduced");
      series.push_back({p.label() + " (reduced)", reduced->column(p.label())});
    }
  }
  table.values = Matrix(times.size(), series.size());
  for (std::size_t j = 0; j < series.size(); ++j)
    for (std::size_t i = 0; i < times.size(); ++i) table.values(i, j) = series[j].values[i];

  if (csv_path.empty()) {
    write_csv(out, table);
  } else {
    auto f = open_output(csv_path);
    write_csv(f, table);
  }
  if (!svg.empty()) {
    auto f = open_output(svg);
    write_svg(f, times, series, s.name);
  }
  return kExitOk;
}

int cmd_qec(const std::string& path, const QecSettings& flags, const std::vector<std::string>& given,
            const std::string& csv_path, const std::string& report_path, std::ostream& out) {
  QecSettings q = flags;
  std::optional<BlochVector> logical;
  std::optional<Scenario> scenario;
  if (!path.empty()) {
    scenario = load_scenario(path);
    if (!scenario->qec) throw SchemaError("qec: scenario has no qec block");
    // Command-line flags override the scenario's values.
    QecSettings merged = *scenario->qec;
    for (const auto& name : given) {
      if (name == "code") merged.code = q.code;
      if (name == "levels") merged.levels = q.levels;
      if (name == "model") merged.model = q.model;
      if (name == "gamma") merged.gamma = q.gamma;
      if (name == "eta-meas") merged.eta_meas = q.eta_meas;
      if (name == "eta-rec") merged.eta_rec = q.eta_rec;
      if (name == "dt") merged.dt = q.dt;
      if (name == "cycles") merged.cycles = q.cycles;
    }
    q = merged;
    if (const auto* l = std::get_if<LogicalState>(&scenario->initial)) logical = l->bloch;
  }
  const StabilizerCode code = make_code(q);
  const RecoveryChannel ch(q.eta_meas, q.eta_rec);
  const LindbladModel model = make_noise_model(q);
  CycleInitial init = logical.value_or(BlochVector{0.0, 0.0, 1.0});
  if (scenario && std::holds_alternative<Amplitudes>(scenario->initial))
    init = std::get<Amplitudes>(scenario->initial);
  const CycleResult r = run_cycles(code, ch, model, q.dt, q.cycles, init);

  if (csv_path.empty()) {
    write_cycles_csv(out, r);
  } else {
    auto f = open_output(csv_path);
    write_cycles_csv(f, r);
  }
  if (!report_path.empty()) {
    const LogicalDynamics dyn = logical_dynamics(code, ch, model);
    json sectors = json::object();
    for (const std::string name : {"xbar", "ybar", "zbar"}) {
      const Matrix m = dyn.induced_generator(std::vector<std::string>{name});
      json rates = json::array();
      if (m.rows() > 0)
        for (const auto& ev : eigenvalues(m)) rates.push_back({ev.real(), ev.imag()});
      sectors[name] = {{"coupled_dimension", m.rows()},
                       {"auxiliary_variables", m.rows() == 0 ? 0 : m.rows() - 1},
                       {"eigenvalues", rates}};
    }
    json j{{"code", q.code},
           {"levels", q.levels},
           {"physical_qubits", code.n_sites()},
           {"model", q.model},
           {"gamma", q.gamma},
           {"eta_meas", q.eta_meas},
           {"eta_rec", q.eta_rec},
           {"decode_strings", dyn.decode.strings().size()},
           {"generator_closure", dyn.generator.variables.size()},
           {"cycle_closure", r.variables.size()},
           {"ybar_zbar_coupled_dimension", dyn.coupled_dimension({"ybar", "zbar"})},
           {"sectors", sectors}};
    auto f = open_output(report_path);
    f << j.dump(2) << '\n';
  }
  return kExitOk;
}

int cmd_verify(const std::string& path, std::optional<double> tolerance, std::ostream& out) {
  const Scenario s = load_scenario(path);
  const VariableSet vars = scenario_variables(s);
  const GeneratorMatrix g = build_generator(vars, s.lindblad());
  const Vector times = s.times.grid();
  const Trajectory ode = integrate_linear(g.a, scenario_initial(s, vars), times, vars.labels());
  const Trajectory ref = oracle_master_equation(s.lindblad(), scenario_density(s), times, vars);
  const double tol = tolerance.value_or(s.n_sites >= 9 ? 1e-5 : 1e-6);

  bool ok = true;
  out << std::left << std::setw(24) << "variable" << std::setw(20) << "max_deviation" << "status\n";
  for (std::size_t j = 0; j < vars.size(); ++j) {
    double dev = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i)
      dev = std::max(dev, std::abs(ode.values(i, j) - ref.values(i, j)));
    const bool pass = dev <= tol;
    ok = ok && pass;
    out << std::setw(24) << vars[j].label() << std::setw(20) << fmt(dev) << (pass ? "pass" : "FAIL") << '\n';
  }
  out << (ok ? "verify: pass" : "verify: FAIL") << " (tolerance " << fmt(tol) << ", " << vars.size()
      << " variables)\n";
  return ok ? kExitOk : kExitNumerical;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string format_equations(const GeneratorMatrix& g) {
  std::ostringstream os;
  for (std::size_t i = 0; i < g.variables.size(); ++i) {
    os << "d<" << g.variables[i].label() << ">/dt =";
    bool any = false;
    for (std::size_t j = 0; j < g.variables.size(); ++j) {
      const double c = g.a(i, j);
      if (c == 0.0) continue;
      os << (c < 0.0 ? (any ? " - " : " -") : (any ? " + " : " ")) << fmt(std::abs(c)) << " <"
         << g.variables[j].label() << '>';
      any = true;
    }
    if (!any) os << " 0";
    os << '\n';
  }
  return os.str();
}

DensityMatrix encoded_density_matrix(const StabilizerCode& code, const BlochVector& logical) {
  const std::size_t n = code.n_sites();
  if (n > kOracleMaxSites) throw DimensionError("encoded density matrix limited to 10 qubits");
  PauliPolynomial proj = PauliPolynomial::identity(n);
  for (const auto& s : code.stabilizers()) proj = proj * (PauliPolynomial::identity(n, 0.5) + PauliPolynomial(s) * 0.5);
  PauliPolynomial rho = proj;
  rho += code.logical("xbar") * proj * logical[0];
  rho += code.logical("ybar") * proj * logical[1];
  rho += code.logical("zbar") * proj * logical[2];
  const double trace = std::ldexp(identity_coefficient(proj).real(), static_cast<int>(n));
  const std::size_t dim = std::size_t{1} << n;
  ComplexMatrix eye = ComplexMatrix::identity(dim);
  ComplexMatrix dense(dim, dim);
  IndexedOperator(rho).apply_left(eye, dense, 1.0 / trace);
  return DensityMatrix(n, std::move(dense));
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Input-output models of open quantum systems: equations of motion, balanced truncation, "
               "simulation and error-correction cycles"};
  app.require_subcommand(1);

  std::string scenario, svg, csv, report;
  bool as_json = false;
  std::optional<std::size_t> k;
  std::optional<double> tol;
  QecSettings q;

  auto* derive = app.add_subcommand("derive", "print the closed equations of motion of a scenario");
  derive->add_option("scenario", scenario, "scenario JSON file")->required();
  derive->add_flag("--json", as_json, "emit the generator matrix as JSON");

  auto* reduce = app.add_subcommand("reduce", "balanced truncation of the environment block");
  reduce->add_option("scenario", scenario, "scenario JSON file")->required();
  reduce->add_option("--k", k, "kept environment order (default: scenario reduction block)");

  auto* simulate = app.add_subcommand("simulate", "integrate the equations of motion and write CSV");
  simulate->add_option("scenario", scenario, "scenario JSON file")->required();
  simulate->add_option("--reduce", k, "also simulate with the environment reduced to this order");
  simulate->add_option("--svg", svg, "write a line plot of the interest variables");
  simulate->add_option("--out", csv, "CSV output file (default: stdout)");

  auto* qec = app.add_subcommand("qec", "repeated decoherence and recovery cycles of a code");
  qec->add_option("scenario", scenario, "optional scenario JSON file with a qec block");
  qec->add_option("--code", q.code, "code name")->check(CLI::IsMember({"bitflip3"}));
  qec->add_option("--levels", q.levels, "concatenation levels")->check(CLI::Range(1, 3));
  qec->add_option("--model", q.model, "noise model")->check(CLI::IsMember({"independent", "correlated"}));
  qec->add_option("--gamma", q.gamma, "noise rate")->check(CLI::NonNegativeNumber);
  qec->add_option("--eta-meas", q.eta_meas, "syndrome measurement efficiency")->check(CLI::Range(0.0, 1.0));
  qec->add_option("--eta-rec", q.eta_rec, "recovery efficiency")->check(CLI::Range(0.0, 1.0));
  qec->add_option("--dt", q.dt, "time between recoveries")->check(CLI::PositiveNumber);
  qec->add_option("--cycles", q.cycles, "number of cycles");
  qec->add_option("--out", csv, "CSV output file (default: stdout)");
  qec->add_option("--report", report, "JSON report of closure sizes and decay rates");

  auto* verify = app.add_subcommand("verify", "compare the equations of motion with the density-matrix oracle");
  verify->add_option("scenario", scenario, "scenario JSON file")->required();
  verify->add_option("--tolerance", tol, "maximum allowed deviation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitOk : kExitSchema;
  }

  try {
    if (derive->parsed()) return cmd_derive(scenario, as_json, out);
    if (reduce->parsed()) return cmd_reduce(scenario, k, out);
    if (simulate->parsed()) return cmd_simulate(scenario, k, svg, csv, out);
    if (verify->parsed()) return cmd_verify(scenario, tol, out);
    std::vector<std::string> given;
    for (const char* name : {"code", "levels", "model", "gamma", "eta-meas", "eta-rec", "dt", "cycles"})
      if (qec->count(std::string("--") + name) > 0) given.emplace_back(name);
    return cmd_qec(scenario, q, given, csv, report, out);
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitSchema;
  }
}

}  // namespace qio::cli
