#include "qio/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qio/models.hpp"

namespace qio {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw SchemaError(path + ": " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(path, "must be finite");
  return d;
}

std::size_t count(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 0) fail(path, "expected a non-negative integer");
  return static_cast<std::size_t>(v.get<long long>());
}

PauliString pauli(const json& v, std::size_t n, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a Pauli string");
  const std::string s = v.get<std::string>();
  if (s.size() != n) fail(path, "\"" + s + "\" has length " + std::to_string(s.size()) + ", expected " + std::to_string(n));
  for (char c : s)
    if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') fail(path, "\"" + s + "\" contains a letter outside IXYZ");
  return PauliString::parse(s);
}

const json& array(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array");
  return v;
}

BlochVector bloch(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) fail(path, "expected [x, y, z]");
  BlochVector b{};
  for (std::size_t k = 0; k < 3; ++k) b[k] = number(v[k], path + "[" + std::to_string(k) + "]");
  if (std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]) > 1.0 + 1e-9) fail(path, "Bloch vector longer than 1");
  return b;
}

QecSettings parse_qec(const json& q, const std::string& path) {
  if (!q.is_object()) fail(path, "expected an object");
  QecSettings s;
  for (const auto& [key, value] : q.items()) {
    const std::string p = join(path, key);
    if (key == "code") {
      if (!value.is_string() || value.get<std::string>() != "bitflip3") fail(p, "only \"bitflip3\" is supported");
      s.code = value.get<std::string>();
    } else if (key == "levels") {
      const std::size_t l = count(value, p);
      if (l < 1 || l > 3) fail(p, "must be 1, 2 or 3");
      s.levels = static_cast<int>(l);
    } else if (key == "model") {
      if (!value.is_string() || (value != "independent" && value != "correlated"))
        fail(p, "expected \"independent\" or \"correlated\"");
      s.model = value.get<std::string>();
    } else if (key == "gamma") {
      s.gamma = number(value, p);
      if (s.gamma < 0.0) fail(p, "must be non-negative");
    } else if (key == "eta_meas" || key == "eta_rec") {
      const double e = number(value, p);
      if (e < 0.0 || e > 1.0) fail(p, "must lie in [0, 1]");
      (key == "eta_meas" ? s.eta_meas : s.eta_rec) = e;
    } else if (key == "dt") {
      s.dt = number(value, p);
      if (!(s.dt > 0.0)) fail(p, "must be positive");
    } else if (key == "cycles") {
      s.cycles = count(value, p);
    } else {
      fail(p, "unknown field");
    }
  }
  return s;
}

}  // namespace

StabilizerCode make_code(const QecSettings& q) {
  if (q.code != "bitflip3") throw SchemaError("qec.code: only \"bitflip3\" is supported");
  return concatenate(bitflip3(), q.levels);
}

LindbladModel make_noise_model(const QecSettings& q) {
  const std::size_t n = make_code(q).n_sites();
  if (q.model == "independent") return models::independent_flips(n, q.gamma);
  if (q.model == "correlated") return models::correlated_flips(n, q.gamma);
  throw SchemaError("qec.model: expected \"independent\" or \"correlated\"");
}

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("document: not valid JSON (") + e.what() + ")");
  }
  if (!doc.is_object()) fail("document", "expected an object");
  static const char* known[] = {"name",    "n_sites",   "hamiltonian", "dissipators", "interest",
                                "initial", "times",     "reduction",   "qec"};
  for (const auto& [key, value] : doc.items())
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) fail(key, "unknown field");

  Scenario s;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) fail("name", "expected a string");
    s.name = doc["name"].get<std::string>();
  }
  if (doc.contains("qec")) s.qec = parse_qec(doc["qec"], "qec");

  if (doc.contains("n_sites")) {
    s.n_sites = count(doc["n_sites"], "n_sites");
  } else if (s.qec) {
    s.n_sites = make_code(*s.qec).n_sites();
  } else {
    fail("n_sites", "missing");
  }
  if (s.n_sites < 1 || s.n_sites > PauliString::kMaxSites) fail("n_sites", "must lie in 1..64");
  if (s.qec && make_code(*s.qec).n_sites() != s.n_sites) fail("n_sites", "does not match the qec code size");
  const std::size_t n = s.n_sites;

  PauliPolynomial h(n);
  if (doc.contains("hamiltonian")) {
    const json& terms = array(doc["hamiltonian"], "hamiltonian");
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::string p = "hamiltonian[" + std::to_string(i) + "]";
      const double c = number(require(terms[i], "coeff", p), join(p, "coeff"));
      h.add_term(pauli(require(terms[i], "pauli", p), n, join(p, "pauli")), c);
    }
  }
  std::vector<Dissipator> diss;
  if (doc.contains("dissipators")) {
    const json& list = array(doc["dissipators"], "dissipators");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string p = "dissipators[" + std::to_string(i) + "]";
      Dissipator d{number(require(list[i], "rate", p), join(p, "rate")), PauliPolynomial(n)};
      if (d.rate < 0.0) fail(join(p, "rate"), "must be non-negative");
      const std::string op_path = join(p, "op");
      const json& ops = array(require(list[i], "op", p), op_path);
      if (ops.empty()) fail(op_path, "needs at least one term");
      for (std::size_t k = 0; k < ops.size(); ++k) {
        const std::string q = op_path + "[" + std::to_string(k) + "]";
        const double re = ops[k].contains("re") ? number(ops[k]["re"], join(q, "re")) : 0.0;
        const double im = ops[k].contains("im") ? number(ops[k]["im"], join(q, "im")) : 0.0;
        d.op.add_term(pauli(require(ops[k], "pauli", q), n, join(q, "pauli")), {re, im});
      }
      diss.push_back(std::move(d));
    }
  }
  if (s.qec && !doc.contains("hamiltonian") && !doc.contains("dissipators")) {
    s.model.emplace(make_noise_model(*s.qec));
  } else {
    try {
      s.model.emplace(n, std::move(h), std::move(diss));
    } catch (const InvalidModelError& e) {
      fail("dissipators", e.what());
    }
  }

  if (doc.contains("interest")) {
    const json& list = array(doc["interest"], "interest");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string p = "interest[" + std::to_string(i) + "]";
      const PauliString ps = pauli(list[i], n, p);
      if (ps.is_identity()) fail(p, "the identity is not a dynamical variable");
      if (!s.interest.add(ps)) fail(p, "duplicate entry");
    }
  }

  if (doc.contains("initial")) {
    const json& init = doc["initial"];
    const std::string type_path = "initial.type";
    const json& type = require(init, "type", "initial");
    const json& payload = require(init, "payload", "initial");
    if (!type.is_string()) fail(type_path, "expected a string");
    const std::string t = type.get<std::string>();
    if (t == "product") {
      ProductState ps;
      const json& list = array(payload, "initial.payload");
      if (list.size() != n) fail("initial.payload", "expected one Bloch vector per qubit");
      for (std::size_t k = 0; k < n; ++k) ps.bloch.push_back(bloch(list[k], "initial.payload[" + std::to_string(k) + "]"));
      s.initial = std::move(ps);
    } else if (t == "amplitudes") {
      const json& list = array(payload, "initial.payload");
      if (n > 20 || list.size() != (std::size_t{1} << n)) fail("initial.payload", "expected 2^n_sites amplitudes");
      Amplitudes psi;
      double norm = 0.0;
      for (std::size_t k = 0; k < list.size(); ++k) {
        const std::string p = "initial.payload[" + std::to_string(k) + "]";
        if (list[k].is_number()) {
          psi.emplace_back(number(list[k], p), 0.0);
        } else if (list[k].is_array() && list[k].size() == 2) {
          psi.emplace_back(number(list[k][0], p + "[0]"), number(list[k][1], p + "[1]"));
        } else {
          fail(p, "expected a number or [re, im]");
        }
        norm += std::norm(psi.back());
      }
      if (std::abs(std::sqrt(norm) - 1.0) > 1e-9) fail("initial.payload", "amplitudes are not normalized");
      s.initial = std::move(psi);
    } else if (t == "logical") {
      if (!s.qec) fail(type_path, "a logical initial state needs a qec block");
      s.initial = LogicalState{bloch(payload, "initial.payload")};
    } else {
      fail(type_path, "expected \"product\", \"amplitudes\" or \"logical\"");
    }
  } else {
    s.initial = ProductState{std::vector<BlochVector>(n, BlochVector{0.0, 0.0, 1.0})};
  }

  if (doc.contains("times")) {
    const json& t = doc["times"];
    if (!t.is_object()) fail("times", "expected an object");
    if (t.contains("t_end")) s.times.t_end = number(t["t_end"], "times.t_end");
    if (t.contains("samples")) s.times.samples = count(t["samples"], "times.samples");
    if (!(s.times.t_end > 0.0)) fail("times.t_end", "must be positive");
    if (s.times.samples < 2) fail("times.samples", "must be at least 2");
  }

  if (doc.contains("reduction")) {
    const json& r = doc["reduction"];
    if (!r.is_object()) fail("reduction", "expected an object");
    if (r.contains("k")) {
      s.reduction.k = count(r["k"], "reduction.k");
      if (*s.reduction.k < 1) fail("reduction.k", "must be at least 1");
    }
    if (r.contains("tolerance")) {
      s.reduction.tolerance = number(r["tolerance"], "reduction.tolerance");
      if (!(*s.reduction.tolerance > 0.0)) fail("reduction.tolerance", "must be positive");
    }
    if (s.reduction.k && s.reduction.tolerance) fail("reduction", "give either k or tolerance, not both");
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path + ": cannot open scenario file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace qio
