#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "qio/models.hpp"
#include "qio/qec.hpp"
#include "support.hpp"

using namespace qio;
using qio::ref::CMat;
using qio::ref::cd;

namespace {

PauliString P(const char* s) { return PauliString::parse(s); }

double coeff(const PauliPolynomial& p, const char* s) { return p.coefficient(P(s)).real(); }

double evaluate(const PauliPolynomial& p, const CMat& rho) { return ref::dense_expectation(p, rho); }

BlochVector random_bloch(std::mt19937& rng) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BlochVector b{g(rng), g(rng), g(rng)};
  const double r = std::cbrt(u(rng)) / std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
  for (double& x : b) x *= r;
  return b;
}

Amplitudes code_state(std::size_t n, cd a, cd b) {
  Amplitudes psi(std::size_t{1} << n, 0.0);
  psi.front() = a;
  psi.back() = b;
  return psi;
}

double single_cycle(double gamma, double dt) {
  return 0.5 * (3 * std::exp(-2 * gamma * dt) - std::exp(-6 * gamma * dt));
}

}  // namespace

TEST(BitFlipCode, Structure) {
  const StabilizerCode code = bitflip3();
  EXPECT_EQ(code.n_sites(), 3u);
  const auto stab = code.stabilizers();
  ASSERT_EQ(stab.size(), 2u);
  EXPECT_TRUE(stab[0].commutes_with(stab[1]));
  EXPECT_EQ(code.logical("xbar"), PauliPolynomial(P("XXX")));
  EXPECT_EQ(code.logical("zbar"), PauliPolynomial(P("ZZZ")));
  // ybar = i xbar zbar = i (XZ)^3 = i (-iY)^3 = -YYY
  EXPECT_EQ(code.logical("ybar"), PauliPolynomial(P("YYY"), -1.0));
  EXPECT_THROW(code.logical("wbar"), DimensionError);
}

TEST(BitFlipCode, ConstructionChecksRecoveries) {
  RecoveryStage st{{P("ZZI"), P("ZIZ")}, {P("III"), P("XII"), P("IIX"), P("IXI")}};
  EXPECT_THROW(StabilizerCode(3, {st}, PauliPolynomial(P("XXX")), PauliPolynomial(P("ZZZ"))), AlgebraError);
  RecoveryStage bad{{P("ZZI"), P("XIX")}, {P("III"), P("IIX"), P("IZI"), P("XII")}};
  EXPECT_THROW(StabilizerCode(3, {bad}, PauliPolynomial(P("XXX")), PauliPolynomial(P("ZZZ"))), AlgebraError);
  RecoveryStage ok{{P("ZZI"), P("ZIZ")}, {P("III"), P("IXI"), P("IIX"), P("XII")}};
  EXPECT_THROW(StabilizerCode(3, {ok}, PauliPolynomial(P("XXX")), PauliPolynomial(P("XXX"))), AlgebraError);
}

TEST(RecoveryChannelRange, RejectsOutside) {
  EXPECT_THROW(RecoveryChannel(1.2, 1.0), InvalidModelError);
  EXPECT_THROW(RecoveryChannel(0.5, -0.1), InvalidModelError);
  EXPECT_TRUE(RecoveryChannel().perfect());
}

TEST(Decode, PerfectChannelFormulas) {
  const DecodingFunctional d = decode_functional(bitflip3(), RecoveryChannel());
  const PauliPolynomial& z = d["zbar"];
  EXPECT_EQ(z.size(), 4u);
  EXPECT_DOUBLE_EQ(coeff(z, "ZII"), 0.5);
  EXPECT_DOUBLE_EQ(coeff(z, "IZI"), 0.5);
  EXPECT_DOUBLE_EQ(coeff(z, "IIZ"), 0.5);
  EXPECT_DOUBLE_EQ(coeff(z, "ZZZ"), -0.5);
  EXPECT_EQ(d["xbar"], PauliPolynomial(P("XXX")));
  const PauliPolynomial& y = d["ybar"];
  EXPECT_EQ(y.size(), 4u);
  for (const char* s : {"XXY", "XYX", "YXX", "YYY"}) EXPECT_DOUBLE_EQ(std::abs(coeff(y, s)), 0.5) << s;
}

TEST(Decode, CodeStateDecodesToItsBlochVector) {
  std::mt19937 rng(1);
  const StabilizerCode code = bitflip3();
  const DecodingFunctional d = decode_functional(code, RecoveryChannel());
  for (int trial = 0; trial < 10; ++trial) {
    const Amplitudes one = ref::random_state(rng, 1);
    const CMat rho = ref::projector(code_state(3, one[0], one[1]));
    const Vector bloch = expectations_from_state(one, VariableSet::parse({"X", "Y", "Z"}).strings());
    EXPECT_NEAR(evaluate(d["xbar"], rho), bloch[0], 1e-12);
    EXPECT_NEAR(evaluate(d["ybar"], rho), bloch[1], 1e-12);
    EXPECT_NEAR(evaluate(d["zbar"], rho), bloch[2], 1e-12);
  }
}

TEST(Decode, SingleFlipIsCorrected) {
  const StabilizerCode code = bitflip3();
  const Amplitudes psi = code_state(3, 0.6, 0.8);
  const CMat flipped = ref::conjugate_by(P("IXI"), ref::projector(psi));
  const CMat recovered = ref::dense_recover(code, 1.0, 1.0, flipped);
  EXPECT_NEAR(ref::dense_expectation(code.logical("zbar"), recovered), 0.36 - 0.64, 1e-12);
  EXPECT_NEAR(evaluate(decode_functional(code, RecoveryChannel())["zbar"], flipped), 0.36 - 0.64, 1e-12);
}

// Symbolic decode against explicit Kraus simulation with matrix square roots.
TEST(Decode, NoisyChannelsMatchDenseKraus) {
  std::mt19937 rng(2);
  const StabilizerCode code = bitflip3();
  for (double em : {0.0, 0.3, 0.7, 1.0}) {
    for (double er : {0.0, 0.3, 0.7, 1.0}) {
      const DecodingFunctional d = decode_functional(code, RecoveryChannel(em, er));
      for (int trial = 0; trial < 4; ++trial) {
        const CMat rho = ref::random_density(rng, 3);
        const CMat after = ref::dense_recover(code, em, er, rho);
        EXPECT_NEAR(after.trace().real(), 1.0, 1e-12);
        for (const char* name : {"xbar", "ybar", "zbar"})
          EXPECT_NEAR(evaluate(d[name], rho), ref::dense_expectation(code.logical(name), after), 1e-10)
              << name << " eta_meas=" << em << " eta_rec=" << er;
      }
    }
  }
}

TEST(Decode, MeasurementEfficiencyKeepsSupport) {
  const StabilizerCode code = bitflip3();
  const DecodingFunctional perfect = decode_functional(code, RecoveryChannel());
  for (double em : {0.3, 0.7}) {
    const PauliPolynomial& z = decode_functional(code, RecoveryChannel(em, 1.0))["zbar"];
    ASSERT_EQ(z.size(), perfect["zbar"].size());
    for (const auto& [s, c] : perfect["zbar"].terms()) EXPECT_NE(z.coefficient(s), cd(0.0)) << s.label();
  }
}

TEST(Decode, KrausOperatorsAreComplete) {
  for (double em : {0.0, 0.45, 1.0}) {
    const RecoveryAdjoint adj(bitflip3(), RecoveryChannel(em, 1.0));
    PauliPolynomial sum(3);
    for (const auto& k : adj.kraus(0)) sum += k.adjoint() * k;
    // Both branches (recovered and not) are listed, weighted by eta_rec and 1 - eta_rec.
    sum -= PauliPolynomial::identity(3);
    EXPECT_LT(sum.max_abs_coefficient(), 1e-12) << em;
  }
  EXPECT_THROW(RecoveryAdjoint(bitflip3(), RecoveryChannel()).kraus(1), DimensionError);
}

TEST(RecoverySuperoperator, PerfectRecoveryIsIdempotentOnDecode) {
  std::mt19937 rng(3);
  const StabilizerCode code = bitflip3();
  const DecodingFunctional d = decode_functional(code, RecoveryChannel());
  const AffineMap r = recovery_superoperator(code, RecoveryChannel(), d.strings());
  const LinearFunctional z = linear_functional(d["zbar"], r.variables);
  for (int trial = 0; trial < 10; ++trial) {
    const Amplitudes psi = ref::random_state(rng, 3);
    const Vector v = expectations_from_state(psi, r.variables.strings());
    const Vector once = r.apply(v);
    EXPECT_NEAR(z(r.apply(once)), z(once), 1e-12);
  }
}

TEST(RecoverySuperoperator, ConstantMapWhenNothingIsLearned) {
  // With eta_meas = eta_rec = 0 every K_s is I / 2 and nothing is applied.
  std::mt19937 rng(4);
  const StabilizerCode code = bitflip3();
  const VariableSet vars = VariableSet::parse({"ZII", "XXX", "XYZ", "ZZZ"});
  const AffineMap r = recovery_superoperator(code, RecoveryChannel(0.0, 0.0), vars);
  for (int trial = 0; trial < 5; ++trial) {
    const CMat rho = ref::random_density(rng, 3);
    const CMat after = ref::dense_recover(code, 0.0, 0.0, rho);
    Vector v;
    for (const auto& s : r.variables) v.push_back(ref::string_expectation(s, rho));
    const Vector got = r.apply(v);
    for (std::size_t k = 0; k < got.size(); ++k)
      EXPECT_NEAR(got[k], ref::string_expectation(r.variables[k], after), 1e-12);
  }
}

TEST(RecoverySuperoperator, KeepsValidStatesBounded) {
  std::mt19937 rng(5);
  const StabilizerCode code = bitflip3();
  const AffineMap r = recovery_superoperator(code, RecoveryChannel(0.6, 0.8),
                                             decode_functional(code, RecoveryChannel()).strings());
  for (int trial = 0; trial < 100; ++trial) {
    const Vector v = expectations_from_state(ref::random_state(rng, 3), r.variables.strings());
    for (double x : r.apply(v)) EXPECT_LE(std::abs(x), 1.0 + 1e-6);
  }
}

TEST(LogicalDynamics, IndependentFlips) {
  const double gamma = 0.7;
  const LogicalDynamics ld = logical_dynamics(bitflip3(), RecoveryChannel(), models::independent_flips(3, gamma));
  EXPECT_EQ(ld.auxiliary_count("zbar"), 1u);
  EXPECT_EQ(ld.auxiliary_count("ybar"), 1u);
  EXPECT_EQ(ld.auxiliary_count("xbar"), 0u);

  auto ev = eigenvalues(ld.induced_generator({"zbar"}));
  std::sort(ev.begin(), ev.end(), [](auto a, auto b) { return a.real() < b.real(); });
  EXPECT_NEAR(ev[0].real(), -6 * gamma, 1e-10);
  EXPECT_NEAR(ev[1].real(), -2 * gamma, 1e-10);

  // In the coordinates (zbar, alpha) with alpha = (Z1 + Z2 + Z3 + Z1Z2Z3) / 2.
  PauliPolynomial alpha(3);
  for (const char* s : {"ZII", "IZI", "IIZ", "ZZZ"}) alpha.add_term(P(s), 0.5);
  Matrix rows(2, ld.generator.variables.size());
  const LinearFunctional zf = ld.readout.at("zbar");
  const LinearFunctional af = linear_functional(alpha, ld.generator.variables);
  for (std::size_t j = 0; j < rows.cols(); ++j) {
    rows(0, j) = zf.row[j];
    rows(1, j) = af.row[j];
  }
  const Matrix m = ld.induced_generator(rows);
  EXPECT_NEAR(m(0, 0), -4 * gamma, 1e-12);
  EXPECT_NEAR(m(0, 1), 2 * gamma, 1e-12);
  EXPECT_NEAR(m(1, 0), 2 * gamma, 1e-12);
  EXPECT_NEAR(m(1, 1), -4 * gamma, 1e-12);
}

TEST(LogicalDynamics, XbarIsImmuneToBitFlips) {
  const LindbladModel m = models::independent_flips(3, 1.3);
  EXPECT_TRUE(adjoint_generator(P("XXX"), m).empty());
}

TEST(LogicalDynamics, NoNoiseMeansNoMotion) {
  const LogicalDynamics ld = logical_dynamics(bitflip3(), RecoveryChannel(), LindbladModel(3, PauliPolynomial(3)));
  EXPECT_EQ(max_abs(ld.generator.a), 0.0);
  EXPECT_EQ(ld.auxiliary_count("zbar"), 0u);
}

TEST(LogicalDynamics, CorrelatedFlipRows) {
  const double gc = 0.25;
  const LindbladModel m = models::correlated_flips(3, gc);
  const PauliPolynomial dzzz = adjoint_generator(P("ZZZ"), m);
  EXPECT_NEAR(coeff(dzzz, "ZZZ"), -6 * gc, 1e-14);
  for (const char* s : {"YYZ", "YZY", "ZYY"}) EXPECT_NEAR(coeff(dzzz, s), 4 * gc, 1e-14);
  const PauliPolynomial dz1 = adjoint_generator(P("ZII"), m);
  EXPECT_EQ(dz1.size(), 1u);
  EXPECT_NEAR(coeff(dz1, "ZII"), -2 * gc, 1e-14);
}

// Under the collective channel the Z sector closes on {Z_i, Z1Z2Z3, YYZ, YZY, ZYY}
// but the -2 Gamma_c eigenvalue is shared by two directions, so the decoded
// zbar only excites a two-dimensional invariant subspace.
TEST(LogicalDynamics, CorrelatedFlipsSector) {
  const double gc = 0.5;
  const LogicalDynamics ld = logical_dynamics(bitflip3(), RecoveryChannel(), models::correlated_flips(3, gc));
  EXPECT_EQ(ld.coupled_dimension({"zbar"}), 2u);
  auto ev = eigenvalues(ld.induced_generator({"zbar"}));
  std::sort(ev.begin(), ev.end(), [](auto a, auto b) { return a.real() < b.real(); });
  EXPECT_NEAR(ev[0].real(), -18 * gc, 1e-9);
  EXPECT_NEAR(ev[1].real(), -2 * gc, 1e-9);

  const VariableSet zsector = closure(VariableSet::parse({"ZII", "IZI", "IIZ", "ZZZ"}), models::correlated_flips(3, gc));
  EXPECT_EQ(zsector.size(), 7u);
}

TEST(LogicalDynamics, CorrelatedFirstDerivativeOnCodeStates) {
  std::mt19937 rng(6);
  const LogicalDynamics ld = logical_dynamics(bitflip3(), RecoveryChannel(), models::correlated_flips(3, 1.0));
  const LinearFunctional& z = ld.readout.at("zbar");
  const Vector slope = [&] {
    Vector out(ld.generator.variables.size(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i)
      for (std::size_t j = 0; j < out.size(); ++j) out[j] += z.row[i] * ld.generator.a(i, j);
    return out;
  }();
  for (int trial = 0; trial < 5; ++trial) {
    const Amplitudes one = ref::random_state(rng, 1);
    const Vector v = expectations_from_state(code_state(3, one[0], one[1]), ld.generator.variables.strings());
    double d = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) d += slope[j] * v[j];
    EXPECT_NEAR(d, 0.0, 1e-12);
  }
}

TEST(Concatenate, LevelOneIsBase) {
  const StabilizerCode c = concatenate(bitflip3(), 1);
  EXPECT_EQ(c.n_sites(), 3u);
  EXPECT_EQ(c.levels(), 1);
  EXPECT_THROW(concatenate(bitflip3(), 4), DimensionError);
  EXPECT_THROW(concatenate(bitflip3(), 0), DimensionError);
}

TEST(Concatenate, LevelTwoStructure) {
  const StabilizerCode c = concatenate(bitflip3(), 2);
  EXPECT_EQ(c.n_sites(), 9u);
  EXPECT_EQ(c.levels(), 2);
  EXPECT_EQ(c.stages().size(), 4u);
  EXPECT_EQ(c.stabilizers().size(), 8u);
  EXPECT_EQ(c.logical("zbar"), PauliPolynomial(P("ZZZZZZZZZ")));
  EXPECT_EQ(concatenate(bitflip3(), 3).n_sites(), 27u);
}

TEST(Concatenate, LevelTwoDecodeGroups) {
  const DecodingFunctional d = decode_functional(concatenate(bitflip3(), 2), RecoveryChannel());
  const PauliPolynomial& z = d["zbar"];
  for (const auto& [s, c] : z.terms()) {
    const std::size_t w = s.weight();
    ASSERT_EQ(w % 2, 1u) << s.label();
    EXPECT_EQ(c.imag(), 0.0);
    const double sign = ((w - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
    EXPECT_GT(sign * c.real(), 0.0) << s.label();
    for (std::size_t k = 0; k < 9; ++k) {
      const Letter l = s.letter(k);
      EXPECT_TRUE(l == Letter::I || l == Letter::Z);
    }
  }
  for (std::size_t k = 0; k < 9; ++k)
    EXPECT_DOUBLE_EQ(z.coefficient(PauliString::single(9, k, Letter::Z)).real(), 0.25);
  // (-1/2)^3 from the inner blocks times -1/2 from the outer formula.
  EXPECT_DOUBLE_EQ(coeff(z, "ZZZZZZZZZ"), 1.0 / 16.0);
}

TEST(Concatenate, SubstitutionAgreesWithComposedChannel) {
  const StabilizerCode base = bitflip3();
  const StabilizerCode two = concatenate(base, 2);
  for (const RecoveryChannel ch : {RecoveryChannel(), RecoveryChannel(0.8, 0.9)}) {
    const DecodingFunctional inner = decode_functional(base, ch);
    const DecodingFunctional sub = substitute_decode(inner, inner, 3);
    const DecodingFunctional direct = decode_functional(two, ch);
    for (const char* name : {"xbar", "ybar", "zbar"}) {
      const PauliPolynomial diff = sub[name] - direct[name];
      EXPECT_LT(diff.max_abs_coefficient(), 1e-12) << name;
    }
  }
}

TEST(Concatenate, LevelTwoDecodeMatchesDenseRecovery) {
  std::mt19937 rng(7);
  const StabilizerCode two = concatenate(bitflip3(), 2);
  const DecodingFunctional d = decode_functional(two, RecoveryChannel());
  for (int trial = 0; trial < 2; ++trial) {
    // A code state with one flipped qubit in a random block.
    const Amplitudes one = ref::random_state(rng, 1);
    const CMat rho =
        ref::conjugate_by(PauliString::single(9, static_cast<std::size_t>(trial * 4), Letter::X),
                              ref::projector(code_state(9, one[0], one[1])));
    const CMat after = ref::dense_recover(two, 1.0, 1.0, rho);
    for (const char* name : {"xbar", "ybar", "zbar"})
      EXPECT_NEAR(evaluate(d[name], rho), ref::dense_expectation(two.logical(name), after), 1e-10) << name;
  }
}

TEST(Encode, RoundTrip) {
  std::mt19937 rng(8);
  for (int levels : {1, 2}) {
    const StabilizerCode code = concatenate(bitflip3(), levels);
    const DecodingFunctional d = decode_functional(code, RecoveryChannel());
    const VariableSet vars = d.strings();
    for (int trial = 0; trial < 100; ++trial) {
      const BlochVector b = random_bloch(rng);
      const Vector v = encode(code, b, vars);
      EXPECT_NEAR(linear_functional(d["xbar"], vars)(v), b[0], 1e-10);
      EXPECT_NEAR(linear_functional(d["ybar"], vars)(v), b[1], 1e-10);
      EXPECT_NEAR(linear_functional(d["zbar"], vars)(v), b[2], 1e-10);
    }
  }
  EXPECT_THROW(encode(bitflip3(), {1.0, 1.0, 0.0}, VariableSet::parse({"ZZZ"})), InvalidStateError);
}

TEST(Encode, MatchesDenseCodeState) {
  const double a = 0.6, b = 0.8;
  const StabilizerCode code = bitflip3();
  const VariableSet vars = VariableSet::parse({"ZII", "ZZZ", "XXX", "YYY", "XXY", "ZZI", "XII"});
  const Vector v = encode(code, {2 * a * b, 0.0, a * a - b * b}, vars);
  const CMat rho = ref::projector(code_state(3, a, b));
  for (std::size_t k = 0; k < vars.size(); ++k)
    EXPECT_NEAR(v[k], ref::string_expectation(vars[k], rho), 1e-12) << vars[k].label();
}

TEST(RunCycles, NoNoiseKeepsState) {
  const BlochVector b{0.3, -0.4, 0.5};
  const CycleResult r = run_cycles(bitflip3(), RecoveryChannel(), models::independent_flips(3, 0.0), 0.5, 5, b);
  ASSERT_EQ(r.logical.size(), 6u);
  for (const auto& l : r.logical)
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(l[k], b[k], 1e-12);
}

TEST(RunCycles, ClosedFormUnderIndependentFlips) {
  for (double gamma : {0.1, 1.0}) {
    for (double z0 : {1.0, 0.4}) {
      const double dt = 0.3;
      const CycleResult r =
          run_cycles(bitflip3(), RecoveryChannel(), models::independent_flips(3, gamma), dt, 4, BlochVector{0, 0, z0});
      for (std::size_t c = 0; c < r.logical.size(); ++c)
        EXPECT_NEAR(r.logical[c][2], z0 * std::pow(single_cycle(gamma, dt), static_cast<double>(c)), 1e-12);
    }
  }
}

TEST(RunCycles, ConcatenatedSingleCycle) {
  const double gamma = 0.2, dt = 0.5;
  const CycleResult r =
      run_cycles(concatenate(bitflip3(), 2), RecoveryChannel(), models::independent_flips(9, gamma), dt, 1,
                 BlochVector{0, 0, 1});
  const double inner = single_cycle(gamma, dt);
  EXPECT_NEAR(r.logical[1][2], 0.5 * (3 * inner - inner * inner * inner), 1e-10);
}

// Noisy recovery with an explicit density-matrix cycle: exact propagation with
// the dense Lindbladian exponential, then the dense Kraus recovery.
TEST(RunCycles, NoisyCyclesMatchDenseSimulation) {
  const double gamma = 0.3, dt = 0.4, em = 0.8, er = 0.9;
  const StabilizerCode code = bitflip3();
  const LindbladModel m = models::correlated_flips(3, gamma);
  const Eigen::Index d = 8;
  // Row-major vectorisation of the Schroedinger-picture generator.
  CMat l = CMat::Zero(d * d, d * d);
  for (Eigen::Index k = 0; k < d * d; ++k) {
    CMat e = CMat::Zero(d, d);
    e(k / d, k % d) = 1.0;
    const CMat c = ref::dense(m.dissipators()[0].op);
    const CMat out = m.dissipators()[0].rate * (c * e * c.adjoint() - 0.5 * (c.adjoint() * c * e + e * c.adjoint() * c));
    for (Eigen::Index j = 0; j < d * d; ++j) l(j, k) = out(j / d, j % d);
  }
  const CMat step = (l * dt).exp();

  std::mt19937 rng(9);
  const Amplitudes psi = ref::random_state(rng, 3);
  const CycleResult r = run_cycles(code, RecoveryChannel(em, er), m, dt, 3, psi);
  CMat rho = ref::projector(psi);
  for (std::size_t c = 1; c <= 3; ++c) {
    Eigen::VectorXcd v(d * d);
    for (Eigen::Index k = 0; k < d * d; ++k) v(k) = rho(k / d, k % d);
    v = step * v;
    for (Eigen::Index k = 0; k < d * d; ++k) rho(k / d, k % d) = v(k);
    rho = ref::dense_recover(code, em, er, rho);
    EXPECT_NEAR(r.logical[c][0], ref::dense_expectation(code.logical("xbar"), rho), 1e-10);
    EXPECT_NEAR(r.logical[c][1], ref::dense_expectation(code.logical("ybar"), rho), 1e-10);
    EXPECT_NEAR(r.logical[c][2], ref::dense_expectation(code.logical("zbar"), rho), 1e-10);
  }
}

TEST(RunCycles, CsvLayout) {
  CycleResult r;
  r.logical = {{0.0, 0.0, 1.0}, {0.0, 0.0, 0.5}};
  std::ostringstream os;
  write_cycles_csv(os, r);
  EXPECT_EQ(os.str(), "cycle,xbar,ybar,zbar\n0,0,0,1\n1,0,0,0.5\n");
}
