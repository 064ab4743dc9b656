#include "qsdlab/bch.hpp"

#include "qsdlab/oracle_register.hpp"

#include <algorithm>
#include <cmath>

namespace qsd {

UnitaryMatrix group_commutator(const Spectrum& a, const Spectrum& b, double tau) {
  const UnitaryMatrix ea = a.exp(tau);
  const UnitaryMatrix eb = b.exp(tau);
  return ea * eb * ea.adjoint() * eb.adjoint();
}

UnitaryMatrix commutator_target(const HermitianGenerator& a,
                                const HermitianGenerator& b, double tau) {
  const Matrix g = Complex(0.0, -tau * tau) * commutator(a.matrix(), b.matrix());
  return expm_generator(HermitianGenerator(0.5 * (g + g.adjoint())), 1.0);
}

GroupCommutatorResult bch_group_commutator(const HermitianGenerator& a,
                                           const HermitianGenerator& b, double tau) {
  if (a.dim() != b.dim()) throw DimensionMismatch("A and B dimensions differ");
  UnitaryMatrix lhs = group_commutator(Spectrum(a), Spectrum(b), tau);
  UnitaryMatrix target = commutator_target(a, b, tau);
  const double d = spectral_norm(lhs.matrix() - target.matrix());
  return {std::move(lhs), std::move(target), d};
}

UnitaryMatrix unitary_power(const UnitaryMatrix& g, long long p) {
  if (p < 0) return unitary_power(g.adjoint(), -p);
  UnitaryMatrix result = UnitaryMatrix::identity(g.dim());
  UnitaryMatrix base = g;
  while (p > 0) {
    if (p & 1) result = result * base;
    p >>= 1;
    if (p > 0) base = base * base;
  }
  return result;
}

GroupCommutatorResult trotter_repeat(const HermitianGenerator& a,
                                     const HermitianGenerator& b, double tau, int n) {
  if (n < 1) throw std::invalid_argument("repetition count n must be >= 1");
  if (a.dim() != b.dim()) throw DimensionMismatch("A and B dimensions differ");
  const UnitaryMatrix g = group_commutator(Spectrum(a), Spectrum(b), tau / n);
  UnitaryMatrix approx = unitary_power(g, static_cast<long long>(n) * n);
  UnitaryMatrix target = commutator_target(a, b, tau);
  const double d = spectral_norm(approx.matrix() - target.matrix());
  return {std::move(approx), std::move(target), d};
}

// ----------------------------------------------------------------- scenario

ScenarioCase parse_scenario_case(const std::string& text) {
  if (text == "free_atom") return ScenarioCase::free_atom;
  if (text == "harmonic_trap") return ScenarioCase::harmonic_trap;
  throw std::invalid_argument("invalid scenario '" + text +
                              "' (expected free_atom or harmonic_trap)");
}

std::string to_string(ScenarioCase c) {
  return c == ScenarioCase::free_atom ? "free_atom" : "harmonic_trap";
}

void CommutatorScenario::validate() const {
  if (!(tau > 0.0)) throw std::invalid_argument("scenario tau must be > 0");
  if (!(units.hbar > 0.0) || !(units.mass > 0.0)) {
    throw std::invalid_argument("scenario units must be positive");
  }
  if (kind == ScenarioCase::harmonic_trap) {
    if (!(omega > 0.0)) throw std::invalid_argument("harmonic scenario needs omega > 0");
    if (levels < 2) throw std::invalid_argument("harmonic scenario needs >= 2 levels");
  } else {
    if (!(box_length > 0.0) || grid_points < 16) {
      throw std::invalid_argument("free-atom scenario needs L > 0 and >= 16 grid points");
    }
  }
}

Index CommutatorScenario::com_dim() const {
  return kind == ScenarioCase::harmonic_trap ? levels : grid_points;
}

Grid CommutatorScenario::grid() const { return Grid(box_length, grid_points); }

Matrix scenario_position(const CommutatorScenario& sc) {
  sc.validate();
  if (sc.kind == ScenarioCase::harmonic_trap) {
    return oscillator_position(sc.levels, sc.omega, sc.units);
  }
  return grid_position(sc.grid());
}

HermitianGenerator scenario_a(const CommutatorScenario& sc, int a) {
  sc.validate();
  const Index d = sc.com_dim();
  return HermitianGenerator(kron(Matrix::Identity(d, d), spin_operator(Axis::y)) *
                            (a * sc.theta / sc.tau));
}

HermitianGenerator scenario_b(const CommutatorScenario& sc) {
  sc.validate();
  Matrix com_h;
  if (sc.kind == ScenarioCase::harmonic_trap) {
    com_h = oscillator_hamiltonian(sc.levels, sc.omega, sc.units).matrix();
  } else {
    const Matrix p = grid_momentum(sc.grid(), sc.units);
    com_h = p * p / (2.0 * sc.units.mass);
  }
  const Matrix x = scenario_position(sc);
  const Matrix h = kron(com_h, Matrix::Identity(2, 2)) -
                   sc.K * kron(x, spin_operator(Axis::x));
  return HermitianGenerator(0.5 * (h + h.adjoint()) / sc.units.hbar);
}

Matrix analytic_commutator(const CommutatorScenario& sc, int a) {
  return Complex(0.0, a * sc.theta / sc.tau * sc.K / sc.units.hbar) *
         kron(scenario_position(sc), spin_operator(Axis::z));
}

double SynthesizedPropagator::max_defect() const {
  return defect.empty() ? 0.0 : *std::max_element(defect.begin(), defect.end());
}

SynthesizedPropagator synthesize_ic_momentum_propagator(
    const CommutatorScenario& sc, int n, const std::vector<int>& logical_values) {
  if (n < 1) throw std::invalid_argument("repetition count n must be >= 1");
  sc.validate();
  const Index d = sc.com_dim();
  const Spectrum b(scenario_b(sc));
  const UnitaryMatrix eb = b.exp(sc.tau / n);
  const UnitaryMatrix com_id = UnitaryMatrix::identity(d);
  const Matrix x = scenario_position(sc);
  const Matrix xz = kron(x, spin_operator(Axis::z));

  SynthesizedPropagator out;
  out.logical_values = logical_values;
  out.p0 = sc.p0();
  out.sector_displacement = sc.sector_displacement();
  for (int a : logical_values) {
    // exp(-iA tau/n) is a basic IC unitary about y with angle theta/n.
    BasicIcUnitary spec;
    spec.axis = Axis::y;
    spec.angle = sc.theta / n;
    spec.logical_value = a;
    const UnitaryMatrix ea = tensor(com_id, basic_ic_unitary(spec, RegisterContext{1, 2}));
    const UnitaryMatrix g = ea * eb * ea.adjoint() * eb.adjoint();
    UnitaryMatrix approx = unitary_power(g, static_cast<long long>(n) * n);
    const Matrix gen = xz * (a * sc.theta * sc.tau * sc.K / sc.units.hbar);
    UnitaryMatrix exact = expm_generator(HermitianGenerator(gen), 1.0);
    out.defect.push_back(spectral_norm(approx.matrix() - exact.matrix()));
    out.synthesized.push_back(std::move(approx));
    out.exact.push_back(std::move(exact));
  }
  return out;
}

UnitaryMatrix sector_target(const CommutatorScenario& sc, int a) {
  const Matrix x = scenario_position(sc);
  return expm_generator(HermitianGenerator(x * (a * sc.p0() / sc.units.hbar)), 1.0);
}

StateVector scenario_initial_state(const CommutatorScenario& sc,
                                   const GridWavefunction& initial) {
  sc.validate();
  if (initial.internal()) {
    const Vector zero = internal_basis_state(0);
    const Vector& v = *initial.internal();
    if ((v - zero).norm() > 1e-12) {
      throw std::invalid_argument("two-branch run needs the internal state |0>");
    }
  }
  Vector com;
  BasisTag com_basis;
  if (sc.kind == ScenarioCase::free_atom) {
    if (!(initial.grid() == sc.grid())) {
      throw DimensionMismatch("initial grid does not match the scenario grid");
    }
    com = initial.com() * std::sqrt(initial.grid().dx());
    com_basis = BasisTag::generic(sc.com_dim());
  } else {
    auto basis = std::make_shared<const EigenBasis>(
        EigenBasis::harmonic(initial.grid(), sc.levels, sc.omega, sc.units));
    com = analyze(basis, initial).coefficients;
    com_basis = BasisTag::oscillator(sc.levels);
  }
  // Unit l2 norm: grid samples carry sqrt(dx); oscillator coefficients are
  // renormalized after truncation.
  StateVector com_state = StateVector(com_basis, com).normalized();
  return tensor(com_state, StateVector(BasisTag::qudits(1, 2), internal_basis_state(0)));
}

BranchPairTrace appendix_quansdam_run(const CommutatorScenario& sc, int n,
                                      const GridWavefunction& initial, bool use_exact) {
  const StateVector psi0 = scenario_initial_state(sc, initial);
  const SynthesizedPropagator prop = synthesize_ic_momentum_propagator(sc, n);
  BranchPairTrace t;
  t.logical_values = prop.logical_values;
  t.ic_step_count = 1;
  t.qm_step_count = 0;
  for (std::size_t b = 0; b < prop.logical_values.size(); ++b) {
    const UnitaryMatrix& u = use_exact ? prop.exact[b] : prop.synthesized[b];
    t.branch_states.push_back({psi0, apply_unitary(u, psi0)});
  }
  t.overlaps = {t.overlap(0, 1, 0), t.overlap(0, 1, 1)};
  t.post_ic_overlaps = {t.overlaps[1]};
  return t;
}

}  // namespace qsd
