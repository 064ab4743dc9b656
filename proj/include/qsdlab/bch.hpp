#pragma once

// Group-commutator (BCH-type) extraction of exp(-tau^2 [A,B]) and its
// Trotter-style repetition, applied to a two-level atom whose internal state
// couples to its centre-of-mass coordinate.

#include "qsdlab/continuum.hpp"
#include "qsdlab/hilbert.hpp"
#include "qsdlab/quansdam.hpp"

#include <string>
#include <vector>

namespace qsd {

struct GroupCommutatorResult {
  UnitaryMatrix approx;
  UnitaryMatrix target;
  /// Spectral norm of approx - target.
  double defect;
};

/// exp(-iA tau) exp(-iB tau) exp(iA tau) exp(iB tau).
UnitaryMatrix group_commutator(const Spectrum& a, const Spectrum& b, double tau);

/// exp(-tau^2 [A,B]), evaluated as exp(-i G) with G = -i tau^2 [A,B] Hermitian.
UnitaryMatrix commutator_target(const HermitianGenerator& a,
                                const HermitianGenerator& b, double tau);

GroupCommutatorResult bch_group_commutator(const HermitianGenerator& a,
                                           const HermitianGenerator& b,
                                           double tau);

/// g^p by repeated squaring.
UnitaryMatrix unitary_power(const UnitaryMatrix& g, long long p);

/// (group commutator at tau/n)^(n^2) against exp(-tau^2 [A,B]).
GroupCommutatorResult trotter_repeat(const HermitianGenerator& a,
                                     const HermitianGenerator& b, double tau,
                                     int n);

enum class ScenarioCase { free_atom, harmonic_trap };

ScenarioCase parse_scenario_case(const std::string& text);
std::string to_string(ScenarioCase c);

/// Tensor order is COM (x) internal. H_a = 0 (on resonance, rotating frame).
struct CommutatorScenario {
  ScenarioCase kind = ScenarioCase::harmonic_trap;
  double K = 1.0;
  double omega = 1.0;
  double theta = 0.5;
  double tau = 0.1;
  Units units{};
  /// Oscillator levels for harmonic_trap.
  Index levels = 32;
  /// Periodic grid for free_atom.
  double box_length = 40.0;
  Index grid_points = 128;

  void validate() const;
  Index com_dim() const;
  Grid grid() const;
  /// p0 = K tau theta / 2.
  double p0() const { return 0.5 * K * tau * theta; }
  /// Momentum displacement on the internal |0> sector (m_z = 1/2):
  /// m_z K tau theta, equal to p0.
  double sector_displacement() const { return 0.5 * K * tau * theta; }
};

/// COM position operator of the scenario (oscillator or grid representation).
Matrix scenario_position(const CommutatorScenario& sc);

/// A = a theta I_y / tau on the internal factor.
HermitianGenerator scenario_a(const CommutatorScenario& sc, int a);
/// B = H_A / hbar = (p^2/2m [+ m w^2 x^2 / 2] - K x I_x) / hbar.
HermitianGenerator scenario_b(const CommutatorScenario& sc);
/// (i a theta / tau)(K / hbar) x I_z.
Matrix analytic_commutator(const CommutatorScenario& sc, int a);

struct SynthesizedPropagator {
  std::vector<int> logical_values;
  std::vector<UnitaryMatrix> synthesized;
  std::vector<UnitaryMatrix> exact;
  std::vector<double> defect;
  double p0 = 0.0;
  double sector_displacement = 0.0;

  double max_defect() const;
};

/// Per branch: (exp(-i a (theta/n) I_y) exp(-iB tau/n) exp(+i a (theta/n) I_y)
/// exp(+iB tau/n))^(n^2) against exp(-i a theta tau (K/hbar) x I_z).
SynthesizedPropagator synthesize_ic_momentum_propagator(
    const CommutatorScenario& sc, int n,
    const std::vector<int>& logical_values = {1, -1});

/// exp(-i a p0 x / hbar) on the COM factor alone.
UnitaryMatrix sector_target(const CommutatorScenario& sc, int a);

/// COM state of the scenario from a grid wavefunction: the grid samples for
/// free_atom, Hermite coefficients for harmonic_trap. Internal factor |0>.
StateVector scenario_initial_state(const CommutatorScenario& sc,
                                   const GridWavefunction& initial);

/// One-step two-branch run of the synthesized (or exact, use_exact = true)
/// propagator on initial (x) |0>.
BranchPairTrace appendix_quansdam_run(const CommutatorScenario& sc, int n,
                                      const GridWavefunction& initial,
                                      bool use_exact = false);

}  // namespace qsd
