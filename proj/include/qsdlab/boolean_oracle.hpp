#pragma once

// Reversible Boolean oracle for single-marked-item search: U_f, the five-step
// BFSEQ = V0 U_f V(theta) U_f V0 on main (x) func (x) aux, and its selective
// decomposition.

#include "qsdlab/hilbert.hpp"
#include "qsdlab/oracle_register.hpp"

#include <cstdint>
#include <string>

namespace qsd {

struct SearchOracleSpec {
  int n = 1;
  std::uint64_t x0 = 0;

  SearchOracleSpec() = default;
  SearchOracleSpec(int n, std::uint64_t x0);

  /// Parses "n=4,x0=11". Errors name the offending token.
  static SearchOracleSpec parse(const std::string& text);

  std::uint64_t size() const { return std::uint64_t{1} << n; }
  bool f(std::uint64_t x) const { return x == x0; }
  /// a_k = 1 - 2 b_k with b_1 the most significant bit of x0.
  LogicalVector logical() const;
};

/// Flat index of |x>|func>|aux>.
inline Index ancilla_index(std::uint64_t x, int func, int aux) {
  return static_cast<Index>(x * 4 + static_cast<std::uint64_t>(func) * 2 +
                            static_cast<std::uint64_t>(aux));
}

/// |x>|b> -> |x>|b xor f(x)> on main (x) func.
UnitaryMatrix u_f(const SearchOracleSpec& spec);

/// |x1>|b> -> |x1>|b xor f(x1)>, identity on every other x.
UnitaryMatrix v_f_single(const SearchOracleSpec& spec, std::uint64_t x1);

/// exp(-i pi/2) exp(i pi I_x) = [[0,1],[1,0]].
UnitaryMatrix v0_gate();
/// Diag(1, 1, 1, e^{-i theta}) on func (x) aux.
UnitaryMatrix v_theta_gate(double theta);

/// V0 W V(theta) W V0 on main (x) func (x) aux for a main (x) func unitary W.
UnitaryMatrix five_step_sequence(const UnitaryMatrix& w, int n, double theta);

UnitaryMatrix bfseq(const SearchOracleSpec& spec, double theta);

/// <00|_anc U |00>_anc block acting on main.
Matrix reduced_main_action(const UnitaryMatrix& full, int n);

/// Largest amplitude left outside ancilla |00> over all inputs |x>|0>|0>.
double ancilla_leakage(const UnitaryMatrix& full, int n);

/// U_o(theta): e^{-i theta} at x0.
UnitaryMatrix usual_oracle(const SearchOracleSpec& spec, double theta);

/// BFSEQ(y, theta): the five-step sequence with U_f replaced by V_{f(y)},
/// reduced to main. Phase on |x0> only when y = x0.
UnitaryMatrix selective_bfseq(const SearchOracleSpec& spec, std::uint64_t y,
                              double theta);

struct DecompositionReport {
  /// max|prod_y BFSEQ(y) - reduced BFSEQ|.
  double bfseq_product_deviation = 0.0;
  /// max|prod_x V_{f(x)} - U_f|.
  double vf_product_deviation = 0.0;
  /// max over y != x0 of max|BFSEQ(y) - I|.
  double non_solution_identity_deviation = 0.0;
  /// Forward vs reversed product order.
  double ordering_deviation = 0.0;
};

inline constexpr int kMaxExhaustiveQubits = 6;

DecompositionReport parallel_decomposition_check(const SearchOracleSpec& spec,
                                                 double theta);

struct EquivalenceReport {
  SearchOracleSpec spec;
  double theta = 0.0;
  double bfseq_vs_usual = 0.0;
  double usual_vs_selective_phase = 0.0;
  double selective_bfseq_vs_usual = 0.0;
  double bfseq_vs_selective_phase = 0.0;
  double ancilla_leakage = 0.0;

  double max_deviation() const;
};

/// Entrywise comparison of reduced BFSEQ, U_o, C_S and BFSEQ(x0, theta).
EquivalenceReport oracle_equivalence(const SearchOracleSpec& spec, double theta);

}  // namespace qsd
