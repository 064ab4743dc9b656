#pragma once

// Selective diagonal operators, candidate solution states and the basic
// information-carrying (IC) unitary on qubit and qutrit registers.

#include "qsdlab/hilbert.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qsd {

/// Logical numbers a_k: +1/-1 for qubits (arity 2), +1/0/-1 for qutrits.
class LogicalVector {
 public:
  LogicalVector(int arity, std::vector<int> values);

  /// Parses "+1,-1,0". Throws std::invalid_argument naming the bad token.
  static LogicalVector parse(const std::string& text, int arity = 2);
  static LogicalVector from_index(std::uint64_t index, int sites, int arity);

  int arity() const { return arity_; }
  int size() const { return static_cast<int>(values_.size()); }
  const std::vector<int>& values() const { return values_; }
  int operator[](int k) const { return values_[static_cast<std::size_t>(k)]; }

  /// Basis index S. Qubit: sum (1-a_k)/2 * 2^(n-k); qutrit: sum (1-a_k) 3^(n-k).
  std::uint64_t index() const;
  std::string to_string() const;

  bool operator==(const LogicalVector&) const = default;

 private:
  int arity_;
  std::vector<int> values_;
};

/// Single-site factor of the projector: 1/2 E + a I_z (qubit) or
/// (1-|a|) E + a/2 I_z + (3|a|/2 - 1) I_z^2 (qutrit).
Matrix oracle_site_factor(int a, int arity);

/// Rank-1 projector D_S as the tensor product of site factors.
HermitianGenerator oracle_projector(const LogicalVector& l);

/// C_S(theta) = exp(-i theta D_S): e^{-i theta} at S, 1 elsewhere.
UnitaryMatrix selective_phase(const LogicalVector& l, double theta);

struct CandidateState {
  LogicalVector logical;
  StateVector state;
  std::uint64_t index;
};

/// Evaluates the unnormalized tensor-product form literally and checks that
/// it collapses onto the unit basis vector at l.index(). Throws
/// std::logic_error when it does not.
CandidateState candidate_state(const LogicalVector& l);

enum class Embedding { spin, pseudospin };

Embedding parse_embedding(const std::string& text);

struct BasicIcUnitary {
  Axis axis = Axis::x;
  double angle = 0.0;
  int logical_value = 1;
  int target = 0;
  Embedding embedding = Embedding::spin;
};

struct RegisterContext {
  int sites = 1;
  int local_dim = 2;

  Index dim() const;
};

/// I_{m lambda} embedded in the register. Pseudospin embedding projects every
/// other site on its first basis state.
HermitianGenerator ic_generator(const BasicIcUnitary& spec,
                                const RegisterContext& reg);

/// exp(-i a theta I_{m lambda}).
UnitaryMatrix basic_ic_unitary(const BasicIcUnitary& spec,
                               const RegisterContext& reg);

/// theta_m = c / 2^n.
double register_scaled_angle(int sites, double c = 1.0);

}  // namespace qsd
