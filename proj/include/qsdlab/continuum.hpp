#pragma once

// One-dimensional centre-of-mass motion on a periodic box grid, optionally
// tensored with a two-level internal factor: momentum eigenfunctions,
// phase-based QUANSDAM, energy-eigenbasis expansions and truncation errors.

#include "qsdlab/hilbert.hpp"
#include "qsdlab/quansdam.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace qsd {

/// Uniform periodic grid on (-L/2, L/2]: x_j = -L/2 + (j+1) L/N.
class Grid {
 public:
  Grid(double length, Index points);

  double length() const { return length_; }
  Index points() const { return points_; }
  double dx() const { return length_ / static_cast<double>(points_); }
  double x(Index j) const;
  RealVector positions() const;
  BasisTag basis() const { return BasisTag::grid(points_, dx()); }

  bool operator==(const Grid&) const = default;

 private:
  double length_;
  Index points_;
};

/// COM samples plus an optional internal two-level factor. The full state is
/// com (x) internal.
class GridWavefunction {
 public:
  GridWavefunction(Grid grid, Vector com,
                   std::optional<Vector> internal = std::nullopt);

  const Grid& grid() const { return grid_; }
  const Vector& com() const { return com_; }
  const std::optional<Vector>& internal() const { return internal_; }

  /// Quadrature norm of the COM factor.
  double norm() const;
  bool is_normalized(double tol = 1e-8) const;
  GridWavefunction normalized() const;
  GridWavefunction with_internal(Vector internal) const;
  StateVector to_state() const;

 private:
  Grid grid_;
  Vector com_;
  std::optional<Vector> internal_;
};

Complex overlap(const GridWavefunction& a, const GridWavefunction& b);

/// (1/sqrt(L)) exp(i p_k x / hbar), p_k = 2 pi hbar k / L.
GridWavefunction momentum_eigenfunction(double L, int k, Index points);

double box_momentum(double L, int k, const Units& units = {});

/// Internal factor |0> (m = +1/2) or |1> (m = -1/2).
Vector internal_basis_state(int level);

/// Multiplies by exp(-i a p0' m_z x / hbar). When an internal factor is
/// present it must be an I_z eigenvector with eigenvalue m_z.
GridWavefunction phase_quansdam_step(const GridWavefunction& psi,
                                     double p0_prime, int a, double m_z,
                                     const Units& units = {});

/// Gaussian packet exp(-(x-x0)^2 / (4(var + i beta)) + i p x / hbar),
/// beta = hbar T / (2m), normalized on the grid.
GridWavefunction gaussian_wavefunction(const Grid& grid,
                                       const GaussianPacketParams& params,
                                       const Units& units = {});

/// Mean momentum from the discrete Fourier transform of the COM factor.
double momentum_centroid(const GridWavefunction& psi, const Units& units = {});

// ------------------------------------------------------- operators on x, p

/// Lowering operator on `levels` oscillator levels.
Matrix ladder_lowering(Index levels);
Matrix oscillator_position(Index levels, double omega, const Units& units = {});
Matrix oscillator_momentum(Index levels, double omega, const Units& units = {});
/// p^2/2m + m w^2 x^2/2 built on levels+1 and projected to `levels`, so it is
/// diag((k + 1/2) hbar w) without edge error.
HermitianGenerator oscillator_hamiltonian(Index levels, double omega,
                                          const Units& units = {});

Matrix grid_position(const Grid& grid);
/// Spectral momentum operator F^dagger diag(p_k) F on the periodic grid.
Matrix grid_momentum(const Grid& grid, const Units& units = {});
HermitianGenerator grid_harmonic_hamiltonian(const Grid& grid, double omega,
                                             const Units& units = {});

// ---------------------------------------------------------- eigenbasis

/// Energy eigenfunctions sampled on a grid (columns, quadrature normalized).
class EigenBasis {
 public:
  EigenBasis(Grid grid, Matrix functions, RealVector energies);

  /// Hermite functions from the three-term recurrence. Throws if grid
  /// orthonormality is worse than 1e-8.
  static EigenBasis harmonic(const Grid& grid, Index levels, double omega,
                             const Units& units = {});
  /// Eigenvectors of a grid Hamiltonian (complete on the grid).
  static EigenBasis diagonalize(const Grid& grid, const HermitianGenerator& h);

  const Grid& grid() const { return grid_; }
  const Matrix& functions() const { return functions_; }
  const RealVector& energies() const { return energies_; }
  Index size() const { return energies_.size(); }
  double orthonormality_defect() const;

 private:
  Grid grid_;
  Matrix functions_;
  RealVector energies_;
};

inline constexpr Index kDefaultOscillatorLevels = 128;

struct EigenbasisExpansion {
  /// May be null for a bare coefficient sequence.
  std::shared_ptr<const EigenBasis> basis;
  RealVector energies;
  Vector coefficients;
  /// Squared norm of the part of the source state outside the basis span.
  double remainder_norm_sq = 0.0;

  Index truncation() const { return coefficients.size(); }
};

EigenbasisExpansion make_expansion(RealVector energies, Vector coefficients);
EigenbasisExpansion analyze(std::shared_ptr<const EigenBasis> basis,
                            const GridWavefunction& psi);
/// Sum_k A_k u_k on the basis grid.
GridWavefunction synthesize(const EigenbasisExpansion& e);

/// Sum_k conj(A_k) B_k.
Complex expansion_overlap(const EigenbasisExpansion& a,
                          const EigenbasisExpansion& b);

/// A_k -> A_k exp(-i E_k t / hbar).
EigenbasisExpansion propagate_by_expansion(const EigenbasisExpansion& e,
                                           double t, const Units& units = {});

struct IcPropagatorSpec {
  /// Diagonal in the expansion basis. When absent the expansion energies
  /// are used.
  std::optional<HermitianGenerator> generator;
  double t_m = 0.0;
  std::vector<int> logical_values = {1, -1};
};

/// exp(-i a H t_m / hbar) for one logical value.
UnitaryMatrix ic_propagator(const HermitianGenerator& h, double t_m, int a,
                            const Units& units = {});

/// One expansion per logical value.
std::vector<EigenbasisExpansion> ic_propagate(const EigenbasisExpansion& e,
                                              const IcPropagatorSpec& spec,
                                              const Units& units = {});

/// sqrt(sum_{k<L} |A_k|^2 + sum_{k>=L+M} |A_k|^2 + remainder).
double truncation_error(const EigenbasisExpansion& e, Index L, Index M);

struct ConvergenceWitness {
  bool found = false;
  Index L = 0;
  Index M = 0;
  double epsilon = 0.0;
};

/// Smallest M <= poly_bound (then smallest L) with truncation_error < eps.
ConvergenceWitness fast_convergence_check(const EigenbasisExpansion& e,
                                          double eps, Index poly_bound);

// ------------------------------------------------------------------- USEQ

/// Ordered product; steps[0] acts first.
UnitaryMatrix useq_assemble(const std::vector<UnitaryMatrix>& steps);

struct UseqDefect {
  int logical_value = 1;
  /// Spectral norm of USEQ - target.
  double defect = 0.0;
  /// Same after removing the best global phase.
  double defect_up_to_phase = 0.0;
};

UseqDefect useq_defect(const UnitaryMatrix& useq, const UnitaryMatrix& target,
                       int logical_value);

/// Exact two-qubit sequence for exp(-i a t diag(h)): Z rotations as basic IC
/// unitaries around a CNOT-conjugated ZZ term. Exact when trace(h) = 0;
/// otherwise off by a global phase.
std::vector<UnitaryMatrix> diagonal_useq_steps(const RealVector& h, double t,
                                               int a);

// -------------------------------------------------------------------- CSV

/// x, re, im of the COM factor.
std::string grid_csv(const GridWavefunction& psi);
/// k, E_k, re A_k, im A_k.
std::string expansion_csv(const EigenbasisExpansion& e);

}  // namespace qsd
