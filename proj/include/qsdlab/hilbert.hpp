#pragma once

// Dense complex linear algebra shared by every other module: states over a
// labelled basis, Hermitian generators, unitaries and their exponentials.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsd {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kPi = 3.14159265358979323846;

struct Tolerances {
  double hermiticity = 1e-12;
  double unitarity = 1e-10;
  double normalization = 1e-12;
  double invariance = 1e-10;
};

inline constexpr Tolerances kDefaultTolerances{};

/// Physical unit record. Internal units default to hbar = m = 1.
struct Units {
  double hbar = 1.0;
  double mass = 1.0;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotHermitian : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NotUnitary : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class Axis { x, y, z };

Axis parse_axis(const std::string& text);
char axis_name(Axis axis);

enum class FactorKind { qudit, grid, oscillator, generic };

/// One tensor factor of a basis. `weight` is the quadrature weight of a
/// grid factor (its spacing); discrete factors carry weight 1.
struct BasisFactor {
  FactorKind kind = FactorKind::generic;
  Index dim = 0;
  double weight = 1.0;

  bool operator==(const BasisFactor&) const = default;
};

/// Ordered list of tensor factors. The first factor is the most significant
/// digit of the flat index (big-endian).
class BasisTag {
 public:
  BasisTag() = default;
  explicit BasisTag(std::vector<BasisFactor> factors);

  static BasisTag qudits(int sites, int local_dim);
  static BasisTag grid(Index points, double spacing);
  static BasisTag oscillator(Index levels);
  static BasisTag generic(Index dim);

  Index dim() const;
  double weight() const;
  const std::vector<BasisFactor>& factors() const { return factors_; }
  BasisTag tensor(const BasisTag& other) const;

  bool operator==(const BasisTag&) const = default;

 private:
  std::vector<BasisFactor> factors_;
};

class StateVector {
 public:
  StateVector(BasisTag basis, Vector amplitudes);

  static StateVector basis_state(const BasisTag& basis, Index index);

  const BasisTag& basis() const { return basis_; }
  const Vector& amplitudes() const { return amplitudes_; }
  Index dim() const { return amplitudes_.size(); }

  /// Quadrature norm sqrt(w * sum |a|^2).
  double norm() const;
  bool is_normalized(double tol = kDefaultTolerances.normalization) const;
  StateVector normalized() const;

 private:
  BasisTag basis_;
  Vector amplitudes_;
};

class HermitianGenerator {
 public:
  explicit HermitianGenerator(Matrix matrix,
                              double tol = kDefaultTolerances.hermiticity);

  const Matrix& matrix() const { return matrix_; }
  Index dim() const { return matrix_.rows(); }

 private:
  Matrix matrix_;
};

class UnitaryMatrix {
 public:
  explicit UnitaryMatrix(Matrix matrix,
                         double tol = kDefaultTolerances.unitarity);

  static UnitaryMatrix identity(Index dim);
  /// Skips the unitarity check; the caller guarantees it (products and
  /// exponentials built inside the library).
  static UnitaryMatrix assume_unitary(Matrix matrix);

  const Matrix& matrix() const { return matrix_; }
  Index dim() const { return matrix_.rows(); }
  UnitaryMatrix adjoint() const;

  friend UnitaryMatrix operator*(const UnitaryMatrix& lhs,
                                 const UnitaryMatrix& rhs);

 private:
  struct Trusted {};
  UnitaryMatrix(Trusted, Matrix matrix) : matrix_(std::move(matrix)) {}

  Matrix matrix_;
};

/// Eigendecomposition of a Hermitian generator, reused for exp(-i h t) at
/// many t (or at t scaled by a logical value).
class Spectrum {
 public:
  explicit Spectrum(const HermitianGenerator& h);

  UnitaryMatrix exp(double t) const;
  const RealVector& eigenvalues() const { return values_; }
  const Matrix& eigenvectors() const { return vectors_; }

 private:
  RealVector values_;
  Matrix vectors_;
};

Complex inner_product(const StateVector& a, const StateVector& b);
StateVector apply_unitary(const UnitaryMatrix& u, const StateVector& s);

/// exp(-i h t), evaluated through the Hermitian eigendecomposition.
UnitaryMatrix expm_generator(const HermitianGenerator& h, double t);

Matrix kron(const Matrix& a, const Matrix& b);
UnitaryMatrix tensor(const UnitaryMatrix& a, const UnitaryMatrix& b);
HermitianGenerator tensor(const HermitianGenerator& a,
                          const HermitianGenerator& b);
StateVector tensor(const StateVector& a, const StateVector& b);

Matrix commutator(const Matrix& a, const Matrix& b);

double max_abs_entry(const Matrix& m);
double hermiticity_defect(const Matrix& m);
double unitarity_defect(const Matrix& m);
/// Largest singular value.
double spectral_norm(const Matrix& m);

/// Spin operator I_axis of a single site: I = sigma/2 for local_dim 2,
/// the spin-1 matrices (basis m = +1, 0, -1) for local_dim 3.
Matrix spin_operator(Axis axis, int local_dim = 2);

/// Embeds a single-site operator at `site` of `sites` identical qudits.
Matrix embed_site(const Matrix& op, int site, int sites, int local_dim);

}  // namespace qsd
