#include "qsdlab/hilbert.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qsd {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << what << ": expected a non-empty square matrix, got " << m.rows()
       << "x" << m.cols();
    throw DimensionMismatch(os.str());
  }
}

void require_same_dim(Index a, Index b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension " << a << " vs " << b;
    throw DimensionMismatch(os.str());
  }
}

}  // namespace

Axis parse_axis(const std::string& text) {
  if (text == "x" || text == "X") return Axis::x;
  if (text == "y" || text == "Y") return Axis::y;
  if (text == "z" || text == "Z") return Axis::z;
  throw std::invalid_argument("invalid axis '" + text + "' (expected x, y or z)");
}

char axis_name(Axis axis) {
  switch (axis) {
    case Axis::x: return 'x';
    case Axis::y: return 'y';
    case Axis::z: return 'z';
  }
  return '?';
}

// ---------------------------------------------------------------- BasisTag

BasisTag::BasisTag(std::vector<BasisFactor> factors)
    : factors_(std::move(factors)) {
  for (const auto& f : factors_) {
    if (f.dim <= 0) throw std::invalid_argument("basis factor with dim <= 0");
    if (!(f.weight > 0.0)) {
      throw std::invalid_argument("basis factor with non-positive weight");
    }
  }
}

BasisTag BasisTag::qudits(int sites, int local_dim) {
  if (sites < 1 || local_dim < 2) {
    throw std::invalid_argument("qudit register needs sites >= 1, dim >= 2");
  }
  return BasisTag(std::vector<BasisFactor>(
      static_cast<std::size_t>(sites), {FactorKind::qudit, local_dim, 1.0}));
}

BasisTag BasisTag::grid(Index points, double spacing) {
  return BasisTag({{FactorKind::grid, points, spacing}});
}

BasisTag BasisTag::oscillator(Index levels) {
  return BasisTag({{FactorKind::oscillator, levels, 1.0}});
}

BasisTag BasisTag::generic(Index dim) {
  return BasisTag({{FactorKind::generic, dim, 1.0}});
}

Index BasisTag::dim() const {
  if (factors_.empty()) return 0;
  Index d = 1;
  for (const auto& f : factors_) d *= f.dim;
  return d;
}

double BasisTag::weight() const {
  double w = 1.0;
  for (const auto& f : factors_) w *= f.weight;
  return w;
}

BasisTag BasisTag::tensor(const BasisTag& other) const {
  std::vector<BasisFactor> all = factors_;
  all.insert(all.end(), other.factors_.begin(), other.factors_.end());
  return BasisTag(std::move(all));
}

// ------------------------------------------------------------- StateVector

StateVector::StateVector(BasisTag basis, Vector amplitudes)
    : basis_(std::move(basis)), amplitudes_(std::move(amplitudes)) {
  require_same_dim(basis_.dim(), amplitudes_.size(), "StateVector");
}

StateVector StateVector::basis_state(const BasisTag& basis, Index index) {
  if (index < 0 || index >= basis.dim()) {
    throw std::out_of_range("basis index out of range");
  }
  Vector v = Vector::Zero(basis.dim());
  v(index) = 1.0 / std::sqrt(basis.weight());
  return StateVector(basis, std::move(v));
}

double StateVector::norm() const {
  return std::sqrt(basis_.weight() * amplitudes_.squaredNorm());
}

bool StateVector::is_normalized(double tol) const {
  return std::abs(norm() - 1.0) <= tol;
}

StateVector StateVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw std::domain_error("cannot normalize the zero vector");
  return StateVector(basis_, amplitudes_ / n);
}

// ---------------------------------------------- HermitianGenerator, Unitary

HermitianGenerator::HermitianGenerator(Matrix matrix, double tol)
    : matrix_(std::move(matrix)) {
  require_square(matrix_, "HermitianGenerator");
  const double d = hermiticity_defect(matrix_);
  if (d > tol) {
    std::ostringstream os;
    os << "matrix is not Hermitian: max|M - M^dagger| = " << d;
    throw NotHermitian(os.str());
  }
}

UnitaryMatrix::UnitaryMatrix(Matrix matrix, double tol)
    : matrix_(std::move(matrix)) {
  require_square(matrix_, "UnitaryMatrix");
  const double d = unitarity_defect(matrix_);
  if (d > tol) {
    std::ostringstream os;
    os << "matrix is not unitary: max|U^dagger U - I| = " << d;
    throw NotUnitary(os.str());
  }
}

UnitaryMatrix UnitaryMatrix::identity(Index dim) {
  return UnitaryMatrix(Trusted{}, Matrix::Identity(dim, dim));
}

UnitaryMatrix UnitaryMatrix::assume_unitary(Matrix matrix) {
  require_square(matrix, "UnitaryMatrix");
  return UnitaryMatrix(Trusted{}, std::move(matrix));
}

UnitaryMatrix UnitaryMatrix::adjoint() const {
  return UnitaryMatrix(Trusted{}, matrix_.adjoint());
}

UnitaryMatrix operator*(const UnitaryMatrix& lhs, const UnitaryMatrix& rhs) {
  require_same_dim(lhs.dim(), rhs.dim(), "unitary product");
  return UnitaryMatrix(UnitaryMatrix::Trusted{}, lhs.matrix_ * rhs.matrix_);
}

// ---------------------------------------------------------------- Spectrum

Spectrum::Spectrum(const HermitianGenerator& h) {
  // Symmetrize so round-off below the Hermiticity tolerance cannot leak
  // into the eigensolver.
  const Matrix sym = 0.5 * (h.matrix() + h.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("Hermitian eigendecomposition failed");
  }
  values_ = solver.eigenvalues();
  vectors_ = solver.eigenvectors();
}

UnitaryMatrix Spectrum::exp(double t) const {
  Vector phases(values_.size());
  for (Index k = 0; k < values_.size(); ++k) {
    phases(k) = std::polar(1.0, -values_(k) * t);
  }
  return UnitaryMatrix::assume_unitary(
      vectors_ * phases.asDiagonal() * vectors_.adjoint());
}

// ------------------------------------------------------------- operations

Complex inner_product(const StateVector& a, const StateVector& b) {
  if (!(a.basis() == b.basis())) {
    throw DimensionMismatch("inner_product: basis tags differ");
  }
  return a.basis().weight() * a.amplitudes().dot(b.amplitudes());
}

StateVector apply_unitary(const UnitaryMatrix& u, const StateVector& s) {
  require_same_dim(u.dim(), s.dim(), "apply_unitary");
  return StateVector(s.basis(), u.matrix() * s.amplitudes());
}

UnitaryMatrix expm_generator(const HermitianGenerator& h, double t) {
  if (t == 0.0) return UnitaryMatrix::identity(h.dim());
  return Spectrum(h).exp(t);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

UnitaryMatrix tensor(const UnitaryMatrix& a, const UnitaryMatrix& b) {
  return UnitaryMatrix::assume_unitary(kron(a.matrix(), b.matrix()));
}

HermitianGenerator tensor(const HermitianGenerator& a,
                          const HermitianGenerator& b) {
  return HermitianGenerator(kron(a.matrix(), b.matrix()));
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  Vector out = Eigen::kroneckerProduct(a.amplitudes(), b.amplitudes()).eval();
  return StateVector(a.basis().tensor(b.basis()), std::move(out));
}

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

double max_abs_entry(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const Matrix& m) {
  return max_abs_entry(m - m.adjoint());
}

double unitarity_defect(const Matrix& m) {
  return max_abs_entry(m.adjoint() * m -
                       Matrix::Identity(m.cols(), m.cols()));
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  // Largest eigenvalue of the Gram matrix; cheaper than a full SVD and
  // accurate relative to the norm itself.
  const Matrix gram = m.cols() <= m.rows() ? Matrix(m.adjoint() * m)
                                           : Matrix(m * m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(solver.eigenvalues().maxCoeff(), 0.0));
}

Matrix spin_operator(Axis axis, int local_dim) {
  const Complex i(0.0, 1.0);
  if (local_dim == 2) {
    Matrix s(2, 2);
    switch (axis) {
      case Axis::x: s << 0, 1, 1, 0; break;
      case Axis::y: s << 0, -i, i, 0; break;
      case Axis::z: s << 1, 0, 0, -1; break;
    }
    return 0.5 * s;
  }
  if (local_dim == 3) {
    const double r = 1.0 / std::sqrt(2.0);
    Matrix s = Matrix::Zero(3, 3);
    switch (axis) {
      case Axis::x:
        s(0, 1) = s(1, 0) = s(1, 2) = s(2, 1) = r;
        break;
      case Axis::y:
        s(0, 1) = -i * r;
        s(1, 0) = i * r;
        s(1, 2) = -i * r;
        s(2, 1) = i * r;
        break;
      case Axis::z:
        s(0, 0) = 1.0;
        s(2, 2) = -1.0;
        break;
    }
    return s;
  }
  throw std::invalid_argument("spin_operator supports local_dim 2 or 3");
}

Matrix embed_site(const Matrix& op, int site, int sites, int local_dim) {
  if (site < 0 || site >= sites) throw std::out_of_range("site out of range");
  require_same_dim(op.rows(), local_dim, "embed_site");
  Index left = 1;
  for (int s = 0; s < site; ++s) left *= local_dim;
  Index right = 1;
  for (int s = site + 1; s < sites; ++s) right *= local_dim;
  return kron(kron(Matrix::Identity(left, left), op),
              Matrix::Identity(right, right));
}

}  // namespace qsd
