#include "qsdlab/hilbert.hpp"
#include "qsdlab/random.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace qsd;
using qsd::testing::Gen;

TEST_SUITE("hilbert") {

TEST_CASE("inner product of basis states and a normalized state") {
  const BasisTag q = BasisTag::qudits(1, 2);
  const auto zero = StateVector::basis_state(q, 0);
  const auto one = StateVector::basis_state(q, 1);
  CHECK(std::abs(inner_product(zero, one)) == 0.0);
  CHECK(std::abs(inner_product(zero, zero) - 1.0) < 1e-15);

  Gen g(11);
  const StateVector a = g.state(8);
  const StateVector b = g.state(8);
  CHECK(std::abs(inner_product(a, a) - 1.0) < 1e-12);
  CHECK(std::abs(inner_product(a, b) - testing::direct_sum(a.amplitudes(), b.amplitudes())) < 1e-12);
}

TEST_CASE("inner product rejects mismatched bases") {
  const auto a = StateVector::basis_state(BasisTag::qudits(1, 2), 0);
  const auto b = StateVector::basis_state(BasisTag::qudits(2, 2), 0);
  const auto c = StateVector::basis_state(BasisTag::generic(2), 0);
  CHECK_THROWS_AS(inner_product(a, b), DimensionMismatch);
  CHECK_THROWS_AS(inner_product(a, c), DimensionMismatch);
}

TEST_CASE("grid inner product carries the quadrature weight") {
  const Index n = 64;
  const double dx = 0.125;
  Gen g(5);
  Vector a(n), b(n);
  for (Index j = 0; j < n; ++j) {
    a(j) = g.rng().complex_normal();
    b(j) = g.rng().complex_normal();
  }
  const StateVector sa(BasisTag::grid(n, dx), a), sb(BasisTag::grid(n, dx), b);
  CHECK(std::abs(inner_product(sa, sb) - testing::trapezoid(a, b, dx)) < 1e-8);
  const auto e = StateVector::basis_state(BasisTag::grid(n, dx), 3);
  CHECK(e.is_normalized());
}

TEST_CASE("state constructor checks the amplitude count") {
  CHECK_THROWS_AS(StateVector(BasisTag::qudits(2, 2), Vector::Zero(3)), DimensionMismatch);
  CHECK_THROWS_AS(StateVector::basis_state(BasisTag::qudits(1, 2), 2), std::out_of_range);
  CHECK_THROWS(StateVector(BasisTag::generic(2), Vector::Zero(2)).normalized());
}

TEST_CASE("apply_unitary: identity, bit flip, norm preservation") {
  const BasisTag q = BasisTag::qudits(1, 2);
  const auto zero = StateVector::basis_state(q, 0);
  CHECK((apply_unitary(UnitaryMatrix::identity(2), zero).amplitudes() - zero.amplitudes()).norm() == 0.0);
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  const auto flipped = apply_unitary(UnitaryMatrix(x), zero);
  CHECK(flipped.amplitudes()(1) == Complex(1.0));
  CHECK(flipped.amplitudes()(0) == Complex(0.0));
  Gen g(3);
  const auto s = g.state(16);
  CHECK(std::abs(apply_unitary(g.unitary(16), s).norm() - 1.0) < 1e-10);
  CHECK_THROWS_AS(apply_unitary(UnitaryMatrix::identity(4), zero), DimensionMismatch);
}

TEST_CASE("generator and unitary validation") {
  Matrix m(2, 2);
  m << 0, 1, 0, 0;
  CHECK_THROWS_AS(HermitianGenerator{m}, NotHermitian);
  CHECK_THROWS_AS(UnitaryMatrix{m}, NotUnitary);
  CHECK_THROWS_AS(HermitianGenerator{Matrix(2, 3)}, DimensionMismatch);
  Matrix near = Matrix::Identity(2, 2);
  near(0, 1) = 1e-13;
  CHECK_NOTHROW(HermitianGenerator{near});
}

TEST_CASE("expm_generator: t = 0, diagonal case, eigendecomposition oracle") {
  Gen g(21);
  const HermitianGenerator h = g.hermitian(6);
  CHECK(max_abs_entry(expm_generator(h, 0.0).matrix() - Matrix::Identity(6, 6)) == 0.0);

  const HermitianGenerator sz(spin_operator(Axis::z));
  const Matrix u = expm_generator(sz, kPi).matrix();
  CHECK(std::abs(u(0, 0) - std::polar(1.0, -kPi / 2)) < 1e-15);
  CHECK(std::abs(u(1, 1) - std::polar(1.0, kPi / 2)) < 1e-15);
  CHECK(std::abs(u(0, 1)) < 1e-15);

  const UnitaryMatrix v = expm_generator(h, 0.3);
  CHECK(max_abs_entry(v.matrix() - testing::pade_expm(h.matrix(), 0.3)) < 1e-10);
  CHECK(unitarity_defect(v.matrix()) < 1e-10);
}

TEST_CASE("spectrum reuse matches fresh exponentials") {
  Gen g(8);
  const HermitianGenerator h = g.hermitian(5);
  const Spectrum s(h);
  for (double t : {-1.0, 0.25, 2.0}) {
    CHECK(max_abs_entry(s.exp(t).matrix() - testing::pade_expm(h.matrix(), t)) < 1e-10);
  }
}

TEST_CASE("tensor products are big-endian") {
  CHECK(max_abs_entry(tensor(UnitaryMatrix::identity(2), UnitaryMatrix::identity(2)).matrix() -
                      Matrix::Identity(4, 4)) == 0.0);
  const BasisTag q = BasisTag::qudits(1, 2);
  const StateVector s = tensor(StateVector::basis_state(q, 0), StateVector::basis_state(q, 1));
  CHECK(s.amplitudes()(1) == Complex(1.0));
  CHECK(s.basis() == BasisTag::qudits(2, 2));

  const Matrix e = Matrix::Identity(2, 2);
  const Matrix iz = spin_operator(Axis::z);
  const Matrix d = kron(0.5 * e + iz, 0.5 * e - iz);
  Matrix expect = Matrix::Zero(4, 4);
  expect(1, 1) = 1.0;
  CHECK(max_abs_entry(d - expect) == 0.0);

  Gen g(2);
  const Matrix a = g.unitary(2).matrix(), b = g.unitary(3).matrix();
  CHECK(max_abs_entry(kron(a, b) - testing::loop_kron(a, b)) == 0.0);
}

TEST_CASE("spin operators obey the angular momentum algebra") {
  for (int d : {2, 3}) {
    const Matrix x = spin_operator(Axis::x, d), y = spin_operator(Axis::y, d),
                 z = spin_operator(Axis::z, d);
    CHECK(max_abs_entry(commutator(x, y) - Complex(0, 1) * z) < 1e-15);
    CHECK(max_abs_entry(commutator(y, z) - Complex(0, 1) * x) < 1e-15);
    const double s = (d - 1) / 2.0;
    CHECK(max_abs_entry(x * x + y * y + z * z - s * (s + 1) * Matrix::Identity(d, d)) < 1e-15);
  }
  CHECK_THROWS(spin_operator(Axis::x, 4));
  CHECK(parse_axis("y") == Axis::y);
  CHECK_THROWS_AS(parse_axis("w"), std::invalid_argument);
}

TEST_CASE("embed_site places the operator on one factor") {
  const Matrix z = spin_operator(Axis::z);
  const Matrix e = embed_site(z, 1, 3, 2);
  const Matrix i2 = Matrix::Identity(2, 2);
  CHECK(max_abs_entry(e - testing::loop_kron(testing::loop_kron(i2, z), i2)) == 0.0);
  CHECK_THROWS_AS(embed_site(z, 3, 3, 2), std::out_of_range);
}

TEST_CASE("spectral norm") {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 0) = 2.0;
  m(1, 2) = Complex(0, -5.0);
  CHECK(std::abs(spectral_norm(m) - 5.0) < 1e-12);
  Gen g(4);
  const Matrix u = g.unitary(7).matrix();
  CHECK(std::abs(spectral_norm(u) - 1.0) < 1e-12);
  CHECK(spectral_norm(Matrix()) == 0.0);
}

}  // TEST_SUITE
