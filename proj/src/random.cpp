#include "qsdlab/random.hpp"

#include <Eigen/QR>

#include <cmath>

namespace qsd {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64_mix(seed + kGolden * (stream + 1))) {}

std::uint64_t CounterRng::next_u64() {
  ++counter_;
  return splitmix64_mix(key_ + kGolden * counter_);
}

double CounterRng::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

Complex CounterRng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re, im};
}

StateVector random_state(const BasisTag& basis, CounterRng& rng) {
  Vector v(basis.dim());
  for (Index i = 0; i < v.size(); ++i) v(i) = rng.complex_normal();
  return StateVector(basis, std::move(v)).normalized();
}

UnitaryMatrix random_unitary(Index dim, CounterRng& rng) {
  Matrix g(dim, dim);
  for (Index j = 0; j < dim; ++j) {
    for (Index i = 0; i < dim; ++i) g(i, j) = rng.complex_normal();
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < dim; ++k) {
    const double mag = std::abs(r(k, k));
    if (mag > 0.0) q.col(k) *= r(k, k) / mag;
  }
  return UnitaryMatrix(std::move(q));
}

HermitianGenerator random_hermitian(Index dim, CounterRng& rng) {
  Matrix g(dim, dim);
  for (Index j = 0; j < dim; ++j) {
    for (Index i = 0; i < dim; ++i) g(i, j) = rng.complex_normal();
  }
  Matrix h = 0.5 * (g + g.adjoint());
  h /= spectral_norm(h);
  return HermitianGenerator(0.5 * (h + h.adjoint()));
}

}  // namespace qsd
