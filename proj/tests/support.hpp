#pragma once

// Independent reference computations and hand-rolled generators for the
// test suites. Nothing here calls the library routine it is used to check.

#include "qsdlab/hilbert.hpp"
#include "qsdlab/random.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <vector>

namespace qsd::testing {

/// exp(-i h t) by scaling-and-squaring Pade, independent of the eigensolver.
inline Matrix pade_expm(const Matrix& h, double t) {
  const Matrix arg = Complex(0.0, -t) * h;
  return arg.exp();
}

/// Element loop Kronecker product.
inline Matrix loop_kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      for (Index k = 0; k < b.rows(); ++k)
        for (Index l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

/// sum conj(a_i) b_i * w, one term at a time.
inline Complex direct_sum(const Vector& a, const Vector& b, double w = 1.0) {
  Complex s = 0.0;
  for (Index i = 0; i < a.size(); ++i) s += std::conj(a(i)) * b(i);
  return w * s;
}

/// Trapezoid rule of conj(a) b over one period, closing the cell with the
/// sample at x_N = x_0 + L.
inline Complex trapezoid(const Vector& a, const Vector& b, double dx) {
  const Index n = a.size();
  auto f = [&](Index j) { return std::conj(a(j % n)) * b(j % n); };
  Complex s = 0.5 * (f(0) + f(n));
  for (Index j = 1; j < n; ++j) s += f(j);
  return dx * s;
}

/// (dx/L) sum_j exp(i q x_j) for x_j = -L/2 + (j+1) dx, as a geometric series.
inline Complex dirichlet_average(double q, double L, Index n) {
  const double dx = L / static_cast<double>(n);
  const Complex first = std::polar(1.0, q * (-0.5 * L + dx));
  const Complex r = std::polar(1.0, q * dx);
  if (std::abs(r - 1.0) < 1e-15) return first;
  return first * (1.0 - std::pow(r, static_cast<double>(n))) / (1.0 - r) /
         static_cast<double>(n);
}

/// Mean momentum from an O(N^2) DFT of samples on a periodic box.
inline double dft_centroid(const Vector& psi, double L, double hbar = 1.0) {
  const Index n = psi.size();
  double num = 0.0, den = 0.0;
  for (Index k = 0; k < n; ++k) {
    Complex c = 0.0;
    for (Index j = 0; j < n; ++j) {
      c += psi(j) * std::polar(1.0, -2.0 * 3.14159265358979323846 * static_cast<double>(k * j) /
                                        static_cast<double>(n));
    }
    const Index m = k < (n + 1) / 2 ? k : k - n;
    const double p = 2.0 * 3.14159265358979323846 * hbar * static_cast<double>(m) / L;
    num += p * std::norm(c);
    den += std::norm(c);
  }
  return num / den;
}

/// Coherent-state amplitudes e^{-a^2/2} a^k / sqrt(k!) for real a.
inline std::vector<double> poisson_amplitudes(double alpha, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  double term = std::exp(-0.5 * alpha * alpha);
  for (int k = 0; k < count; ++k) {
    out[static_cast<std::size_t>(k)] = term;
    term *= alpha / std::sqrt(static_cast<double>(k + 1));
  }
  return out;
}

/// Explicit Gaussian packet samples, unnormalized, for quadrature checks.
inline Vector gaussian_samples(const std::vector<double>& xs, double x0, double p,
                               double var, double T, double hbar = 1.0,
                               double mass = 1.0) {
  const double beta = hbar * T / (2.0 * mass);
  Vector v(static_cast<Index>(xs.size()));
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double d = xs[j] - x0;
    const Complex expo = -d * d / (4.0 * Complex(var, beta)) + Complex(0.0, p * xs[j] / hbar);
    v(static_cast<Index>(j)) = std::exp(expo);
  }
  return v;
}

// ----------------------------------------------------------------- generators

/// Small deterministic generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed, std::uint64_t stream = 0) : rng_(seed, stream) {}

  CounterRng& rng() { return rng_; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * rng_.uniform(); }
  int integer(int lo, int hi) {
    return lo + static_cast<int>(rng_.next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  Index dim() { return Index{1} << integer(1, 4); }
  StateVector state(Index d) { return random_state(BasisTag::generic(d), rng_); }
  UnitaryMatrix unitary(Index d) { return random_unitary(d, rng_); }
  HermitianGenerator hermitian(Index d) { return random_hermitian(d, rng_); }
  std::vector<int> logical(int n, int arity) {
    std::vector<int> v(static_cast<std::size_t>(n));
    for (auto& a : v) {
      a = arity == 2 ? (rng_.uniform() < 0.5 ? 1 : -1) : integer(-1, 1);
    }
    return v;
  }

 private:
  CounterRng rng_;
};

}  // namespace qsd::testing
