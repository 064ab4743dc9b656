#include "qsdlab/boolean_oracle.hpp"

#include <Eigen/SparseCore>

#include <algorithm>
#include <sstream>

namespace qsd {

namespace {

Index main_dim(int n) { return Index{1} << n; }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::uint64_t parse_unsigned(const std::string& tok, const std::string& value) {
  if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos) {
    throw std::invalid_argument("invalid oracle spec token '" + tok + "'");
  }
  return std::stoull(value);
}

UnitaryMatrix xor_permutation(const SearchOracleSpec& spec,
                              bool (*selected)(const SearchOracleSpec&, std::uint64_t,
                                               std::uint64_t),
                              std::uint64_t x1) {
  const Index d = 2 * main_dim(spec.n);
  Matrix m = Matrix::Zero(d, d);
  for (std::uint64_t x = 0; x < spec.size(); ++x) {
    const int flip = selected(spec, x, x1) ? 1 : 0;
    for (int b = 0; b < 2; ++b) {
      m(static_cast<Index>(2 * x + static_cast<std::uint64_t>(b ^ flip)),
        static_cast<Index>(2 * x + static_cast<std::uint64_t>(b))) = 1.0;
    }
  }
  // A permutation by construction.
  return UnitaryMatrix::assume_unitary(std::move(m));
}

}  // namespace

SearchOracleSpec::SearchOracleSpec(int n_, std::uint64_t x0_) : n(n_), x0(x0_) {
  if (n < 1 || n > 20) throw std::invalid_argument("oracle needs 1 <= n <= 20");
  if (x0 >= size()) {
    throw std::invalid_argument("x0 = " + std::to_string(x0) + " outside [0, 2^" +
                                std::to_string(n) + ")");
  }
}

SearchOracleSpec SearchOracleSpec::parse(const std::string& text) {
  std::stringstream ss(text);
  std::string raw;
  std::uint64_t n = 0, x0 = 0;
  bool has_n = false, has_x0 = false;
  while (std::getline(ss, raw, ',')) {
    const std::string tok = trim(raw);
    const auto eq = tok.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("invalid oracle spec token '" + tok + "'");
    }
    const std::string key = trim(tok.substr(0, eq));
    const std::string value = trim(tok.substr(eq + 1));
    if (key == "n") {
      n = parse_unsigned(tok, value);
      has_n = true;
    } else if (key == "x0") {
      x0 = parse_unsigned(tok, value);
      has_x0 = true;
    } else {
      throw std::invalid_argument("invalid oracle spec token '" + tok + "'");
    }
  }
  if (!has_n || !has_x0) {
    throw std::invalid_argument("oracle spec '" + text + "' needs both n and x0");
  }
  if (n > 20) throw std::invalid_argument("invalid oracle spec token 'n=" + std::to_string(n) + "'");
  return SearchOracleSpec(static_cast<int>(n), x0);
}

LogicalVector SearchOracleSpec::logical() const {
  return LogicalVector::from_index(x0, n, 2);
}

UnitaryMatrix u_f(const SearchOracleSpec& spec) {
  return xor_permutation(
      spec, [](const SearchOracleSpec& s, std::uint64_t x, std::uint64_t) { return s.f(x); },
      0);
}

UnitaryMatrix v_f_single(const SearchOracleSpec& spec, std::uint64_t x1) {
  if (x1 >= spec.size()) throw std::out_of_range("selected value outside register");
  return xor_permutation(
      spec,
      [](const SearchOracleSpec& s, std::uint64_t x, std::uint64_t sel) {
        return x == sel && s.f(x);
      },
      x1);
}

UnitaryMatrix v0_gate() {
  Matrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return UnitaryMatrix(std::move(m));
}

UnitaryMatrix v_theta_gate(double theta) {
  Matrix m = Matrix::Identity(4, 4);
  m(3, 3) = std::polar(1.0, -theta);
  return UnitaryMatrix(std::move(m));
}

UnitaryMatrix five_step_sequence(const UnitaryMatrix& w, int n, double theta) {
  const Index md = main_dim(n);
  if (w.dim() != 2 * md) throw DimensionMismatch("W must act on main (x) func");
  using Sparse = Eigen::SparseMatrix<Complex>;
  // V0 and V(theta) are a permutation and a diagonal, and W is one for every
  // oracle built here, so sparse products keep the exhaustive sweeps cheap.
  const Sparse v0 = kron(Matrix::Identity(2 * md, 2 * md), v0_gate().matrix()).sparseView();
  const Sparse vt = kron(Matrix::Identity(md, md), v_theta_gate(theta).matrix()).sparseView();
  const Sparse ww = kron(w.matrix(), Matrix::Identity(2, 2)).sparseView();
  // Rightmost factor acts first.
  const Sparse product = v0 * ww * vt * ww * v0;
  return UnitaryMatrix::assume_unitary(Matrix(product));
}

UnitaryMatrix bfseq(const SearchOracleSpec& spec, double theta) {
  return five_step_sequence(u_f(spec), spec.n, theta);
}

Matrix reduced_main_action(const UnitaryMatrix& full, int n) {
  const Index md = main_dim(n);
  if (full.dim() != 4 * md) throw DimensionMismatch("expected main (x) func (x) aux");
  Matrix r(md, md);
  for (Index i = 0; i < md; ++i) {
    for (Index j = 0; j < md; ++j) {
      r(i, j) = full.matrix()(4 * i, 4 * j);
    }
  }
  return r;
}

double ancilla_leakage(const UnitaryMatrix& full, int n) {
  const Index md = main_dim(n);
  double worst = 0.0;
  for (Index x = 0; x < md; ++x) {
    const auto col = full.matrix().col(4 * x);
    for (Index i = 0; i < col.size(); ++i) {
      if (i % 4 != 0) worst = std::max(worst, std::abs(col(i)));
    }
  }
  return worst;
}

UnitaryMatrix usual_oracle(const SearchOracleSpec& spec, double theta) {
  const Index md = main_dim(spec.n);
  Matrix m = Matrix::Identity(md, md);
  const auto s = static_cast<Index>(spec.x0);
  m(s, s) = std::polar(1.0, -theta);
  return UnitaryMatrix::assume_unitary(std::move(m));
}

UnitaryMatrix selective_bfseq(const SearchOracleSpec& spec, std::uint64_t y,
                              double theta) {
  const UnitaryMatrix full = five_step_sequence(v_f_single(spec, y), spec.n, theta);
  return UnitaryMatrix(reduced_main_action(full, spec.n));
}

DecompositionReport parallel_decomposition_check(const SearchOracleSpec& spec,
                                                 double theta) {
  if (spec.n > kMaxExhaustiveQubits) {
    throw std::invalid_argument("exhaustive decomposition limited to n <= " +
                                std::to_string(kMaxExhaustiveQubits));
  }
  const Index md = main_dim(spec.n);
  DecompositionReport r;

  UnitaryMatrix forward = UnitaryMatrix::identity(md);
  UnitaryMatrix backward = UnitaryMatrix::identity(md);
  UnitaryMatrix vf = UnitaryMatrix::identity(2 * md);
  for (std::uint64_t y = 0; y < spec.size(); ++y) {
    const UnitaryMatrix s = selective_bfseq(spec, y, theta);
    forward = s * forward;
    backward = backward * s;
    if (y != spec.x0) {
      r.non_solution_identity_deviation =
          std::max(r.non_solution_identity_deviation,
                   max_abs_entry(s.matrix() - Matrix::Identity(md, md)));
    }
    vf = v_f_single(spec, y) * vf;
  }
  r.bfseq_product_deviation =
      max_abs_entry(forward.matrix() - reduced_main_action(bfseq(spec, theta), spec.n));
  r.ordering_deviation = max_abs_entry(forward.matrix() - backward.matrix());
  r.vf_product_deviation = max_abs_entry(vf.matrix() - u_f(spec).matrix());
  return r;
}

double EquivalenceReport::max_deviation() const {
  return std::max({bfseq_vs_usual, usual_vs_selective_phase, selective_bfseq_vs_usual,
                   bfseq_vs_selective_phase, ancilla_leakage});
}

EquivalenceReport oracle_equivalence(const SearchOracleSpec& spec, double theta) {
  EquivalenceReport r;
  r.spec = spec;
  r.theta = theta;
  const UnitaryMatrix full = bfseq(spec, theta);
  const Matrix reduced = reduced_main_action(full, spec.n);
  const Matrix uo = usual_oracle(spec, theta).matrix();
  const Matrix cs = selective_phase(spec.logical(), theta).matrix();
  const Matrix sel = selective_bfseq(spec, spec.x0, theta).matrix();
  r.bfseq_vs_usual = max_abs_entry(reduced - uo);
  r.usual_vs_selective_phase = max_abs_entry(uo - cs);
  r.selective_bfseq_vs_usual = max_abs_entry(sel - uo);
  r.bfseq_vs_selective_phase = max_abs_entry(reduced - cs);
  r.ancilla_leakage = ancilla_leakage(full, spec.n);
  return r;
}

}  // namespace qsd
