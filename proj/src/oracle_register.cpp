#include "qsdlab/oracle_register.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace qsd {

namespace {

void check_arity(int arity) {
  if (arity != 2 && arity != 3) {
    throw std::invalid_argument("arity must be 2 (qubit) or 3 (qutrit)");
  }
}

bool legal_value(int a, int arity) {
  return a == 1 || a == -1 || (arity == 3 && a == 0);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// Unnormalized local vector of the candidate-state product form.
Vector candidate_site_vector(int a, int arity) {
  if (arity == 2) {
    Vector t(2), s(2);
    t << 1.0, 1.0;
    s << 0.5, -0.5;
    return 0.5 * t + static_cast<double>(a) * s;
  }
  Vector t_plus(3), t_zero(3), t_minus(3);
  t_plus << 1.0, 1.0, 1.0;
  t_zero << 1.0, 0.0, -1.0;
  t_minus << 1.0, 0.0, 1.0;
  const double abs_a = std::abs(a);
  return (1.0 - abs_a) * t_plus + 0.5 * a * t_zero +
         (-1.0 + 1.5 * abs_a) * t_minus;
}

}  // namespace

LogicalVector::LogicalVector(int arity, std::vector<int> values)
    : arity_(arity), values_(std::move(values)) {
  check_arity(arity_);
  if (values_.empty()) throw std::invalid_argument("logical vector is empty");
  for (int a : values_) {
    if (!legal_value(a, arity_)) {
      throw std::invalid_argument("logical value " + std::to_string(a) +
                                  " not allowed for arity " +
                                  std::to_string(arity_));
    }
  }
}

LogicalVector LogicalVector::parse(const std::string& text, int arity) {
  check_arity(arity);
  std::vector<int> values;
  std::stringstream ss(text);
  std::string raw;
  while (std::getline(ss, raw, ',')) {
    const std::string tok = trim(raw);
    int v = 2;
    if (tok == "+1" || tok == "1") v = 1;
    else if (tok == "-1") v = -1;
    else if (tok == "0" || tok == "+0" || tok == "-0") v = 0;
    if (v == 2 || !legal_value(v, arity)) {
      throw std::invalid_argument("invalid logical value token '" + tok +
                                  "' for arity " + std::to_string(arity));
    }
    values.push_back(v);
  }
  if (values.empty()) throw std::invalid_argument("empty logical vector");
  if (!text.empty() && text.back() == ',') {
    throw std::invalid_argument("invalid logical value token '' (trailing comma)");
  }
  return LogicalVector(arity, std::move(values));
}

LogicalVector LogicalVector::from_index(std::uint64_t index, int sites,
                                        int arity) {
  check_arity(arity);
  if (sites < 1) throw std::invalid_argument("sites must be >= 1");
  std::vector<int> values(static_cast<std::size_t>(sites));
  for (int k = sites - 1; k >= 0; --k) {
    const auto digit = static_cast<int>(index % arity);
    index /= arity;
    values[static_cast<std::size_t>(k)] = arity == 2 ? 1 - 2 * digit : 1 - digit;
  }
  if (index != 0) throw std::out_of_range("index exceeds register size");
  return LogicalVector(arity, std::move(values));
}

std::uint64_t LogicalVector::index() const {
  std::uint64_t s = 0;
  for (int a : values_) {
    const auto digit = static_cast<std::uint64_t>(arity_ == 2 ? (1 - a) / 2 : 1 - a);
    s = s * static_cast<std::uint64_t>(arity_) + digit;
  }
  return s;
}

std::string LogicalVector::to_string() const {
  std::string out;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (k) out += ',';
    out += values_[k] > 0 ? "+1" : (values_[k] < 0 ? "-1" : "0");
  }
  return out;
}

Matrix oracle_site_factor(int a, int arity) {
  check_arity(arity);
  const Matrix iz = spin_operator(Axis::z, arity);
  const Matrix e = Matrix::Identity(arity, arity);
  if (arity == 2) return 0.5 * e + static_cast<double>(a) * iz;
  const double abs_a = std::abs(a);
  return (1.0 - abs_a) * e + 0.5 * a * iz + (-1.0 + 1.5 * abs_a) * iz * iz;
}

HermitianGenerator oracle_projector(const LogicalVector& l) {
  Matrix d = oracle_site_factor(l[0], l.arity());
  for (int k = 1; k < l.size(); ++k) {
    d = kron(d, oracle_site_factor(l[k], l.arity()));
  }
  return HermitianGenerator(std::move(d));
}

UnitaryMatrix selective_phase(const LogicalVector& l, double theta) {
  const Index dim = RegisterContext{l.size(), l.arity()}.dim();
  Matrix c = Matrix::Identity(dim, dim);
  const auto s = static_cast<Index>(l.index());
  c(s, s) = std::polar(1.0, -theta);
  return UnitaryMatrix::assume_unitary(std::move(c));
}

CandidateState candidate_state(const LogicalVector& l) {
  Vector v = candidate_site_vector(l[0], l.arity());
  for (int k = 1; k < l.size(); ++k) {
    v = kron(v, candidate_site_vector(l[k], l.arity()));
  }
  const std::uint64_t s = l.index();
  Vector expected = Vector::Zero(v.size());
  expected(static_cast<Index>(s)) = 1.0;
  if ((v - expected).cwiseAbs().maxCoeff() > 1e-14) {
    throw std::logic_error("candidate state product form did not collapse to "
                           "the basis state " + std::to_string(s));
  }
  return {l, StateVector(BasisTag::qudits(l.size(), l.arity()), std::move(v)),
          s};
}

Embedding parse_embedding(const std::string& text) {
  if (text == "spin") return Embedding::spin;
  if (text == "pseudospin") return Embedding::pseudospin;
  throw std::invalid_argument("invalid embedding '" + text +
                              "' (expected spin or pseudospin)");
}

Index RegisterContext::dim() const {
  if (sites < 1) throw std::invalid_argument("register needs sites >= 1");
  if (local_dim != 2 && local_dim != 3) {
    throw std::invalid_argument("register local_dim must be 2 or 3");
  }
  Index d = 1;
  for (int s = 0; s < sites; ++s) d *= local_dim;
  return d;
}

HermitianGenerator ic_generator(const BasicIcUnitary& spec,
                                const RegisterContext& reg) {
  if (spec.target < 0 || spec.target >= reg.sites) {
    throw std::out_of_range("IC target " + std::to_string(spec.target) +
                            " outside register of " +
                            std::to_string(reg.sites) + " sites");
  }
  if (!legal_value(spec.logical_value, reg.local_dim)) {
    throw std::invalid_argument("logical value not allowed for register");
  }
  const Matrix local = spin_operator(spec.axis, reg.local_dim);
  if (spec.embedding == Embedding::spin) {
    return HermitianGenerator(
        embed_site(local, spec.target, reg.sites, reg.local_dim));
  }
  Matrix p0 = Matrix::Zero(reg.local_dim, reg.local_dim);
  p0(0, 0) = 1.0;
  Matrix g = spec.target == 0 ? local : p0;
  for (int s = 1; s < reg.sites; ++s) g = kron(g, s == spec.target ? local : p0);
  return HermitianGenerator(std::move(g));
}

UnitaryMatrix basic_ic_unitary(const BasicIcUnitary& spec,
                               const RegisterContext& reg) {
  return expm_generator(ic_generator(spec, reg),
                        spec.logical_value * spec.angle);
}

double register_scaled_angle(int sites, double c) {
  return c / std::ldexp(1.0, sites);
}

}  // namespace qsd
