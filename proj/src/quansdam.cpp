#include "qsdlab/quansdam.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "format.hpp"

namespace qsd {

// ------------------------------------------------------------------ IcStep

IcStep::IcStep(HermitianGenerator generator, double angle)
    : generator_(std::move(generator)),
      angle_(angle),
      spectrum_(std::make_shared<const Spectrum>(generator_)) {}

UnitaryMatrix IcStep::unitary(int logical_value) const {
  const double t = logical_value * angle_;
  if (t == 0.0) return UnitaryMatrix::identity(dim());
  return spectrum_->exp(t);
}

IcStep IcStep::inverse() const {
  IcStep inv = *this;
  inv.angle_ = -angle_;
  return inv;
}

// -------------------------------------------------------- QuansdamSchedule

QuansdamSchedule::QuansdamSchedule(std::vector<UnitaryMatrix> qm,
                                   std::vector<IcStep> ic,
                                   std::optional<StateVector> initial)
    : qm_(std::move(qm)), ic_(std::move(ic)), initial_(std::move(initial)) {
  if (qm_.size() != ic_.size() + 1) {
    throw DimensionMismatch("schedule needs K+1 QM steps for K IC steps");
  }
  const Index d = qm_.front().dim();
  for (const auto& u : qm_) {
    if (u.dim() != d) throw DimensionMismatch("QM step dimension mismatch");
  }
  for (const auto& v : ic_) {
    if (v.dim() != d) throw DimensionMismatch("IC step dimension mismatch");
  }
  if (initial_ && initial_->dim() != d) {
    throw DimensionMismatch("initial state dimension mismatch");
  }
}

QuansdamSchedule QuansdamSchedule::uniform(const IcStep& step, int K,
                                           std::optional<StateVector> initial) {
  if (K < 0) throw std::invalid_argument("K must be >= 0");
  std::vector<UnitaryMatrix> qm(static_cast<std::size_t>(K) + 1,
                                UnitaryMatrix::identity(step.dim()));
  std::vector<IcStep> ic(static_cast<std::size_t>(K), step);
  return QuansdamSchedule(std::move(qm), std::move(ic), std::move(initial));
}

QuansdamSchedule QuansdamSchedule::inverse() const {
  std::vector<UnitaryMatrix> qm;
  std::vector<IcStep> ic;
  for (auto it = qm_.rbegin(); it != qm_.rend(); ++it) qm.push_back(it->adjoint());
  for (auto it = ic_.rbegin(); it != ic_.rend(); ++it) ic.push_back(it->inverse());
  return QuansdamSchedule(std::move(qm), std::move(ic));
}

UnitaryMatrix QuansdamSchedule::product(int logical_value) const {
  UnitaryMatrix u = qm_.front();
  for (int k = 1; k <= K(); ++k) u = qm(k) * (ic(k).unitary(logical_value) * u);
  return u;
}

// --------------------------------------------------------- BranchPairTrace

Complex BranchPairTrace::overlap(std::size_t i, std::size_t j, int k) const {
  const auto kk = static_cast<std::size_t>(k);
  return inner_product(branch_states.at(i).at(kk), branch_states.at(j).at(kk));
}

const StateVector& BranchPairTrace::final_state(std::size_t branch) const {
  return branch_states.at(branch).back();
}

BranchPairTrace run_branches(const QuansdamSchedule& s,
                             const std::vector<int>& logical_values,
                             std::optional<StateVector> initial) {
  const auto& init = initial ? initial : s.initial();
  if (!init) throw std::invalid_argument("run_branches: no initial state");
  return run_branches(s, logical_values,
                      std::vector<StateVector>(logical_values.size(), *init));
}

BranchPairTrace run_branches(const QuansdamSchedule& s,
                             const std::vector<int>& logical_values,
                             const std::vector<StateVector>& initials) {
  if (logical_values.empty()) {
    throw std::invalid_argument("run_branches: no logical values");
  }
  if (initials.size() != logical_values.size()) {
    throw DimensionMismatch("run_branches: one initial state per branch");
  }
  for (const auto& psi : initials) {
    if (psi.dim() != s.dim()) {
      throw DimensionMismatch("run_branches: initial state dimension");
    }
    if (!psi.is_normalized(kDefaultTolerances.unitarity)) {
      throw std::invalid_argument("run_branches: initial state not normalized");
    }
  }

  BranchPairTrace t;
  t.logical_values = logical_values;
  t.ic_step_count = s.K();
  t.qm_step_count = s.K() + 1;
  std::vector<std::vector<StateVector>> post_ic(logical_values.size());

  // Branches are independent; evaluated in order for reproducible bytes.
  for (std::size_t b = 0; b < logical_values.size(); ++b) {
    std::vector<StateVector> history;
    history.reserve(static_cast<std::size_t>(s.K()) + 1);
    StateVector psi = apply_unitary(s.qm(0), initials[b]);
    history.push_back(psi);
    for (int k = 1; k <= s.K(); ++k) {
      psi = apply_unitary(s.ic(k).unitary(logical_values[b]), psi);
      post_ic[b].push_back(psi);
      psi = apply_unitary(s.qm(k), psi);
      history.push_back(psi);
    }
    t.branch_states.push_back(std::move(history));
  }

  const std::size_t other = logical_values.size() > 1 ? 1 : 0;
  for (int k = 0; k <= s.K(); ++k) t.overlaps.push_back(t.overlap(0, other, k));
  for (std::size_t k = 0; k < post_ic[0].size(); ++k) {
    t.post_ic_overlaps.push_back(inner_product(post_ic[0][k], post_ic[other][k]));
  }
  return t;
}

// ------------------------------------------------------------------- rates

std::string to_string(RateClass c) {
  switch (c) {
    case RateClass::linear: return "linear";
    case RateClass::square: return "square";
    case RateClass::cubic: return "cubic";
    case RateClass::polynomial: return "polynomial";
    case RateClass::exponential: return "exponential";
    case RateClass::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

namespace {

struct LineFit {
  double slope;
  double intercept;
  double residual;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double res = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (slope * x[i] + intercept);
    res += r * r;
  }
  return {slope, intercept, res};
}

}  // namespace

RateFit fit_rate(const std::vector<double>& series, const ClassifyOptions& opt) {
  RateFit fit;
  if (series.size() < 2) return fit;
  const std::size_t m = series.size() - 1;  // k = 1 .. size-1
  const auto drop = static_cast<std::size_t>(
      std::floor(static_cast<double>(m) * (1.0 - opt.window_fraction) / 2.0));
  std::vector<double> lk, k_lin, lv;
  for (std::size_t k = 1 + drop; k + drop < series.size(); ++k) {
    const double v = std::abs(series[k]);
    if (v < opt.floor) continue;
    lk.push_back(std::log(static_cast<double>(k)));
    k_lin.push_back(static_cast<double>(k));
    lv.push_back(std::log(v));
  }
  fit.points = lk.size();
  if (fit.points < 3) return fit;

  const LineFit poly = least_squares(lk, lv);
  fit.slope = poly.slope;
  for (auto [target, cls] : {std::pair{1.0, RateClass::linear},
                             std::pair{2.0, RateClass::square},
                             std::pair{3.0, RateClass::cubic}}) {
    if (std::abs(poly.slope - target) <= opt.band) {
      fit.classification = cls;
      return fit;
    }
  }
  const LineFit expo = least_squares(k_lin, lv);
  fit.classification =
      expo.residual < poly.residual ? RateClass::exponential : RateClass::polynomial;
  return fit;
}

QsdRateReport qsd_rates(const BranchPairTrace& t, const ClassifyOptions& opt) {
  if (t.overlaps.size() < 2) {
    throw std::invalid_argument("qsd_rates: trace needs at least 2 overlap points");
  }
  QsdRateReport r;
  for (const auto& rho : t.overlaps) r.abs_rho.push_back(std::abs(rho));
  const int K = t.K();
  for (int k = 0; k < K; ++k) {
    const double a0 = r.abs_rho[static_cast<std::size_t>(k)];
    const double a1 = r.abs_rho[static_cast<std::size_t>(k) + 1];
    r.delta_rho.push_back(a1 - a0);
    r.delta_rho_sq.push_back(a1 * a1 - a0 * a0);
  }
  r.avg_rate.assign(static_cast<std::size_t>(K) + 1, 0.0);
  r.per_step_rate.assign(static_cast<std::size_t>(K), 0.0);
  for (int k = 1; k <= K; ++k) {
    r.avg_rate[static_cast<std::size_t>(k)] =
        (r.abs_rho[static_cast<std::size_t>(k)] - r.abs_rho[0]) / k;
  }
  for (int k = 1; k < K; ++k) {
    r.per_step_rate[static_cast<std::size_t>(k)] =
        r.delta_rho[static_cast<std::size_t>(k)] / k;
  }
  r.fit = fit_rate(r.delta_rho, opt);
  return r;
}

bool is_appropriate(const QsdRateReport& r, double threshold,
                    const ClassifyOptions& opt) {
  const RateFit f = fit_rate(r.per_step_rate, opt);
  return f.points >= 3 && f.slope >= threshold;
}

double reference_delta_rho(int k, double theta) {
  return -2.0 * std::sin((k + 0.5) * theta) * std::sin(0.5 * theta);
}

RegisterContext register_of(const BasisTag& basis) {
  const auto& fs = basis.factors();
  if (fs.size() == 1 && fs[0].kind == FactorKind::generic &&
      (fs[0].dim == 2 || fs[0].dim == 3)) {
    return {1, static_cast<int>(fs[0].dim)};
  }
  if (fs.empty()) throw std::invalid_argument("empty basis is not a register");
  for (const auto& f : fs) {
    if (f.kind != FactorKind::qudit || f.dim != fs[0].dim) {
      throw std::invalid_argument("basis is not a uniform qudit register");
    }
  }
  return {static_cast<int>(fs.size()), static_cast<int>(fs[0].dim)};
}

namespace {

IcStep reference_step(double theta, const BasisTag& basis, Axis axis,
                      const ReferenceOptions& opt) {
  const RegisterContext reg = register_of(basis);
  BasicIcUnitary spec;
  spec.axis = axis;
  spec.angle = theta;
  spec.target = opt.target;
  spec.embedding = opt.embedding;
  return IcStep(ic_generator(spec, reg), theta);
}

}  // namespace

BranchPairTrace reference_process(double theta, int K,
                                  const StateVector& initial, Axis axis,
                                  const ReferenceOptions& opt) {
  if (K < 1) throw std::invalid_argument("K must be >= 1");
  const auto step = reference_step(theta, initial.basis(), axis, opt);
  return run_branches(QuansdamSchedule::uniform(step, K, initial),
                      opt.logical_values);
}

BranchPairTrace extended_reference_process(
    double theta, int K, const std::vector<StateVector>& initials, Axis axis,
    const ReferenceOptions& opt) {
  if (K < 1) throw std::invalid_argument("K must be >= 1");
  if (initials.empty()) throw std::invalid_argument("no initial states");
  const auto step = reference_step(theta, initials.front().basis(), axis, opt);
  return run_branches(QuansdamSchedule::uniform(step, K), opt.logical_values,
                      initials);
}

// -------------------------------------------------- amplitude decomposition

AmplitudeDecomposition amplitude_decomposition(const StateVector& plus,
                                               const StateVector& minus) {
  if (!(plus.basis() == minus.basis())) {
    throw DimensionMismatch("amplitude_decomposition: branch bases differ");
  }
  StateVector a(plus.basis(), 0.5 * (plus.amplitudes() + minus.amplitudes()));
  StateVector b(plus.basis(), 0.5 * (plus.amplitudes() - minus.amplitudes()));
  const double na = std::real(inner_product(a, a));
  const double nb = std::real(inner_product(b, b));
  const Complex ab = inner_product(a, b);
  const Complex ba = inner_product(b, a);
  return {a,
          b,
          na + nb - 1.0,
          ab + ba,
          1.0 - 2.0 * nb - 2.0 * ab,
          inner_product(plus, minus)};
}

double discrimination_probability(Complex overlap) {
  const double m = std::abs(overlap);
  if (m > 1.0 + 1e-10) {
    throw std::domain_error("overlap magnitude exceeds 1");
  }
  return std::clamp(1.0 - m, 0.0, 1.0);
}

double gaussian_overlap(const GaussianPacketParams& p1,
                        const GaussianPacketParams& p2, const Units& units) {
  if (!(p1.var > 0.0) || !(p2.var > 0.0)) {
    throw std::invalid_argument("gaussian_overlap: variances must be positive");
  }
  const double hbar = units.hbar;
  const double d1 = p1.var, d2 = p2.var;
  const double b1 = hbar * p1.T / (2.0 * units.mass);
  const double b2 = hbar * p2.T / (2.0 * units.mass);
  const double p12 = p1.p - p2.p;
  const double x12 = p1.x - p2.x;
  const double b12 = b1 - b2;
  const double den = (d1 + d2) * (d1 + d2) + b12 * b12;
  const double u1 = x12 - 2.0 / hbar * p12 * b2;
  const double u2 = x12 - 2.0 / hbar * p12 * b1;
  const double dprime = -p12 * p12 * d1 * d2 * (d1 + d2) / (hbar * hbar) -
                        0.25 * d1 * u1 * u1 - 0.25 * d2 * u2 * u2;
  return std::pow(4.0 * d1 * d2 / den, 0.25) * std::exp(dprime / den);
}

std::string trace_csv(const BranchPairTrace& t) {
  const QsdRateReport r = qsd_rates(t);
  std::string out =
      "k,re_rho12,im_rho12,abs_rho12,delta_rho12,delta_rho12_sq,avg_rate\n";
  for (int k = 0; k <= t.K(); ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const double d = k == 0 ? 0.0 : r.delta_rho[kk - 1];
    const double d2 = k == 0 ? 0.0 : r.delta_rho_sq[kk - 1];
    out += csv_row({std::to_string(k), fmt_double(t.overlaps[kk].real()),
                    fmt_double(t.overlaps[kk].imag()), fmt_double(r.abs_rho[kk]),
                    fmt_double(d), fmt_double(d2), fmt_double(r.avg_rate[kk])});
  }
  return out;
}

}  // namespace qsd
