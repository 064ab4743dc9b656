#pragma once

// Two-branch (or N-branch) QUANSDAM / UNIDYSLOCK evolution and the
// quantum-state-difference (QSD) metrics computed from branch overlaps.

#include "qsdlab/hilbert.hpp"
#include "qsdlab/oracle_register.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace qsd {

/// IC step V(a) = exp(-i a angle G). The spectrum of G is cached so each
/// branch value costs one diagonal rescale.
class IcStep {
 public:
  IcStep(HermitianGenerator generator, double angle);

  UnitaryMatrix unitary(int logical_value) const;
  /// V(a)^dagger as an IC step (angle negated).
  IcStep inverse() const;

  const HermitianGenerator& generator() const { return generator_; }
  double angle() const { return angle_; }
  Index dim() const { return generator_.dim(); }

 private:
  HermitianGenerator generator_;
  double angle_;
  std::shared_ptr<const Spectrum> spectrum_;
};

/// U_K V_K U_{K-1} ... U_1 V_1 U_0 acting on `initial`. qm has K+1 entries,
/// ic has K.
class QuansdamSchedule {
 public:
  QuansdamSchedule(std::vector<UnitaryMatrix> qm, std::vector<IcStep> ic,
                   std::optional<StateVector> initial = std::nullopt);

  /// All U_k = identity and every V_k the same IC step.
  static QuansdamSchedule uniform(const IcStep& step, int K,
                                  std::optional<StateVector> initial =
                                      std::nullopt);

  int K() const { return static_cast<int>(ic_.size()); }
  Index dim() const { return qm_.front().dim(); }
  const UnitaryMatrix& qm(int k) const { return qm_[static_cast<std::size_t>(k)]; }
  const IcStep& ic(int k) const { return ic_[static_cast<std::size_t>(k - 1)]; }
  const std::optional<StateVector>& initial() const { return initial_; }

  /// The time-reversed schedule U_0^dag V_1^dag ... V_K^dag U_K^dag
  /// (UNIDYSLOCK). Carries no initial state.
  QuansdamSchedule inverse() const;

  /// Full product for one logical value.
  UnitaryMatrix product(int logical_value) const;

 private:
  std::vector<UnitaryMatrix> qm_;
  std::vector<IcStep> ic_;
  std::optional<StateVector> initial_;
};

struct BranchPairTrace {
  std::vector<int> logical_values;
  /// branch_states[b][k] = state of branch b after U_k (k = 0..K).
  std::vector<std::vector<StateVector>> branch_states;
  /// rho12(k) = <branch 0 | branch 1> at step k.
  std::vector<Complex> overlaps;
  /// Overlap right after each IC step, before the following U_k.
  std::vector<Complex> post_ic_overlaps;
  /// Which branch is realized physically; bookkeeping only.
  int physical_branch = 0;
  int ic_step_count = 0;
  int qm_step_count = 0;

  int K() const { return static_cast<int>(overlaps.size()) - 1; }
  std::size_t branch_count() const { return branch_states.size(); }
  Complex overlap(std::size_t i, std::size_t j, int k) const;
  const StateVector& final_state(std::size_t branch) const;
};

/// One shared initial state (schedule's own, or `initial` if given).
BranchPairTrace run_branches(const QuansdamSchedule& s,
                             const std::vector<int>& logical_values,
                             std::optional<StateVector> initial = std::nullopt);

/// One initial state per logical value.
BranchPairTrace run_branches(const QuansdamSchedule& s,
                             const std::vector<int>& logical_values,
                             const std::vector<StateVector>& initials);

enum class RateClass {
  linear,
  square,
  cubic,
  polynomial,
  exponential,
  indeterminate
};

std::string to_string(RateClass c);

struct RateFit {
  double slope = 0.0;
  std::size_t points = 0;
  RateClass classification = RateClass::indeterminate;
};

struct QsdRateReport {
  /// Entry k holds the quantity for step k+1 (k = 0..K-1).
  std::vector<double> delta_rho;
  std::vector<double> delta_rho_sq;
  /// (|rho(k)| - |rho(0)|)/k for k = 0..K; undefined at k = 0, stored as 0.
  std::vector<double> avg_rate;
  /// delta_rho(k+1)/k for k = 0..K-1; undefined at k = 0, stored as 0.
  std::vector<double> per_step_rate;
  std::vector<double> abs_rho;
  RateFit fit;
};

struct ClassifyOptions {
  double window_fraction = 0.6;
  double band = 0.15;
  double floor = 1e-14;
};

/// Log-log slope of |series[k]| vs k over the middle window of k >= 1.
RateFit fit_rate(const std::vector<double>& series,
                 const ClassifyOptions& opt = {});

QsdRateReport qsd_rates(const BranchPairTrace& t,
                        const ClassifyOptions& opt = {});

/// True when |delta_rho(k+1)/k| grows at least as k^threshold.
bool is_appropriate(const QsdRateReport& r, double threshold = 1.85,
                    const ClassifyOptions& opt = {});

/// -2 sin((k + 1/2) theta) sin(theta/2).
double reference_delta_rho(int k, double theta);

struct ReferenceOptions {
  int target = 0;
  Embedding embedding = Embedding::spin;
  std::vector<int> logical_values = {1, -1};
};

/// Register context implied by a state's basis (identical qudit factors).
RegisterContext register_of(const BasisTag& basis);

/// All-identity QM schedule with K basic IC steps of angle theta.
BranchPairTrace reference_process(double theta, int K,
                                  const StateVector& initial, Axis axis,
                                  const ReferenceOptions& opt = {});

/// Same IC steps, but each branch starts from its own initial state.
BranchPairTrace extended_reference_process(
    double theta, int K, const std::vector<StateVector>& initials, Axis axis,
    const ReferenceOptions& opt = {});

struct AmplitudeDecomposition {
  StateVector psi_a;
  StateVector psi_b;
  /// ||a||^2 + ||b||^2 - 1.
  double norm_split_defect;
  /// <a|b> + <b|a>.
  Complex cross_term;
  /// 1 - 2||b||^2 - 2<a|b>.
  Complex orthogonality_functional;
  Complex direct_overlap;
};

AmplitudeDecomposition amplitude_decomposition(const StateVector& plus,
                                               const StateVector& minus);

/// 1 - |overlap| clamped to [0, 1]. Throws if |overlap| > 1 + 1e-10.
double discrimination_probability(Complex overlap);

struct GaussianPacketParams {
  double x = 0.0;
  double p = 0.0;
  /// Width squared, (Delta x)^2.
  double var = 1.0;
  double T = 0.0;
};

/// Closed-form |rho12| of two free Gaussian packets.
double gaussian_overlap(const GaussianPacketParams& p1,
                        const GaussianPacketParams& p2,
                        const Units& units = {});

/// CSV: k, Re rho12, Im rho12, |rho12|, delta rho12(k), delta rho12^2(k),
/// average rate.
std::string trace_csv(const BranchPairTrace& t);

}  // namespace qsd
