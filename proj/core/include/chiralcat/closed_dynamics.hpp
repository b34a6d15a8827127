#pragma once

#include "chiralcat/analytic.hpp"
#include "chiralcat/hilbert.hpp"
#include "chiralcat/model.hpp"

namespace chiralcat {

/// Exact propagator of a time-independent Hamiltonian from one spectral
/// decomposition. Immutable once built; evolve() may be called concurrently.
class Propagator {
 public:
  explicit Propagator(const HermitianOperator& h);

  /// V exp(-i lambda t) V^dagger psi0
  PureState evolve(const PureState& psi0, double t) const;

  const Truncation& truncation() const { return trunc_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const CMatrix& eigenvectors() const { return eigenvectors_; }

  /// max |V diag(lambda) V^dagger - H| / max |H|
  double reconstruction_error(const HermitianOperator& h) const;
  /// max |V^dagger V - 1|
  double unitarity_error() const;

 private:
  Truncation trunc_;
  Eigen::VectorXd eigenvalues_;
  CMatrix eigenvectors_;
};

struct AmplitudeDerivative {
  RowMajorCMatrix d_excited;
  RowMajorCMatrix d_ground;
};

/// Schroedinger equation under the full Hamiltonian written for the amplitude
/// arrays A (excited) and B (ground); levels beyond the truncation are zero.
AmplitudeDerivative rhs_amplitudes(const SystemParams& s, const RowMajorCMatrix& excited,
                                   const RowMajorCMatrix& ground);

struct BranchResult {
  Branch sign = Branch::Plus;
  FieldState state;
  double probability = 0.0;
};

/// (1/2) sum |A +- B|^2
double branch_probability(const PureState& psi, Branch sign);

/// Field state (A +- B)/sqrt(2 P) after detecting the atom in |+-> .
BranchResult measure_branch(const PureState& psi, Branch sign);

/// |<a|b>|^2 / (|a|^2 |b|^2)
double state_fidelity(const FieldState& a, const FieldState& b);
double state_fidelity(const PureState& a, const PureState& b);

/// Everything the closed-system curves need at one time.
struct ClosedSample {
  double t = 0.0;
  double fidelity = 0.0;
  double fidelity_plus = 0.0;   // NaN when either plus branch is empty
  double fidelity_minus = 0.0;  // NaN when either minus branch is empty
  double p_plus = 0.0;
  double p_minus = 0.0;
  double p_plus_analytic = 0.0;
  double p_minus_analytic = 0.0;
  double norm = 0.0;
};

/// Exact evolution under the full Hamiltonian from the coherent initial state,
/// compared with the dispersive-evolution states.
class ClosedSimulation {
 public:
  explicit ClosedSimulation(const SystemParams& s, double tail_threshold = 1e-4);

  const SystemParams& params() const { return params_; }
  const PureState& initial() const { return psi0_; }
  const Propagator& propagator() const { return propagator_; }

  PureState exact_state(double t) const;
  double fidelity(double t) const;
  /// Throws NullBranch when the exact or the analytic branch is empty.
  double branch_fidelity(double t, Branch sign) const;
  ClosedSample sample(double t) const;

 private:
  SystemParams params_;
  double tail_threshold_;
  PureState psi0_;
  Propagator propagator_;
};

/// F(t) = |<Psi(t)|psi_app(t)>|^2
double fidelity_full(const SystemParams& s, double t);
/// F_+-(t) = |<Psi_+-(t)|psi_+-(t)>|^2
double fidelity_branch(const SystemParams& s, double t, Branch sign);

}  // namespace chiralcat
