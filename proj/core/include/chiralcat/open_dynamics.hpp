#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "chiralcat/analytic.hpp"
#include "chiralcat/hilbert.hpp"
#include "chiralcat/model.hpp"

namespace chiralcat {

/// rho[w,m,k ; v,n,j] over the composite basis of a Truncation.
class DensityMatrix {
 public:
  DensityMatrix(Truncation trunc, CMatrix rho);

  static DensityMatrix from_pure(const PureState& psi);

  const Truncation& truncation() const { return trunc_; }
  const CMatrix& matrix() const { return rho_; }
  CMatrix& matrix() { return rho_; }

  cplx trace() const { return rho_.trace(); }
  double hermiticity_error() const;
  double purity() const;
  double min_eigenvalue() const;
  /// <psi|rho|psi>
  double expectation(const PureState& psi) const;

 private:
  Truncation trunc_;
  CMatrix rho_;
};

/// rho(0) = |+><+| (x) |alpha><alpha| (x) |alpha><alpha|, renormalized.
DensityMatrix initial_density(cplx alpha, const Truncation& trunc,
                              double tail_threshold = 1e-4);

struct IntegratorOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double initial_step = 1e-3;
  double min_step = 1e-12;
  std::size_t max_steps = 50'000'000;
};

struct IntegratorStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

/// Lindblad equation with vacuum baths on both modes (rate kappa) and on the
/// atom (rate gamma). Operators are applied structurally; no superoperator or
/// dense Hamiltonian is formed.
class MasterEquation {
 public:
  using Visitor = std::function<void(double t, const DensityMatrix& rho)>;

  explicit MasterEquation(const SystemParams& s);

  const SystemParams& params() const { return params_; }

  /// Full right-hand side -i[H, rho] + sum_o rate L[o] rho.
  CMatrix rhs(const CMatrix& rho) const;

  /// Integrates from t = 0 through the ascending sample times, calling visit
  /// at each. The step size adapts to the embedded Dormand-Prince error
  /// estimate; the free-field rotation and the no-jump decay are integrated
  /// exactly. rho is re-symmetrized after every accepted step.
  IntegratorStats evolve(const DensityMatrix& rho0, std::span<const double> times,
                         const Visitor& visit, const IntegratorOptions& opts = {}) const;

  DensityMatrix evolve_to(const DensityMatrix& rho0, double t,
                          const IntegratorOptions& opts = {}) const;

 private:
  /// Everything except the diagonal generator.
  void add_coupling_and_jumps(const CMatrix& rho, CMatrix& out) const;

  SystemParams params_;
  Eigen::VectorXcd diag_rate_;  // l_i with L0 rho_ij = (l_i + conj(l_j)) rho_ij
  std::vector<LadderOperator> couplings_;  // a sigma_+ + a^dag sigma_-, one per mode
  LadderOperator a_cw_;
  LadderOperator a_ccw_;
  LadderOperator sigma_minus_;
};

CMatrix lindblad_rhs(const SystemParams& s, const DensityMatrix& rho);

DensityMatrix evolve_master(const SystemParams& s, const DensityMatrix& rho0, double t,
                            const IntegratorOptions& opts = {});

struct BranchDensity {
  Branch sign = Branch::Plus;
  Truncation trunc;
  CMatrix rho;  // two-mode density matrix indexed by field_index(m, k)
  double probability = 0.0;

  /// Single-mode reduced density matrix.
  CMatrix reduced(Mode keep) const { return partial_trace(rho, trunc, keep); }
};

/// p_+- = (1/2) tr(rho_ee + rho_gg +- rho_eg +- rho_ge)
double branch_probability(const DensityMatrix& rho, Branch sign);

BranchDensity branch_density(const DensityMatrix& rho, Branch sign);

/// f(t) = <psi_app(t)| rho(t) |psi_app(t)>
double fidelity_open(const SystemParams& s, double t, const DensityMatrix& rho_t);
/// f_+-(t) = <psi_+-(t)| rho^(+-)(t) |psi_+-(t)>
double fidelity_open_branch(const SystemParams& s, double t, Branch sign,
                            const DensityMatrix& rho_t);

/// Convenience forms that integrate from the coherent initial state.
double fidelity_open(const SystemParams& s, double t);
double fidelity_open_branch(const SystemParams& s, double t, Branch sign);

}  // namespace chiralcat
