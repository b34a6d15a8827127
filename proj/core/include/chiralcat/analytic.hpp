#pragma once

#include <optional>

#include "chiralcat/hilbert.hpp"
#include "chiralcat/model.hpp"

namespace chiralcat {

/// Coherent amplitudes reached under the dispersive Hamiltonian.
///
/// The |g> branch rotates as alpha e^{-i(Delta_eps + zeta_eps) t} (superscript
/// "+"), the |e> branch as alpha e^{-i(Delta_eps - zeta_eps) t} ("-"), and the
/// two carry opposite global phases e^{-/+ i theta}, theta = (zeta_CW + zeta_CCW) t / 2.
struct BranchAmplitudes {
  double theta = 0.0;
  cplx cw_plus;
  cplx cw_minus;
  cplx ccw_plus;
  cplx ccw_minus;

  cplx plus(Mode m) const { return m == Mode::CW ? cw_plus : ccw_plus; }
  cplx minus(Mode m) const { return m == Mode::CW ? cw_minus : ccw_minus; }
};

BranchAmplitudes branch_amplitudes(const SystemParams& s, double t);

/// Normalizations M_+- and detection probabilities P_+- = 1 / (4 M_+-^2).
/// A branch with P < kNullBranchThreshold has no normalization.
struct BranchWeights {
  double p_plus = 0.0;
  double p_minus = 0.0;
  std::optional<double> m_plus;
  std::optional<double> m_minus;

  double probability(Branch b) const { return b == Branch::Plus ? p_plus : p_minus; }
  std::optional<double> normalization(Branch b) const {
    return b == Branch::Plus ? m_plus : m_minus;
  }
};

BranchWeights normalizations_and_probabilities(const SystemParams& s, double t);

/// Fock expansion of the dispersive-evolution state, normalized after truncation.
PureState approx_state(const SystemParams& s, double t, double tail_threshold = 1e-4);

struct AnalyticBranch {
  Branch sign = Branch::Plus;
  double normalization = 0.0;
  double probability = 0.0;
  FieldState state;
};

/// Normalized field state left after detecting the atom in |+> or |->.
AnalyticBranch target_branch(const SystemParams& s, double t, Branch sign);

/// Closed-form Wigner function of one mode of the target branch state.
double analytic_wigner(const SystemParams& s, double t, Branch sign, Mode mode, cplx chi);

/// Same quantity before the real part is taken; the imaginary part is a
/// round-off residue.
cplx analytic_wigner_complex(const SystemParams& s, double t, Branch sign, Mode mode,
                             cplx chi);

struct FactorizationCheck {
  double second_singular_value = 0.0;
  bool factorized = false;
};

/// Schmidt test on the coefficient matrix of a two-mode pure state.
FactorizationCheck check_factorization(const FieldState& state, double tol = 1e-8);

}  // namespace chiralcat
