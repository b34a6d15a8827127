#include "chiralcat/analytic.hpp"

#include <cmath>

#include <Eigen/SVD>

namespace chiralcat {

BranchAmplitudes branch_amplitudes(const SystemParams& s, double t) {
  const StarkRates z = stark_rates(s);
  BranchAmplitudes b;
  b.theta = 0.5 * z.sum() * t;
  b.cw_plus = s.alpha * std::exp(-kI * ((s.delta_cw() + z.cw) * t));
  b.cw_minus = s.alpha * std::exp(-kI * ((s.delta_cw() - z.cw) * t));
  b.ccw_plus = s.alpha * std::exp(-kI * ((s.delta_ccw() + z.ccw) * t));
  b.ccw_minus = s.alpha * std::exp(-kI * ((s.delta_ccw() - z.ccw) * t));
  return b;
}

namespace {

// exp[2 l i theta + |alpha|^2 (sum_eps exp(2 l i zeta_eps t) - 2)]
cplx branch_overlap_term(const SystemParams& s, double t, int l) {
  const StarkRates z = stark_rates(s);
  const double theta = 0.5 * z.sum() * t;
  const double n = std::norm(s.alpha);
  const cplx rot = std::exp(2.0 * l * kI * z.cw * t) + std::exp(2.0 * l * kI * z.ccw * t);
  return std::exp(2.0 * l * kI * theta + n * (rot - 2.0));
}

// Truncated coherent product |a>_CW |b>_CCW as a coefficient matrix.
CMatrix coherent_product(cplx a, cplx b, const Truncation& t) {
  return coherent_amplitudes(a, t.n_cw()) * coherent_amplitudes(b, t.n_ccw()).transpose();
}

}  // namespace

BranchWeights normalizations_and_probabilities(const SystemParams& s, double t) {
  // The l = +1 and l = -1 terms are complex conjugates, so the bracket is real.
  const double bracket = (branch_overlap_term(s, t, 1) + branch_overlap_term(s, t, -1)).real();
  BranchWeights w;
  w.p_plus = 0.25 * (2.0 + bracket);
  w.p_minus = 0.25 * (2.0 - bracket);
  if (w.p_plus >= kNullBranchThreshold) w.m_plus = 1.0 / std::sqrt(2.0 + bracket);
  if (w.p_minus >= kNullBranchThreshold) w.m_minus = 1.0 / std::sqrt(2.0 - bracket);
  return w;
}

PureState approx_state(const SystemParams& s, double t, double tail_threshold) {
  check_truncation(s.alpha, s.trunc, tail_threshold);
  const BranchAmplitudes b = branch_amplitudes(s, t);
  PureState psi(s.trunc);
  psi.excited() = std::exp(kI * b.theta) * coherent_product(b.cw_minus, b.ccw_minus, s.trunc);
  psi.ground() = std::exp(-kI * b.theta) * coherent_product(b.cw_plus, b.ccw_plus, s.trunc);
  psi.normalize();
  return psi;
}

AnalyticBranch target_branch(const SystemParams& s, double t, Branch sign) {
  const BranchWeights w = normalizations_and_probabilities(s, t);
  const auto m = w.normalization(sign);
  if (!m) {
    throw NullBranch("analytic branch " + std::string(to_string(sign)) +
                     " has vanishing probability at t = " + std::to_string(t));
  }
  const BranchAmplitudes b = branch_amplitudes(s, t);
  CMatrix coeffs = std::exp(kI * b.theta) * coherent_product(b.cw_minus, b.ccw_minus, s.trunc) +
                   sign_of(sign) * std::exp(-kI * b.theta) *
                       coherent_product(b.cw_plus, b.ccw_plus, s.trunc);
  coeffs /= coeffs.norm();
  return {sign, *m, w.probability(sign), FieldState(s.trunc, std::move(coeffs))};
}

cplx analytic_wigner_complex(const SystemParams& s, double t, Branch sign, Mode mode,
                             cplx chi) {
  const BranchWeights w = normalizations_and_probabilities(s, t);
  if (!w.normalization(sign)) {
    throw NullBranch("analytic Wigner of an empty branch");
  }
  const double m2 = 1.0 / (4.0 * w.probability(sign));
  const StarkRates z = stark_rates(s);
  const BranchAmplitudes b = branch_amplitudes(s, t);
  const cplx ap = b.plus(mode);
  const cplx am = b.minus(mode);
  const double zeta = z.of(mode);
  const double zeta_bar = z.of(complement(mode));
  const double n = std::norm(s.alpha);
  const double chi2 = std::norm(chi);
  const cplx chic = std::conj(chi);

  // Each Lambda term is one exponential of its accumulated exponent.
  const cplx e1 = 2.0 * std::conj(ap) * chi + 2.0 * chic * ap - 2.0 * n - 2.0 * chi2;
  const cplx e2 = -2.0 * kI * b.theta +
                  n * (std::exp(-2.0 * kI * zeta_bar * t) - std::exp(-2.0 * kI * zeta * t) - 2.0) +
                  2.0 * chi * std::conj(am) + 2.0 * chic * ap - 2.0 * chi2;
  const cplx e3 = 2.0 * kI * b.theta +
                  n * (std::exp(2.0 * kI * zeta_bar * t) - std::exp(2.0 * kI * zeta * t) - 2.0) +
                  2.0 * chi * std::conj(ap) + 2.0 * chic * am - 2.0 * chi2;
  const cplx e4 = 2.0 * std::conj(am) * chi + 2.0 * chic * am - 2.0 * n - 2.0 * chi2;

  const double sg = sign_of(sign);
  return (2.0 * m2 / kPi) * (std::exp(e1) + sg * std::exp(e2) + sg * std::exp(e3) + std::exp(e4));
}

double analytic_wigner(const SystemParams& s, double t, Branch sign, Mode mode, cplx chi) {
  return analytic_wigner_complex(s, t, sign, mode, chi).real();
}

FactorizationCheck check_factorization(const FieldState& state, double tol) {
  Eigen::JacobiSVD<CMatrix> svd(state.coeffs());
  const auto& sv = svd.singularValues();
  FactorizationCheck c;
  c.second_singular_value = sv.size() > 1 ? sv(1) : 0.0;
  c.factorized = c.second_singular_value < tol;
  return c;
}

}  // namespace chiralcat
