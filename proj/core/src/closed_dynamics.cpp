#include "chiralcat/closed_dynamics.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace chiralcat {

Propagator::Propagator(const HermitianOperator& h) : trunc_(h.truncation()) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition of the Hamiltonian failed");
  }
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

PureState Propagator::evolve(const PureState& psi0, double t) const {
  require_same_truncation(trunc_, psi0.truncation());
  CVector c = eigenvectors_.adjoint() * psi0.amplitudes();
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::exp(-kI * (eigenvalues_(i) * t));
  return PureState(trunc_, eigenvectors_ * c);
}

double Propagator::reconstruction_error(const HermitianOperator& h) const {
  const CMatrix rebuilt =
      eigenvectors_ * eigenvalues_.cast<cplx>().asDiagonal() * eigenvectors_.adjoint();
  const double scale = h.matrix().cwiseAbs().maxCoeff();
  return (rebuilt - h.matrix()).cwiseAbs().maxCoeff() / (scale > 0.0 ? scale : 1.0);
}

double Propagator::unitarity_error() const {
  const CMatrix g = eigenvectors_.adjoint() * eigenvectors_;
  return (g - CMatrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

AmplitudeDerivative rhs_amplitudes(const SystemParams& s, const RowMajorCMatrix& a,
                                   const RowMajorCMatrix& b) {
  const int ncw = s.trunc.n_cw();
  const int nccw = s.trunc.n_ccw();
  if (a.rows() != ncw || a.cols() != nccw || b.rows() != ncw || b.cols() != nccw) {
    throw DimensionMismatch("amplitude arrays do not match truncation");
  }
  AmplitudeDerivative d{RowMajorCMatrix(ncw, nccw), RowMajorCMatrix(ncw, nccw)};
  const double J = s.J;
  for (int m = 0; m < ncw; ++m) {
    for (int k = 0; k < nccw; ++k) {
      const double energy = m * s.delta_cw() + k * s.delta_ccw();
      cplx da = -kI * energy * a(m, k);
      if (m + 1 < ncw) da += -kI * J * std::sqrt(double(m + 1)) * b(m + 1, k);
      if (k + 1 < nccw) da += -kI * J * std::sqrt(double(k + 1)) * b(m, k + 1);
      cplx db = -kI * energy * b(m, k);
      if (m > 0) db += -kI * J * std::sqrt(double(m)) * a(m - 1, k);
      if (k > 0) db += -kI * J * std::sqrt(double(k)) * a(m, k - 1);
      d.d_excited(m, k) = da;
      d.d_ground(m, k) = db;
    }
  }
  return d;
}

double branch_probability(const PureState& psi, Branch sign) {
  const double sg = sign_of(sign);
  return 0.5 * (psi.excited() + sg * psi.ground()).squaredNorm();
}

BranchResult measure_branch(const PureState& psi, Branch sign) {
  const double p = branch_probability(psi, sign);
  if (p < kNullBranchThreshold) {
    throw NullBranch("exact branch " + std::string(to_string(sign)) +
                     " has probability " + std::to_string(p));
  }
  const double sg = sign_of(sign);
  CMatrix coeffs = (psi.excited() + sg * psi.ground()) / std::sqrt(2.0 * p);
  return {sign, FieldState(psi.truncation(), std::move(coeffs)), p};
}

double state_fidelity(const FieldState& a, const FieldState& b) {
  require_same_truncation(a.truncation(), b.truncation());
  const cplx ov = (a.coeffs().conjugate().cwiseProduct(b.coeffs())).sum();
  return std::norm(ov) / (a.coeffs().squaredNorm() * b.coeffs().squaredNorm());
}

double state_fidelity(const PureState& a, const PureState& b) {
  return std::norm(inner(a, b)) /
         (a.amplitudes().squaredNorm() * b.amplitudes().squaredNorm());
}

// ---------------------------------------------------------------------------

ClosedSimulation::ClosedSimulation(const SystemParams& s, double tail_threshold)
    : params_(s),
      tail_threshold_(tail_threshold),
      psi0_(initial_state(s.alpha, s.trunc, tail_threshold)),
      propagator_(build_full_hamiltonian(s)) {
  params_.validate();
}

PureState ClosedSimulation::exact_state(double t) const {
  return propagator_.evolve(psi0_, t);
}

double ClosedSimulation::fidelity(double t) const {
  return state_fidelity(exact_state(t), approx_state(params_, t, tail_threshold_));
}

double ClosedSimulation::branch_fidelity(double t, Branch sign) const {
  const BranchResult exact = measure_branch(exact_state(t), sign);
  const AnalyticBranch target = target_branch(params_, t, sign);
  return state_fidelity(exact.state, target.state);
}

ClosedSample ClosedSimulation::sample(double t) const {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  const PureState psi = exact_state(t);
  ClosedSample out;
  out.t = t;
  out.norm = psi.norm();
  out.fidelity = state_fidelity(psi, approx_state(params_, t, tail_threshold_));
  out.p_plus = branch_probability(psi, Branch::Plus);
  out.p_minus = branch_probability(psi, Branch::Minus);
  const BranchWeights w = normalizations_and_probabilities(params_, t);
  out.p_plus_analytic = w.p_plus;
  out.p_minus_analytic = w.p_minus;
  for (Branch b : {Branch::Plus, Branch::Minus}) {
    double f = nan;
    if (branch_probability(psi, b) >= kNullBranchThreshold && w.normalization(b)) {
      f = state_fidelity(measure_branch(psi, b).state, target_branch(params_, t, b).state);
    }
    (b == Branch::Plus ? out.fidelity_plus : out.fidelity_minus) = f;
  }
  return out;
}

double fidelity_full(const SystemParams& s, double t) {
  return ClosedSimulation(s).fidelity(t);
}

double fidelity_branch(const SystemParams& s, double t, Branch sign) {
  return ClosedSimulation(s).branch_fidelity(t, sign);
}

}  // namespace chiralcat
