#include "chiralcat/open_dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace chiralcat {

namespace {

// Plain complex product without the C99 Annex G inf/nan recovery path.
inline cplx mul(cplx a, cplx b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace

DensityMatrix::DensityMatrix(Truncation trunc, CMatrix rho)
    : trunc_(trunc), rho_(std::move(rho)) {
  if (rho_.rows() != trunc_.dim() || rho_.cols() != trunc_.dim()) {
    throw DimensionMismatch("density matrix does not match truncation");
  }
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  return {psi.truncation(), psi.amplitudes() * psi.amplitudes().adjoint()};
}

double DensityMatrix::hermiticity_error() const {
  return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::purity() const {
  // tr(rho^2) = sum_ij rho_ij rho_ji = sum_ij |rho_ij|^2 for Hermitian rho
  return (rho_.cwiseProduct(rho_.transpose())).sum().real();
}

double DensityMatrix::min_eigenvalue() const {
  const CMatrix h = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double DensityMatrix::expectation(const PureState& psi) const {
  require_same_truncation(trunc_, psi.truncation());
  return psi.amplitudes().dot(rho_ * psi.amplitudes()).real();
}

DensityMatrix initial_density(cplx alpha, const Truncation& trunc, double tail_threshold) {
  return DensityMatrix::from_pure(initial_state(alpha, trunc, tail_threshold));
}

// ---------------------------------------------------------------------------

MasterEquation::MasterEquation(const SystemParams& s)
    : params_(s),
      a_cw_(LadderOperator::annihilate(s.trunc, Mode::CW)),
      a_ccw_(LadderOperator::annihilate(s.trunc, Mode::CCW)),
      sigma_minus_(LadderOperator::lower_atom(s.trunc)) {
  params_.validate();
  const Truncation& t = s.trunc;
  diag_rate_.resize(t.dim());
  for (int i = 0; i < t.dim(); ++i) {
    const auto [w, m, k] = t.deindex(i);
    const double energy = m * s.delta_cw() + k * s.delta_ccw();
    const double decay = s.kappa * (m + k) + (w == Atom::Excited ? s.gamma : 0.0);
    diag_rate_(i) = cplx(-0.5 * decay, -energy);
  }
  for (Mode mode : {Mode::CW, Mode::CCW}) couplings_.push_back(LadderOperator::hopping(t, mode));
}

void MasterEquation::add_coupling_and_jumps(const CMatrix& rho, CMatrix& out) const {
  const double J = params_.J;
  if (J != 0.0) {
    const Eigen::Index d = rho.rows();
    CMatrix comm = CMatrix::Zero(d, d);
    for (const LadderOperator& c : couplings_) {
      c.add_left(rho, J, comm);
      c.add_right(rho, -J, comm);
    }
    // out += -i [V, rho]
    const cplx* src = comm.data();
    cplx* dst = out.data();
    for (Eigen::Index i = 0; i < d * d; ++i) dst[i] += cplx(src[i].imag(), -src[i].real());
  }
  if (params_.kappa > 0.0) {
    a_cw_.add_sandwich(rho, params_.kappa, out);
    a_ccw_.add_sandwich(rho, params_.kappa, out);
  }
  if (params_.gamma > 0.0) sigma_minus_.add_sandwich(rho, params_.gamma, out);
}

CMatrix MasterEquation::rhs(const CMatrix& rho) const {
  const Eigen::Index d = diag_rate_.size();
  if (rho.rows() != d || rho.cols() != d) throw DimensionMismatch("rhs input size");
  CMatrix out(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const cplx lj = std::conj(diag_rate_(j));
    for (Eigen::Index i = 0; i < d; ++i) out(i, j) = mul(diag_rate_(i) + lj, rho(i, j));
  }
  add_coupling_and_jumps(rho, out);
  return out;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr std::array<double, 7> kC{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
// fifth-order weights minus embedded fourth-order weights
constexpr std::array<double, 7> kE{71.0 / 57600,      0.0,          -71.0 / 16695, 71.0 / 1920,
                                   -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

// out = diag(u) x diag(conj u): the exact diagonal flow over one sub-step.
void apply_diagonal_flow(const CVector& u, const CMatrix& x, CMatrix& out) {
  const Eigen::Index d = u.size();
  out.resize(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const cplx uj = std::conj(u(j));
    for (Eigen::Index i = 0; i < d; ++i) out(i, j) = mul(mul(u(i), uj), x(i, j));
  }
}

// y + h sum_j a_sj k_j, written out so each stage is a single pass.
void build_stage(const CMatrix& y, const std::array<CMatrix, 7>& k, int s, double h,
                 CMatrix& out) {
  const auto& a = kA[s];
  switch (s) {
    case 1: out = y + (h * a[0]) * k[0]; break;
    case 2: out = y + h * (a[0] * k[0] + a[1] * k[1]); break;
    case 3: out = y + h * (a[0] * k[0] + a[1] * k[1] + a[2] * k[2]); break;
    case 4: out = y + h * (a[0] * k[0] + a[1] * k[1] + a[2] * k[2] + a[3] * k[3]); break;
    case 5:
      out = y + h * (a[0] * k[0] + a[1] * k[1] + a[2] * k[2] + a[3] * k[3] + a[4] * k[4]);
      break;
    default:
      out = y + h * (a[0] * k[0] + a[2] * k[2] + a[3] * k[3] + a[4] * k[4] + a[5] * k[5]);
      break;
  }
}

void hermitize(CMatrix& x) {
  const Eigen::Index d = x.rows();
  for (Eigen::Index j = 0; j < d; ++j) {
    x(j, j) = x(j, j).real();
    for (Eigen::Index i = j + 1; i < d; ++i) {
      const cplx avg = 0.5 * (x(i, j) + std::conj(x(j, i)));
      x(i, j) = avg;
      x(j, i) = std::conj(avg);
    }
  }
}

}  // namespace

IntegratorStats MasterEquation::evolve(const DensityMatrix& rho0, std::span<const double> times,
                                       const Visitor& visit,
                                       const IntegratorOptions& opts) const {
  require_same_truncation(params_.trunc, rho0.truncation());
  if (!std::is_sorted(times.begin(), times.end()) || (!times.empty() && times.front() < 0.0)) {
    throw std::invalid_argument("sample times must be ascending and non-negative");
  }
  const Eigen::Index d = diag_rate_.size();
  const Truncation trunc = params_.trunc;
  IntegratorStats stats;

  // Lawson form: between t_n and t_n + h, v(s) = exp(-(s - t_n) L0) rho(s)
  // obeys v' = exp(-(s - t_n) L0) N(exp((s - t_n) L0) v), which carries only
  // the coupling and jump terms.
  auto nonlinear = [&](const CMatrix& rho, CMatrix& out) {
    out.setZero(d, d);
    add_coupling_and_jumps(rho, out);
    ++stats.rhs_evaluations;
  };

  CMatrix y = rho0.matrix();
  hermitize(y);
  std::array<CMatrix, 7> k;
  nonlinear(y, k[0]);
  CMatrix stage(d, d), moved(d, d), ynew(d, d), err(d, d), tmp(d, d);
  std::array<CVector, 7> fwd, bwd;

  double t = 0.0;
  double h = std::max(opts.initial_step, opts.min_step);
  constexpr double kSafety = 0.9, kFacMin = 0.2, kFacMax = 5.0;

  for (const double target : times) {
    while (t < target) {
      const double remaining = target - t;
      const bool clipped = h >= remaining;
      const double step = clipped ? remaining : h;

      for (int s = 1; s < 7; ++s) {
        const CVector arg = (kC[s] * step) * diag_rate_;
        fwd[s] = arg.array().exp();
        bwd[s] = (-arg).array().exp();
      }
      for (int s = 1; s < 7; ++s) {
        build_stage(y, k, s, step, stage);
        if (s == 6) ynew = stage;  // fifth-order solution in the Lawson frame
        apply_diagonal_flow(fwd[s], stage, moved);
        nonlinear(moved, tmp);
        apply_diagonal_flow(bwd[s], tmp, k[s]);
      }
      err = step * (kE[0] * k[0] + kE[2] * k[2] + kE[3] * k[3] + kE[4] * k[4] + kE[5] * k[5] +
                    kE[6] * k[6]);
      double acc = 0.0;
      for (Eigen::Index i = 0; i < d * d; ++i) {
        const double mag = std::sqrt(std::max(std::norm(y.data()[i]), std::norm(ynew.data()[i])));
        const double scale = opts.atol + opts.rtol * mag;
        acc += std::norm(err.data()[i]) / (scale * scale);
      }
      const double enorm = std::sqrt(acc / double(d * d));

      if (std::isfinite(enorm) && enorm <= 1.0) {
        ++stats.accepted;
        apply_diagonal_flow(fwd[6], ynew, y);
        hermitize(y);
        // FSAL: the last stage is N(rho(t + step)) in the Lawson frame.
        apply_diagonal_flow(fwd[6], k[6], k[0]);
        hermitize(k[0]);
        t = clipped ? target : t + step;
        const double fac =
            enorm == 0.0 ? kFacMax
                         : std::clamp(kSafety * std::pow(enorm, -0.2), kFacMin, kFacMax);
        const double proposal = step * fac;
        h = clipped ? std::max(h, proposal) : proposal;
      } else {
        ++stats.rejected;
        const double fac = std::isfinite(enorm)
                               ? std::clamp(kSafety * std::pow(enorm, -0.2), kFacMin, 1.0)
                               : 0.25;
        h = step * fac;
        if (h < opts.min_step) {
          std::ostringstream msg;
          msg << "step size underflow (h = " << h << ") at t = " << t;
          throw IntegratorFailure(msg.str());
        }
      }
      if (stats.accepted + stats.rejected > opts.max_steps) {
        throw IntegratorFailure("maximum number of integration steps exceeded");
      }
    }
    visit(target, DensityMatrix(trunc, y));
  }
  return stats;
}

DensityMatrix MasterEquation::evolve_to(const DensityMatrix& rho0, double t,
                                        const IntegratorOptions& opts) const {
  DensityMatrix out = rho0;
  const std::array<double, 1> times{t};
  evolve(rho0, times, [&](double, const DensityMatrix& r) { out = r; }, opts);
  return out;
}

CMatrix lindblad_rhs(const SystemParams& s, const DensityMatrix& rho) {
  require_same_truncation(s.trunc, rho.truncation());
  return MasterEquation(s).rhs(rho.matrix());
}

DensityMatrix evolve_master(const SystemParams& s, const DensityMatrix& rho0, double t,
                            const IntegratorOptions& opts) {
  return MasterEquation(s).evolve_to(rho0, t, opts);
}

// ---------------------------------------------------------------------------

namespace {

CMatrix branch_block_sum(const DensityMatrix& rho, Branch sign) {
  const int f = rho.truncation().field_dim();
  const CMatrix& r = rho.matrix();
  const double sg = sign_of(sign);
  return r.topLeftCorner(f, f) + r.bottomRightCorner(f, f) +
         sg * (r.topRightCorner(f, f) + r.bottomLeftCorner(f, f));
}

CVector flatten(const FieldState& s) {
  const Truncation& t = s.truncation();
  CVector v(t.field_dim());
  for (int m = 0; m < t.n_cw(); ++m) {
    for (int k = 0; k < t.n_ccw(); ++k) v(t.field_index(m, k)) = s.coeffs()(m, k);
  }
  return v;
}

}  // namespace

double branch_probability(const DensityMatrix& rho, Branch sign) {
  return 0.5 * branch_block_sum(rho, sign).trace().real();
}

BranchDensity branch_density(const DensityMatrix& rho, Branch sign) {
  CMatrix xi = branch_block_sum(rho, sign);
  const double p = 0.5 * xi.trace().real();
  if (p < kNullBranchThreshold) {
    throw NullBranch("open-system branch " + std::string(to_string(sign)) +
                     " has probability " + std::to_string(p));
  }
  xi /= 2.0 * p;
  return {sign, rho.truncation(), std::move(xi), p};
}

double fidelity_open(const SystemParams& s, double t, const DensityMatrix& rho_t) {
  return rho_t.expectation(approx_state(s, t));
}

double fidelity_open_branch(const SystemParams& s, double t, Branch sign,
                            const DensityMatrix& rho_t) {
  const BranchDensity bd = branch_density(rho_t, sign);
  const CVector target = flatten(target_branch(s, t, sign).state);
  return target.dot(bd.rho * target).real();
}

double fidelity_open(const SystemParams& s, double t) {
  return fidelity_open(s, t, evolve_master(s, initial_density(s.alpha, s.trunc), t));
}

double fidelity_open_branch(const SystemParams& s, double t, Branch sign) {
  return fidelity_open_branch(s, t, sign,
                              evolve_master(s, initial_density(s.alpha, s.trunc), t));
}

}  // namespace chiralcat
